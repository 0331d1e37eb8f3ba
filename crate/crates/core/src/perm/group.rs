use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use super::{Perm, StabChain};
use crate::error::{check_degree, Error, Result};

/// A permutation group given by generators; the stabilizer chain is built on demand.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceLock<Arc<StabChain>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Giant {
    Symmetric,
    Alternating,
    Neither,
}

impl PermGroup {
    pub fn new(degree: usize, gens: Vec<Perm>) -> Result<Self> {
        for g in &gens {
            check_degree(degree, g.degree())?;
        }
        Ok(Self::from_gens(degree, gens))
    }

    // generators already validated by the caller
    pub(crate) fn from_gens(degree: usize, gens: Vec<Perm>) -> Self {
        let gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let g = PermGroup { degree, gens, chain: OnceLock::new() };
        if g.gens.len() > 2 * degree * degree {
            g.normalized()
        } else {
            g
        }
    }

    pub fn from_chain(chain: StabChain) -> Self {
        let degree = chain.degree();
        let gens = chain.level_gens(0).to_vec();
        let g = PermGroup { degree, gens, chain: OnceLock::new() };
        let _ = g.chain.set(Arc::new(chain));
        g
    }

    pub fn trivial(degree: usize) -> Self {
        Self::from_chain(StabChain::trivial(degree))
    }

    pub fn symmetric(degree: usize) -> Self {
        Self::from_gens(degree, sym_gens(degree, &(0..degree).collect::<Vec<_>>()))
    }

    pub fn alternating(degree: usize) -> Self {
        Self::from_gens(degree, alt_gens(degree, &(0..degree).collect::<Vec<_>>()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.gens
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| Arc::new(StabChain::build(self.degree, &self.gens, &[])))
    }

    /// Chain with the given base prefix; not cached unless the prefix is empty.
    pub fn chain_with_base(&self, prefix: &[usize]) -> StabChain {
        if prefix.is_empty() {
            return self.chain().clone();
        }
        // seed with strong generators when available, they make the rebuild cheaper
        let gens = match self.chain.get() {
            Some(c) => c.strong_gens(),
            None => self.gens.clone(),
        };
        StabChain::build(self.degree, &gens, prefix)
    }

    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    pub fn order_capped(&self, cap: u64) -> Option<u64> {
        self.chain().order_capped(cap)
    }

    pub fn order_u128(&self) -> Option<u128> {
        self.order().to_u128()
    }

    pub fn is_trivial(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.chain().contains(g)
    }

    /// Membership with an explicit degree check.
    pub fn membership(&self, g: &Perm) -> Result<bool> {
        check_degree(self.degree, g.degree())?;
        Ok(self.chain().contains(g))
    }

    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.gens.iter().all(|g| other.contains(g))
    }

    /// Equality as sets of permutations.
    pub fn same_group(&self, other: &PermGroup) -> bool {
        self.degree == other.degree && self.order() == other.order() && self.is_subgroup_of(other)
    }

    pub fn elements(&self) -> Vec<Perm> {
        self.chain().elements()
    }

    pub fn random_element<R: rand::Rng>(&self, rng: &mut R) -> Perm {
        self.chain().random_element(rng)
    }

    /// Replaces the generators by a small generating set found by greedy sifting.
    pub fn normalized(&self) -> PermGroup {
        let source: Vec<Perm> = match self.chain.get() {
            Some(c) => c.strong_gens(),
            None => self.gens.clone(),
        };
        let mut chain = StabChain::trivial(self.degree);
        let mut kept = Vec::new();
        for g in source {
            if chain.add_generator(&g) {
                kept.push(g);
            }
        }
        let out = PermGroup { degree: self.degree, gens: kept, chain: OnceLock::new() };
        let _ = out.chain.set(Arc::new(chain));
        out
    }

    /// Pointwise stabilizer of `points`.
    pub fn pointwise_stabilizer(&self, points: &[usize]) -> Result<PermGroup> {
        for &p in points {
            if p >= self.degree {
                return Err(Error::PointOutOfRange { point: p, degree: self.degree });
            }
        }
        if self.is_trivial() {
            return Ok(self.clone());
        }
        let mut prefix: Vec<usize> = Vec::new();
        for &p in points {
            if !prefix.contains(&p) {
                prefix.push(p);
            }
        }
        let chain = self.chain_with_base(&prefix);
        Ok(PermGroup::from_chain(chain.suffix(prefix.len())))
    }

    /// Setwise stabilizer by Schreier generators over the orbit of the set.
    pub fn setwise_stabilizer(&self, points: &[usize], bound: usize) -> Result<PermGroup> {
        let mut set = points.to_vec();
        set.sort_unstable();
        let (h, _) = self.subgroup_with_cosets(
            |g| {
                let mut img: Vec<usize> = set.iter().map(|&p| g.apply(p)).collect();
                img.sort_unstable();
                img == set
            },
            bound,
        )?;
        Ok(h)
    }

    /// Subgroup defined by a membership predicate, with right coset representatives.
    ///
    /// Errors with `IndexOverflow` once more than `index_bound` cosets are found.
    pub fn subgroup_with_cosets(
        &self,
        pred: impl Fn(&Perm) -> bool,
        index_bound: usize,
    ) -> Result<(PermGroup, Vec<Perm>)> {
        let mut reps = vec![Perm::identity(self.degree)];
        let mut rep_invs = vec![Perm::identity(self.degree)];
        let mut h = StabChain::trivial(self.degree);
        let mut idx = 0;
        while idx < reps.len() {
            for s in &self.gens {
                let g = reps[idx].then(s);
                let mut found = false;
                for inv in &rep_invs {
                    let cand = g.then(inv);
                    if pred(&cand) {
                        h.add_generator(&cand);
                        found = true;
                        break;
                    }
                }
                if !found {
                    if reps.len() >= index_bound {
                        return Err(Error::IndexOverflow { bound: index_bound });
                    }
                    rep_invs.push(g.inverse());
                    reps.push(g);
                }
            }
            idx += 1;
        }
        Ok((PermGroup::from_chain(h), reps))
    }

    pub fn giant_test(&self) -> Giant {
        let n = self.degree;
        let fact = factorial(n);
        let ord = self.order();
        if ord == fact {
            Giant::Symmetric
        } else if n >= 2 && ord * 2u32 == fact {
            Giant::Alternating
        } else {
            Giant::Neither
        }
    }

    /// True when the group contains `Alt` of the full domain.
    pub fn is_giant(&self) -> bool {
        self.giant_test() != Giant::Neither
    }

    /// Subgroup generated by `self` and extra elements.
    pub fn join(&self, extra: &[Perm]) -> PermGroup {
        let mut chain = self.chain().clone();
        let mut gens = self.gens.clone();
        for g in extra {
            if chain.add_generator(g) {
                gens.push(g.clone());
            }
        }
        let out = PermGroup { degree: self.degree, gens, chain: OnceLock::new() };
        let _ = out.chain.set(Arc::new(chain));
        out
    }

    /// Group generated by the restrictions of the generators to an invariant set.
    pub fn restrict(&self, points: &[usize]) -> Result<PermGroup> {
        let gens = self.gens.iter().map(|g| g.restrict(points)).collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::from_gens(points.len(), gens))
    }

    pub fn conjugate(&self, c: &Perm) -> PermGroup {
        PermGroup::from_gens(self.degree, self.gens.iter().map(|g| g.conjugate_by(c)).collect())
    }

    /// Whether every generator maps `points` onto itself.
    pub fn preserves_set(&self, points: &[usize]) -> bool {
        let mut mark = vec![false; self.degree];
        for &p in points {
            mark[p] = true;
        }
        self.gens.iter().all(|g| points.iter().all(|&p| mark[g.apply(p)]))
    }

    /// Parses one permutation per non-empty line.
    pub fn parse(degree: usize, text: &str) -> Result<PermGroup> {
        let gens = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| Perm::parse(degree, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(PermGroup::from_gens(degree, gens))
    }
}

impl fmt::Display for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for g in &self.gens {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(degree {}, gens {:?})", self.degree, self.gens)
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Generators of `Sym(points)` inside `Sym(degree)`.
pub fn sym_gens(degree: usize, points: &[usize]) -> Vec<Perm> {
    match points.len() {
        0 | 1 => vec![],
        2 => vec![Perm::transposition(degree, points[0], points[1])],
        _ => vec![Perm::cycle(degree, points), Perm::transposition(degree, points[0], points[1])],
    }
}

/// Generators of `Alt(points)`: a 3-cycle plus a long odd-length cycle.
pub fn alt_gens(degree: usize, points: &[usize]) -> Vec<Perm> {
    let r = points.len();
    if r < 3 {
        return vec![];
    }
    let three = Perm::cycle(degree, &points[..3]);
    if r == 3 {
        return vec![three];
    }
    let long = if r % 2 == 1 { Perm::cycle(degree, &points[2..]) } else { Perm::cycle(degree, &points[1..]) };
    vec![long, three]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    // closure by repeated right multiplication with generators
    fn closure(n: usize, gens: &[Perm]) -> HashSet<Perm> {
        let mut seen = HashSet::new();
        let mut stack = vec![Perm::identity(n)];
        seen.insert(Perm::identity(n));
        while let Some(g) = stack.pop() {
            for s in gens {
                let h = g.then(s);
                if seen.insert(h.clone()) {
                    stack.push(h);
                }
            }
        }
        seen
    }

    fn d8() -> PermGroup {
        PermGroup::new(4, vec![p(4, "(0 1 2 3)"), p(4, "(1 3)")]).unwrap()
    }

    #[test]
    fn d8_order_matches_closure() {
        let g = d8();
        assert_eq!(closure(4, g.generators()).len(), 8);
        assert_eq!(g.order(), BigUint::from(8u32));
    }

    #[test]
    fn trivial_and_sym4() {
        assert_eq!(PermGroup::new(5, vec![]).unwrap().order(), BigUint::one());
        let s4 = PermGroup::new(4, vec![p(4, "(0 1 2 3)"), p(4, "(0 1)")]).unwrap();
        assert_eq!(s4.order(), BigUint::from(24u32));
    }

    #[test]
    fn d8_membership() {
        let g = d8();
        let all = closure(4, g.generators());
        assert!(g.contains(&Perm::identity(4)));
        assert!(g.contains(&p(4, "(0 2)")) && all.contains(&p(4, "(0 2)")));
        assert!(!g.contains(&p(4, "(0 1)")) && !all.contains(&p(4, "(0 1)")));
        assert!(g.membership(&Perm::identity(5)).is_err());
    }

    #[test]
    fn stabilizers() {
        let g = d8();
        let st = g.pointwise_stabilizer(&[0]).unwrap();
        let brute: Vec<_> = closure(4, g.generators()).into_iter().filter(|h| h.fixes(0)).collect();
        assert_eq!(brute.len(), 2);
        assert_eq!(st.order(), BigUint::from(2u32));
        assert!(st.contains(&p(4, "(1 3)")));
        assert_eq!(PermGroup::symmetric(4).pointwise_stabilizer(&[0]).unwrap().order(), BigUint::from(6u32));
        assert!(PermGroup::symmetric(4).pointwise_stabilizer(&[0, 1, 2, 3]).unwrap().order().is_one());
    }

    #[test]
    fn cosets_of_even_subgroup() {
        let s4 = PermGroup::symmetric(4);
        let (h, reps) = s4.subgroup_with_cosets(|g| g.is_even(), 5).unwrap();
        assert_eq!(reps.len(), 2);
        assert_eq!(h.order(), BigUint::from(12u32));
        let (h, reps) = s4.subgroup_with_cosets(|_| true, 1).unwrap();
        assert_eq!(reps, vec![Perm::identity(4)]);
        assert!(h.same_group(&s4));
        assert_eq!(s4.subgroup_with_cosets(|g| g.is_identity(), 3).unwrap_err(), Error::IndexOverflow { bound: 3 });
    }

    #[test]
    fn setwise_pair_in_d8() {
        let g = d8();
        let fixes = |h: &Perm| {
            let mut s = vec![h.apply(0), h.apply(2)];
            s.sort();
            s == vec![0, 2]
        };
        let brute = closure(4, g.generators()).into_iter().filter(|h| fixes(h)).count();
        let (h, reps) = g.subgroup_with_cosets(fixes, 8).unwrap();
        assert_eq!(h.order(), BigUint::from(brute));
        assert_eq!(reps.len(), 8 / brute);
    }

    #[test]
    fn giants() {
        let n = 7;
        let sym = PermGroup::new(n, vec![Perm::cycle(n, &(0..n).collect::<Vec<_>>()), Perm::transposition(n, 0, 1)]).unwrap();
        assert_eq!(sym.giant_test(), Giant::Symmetric);
        let alt = PermGroup::new(7, vec![p(7, "(2 3 4 5 6)"), p(7, "(0 1 2)")]).unwrap();
        assert_eq!(alt.giant_test(), Giant::Alternating);
        assert_eq!(d8().giant_test(), Giant::Neither);
        for n in 3..9 {
            assert_eq!(PermGroup::alternating(n).giant_test(), Giant::Alternating);
            assert_eq!(PermGroup::symmetric(n).giant_test(), Giant::Symmetric);
        }
    }

    #[test]
    fn normalization_caps_generators() {
        let n = 3;
        let gens: Vec<Perm> = (0..40).map(|i| if i % 2 == 0 { p(3, "(0 1)") } else { p(3, "(0 1 2)") }).collect();
        let g = PermGroup::new(n, gens).unwrap();
        assert!(g.generators().len() <= n * n);
        assert_eq!(g.order(), BigUint::from(6u32));
    }
}
