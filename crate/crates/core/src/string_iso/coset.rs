use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{precondition, Result};
use crate::perm::{Perm, PermGroup};

/// `Aut·σ` or empty: the result of every isomorphism query.
#[derive(Clone)]
pub enum IsoCoset {
    Empty,
    Coset { group: PermGroup, rep: Perm },
}

impl IsoCoset {
    pub fn new(group: PermGroup, rep: Perm) -> Self {
        IsoCoset::Coset { group, rep }
    }

    /// The whole group as a coset with identity representative.
    pub fn whole(group: PermGroup) -> Self {
        let n = group.degree();
        IsoCoset::Coset { group, rep: Perm::identity(n) }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, IsoCoset::Empty)
    }

    pub fn group(&self) -> Option<&PermGroup> {
        match self {
            IsoCoset::Empty => None,
            IsoCoset::Coset { group, .. } => Some(group),
        }
    }

    pub fn rep(&self) -> Option<&Perm> {
        match self {
            IsoCoset::Empty => None,
            IsoCoset::Coset { rep, .. } => Some(rep),
        }
    }

    pub fn size(&self) -> BigUint {
        self.group().map_or_else(BigUint::zero, |g| g.order())
    }

    pub fn contains(&self, g: &Perm) -> bool {
        match self {
            IsoCoset::Empty => false,
            IsoCoset::Coset { group, rep } => group.contains(&g.then(&rep.inverse())),
        }
    }

    /// Right multiplication of the whole coset by `sigma`.
    pub fn shift(self, sigma: &Perm) -> IsoCoset {
        match self {
            IsoCoset::Empty => IsoCoset::Empty,
            IsoCoset::Coset { group, rep } => IsoCoset::Coset { group, rep: rep.then(sigma) },
        }
    }

    /// Set equality.
    pub fn same_set(&self, other: &IsoCoset) -> bool {
        match (self, other) {
            (IsoCoset::Empty, IsoCoset::Empty) => true,
            (IsoCoset::Coset { group: g1, rep: r1 }, IsoCoset::Coset { group: g2, .. }) => {
                g1.same_group(g2) && other.contains(r1)
            }
            _ => false,
        }
    }

    pub fn elements(&self) -> Vec<Perm> {
        match self {
            IsoCoset::Empty => vec![],
            IsoCoset::Coset { group, rep } => group.elements().iter().map(|g| g.then(rep)).collect(),
        }
    }
}

impl fmt::Display for IsoCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoCoset::Empty => writeln!(f, "EMPTY"),
            IsoCoset::Coset { group, rep } => {
                writeln!(f, "{rep}")?;
                write!(f, "{group}")
            }
        }
    }
}

impl fmt::Debug for IsoCoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsoCoset::Empty => write!(f, "Empty"),
            IsoCoset::Coset { group, rep } => write!(f, "Coset(order {}, rep {rep})", group.order()),
        }
    }
}

/// Union of cosets of a common group `F`: `⟨F ∪ {τ_i τ_1⁻¹}⟩ τ_1`.
pub fn iso_cosets_union(cosets: Vec<IsoCoset>) -> Result<IsoCoset> {
    let mut first: Option<(PermGroup, Perm)> = None;
    let mut extra = Vec::new();
    for c in cosets {
        if let IsoCoset::Coset { group, rep } = c {
            match &first {
                None => first = Some((group, rep)),
                Some((g1, r1)) => {
                    if g1.degree() != group.degree() {
                        return precondition("cosets of different degrees");
                    }
                    if !g1.contains(&rep.then(&r1.inverse())) {
                        extra.push(rep.then(&r1.inverse()));
                    }
                }
            }
        }
    }
    Ok(match first {
        None => IsoCoset::Empty,
        Some((g, r)) if extra.is_empty() => IsoCoset::new(g, r),
        Some((g, r)) => IsoCoset::new(g.join(&extra), r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    #[test]
    fn union_of_empties_and_singletons() {
        assert!(iso_cosets_union(vec![IsoCoset::Empty, IsoCoset::Empty]).unwrap().is_empty());
        let c = IsoCoset::new(PermGroup::trivial(3), p(3, "(0 1)"));
        assert!(iso_cosets_union(vec![c.clone()]).unwrap().same_set(&c));
    }

    #[test]
    fn union_of_two_trivial_cosets_is_closure() {
        let a = IsoCoset::new(PermGroup::trivial(3), p(3, "(0 1)"));
        let b = IsoCoset::new(PermGroup::trivial(3), p(3, "(0 2)"));
        let u = iso_cosets_union(vec![a, b]).unwrap();
        // <(0 2)(0 1)^-1> (0 1): the group has order 3 here
        let got: BTreeSet<Perm> = u.elements().into_iter().collect();
        assert!(got.contains(&p(3, "(0 1)")) && got.contains(&p(3, "(0 2)")));
        let h = p(3, "(0 2)").then(&p(3, "(0 1)").inverse());
        let expect: BTreeSet<Perm> = (0..h.order()).map(|e| h.pow(e).then(&p(3, "(0 1)"))).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn coset_equality() {
        let g = PermGroup::new(4, vec![p(4, "(0 1)")]).unwrap();
        let a = IsoCoset::new(g.clone(), p(4, "(2 3)"));
        let b = IsoCoset::new(g.clone(), p(4, "(0 1)(2 3)"));
        assert!(a.same_set(&b));
        assert!(!a.same_set(&IsoCoset::whole(g)));
    }
}
