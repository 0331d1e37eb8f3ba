use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{precondition, Result};
use crate::perm::{Perm, PermGroup, StabChain};

/// A k-ary relational structure: a list of relations, each a set of k-tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalStructure {
    pub n: usize,
    pub arity: usize,
    pub relations: Vec<BTreeSet<Vec<usize>>>,
}

impl RelationalStructure {
    pub fn new(n: usize, arity: usize, relations: Vec<BTreeSet<Vec<usize>>>) -> Result<Self> {
        for r in &relations {
            for t in r {
                if t.len() != arity || t.iter().any(|&p| p >= n) {
                    return precondition("tuple of wrong arity or out of range");
                }
            }
        }
        Ok(RelationalStructure { n, arity, relations })
    }

    /// Colors each tuple by the set of relations containing it.
    pub fn to_partition(&self) -> PartitionStructure {
        let mut sig: BTreeMap<Vec<usize>, Vec<u32>> = BTreeMap::new();
        for (i, r) in self.relations.iter().enumerate() {
            for t in r {
                sig.entry(t.clone()).or_default().push(i as u32);
            }
        }
        let mut names: Vec<Vec<u32>> = sig.values().cloned().collect();
        names.push(Vec::new());
        names.sort();
        names.dedup();
        PartitionStructure::from_fn(self.n, self.arity, |t| {
            let s = sig.get(t).cloned().unwrap_or_default();
            names.binary_search(&s).unwrap() as u32
        })
    }
}

/// A k-ary partition structure: every tuple of `Γ^k` carries a color id.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartitionStructure {
    n: usize,
    arity: usize,
    colors: Vec<u32>,
}

impl PartitionStructure {
    pub fn from_fn(n: usize, arity: usize, mut f: impl FnMut(&[usize]) -> u32) -> Self {
        let total = n.pow(arity as u32);
        let mut colors = Vec::with_capacity(total);
        let mut t = vec![0usize; arity];
        for _ in 0..total {
            colors.push(f(&t));
            for j in (0..arity).rev() {
                t[j] += 1;
                if t[j] < n {
                    break;
                }
                t[j] = 0;
            }
        }
        PartitionStructure { n, arity, colors }
    }

    /// Binary structure from a row-major color matrix.
    pub fn from_matrix(n: usize, colors: Vec<u32>) -> Self {
        assert_eq!(colors.len(), n * n);
        PartitionStructure { n, arity: 2, colors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    #[inline]
    pub fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &p| acc * self.n + p)
    }

    #[inline]
    pub fn color(&self, t: &[usize]) -> u32 {
        self.colors[self.index(t)]
    }

    pub fn num_colors(&self) -> usize {
        self.colors.iter().collect::<BTreeSet<_>>().len()
    }

    /// `S^π`, with `S^π(t^π) = S(t)`.
    pub fn act(&self, pi: &Perm) -> PartitionStructure {
        let inv = pi.inverse();
        PartitionStructure::from_fn(self.n, self.arity, |t| {
            let pre: Vec<usize> = t.iter().map(|&p| inv.apply(p)).collect();
            self.color(&pre)
        })
    }

    pub fn is_iso(&self, other: &PartitionStructure, pi: &Perm) -> bool {
        self.n == other.n && self.arity == other.arity && self.act(pi) == *other
    }

    /// Per point: counts of (position, color) over tuples containing it.
    fn point_invariants(&self) -> Vec<Vec<(usize, u32, usize)>> {
        let mut maps: Vec<BTreeMap<(usize, u32), usize>> = vec![BTreeMap::new(); self.n];
        let mut t = vec![0usize; self.arity];
        for &c in &self.colors {
            for (j, &p) in t.iter().enumerate() {
                *maps[p].entry((j, c)).or_insert(0) += 1;
            }
            for j in (0..self.arity).rev() {
                t[j] += 1;
                if t[j] < self.n {
                    break;
                }
                t[j] = 0;
            }
        }
        maps.into_iter().map(|m| m.into_iter().map(|((j, c), k)| (j, c, k)).collect()).collect()
    }
}

impl fmt::Debug for PartitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartitionStructure(n {}, arity {}, colors {})", self.n, self.arity, self.num_colors())
    }
}

impl fmt::Display for PartitionStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity == 2 {
            for i in 0..self.n {
                let row: Vec<String> = (0..self.n).map(|j| self.color(&[i, j]).to_string()).collect();
                writeln!(f, "{}", row.join(" "))?;
            }
            return Ok(());
        }
        let mut t = vec![0usize; self.arity];
        for &c in &self.colors {
            let parts: Vec<String> = t.iter().map(|p| p.to_string()).collect();
            writeln!(f, "{} : {c}", parts.join(" "))?;
            for j in (0..self.arity).rev() {
                t[j] += 1;
                if t[j] < self.n {
                    break;
                }
                t[j] = 0;
            }
        }
        Ok(())
    }
}

/// Backtracking search for color-preserving bijections between two structures.
struct Search<'a> {
    a: &'a PartitionStructure,
    b: &'a PartitionStructure,
    order: Vec<usize>,
    cand: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
}

const UNSET: usize = usize::MAX;

impl<'a> Search<'a> {
    fn new(a: &'a PartitionStructure, b: &'a PartitionStructure) -> Option<Self> {
        if a.n != b.n || a.arity != b.arity {
            return None;
        }
        let n = a.n;
        let (ia, ib) = (a.point_invariants(), b.point_invariants());
        let cand: Vec<Vec<usize>> = (0..n).map(|p| (0..n).filter(|&q| ia[p] == ib[q]).collect()).collect();
        if cand.iter().any(|c| c.is_empty()) {
            return None;
        }
        // most constrained points first, ties by index
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&p| (cand[p].len(), p));
        Some(Search { a, b, order, cand, map: vec![UNSET; n], used: vec![false; n] })
    }

    // checks every tuple over assigned points that contains `p`
    fn consistent(&self, p: usize, assigned: &[usize]) -> bool {
        let k = self.a.arity;
        let s = assigned.len();
        let mut idx = vec![0usize; k];
        let mut t = vec![0usize; k];
        let mut img = vec![0usize; k];
        loop {
            let mut has_p = false;
            for j in 0..k {
                t[j] = assigned[idx[j]];
                img[j] = self.map[t[j]];
                has_p |= t[j] == p;
            }
            if has_p && self.a.color(&t) != self.b.color(&img) {
                return false;
            }
            let mut j = k;
            loop {
                if j == 0 {
                    return true;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < s {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    fn assign(&mut self, p: usize, q: usize, assigned: &mut Vec<usize>) -> bool {
        if self.used[q] || !self.cand[p].contains(&q) {
            return false;
        }
        self.map[p] = q;
        self.used[q] = true;
        assigned.push(p);
        if self.consistent(p, assigned) {
            true
        } else {
            self.unassign(p, assigned);
            false
        }
    }

    fn unassign(&mut self, p: usize, assigned: &mut Vec<usize>) {
        self.used[self.map[p]] = false;
        self.map[p] = UNSET;
        assigned.pop();
    }

    fn extend(&mut self, depth: usize, assigned: &mut Vec<usize>) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let p = self.order[depth];
        if self.map[p] != UNSET {
            return self.extend(depth + 1, assigned);
        }
        let cands = self.cand[p].clone();
        for q in cands {
            if self.assign(p, q, assigned) {
                if self.extend(depth + 1, assigned) {
                    return true;
                }
                self.unassign(p, assigned);
            }
        }
        false
    }

    fn result(&self) -> Perm {
        Perm::from_images(self.map.clone()).expect("complete assignment is a bijection")
    }

    fn reset(&mut self) {
        self.map.iter_mut().for_each(|m| *m = UNSET);
        self.used.iter_mut().for_each(|u| *u = false);
    }
}

/// Some `π` with `a^π = b`.
pub fn structure_iso(a: &PartitionStructure, b: &PartitionStructure) -> Option<Perm> {
    let mut s = Search::new(a, b)?;
    let mut assigned = Vec::new();
    if s.extend(0, &mut assigned) {
        Some(s.result())
    } else {
        None
    }
}

/// The automorphism group, found level by level along the search order with orbit pruning.
pub fn structure_aut(a: &PartitionStructure) -> PermGroup {
    let n = a.n;
    let mut s = Search::new(a, a).expect("a structure is isomorphic to itself");
    let order = s.order.clone();
    let mut chain = StabChain::build(n, &[], &order);
    for i in (0..n).rev() {
        let base_point = order[i];
        for q in s.cand[base_point].clone() {
            if q == base_point || chain.level_orbit(i).contains(&q) {
                continue;
            }
            s.reset();
            let mut assigned = Vec::new();
            let mut ok = true;
            for &p in &order[..i] {
                ok &= s.assign(p, p, &mut assigned);
            }
            if ok && s.assign(base_point, q, &mut assigned) && s.extend(i + 1, &mut assigned) {
                let g = s.result();
                chain.add_generator(&g);
            }
        }
    }
    PermGroup::from_chain(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn cycle_graph(n: usize, directed: bool) -> PartitionStructure {
        PartitionStructure::from_fn(n, 2, |t| {
            let (i, j) = (t[0], t[1]);
            if i == j {
                2
            } else if (i + 1) % n == j || (!directed && (j + 1) % n == i) {
                1
            } else {
                0
            }
        })
    }

    #[test]
    fn cycle_automorphisms() {
        assert_eq!(structure_aut(&cycle_graph(5, false)).order(), BigUint::from(10u32));
        assert_eq!(structure_aut(&cycle_graph(6, false)).order(), BigUint::from(12u32));
        assert_eq!(structure_aut(&cycle_graph(4, true)).order(), BigUint::from(4u32));
    }

    #[test]
    fn iso_found_and_verified() {
        let a = cycle_graph(7, false);
        let pi = Perm::parse(7, "(0 3 5)(1 6)").unwrap();
        let b = a.act(&pi);
        let found = structure_iso(&a, &b).unwrap();
        assert!(a.is_iso(&b, &found));
        assert!(structure_iso(&cycle_graph(6, false), &cycle_graph(6, true)).is_none());
    }

    #[test]
    fn ternary_structure() {
        // cyclic triples (i, i+1, i+2) on 5 points
        let a = PartitionStructure::from_fn(5, 3, |t| u32::from(t[1] == (t[0] + 1) % 5 && t[2] == (t[0] + 2) % 5));
        assert_eq!(structure_aut(&a).order(), BigUint::from(5u32));
    }

    #[test]
    fn relational_to_partition() {
        let r = RelationalStructure::new(3, 2, vec![[vec![0, 1], vec![1, 2]].into_iter().collect()]).unwrap();
        let p = r.to_partition();
        assert_eq!(p.num_colors(), 2);
        assert_eq!(p.color(&[0, 1]), p.color(&[1, 2]));
        assert!(RelationalStructure::new(3, 2, vec![[vec![0, 5]].into_iter().collect()]).is_err());
    }
}
