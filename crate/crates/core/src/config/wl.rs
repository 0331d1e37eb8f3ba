use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::PartitionStructure;
use crate::action::UnionFind;
use crate::error::{precondition, Result};
use crate::perm::{Perm, PermGroup};

/// A classical (binary) coherent configuration, stored as its color matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoherentConfiguration {
    s: PartitionStructure,
}

impl CoherentConfiguration {
    /// Wraps a binary structure without checking coherence.
    pub fn from_structure(s: PartitionStructure) -> Result<Self> {
        if s.arity() != 2 {
            return precondition("configuration must be binary");
        }
        Ok(CoherentConfiguration { s })
    }

    pub fn n(&self) -> usize {
        self.s.n()
    }

    #[inline]
    pub fn color(&self, i: usize, j: usize) -> u32 {
        self.s.colors()[i * self.s.n() + j]
    }

    pub fn structure(&self) -> &PartitionStructure {
        &self.s
    }

    pub fn rank(&self) -> usize {
        self.s.num_colors()
    }

    /// Color ids in increasing order.
    pub fn palette(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.s.colors().iter().copied().collect();
        set.into_iter().collect()
    }

    /// Number of ordered pairs of each color.
    pub fn relation_sizes(&self) -> BTreeMap<u32, usize> {
        let mut out = BTreeMap::new();
        for &c in self.s.colors() {
            *out.entry(c).or_insert(0) += 1;
        }
        out
    }

    pub fn diagonal_colors(&self) -> BTreeSet<u32> {
        (0..self.n()).map(|i| self.color(i, i)).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.diagonal_colors().len() <= 1
    }

    /// Diagonal and off-diagonal colors are disjoint, and the transpose of a color class is a class.
    pub fn satisfies_axioms(&self) -> bool {
        let n = self.n();
        let diag = self.diagonal_colors();
        let mut transpose: BTreeMap<u32, u32> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let c = self.color(i, j);
                if (i != j) == diag.contains(&c) {
                    return false;
                }
                let t = self.color(j, i);
                if *transpose.entry(c).or_insert(t) != t {
                    return false;
                }
            }
        }
        true
    }

    /// Whether the number of `l` with `(c(i,l), c(l,j)) = (a, b)` depends only on `c(i,j)`.
    pub fn is_coherent(&self) -> bool {
        let n = self.n();
        let mut seen: BTreeMap<u32, BTreeMap<(u32, u32), usize>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let mut counts = BTreeMap::new();
                for l in 0..n {
                    *counts.entry((self.color(i, l), self.color(l, j))).or_insert(0) += 1;
                }
                match seen.get(&self.color(i, j)) {
                    Some(prev) if *prev != counts => return false,
                    Some(_) => {}
                    None => {
                        seen.insert(self.color(i, j), counts);
                    }
                }
            }
        }
        true
    }

    /// Whether the two matrices induce the same partition of ordered pairs.
    pub fn same_partition(&self, other: &CoherentConfiguration) -> bool {
        same_coloring(self.s.colors(), other.s.colors())
    }

    /// `S^π` as a configuration.
    pub fn act(&self, pi: &Perm) -> CoherentConfiguration {
        CoherentConfiguration { s: self.s.act(pi) }
    }
}

impl fmt::Debug for CoherentConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoherentConfiguration(n {}, rank {})", self.n(), self.rank())
    }
}

impl fmt::Display for CoherentConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.s)
    }
}

/// Whether two colorings of the same index set have the same classes.
pub fn same_coloring(a: &[u32], b: &[u32]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if *fwd.entry(x).or_insert(y) != y || *back.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

// Renames arbitrary ordered keys to 0.. in sorted key order.
fn rename<K: Ord + Clone>(keys: &[K]) -> Vec<u32> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap() as u32).collect()
}

/// Two-dimensional Weisfeiler–Leman refinement to the coarsest coherent refinement.
///
/// Colors are named by the rank of their signature among all signatures of the round,
/// so the output depends only on the isomorphism type of the labelled input.
pub fn wl2_refine(input: &PartitionStructure) -> Result<CoherentConfiguration> {
    if input.arity() != 2 {
        return precondition("WL refinement needs a binary structure");
    }
    let n = input.n();
    let c = input.colors();
    let init: Vec<(u32, bool, u32)> =
        (0..n * n).map(|idx| (c[idx], idx / n == idx % n, c[(idx % n) * n + idx / n])).collect();
    let mut cur = rename(&init);
    let mut classes = cur.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut sigs: Vec<(u32, Vec<(u32, u32)>)> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut walk: Vec<(u32, u32)> = (0..n).map(|l| (cur[i * n + l], cur[l * n + j])).collect();
                walk.sort_unstable();
                sigs.push((cur[i * n + j], walk));
            }
        }
        let next = rename(&sigs);
        let k = next.iter().collect::<BTreeSet<_>>().len();
        cur = next;
        if k == classes {
            break;
        }
        classes = k;
    }
    Ok(CoherentConfiguration { s: PartitionStructure::from_matrix(n, cur) })
}

/// Colors are the orbits of the group on ordered pairs, named by (class size, least pair).
pub fn orbital_configuration(group: &PermGroup) -> CoherentConfiguration {
    let n = group.degree();
    let mut uf = UnionFind::new(n * n);
    for g in group.generators() {
        for i in 0..n {
            for j in 0..n {
                uf.union(i * n + j, g.apply(i) * n + g.apply(j));
            }
        }
    }
    let mut classes = uf.classes();
    classes.sort_by_key(|c| (c.len(), c[0]));
    let mut colors = vec![0u32; n * n];
    for (id, c) in classes.iter().enumerate() {
        for &p in c {
            colors[p] = id as u32;
        }
    }
    CoherentConfiguration { s: PartitionStructure::from_matrix(n, colors) }
}

/// Common in- and out-degree of the constituent digraph of an off-diagonal color.
pub fn constituent_biregularity(config: &CoherentConfiguration, color: u32) -> Result<usize> {
    if !config.is_homogeneous() {
        return precondition("configuration is not homogeneous");
    }
    let n = config.n();
    let mut out = vec![0usize; n];
    let mut inn = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if config.color(i, j) == color {
                out[i] += 1;
                inn[j] += 1;
            }
        }
    }
    let d = out[0];
    if out.iter().chain(&inn).any(|&v| v != d) {
        return precondition("constituent is not biregular");
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::structure_aut;

    fn d8() -> PermGroup {
        PermGroup::new(4, vec![Perm::cycle(4, &[0, 1, 2, 3]), Perm::transposition(4, 1, 3)]).unwrap()
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> PartitionStructure {
        let set: BTreeSet<(usize, usize)> = edges.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
        PartitionStructure::from_fn(n, 2, |t| u32::from(set.contains(&(t[0], t[1]))))
    }

    #[test]
    fn orbital_ranks() {
        assert_eq!(orbital_configuration(&PermGroup::symmetric(5)).rank(), 2);
        assert_eq!(orbital_configuration(&d8()).rank(), 3);
        assert_eq!(orbital_configuration(&PermGroup::trivial(4)).rank(), 16);
        assert!(orbital_configuration(&d8()).is_coherent());
    }

    #[test]
    fn d8_constituents() {
        let cfg = orbital_configuration(&d8());
        let degrees: BTreeSet<usize> = cfg
            .palette()
            .into_iter()
            .filter(|&c| !cfg.diagonal_colors().contains(&c))
            .map(|c| constituent_biregularity(&cfg, c).unwrap())
            .collect();
        assert_eq!(degrees, [1, 2].into_iter().collect());
        let clique = orbital_configuration(&PermGroup::symmetric(6));
        let off = clique.color(0, 1);
        assert_eq!(constituent_biregularity(&clique, off).unwrap(), 5);
        let inhom = wl2_refine(&graph(3, &[(0, 1)])).unwrap();
        assert!(constituent_biregularity(&inhom, 0).is_err());
    }

    #[test]
    fn refinement_of_coherent_inputs() {
        let clique = orbital_configuration(&PermGroup::symmetric(6));
        let r = wl2_refine(clique.structure()).unwrap();
        assert_eq!(r.rank(), 2);
        assert!(r.same_partition(&clique));
        let orb = orbital_configuration(&d8());
        assert!(wl2_refine(orb.structure()).unwrap().same_partition(&orb));
    }

    #[test]
    fn path_refines_by_distance() {
        // a path on 4 vertices: end and inner vertices split, pairs split by distance
        let p = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let r = wl2_refine(&p).unwrap();
        assert!(r.is_coherent() && r.satisfies_axioms());
        assert!(r.same_partition(&orbital_configuration(&structure_aut(&p))));
        assert_eq!(wl2_refine(r.structure()).unwrap(), r);
    }
}
