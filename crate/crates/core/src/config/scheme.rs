use std::collections::BTreeMap;

use super::{structure_iso, CoherentConfiguration, PartitionStructure};
use crate::error::{precondition, Result};
use crate::string_iso::binomial;

/// The Johnson scheme `J(m, t)` on the t-subsets of `{0..m}`, in lexicographic order.
#[derive(Clone, Debug)]
pub struct JohnsonScheme {
    pub m: usize,
    pub t: usize,
    pub subsets: Vec<Vec<usize>>,
}

impl JohnsonScheme {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Relation index `|T₁ \ T₂|`.
    pub fn relation(&self, a: usize, b: usize) -> usize {
        self.subsets[a].iter().filter(|p| !self.subsets[b].contains(p)).count()
    }

    pub fn config(&self) -> CoherentConfiguration {
        let n = self.len();
        let colors = (0..n * n).map(|i| self.relation(i / n, i % n) as u32).collect();
        CoherentConfiguration::from_structure(PartitionStructure::from_matrix(n, colors)).unwrap()
    }

    /// `|R_i|` for `i = 0..=t`, counted directly.
    pub fn relation_sizes(&self) -> Vec<usize> {
        let n = self.len();
        let mut out = vec![0; self.t + 1];
        for a in 0..n {
            for b in 0..n {
                out[self.relation(a, b)] += 1;
            }
        }
        out
    }
}

/// All k-subsets of `{0..m}` in lexicographic order.
pub fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < m - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn johnson_scheme(m: usize, t: usize) -> Result<JohnsonScheme> {
    if t < 2 || m < 2 * t + 1 {
        return precondition("Johnson scheme needs t >= 2 and m >= 2t + 1");
    }
    Ok(JohnsonScheme { m, t, subsets: k_subsets(m, t) })
}

/// A recognized Johnson scheme: parameters plus the identification of each point with a subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JohnsonMatch {
    pub m: usize,
    pub t: usize,
    /// `iota[p]` is the t-subset of `{0..m}` assigned to point `p`.
    pub iota: Vec<Vec<usize>>,
    /// Color of the configuration realizing relation index i.
    pub color_of_index: Vec<u32>,
}

/// Recognizes a configuration isomorphic to some `J(m, t)`, `t ≥ 2`.
///
/// Candidates are filtered by the relation-size fingerprint; each color-to-index
/// assignment that fits is then checked by an explicit isomorphism search.
pub fn is_johnson(config: &CoherentConfiguration) -> Option<JohnsonMatch> {
    let n = config.n();
    let sizes = config.relation_sizes();
    for t in 2.. {
        if binomial(2 * t + 1, t) > n as u128 {
            break;
        }
        for m in 2 * t + 1.. {
            let b = binomial(m, t);
            if b > n as u128 {
                break;
            }
            if b < n as u128 || sizes.len() != t + 1 {
                continue;
            }
            let expect: Vec<usize> =
                (0..=t).map(|i| (binomial(m, t) * binomial(t, i) * binomial(m - t, i)) as usize).collect();
            let mut by_size: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
            for (&c, &s) in &sizes {
                by_size.entry(s).or_default().push(c);
            }
            let scheme = johnson_scheme(m, t).ok()?;
            let mut assignment = vec![u32::MAX; t + 1];
            if let Some(found) = assign(&expect, &by_size, &mut assignment, 0, &|color_of_index: &[u32]| {
                let model = PartitionStructure::from_fn(n, 2, |p| color_of_index[scheme.relation(p[0], p[1])]);
                structure_iso(config.structure(), &model)
                    .map(|pi| (0..n).map(|p| scheme.subsets[pi.apply(p)].clone()).collect::<Vec<_>>())
            }) {
                return Some(JohnsonMatch { m, t, iota: found.1, color_of_index: found.0 });
            }
        }
    }
    None
}

// tries every bijection index -> color with matching relation sizes
fn assign(
    expect: &[usize],
    by_size: &BTreeMap<usize, Vec<u32>>,
    cur: &mut Vec<u32>,
    i: usize,
    check: &dyn Fn(&[u32]) -> Option<Vec<Vec<usize>>>,
) -> Option<(Vec<u32>, Vec<Vec<usize>>)> {
    if i == expect.len() {
        return check(cur).map(|iota| (cur.clone(), iota));
    }
    for &c in by_size.get(&expect[i])? {
        if cur[..i].contains(&c) {
            continue;
        }
        cur[i] = c;
        if let Some(r) = assign(expect, by_size, cur, i + 1, check) {
            return Some(r);
        }
    }
    cur[i] = u32::MAX;
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{structure_aut, wl2_refine};
    use crate::perm::Perm;
    use num_bigint::BigUint;

    #[test]
    fn j52_relation_sizes() {
        let j = johnson_scheme(5, 2).unwrap();
        assert_eq!(j.len(), 10);
        // direct count over the 100 ordered pairs
        let mut counts = [0usize; 3];
        for a in &j.subsets {
            for b in &j.subsets {
                counts[a.iter().filter(|p| !b.contains(p)).count()] += 1;
            }
        }
        assert_eq!(counts, [10, 60, 30]);
        assert_eq!(j.relation_sizes(), vec![10, 60, 30]);
        assert!(johnson_scheme(4, 2).is_err());
        assert!(johnson_scheme(7, 1).is_err());
        assert!(johnson_scheme(7, 3).is_ok());
    }

    #[test]
    fn j52_automorphisms() {
        let j = johnson_scheme(5, 2).unwrap();
        let aut = structure_aut(j.config().structure());
        assert_eq!(aut.order(), BigUint::from(120u32));
        assert!(j.config().is_coherent());
    }

    #[test]
    fn recognition() {
        let j = johnson_scheme(6, 2).unwrap();
        let pi = Perm::parse(15, "(0 7 3)(2 14)(5 9 11 12)").unwrap();
        let cfg = j.config().act(&pi);
        let found = is_johnson(&cfg).unwrap();
        assert_eq!((found.m, found.t), (6, 2));
        for a in 0..15 {
            for b in 0..15 {
                let rel = found.iota[a].iter().filter(|p| !found.iota[b].contains(p)).count();
                assert_eq!(found.color_of_index[rel], cfg.color(a, b));
            }
        }
        // ten points, but a cycle
        let cycle = PartitionStructure::from_fn(10, 2, |t| {
            let d = (t[0] + 10 - t[1]) % 10;
            u32::from(d == 1 || d == 9) + 2 * u32::from(t[0] == t[1])
        });
        assert!(is_johnson(&wl2_refine(&cycle).unwrap()).is_none());
    }
}
