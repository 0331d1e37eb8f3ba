use std::collections::BTreeMap;

use num_rational::Ratio;

use super::{ColoredPartition, PartitionStructure};
use crate::error::{precondition, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignOutcome {
    /// No color of the unary projection reaches `α·n`; its classes are the blocks.
    Partition { tuple: Vec<usize>, partition: ColoredPartition },
    /// The dominant unary class carries a binary projection that is not a clique.
    /// `structure` is indexed by positions within `class`.
    SubConfiguration { tuple: Vec<usize>, class: Vec<usize>, structure: PartitionStructure },
    NotFound,
}

impl DesignOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            DesignOutcome::Partition { .. } => "partition",
            DesignOutcome::SubConfiguration { .. } => "subconfiguration",
            DesignOutcome::NotFound => "not-found",
        }
    }

    pub fn tuple(&self) -> Option<&[usize]> {
        match self {
            DesignOutcome::Partition { tuple, .. } | DesignOutcome::SubConfiguration { tuple, .. } => Some(tuple),
            DesignOutcome::NotFound => None,
        }
    }
}

fn check_alpha(alpha: Ratio<usize>) -> Result<()> {
    if alpha < Ratio::new(3, 4) || alpha >= Ratio::from_integer(1) {
        return precondition("threshold must satisfy 3/4 <= alpha < 1");
    }
    Ok(())
}

/// The outcome for one individualized tuple, if it qualifies.
pub fn design_outcome_for_tuple(config: &PartitionStructure, tuple: &[usize], alpha: Ratio<usize>) -> Option<DesignOutcome> {
    let n = config.n();
    let k = config.arity();
    let l = tuple.len();
    let mut t = tuple.to_vec();
    t.resize(k, 0);
    let unary: Vec<u32> = (0..n)
        .map(|g| {
            t[l..].iter_mut().for_each(|p| *p = g);
            config.color(&t)
        })
        .collect();
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &c in &unary {
        *counts.entry(c).or_insert(0) += 1;
    }
    let dominant = counts.iter().find(|(_, &cnt)| Ratio::from_integer(cnt) >= alpha * n).map(|(&c, _)| c);
    match dominant {
        None => Some(DesignOutcome::Partition { tuple: tuple.to_vec(), partition: ColoredPartition::from_coloring(unary) }),
        Some(_) if l + 2 > k => None,
        Some(c) => {
            let class: Vec<usize> = (0..n).filter(|&g| unary[g] == c).collect();
            let m = class.len();
            let structure = PartitionStructure::from_fn(m, 2, |pair| {
                t[l] = class[pair[0]];
                t[l + 1..].iter_mut().for_each(|p| *p = class[pair[1]]);
                config.color(&t)
            });
            let mut off = (0..m * m).filter(|&i| i / m != i % m).map(|i| structure.colors()[i]);
            let first = off.next();
            if off.all(|c| Some(c) == first) {
                None
            } else {
                Some(DesignOutcome::SubConfiguration { tuple: tuple.to_vec(), class, structure })
            }
        }
    }
}

/// Scans tuples of distinct points of length `l < k` in lexicographic order and
/// returns the first qualifying outcome.
pub fn design_tuple_search(config: &PartitionStructure, alpha: Ratio<usize>) -> Result<DesignOutcome> {
    check_alpha(alpha)?;
    let k = config.arity();
    if k < 2 || 4 * k > config.n() {
        return precondition("arity must satisfy 2 <= k <= n/4");
    }
    for l in 0..k {
        let mut found = None;
        for_each_tuple(config.n(), l, &mut |tuple| {
            found = design_outcome_for_tuple(config, tuple, alpha);
            found.is_none()
        });
        if let Some(f) = found {
            return Ok(f);
        }
    }
    Ok(DesignOutcome::NotFound)
}

/// Visits tuples of `l` distinct points of `0..n` in lexicographic order until `f` returns false.
pub fn for_each_tuple(n: usize, l: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn rec(n: usize, l: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if cur.len() == l {
            return f(cur);
        }
        for p in 0..n {
            if used[p] {
                continue;
            }
            used[p] = true;
            cur.push(p);
            let go_on = rec(n, l, cur, used, f);
            cur.pop();
            used[p] = false;
            if !go_on {
                return false;
            }
        }
        true
    }
    rec(n, l, &mut Vec::new(), &mut vec![false; n], f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::johnson_scheme;

    #[test]
    fn unary_split_gives_partition() {
        // diagonal colors 0..4 repeat, so no class reaches 3/4 of 8 points
        let s = PartitionStructure::from_fn(8, 2, |t| if t[0] == t[1] { (t[0] % 4) as u32 } else { 9 });
        match design_tuple_search(&s, Ratio::new(3, 4)).unwrap() {
            DesignOutcome::Partition { tuple, partition } => {
                assert!(tuple.is_empty());
                assert_eq!(partition.blocks().len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn clique_has_no_tuple() {
        let s = PartitionStructure::from_fn(8, 2, |t| u32::from(t[0] == t[1]));
        assert_eq!(design_tuple_search(&s, Ratio::new(3, 4)).unwrap(), DesignOutcome::NotFound);
    }

    #[test]
    fn johnson_input() {
        let j = johnson_scheme(5, 2).unwrap().config();
        let got = design_tuple_search(j.structure(), Ratio::new(3, 4)).unwrap();
        assert_eq!(got.kind(), "subconfiguration");
        assert_eq!(got.tuple(), Some(&[][..]));
        // the binary projection on the whole ground set is the scheme itself
        if let DesignOutcome::SubConfiguration { class, structure, .. } = got {
            assert_eq!(class, (0..10).collect::<Vec<_>>());
            assert_eq!(&structure, j.structure());
        }
    }

    #[test]
    fn preconditions() {
        let s = PartitionStructure::from_fn(8, 2, |t| u32::from(t[0] == t[1]));
        assert!(design_tuple_search(&s, Ratio::new(1, 2)).is_err());
        assert!(design_tuple_search(&s, Ratio::from_integer(1)).is_err());
        let small = PartitionStructure::from_fn(6, 2, |_| 0);
        assert!(design_tuple_search(&small, Ratio::new(3, 4)).is_err());
    }
}
