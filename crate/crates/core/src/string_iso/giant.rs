use std::collections::BTreeMap;

use super::{ColoredString, IsoCoset};
use crate::error::{check_degree, precondition, Result};
use crate::perm::{sym_gens, Giant, Perm, PermGroup};

/// `Iso_G(x, y)` for `G` the symmetric or alternating group of the whole domain.
///
/// Letters must occur with equal multiplicities; the automorphisms permute each letter
/// class freely, subject to parity when `G` is alternating.
pub fn giant_coset_iso(g: &PermGroup, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
    let n = g.degree();
    check_degree(n, x.len())?;
    check_degree(n, y.len())?;
    let kind = g.giant_test();
    if kind == Giant::Neither {
        return precondition("group is not a giant");
    }
    if x.letter_counts() != y.letter_counts() {
        return Ok(IsoCoset::Empty);
    }
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        classes.entry(x.get(i)).or_default().push(i);
    }
    let mut targets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        targets.entry(y.get(i)).or_default().push(i);
    }
    let mut img = vec![0; n];
    for (c, pts) in &classes {
        for (&p, &q) in pts.iter().zip(&targets[c]) {
            img[p] = q;
        }
    }
    let mut tau = Perm::from_images(img)?;
    let gens: Vec<Perm> = classes.values().flat_map(|pts| sym_gens(n, pts)).collect();
    let aut = PermGroup::from_gens(n, gens);
    if kind == Giant::Symmetric {
        return Ok(IsoCoset::new(aut, tau));
    }
    let swap = classes.values().find(|pts| pts.len() >= 2).map(|pts| Perm::transposition(n, pts[0], pts[1]));
    if !tau.is_even() {
        match &swap {
            Some(t) => tau = t.then(&tau),
            None => return Ok(IsoCoset::Empty),
        }
    }
    let even = if swap.is_some() { aut.subgroup_with_cosets(Perm::is_even, 2)?.0 } else { aut };
    Ok(IsoCoset::new(even, tau))
}
