//! Constructed groups and strings that push the solver through the certificate machinery.

use crate::error::Result;
use crate::perm::{alt_gens, Perm, PermGroup, TrackedHom};
use crate::string_iso::ColoredString;

/// `S₂ wr Alt(m)` on `m × {0,1}`, point `2i + j`, with its action on the m blocks.
pub fn wreath_pairs(m: usize) -> Result<(PermGroup, TrackedHom)> {
    let n = 2 * m;
    let lift = |p: &Perm| {
        let imgs: Vec<usize> = (0..n).map(|q| 2 * p.apply(q / 2) + q % 2).collect();
        Perm::from_images(imgs)
    };
    let all: Vec<usize> = (0..m).collect();
    let mut gens = vec![Perm::transposition(n, 0, 1)];
    for g in alt_gens(m, &all) {
        gens.push(lift(&g)?);
    }
    let g = PermGroup::new(n, gens)?;
    let phi = TrackedHom::from_fn(g.clone(), m, |p| {
        Perm::from_images((0..m).map(|i| p.apply(2 * i) / 2).collect()).expect("block action")
    })?;
    Ok((g, phi))
}

/// A string on `m × {0,1}` whose block `i` carries the letter pair `pairs[i]`.
pub fn block_string(pairs: &[(u32, u32)]) -> ColoredString {
    ColoredString::new(pairs.iter().flat_map(|&(a, b)| [a, b]).collect())
}

/// Ordered pairs `(a, b)` with `a ≠ b`, in lexicographic order.
pub fn ordered_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|a| (0..m).filter(move |&b| b != a).map(move |b| (a, b))).collect()
}

/// `Alt(m)` acting diagonally on ordered pairs, with the natural action on the m points.
pub fn alt_on_ordered_pairs(m: usize) -> Result<(PermGroup, TrackedHom)> {
    let pairs = ordered_pairs(m);
    let index = |a: usize, b: usize| pairs.iter().position(|&p| p == (a, b)).expect("pair");
    let all: Vec<usize> = (0..m).collect();
    let base = alt_gens(m, &all);
    let mut gens = Vec::with_capacity(base.len());
    for g in &base {
        let imgs: Vec<usize> = pairs.iter().map(|&(a, b)| index(g.apply(a), g.apply(b))).collect();
        gens.push(Perm::from_images(imgs)?);
    }
    let g = PermGroup::new(pairs.len(), gens)?;
    let phi = TrackedHom::new(g.clone(), m, base)?;
    Ok((g, phi))
}

/// Labels the 10 points of `Alt(10)` by the 2-subsets of a 5-set and colors ordered pairs
/// by whether the subsets meet. Its symmetries inside `Alt(10)` induce `Alt(5)` on the labels.
pub fn johnson_pairs_string() -> ColoredString {
    let subsets: Vec<(usize, usize)> = (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let meets = |s: (usize, usize), t: (usize, usize)| s.0 == t.0 || s.0 == t.1 || s.1 == t.0 || s.1 == t.1;
    ColoredString::new(ordered_pairs(10).iter().map(|&(a, b)| u32::from(meets(subsets[a], subsets[b]))).collect())
}
