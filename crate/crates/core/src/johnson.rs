//! Identification of Alt(m) acting on k-subsets, partition pullback and lifting.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;

use crate::action::UnionFind;
use crate::config::{k_subsets, ColoredPartition};
use crate::error::{precondition, Error, Result};
use crate::perm::{factorial, Perm, PermGroup, TrackedHom};
use crate::string_iso::binomial;

/// `ι: Ω → (Γ choose k)` together with the epimorphism `φ: G → Sym(Γ)` it is equivariant for.
#[derive(Clone, Debug)]
pub struct JohnsonAction {
    pub m: usize,
    pub k: usize,
    /// Sorted k-subset of `0..m` for every domain point.
    pub iota: Vec<Vec<usize>>,
    pub phi: TrackedHom,
}

impl JohnsonAction {
    /// Checks `ι(ω^g) = ι(ω)^φ(g)` for every generator and point.
    pub fn is_equivariant(&self) -> bool {
        let gens = self.phi.domain().generators();
        gens.iter().zip(self.phi.generator_images()).all(|(g, h)| {
            (0..self.iota.len()).all(|w| {
                let mut img: Vec<usize> = self.iota[w].iter().map(|&p| h.apply(p)).collect();
                img.sort_unstable();
                img == self.iota[g.apply(w)]
            })
        })
    }

    /// The same correspondence for `G` acting on a larger domain through blocks.
    ///
    /// `psi` maps `G` onto the group `self` was built for, and `block_of[ω]` is the
    /// point of that smaller domain containing `ω`.
    pub fn lift_through(&self, psi: &TrackedHom, block_of: &[usize]) -> Result<JohnsonAction> {
        let phi = psi.compose(&self.phi)?;
        let iota = block_of.iter().map(|&b| self.iota[b].clone()).collect();
        Ok(JohnsonAction { m: self.m, k: self.k, iota, phi })
    }
}

impl fmt::Display for JohnsonAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.m, self.k)?;
        for s in &self.iota {
            let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        for (g, h) in self.phi.domain().generators().iter().zip(self.phi.generator_images()) {
            writeln!(f, "{g} -> {h}")?;
        }
        Ok(())
    }
}

/// `Sym(m)` or `Alt(m)` generators acting on the k-subsets of `0..m` in lexicographic order.
pub fn subset_action(m: usize, k: usize, gens: &[Perm]) -> Result<PermGroup> {
    let subsets = k_subsets(m, k);
    let index: BTreeMap<&Vec<usize>, usize> = subsets.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut out = Vec::new();
    for g in gens {
        if g.degree() != m {
            return Err(Error::DegreeMismatch { expected: m, found: g.degree() });
        }
        let img = subsets
            .iter()
            .map(|s| {
                let mut t: Vec<usize> = s.iter().map(|&p| g.apply(p)).collect();
                t.sort_unstable();
                index[&t]
            })
            .collect();
        out.push(Perm::from_images(img)?);
    }
    PermGroup::new(subsets.len(), out)
}

/// Orbits of the group on ordered pairs, as sorted size list together with the class of each pair.
pub fn orbital_classes(group: &PermGroup) -> Vec<Vec<usize>> {
    let n = group.degree();
    let mut uf = UnionFind::new(n * n);
    for g in group.generators() {
        for i in 0..n {
            for j in 0..n {
                uf.union(i * n + j, g.apply(i) * n + g.apply(j));
            }
        }
    }
    uf.classes()
}

/// Reconstructs Γ, ι and φ for a group isomorphic to `Alt(m)` or `Sym(m)` acting on k-subsets.
///
/// Γ is built as the sets `C(x, y)` for `(x, y)` in the smallest non-diagonal orbital,
/// obtained from one pair and then closed under the group. Γ is labelled by sorting
/// these sets lexicographically.
pub fn identify_johnson_action(g: &PermGroup, m: usize, k: usize) -> Result<JohnsonAction> {
    let n = g.degree();
    if binomial(m, k) != n as u128 {
        return precondition("degree must equal binomial(m, k)");
    }
    let order = g.order();
    let f = factorial(m);
    if order != f && order.clone() * 2u32 != f {
        return Err(Error::NotJohnson("group order is neither m! nor m!/2".into()));
    }
    if k == 1 {
        let iota = (0..n).map(|w| vec![w]).collect();
        return Ok(JohnsonAction { m, k, iota, phi: TrackedHom::identity(g.clone()) });
    }
    if k == 0 || m <= k * (k + 1) + 1 {
        return precondition("identification needs 1 <= k and m > k(k+1)+1");
    }
    let mut classes = orbital_classes(g);
    if classes.len() != k + 1 {
        return Err(Error::NotJohnson(format!("{} orbitals, expected {}", classes.len(), k + 1)));
    }
    classes.sort_by_key(|c| c.len());
    let is_diag = |c: &Vec<usize>| c[0] / n == c[0] % n;
    let off: Vec<&Vec<usize>> = classes.iter().filter(|c| !is_diag(c)).collect();
    if off.windows(2).any(|w| w[0].len() == w[1].len()) {
        return Err(Error::NotJohnson("orbital sizes are not strictly ordered".into()));
    }
    let (xi, delta) = (off[0], off[off.len() - 1]);
    let mut disjoint = vec![false; n * n];
    for &p in delta {
        disjoint[p] = true;
    }
    let (x, y) = (xi[0] / n, xi[0] % n);
    let b: Vec<usize> = (0..n).filter(|&z| !disjoint[x * n + z] && disjoint[y * n + z]).collect();
    let mut covered = vec![false; n];
    for &z in &b {
        for r in 0..n {
            if disjoint[z * n + r] {
                covered[r] = true;
            }
        }
    }
    let c0: Vec<usize> = (0..n).filter(|&r| !covered[r]).collect();
    // closure of C(x, y) under the group
    let mut gamma = vec![c0.clone()];
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(c0, 0)]);
    let mut i = 0;
    while i < gamma.len() {
        for s in g.generators() {
            let mut img: Vec<usize> = gamma[i].iter().map(|&p| s.apply(p)).collect();
            img.sort_unstable();
            if !index.contains_key(&img) {
                index.insert(img.clone(), gamma.len());
                gamma.push(img);
            }
        }
        i += 1;
    }
    if gamma.len() != m {
        return Err(Error::NotJohnson(format!("found {} points of the small domain, expected {m}", gamma.len())));
    }
    gamma.sort();
    let index: BTreeMap<&Vec<usize>, usize> = gamma.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut iota = vec![Vec::new(); n];
    for (gi, c) in gamma.iter().enumerate() {
        for &w in c {
            iota[w].push(gi);
        }
    }
    let mut seen: Vec<&Vec<usize>> = iota.iter().collect();
    seen.sort();
    seen.dedup();
    if iota.iter().any(|s| s.len() != k) || seen.len() != n {
        return Err(Error::NotJohnson("membership sets are not distinct k-subsets".into()));
    }
    let images = g
        .generators()
        .iter()
        .map(|s| {
            let img = gamma
                .iter()
                .map(|c| {
                    let mut t: Vec<usize> = c.iter().map(|&p| s.apply(p)).collect();
                    t.sort_unstable();
                    index[&t]
                })
                .collect();
            Perm::from_images(img)
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = TrackedHom::new(g.clone(), m, images)?;
    let action = JohnsonAction { m, k, iota, phi };
    if !action.is_equivariant() {
        return Err(Error::NotJohnson("equivariance fails".into()));
    }
    Ok(action)
}

/// Color vectors `(|ι(ω) ∩ Δ_i|)_i` for a partition `Δ_1..Δ_t` of Γ.
pub fn pullback_colors(action: &JohnsonAction, parts: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let mut owner = vec![usize::MAX; action.m];
    for (i, part) in parts.iter().enumerate() {
        for &p in part {
            if p >= action.m || owner[p] != usize::MAX {
                return precondition("parts are not disjoint subsets of the small domain");
            }
            owner[p] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return precondition("parts do not cover the small domain");
    }
    Ok(action
        .iota
        .iter()
        .map(|s| {
            let mut v = vec![0; parts.len()];
            for &p in s {
                v[owner[p]] += 1;
            }
            v
        })
        .collect())
}

/// The pulled-back coloring of Ω, one block per color; colors ordered by their vectors.
pub fn pullback_partition(action: &JohnsonAction, parts: &[Vec<usize>]) -> Result<ColoredPartition> {
    let vecs = pullback_colors(action, parts)?;
    let mut sorted = vecs.clone();
    sorted.sort();
    sorted.dedup();
    Ok(ColoredPartition::from_coloring(vecs.iter().map(|v| sorted.binary_search(v).unwrap() as u32).collect()))
}

/// Some `g` with `φ(g) = τ`.
pub fn lift_permutation(phi: &TrackedHom, tau: &Perm) -> Result<Perm> {
    phi.lift(tau)
}

/// `C(m₁,t₁)·C(m₂,t₂) ≤ (2/3)·C(m₁+m₂, t₁+t₂)`, evaluated exactly.
pub fn binomial_inequality(m1: usize, t1: usize, m2: usize, t2: usize) -> bool {
    let lhs = Ratio::from_integer(binomial(m1, t1) * binomial(m2, t2));
    lhs <= Ratio::new(2u128, 3) * binomial(m1 + m2, t1 + t2)
}
