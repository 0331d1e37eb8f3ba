use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::config::{
    design_outcome_for_tuple, design_tuple_search, for_each_tuple, is_johnson, structure_aut, structure_iso,
    wl2_refine, ColoredPartition, DesignOutcome, JohnsonMatch, PartitionStructure,
};
use crate::error::Result;
use crate::perm::{sym_gens, Perm, PermGroup, TrackedHom};
use crate::string_iso::{iso_cosets_union, ColoredString, IsoCoset, Solver};

/// A canonical object on Γ attached to one of the strings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Partition(ColoredPartition),
    Relational(PartitionStructure),
}

impl Structure {
    pub fn n(&self) -> usize {
        match self {
            Structure::Partition(p) => p.n(),
            Structure::Relational(s) => s.n(),
        }
    }
}

/// Which alignment method produced the automorphisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    ColoredPartition,
    Johnson,
    Generic,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::ColoredPartition => "colored-partition",
            Branch::Johnson => "johnson",
            Branch::Generic => "generic",
        }
    }
}

/// Permutations of the points inside blocks, and of equal blocks of one color.
pub fn partition_aut(p: &ColoredPartition) -> PermGroup {
    let n = p.n();
    let mut gens = Vec::new();
    for b in p.blocks() {
        gens.extend(sym_gens(n, b));
    }
    for bs in p.color_classes().values() {
        let mut by_size: BTreeMap<usize, Vec<&Vec<usize>>> = BTreeMap::new();
        for b in bs {
            by_size.entry(b.len()).or_default().push(b);
        }
        for same in by_size.values().filter(|v| v.len() >= 2) {
            gens.push(block_swap(n, same[0], same[1]));
            if same.len() > 2 {
                let mut img: Vec<usize> = (0..n).collect();
                for (i, b) in same.iter().enumerate() {
                    let next = same[(i + 1) % same.len()];
                    for (&a, &c) in b.iter().zip(next.iter()) {
                        img[a] = c;
                    }
                }
                gens.push(Perm::from_images(img).expect("block cycle"));
            }
        }
    }
    PermGroup::new(n, gens).expect("degree matches")
}

fn block_swap(n: usize, a: &[usize], b: &[usize]) -> Perm {
    let mut img: Vec<usize> = (0..n).collect();
    for (&p, &q) in a.iter().zip(b) {
        img[p] = q;
        img[q] = p;
    }
    Perm::from_images(img).expect("block swap")
}

/// A color- and block-preserving bijection, if the profiles agree.
pub fn partition_iso(p: &ColoredPartition, q: &ColoredPartition) -> Option<Perm> {
    if p.n() != q.n() || p.block_profile() != q.block_profile() {
        return None;
    }
    let n = p.n();
    let mut img = vec![usize::MAX; n];
    let (cp, cq) = (p.color_classes(), q.color_classes());
    for (c, bs) in &cp {
        let mut src: Vec<&Vec<usize>> = bs.clone();
        let mut dst: Vec<&Vec<usize>> = cq.get(c)?.clone();
        src.sort_by_key(|b| (b.len(), b[0]));
        dst.sort_by_key(|b| (b.len(), b[0]));
        for (a, b) in src.iter().zip(&dst) {
            for (&u, &v) in a.iter().zip(b.iter()) {
                img[u] = v;
            }
        }
    }
    Perm::from_images(img).ok()
}

/// Unique colors for the points of `t`, split off from their blocks.
pub fn individualize_partition(p: &ColoredPartition, t: &[usize]) -> ColoredPartition {
    let mut color = p.colors().to_vec();
    let top = 1 << 24;
    let mut blocks: Vec<Vec<usize>> =
        p.blocks().iter().map(|b| b.iter().copied().filter(|q| !t.contains(q)).collect()).collect();
    for (i, &q) in t.iter().enumerate() {
        color[q] = top + i as u32;
        blocks.push(vec![q]);
    }
    ColoredPartition::new(color, blocks).expect("refinement of a valid partition")
}

/// Recolors every tuple by its old color and the positions of individualized entries.
pub fn individualize(s: &PartitionStructure, t: &[usize]) -> PartitionStructure {
    if t.is_empty() {
        return s.clone();
    }
    let base = (t.len() + 1) as u32;
    let scale = base.pow(s.arity() as u32);
    PartitionStructure::from_fn(s.n(), s.arity(), |tuple| {
        let code = tuple
            .iter()
            .fold(0, |acc, p| acc * base + t.iter().position(|q| q == p).map_or(0, |j| j as u32 + 1));
        s.color(tuple).checked_mul(scale).and_then(|c| c.checked_add(code)).expect("color overflow")
    })
}

fn alpha() -> Ratio<usize> {
    Ratio::new(3, 4)
}

/// The x-side half of an alignment: automorphisms plus what the y side must match.
struct Plan {
    aut: PermGroup,
    branch: Branch,
    anchor: Anchor,
}

enum Anchor {
    Partition(ColoredPartition),
    DesignPartition { tuple: Vec<usize>, partition: ColoredPartition },
    Johnson { tuple: Vec<usize>, class: Vec<usize>, matched: JohnsonMatch },
    Generic { tuple: Vec<usize>, structure: PartitionStructure },
}

fn refine(s: &PartitionStructure) -> Result<PartitionStructure> {
    Ok(if s.arity() == 2 { wl2_refine(s)?.structure().clone() } else { s.clone() })
}

fn johnson_of(structure: &PartitionStructure) -> Result<Option<JohnsonMatch>> {
    Ok(is_johnson(&wl2_refine(structure)?))
}

impl Plan {
    fn build(sx: &Structure) -> Result<Plan> {
        let s = match sx {
            Structure::Partition(p) => {
                return Ok(Plan { aut: partition_aut(p), branch: Branch::ColoredPartition, anchor: Anchor::Partition(p.clone()) })
            }
            Structure::Relational(s) => refine(s)?,
        };
        let n = s.n();
        let outcome = if 4 * s.arity() <= n { design_tuple_search(&s, alpha())? } else { DesignOutcome::NotFound };
        Ok(match outcome {
            DesignOutcome::Partition { tuple, partition } => {
                let partition = individualize_partition(&partition, &tuple);
                Plan {
                    aut: partition_aut(&partition),
                    branch: Branch::ColoredPartition,
                    anchor: Anchor::DesignPartition { tuple, partition },
                }
            }
            DesignOutcome::SubConfiguration { tuple, class, structure } => match johnson_of(&structure)? {
                Some(matched) => Plan {
                    aut: johnson_aut(n, &tuple, &class, &matched),
                    branch: Branch::Johnson,
                    anchor: Anchor::Johnson { tuple, class, matched },
                },
                // the split-or-Johnson continuation is replaced by a direct search
                None => {
                    let structure = individualize(&s, &tuple);
                    Plan { aut: structure_aut(&structure), branch: Branch::Generic, anchor: Anchor::Generic { tuple, structure } }
                }
            },
            DesignOutcome::NotFound => {
                Plan { aut: structure_aut(&s), branch: Branch::Generic, anchor: Anchor::Generic { tuple: vec![], structure: s } }
            }
        })
    }

    /// Bijections `τ` such that every isomorphism of the structures lies in `Aut·τ` for one of them.
    fn isos_to(&self, sy: &Structure) -> Result<Vec<Perm>> {
        let mut out = Vec::new();
        match (&self.anchor, sy) {
            (Anchor::Partition(px), Structure::Partition(py)) => out.extend(partition_iso(px, py)),
            (Anchor::Partition(_), _) | (_, Structure::Partition(_)) => {}
            (anchor, Structure::Relational(raw)) => {
                let s = refine(raw)?;
                let l = match anchor {
                    Anchor::DesignPartition { tuple, .. } | Anchor::Johnson { tuple, .. } | Anchor::Generic { tuple, .. } => {
                        tuple.len()
                    }
                    Anchor::Partition(_) => unreachable!(),
                };
                let mut err = None;
                for_each_tuple(s.n(), l, &mut |t2| {
                    match self.match_tuple(&s, t2) {
                        Ok(Some(tau)) => out.push(tau),
                        Ok(None) => {}
                        Err(e) => {
                            err = Some(e);
                            return false;
                        }
                    }
                    true
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(out)
    }

    fn match_tuple(&self, s: &PartitionStructure, t2: &[usize]) -> Result<Option<Perm>> {
        Ok(match &self.anchor {
            Anchor::Partition(_) => None,
            Anchor::DesignPartition { partition, .. } => match design_outcome_for_tuple(s, t2, alpha()) {
                Some(DesignOutcome::Partition { partition: py, .. }) => {
                    partition_iso(partition, &individualize_partition(&py, t2))
                }
                _ => None,
            },
            Anchor::Johnson { tuple, class, matched } => match design_outcome_for_tuple(s, t2, alpha()) {
                Some(DesignOutcome::SubConfiguration { class: cy, structure, .. }) if cy.len() == class.len() => {
                    match johnson_of(&structure)? {
                        Some(my) if (my.m, my.t, &my.color_of_index) == (matched.m, matched.t, &matched.color_of_index) => {
                            Some(johnson_bridge(s.n(), tuple, class, matched, t2, &cy, &my))
                        }
                        _ => None,
                    }
                }
                _ => None,
            },
            Anchor::Generic { structure, .. } => structure_iso(structure, &individualize(s, t2)),
        })
    }
}

/// `Sym(m)` acting on the class through `ι`, with everything off the class and the tuple free.
fn johnson_aut(n: usize, tuple: &[usize], class: &[usize], matched: &JohnsonMatch) -> PermGroup {
    let index: BTreeMap<&Vec<usize>, usize> = matched.iota.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let on_labels = [Perm::transposition(matched.m, 0, 1), Perm::cycle(matched.m, &(0..matched.m).collect::<Vec<_>>())];
    let mut gens = Vec::new();
    for h in &on_labels {
        let mut img: Vec<usize> = (0..n).collect();
        for (i, set) in matched.iota.iter().enumerate() {
            let mut moved: Vec<usize> = set.iter().map(|&p| h.apply(p)).collect();
            moved.sort_unstable();
            img[class[i]] = class[index[&moved]];
        }
        gens.push(Perm::from_images(img).expect("induced action"));
    }
    let rest: Vec<usize> = (0..n).filter(|p| !class.contains(p) && !tuple.contains(p)).collect();
    gens.extend(sym_gens(n, &rest));
    PermGroup::new(n, gens).expect("degree matches")
}

/// Sends the x-side class onto the y-side class through the two Johnson labelings.
fn johnson_bridge(
    n: usize,
    tuple: &[usize],
    class: &[usize],
    mx: &JohnsonMatch,
    t2: &[usize],
    class2: &[usize],
    my: &JohnsonMatch,
) -> Perm {
    let index: BTreeMap<&Vec<usize>, usize> = my.iota.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut img = vec![usize::MAX; n];
    for (i, set) in mx.iota.iter().enumerate() {
        img[class[i]] = class2[index[set]];
    }
    for (&a, &b) in tuple.iter().zip(t2) {
        img[a] = b;
    }
    let rest: Vec<usize> = (0..n).filter(|p| img[*p] == usize::MAX).collect();
    let used: Vec<bool> = {
        let mut u = vec![false; n];
        img.iter().filter(|&&v| v != usize::MAX).for_each(|&v| u[v] = true);
        u
    };
    let free: Vec<usize> = (0..n).filter(|&p| !used[p]).collect();
    for (&a, &b) in rest.iter().zip(&free) {
        img[a] = b;
    }
    Perm::from_images(img).expect("bijection")
}

/// Reduces `Iso_H(x, y)` to the preimage of `Aut(𝔛(x))` using the alignment of the structures.
///
/// Returns `None` when the structures carry no information beyond the image of `φ`.
pub fn effect_of_structures(
    solver: &Solver,
    phi: &TrackedHom,
    sx: &Structure,
    sys: &[Structure],
    x: &ColoredString,
    y: &ColoredString,
) -> Result<Option<(Branch, IsoCoset)>> {
    let plan = Plan::build(sx)?;
    let mut taus = Vec::new();
    for sy in sys {
        taus.extend(plan.isos_to(sy)?);
    }
    solver.hit(&format!("effect_{}", plan.branch.name()));
    solver.trace(|| {
        format!("effect branch={} aut={} candidates={}", plan.branch.name(), plan.aut.order(), taus.len())
    });
    Ok(align_reduce(solver, phi, &plan.aut, &taus, x, y)?.map(|c| (plan.branch, c)))
}

/// `⋃_τ Iso_{φ⁻¹(A)}(x, y^{σ⁻¹})σ` over lifts σ of the candidates, with `A` cut down to the image.
pub(crate) fn align_reduce(
    solver: &Solver,
    phi: &TrackedHom,
    a: &PermGroup,
    taus: &[Perm],
    x: &ColoredString,
    y: &ColoredString,
) -> Result<Option<IsoCoset>> {
    let image = phi.image();
    let (inside, _) = a.subgroup_with_cosets(|p| image.contains(p), 2)?;
    if inside.order() >= image.order() {
        return Ok(None);
    }
    let g1 = phi.preimage(&inside)?;
    let mut chosen: Vec<Perm> = Vec::new();
    for tau in taus {
        let rep = if image.contains(tau) {
            tau.clone()
        } else {
            match a.generators().iter().map(|g| g.then(tau)).find(|r| image.contains(r)) {
                Some(r) => r,
                None => continue,
            }
        };
        if chosen.iter().any(|c| inside.contains(&rep.then(&c.inverse()))) {
            continue;
        }
        chosen.push(rep);
    }
    let mut pieces = Vec::with_capacity(chosen.len());
    for rep in &chosen {
        let sigma = phi.lift(rep)?;
        pieces.push(solver.solve(&g1, x, &y.act(&sigma.inverse()))?.shift(&sigma));
    }
    Ok(Some(iso_cosets_union(pieces)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::johnson_scheme;

    #[test]
    fn partition_aut_and_iso() {
        let p = ColoredPartition::new(vec![0, 0, 0, 0, 1, 1], vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        // (2!·2!)·2 inside color 0, 2! for color 1
        assert_eq!(partition_aut(&p).order(), 16u32.into());
        let pi = Perm::parse(6, "(0 4 2)(1 5)").unwrap();
        let q = p.act(&pi);
        let tau = partition_iso(&p, &q).unwrap();
        assert_eq!(p.act(&tau), q);
        let r = ColoredPartition::new(vec![0, 0, 0, 0, 1, 1], vec![vec![0, 1, 2, 3], vec![4, 5]]).unwrap();
        assert!(partition_iso(&p, &r).is_none());
    }

    #[test]
    fn individualization_keeps_isomorphisms() {
        let j = johnson_scheme(5, 2).unwrap().config().structure().clone();
        let pi = Perm::parse(10, "(0 3 7)(1 9)").unwrap();
        let jy = j.act(&pi);
        let a = individualize(&j, &[2]);
        let b = individualize(&jy, &[pi.apply(2)]);
        let tau = structure_iso(&a, &b).unwrap();
        assert_eq!(tau.apply(2), pi.apply(2));
        assert!(structure_iso(&a, &individualize(&jy, &[0, 1])).is_none());
    }

    #[test]
    fn johnson_plan_on_scheme() {
        let j = johnson_scheme(5, 2).unwrap().config().structure().clone();
        let plan = Plan::build(&Structure::Relational(j.clone())).unwrap();
        assert_eq!(plan.branch, Branch::Johnson);
        assert_eq!(plan.aut.order(), 120u32.into());
        let pi = Perm::parse(10, "(0 3 7)(1 9)").unwrap();
        let taus = plan.isos_to(&Structure::Relational(j.act(&pi))).unwrap();
        assert!(!taus.is_empty());
        assert!(taus.iter().all(|t| plan.aut.contains(&t.then(&pi.inverse()))));
    }
}
