use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;

use super::effect::{effect_of_structures, Branch, Structure};
use crate::action::{orbit, orbits, UnionFind};
use crate::certs::{compare_grown, full_strength, grow, order_tuples, set_mapper, Certificate, Grown, LocalCertificate};
use crate::config::{
    digraph_symmetry_defect_check, for_each_tuple, k_subsets, orbital_configuration, twin_classes_of_structure,
    validate_colored_partition, ColoredPartition, PartitionStructure,
};
use crate::error::{precondition, Error, Result};
use crate::perm::{alt_gens, factorial, Perm, PermGroup, TrackedHom};
use crate::string_iso::{ColoredString, IsoCoset, Solver};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Case {
    One,
    TwoA,
    TwoB,
    Three,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::One => "1",
            Case::TwoA => "2a",
            Case::TwoB => "2b",
            Case::Three => "3",
        })
    }
}

/// The canonical statistics both strings must share.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseStats {
    pub case: Case,
    pub support: usize,
    pub orbit_lengths: Vec<usize>,
    pub full: usize,
}

impl fmt::Display for CaseStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lens: Vec<String> = self.orbit_lengths.iter().map(|l| l.to_string()).collect();
        write!(f, "case={} support={} orbits={} full={}", self.case, self.support, lens.join(","), self.full)
    }
}

#[derive(Clone, Debug)]
pub enum CaseOutcome {
    /// The strings disagree on a canonical statistic.
    Refuted,
    ColoredPartitions(ColoredPartition, ColoredPartition),
    /// The reduction already produced the final coset.
    Reduced(IsoCoset),
    /// One binary structure for x and every candidate for y.
    BinaryStructures { x: PartitionStructure, y: Vec<PartitionStructure> },
    KaryStructures { x: PartitionStructure, y: PartitionStructure },
}

impl CaseOutcome {
    pub fn kind(&self) -> &'static str {
        match self {
            CaseOutcome::Refuted => "refuted",
            CaseOutcome::ColoredPartitions(..) => "colored-partitions",
            CaseOutcome::Reduced(_) => "reduced",
            CaseOutcome::BinaryStructures { .. } => "binary-structures",
            CaseOutcome::KaryStructures { .. } => "kary-structures",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Aggregation {
    pub stats: [CaseStats; 2],
    pub outcome: CaseOutcome,
}

/// Local certificates of both strings for every k-subset of Γ, with cached comparisons.
// (side, sorted T, side, sorted T')
type SetPair = (usize, Vec<usize>, usize, Vec<usize>);

pub struct CertificateTable<'a> {
    solver: &'a Solver,
    phi: &'a TrackedHom,
    k: usize,
    strings: [ColoredString; 2],
    grown: [BTreeMap<Vec<usize>, Grown>; 2],
    set_cmp: RefCell<HashMap<SetPair, IsoCoset>>,
}

impl<'a> CertificateTable<'a> {
    /// `phi` must map `H` onto `Alt(Γ)`.
    pub fn new(solver: &'a Solver, h: &PermGroup, phi: &'a TrackedHom, k: usize, x: &ColoredString, y: &ColoredString) -> Result<Self> {
        let m = phi.codomain_degree();
        if k < 2 || k >= m {
            return precondition("test sets must satisfy 2 <= k < |Γ|");
        }
        if phi.image().order() * 2u32 != factorial(m) {
            return precondition("homomorphism must map onto Alt(Γ)");
        }
        let strings = [x.clone(), y.clone()];
        let mut grown = [BTreeMap::new(), BTreeMap::new()];
        for (side, s) in strings.iter().enumerate() {
            for t in k_subsets(m, k) {
                let g = grow(solver, h, phi, &t, s)?;
                grown[side].insert(t, g);
            }
        }
        Ok(CertificateTable { solver, phi, k, strings, grown, set_cmp: RefCell::new(HashMap::new()) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn certificate(&self, side: usize, t: &[usize]) -> &LocalCertificate {
        let mut key = t.to_vec();
        key.sort_unstable();
        &self.grown[side][&key].1
    }

    pub fn certificates(&self, side: usize) -> impl Iterator<Item = &LocalCertificate> {
        self.grown[side].values().map(|g| &g.1)
    }

    /// `F`, generated by all certificates of fullness of one string.
    pub fn full_group(&self, side: usize) -> PermGroup {
        let gens: Vec<Perm> = self
            .certificates(side)
            .filter_map(|c| match &c.cert {
                Certificate::Full(k) => Some(k.generators().to_vec()),
                Certificate::NonFull(_) => None,
            })
            .flatten()
            .collect();
        PermGroup::from_gens(self.phi.domain_degree(), gens)
    }

    pub fn fullness_count(&self, side: usize) -> usize {
        self.certificates(side).filter(|c| c.is_full()).count()
    }

    fn set_compare(&self, u: usize, t: &[usize], v: usize, t2: &[usize]) -> Result<IsoCoset> {
        let key = (u, t.to_vec(), v, t2.to_vec());
        if let Some(c) = self.set_cmp.borrow().get(&key) {
            return Ok(c.clone());
        }
        let (gu, gv) = (&self.grown[u][t], &self.grown[v][t2]);
        let r = compare_grown(self.solver, self.phi, t, t2, &self.strings[u], &self.strings[v], gu, gv)?;
        self.set_cmp.borrow_mut().insert(key, r.iso.clone());
        Ok(r.iso)
    }

    /// `Iso_{G_{(T,T')}}(u^{W(T)}, v^{W(T')})` for ordered tuples.
    pub fn tuple_iso(&self, u: usize, t: &[usize], v: usize, t2: &[usize]) -> Result<IsoCoset> {
        let mut s1 = t.to_vec();
        s1.sort_unstable();
        let mut s2 = t2.to_vec();
        s2.sort_unstable();
        let q = self.set_compare(u, &s1, v, &s2)?;
        order_tuples(self.phi, q, t, t2)
    }

    /// The relation `(u, T) ~ (v, T')`.
    pub fn related(&self, u: usize, t: &[usize], v: usize, t2: &[usize]) -> Result<bool> {
        Ok(!self.tuple_iso(u, t, v, t2)?.is_empty())
    }

    // cheap canonical invariant of the relation class
    fn invariant(&self, side: usize, t: &[usize]) -> (bool, usize, usize) {
        let c = self.certificate(side, t);
        (c.is_full(), c.window.len(), c.iterations)
    }
}

struct SideData {
    f_image: PermGroup,
    support: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    big: Option<Vec<usize>>,
    stats: CaseStats,
}

fn side_data(table: &CertificateTable, side: usize) -> Result<SideData> {
    let phi = table.phi;
    let m = phi.codomain_degree();
    let f = table.full_group(side);
    let f_image = phi.restrict_domain(&f)?.image();
    let support: Vec<usize> = (0..m).filter(|&p| f_image.generators().iter().any(|g| !g.fixes(p))).collect();
    let orbits = orbits(&f_image).classes;
    let big = orbits.iter().find(|o| 2 * o.len() > m).cloned();
    let case = if 2 * support.len() >= m {
        match &big {
            None => Case::One,
            Some(phi_set) => {
                let r = f_image.restrict(phi_set)?;
                if phi_set.len() <= 2 || r.is_giant() {
                    Case::TwoA
                } else {
                    Case::TwoB
                }
            }
        }
    } else {
        Case::Three
    };
    let mut orbit_lengths: Vec<usize> = orbits.iter().map(|o| o.len()).collect();
    orbit_lengths.sort_unstable();
    let stats = CaseStats { case, support: support.len(), orbit_lengths, full: table.fullness_count(side) };
    Ok(SideData { f_image, support, orbits, big, stats })
}

/// Runs the local certificates for all test sets of size `k` and dispatches on the case.
pub fn aggregate(
    solver: &Solver,
    h: &PermGroup,
    phi: &TrackedHom,
    x: &ColoredString,
    y: &ColoredString,
    k: usize,
) -> Result<Aggregation> {
    let m = phi.codomain_degree();
    let relaxed = solver.config().relax_k.is_some();
    if !relaxed && (!full_strength(k, h.degree()) || 10 * k >= m) {
        return precondition("test-set size outside the admissible range");
    }
    let table = CertificateTable::new(solver, h, phi, k, x, y)?;
    let sides = [side_data(&table, 0)?, side_data(&table, 1)?];
    let stats = [sides[0].stats.clone(), sides[1].stats.clone()];
    solver.hit(&format!("case_{}", stats[0].case));
    solver.trace(|| format!("aggregate m={m} k={k} x: {} y: {}", stats[0], stats[1]));
    if stats[0] != stats[1] {
        solver.hit("refuted");
        return Ok(Aggregation { stats, outcome: CaseOutcome::Refuted });
    }
    let outcome = match stats[0].case {
        Case::One => CaseOutcome::ColoredPartitions(case1_partition(m, &sides[0].orbits), case1_partition(m, &sides[1].orbits)),
        Case::TwoA => {
            let (px, py) = (sides[0].big.clone().unwrap(), sides[1].big.clone().unwrap());
            CaseOutcome::Reduced(case2a_reduce(solver, phi, &px, &py, x, y)?)
        }
        Case::TwoB => {
            let (px, py) = (sides[0].big.as_ref().unwrap(), sides[1].big.as_ref().unwrap());
            case2b_structures(solver, m, &sides[0].f_image, px, &sides[1].f_image, py)?
        }
        Case::Three => case3_structures(&table, [&sides[0].support, &sides[1].support])?,
    };
    Ok(Aggregation { stats, outcome })
}

/// Colors Γ by `φ(F)`-orbit length; a dominant color class is split into its orbits.
pub fn case1_partition(m: usize, orbits: &[Vec<usize>]) -> ColoredPartition {
    let mut color = vec![0u32; m];
    for o in orbits {
        for &p in o {
            color[p] = o.len() as u32;
        }
    }
    let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for p in 0..m {
        classes.entry(color[p]).or_default().push(p);
    }
    let mut blocks = Vec::new();
    for (c, pts) in classes {
        if 2 * pts.len() > m {
            blocks.extend(orbits.iter().filter(|o| o.len() as u32 == c).cloned());
        } else {
            blocks.push(pts);
        }
    }
    ColoredPartition::new(color, blocks).expect("orbits partition Γ")
}

/// Aligns the dominant orbits, then `Iso = Aut_H(x)·Iso_{K ∪ Kσ₃}(x, y)` with `K` fixing Φ pointwise.
pub fn case2a_reduce(
    solver: &Solver,
    phi: &TrackedHom,
    phi_x: &[usize],
    phi_y: &[usize],
    x: &ColoredString,
    y: &ColoredString,
) -> Result<IsoCoset> {
    let m = phi.codomain_degree();
    let align = phi.lift(&set_mapper(m, phi_x, phi_y))?;
    let y = y.act(&align.inverse());
    let rest: Vec<usize> = (0..m).filter(|p| !phi_x.contains(p)).collect();
    let k = phi.preimage(&PermGroup::new(m, alt_gens(m, &rest))?)?;
    let mut lifts: Vec<Perm> = alt_gens(m, phi_x).iter().map(|g| phi.lift(g)).collect::<Result<_>>()?;
    let odd = if rest.len() >= 2 && phi_x.len() >= 2 {
        let s3 = Perm::transposition(m, phi_x[0], phi_x[1]).then(&Perm::transposition(m, rest[0], rest[1]));
        Some(phi.lift(&s3)?)
    } else {
        None
    };
    lifts.extend(odd.clone());
    let mut gens = match solver.solve(&k, x, x)? {
        IsoCoset::Coset { group, .. } => group.generators().to_vec(),
        IsoCoset::Empty => unreachable!("identity is an automorphism"),
    };
    for s in &lifts {
        if let Some(r) = solver.solve(&k, x, &x.act(&s.inverse()))?.shift(s).rep() {
            gens.push(r.clone());
        }
    }
    let aut = PermGroup::from_gens(phi.domain_degree(), gens);
    let mut reps = vec![Perm::identity(phi.domain_degree())];
    reps.extend(odd);
    for r in reps {
        if let Some(iso) = solver.solve(&k, x, &y.act(&r.inverse()))?.shift(&r).rep() {
            return Ok(IsoCoset::new(aut, iso.then(&align)));
        }
    }
    Ok(IsoCoset::Empty)
}

/// Largest d such that the group is d-transitive on `set`, with the points fixed along the way.
fn transitivity_degree(group: &PermGroup, set: &[usize]) -> Result<(usize, Vec<usize>)> {
    let mut stab = group.clone();
    let mut fixed = Vec::new();
    let mut d = 0;
    loop {
        let rest: Vec<usize> = set.iter().copied().filter(|p| !fixed.contains(p)).collect();
        let Some(&first) = rest.first() else { break };
        let mut o = orbit(&stab, first);
        o.sort_unstable();
        if o != rest {
            break;
        }
        d += 1;
        fixed.push(first);
        stab = stab.pointwise_stabilizer(&[first])?;
    }
    Ok((d, fixed))
}

fn orbital_structure(m: usize, phi_set: &[usize], t: &[usize], config: &crate::config::CoherentConfiguration, color: u32) -> PartitionStructure {
    let rest: Vec<usize> = phi_set.iter().copied().filter(|p| !t.contains(p)).collect();
    let pos: HashMap<usize, usize> = rest.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let label = |p: usize| -> u32 {
        match t.iter().position(|&q| q == p) {
            Some(i) => 1 + i as u32,
            None if pos.contains_key(&p) => 0,
            None => 7,
        }
    };
    PartitionStructure::from_fn(m, 2, |pr| {
        let (a, b) = (pr[0], pr[1]);
        let e = if a == b {
            0
        } else {
            match (pos.get(&a), pos.get(&b)) {
                (Some(&i), Some(&j)) if config.color(i, j) == color => 1,
                _ => 2,
            }
        };
        (label(a) * 8 + label(b)) * 3 + e
    })
}

/// Individualizes `d − 1` points, then one off-diagonal orbital of `φ(F)` becomes the structure.
pub fn case2b_structures(
    solver: &Solver,
    m: usize,
    fx: &PermGroup,
    phi_x: &[usize],
    fy: &PermGroup,
    phi_y: &[usize],
) -> Result<CaseOutcome> {
    let (d, fixed) = transitivity_degree(fx, phi_x)?;
    if d > 5 {
        solver.hit("transitivity_above_five");
        solver.trace(|| format!("diagnostic: transitivity degree {d} exceeds 5"));
    }
    let t = &fixed[..d - 1];
    let stab = fx.pointwise_stabilizer(t)?;
    let rest: Vec<usize> = phi_x.iter().copied().filter(|p| !t.contains(p)).collect();
    let config = orbital_configuration(&stab.restrict(&rest)?);
    let sizes = config.relation_sizes();
    let diag = config.diagonal_colors();
    let Some((&color, &size)) = sizes.iter().filter(|(c, _)| !diag.contains(c)).min_by_key(|(&c, &s)| (s, c)) else {
        return precondition("orbital configuration has no off-diagonal color");
    };
    let adj: Vec<Vec<bool>> =
        (0..rest.len()).map(|i| (0..rest.len()).map(|j| i != j && config.color(i, j) == color).collect()).collect();
    if !digraph_symmetry_defect_check(&adj)? {
        solver.hit("defect_below_half");
        solver.trace(|| "diagnostic: constituent defect below 1/2".to_string());
    }
    let sx = orbital_structure(m, phi_x, t, &config, color);
    let mut ys = Vec::new();
    let mut err = None;
    for_each_tuple(phi_y.len(), d - 1, &mut |idx| {
        let t2: Vec<usize> = idx.iter().map(|&i| phi_y[i]).collect();
        let mut run = || -> Result<()> {
            let stab = fy.pointwise_stabilizer(&t2)?;
            let rest: Vec<usize> = phi_y.iter().copied().filter(|p| !t2.contains(p)).collect();
            let mut o = orbit(&stab, rest[0]);
            o.sort_unstable();
            if o != rest {
                return Ok(());
            }
            let cfg = orbital_configuration(&stab.restrict(&rest)?);
            let diag = cfg.diagonal_colors();
            for (&c, &s) in &cfg.relation_sizes() {
                if s == size && !diag.contains(&c) {
                    ys.push(orbital_structure(m, phi_y, &t2, &cfg, c));
                }
            }
            Ok(())
        };
        match run() {
            Ok(()) => true,
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    solver.trace(|| format!("case 2b d={d} constituent size={size} branches={}", ys.len()));
    Ok(CaseOutcome::BinaryStructures { x: sx, y: ys })
}

/// Colors `(Γ \ S)^k` by the classes of the certificate relation, via union-find.
pub fn case3_structures(table: &CertificateTable, supports: [&Vec<usize>; 2]) -> Result<CaseOutcome> {
    let m = table.phi.codomain_degree();
    let k = table.k();
    let mut elems: Vec<(usize, Vec<usize>)> = Vec::new();
    for (side, support) in supports.iter().enumerate() {
        let rest: Vec<usize> = (0..m).filter(|p| !support.contains(p)).collect();
        for_each_tuple(rest.len(), k, &mut |idx| {
            elems.push((side, idx.iter().map(|&i| rest[i]).collect()));
            true
        });
    }
    let mut uf = UnionFind::new(elems.len());
    let mut reps: Vec<usize> = Vec::new();
    for e in 0..elems.len() {
        let (u, t) = &elems[e];
        let key = table.invariant(*u, t);
        let mut joined = false;
        for &r in &reps {
            let (v, t2) = &elems[r];
            if table.invariant(*v, t2) == key && table.related(*v, t2, *u, t)? {
                uf.union(r, e);
                joined = true;
                break;
            }
        }
        if !joined {
            reps.push(e);
        }
    }
    // classes are named in order of their lexicographically least member
    let class_of_rep: HashMap<usize, u32> = reps.iter().enumerate().map(|(i, &r)| (uf.find(r), i as u32)).collect();
    let mut class: HashMap<(usize, Vec<usize>), u32> = HashMap::new();
    for (e, el) in elems.iter().enumerate() {
        class.insert(el.clone(), class_of_rep[&uf.find(e)]);
    }
    let offset = 1 + (1u32 << k);
    let build = |side: usize| {
        let support = supports[side];
        PartitionStructure::from_fn(m, k, |t| {
            let mut sorted = t.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() < t.len() {
                return 0;
            }
            let mask = t.iter().enumerate().fold(0u32, |acc, (i, p)| acc | (u32::from(support.contains(p)) << i));
            if mask != 0 {
                1 + mask
            } else {
                offset + class[&(side, t.to_vec())]
            }
        })
    };
    let (sx, sy) = (build(0), build(1));
    for (side, s) in [&sx, &sy].into_iter().enumerate() {
        let rest: Vec<usize> = (0..m).filter(|p| !supports[side].contains(p)).collect();
        let sub = PartitionStructure::from_fn(rest.len(), k, |idx| {
            let t: Vec<usize> = idx.iter().map(|&i| rest[i]).collect();
            s.color(&t)
        });
        if twin_classes_of_structure(&sub).classes.iter().any(|c| c.len() >= k) {
            return Err(Error::Assertion("case-3 structure has a twin class of size >= k".into()));
        }
    }
    table.solver.trace(|| format!("case 3 tuples={} classes={}", elems.len(), reps.len()));
    Ok(CaseOutcome::KaryStructures { x: sx, y: sy })
}

/// Turns an aggregation outcome into the isomorphism coset, or `None` when no progress is possible.
pub fn resolve(
    solver: &Solver,
    phi: &TrackedHom,
    outcome: CaseOutcome,
    x: &ColoredString,
    y: &ColoredString,
) -> Result<Option<(Option<Branch>, IsoCoset)>> {
    let (sx, sys) = match outcome {
        CaseOutcome::Refuted => return Ok(Some((None, IsoCoset::Empty))),
        CaseOutcome::Reduced(c) => return Ok(Some((None, c))),
        CaseOutcome::ColoredPartitions(px, py) => {
            if !validate_colored_partition(&px, Ratio::new(1, 2)) {
                solver.hit("case1_partition_invalid");
            }
            (Structure::Partition(px), vec![Structure::Partition(py)])
        }
        CaseOutcome::BinaryStructures { x: sx, y: ys } => {
            (Structure::Relational(sx), ys.into_iter().map(Structure::Relational).collect())
        }
        CaseOutcome::KaryStructures { x: sx, y: sy } => (Structure::Relational(sx), vec![Structure::Relational(sy)]),
    };
    Ok(effect_of_structures(solver, phi, &sx, &sys, x, y)?.map(|(b, c)| (Some(b), c)))
}

/// What the certificate route produced for one giant node.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub stats: [CaseStats; 2],
    pub outcome_kind: &'static str,
    pub branch: Option<Branch>,
    pub iso: IsoCoset,
}

/// `Iso_H(x, y)` through local certificates, aggregation and structure alignment.
///
/// `None` means the structures found do not shrink the image of `φ`.
pub fn reduce_with_certificates(
    solver: &Solver,
    h: &PermGroup,
    phi: &TrackedHom,
    x: &ColoredString,
    y: &ColoredString,
    k: usize,
) -> Result<Option<Reduction>> {
    let agg = aggregate(solver, h, phi, x, y, k)?;
    let outcome_kind = agg.outcome.kind();
    Ok(resolve(solver, phi, agg.outcome, x, y)?.map(|(branch, iso)| Reduction { stats: agg.stats, outcome_kind, branch, iso }))
}
