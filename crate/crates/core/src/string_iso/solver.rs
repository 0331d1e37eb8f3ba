use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::{iso_cosets_union, ColoredString, IsoCoset};
use crate::action::{self, block_action, minimal_block_system};
use crate::error::{check_degree, precondition, Error, Result};
use crate::perm::{factorial, Perm, PermGroup, StabChain, TrackedHom};

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Groups of at most this order are searched element by element.
    pub brute_threshold: u64,
    /// Maximum number of solver nodes before aborting.
    pub budget: u64,
    /// Test-set size for local certificates below the theoretical bound.
    pub relax_k: Option<usize>,
    pub trace_cases: bool,
    pub dump_certificates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { brute_threshold: 10_000, budget: 10_000_000, relax_k: None, trace_cases: false, dump_certificates: false }
    }
}

/// The recursive string isomorphism solver.
///
/// Shared state is limited to the node counter and diagnostic logs, so a solver can be
/// used from several threads.
pub struct Solver {
    cfg: SolverConfig,
    nodes: AtomicU64,
    trace: Mutex<Vec<String>>,
    certs: Mutex<Vec<String>>,
    hits: Mutex<BTreeMap<String, u64>>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverConfig::default())
    }
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Self {
        Solver {
            cfg,
            nodes: AtomicU64::new(0),
            trace: Mutex::new(Vec::new()),
            certs: Mutex::new(Vec::new()),
            hits: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn tick(&self) -> Result<()> {
        let used = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if used > self.cfg.budget {
            Err(Error::Budget { limit: self.cfg.budget })
        } else {
            Ok(())
        }
    }

    /// Counts how often a named branch was taken.
    pub(crate) fn hit(&self, key: &str) {
        *self.hits.lock().unwrap().entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn hits(&self, key: &str) -> u64 {
        self.hits.lock().unwrap().get(key).copied().unwrap_or(0)
    }

    pub fn hit_counts(&self) -> BTreeMap<String, u64> {
        self.hits.lock().unwrap().clone()
    }

    pub(crate) fn trace(&self, line: impl FnOnce() -> String) {
        if self.cfg.trace_cases {
            self.trace.lock().unwrap().push(line());
        }
    }

    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.lock().unwrap().clone()
    }

    pub(crate) fn record_certificate(&self, line: impl FnOnce() -> String) {
        if self.cfg.dump_certificates {
            self.certs.lock().unwrap().push(line());
        }
    }

    pub fn certificate_lines(&self) -> Vec<String> {
        self.certs.lock().unwrap().clone()
    }

    /// `Iso_G(x, y)`.
    pub fn solve(&self, g: &PermGroup, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        check_degree(g.degree(), x.len())?;
        check_degree(g.degree(), y.len())?;
        self.solve_full(g, x, y)
    }

    /// `Iso_G^Δ(x, y)` for a G-invariant window Δ.
    pub fn solve_window(&self, g: &PermGroup, window: &[usize], x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        check_degree(g.degree(), x.len())?;
        check_degree(g.degree(), y.len())?;
        if window.is_empty() {
            return Ok(IsoCoset::whole(g.clone()));
        }
        let r = Restriction::new(g, window)?;
        r.solve(self, x, y)
    }

    pub(crate) fn solve_full(&self, g: &PermGroup, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        self.tick()?;
        let n = g.degree();
        if x.letter_counts() != y.letter_counts() {
            return Ok(IsoCoset::Empty);
        }
        if g.generators().iter().all(|s| x.maps_to(x, s)) {
            self.hit("aut_shortcut");
            return Ok(if x == y { IsoCoset::whole(g.clone()) } else { IsoCoset::Empty });
        }
        if g.order_capped(self.cfg.brute_threshold).is_some() {
            self.hit("brute");
            return Ok(brute_force(g, x, y));
        }
        let orbits = action::orbits(g);
        if orbits.len() > 1 {
            self.hit("orbit_chain");
            return self.chain_over(g, &orbits.classes, x, y);
        }
        let Some(system) = minimal_block_system(g)? else {
            return self.solve_primitive(g, x, y);
        };
        let psi = block_action(g, &system)?;
        let q = psi.image();
        let nb = system.len();
        let q_order = q.order();
        if within_quota(&q_order, nb) {
            self.hit("strong_luks");
            self.trace(|| format!("node n={n} luks blocks={nb} quotient={q_order}"));
            return self.luks_through(&psi, x, y);
        }
        match johnson_parameters(&q_order, nb) {
            Some((m, k)) => self.giant_pipeline(&psi, &system.class_of(n), false, m, k, x, y),
            None => {
                self.hit("fallback");
                self.trace(|| format!("node n={n} fallback blocks={nb} quotient={q_order} reason=unrecognized large quotient"));
                self.luks_through(&psi, x, y)
            }
        }
    }

    fn solve_primitive(&self, g: &PermGroup, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        let n = g.degree();
        let order = g.order();
        if within_quota(&order, n) {
            // small primitive group: every element is its own coset of the trivial kernel
            self.hit("luks_primitive");
            return Ok(brute_force(g, x, y));
        }
        match johnson_parameters(&order, n) {
            Some((m, k)) => {
                let psi = TrackedHom::identity(g.clone());
                let points: Vec<usize> = (0..n).collect();
                self.giant_pipeline(&psi, &points, true, m, k, x, y)
            }
            None => {
                self.hit("fallback");
                self.trace(|| format!("node n={n} fallback primitive order={order}"));
                Ok(brute_force(g, x, y))
            }
        }
    }

    /// Chain rule over invariant point sets processed in order.
    pub(crate) fn chain_over(&self, g: &PermGroup, parts: &[Vec<usize>], x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        let mut group = g.clone();
        let mut tau = Perm::identity(g.degree());
        for part in parts {
            let shifted = y.act(&tau.inverse());
            match self.solve_window(&group, part, x, &shifted)? {
                IsoCoset::Empty => return Ok(IsoCoset::Empty),
                IsoCoset::Coset { group: k, rep } => {
                    group = k;
                    tau = rep.then(&tau);
                }
            }
        }
        Ok(IsoCoset::new(group, tau))
    }

    /// Strong Luks reduction along `psi`: one kernel subproblem per element of the image.
    pub fn luks_through(&self, psi: &TrackedHom, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        let kernel = psi.kernel();
        let image = psi.image();
        let mut results = Vec::new();
        let mut err = None;
        image.chain().for_each_element(|q| match psi.lift(q) {
            Ok(sigma) => match self.solve_full(&kernel, x, &y.act(&sigma.inverse())) {
                Ok(c) => {
                    results.push(c.shift(&sigma));
                    true
                }
                Err(e) => {
                    err = Some(e);
                    false
                }
            },
            Err(e) => {
                err = Some(e);
                false
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        iso_cosets_union(results)
    }

    /// Weak Luks reduction: `H` given by a membership predicate of index at most `bound`.
    pub fn weak_luks(
        &self,
        g: &PermGroup,
        member: impl Fn(&Perm) -> bool,
        bound: usize,
        window: &[usize],
        x: &ColoredString,
        y: &ColoredString,
    ) -> Result<IsoCoset> {
        let (h, reps) = g.subgroup_with_cosets(member, bound)?;
        let r = Restriction::new(&h, window)?;
        let mut out = Vec::with_capacity(reps.len());
        for rep in reps {
            out.push(r.solve(self, x, &y.act(&rep.inverse()))?.shift(&rep));
        }
        iso_cosets_union(out)
    }

    /// Strong Luks reduction on a window with a G-invariant partition of it.
    pub fn strong_luks(
        &self,
        g: &PermGroup,
        window: &[usize],
        blocks: &[Vec<usize>],
        x: &ColoredString,
        y: &ColoredString,
    ) -> Result<IsoCoset> {
        let n = g.degree();
        let mut owner = vec![usize::MAX; n];
        for (i, b) in blocks.iter().enumerate() {
            for &p in b {
                owner[p] = i;
            }
        }
        let mut win = window.to_vec();
        win.sort_unstable();
        let mut covered: Vec<usize> = blocks.iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != win {
            return precondition("blocks must partition the window");
        }
        let mut images = Vec::new();
        for s in g.generators() {
            let mut img = vec![0; blocks.len()];
            for (i, b) in blocks.iter().enumerate() {
                let t = owner[s.apply(b[0])];
                if t == usize::MAX || b.iter().any(|&p| owner[s.apply(p)] != t) {
                    return Err(Error::NotInvariant);
                }
                img[i] = t;
            }
            images.push(Perm::from_images(img)?);
        }
        let psi = TrackedHom::new(g.clone(), blocks.len(), images)?;
        let kernel = psi.kernel();
        let mut out = Vec::new();
        for q in psi.image().elements() {
            let sigma = psi.lift(&q)?;
            // the kernel fixes every block, so its window problem splits block by block
            let res = self.chain_over(&kernel, blocks, x, &y.act(&sigma.inverse()))?;
            out.push(res.shift(&sigma));
        }
        iso_cosets_union(out)
    }
}

/// A group restricted to an invariant window, with the restriction map kept for lifting.
pub(crate) struct Restriction {
    group: PermGroup,
    window: Vec<usize>,
    hom: Option<TrackedHom>,
}

impl Restriction {
    pub(crate) fn new(g: &PermGroup, window: &[usize]) -> Result<Self> {
        let mut w = window.to_vec();
        w.sort_unstable();
        w.dedup();
        if w.iter().any(|&p| p >= g.degree()) {
            return precondition("window point out of range");
        }
        if !g.preserves_set(&w) {
            return precondition("window is not invariant under the group");
        }
        let hom = if w.len() == g.degree() || w.is_empty() {
            None
        } else {
            let images = g.generators().iter().map(|s| s.restrict(&w)).collect::<Result<Vec<_>>>()?;
            Some(TrackedHom::new(g.clone(), w.len(), images)?)
        };
        Ok(Restriction { group: g.clone(), window: w, hom })
    }

    pub(crate) fn solve(&self, solver: &Solver, x: &ColoredString, y: &ColoredString) -> Result<IsoCoset> {
        if self.window.is_empty() {
            return Ok(IsoCoset::whole(self.group.clone()));
        }
        match &self.hom {
            None => solver.solve_full(&self.group, x, y),
            Some(h) => {
                let res = solver.solve_full(&h.image(), &x.restrict(&self.window), &y.restrict(&self.window))?;
                lift_coset(h, res)
            }
        }
    }
}

/// Pulls a coset in the image back to the domain.
pub(crate) fn lift_coset(h: &TrackedHom, c: IsoCoset) -> Result<IsoCoset> {
    match c {
        IsoCoset::Empty => Ok(IsoCoset::Empty),
        IsoCoset::Coset { group, rep } => {
            let mut gens = h.kernel().generators().to_vec();
            for s in group.generators() {
                gens.push(h.lift(s)?);
            }
            Ok(IsoCoset::new(PermGroup::from_gens(h.domain_degree(), gens), h.lift(&rep)?))
        }
    }
}

/// Element-by-element search with pruning on base images.
pub fn brute_force(g: &PermGroup, x: &ColoredString, y: &ColoredString) -> IsoCoset {
    let chain = g.chain();
    let base = chain.base();
    let mut first: Option<Perm> = None;
    let mut first_inv: Option<Perm> = None;
    let mut aut = StabChain::trivial(g.degree());
    chain.search(
        &mut |j, partial| {
            let b = base[j];
            x.get(b) == y.get(partial.apply(b))
        },
        &mut |s| {
            if x.maps_to(y, s) {
                match &first_inv {
                    None => {
                        first_inv = Some(s.inverse());
                        first = Some(s.clone());
                    }
                    Some(inv) => {
                        aut.add_generator(&s.then(inv));
                    }
                }
            }
            true
        },
    );
    match first {
        None => IsoCoset::Empty,
        Some(rep) => IsoCoset::new(PermGroup::from_chain(aut), rep),
    }
}

/// `|Q| ≤ nb^(1 + log₂ nb)`, compared in log space.
pub fn within_quota(order: &BigUint, nb: usize) -> bool {
    if nb <= 1 {
        return true;
    }
    let l = (nb as f64).log2();
    log2_big(order) <= l + l * l + 1e-9
}

fn log2_big(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().unwrap().log2()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

/// `(m, k)` with `|Q| ∈ {m!, m!/2}` and `C(m, k) = nb`, preferring the smallest k.
pub fn johnson_parameters(order: &BigUint, nb: usize) -> Option<(usize, usize)> {
    for k in 1..=nb {
        for m in 2 * k..=nb {
            let b = binomial(m, k);
            if b > nb as u128 {
                break;
            }
            if b == nb as u128 {
                let f = factorial(m);
                if *order == f || order * 2u32 == f {
                    return Some((m, k));
                }
            }
        }
        if binomial(2 * k, k) > nb as u128 {
            break;
        }
    }
    None
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn p(n: usize, s: &str) -> Perm {
        Perm::parse(n, s).unwrap()
    }

    fn s(text: &str) -> ColoredString {
        ColoredString::from_text(text)
    }

    fn brute_set(g: &PermGroup, x: &ColoredString, y: &ColoredString) -> BTreeSet<Perm> {
        g.elements().into_iter().filter(|e| x.maps_to(y, e)).collect()
    }

    #[test]
    fn trivial_group_identity() {
        let x = s("abc");
        let r = Solver::default().solve(&PermGroup::trivial(3), &x, &x).unwrap();
        assert_eq!(r.elements(), vec![Perm::identity(3)]);
    }

    #[test]
    fn raspberry_automorphisms() {
        let x = s("raspberry");
        let r = Solver::default().solve(&PermGroup::symmetric(9), &x, &x).unwrap();
        // letter counts r:3 b:1 e:1 p:1 s:1 a:1 y:1
        let expect: u32 = x.letter_counts().values().map(|&c| (1..=c as u32).product::<u32>()).product();
        assert_eq!(r.size(), BigUint::from(expect));
        assert_eq!(expect, 6);
    }

    #[test]
    fn distinct_letters_give_singleton() {
        let x = s("abcdefgh");
        let sigma = p(8, "(0 3 5)(1 7)");
        let y = x.act(&sigma);
        let cfg = SolverConfig { brute_threshold: 10, ..Default::default() };
        let r = Solver::new(cfg).solve(&PermGroup::symmetric(8), &x, &y).unwrap();
        assert_eq!(r.elements(), vec![sigma]);
    }

    #[test]
    fn weak_luks_on_sym2() {
        let g = PermGroup::symmetric(2);
        let r = Solver::default().weak_luks(&g, |e| e.is_identity(), 2, &[0, 1], &s("ab"), &s("ba")).unwrap();
        assert_eq!(r.elements(), vec![p(2, "(0 1)")]);
    }

    #[test]
    fn strong_luks_on_d8() {
        let g = PermGroup::new(4, vec![p(4, "(0 1 2 3)"), p(4, "(1 3)")]).unwrap();
        let (x, y) = (s("abab"), s("baba"));
        let r = Solver::default().strong_luks(&g, &[0, 1, 2, 3], &[vec![0, 2], vec![1, 3]], &x, &y).unwrap();
        let got: BTreeSet<Perm> = r.elements().into_iter().collect();
        assert_eq!(got, brute_set(&g, &x, &y));
        assert!(got.contains(&p(4, "(0 1 2 3)")));
    }

    #[test]
    fn solver_matches_brute_force_without_brute_path() {
        let cfg = SolverConfig { brute_threshold: 1, ..Default::default() };
        let solver = Solver::new(cfg);
        let g = PermGroup::new(8, vec![p(8, "(0 1 2 3)(4 5 6 7)"), p(8, "(0 4)"), p(8, "(1 3)")]).unwrap();
        for (a, b) in [("aabbaabb", "abababab"), ("aaaabbbb", "bbbbaaaa"), ("abcaabca", "aabcbcaa")] {
            let (x, y) = (s(a), s(b));
            let got: BTreeSet<Perm> = solver.solve(&g, &x, &y).unwrap().elements().into_iter().collect();
            assert_eq!(got, brute_set(&g, &x, &y), "{a} {b}");
        }
    }

    #[test]
    fn window_and_empty_window() {
        let g = PermGroup::new(4, vec![p(4, "(0 1)"), p(4, "(2 3)")]).unwrap();
        let (x, y) = (s("abcd"), s("bacc"));
        let solver = Solver::default();
        assert_eq!(solver.solve_window(&g, &[], &x, &y).unwrap().size(), BigUint::from(4u32));
        let r = solver.solve_window(&g, &[0, 1], &x, &y).unwrap();
        let brute: BTreeSet<Perm> = g.elements().into_iter().filter(|e| x.maps_to_on(&y, e, &[0, 1])).collect();
        assert_eq!(r.elements().into_iter().collect::<BTreeSet<_>>(), brute);
        assert!(solver.solve_window(&g, &[0, 2], &x, &y).is_err());
    }

    #[test]
    fn quota_and_johnson_parameters() {
        assert!(within_quota(&BigUint::from(2u32), 2));
        assert!(!within_quota(&factorial(12), 12));
        assert_eq!(johnson_parameters(&(factorial(8) / 2u32), 28), Some((8, 2)));
        assert_eq!(johnson_parameters(&factorial(7), 7), Some((7, 1)));
        assert_eq!(johnson_parameters(&BigUint::from(100u32), 7), None);
        assert_eq!(binomial(15, 3), 455);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = SolverConfig { brute_threshold: 1, budget: 2, ..Default::default() };
        let g = PermGroup::new(6, vec![p(6, "(0 1)"), p(6, "(2 3)"), p(6, "(4 5)")]).unwrap();
        let err = Solver::new(cfg).solve(&g, &s("abcabc"), &s("abcabc")).unwrap_err();
        assert_eq!(err, Error::Budget { limit: 2 });
    }
}
