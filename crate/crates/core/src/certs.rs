//! Local certificates of fullness and non-fullness, and their comparison.

use std::fmt;

use crate::action::orbits;
use crate::error::{precondition, Error, Result};
use crate::perm::{sym_gens, Perm, PermGroup, TrackedHom};
use crate::string_iso::{iso_cosets_union, ColoredString, IsoCoset, Solver};

/// Replaces letters outside the window by the symbol one past the alphabet.
pub fn truncate(x: &ColoredString, window: &[usize]) -> ColoredString {
    x.truncate(window)
}

#[derive(Clone, Debug)]
pub enum Certificate {
    /// A group of automorphisms of the whole string whose image on T contains `Alt(T)`.
    Full(PermGroup),
    /// The image on T (points indexed by position in T) of the window automorphisms.
    NonFull(PermGroup),
}

#[derive(Clone, Debug)]
pub struct LocalCertificate {
    pub t: Vec<usize>,
    pub window: Vec<usize>,
    pub cert: Certificate,
    /// Number of window enlargements performed.
    pub iterations: usize,
}

impl LocalCertificate {
    pub fn is_full(&self) -> bool {
        matches!(self.cert, Certificate::Full(_))
    }
}

impl fmt::Display for LocalCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        let (tag, group) = match &self.cert {
            Certificate::Full(k) => ("FULL", k),
            Certificate::NonFull(m) => ("NON_FULL", m),
        };
        let gens: Vec<String> = group.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "{tag} T={} W={} gens={}", list(&self.t), list(&self.window), gens.join(" "))
    }
}

/// One stage of the window growth: the window and `A(W)` with its kernel data.
#[derive(Clone, Debug)]
pub(crate) struct Stage {
    pub window: Vec<usize>,
    pub group: PermGroup,
    /// Kernel of `group → Sym(T)` and its coset representatives, once computed.
    pub kernel: Option<(PermGroup, Vec<Perm>)>,
}

#[derive(Clone, Debug)]
pub struct CertCompareResult {
    pub window_t: Vec<usize>,
    pub window_t2: Vec<usize>,
    pub iso: IsoCoset,
}

/// Points `ω` for which `φ(H_ω)` does not contain the alternating group of the codomain.
///
/// Affectedness is constant on `H`-orbits, so one stabilizer per orbit is tested.
pub fn affected_elements(h: &PermGroup, phi: &TrackedHom) -> Result<Vec<usize>> {
    let hom = phi.restrict_domain(h)?;
    let d = phi.codomain_degree();
    let mut out = Vec::new();
    for orbit in orbits(h).classes {
        let stab = h.pointwise_stabilizer(&orbit[..1])?;
        let img = hom.restrict_domain(&stab)?.image();
        if d > 2 && !img.is_giant() {
            out.extend(orbit);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `Alt(Γ)_T`, the even permutations of Γ fixing T setwise.
pub fn alt_set_stabilizer(gamma: usize, t: &[usize]) -> Result<PermGroup> {
    let rest: Vec<usize> = (0..gamma).filter(|p| !t.contains(p)).collect();
    let mut gens = sym_gens(gamma, t);
    gens.extend(sym_gens(gamma, &rest));
    let sym = PermGroup::new(gamma, gens)?;
    Ok(sym.subgroup_with_cosets(Perm::is_even, 2)?.0)
}

/// `G_T = φ⁻¹(Alt(Γ)_T)`.
pub fn test_set_stabilizer(phi: &TrackedHom, t: &[usize]) -> Result<PermGroup> {
    phi.preimage(&alt_set_stabilizer(phi.codomain_degree(), t)?)
}

/// Whether `k` meets `max{8, 2 + log₂ n} < k`.
pub fn full_strength(k: usize, n: usize) -> bool {
    let bound = (2.0 + (n.max(1) as f64).log2()).max(8.0);
    (k as f64) > bound
}

fn contains_alt(img: &PermGroup) -> bool {
    img.degree() <= 2 || img.is_giant()
}

fn restrict_to(phi: &TrackedHom, a: &PermGroup, t: &[usize]) -> Result<TrackedHom> {
    phi.restrict_domain(a)?.restrict_codomain(t)
}

fn check_test_set(phi: &TrackedHom, t: &[usize]) -> Result<()> {
    let mut s = t.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != t.len() || s.iter().any(|&p| p >= phi.codomain_degree()) {
        return precondition("test set must consist of distinct points of the small domain");
    }
    Ok(())
}

/// Right coset representatives of `ker φ_T` in `A`, as lifts of the image elements.
fn kernel_reps(phi_t: &TrackedHom) -> Result<(PermGroup, Vec<Perm>)> {
    let mut reps = Vec::new();
    let mut err = None;
    phi_t.image().chain().for_each_element(|q| match phi_t.lift(q) {
        Ok(r) => {
            reps.push(r);
            true
        }
        Err(e) => {
            err = Some(e);
            false
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok((phi_t.kernel(), reps)),
    }
}

/// Runs the window growth for `(x, T)` and returns every stage plus the final certificate.
pub(crate) fn grow(
    solver: &Solver,
    g: &PermGroup,
    phi: &TrackedHom,
    t: &[usize],
    x: &ColoredString,
) -> Result<(Vec<Stage>, LocalCertificate)> {
    check_test_set(phi, t)?;
    let k = t.len();
    let mut a = test_set_stabilizer(phi, t)?;
    let mut window: Vec<usize> = Vec::new();
    let mut stages = vec![Stage { window: window.clone(), group: a.clone(), kernel: None }];
    let mut iterations = 0;
    loop {
        solver.tick()?;
        let phi_t = restrict_to(phi, &a, t)?;
        if !contains_alt(&phi_t.image()) {
            break;
        }
        let aff = affected_elements(&a, &phi_t)?;
        if aff.iter().all(|p| window.binary_search(p).is_ok()) {
            break;
        }
        let mut plus = window.clone();
        plus.extend(aff);
        plus.sort_unstable();
        plus.dedup();
        let (n_grp, reps) = kernel_reps(&phi_t)?;
        stages.last_mut().unwrap().kernel = Some((n_grp.clone(), reps.clone()));
        let parts: Vec<Vec<usize>> =
            orbits(&n_grp).classes.into_iter().filter(|o| plus.binary_search(&o[0]).is_ok()).collect();
        if k > 5 && parts.iter().any(|o| o.len() * k > plus.len()) {
            solver.hit("orbit_bound_violation");
            solver.trace(|| format!("diagnostic: kernel orbit longer than |W+|/k for T={t:?}"));
        }
        let mut pieces = Vec::with_capacity(reps.len());
        for sigma in &reps {
            let c = solver.chain_over(&n_grp, &parts, x, &x.act(&sigma.inverse()))?;
            pieces.push(c.shift(sigma));
        }
        a = match iso_cosets_union(pieces)? {
            IsoCoset::Coset { group, .. } => group,
            IsoCoset::Empty => return Err(Error::Assertion("window automorphisms lost the identity".into())),
        };
        window = plus;
        iterations += 1;
        stages.push(Stage { window: window.clone(), group: a.clone(), kernel: None });
    }
    let phi_t = restrict_to(phi, &a, t)?;
    let cert = if contains_alt(&phi_t.image()) {
        let outside: Vec<usize> = (0..g.degree()).filter(|p| window.binary_search(p).is_err()).collect();
        let kt = a.pointwise_stabilizer(&outside)?;
        if contains_alt(&restrict_to(phi, &kt, t)?.image()) {
            Certificate::Full(kt)
        } else if full_strength(k, g.degree()) {
            return Err(Error::Assertion(format!("fullness certificate for T={t:?} fails the giant test")));
        } else {
            // below the theoretical k: decide with the exact automorphism group of x in G_T
            solver.hit("relaxed_fullness_fallback");
            let gt = test_set_stabilizer(phi, t)?;
            let exact = match solver.solve(&gt, x, x)? {
                IsoCoset::Coset { group, .. } => group,
                IsoCoset::Empty => unreachable!("identity is an automorphism"),
            };
            window = (0..g.degree()).collect();
            let img = restrict_to(phi, &exact, t)?.image();
            if contains_alt(&img) {
                Certificate::Full(exact)
            } else {
                Certificate::NonFull(img)
            }
        }
    } else {
        Certificate::NonFull(phi_t.image())
    };
    let out = LocalCertificate { t: t.to_vec(), window, cert, iterations };
    solver.record_certificate(|| out.to_string());
    Ok((stages, out))
}

/// A certificate of fullness or non-fullness for the test set `t`.
pub fn local_certificate(
    solver: &Solver,
    g: &PermGroup,
    phi: &TrackedHom,
    t: &[usize],
    x: &ColoredString,
) -> Result<LocalCertificate> {
    Ok(grow(solver, g, phi, t, x)?.1)
}

/// Some even permutation of Γ mapping the list `t` onto the list `t2` pointwise when
/// possible, otherwise onto the set.
pub(crate) fn set_mapper(gamma: usize, t: &[usize], t2: &[usize]) -> Perm {
    let mut img = vec![usize::MAX; gamma];
    for (&a, &b) in t.iter().zip(t2) {
        img[a] = b;
    }
    let rest_src: Vec<usize> = (0..gamma).filter(|p| !t.contains(p)).collect();
    let rest_dst: Vec<usize> = (0..gamma).filter(|p| !t2.contains(p)).collect();
    for (&a, &b) in rest_src.iter().zip(&rest_dst) {
        img[a] = b;
    }
    let rho = Perm::from_images(img).expect("bijection");
    if rho.is_even() {
        rho
    } else if rest_dst.len() >= 2 {
        rho.then(&Perm::transposition(gamma, rest_dst[0], rest_dst[1]))
    } else if t2.len() >= 2 {
        rho.then(&Perm::transposition(gamma, t2[0], t2[1]))
    } else {
        rho
    }
}

/// `Iso_{G_{T,T'}}(x^{W(T)}, y^{W(T')})` together with both windows.
///
/// Both window sequences are computed first; the coset is then narrowed stage by stage
/// using the kernel cosets of the x-side groups.
pub fn compare_certificates(
    solver: &Solver,
    g: &PermGroup,
    phi: &TrackedHom,
    t: &[usize],
    t2: &[usize],
    x: &ColoredString,
    y: &ColoredString,
) -> Result<CertCompareResult> {
    if t.len() != t2.len() {
        return precondition("test sets differ in size");
    }
    check_test_set(phi, t2)?;
    let gx = grow(solver, g, phi, t, x)?;
    let gy = grow(solver, g, phi, t2, y)?;
    compare_grown(solver, phi, t, t2, x, y, &gx, &gy)
}

/// Window growth for one string and test set: every stage and the final certificate.
pub(crate) type Grown = (Vec<Stage>, LocalCertificate);

/// [`compare_certificates`] on window sequences computed beforehand.
#[allow(clippy::too_many_arguments)]
pub(crate) fn compare_grown(
    solver: &Solver,
    phi: &TrackedHom,
    t: &[usize],
    t2: &[usize],
    x: &ColoredString,
    y: &ColoredString,
    gx: &Grown,
    gy: &Grown,
) -> Result<CertCompareResult> {
    let (sx, cx) = gx;
    let (sy, cy) = gy;
    let window_t = cx.window.clone();
    let window_t2 = cy.window.clone();
    let empty = |w1: &Vec<usize>, w2: &Vec<usize>| CertCompareResult {
        window_t: w1.clone(),
        window_t2: w2.clone(),
        iso: IsoCoset::Empty,
    };
    // an isomorphism carries one window sequence onto the other, stage by stage
    if sx.len() != sy.len() || cx.is_full() != cy.is_full() || window_t.len() != window_t2.len() {
        return Ok(empty(&window_t, &window_t2));
    }
    let glaucous = x.alphabet_size().max(y.alphabet_size());
    let rho = set_mapper(phi.codomain_degree(), t, t2);
    let Ok(pi0) = phi.lift(&rho) else {
        return Ok(empty(&window_t, &window_t2));
    };
    let mut q = IsoCoset::new(sx[0].group.clone(), pi0);
    for i in 1..sx.len() {
        let pi0 = q.rep().cloned().expect("nonempty");
        // Q is a coset of the previous x-side stage group, so its kernel cosets are reused
        let (n_grp, reps) = match &sx[i - 1].kernel {
            Some(k) => k.clone(),
            None => kernel_reps(&restrict_to(phi, &sx[i - 1].group, t)?)?,
        };
        let xw = x.truncate_with(&sx[i].window, glaucous);
        let yw = y.truncate_with(&sy[i].window, glaucous);
        let mut pieces = Vec::with_capacity(reps.len());
        for sigma in &reps {
            let pi = sigma.then(&pi0);
            let c = solver.solve(&n_grp, &xw, &yw.act(&pi.inverse()))?;
            pieces.push(c.shift(&pi));
        }
        q = iso_cosets_union(pieces)?;
        if q.is_empty() {
            return Ok(empty(&window_t, &window_t2));
        }
    }
    // the final windows may extend past the last stage after a relaxed fallback
    let xw = x.truncate_with(&window_t, glaucous);
    let yw = y.truncate_with(&window_t2, glaucous);
    if let IsoCoset::Coset { group, rep } = &q {
        if window_t.len() != sx[sx.len() - 1].window.len() || window_t2.len() != sy[sy.len() - 1].window.len() {
            q = solver.solve(group, &xw, &yw.act(&rep.inverse()))?.shift(rep);
        }
    }
    Ok(CertCompareResult { window_t, window_t2, iso: q })
}

/// The ordered version: members must send `t[i]` to `t2[i]` for every i.
pub fn compare_certificates_tuples(
    solver: &Solver,
    g: &PermGroup,
    phi: &TrackedHom,
    t: &[usize],
    t2: &[usize],
    x: &ColoredString,
    y: &ColoredString,
) -> Result<CertCompareResult> {
    let mut set_t = t.to_vec();
    set_t.sort_unstable();
    let mut set_t2 = t2.to_vec();
    set_t2.sort_unstable();
    let res = compare_certificates(solver, g, phi, &set_t, &set_t2, x, y)?;
    let iso = order_tuples(phi, res.iso, t, t2)?;
    Ok(CertCompareResult { iso, ..res })
}

/// Narrows a coset inside `G_{T,T'}` to the members sending `t[i] ↦ t2[i]`, one point at a time.
pub(crate) fn order_tuples(phi: &TrackedHom, q: IsoCoset, t: &[usize], t2: &[usize]) -> Result<IsoCoset> {
    let IsoCoset::Coset { mut group, mut rep } = q else {
        return Ok(IsoCoset::Empty);
    };
    let k = t.len();
    for (&a, &b) in t.iter().zip(t2) {
        let target = phi.eval(&rep)?.inverse().apply(b);
        let images: Vec<Perm> = group.generators().iter().map(|h| phi.eval(h)).collect::<Result<_>>()?;
        let hom = TrackedHom::new(group.clone(), phi.codomain_degree(), images)?;
        let (sub, reps) = group.subgroup_with_cosets(|h| hom.eval(h).map(|p| p.apply(a) == a).unwrap_or(false), k.max(1))?;
        let mut found = None;
        for c in reps {
            if hom.eval(&c)?.apply(a) == target {
                found = Some(c);
                break;
            }
        }
        match found {
            None => return Ok(IsoCoset::Empty),
            Some(c) => {
                rep = c.then(&rep);
                group = sub;
            }
        }
    }
    Ok(IsoCoset::new(group, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::alt_gens;
    use crate::string_iso::{brute_force, SolverConfig};

    fn alt(n: usize) -> PermGroup {
        PermGroup::new(n, alt_gens(n, &(0..n).collect::<Vec<_>>())).unwrap()
    }

    fn solver() -> Solver {
        Solver::new(SolverConfig { relax_k: Some(3), ..SolverConfig::default() })
    }

    #[test]
    fn affected_examples() {
        let g = alt(9);
        let id = TrackedHom::identity(g.clone());
        assert_eq!(affected_elements(&g, &id).unwrap(), (0..9).collect::<Vec<_>>());
        let small = PermGroup::symmetric(2);
        assert!(affected_elements(&small, &TrackedHom::identity(small.clone())).unwrap().is_empty());
        // a kernel-only map onto three points
        let h = PermGroup::symmetric(4);
        let triv = TrackedHom::new(h.clone(), 3, vec![Perm::identity(3); h.generators().len()]).unwrap();
        assert_eq!(affected_elements(&h, &triv).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn truncation_examples() {
        let x = ColoredString::from_text("banana");
        assert_eq!(truncate(&x, &[0, 1, 2, 3, 4, 5]), x);
        assert_eq!(truncate(&x, &[]), ColoredString::constant(6, 3));
    }

    #[test]
    fn constant_string_is_full() {
        let g = alt(7);
        let phi = TrackedHom::identity(g.clone());
        let x = ColoredString::constant(7, 0);
        let c = local_certificate(&solver(), &g, &phi, &[0, 1, 2], &x).unwrap();
        match &c.cert {
            Certificate::Full(k) => {
                assert!(k.generators().iter().all(|s| x.maps_to(&x, s)));
                assert!(restrict_to(&phi, k, &[0, 1, 2]).unwrap().image().is_giant());
            }
            other => panic!("{other:?}"),
        }
        assert!(c.iterations <= 7);
    }

    #[test]
    fn distinct_letters_are_non_full() {
        let g = alt(7);
        let phi = TrackedHom::identity(g.clone());
        let x = ColoredString::from_text("abcdefg");
        let c = local_certificate(&solver(), &g, &phi, &[0, 1, 2], &x).unwrap();
        match &c.cert {
            Certificate::NonFull(m) => assert!(m.is_trivial()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn comparison_matches_brute_force() {
        let g = alt(6);
        let phi = TrackedHom::identity(g.clone());
        let x = ColoredString::from_text("aabbcc");
        let shift = Perm::parse(6, "(0 2 4)(1 3 5)").unwrap();
        let y = x.act(&shift);
        let s = solver();
        let (t, t2) = (vec![0, 1, 2], vec![2, 3, 4]);
        let r = compare_certificates(&s, &g, &phi, &t, &t2, &x, &y).unwrap();
        assert!(r.iso.contains(&shift));
        let glaucous = 3;
        let xw = x.truncate_with(&r.window_t, glaucous);
        let yw = y.truncate_with(&r.window_t2, glaucous);
        let expect: Vec<Perm> = brute_force(&g, &xw, &yw)
            .elements()
            .into_iter()
            .filter(|p| {
                let mut img: Vec<usize> = t.iter().map(|&a| p.apply(a)).collect();
                img.sort_unstable();
                img == t2
            })
            .collect();
        let mut got = r.iso.elements();
        got.sort();
        let mut expect = expect;
        expect.sort();
        assert_eq!(got, expect);
        let z = ColoredString::new(vec![5, 5, 6, 6, 7, 7]);
        assert!(compare_certificates(&s, &g, &phi, &t, &t2, &x, &z).unwrap().iso.is_empty());
    }

    #[test]
    fn tuple_comparison_orders_points() {
        let g = alt(6);
        let phi = TrackedHom::identity(g.clone());
        let x = ColoredString::constant(6, 0);
        let s = solver();
        let r = compare_certificates_tuples(&s, &g, &phi, &[0, 1, 2], &[1, 0, 2], &x, &x).unwrap();
        let set = compare_certificates(&s, &g, &phi, &[0, 1, 2], &[0, 1, 2], &x, &x).unwrap();
        let expect: Vec<Perm> = set
            .iso
            .elements()
            .into_iter()
            .filter(|p| p.apply(0) == 1 && p.apply(1) == 0 && p.apply(2) == 2)
            .collect();
        assert_eq!(r.iso.elements().len(), expect.len());
        assert!(expect.iter().all(|p| r.iso.contains(p)));
    }
}
