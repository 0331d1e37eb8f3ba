use giso::action::{block_action, is_transitive, minimal_block_system};
use giso::config::{wl2_refine, PartitionStructure};
use giso::graph::{brute_force_gi, solve_gi, Graph};
use giso::string_iso::brute_force;
use giso::{ColoredString, Perm, PermGroup, Solver, SolverConfig};
use proptest::prelude::*;

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

fn group(n: usize) -> impl Strategy<Value = PermGroup> {
    prop::collection::vec(perm(n), 0..4).prop_map(move |g| PermGroup::new(n, g).unwrap())
}

fn word(n: usize, alphabet: u32) -> impl Strategy<Value = ColoredString> {
    prop::collection::vec(0..alphabet, n).prop_map(ColoredString::new)
}

fn closure_order(g: &PermGroup) -> usize {
    let n = g.degree();
    let mut seen = std::collections::HashSet::from([Perm::identity(n)]);
    let mut todo = vec![Perm::identity(n)];
    while let Some(p) = todo.pop() {
        for s in g.generators() {
            let q = p.then(s);
            if seen.insert(q.clone()) {
                todo.push(q);
            }
        }
    }
    seen.len()
}

fn solver() -> Solver {
    Solver::new(SolverConfig { brute_threshold: 4, ..SolverConfig::default() })
}

fn graph(n: usize) -> impl Strategy<Value = Graph> {
    prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        let edges: Vec<_> = pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e).collect();
        Graph::from_edges(n, false, &edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_and_inverse((a, b, c) in (perm(9), perm(9), perm(9))) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        prop_assert!(a.then(&a.inverse()).is_identity());
        for i in 0..9 {
            prop_assert_eq!(a.then(&b).apply(i), b.apply(a.apply(i)));
        }
    }

    #[test]
    fn cycle_notation_round_trip(p in perm(10)) {
        prop_assert_eq!(Perm::parse(10, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn chain_order_matches_closure(g in group(6)) {
        prop_assert_eq!(g.order(), closure_order(&g).into());
        let chain = g.chain();
        for l in 0..chain.depth() {
            for &pt in chain.level_orbit(l) {
                let r = chain.transversal_rep(l, pt).unwrap();
                prop_assert!((0..l).all(|j| r.fixes(chain.level_point(j))));
            }
        }
    }

    #[test]
    fn membership_matches_closure((g, p) in (group(5), perm(5))) {
        let by_words = {
            let mut seen = std::collections::HashSet::from([Perm::identity(5)]);
            let mut todo = vec![Perm::identity(5)];
            while let Some(q) = todo.pop() {
                for s in g.generators() {
                    let r = q.then(s);
                    if seen.insert(r.clone()) { todo.push(r); }
                }
            }
            seen.contains(&p)
        };
        prop_assert_eq!(g.contains(&p), by_words);
    }

    #[test]
    fn block_action_is_multiplicative((g, a, b) in (group(8), any::<prop::sample::Index>(), any::<prop::sample::Index>())) {
        prop_assume!(is_transitive(&g));
        if let Some(system) = minimal_block_system(&g).unwrap() {
            let hom = block_action(&g, &system).unwrap();
            let els = g.elements();
            let (a, b) = (a.get(&els), b.get(&els));
            prop_assert_eq!(hom.eval(&a.then(b)).unwrap(), hom.eval(a).unwrap().then(&hom.eval(b).unwrap()));
            for k in hom.kernel().generators() {
                prop_assert!(hom.eval(k).unwrap().is_identity());
            }
        }
    }

    #[test]
    fn solver_matches_brute_force((g, x, s) in (group(7), word(7, 3), perm(7))) {
        let y = x.act(&s);
        let c = solver().solve(&g, &x, &y).unwrap();
        prop_assert!(c.same_set(&brute_force(&g, &x, &y)));
        let z = x.act(&s.then(&Perm::transposition(7, 0, 1)));
        prop_assert!(solver().solve(&g, &x, &z).unwrap().same_set(&brute_force(&g, &x, &z)));
    }

    #[test]
    fn shift_identity((g, x, y, s) in (group(6), word(6, 2), word(6, 2), perm(6))) {
        // Iso over the coset Gσ, by filtering its elements
        let direct: Vec<Perm> = g.elements().iter().map(|h| h.then(&s)).filter(|t| x.maps_to(&y, t)).collect();
        let shifted = solver().solve(&g, &x, &y.act(&s.inverse())).unwrap().shift(&s);
        prop_assert_eq!(shifted.size(), direct.len().into());
        prop_assert!(direct.iter().all(|t| shifted.contains(t)));
    }

    #[test]
    fn aut_is_the_iso_group((g, x, s) in (group(6), word(6, 3), perm(6))) {
        let y = x.act(&s);
        let aut = solver().solve(&g, &x, &x).unwrap();
        let iso = solver().solve(&g, &x, &y).unwrap();
        if let (Some(a), Some(i)) = (aut.group(), iso.group()) {
            prop_assert!(a.same_group(i));
        }
    }

    #[test]
    fn wl_is_canonical_and_idempotent((colors, p) in (prop::collection::vec(0u32..3, 36), perm(6))) {
        let s = PartitionStructure::from_matrix(6, colors);
        let c = wl2_refine(&s).unwrap();
        prop_assert!(c.is_coherent());
        prop_assert!(wl2_refine(&s.act(&p)).unwrap().same_partition(&c.act(&p)));
        prop_assert!(wl2_refine(c.structure()).unwrap().same_partition(&c));
    }

    #[test]
    fn gi_matches_brute_force((a, p, b) in (graph(6), perm(6), graph(6))) {
        let s = solver();
        let image = a.permuted(&p);
        for other in [&image, &b] {
            let c = solve_gi(&s, &a, other).unwrap();
            let oracle = brute_force_gi(&a, other);
            prop_assert_eq!(c.size(), oracle.len().into());
            prop_assert!(oracle.iter().all(|t| c.contains(t)));
        }
    }
}
