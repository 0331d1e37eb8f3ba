use giso::aggregation::reduce_with_certificates;
use giso::instances::{alt_on_ordered_pairs, block_string, johnson_pairs_string, wreath_pairs};
use giso::string_iso::brute_force;
use giso::{ColoredString, Solver, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn relaxed(k: usize) -> Solver {
    Solver::new(SolverConfig { relax_k: Some(k), ..SolverConfig::default() })
}

fn check_wreath(pairs: &[(u32, u32)], case: &str) {
    let m = pairs.len();
    let (g, phi) = wreath_pairs(m).unwrap();
    let x = block_string(pairs);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sigma = g.random_element(&mut rng);
    let y = x.act(&sigma);
    let s = relaxed(3);
    let r = reduce_with_certificates(&s, &g, &phi, &x, &y, 3).unwrap().expect("progress");
    let oracle = brute_force(&g, &x, &y);
    assert!(r.iso.same_set(&oracle), "{case}: wrong coset");
    assert!(r.iso.contains(&sigma));
    assert_eq!(r.stats[0].case.to_string(), case);
    let full = s.solve(&g, &x, &y).unwrap();
    assert!(full.same_set(&oracle));
}

#[test]
fn case_two_a_on_uniform_blocks() {
    check_wreath(&[(0, 1); 7], "2a");
}

#[test]
fn case_one_on_three_classes() {
    check_wreath(&[(0, 1), (0, 1), (0, 1), (0, 2), (0, 2), (0, 2), (1, 2)], "1");
}

#[test]
fn case_three_on_distinct_letters() {
    let pairs: Vec<(u32, u32)> = (0..7).map(|i| (2 * i, 2 * i + 1)).collect();
    check_wreath(&pairs, "3");
}

#[test]
fn case_two_b_johnson() {
    let (g, phi) = alt_on_ordered_pairs(10).unwrap();
    let x = johnson_pairs_string();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sigma = g.random_element(&mut rng);
    let y = x.act(&sigma);
    let s = relaxed(3);
    let r = reduce_with_certificates(&s, &g, &phi, &x, &y, 3).unwrap().expect("progress");
    assert_eq!(r.iso.size(), 60u32.into());
    assert!(r.iso.same_set(&brute_force(&g, &x, &y)));
}

#[test]
fn refuted_when_block_types_differ() {
    let (g, phi) = wreath_pairs(7).unwrap();
    let x = block_string(&[(0, 1), (0, 1), (0, 1), (0, 2), (0, 2), (0, 2), (1, 2)]);
    let y = block_string(&[(0, 0), (1, 1), (0, 1), (0, 2), (0, 2), (0, 2), (1, 2)]);
    assert_eq!(x.letter_counts(), y.letter_counts());
    let s = relaxed(3);
    let r = reduce_with_certificates(&s, &g, &phi, &x, &y, 3).unwrap().expect("progress");
    assert!(r.iso.is_empty());
    assert!(brute_force(&g, &x, &y).is_empty());
}

#[test]
fn two_b_rejects_a_different_relation() {
    let (g, phi) = alt_on_ordered_pairs(10).unwrap();
    let x = johnson_pairs_string();
    // move one ordered pair and its reverse between colors, keeping the counts
    let mut letters = x.letters().to_vec();
    let one = letters.iter().position(|&c| c == 1).unwrap();
    let zero = letters.iter().position(|&c| c == 0).unwrap();
    letters.swap(one, zero);
    let y = ColoredString::new(letters);
    let s = relaxed(3);
    let r = reduce_with_certificates(&s, &g, &phi, &x, &y, 3).unwrap();
    let oracle = brute_force(&g, &x, &y);
    assert!(oracle.is_empty());
    if let Some(r) = r {
        assert!(r.iso.is_empty());
    }
    assert!(s.solve(&g, &x, &y).unwrap().is_empty());
}
