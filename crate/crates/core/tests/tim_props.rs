use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankloss::exactla::{ExactMatrix, Rational};
use rankloss::formats::{parse_scheme, parse_topology, scheme_to_json, topology_to_json, parse_scheme_str, parse_topology_str};
use rankloss::randrank::TrialConfig;
use rankloss::sampling::{p1p2_topology, random_topology};
use rankloss::tim::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn slot_sets(s: &Scheme) -> Vec<Vec<usize>> {
    (0..s.k()).map(|i| s.active_slots(i)).collect()
}

#[test]
fn t6_pipeline() {
    let t = parse_topology(fixture("T6.json")).unwrap();
    let reduced = reduced_conflict_graph(&t);
    let bip = is_bipartite(&reduced);
    assert!(bip.bipartite);
    // the partition {1,3,4} / {2,5,6} separates every reduced edge
    let side = |v: usize| [1, 3, 4].contains(&(v + 1));
    assert!(reduced.edges().iter().all(|&(a, b)| side(a) != side(b)));
    assert_eq!(chromatic_number(&regular_conflict_graph(&t)).unwrap(), 3);

    let s = synth_half_dof_scheme(&t).unwrap();
    // columns of [0 1 0 0 1 1; 1 0 1 1 0 1]
    assert_eq!(slot_sets(&s), vec![vec![2], vec![1], vec![2], vec![2], vec![1], vec![1, 2]]);
    let report = verify_decodability(&t, &s, &TrialConfig::default()).unwrap();
    assert!(report.all_decodable);
    assert!(half_dof_structure_check(&t, &s).unwrap().passed());
}

#[test]
fn t9a_pipeline() {
    let t = parse_topology(fixture("T9a.json")).unwrap();
    assert!(check_p1_p2(&t).holds());
    assert_eq!(ldof_sym(&t).unwrap(), Rational::new(4.into(), 9.into()));
    let d = synth_exclusive_scheme(&t).unwrap();
    assert_eq!((d.n, d.m), (9, 4));
    assert!(verify_decodability(&t, &d.scheme, &TrialConfig::default()).unwrap().all_decodable);
}

#[test]
fn t9b_design_beats_the_formula() {
    let t = parse_topology(fixture("T9b.json")).unwrap();
    let props = check_p1_p2(&t);
    assert!(props.p1 && !props.p2);
    assert!(ldof_sym(&t).is_err());
    let (s, _) = parse_scheme(fixture("T9b-scheme.json")).unwrap();
    assert_eq!((s.n(), s.symmetric_m()), (7, Some(3)));
    assert!(verify_decodability(&t, &s, &TrialConfig::default()).unwrap().all_decodable);
    // 3/7 exceeds 5/12
    assert!(Rational::new(3.into(), 7.into()) > Rational::new(5.into(), 12.into()));
}

#[test]
fn reduced_edges_are_regular_edges() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let k = rng.gen_range(1..=9);
        let t = random_topology(&mut rng, k, 3);
        let regular = regular_conflict_graph(&t);
        for &(a, b) in reduced_conflict_graph(&t).edges() {
            assert!(regular.has_edge(a, b));
        }
    }
}

#[test]
fn half_dof_schemes_decode_whenever_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let cfg = TrialConfig::default();
    let mut feasible = 0;
    for _ in 0..200 {
        let k = rng.gen_range(2..=8);
        let t = random_topology(&mut rng, k, 2);
        if !half_dof_feasible(&t) {
            continue;
        }
        feasible += 1;
        for policy in [ActivationPolicy::Plain, ActivationPolicy::MinimalActivation] {
            let s = synth_half_dof_scheme_with(&t, policy).unwrap();
            assert!(verify_decodability(&t, &s, &cfg).unwrap().all_decodable, "{t:?} {policy:?}");
            assert!(structurally_decodable(&t, &s).unwrap().into_iter().all(|d| d));
        }
    }
    assert!(feasible > 50);
}

#[test]
fn exclusive_schemes_decode_for_small_chromatic_numbers() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let cfg = TrialConfig::new(10, 1 << 31, 3).unwrap();
    let mut seen = [0usize; 4];
    for round in 0..400 {
        let k = rng.gen_range(3..=9);
        let p_pair = if round % 3 == 0 { 0.45 } else { 0.8 };
        let t = p1p2_topology(&mut rng, k, p_pair, 0.15);
        if t.link_count() == 0 {
            continue;
        }
        let chi = chromatic_number(&reduced_conflict_graph(&t)).unwrap();
        if !(2..=3).contains(&chi) {
            continue;
        }
        seen[chi] += 1;
        let entries = if round % 2 == 0 { GenericEntries::Primes } else { GenericEntries::Random(round) };
        let d = synth_exclusive_scheme_with(&t, entries).unwrap();
        assert_eq!((d.n, d.m, d.tau), (3 * chi, chi + 1, 3));
        assert!(verify_decodability(&t, &d.scheme, &cfg).unwrap().all_decodable, "{t:?}");
        let expected = Rational::new((chi + 1).into(), (3 * chi).into()).min(Rational::new(1.into(), 2.into()));
        assert_eq!(ldof_sym(&t).unwrap(), expected);
        let (s, a) = normalize_alignment(&t, &d.scheme, &d.assignment).unwrap();
        assert_eq!(a, d.assignment);
        assert!(verify_decodability(&t, &s, &cfg).unwrap().all_decodable);
        if chi == 3 {
            assert!(synth_exclusive_scheme_at(&t, 9, 5, GenericEntries::Primes).is_err());
        }
    }
    assert!(seen[2] > 5 && seen[3] > 5, "{seen:?}");
}

fn unit_scheme(k: usize, code: usize) -> Scheme {
    let mut c = code;
    let cols = (0..k)
        .map(|_| {
            let pattern = c % 3;
            c /= 3;
            match pattern {
                0 => ExactMatrix::from_i64_rows(&[&[1], &[0]]),
                1 => ExactMatrix::from_i64_rows(&[&[0], &[1]]),
                _ => ExactMatrix::from_i64_rows(&[&[1], &[1]]),
            }
        })
        .collect();
    Scheme::new(2, cols).unwrap()
}

#[test]
fn odd_cycles_always_break_the_structure_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut tested = 0;
    while tested < 25 {
        let k = rng.gen_range(3..=6);
        let t = random_topology(&mut rng, k, 2);
        if half_dof_feasible(&t) {
            continue;
        }
        tested += 1;
        for code in 0..3usize.pow(k as u32) {
            let s = unit_scheme(k, code);
            assert!(!half_dof_structure_check(&t, &s).unwrap().passed(), "{t:?} code {code}");
        }
    }
}

#[test]
fn bipartite_half_dof_schemes_pass_the_structure_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..100 {
        let k = rng.gen_range(2..=8);
        let t = random_topology(&mut rng, k, 2);
        if let Ok(s) = synth_half_dof_scheme(&t) {
            assert!(half_dof_structure_check(&t, &s).unwrap().passed(), "{t:?}");
        }
    }
}

#[test]
fn decodability_is_reproducible() {
    let t = parse_topology(fixture("T9a.json")).unwrap();
    let d = synth_exclusive_scheme(&t).unwrap();
    let cfg = TrialConfig::seeded(99);
    assert_eq!(
        verify_decodability(&t, &d.scheme, &cfg).unwrap(),
        verify_decodability(&t, &d.scheme, &cfg).unwrap()
    );
}

#[test]
fn file_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..50 {
        let k = rng.gen_range(3..=9);
        let t = p1p2_topology(&mut rng, k, 0.4, 0.4);
        assert_eq!(parse_topology_str(&topology_to_json(&t).to_string()).unwrap(), t);
        if let Ok(d) = synth_exclusive_scheme_with(&t, GenericEntries::Random(7)) {
            let text = scheme_to_json(&d.scheme, Some(&d.assignment)).to_string();
            let (s, a) = parse_scheme_str(&text).unwrap();
            assert_eq!(s, d.scheme);
            assert_eq!(a.unwrap(), d.assignment);
        }
    }
}
