use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankloss::conditions::{check_c2, max_tau, Ensemble};
use rankloss::exactla::{sparse_dim, IndexSet};
use rankloss::matching::{
    adapted_support_graph, defect, defect_exhaustive, hall_threshold_check, max_matching, SupportGraph,
};
use rankloss::matroid::{union_deficiency, MatroidError};
use rankloss::randrank::{sample_generic_rank, TrialConfig};
use rankloss::sampling::{random_adjacency, EnsembleSuite};

fn subsets(universe: usize) -> Vec<IndexSet> {
    (0..1u64 << universe).map(|m| IndexSet::from_mask(universe, m).unwrap()).collect()
}

/// Every `(Y_1..Y_K)` with `Σ|Y_i| = total`.
fn column_choices(e: &Ensemble, total: usize) -> Vec<Vec<IndexSet>> {
    let mut out: Vec<Vec<IndexSet>> = vec![vec![]];
    for i in 0..e.k() {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                subsets(e.m(i)).into_iter().map(move |y| {
                    let mut p = prefix.clone();
                    p.push(y);
                    p
                })
            })
            .collect();
    }
    out.retain(|ys| ys.iter().map(IndexSet::len).sum::<usize>() == total);
    out
}

/// Whether some ordered partition of `x` into parts of sizes `|Y_i|` leaves
/// every `S_{I_i^c} ∩ B_{i,*,Y_i}` trivial.
fn zero_partition_exists(e: &Ensemble, x: &IndexSet, ys: &[IndexSet]) -> bool {
    fn go(e: &Ensemble, ys: &[IndexSet], i: usize, left: IndexSet) -> bool {
        if i == ys.len() {
            return left.is_empty();
        }
        let cols = e.block(i).select_columns(&ys[i]).unwrap();
        subsets(left.universe())
            .into_iter()
            .filter(|p| p.is_subset(&left) && p.len() == ys[i].len())
            .any(|p| sparse_dim(&cols, &p.complement()).unwrap() == 0 && go(e, ys, i + 1, left.difference(&p)))
    }
    go(e, ys, 0, *x)
}

#[test]
fn union_deficiency_matches_partition_condition() {
    let suite = EnsembleSuite {
        max_n: 4,
        ..EnsembleSuite::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..100 {
        let e = suite.ensemble(&mut rng);
        for x in subsets(e.n()).into_iter().filter(|x| !x.is_empty() && x.len() <= e.r()) {
            for ys in column_choices(&e, x.len()) {
                match union_deficiency(&e, &x, &ys) {
                    Ok(def) => {
                        assert_eq!(def, !zero_partition_exists(&e, &x, &ys), "{e:?} X={x} Ys={ys:?}");
                        checked += 1;
                    }
                    Err(MatroidError::Precondition { .. }) => {}
                    Err(other) => panic!("{other}"),
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn matching_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..300 {
        let (left, right) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let density = rng.gen_range(0.05..0.6);
        let g = SupportGraph::from_adjacency(left, random_adjacency(&mut rng, left, right, density)).unwrap();
        let mm = max_matching(&g);
        assert_eq!(mm, right - defect_exhaustive(&g).unwrap());
        assert_eq!(defect(&g), right - mm);
        for k in 0..=left.min(right) {
            assert_eq!(hall_threshold_check(&g, k).unwrap(), mm >= k);
        }
    }
}

fn best_slack(e: &Ensemble, ys: &[IndexSet]) -> (i64, IndexSet) {
    let blocks = e.restrict(ys);
    let mut best = (0, IndexSet::empty(e.n()));
    for j in subsets(e.n()) {
        let s: usize = blocks.iter().map(|b| sparse_dim(b, &j).unwrap()).sum();
        let slack = s as i64 - j.len() as i64;
        if slack > best.0 {
            best = (slack, j);
        }
    }
    best
}

#[test]
fn adapted_matching_meets_the_sparse_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let suite = EnsembleSuite::default();
    let cfg = TrialConfig::seeded(5);
    for _ in 0..60 {
        let e = suite.ensemble(&mut rng);
        for ys in column_choices(&e, e.r()).into_iter().take(6) {
            let (slack, j) = best_slack(&e, &ys);
            let g = adapted_support_graph(&e, &ys, &j).unwrap();
            assert_eq!(max_matching(&g) as i64, e.r() as i64 - slack, "{e:?} Ys={ys:?} J*={j}");
            let sub = Ensemble::new(e.restrict(&ys).into_iter().filter(|b| b.n_cols() > 0).collect()).unwrap();
            assert_eq!(sample_generic_rank(&sub, &cfg) as i64, e.r() as i64 - slack);
        }
    }
}

#[test]
fn max_tau_is_rank_loss() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let suite = EnsembleSuite::default();
    let cfg = TrialConfig::default();
    for _ in 0..100 {
        let e = suite.ensemble(&mut rng);
        let top = max_tau(&e).unwrap();
        assert_eq!(top, e.r() - sample_generic_rank(&e, &cfg));
        if top >= 1 {
            assert!(check_c2(&e, top).unwrap().holds());
        }
    }
}

#[test]
fn verdicts_survive_column_scaling_and_row_permutation() {
    use rand::seq::SliceRandom;
    use rankloss::exactla::{rat, ExactMatrix};
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let suite = EnsembleSuite::default();
    for _ in 0..60 {
        let e = suite.ensemble(&mut rng);
        let scaled: Vec<ExactMatrix> = e
            .blocks()
            .iter()
            .map(|b| {
                let diag: Vec<_> = (0..b.n_cols()).map(|_| rat(rng.gen_range(1..=9) * if rng.gen() { 1 } else { -1 })).collect();
                b.transpose().scale_rows(&diag).unwrap().transpose()
            })
            .collect();
        let scaled = Ensemble::new(scaled).unwrap();
        let mut perm: Vec<usize> = (0..e.n()).collect();
        perm.shuffle(&mut rng);
        let permuted = e.permute_rows(&perm);
        let top = max_tau(&e).unwrap();
        assert_eq!(max_tau(&scaled).unwrap(), top);
        assert_eq!(max_tau(&permuted).unwrap(), top);
        for tau in 1..=e.r() {
            let v = check_c2(&e, tau).unwrap().holds();
            assert_eq!(check_c2(&scaled, tau).unwrap().holds(), v);
            assert_eq!(check_c2(&permuted, tau).unwrap().holds(), v);
        }
    }
}
