//! Random instance generators for property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::conditions::Ensemble;
use crate::exactla::{rat, sparse_dim, ExactMatrix, IndexSet};
use crate::tim::Topology;

/// Columns `y` of `block` over ground rows `x`, with `dim(S_{X^c} ∩ B_{*,Y}) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidInstance {
    pub block: ExactMatrix,
    pub x: IndexSet,
    pub y: IndexSet,
}

fn random_subset<R: Rng>(rng: &mut R, universe: usize, nonempty: bool) -> IndexSet {
    loop {
        let mask = rng.gen_range(0..1u64 << universe);
        if mask != 0 || !nonempty {
            return IndexSet::from_mask(universe, mask).expect("mask within universe");
        }
    }
}

fn admissible(block: &ExactMatrix, x: &IndexSet, y: &IndexSet) -> bool {
    let cols = block.select_columns(y).expect("column set matches block");
    sparse_dim(&cols, &x.complement()).expect("row universe matches") == 0
}

/// Shape and entry distribution of a random ensemble suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSuite {
    pub max_n: usize,
    pub max_k: usize,
    /// Entries other than zero are drawn uniformly from this list.
    pub nonzero_entries: &'static [i64],
    pub zero_probability: f64,
}

impl Default for EnsembleSuite {
    fn default() -> Self {
        EnsembleSuite {
            max_n: 6,
            max_k: 3,
            nonzero_entries: &[-1, 1, 2],
            zero_probability: 0.4,
        }
    }
}

impl EnsembleSuite {
    fn entry<R: Rng>(&self, rng: &mut R) -> i64 {
        if rng.gen_bool(self.zero_probability) {
            0
        } else {
            self.nonzero_entries[rng.gen_range(0..self.nonzero_entries.len())]
        }
    }

    /// An `n × m` matrix with full column rank, redrawn until it has one.
    pub fn block<R: Rng>(&self, rng: &mut R, n: usize, m: usize) -> ExactMatrix {
        loop {
            let rows: Vec<Vec<_>> = (0..n).map(|_| (0..m).map(|_| rat(self.entry(rng))).collect()).collect();
            let b = ExactMatrix::from_rows(&rows).expect("rectangular");
            if b.has_full_column_rank() {
                return b;
            }
        }
    }

    /// `n ∈ [1, max_n]`, `K ∈ [1, max_k]`, `m_i ∈ [1, n]`.
    pub fn ensemble<R: Rng>(&self, rng: &mut R) -> Ensemble {
        let n = rng.gen_range(1..=self.max_n);
        let k = rng.gen_range(1..=self.max_k);
        let blocks = (0..k)
            .map(|_| {
                let m = rng.gen_range(1..=n);
                self.block(rng, n, m)
            })
            .collect();
        Ensemble::new(blocks).expect("blocks have full column rank")
    }

    /// An ensemble whose blocks share a planted sparse support: in each block
    /// the first columns are drawn on a common row set `J`, so that rank loss
    /// is common rather than rare. Needs `max_n ≥ 2`.
    pub fn planted_ensemble<R: Rng>(&self, rng: &mut R) -> Ensemble {
        let n = rng.gen_range(2..=self.max_n.max(2));
        let k = rng.gen_range(2..=self.max_k.max(2));
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(rng);
        let support = &rows[..rng.gen_range(1..n)];
        let blocks = (0..k)
            .map(|_| {
                let m = rng.gen_range(1..=n);
                let planted = m.min(support.len()).min(rng.gen_range(1..=support.len()));
                loop {
                    let b = self.block(rng, n, m);
                    let mut cols: Vec<Vec<_>> = (0..m)
                        .map(|c| (0..n).map(|r| b.get(r, c).clone()).collect())
                        .collect();
                    for col in cols.iter_mut().take(planted) {
                        for (r, v) in col.iter_mut().enumerate() {
                            if !support.contains(&r) {
                                *v = rat(0);
                            }
                        }
                    }
                    let b = ExactMatrix::from_columns(n, &cols).expect("columns have n rows");
                    if b.has_full_column_rank() {
                        return b;
                    }
                }
            })
            .collect();
        Ensemble::new(blocks).expect("blocks have full column rank")
    }

    /// One admissible scaled-linear matroid instance with `n ≤ max_n`.
    pub fn matroid_instance<R: Rng>(&self, rng: &mut R) -> MatroidInstance {
        loop {
            let n = rng.gen_range(1..=self.max_n);
            let m = rng.gen_range(1..=n);
            let block = self.block(rng, n, m);
            let x = random_subset(rng, n, true);
            let y = random_subset(rng, m, true);
            if admissible(&block, &x, &y) {
                return MatroidInstance { block, x, y };
            }
        }
    }

    /// `parts` admissible instances sharing `n` and the ground set `x`.
    pub fn union_instance<R: Rng>(&self, rng: &mut R, parts: usize) -> Vec<MatroidInstance> {
        'outer: loop {
            let n = rng.gen_range(1..=self.max_n);
            let x = random_subset(rng, n, true);
            let mut out = Vec::with_capacity(parts);
            for _ in 0..parts {
                let found = (0..50).find_map(|_| {
                    let m = rng.gen_range(1..=n);
                    let block = self.block(rng, n, m);
                    let y = random_subset(rng, m, true);
                    admissible(&block, &x, &y).then_some(MatroidInstance { block, x, y })
                });
                match found {
                    Some(inst) => out.push(inst),
                    None => continue 'outer,
                }
            }
            return out;
        }
    }
}

/// Random bipartite adjacency: `right` bitmasks over `left` vertices.
pub fn random_adjacency<R: Rng>(rng: &mut R, left: usize, right: usize, density: f64) -> Vec<u64> {
    (0..right)
        .map(|_| (0..left).filter(|_| rng.gen_bool(density)).fold(0u64, |acc, i| acc | 1 << i))
        .collect()
}

/// Topology on `k` users where each receiver hears up to `max_size` random interferers.
pub fn random_topology<R: Rng>(rng: &mut R, k: usize, max_size: usize) -> Topology {
    let sets = (0..k)
        .map(|j| {
            let others: Vec<usize> = (0..k).filter(|&i| i != j).collect();
            let size = rng.gen_range(0..=max_size.min(others.len()));
            IndexSet::from_zero_based(k, others.choose_multiple(rng, size).copied()).expect("users within k")
        })
        .collect();
    Topology::new(sets).expect("no self-interference")
}

/// Topology with at most two interferers per receiver where members of a
/// two-interferer set interfere nowhere else. Receivers are filled in random
/// order; `p_pair` and `p_single` weight the set sizes.
pub fn p1p2_topology<R: Rng>(rng: &mut R, k: usize, p_pair: f64, p_single: f64) -> Topology {
    let mut sets = vec![IndexSet::empty(k); k];
    let mut used = IndexSet::empty(k);
    let mut locked = IndexSet::empty(k);
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    for j in order {
        let roll: f64 = rng.gen();
        if roll < p_pair {
            let free: Vec<usize> = (0..k).filter(|&i| i != j && !used.contains(i)).collect();
            if free.len() >= 2 {
                let pair: Vec<usize> = free.choose_multiple(rng, 2).copied().collect();
                for &i in &pair {
                    used = used.with(i);
                    locked = locked.with(i);
                }
                sets[j] = IndexSet::from_zero_based(k, pair).expect("users within k");
                continue;
            }
        }
        if roll < p_pair + p_single {
            let open: Vec<usize> = (0..k).filter(|&i| i != j && !locked.contains(i)).collect();
            if let Some(&i) = open.choose(rng) {
                used = used.with(i);
                sets[j] = IndexSet::from_zero_based(k, [i]).expect("users within k");
            }
        }
    }
    Topology::new(sets).expect("no self-interference")
}
