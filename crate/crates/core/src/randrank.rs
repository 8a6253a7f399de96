//! Randomized evaluation of the scaled ensemble's almost-sure rank.
//!
//! Each trial draws one positive integer per row per block and computes the
//! exact rank of `[Λ_1 B_1 … Λ_K B_K]`. An evaluation point can only lose rank
//! relative to the generic value, so any observed rank is a certain lower bound.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::conditions::Ensemble;
use crate::exactla::{ExactMatrix, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrialConfigError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("entry bound must be at least 2, got {0}")]
    EntryBound(u64),
    #[error("bit width must be in 1..=63, got {0}")]
    Bits(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialConfig {
    trials: u32,
    entry_bound: u64,
    seed: u64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 20,
            entry_bound: 1 << 31,
            seed: 0,
        }
    }
}

impl TrialConfig {
    pub fn new(trials: u32, entry_bound: u64, seed: u64) -> Result<Self, TrialConfigError> {
        if trials == 0 {
            return Err(TrialConfigError::NoTrials);
        }
        if entry_bound < 2 {
            return Err(TrialConfigError::EntryBound(entry_bound));
        }
        Ok(TrialConfig {
            trials,
            entry_bound,
            seed,
        })
    }

    /// Entry bound `2^bits`.
    pub fn with_bits(trials: u32, bits: u32, seed: u64) -> Result<Self, TrialConfigError> {
        if !(1..=63).contains(&bits) {
            return Err(TrialConfigError::Bits(bits));
        }
        Self::new(trials, 1u64 << bits, seed)
    }

    pub fn seeded(seed: u64) -> Self {
        TrialConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn trials(&self) -> u32 {
        self.trials
    }

    pub fn entry_bound(&self) -> u64 {
        self.entry_bound
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for one trial; the same (seed, trial) always yields the same draws.
    pub fn rng(&self, trial: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(u64::from(trial));
        rng
    }

    /// `log2` of the Schwartz–Zippel bound `(degree / entry_bound)^trials`.
    pub fn failure_bound_log2(&self, degree: usize) -> f64 {
        let d = degree.max(1) as f64;
        f64::from(self.trials) * (d.log2() - (self.entry_bound as f64).log2())
    }

    /// One diagonal per block, each a vector of `n` values in `[1, entry_bound]`.
    pub fn draw_diagonals(&self, rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<Rational>> {
        (0..k)
            .map(|_| {
                (0..n)
                    .map(|_| Rational::from_integer(BigInt::from(rng.gen_range(1..=self.entry_bound))))
                    .collect()
            })
            .collect()
    }
}

/// `[Λ_1 B_1 … Λ_K B_K]` for the given diagonals.
pub fn scaled_concat(blocks: &[ExactMatrix], diagonals: &[Vec<Rational>]) -> ExactMatrix {
    let n = blocks.first().map_or(0, ExactMatrix::n_rows);
    let mut cols = Vec::new();
    for (b, d) in blocks.iter().zip(diagonals) {
        cols.extend(b.scale_rows(d).expect("diagonal matches rows").columns());
    }
    ExactMatrix::from_columns(n, &cols).expect("blocks share row count")
}

/// Rank of `B_D` at each trial's evaluation point.
pub fn sampled_ranks(e: &Ensemble, cfg: &TrialConfig) -> Vec<usize> {
    (0..cfg.trials())
        .map(|t| {
            let mut rng = cfg.rng(t);
            let d = cfg.draw_diagonals(&mut rng, e.n(), e.k());
            scaled_concat(e.blocks(), &d).rank()
        })
        .collect()
}

/// Maximum sampled rank; a certain lower bound on the generic rank.
pub fn sample_generic_rank(e: &Ensemble, cfg: &TrialConfig) -> usize {
    sampled_ranks(e, cfg).into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum C1Verdict {
    HoldsProbabilistic,
    FailsCertain,
}

impl C1Verdict {
    pub fn holds(self) -> bool {
        self == C1Verdict::HoldsProbabilistic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C1Outcome {
    pub tau: usize,
    pub verdict: C1Verdict,
    pub sampled_ranks: Vec<usize>,
    /// Rank the scaled ensemble must not exceed, `R − τ`.
    pub threshold: usize,
    /// `log2` of the probability that a holds verdict is wrong.
    pub failure_bound_log2: Option<f64>,
}

/// Evaluates (C1) from precomputed ranks, so a sweep over τ can reuse one sample set.
pub fn c1_from_ranks(e: &Ensemble, tau: usize, cfg: &TrialConfig, ranks: &[usize]) -> C1Outcome {
    let threshold = e.r().saturating_sub(tau);
    let exceeds = ranks.iter().any(|&r| r > threshold);
    C1Outcome {
        tau,
        verdict: if exceeds {
            C1Verdict::FailsCertain
        } else {
            C1Verdict::HoldsProbabilistic
        },
        sampled_ranks: ranks.to_vec(),
        threshold,
        failure_bound_log2: (!exceeds).then(|| cfg.failure_bound_log2(e.n())),
    }
}

/// Does the ensemble lose rank by at least τ almost surely?
pub fn check_c1(e: &Ensemble, tau: usize, cfg: &TrialConfig) -> C1Outcome {
    c1_from_ranks(e, tau, cfg, &sampled_ranks(e, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Ensemble {
        Ensemble::new(vec![
            ExactMatrix::from_i64_rows(&[&[1, 1], &[1, 2], &[1, 3], &[0, 0]]),
            ExactMatrix::from_i64_rows(&[&[1, 0], &[0, 1], &[1, 1], &[0, 0]]),
        ])
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(TrialConfig::new(0, 10, 1).is_err());
        assert!(TrialConfig::new(1, 1, 1).is_err());
        assert!(TrialConfig::with_bits(1, 64, 1).is_err());
        assert_eq!(TrialConfig::with_bits(3, 31, 9).unwrap().entry_bound(), 1 << 31);
        let d = TrialConfig::default();
        assert_eq!((d.trials(), d.entry_bound()), (20, 1 << 31));
    }

    #[test]
    fn generic_rank_examples() {
        let cfg = TrialConfig::seeded(3);
        assert_eq!(sample_generic_rank(&e1(), &cfg), 3);
        let id = Ensemble::new(vec![ExactMatrix::identity(5)]).unwrap();
        assert_eq!(sample_generic_rank(&id, &cfg), 5);
    }

    #[test]
    fn c1_examples() {
        let cfg = TrialConfig::seeded(11);
        let one = check_c1(&e1(), 1, &cfg);
        assert_eq!(one.verdict, C1Verdict::HoldsProbabilistic);
        assert!(one.failure_bound_log2.unwrap() < -500.0);
        assert_eq!(check_c1(&e1(), 2, &cfg).verdict, C1Verdict::FailsCertain);
    }

    #[test]
    fn draws_are_reproducible_and_in_range() {
        let cfg = TrialConfig::new(4, 5, 42).unwrap();
        let a = cfg.draw_diagonals(&mut cfg.rng(2), 6, 3);
        let b = cfg.draw_diagonals(&mut cfg.rng(2), 6, 3);
        assert_eq!(a, b);
        assert_ne!(a, cfg.draw_diagonals(&mut cfg.rng(3), 6, 3));
        for v in a.iter().flatten() {
            assert!(*v >= Rational::from_integer(1.into()) && *v <= Rational::from_integer(5.into()));
        }
        assert_eq!(sampled_ranks(&e1(), &cfg), sampled_ranks(&e1(), &cfg));
    }
}
