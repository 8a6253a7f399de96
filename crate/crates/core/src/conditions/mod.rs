//! Combinatorial certification of almost-sure rank loss.
//!
//! Each check enumerates index sets in a fixed canonical order (lexicographic
//! on sorted member lists, blocks in their given order), so the reported
//! witness is deterministic.

mod cache;
mod ensemble;
mod enumerate;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

pub use cache::DimCache;
pub use ensemble::{Ensemble, EnsembleError};
pub(crate) use enumerate::{column_choices, combos, full_mask, lex_cmp};

use crate::exactla::{lex_masks, IndexSet};
use crate::randrank::{self, C1Outcome, TrialConfig};

/// Upper bound on `n` for the determinant-family checks (C3–C5).
pub const MAX_ENUM_ROWS: usize = 16;
/// Upper bound on `n` for (C2) and `max_tau`.
pub const MAX_C2_ROWS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("tau = {tau} is outside 1..={r}")]
    TauOutOfRange { tau: usize, r: usize },
    #[error("{n} rows exceed the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("conditions disagree at tau = {}: {}", .0.tau, .0.summary())]
    EquivalenceViolation(Box<CrossReport>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Verdict::Holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    C2,
    C3,
    C4,
    C5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    C2Witness,
    C2Counterexample,
    C3Violation,
    C4Violation,
    C5Witness,
    C5Counterexample,
}

/// Certificate or counterexample produced by a check. Sets serialize 1-based.
///
/// `slack` is `Σdim − |J| − τ` for (C2) and `Σdim − |J| − 1` for (C5).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub y: Vec<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<IndexSet>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub condition: Condition,
    pub tau: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        self.verdict.holds()
    }
}

/// Search options for (C2).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct C2Options {
    /// Look for `J` among unions of column supports first, then fall back to
    /// the exhaustive scan when none qualifies. Reported witnesses may differ
    /// from the exhaustive canonical ones; verdicts never do.
    pub support_closed_first: bool,
}

fn check_tau(e: &Ensemble, tau: usize) -> Result<(), ConditionError> {
    if tau == 0 || tau > e.r() {
        return Err(ConditionError::TauOutOfRange { tau, r: e.r() });
    }
    Ok(())
}

fn check_size(e: &Ensemble, limit: usize) -> Result<(), ConditionError> {
    if e.n() > limit {
        return Err(ConditionError::TooLarge { n: e.n(), limit });
    }
    Ok(())
}

fn to_sets(e: &Ensemble, ys: &[u64]) -> Vec<IndexSet> {
    ys.iter()
        .enumerate()
        .map(|(i, &y)| IndexSet::from_mask(e.m(i), y).expect("mask within block width"))
        .collect()
}

fn row_set(e: &Ensemble, mask: u64) -> IndexSet {
    IndexSet::from_mask(e.n(), mask).expect("mask within rows")
}

fn total_dim(cache: &mut DimCache, ys: &[u64], j: u64) -> usize {
    (0..ys.len()).map(|i| cache.sparse_dim(i, ys[i], j)).sum()
}

/// Best `J` for one column choice: the first (canonical order) maximizer of
/// `Σ dim − |J|`, together with that value.
fn best_j(cache: &mut DimCache, n: usize, ys: &[u64]) -> (u64, i64) {
    let mut best = (0u64, i64::MIN);
    for j in lex_masks(&(0..n).collect::<Vec<_>>()) {
        let v = total_dim(cache, ys, j) as i64 - i64::from(j.count_ones());
        if v > best.1 {
            best = (j, v);
        }
    }
    best
}

/// Unions of column supports of the chosen columns, in canonical order.
fn support_closed_sets(e: &Ensemble, ys: &[u64]) -> Vec<u64> {
    let mut supports = Vec::new();
    for (i, &y) in ys.iter().enumerate() {
        let b = e.block(i);
        for c in (0..e.m(i)).filter(|c| y >> c & 1 == 1) {
            supports.push(b.column_support(c).mask());
        }
    }
    let mut closed: BTreeSet<u64> = BTreeSet::from([0]);
    for s in supports {
        let grown: Vec<u64> = closed.iter().map(|&c| c | s).collect();
        closed.extend(grown);
    }
    let mut out: Vec<u64> = closed.into_iter().collect();
    out.sort_by(|&a, &b| lex_cmp(a, b));
    out
}

/// (C2): for every column choice with `Σ|Y_i| = R` there is `J ⊆ [n]` with
/// `Σ_i dim(S_J ∩ B_{i,*,Y_i}) ≥ |J| + τ`.
pub fn check_c2(e: &Ensemble, tau: usize) -> Result<CheckOutcome, ConditionError> {
    check_c2_with(e, tau, C2Options::default())
}

pub fn check_c2_with(e: &Ensemble, tau: usize, opts: C2Options) -> Result<CheckOutcome, ConditionError> {
    check_tau(e, tau)?;
    check_size(e, MAX_C2_ROWS)?;
    let mut cache = DimCache::new(e);
    let all_j = lex_masks(&(0..e.n()).collect::<Vec<_>>());
    let mut witnesses = Vec::new();
    let need = tau as i64;
    for ys in column_choices(&e.column_counts(), e.r()) {
        let mut found = None;
        if opts.support_closed_first {
            found = support_closed_sets(e, &ys)
                .into_iter()
                .map(|j| (j, total_dim(&mut cache, &ys, j) as i64 - i64::from(j.count_ones())))
                .find(|&(_, v)| v >= need);
        }
        if found.is_none() {
            found = all_j
                .iter()
                .map(|&j| (j, total_dim(&mut cache, &ys, j) as i64 - i64::from(j.count_ones())))
                .find(|&(_, v)| v >= need);
        }
        match found {
            Some((j, v)) => witnesses.push(Witness {
                kind: WitnessKind::C2Witness,
                y: to_sets(e, &ys),
                j: Some(row_set(e, j)),
                x: None,
                partition: None,
                slack: Some(v - need),
            }),
            None => {
                let (j, v) = best_j(&mut cache, e.n(), &ys);
                return Ok(CheckOutcome {
                    condition: Condition::C2,
                    tau,
                    verdict: Verdict::Fails,
                    witnesses: vec![Witness {
                        kind: WitnessKind::C2Counterexample,
                        y: to_sets(e, &ys),
                        j: Some(row_set(e, j)),
                        x: None,
                        partition: None,
                        slack: Some(v - need),
                    }],
                });
            }
        }
    }
    Ok(CheckOutcome {
        condition: Condition::C2,
        tau,
        verdict: Verdict::Holds,
        witnesses,
    })
}

/// Largest τ for which (C2) holds: `min_Y max_J (Σ dim − |J|)`, never negative.
pub fn max_tau(e: &Ensemble) -> Result<usize, ConditionError> {
    check_size(e, MAX_C2_ROWS)?;
    let mut cache = DimCache::new(e);
    let mut worst = i64::MAX;
    for ys in column_choices(&e.column_counts(), e.r()) {
        worst = worst.min(best_j(&mut cache, e.n(), &ys).1);
        if worst == 0 {
            break;
        }
    }
    Ok(worst.max(0) as usize)
}

/// Row sets `X` with `R − τ < |X| ≤ R`, in canonical order.
fn big_row_sets(e: &Ensemble, tau: usize) -> Vec<u64> {
    let lo = e.r() - tau;
    lex_masks(&(0..e.n()).collect::<Vec<_>>())
        .into_iter()
        .filter(|x| {
            let s = x.count_ones() as usize;
            s > lo && s <= e.r()
        })
        .collect()
}

/// Depth-first search over ordered partitions `(I_1..I_K)` of `x` with
/// `|I_i| = |Y_i|`. `alive(i, I_i)` prunes a branch; the first complete
/// partition whose blocks are all alive is returned.
fn find_partition(
    ys: &[u64],
    x: u64,
    alive: &mut dyn FnMut(usize, u64) -> bool,
) -> Option<Vec<u64>> {
    fn rec(
        ys: &[u64],
        left: u64,
        cur: &mut Vec<u64>,
        alive: &mut dyn FnMut(usize, u64) -> bool,
    ) -> bool {
        let i = cur.len();
        if i == ys.len() {
            return left == 0;
        }
        for part in combos(left, ys[i].count_ones() as usize) {
            if !alive(i, part) {
                continue;
            }
            cur.push(part);
            if rec(ys, left & !part, cur, alive) {
                return true;
            }
            cur.pop();
        }
        false
    }
    let mut cur = Vec::with_capacity(ys.len());
    rec(ys, x, &mut cur, alive).then_some(cur)
}

fn partition_violation(
    e: &Ensemble,
    kind: WitnessKind,
    condition: Condition,
    tau: usize,
    x: u64,
    ys: &[u64],
    parts: &[u64],
) -> CheckOutcome {
    CheckOutcome {
        condition,
        tau,
        verdict: Verdict::Fails,
        witnesses: vec![Witness {
            kind,
            y: to_sets(e, ys),
            j: None,
            x: Some(row_set(e, x)),
            partition: Some(parts.iter().map(|&p| row_set(e, p)).collect()),
            slack: None,
        }],
    }
}

/// (C3): every product `Π_i det(B_{i,I_i,Y_i})` over `|X| > R − τ`,
/// `Σ|Y_i| = |X|` and ordered partitions of `X` vanishes.
pub fn check_c3(e: &Ensemble, tau: usize) -> Result<CheckOutcome, ConditionError> {
    check_tau(e, tau)?;
    check_size(e, MAX_ENUM_ROWS)?;
    let mut cache = DimCache::new(e);
    for x in big_row_sets(e, tau) {
        for ys in column_choices(&e.column_counts(), x.count_ones() as usize) {
            let hit = find_partition(&ys, x, &mut |i, part| cache.det_nonzero(i, part, ys[i]));
            if let Some(parts) = hit {
                return Ok(partition_violation(e, WitnessKind::C3Violation, Condition::C3, tau, x, &ys, &parts));
            }
        }
    }
    Ok(CheckOutcome {
        condition: Condition::C3,
        tau,
        verdict: Verdict::Holds,
        witnesses: Vec::new(),
    })
}

/// (C4): the sparse-subspace form of (C3), `Σ_i dim(S_{I_i^c} ∩ B_{i,*,Y_i}) > 0`
/// for every such partition.
pub fn check_c4(e: &Ensemble, tau: usize) -> Result<CheckOutcome, ConditionError> {
    check_tau(e, tau)?;
    check_size(e, MAX_ENUM_ROWS)?;
    let mut cache = DimCache::new(e);
    let all = full_mask(e.n());
    for x in big_row_sets(e, tau) {
        for ys in column_choices(&e.column_counts(), x.count_ones() as usize) {
            // a partition violates (C4) only if every block contributes dimension 0
            let hit = find_partition(&ys, x, &mut |i, part| cache.sparse_dim(i, ys[i], all & !part) == 0);
            if let Some(parts) = hit {
                return Ok(partition_violation(e, WitnessKind::C4Violation, Condition::C4, tau, x, &ys, &parts));
            }
        }
    }
    Ok(CheckOutcome {
        condition: Condition::C4,
        tau,
        verdict: Verdict::Holds,
        witnesses: Vec::new(),
    })
}

/// (C5): for every `|X| > R − τ` and `Σ|Y_i| = |X|` some `J ⊆ X` has
/// `Σ_i dim(S_{J ∪ X^c} ∩ B_{i,*,Y_i}) > |J|`.
pub fn check_c5(e: &Ensemble, tau: usize) -> Result<CheckOutcome, ConditionError> {
    check_tau(e, tau)?;
    check_size(e, MAX_ENUM_ROWS)?;
    let mut cache = DimCache::new(e);
    let all = full_mask(e.n());
    let mut witnesses = Vec::new();
    for x in big_row_sets(e, tau) {
        let outside = all & !x;
        let members: Vec<usize> = (0..e.n()).filter(|&r| x >> r & 1 == 1).collect();
        for ys in column_choices(&e.column_counts(), x.count_ones() as usize) {
            let found = lex_masks(&members).into_iter().find_map(|j| {
                let v = total_dim(&mut cache, &ys, j | outside) as i64 - i64::from(j.count_ones());
                (v > 0).then_some((j, v))
            });
            match found {
                Some((j, v)) => witnesses.push(Witness {
                    kind: WitnessKind::C5Witness,
                    y: to_sets(e, &ys),
                    j: Some(row_set(e, j)),
                    x: Some(row_set(e, x)),
                    partition: None,
                    slack: Some(v - 1),
                }),
                None => {
                    return Ok(CheckOutcome {
                        condition: Condition::C5,
                        tau,
                        verdict: Verdict::Fails,
                        witnesses: vec![Witness {
                            kind: WitnessKind::C5Counterexample,
                            y: to_sets(e, &ys),
                            j: None,
                            x: Some(row_set(e, x)),
                            partition: None,
                            slack: None,
                        }],
                    })
                }
            }
        }
    }
    Ok(CheckOutcome {
        condition: Condition::C5,
        tau,
        verdict: Verdict::Holds,
        witnesses,
    })
}

/// All five conditions at one τ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossReport {
    pub tau: usize,
    pub c1: C1Outcome,
    pub c2: CheckOutcome,
    pub c3: CheckOutcome,
    pub c4: CheckOutcome,
    pub c5: CheckOutcome,
    pub agreement: bool,
}

impl CrossReport {
    pub fn verdicts(&self) -> [bool; 5] {
        [
            self.c1.verdict.holds(),
            self.c2.holds(),
            self.c3.holds(),
            self.c4.holds(),
            self.c5.holds(),
        ]
    }

    pub fn summary(&self) -> String {
        let names = ["C1", "C2", "C3", "C4", "C5"];
        names
            .iter()
            .zip(self.verdicts())
            .map(|(n, h)| format!("{n}={}", if h { "holds" } else { "fails" }))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Runs (C1)–(C5) at τ and requires all five verdicts to coincide.
pub fn cross_validate(e: &Ensemble, tau: usize, cfg: &TrialConfig) -> Result<CrossReport, ConditionError> {
    let ranks = randrank::sampled_ranks(e, cfg);
    cross_validate_with_ranks(e, tau, cfg, &ranks)
}

/// As [`cross_validate`], reusing sampled ranks from an earlier run over the same seed.
pub fn cross_validate_with_ranks(
    e: &Ensemble,
    tau: usize,
    cfg: &TrialConfig,
    ranks: &[usize],
) -> Result<CrossReport, ConditionError> {
    check_tau(e, tau)?;
    let c1 = randrank::c1_from_ranks(e, tau, cfg, ranks);
    let c2 = check_c2(e, tau)?;
    let c3 = check_c3(e, tau)?;
    let c4 = check_c4(e, tau)?;
    let c5 = check_c5(e, tau)?;
    let mut report = CrossReport {
        tau,
        c1,
        c2,
        c3,
        c4,
        c5,
        agreement: true,
    };
    let v = report.verdicts();
    report.agreement = v.iter().all(|&h| h == v[0]);
    if report.agreement {
        Ok(report)
    } else {
        Err(ConditionError::EquivalenceViolation(Box::new(report)))
    }
}
