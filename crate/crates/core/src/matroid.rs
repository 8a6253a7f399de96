//! Matroids given by rank oracles: the scaled-row linear matroid of one block,
//! its dual, and unions.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::conditions::Ensemble;
use crate::exactla::{lex_masks, sparse_dim, ExactMatrix, IndexSet, LinAlgError};

/// Largest ground set accepted by [`verify_axioms`].
pub const MAX_AXIOM_GROUND: usize = 8;
/// Largest set scanned by [`union_rank`].
pub const MAX_UNION_GROUND: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatroidError {
    #[error("block {block}: {dim}-dimensional overlap between the chosen columns and S_(X^c)")]
    Precondition { block: usize, dim: usize },
    #[error("matroids do not share a ground set")]
    GroundMismatch,
    #[error("set {set} is not contained in the ground set {ground}")]
    NotInGround { set: IndexSet, ground: IndexSet },
    #[error("ground set of size {size} exceeds the exhaustive limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("expected {expected} column sets, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatroidLabel {
    ScaledLinear,
    Dual,
    Union,
    Custom,
}

type RankFn = Arc<dyn Fn(&IndexSet) -> usize + Send + Sync>;

/// A matroid on `ground` described only by its rank function.
#[derive(Clone)]
pub struct RankOracleMatroid {
    ground: IndexSet,
    rank_fn: RankFn,
    label: MatroidLabel,
}

impl fmt::Debug for RankOracleMatroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RankOracleMatroid")
            .field("ground", &self.ground)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

impl RankOracleMatroid {
    /// Wraps an arbitrary rank function; nothing is checked until [`verify_axioms`].
    pub fn custom<F>(ground: IndexSet, f: F) -> Self
    where
        F: Fn(&IndexSet) -> usize + Send + Sync + 'static,
    {
        Self::labelled(ground, MatroidLabel::Custom, f)
    }

    fn labelled<F>(ground: IndexSet, label: MatroidLabel, f: F) -> Self
    where
        F: Fn(&IndexSet) -> usize + Send + Sync + 'static,
    {
        RankOracleMatroid {
            ground,
            rank_fn: Arc::new(f),
            label,
        }
    }

    /// The free matroid: every subset independent.
    pub fn free(ground: IndexSet) -> Self {
        Self::custom(ground, |j| j.len())
    }

    /// Uniform matroid `U_{k,|ground|}`.
    pub fn uniform(ground: IndexSet, k: usize) -> Self {
        Self::custom(ground, move |j| j.len().min(k))
    }

    pub fn ground(&self) -> &IndexSet {
        &self.ground
    }

    pub fn label(&self) -> MatroidLabel {
        self.label
    }

    /// Rank of `j`, which must lie inside the ground set.
    pub fn rank(&self, j: &IndexSet) -> usize {
        debug_assert!(j.is_subset(&self.ground), "{j} outside {}", self.ground);
        (self.rank_fn)(j)
    }

    pub fn rank_checked(&self, j: &IndexSet) -> Result<usize, MatroidError> {
        self.contains(j)?;
        Ok(self.rank(j))
    }

    fn contains(&self, j: &IndexSet) -> Result<(), MatroidError> {
        if j.universe() != self.ground.universe() || !j.is_subset(&self.ground) {
            return Err(MatroidError::NotInGround {
                set: *j,
                ground: self.ground,
            });
        }
        Ok(())
    }

    pub fn is_independent(&self, j: &IndexSet) -> Result<bool, MatroidError> {
        Ok(self.rank_checked(j)? == j.len())
    }

    /// Ranks of every subset of the ground set, in canonical order.
    pub fn rank_table(&self) -> Vec<(IndexSet, usize)> {
        self.ground.subsets_lex().into_iter().map(|j| (j, self.rank(&j))).collect()
    }

    /// Same rank function, new label.
    fn relabel(mut self, label: MatroidLabel) -> Self {
        self.label = label;
        self
    }
}

/// `M_{X,Y}` for the columns `Y` of `b`: ground `X`, rank
/// `r(J) = |J| − dim(S_{J ∪ X^c} ∩ B_{*,Y})`.
///
/// Requires `dim(S_{X^c} ∩ B_{*,Y}) = 0`; a violation is reported against block 1.
pub fn scaled_linear_matroid(
    b: &ExactMatrix,
    x: &IndexSet,
    y: &IndexSet,
) -> Result<RankOracleMatroid, MatroidError> {
    scaled_linear_for_block(b, x, y, 1)
}

fn scaled_linear_for_block(
    b: &ExactMatrix,
    x: &IndexSet,
    y: &IndexSet,
    block: usize,
) -> Result<RankOracleMatroid, MatroidError> {
    let cols = b.select_columns(y)?;
    let outside = x.complement();
    let dim = sparse_dim(&cols, &outside)?;
    if dim > 0 {
        return Err(MatroidError::Precondition { block, dim });
    }
    Ok(RankOracleMatroid::labelled(*x, MatroidLabel::ScaledLinear, move |j| {
        let dim = sparse_dim(&cols, &j.union(&outside)).expect("row universe matches");
        j.len() - dim
    }))
}

/// Dual matroid: `r*(J) = |J| − r(ground) + r(ground \ J)`.
pub fn dual(m: &RankOracleMatroid) -> RankOracleMatroid {
    let ground = m.ground;
    let inner = m.clone();
    let full = m.rank(&ground);
    RankOracleMatroid::labelled(ground, MatroidLabel::Dual, move |j| {
        j.len() + inner.rank(&ground.difference(j)) - full
    })
}

/// Rank of `u` in the union of `ms`: `min_{T ⊆ U} |U \ T| + Σ_i r_i(T)`.
pub fn union_rank(ms: &[RankOracleMatroid], u: &IndexSet) -> Result<usize, MatroidError> {
    let ground = ms.first().map(|m| m.ground).ok_or(MatroidError::GroundMismatch)?;
    if ms.iter().any(|m| m.ground != ground) {
        return Err(MatroidError::GroundMismatch);
    }
    ms[0].contains(u)?;
    if u.len() > MAX_UNION_GROUND {
        return Err(MatroidError::TooLarge {
            size: u.len(),
            limit: MAX_UNION_GROUND,
        });
    }
    Ok(union_rank_unchecked(ms, u))
}

fn union_rank_unchecked(ms: &[RankOracleMatroid], u: &IndexSet) -> usize {
    let universe = u.universe();
    lex_masks(&u.to_vec())
        .into_iter()
        .map(|t| {
            let t = IndexSet::from_mask(universe, t).expect("subset of u");
            u.len() - t.len() + ms.iter().map(|m| m.rank(&t)).sum::<usize>()
        })
        .min()
        .expect("at least the empty set")
}

/// The union matroid as an oracle.
pub fn union_matroid(ms: &[RankOracleMatroid]) -> Result<RankOracleMatroid, MatroidError> {
    let ground = ms.first().map(|m| m.ground).ok_or(MatroidError::GroundMismatch)?;
    if ms.iter().any(|m| m.ground != ground) {
        return Err(MatroidError::GroundMismatch);
    }
    let parts = ms.to_vec();
    Ok(RankOracleMatroid::labelled(ground, MatroidLabel::Union, move |u| {
        union_rank_unchecked(&parts, u)
    }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum AxiomViolation {
    EmptyRank { rank: usize },
    RankExceedsSize { set: IndexSet, rank: usize },
    NotMonotone { smaller: IndexSet, larger: IndexSet },
    NotSubmodular { a: IndexSet, b: IndexSet },
    NotHereditary { independent: IndexSet, dependent_subset: IndexSet },
    NoExchange { smaller: IndexSet, larger: IndexSet },
    RankMismatch { set: IndexSet, rank: usize, enumerated: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub ground: IndexSet,
    pub independent_sets: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of the rank axioms, the independence axioms, and agreement
/// of the rank function with `max{|I| : I ⊆ J independent}`.
pub fn verify_axioms(m: &RankOracleMatroid) -> Result<AxiomReport, MatroidError> {
    let g = m.ground;
    if g.len() > MAX_AXIOM_GROUND {
        return Err(MatroidError::TooLarge {
            size: g.len(),
            limit: MAX_AXIOM_GROUND,
        });
    }
    let universe = g.universe();
    let set = |mask: u64| IndexSet::from_mask(universe, mask).expect("subset of ground");
    let subsets = lex_masks(&g.to_vec());
    let rank: std::collections::HashMap<u64, usize> =
        subsets.iter().map(|&s| (s, m.rank(&set(s)))).collect();
    let indep = |s: u64| rank[&s] == s.count_ones() as usize;
    let mut v = Vec::new();

    if rank[&0] != 0 {
        v.push(AxiomViolation::EmptyRank { rank: rank[&0] });
    }
    for &s in &subsets {
        if rank[&s] > s.count_ones() as usize {
            v.push(AxiomViolation::RankExceedsSize {
                set: set(s),
                rank: rank[&s],
            });
        }
        for e in g.iter().filter(|&e| s >> e & 1 == 0) {
            if rank[&(s | 1 << e)] < rank[&s] {
                v.push(AxiomViolation::NotMonotone {
                    smaller: set(s),
                    larger: set(s | 1 << e),
                });
            }
        }
    }
    for &a in &subsets {
        for &b in &subsets {
            if a < b && rank[&a] + rank[&b] < rank[&(a | b)] + rank[&(a & b)] {
                v.push(AxiomViolation::NotSubmodular { a: set(a), b: set(b) });
            }
        }
    }

    let independents: Vec<u64> = subsets.iter().copied().filter(|&s| indep(s)).collect();
    for &i in &independents {
        for e in g.iter().filter(|&e| i >> e & 1 == 1) {
            if !indep(i & !(1 << e)) {
                v.push(AxiomViolation::NotHereditary {
                    independent: set(i),
                    dependent_subset: set(i & !(1 << e)),
                });
            }
        }
    }
    for &small in &independents {
        for &large in &independents {
            if small.count_ones() >= large.count_ones() {
                continue;
            }
            let extra = large & !small;
            let ok = (0..64).filter(|&e| extra >> e & 1 == 1).any(|e| indep(small | 1 << e));
            if !ok {
                v.push(AxiomViolation::NoExchange {
                    smaller: set(small),
                    larger: set(large),
                });
            }
        }
    }
    for &s in &subsets {
        let enumerated = independents
            .iter()
            .filter(|&&i| i & !s == 0)
            .map(|i| i.count_ones() as usize)
            .max()
            .unwrap_or(0);
        if enumerated != rank[&s] {
            v.push(AxiomViolation::RankMismatch {
                set: set(s),
                rank: rank[&s],
                enumerated,
            });
        }
    }
    Ok(AxiomReport {
        ground: g,
        independent_sets: independents.len(),
        violations: v,
    })
}

/// The scaled-linear matroid of block `i` (0-based) of an ensemble.
pub fn block_matroid(
    e: &Ensemble,
    i: usize,
    x: &IndexSet,
    y: &IndexSet,
) -> Result<RankOracleMatroid, MatroidError> {
    scaled_linear_for_block(e.block(i), x, y, i + 1)
}

/// Whether the union of the duals of the blocks' matroids has rank below `|X|`.
pub fn union_deficiency(e: &Ensemble, x: &IndexSet, ys: &[IndexSet]) -> Result<bool, MatroidError> {
    if ys.len() != e.k() {
        return Err(MatroidError::Arity {
            expected: e.k(),
            got: ys.len(),
        });
    }
    let duals = (0..e.k())
        .map(|i| block_matroid(e, i, x, &ys[i]).map(|m| dual(&m)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(union_rank(&duals, x)? < x.len())
}

/// Copy of `m` whose label is [`MatroidLabel::Custom`]; handy for tests that
/// corrupt or wrap oracles.
pub fn as_custom(m: &RankOracleMatroid) -> RankOracleMatroid {
    m.clone().relabel(MatroidLabel::Custom)
}
