//! Topological interference management: conflict graphs, half-rate and
//! exclusive-alignment scheme synthesis, and decodability checks.

mod decode;
mod normalize;
mod structure;
mod synth;
mod topology;

use serde::Serialize;
use thiserror::Error;

pub use decode::{minimal_fully_occupied, verify_decodability, DecodabilityReport, ReceiverVerdict};
pub use normalize::normalize_alignment;
pub use structure::{half_dof_structure_check, EdgeCheck, PairCheck, StructureReport};
pub use synth::{
    half_dof_feasible, ldof_sym, structurally_decodable, synth_exclusive_scheme, synth_exclusive_scheme_at,
    synth_exclusive_scheme_with, synth_half_dof_scheme, synth_half_dof_scheme_with, ActivationPolicy,
    ExclusiveDesign, GenericEntries,
};
pub use topology::{
    check_p1_p2, chromatic_number, color_masks, is_bipartite, reduced_conflict_graph, regular_conflict_graph,
    two_coloring, Bipartition, ConflictGraph, Flavor, PropertyReport, PropertyViolation, Topology,
    MAX_COLORING_VERTICES,
};

use crate::exactla::{ExactMatrix, IndexSet, LinAlgError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimError {
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Per-user beamformers over `n` slots; beamformer `i` is `n × m_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    n: usize,
    beamformers: Vec<ExactMatrix>,
}

impl Scheme {
    pub fn new(n: usize, beamformers: Vec<ExactMatrix>) -> Result<Self, TimError> {
        for (i, b) in beamformers.iter().enumerate() {
            if b.n_rows() != n {
                return Err(TimError::Shape(format!(
                    "beamformer {} has {} rows, expected {n}",
                    i + 1,
                    b.n_rows()
                )));
            }
            if b.n_cols() == 0 || b.n_cols() > n {
                return Err(TimError::Shape(format!(
                    "beamformer {} has {} columns, expected 1..={n}",
                    i + 1,
                    b.n_cols()
                )));
            }
            if !b.has_full_column_rank() {
                return Err(TimError::Shape(format!("beamformer {} is rank deficient", i + 1)));
            }
        }
        Ok(Scheme { n, beamformers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.beamformers.len()
    }

    pub fn beamformers(&self) -> &[ExactMatrix] {
        &self.beamformers
    }

    pub fn beamformer(&self, i: usize) -> &ExactMatrix {
        &self.beamformers[i]
    }

    pub fn m(&self, i: usize) -> usize {
        self.beamformers[i].n_cols()
    }

    /// Common `m` when every user sends the same number of streams.
    pub fn symmetric_m(&self) -> Option<usize> {
        let m = self.beamformers.first()?.n_cols();
        self.beamformers.iter().all(|b| b.n_cols() == m).then_some(m)
    }

    /// Slots (1-based) in which user `i` is active, i.e. rows where its beamformer is nonzero.
    pub fn active_slots(&self, i: usize) -> Vec<usize> {
        let b = &self.beamformers[i];
        (0..self.n)
            .filter(|&r| (0..b.n_cols()).any(|c| !num_traits::Zero::is_zero(b.get(r, c))))
            .map(|r| r + 1)
            .collect()
    }

    fn check_against(&self, t: &Topology) -> Result<(), TimError> {
        if self.k() != t.k() {
            return Err(TimError::Shape(format!(
                "scheme has {} beamformers for {} users",
                self.k(),
                t.k()
            )));
        }
        Ok(())
    }
}

/// Sparse row sets `J_r` for receivers with two interferers, all of size-`τ` intent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseAssignment {
    pub n: usize,
    pub tau: usize,
    /// Indexed by receiver; `None` for receivers without an alignment set.
    pub sets: Vec<Option<IndexSet>>,
}

impl SparseAssignment {
    pub fn empty(n: usize, tau: usize, k: usize) -> Self {
        SparseAssignment {
            n,
            tau,
            sets: vec![None; k],
        }
    }

    /// The assigned set of receiver `r`, or `∅`.
    pub fn set_or_empty(&self, r: usize) -> IndexSet {
        self.sets[r].unwrap_or_else(|| IndexSet::empty(self.n))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn t6() -> Topology {
        Topology::from_lists(&[vec![6], vec![6], vec![6], vec![2, 5], vec![3, 4], vec![1]]).unwrap()
    }

    pub fn t9a() -> Topology {
        let mut l = vec![vec![2, 4], vec![3, 5], vec![1, 6]];
        l.resize(9, vec![]);
        Topology::from_lists(&l).unwrap()
    }
}
