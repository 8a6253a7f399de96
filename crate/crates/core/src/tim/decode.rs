use serde::Serialize;

use super::topology::Topology;
use super::{Scheme, TimError};
use crate::conditions::{Ensemble, MAX_ENUM_ROWS};
use crate::exactla::{sparse_dim, sparse_subspace, ExactMatrix, IndexSet};
use crate::randrank::{scaled_concat, TrialConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReceiverVerdict {
    /// 1-based receiver.
    pub receiver: usize,
    pub desired_streams: usize,
    /// Interference rank at each trial.
    pub interference_ranks: Vec<usize>,
    /// Rank of desired plus interference at each trial.
    pub joint_ranks: Vec<usize>,
    pub decodable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodabilityReport {
    pub trials: u32,
    pub receivers: Vec<ReceiverVerdict>,
    pub all_decodable: bool,
}

impl DecodabilityReport {
    /// 1-based receivers that failed at some trial.
    pub fn failing(&self) -> Vec<usize> {
        self.receivers.iter().filter(|r| !r.decodable).map(|r| r.receiver).collect()
    }
}

/// Samples link diagonals and checks, at every receiver and trial, that the
/// desired streams stay independent of the interference subspace.
///
/// Trial `t` draws from `cfg.rng(t)`; receivers are visited in order and each
/// draws its desired link first, then its interferers in increasing order.
pub fn verify_decodability(t: &Topology, s: &Scheme, cfg: &TrialConfig) -> Result<DecodabilityReport, TimError> {
    s.check_against(t)?;
    let n = s.n();
    let mut receivers: Vec<ReceiverVerdict> = (0..t.k())
        .map(|j| ReceiverVerdict {
            receiver: j + 1,
            desired_streams: s.m(j),
            interference_ranks: Vec::with_capacity(cfg.trials() as usize),
            joint_ranks: Vec::with_capacity(cfg.trials() as usize),
            decodable: true,
        })
        .collect();
    for trial in 0..cfg.trials() {
        let mut rng = cfg.rng(trial);
        for (j, verdict) in receivers.iter_mut().enumerate() {
            let interferers: Vec<usize> = t.interferers(j).iter().collect();
            let diag = cfg.draw_diagonals(&mut rng, n, 1 + interferers.len());
            let interf_blocks: Vec<ExactMatrix> = interferers.iter().map(|&i| s.beamformer(i).clone()).collect();
            let interf_rank = if interf_blocks.is_empty() {
                0
            } else {
                scaled_concat(&interf_blocks, &diag[1..]).rank()
            };
            let mut all = vec![s.beamformer(j).clone()];
            all.extend(interf_blocks);
            let joint = scaled_concat(&all, &diag).rank();
            verdict.decodable &= joint == s.m(j) + interf_rank;
            verdict.interference_ranks.push(interf_rank);
            verdict.joint_ranks.push(joint);
        }
    }
    let all_decodable = receivers.iter().all(|r| r.decodable);
    Ok(DecodabilityReport {
        trials: cfg.trials(),
        receivers,
        all_decodable,
    })
}

fn occupancy(blocks: &[ExactMatrix], j: &IndexSet) -> Result<usize, TimError> {
    blocks
        .iter()
        .map(|b| sparse_dim(b, j).map_err(TimError::from))
        .sum()
}

/// Whether `S_J` lies in the column span of the scaled ensemble at every
/// sample point, for a minimal `J` whose sparse subspace is occupied by at
/// least `|J| + x` dimensions of the selected columns.
pub fn minimal_fully_occupied(
    e: &Ensemble,
    ys: &[IndexSet],
    j: &IndexSet,
    x: usize,
    cfg: &TrialConfig,
) -> Result<bool, TimError> {
    if ys.len() != e.k() {
        return Err(TimError::Shape(format!("{} column sets for {} blocks", ys.len(), e.k())));
    }
    for (i, y) in ys.iter().enumerate() {
        if y.universe() != e.m(i) {
            return Err(TimError::Shape(format!(
                "column set {} is over [{}], block has {} columns",
                i + 1,
                y.universe(),
                e.m(i)
            )));
        }
    }
    if j.universe() != e.n() {
        return Err(TimError::Shape(format!("J is over [{}], expected [{}]", j.universe(), e.n())));
    }
    if j.is_empty() {
        return Ok(true);
    }
    let chosen: usize = ys.iter().map(IndexSet::len).sum();
    if chosen != e.r() {
        return Err(TimError::Precondition(format!(
            "column sets select {chosen} columns, expected {}",
            e.r()
        )));
    }
    let restricted = e.restrict(ys);
    let occ = occupancy(&restricted, j)?;
    if occ < j.len() + x {
        return Err(TimError::Precondition(format!(
            "occupancy {occ} of J is below |J| + x = {}",
            j.len() + x
        )));
    }
    if j.len() > MAX_ENUM_ROWS {
        return Err(TimError::Capacity(format!(
            "|J| = {} exceeds the minimality scan limit {MAX_ENUM_ROWS}",
            j.len()
        )));
    }
    for l in j.subsets_lex() {
        if l != *j && occupancy(&restricted, &l)? >= l.len() + x {
            return Err(TimError::Precondition(format!("J is not minimal: {l} also satisfies the bound")));
        }
    }
    let s_j = sparse_subspace(e.n(), j);
    for trial in 0..cfg.trials() {
        let mut rng = cfg.rng(trial);
        let diag = cfg.draw_diagonals(&mut rng, e.n(), e.k());
        let bd = scaled_concat(e.blocks(), &diag);
        let base = bd.rank();
        if bd.hcat(&s_j)?.rank() != base {
            return Ok(false);
        }
    }
    Ok(true)
}
