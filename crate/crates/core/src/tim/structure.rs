use serde::Serialize;

use super::topology::{reduced_conflict_graph, Topology};
use super::{Scheme, TimError};
use crate::exactla::{intersection_basis, sparse_dim, ExactMatrix, IndexSet};

/// Largest `n` for which certified sets are searched.
const MAX_STRUCTURE_SLOTS: usize = 20;

/// Intersection-dimension check for two interferers aligned at one receiver.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCheck {
    pub receiver: usize,
    pub pair: (usize, usize),
    pub intersection_dim: usize,
    /// Smallest (then lexicographically first) `J̃` with `|J̃| ≥ n/2` whose
    /// sparse subspace meets the intersection in at least `n/2` dimensions.
    pub witness: Option<IndexSet>,
    pub ok: bool,
}

/// Non-overlap check along a reduced conflict edge `from → to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeCheck {
    pub from: usize,
    pub to: usize,
    /// `dim(S_{J_from} ∩ B_to)` when `J_from` is certified.
    pub overlap_dim: Option<usize>,
    /// `|J_from ∩ J_to|` when both sets are certified.
    pub shared_rows: Option<usize>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub pairs: Vec<PairCheck>,
    /// Per user: a half-size `J` with `S_J ⊆ B_u`, if any.
    pub certified: Vec<Option<IndexSet>>,
    /// Users with outgoing reduced edges that have no certified set.
    pub uncertified: Vec<usize>,
    pub edges: Vec<EdgeCheck>,
    pub violations: usize,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn first_sparse_witness(b: &ExactMatrix, n: usize, min_size: usize, need: usize) -> Result<Option<IndexSet>, TimError> {
    let full = IndexSet::full(n);
    for size in min_size..=n {
        for j in full.subsets_of_size(size) {
            if sparse_dim(b, &j)? >= need {
                return Ok(Some(j));
            }
        }
    }
    Ok(None)
}

fn certified_set(b: &ExactMatrix, h: usize) -> Result<Option<IndexSet>, TimError> {
    let full = IndexSet::full(b.n_rows());
    for j in full.subsets_of_size(h) {
        if sparse_dim(b, &j)? >= h {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Exact structural checks a half-rate scheme must pass: aligned pairs share
/// an `n/2`-dimensional sparse subspace, every user with an outgoing reduced
/// edge spans some `S_J` with `|J| = n/2`, and those sets stay out of the
/// beamformers they point to.
pub fn half_dof_structure_check(t: &Topology, s: &Scheme) -> Result<StructureReport, TimError> {
    s.check_against(t)?;
    let n = s.n();
    if n % 2 != 0 || (0..s.k()).any(|i| 2 * s.m(i) != n) {
        return Err(TimError::Precondition("structure check needs m_i = n/2 for every user".into()));
    }
    if n > MAX_STRUCTURE_SLOTS {
        return Err(TimError::Capacity(format!("n = {n} exceeds {MAX_STRUCTURE_SLOTS}")));
    }
    let h = n / 2;
    let mut violations = 0;

    let mut pairs = Vec::new();
    for r in 0..t.k() {
        let members: Vec<usize> = t.interferers(r).iter().collect();
        if members.len() < 2 {
            continue;
        }
        for (p, &a) in members.iter().enumerate() {
            for &b in &members[p + 1..] {
                let w = intersection_basis(s.beamformer(a), s.beamformer(b))?;
                let dim = w.n_cols();
                let witness = if dim >= h {
                    first_sparse_witness(&w, n, h, h)?
                } else {
                    None
                };
                let ok = witness.is_some();
                violations += usize::from(!ok);
                pairs.push(PairCheck {
                    receiver: r + 1,
                    pair: (a + 1, b + 1),
                    intersection_dim: dim,
                    witness,
                    ok,
                });
            }
        }
    }

    let g = reduced_conflict_graph(t);
    let certified = (0..t.k())
        .map(|u| certified_set(s.beamformer(u), h))
        .collect::<Result<Vec<_>, _>>()?;
    let uncertified: Vec<usize> = (0..t.k())
        .filter(|&u| g.has_outgoing(u) && certified[u].is_none())
        .map(|u| u + 1)
        .collect();
    violations += uncertified.len();

    let mut edges = Vec::new();
    for &(i, k) in g.edges() {
        let overlap_dim = certified[i]
            .map(|j| sparse_dim(s.beamformer(k), &j))
            .transpose()?;
        let shared_rows = match (certified[i], certified[k]) {
            (Some(a), Some(b)) => Some(a.intersection(&b).len()),
            _ => None,
        };
        let ok = overlap_dim == Some(0) && shared_rows.is_none_or(|c| c == 0);
        violations += usize::from(!ok);
        edges.push(EdgeCheck {
            from: i + 1,
            to: k + 1,
            overlap_dim,
            shared_rows,
            ok,
        });
    }

    Ok(StructureReport {
        n,
        pairs,
        certified,
        uncertified,
        edges,
        violations,
    })
}
