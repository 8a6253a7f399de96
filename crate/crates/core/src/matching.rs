//! Support bipartite graphs between rows and column vectors, maximum
//! matchings, and the Hall-type defect.

use serde::Serialize;
use thiserror::Error;

use crate::conditions::Ensemble;
use crate::exactla::{ExactMatrix, IndexSet, LinAlgError, Rational, MAX_UNIVERSE};

/// Right-side size up to which [`defect`] scans subsets directly.
pub const EXHAUSTIVE_DEFECT_LIMIT: usize = 16;
/// Right-side size limit of the exhaustive Hall scan.
pub const HALL_SCAN_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("column {column} has {len} entries, expected {expected}")]
    Shape { column: usize, len: usize, expected: usize },
    #[error("{0} rows exceed the supported maximum of {MAX_UNIVERSE}")]
    TooManyRows(usize),
    #[error("k = {k} is outside 0..={max}")]
    ThresholdOutOfRange { k: usize, max: usize },
    #[error("{size} right vertices exceed the exhaustive limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// Identifies a column vertex: block and column, both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ColumnTag {
    pub block: usize,
    pub column: usize,
}

/// Bipartite graph with row vertices `1..=n` on the left and one vertex per
/// column on the right; edges mark nonzero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportGraph {
    n_left: usize,
    right: Vec<ColumnTag>,
    adj: Vec<u64>,
}

impl SupportGraph {
    /// Graph from explicit adjacency masks (bit `r` set = edge to row `r + 1`).
    pub fn from_adjacency(n_left: usize, adj: Vec<u64>) -> Result<Self, MatchingError> {
        if n_left > MAX_UNIVERSE {
            return Err(MatchingError::TooManyRows(n_left));
        }
        let limit = if n_left == 64 { u64::MAX } else { (1u64 << n_left) - 1 };
        if let Some(c) = adj.iter().position(|&a| a & !limit != 0) {
            return Err(MatchingError::Shape {
                column: c + 1,
                len: 64 - adj[c].leading_zeros() as usize,
                expected: n_left,
            });
        }
        let right = (0..adj.len())
            .map(|c| ColumnTag { block: 1, column: c + 1 })
            .collect();
        Ok(SupportGraph { n_left, right, adj })
    }

    pub fn n_left(&self) -> usize {
        self.n_left
    }

    pub fn n_right(&self) -> usize {
        self.right.len()
    }

    pub fn tags(&self) -> &[ColumnTag] {
        &self.right
    }

    /// Rows adjacent to right vertex `c` (0-based).
    pub fn neighbors(&self, c: usize) -> IndexSet {
        IndexSet::from_mask(self.n_left, self.adj[c]).expect("adjacency within rows")
    }

    pub fn adjacency(&self) -> &[u64] {
        &self.adj
    }
}

/// Builds the support graph of tagged columns; every column must have length `n`.
pub fn build_support_graph(n: usize, columns: &[(ColumnTag, Vec<Rational>)]) -> Result<SupportGraph, MatchingError> {
    if n > MAX_UNIVERSE {
        return Err(MatchingError::TooManyRows(n));
    }
    let mut adj = Vec::with_capacity(columns.len());
    for (idx, (_, col)) in columns.iter().enumerate() {
        if col.len() != n {
            return Err(MatchingError::Shape {
                column: idx + 1,
                len: col.len(),
                expected: n,
            });
        }
        adj.push(
            col.iter()
                .enumerate()
                .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                .fold(0u64, |acc, (r, _)| acc | 1 << r),
        );
    }
    Ok(SupportGraph {
        n_left: n,
        right: columns.iter().map(|(t, _)| *t).collect(),
        adj,
    })
}

/// Support graph of every column of the given blocks, tagged by block order.
pub fn support_graph_of_blocks(blocks: &[ExactMatrix]) -> Result<SupportGraph, MatchingError> {
    let n = blocks.first().map_or(0, ExactMatrix::n_rows);
    let mut cols = Vec::new();
    for (b, m) in blocks.iter().enumerate() {
        for (c, col) in m.columns().into_iter().enumerate() {
            cols.push((ColumnTag { block: b + 1, column: c + 1 }, col));
        }
    }
    build_support_graph(n, &cols)
}

/// Maximum matching as `(right vertex, row)` pairs, by augmenting paths.
pub fn maximum_matching(g: &SupportGraph) -> Vec<(usize, usize)> {
    fn augment(g: &SupportGraph, c: usize, seen: &mut u64, owner: &mut [Option<usize>]) -> bool {
        let mut cand = g.adj[c] & !*seen;
        while cand != 0 {
            let r = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            *seen |= 1 << r;
            if owner[r].is_none_or(|o| augment(g, o, seen, owner)) {
                owner[r] = Some(c);
                return true;
            }
        }
        false
    }
    let mut owner = vec![None; g.n_left];
    for c in 0..g.n_right() {
        let mut seen = 0u64;
        augment(g, c, &mut seen, &mut owner);
    }
    let mut pairs: Vec<(usize, usize)> = owner
        .iter()
        .enumerate()
        .filter_map(|(r, o)| o.map(|c| (c, r)))
        .collect();
    pairs.sort_unstable();
    pairs
}

pub fn max_matching(g: &SupportGraph) -> usize {
    maximum_matching(g).len()
}

/// `max_{I ⊆ right} |I| − |N(I)|` by scanning every subset.
pub fn defect_exhaustive(g: &SupportGraph) -> Result<usize, MatchingError> {
    let size = g.n_right();
    if size > HALL_SCAN_LIMIT {
        return Err(MatchingError::TooLarge {
            size,
            limit: HALL_SCAN_LIMIT,
        });
    }
    Ok(neighborhood_sizes(g)
        .into_iter()
        .enumerate()
        .map(|(mask, nb)| (mask.count_ones() as usize).saturating_sub(nb))
        .max()
        .unwrap_or(0))
}

/// `|N(I)|` for every subset mask `I` of the right side.
fn neighborhood_sizes(g: &SupportGraph) -> Vec<usize> {
    let size = g.n_right();
    let mut nb = vec![0u64; 1 << size];
    for mask in 1..nb.len() {
        let low = mask.trailing_zeros() as usize;
        nb[mask] = nb[mask & (mask - 1)] | g.adj[low];
    }
    nb.into_iter().map(|m| m.count_ones() as usize).collect()
}

/// Hall defect; exhaustive for small right sides, otherwise `|right| − max_matching`.
pub fn defect(g: &SupportGraph) -> usize {
    if g.n_right() <= EXHAUSTIVE_DEFECT_LIMIT {
        defect_exhaustive(g).expect("within scan limit")
    } else {
        g.n_right() - max_matching(g)
    }
}

/// Whether `|N(I)| ≥ |I| − |right| + k` for every right subset `I`.
pub fn hall_threshold_check(g: &SupportGraph, k: usize) -> Result<bool, MatchingError> {
    let max = g.n_left.min(g.n_right());
    if k > max {
        return Err(MatchingError::ThresholdOutOfRange { k, max });
    }
    let size = g.n_right();
    if size > HALL_SCAN_LIMIT {
        return Err(MatchingError::TooLarge {
            size,
            limit: HALL_SCAN_LIMIT,
        });
    }
    Ok(neighborhood_sizes(g)
        .into_iter()
        .enumerate()
        .all(|(mask, nb)| nb + size >= mask.count_ones() as usize + k))
}

/// Basis of `colspan(b)` whose first columns span `S_J ∩ colspan(b)`, extended
/// greedily by the original columns in order.
pub fn adapted_basis(b: &ExactMatrix, j: &IndexSet) -> Result<ExactMatrix, MatchingError> {
    let mut basis = b.sparse_subspace_basis(j)?;
    let mut rank = basis.rank();
    for c in 0..b.n_cols() {
        let col = ExactMatrix::from_columns(b.n_rows(), &[b.column(c)])?;
        let grown = basis.hcat(&col)?;
        let r = grown.rank();
        if r > rank {
            basis = grown;
            rank = r;
        }
    }
    Ok(basis)
}

/// Support graph of the adapted bases of `B_{i,*,Y_i}` for a row set `J*`.
pub fn adapted_support_graph(e: &Ensemble, ys: &[IndexSet], j_star: &IndexSet) -> Result<SupportGraph, MatchingError> {
    let blocks = e
        .restrict(ys)
        .iter()
        .map(|b| adapted_basis(b, j_star))
        .collect::<Result<Vec<_>, _>>()?;
    support_graph_of_blocks(&blocks)
}
