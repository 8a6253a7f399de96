use serde::Serialize;
use thiserror::Error;

use crate::exactla::{ExactMatrix, IndexSet, MAX_UNIVERSE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnsembleError {
    #[error("an ensemble needs at least one block")]
    NoBlocks,
    #[error("block {block} has {rows} rows, expected {expected}")]
    RowMismatch { block: usize, rows: usize, expected: usize },
    #[error("block {block} has no columns")]
    NoColumns { block: usize },
    #[error("block {block} is rank deficient (rank {rank} < {cols} columns)")]
    RankDeficient { block: usize, rank: usize, cols: usize },
    #[error("block {block} has {cols} columns, more than the {MAX_UNIVERSE} supported")]
    TooManyColumns { block: usize, cols: usize },
    #[error("{0} rows exceed the supported maximum of {MAX_UNIVERSE}")]
    TooManyRows(usize),
}

/// Blocks `B_1..B_K`, each `n × m_i` with full column rank. Block numbers in
/// errors are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ensemble {
    n: usize,
    #[serde(skip)]
    blocks: Vec<ExactMatrix>,
    r: usize,
}

impl Ensemble {
    pub fn new(blocks: Vec<ExactMatrix>) -> Result<Self, EnsembleError> {
        let n = blocks.first().ok_or(EnsembleError::NoBlocks)?.n_rows();
        if n > MAX_UNIVERSE {
            return Err(EnsembleError::TooManyRows(n));
        }
        for (i, b) in blocks.iter().enumerate() {
            let block = i + 1;
            if b.n_rows() != n {
                return Err(EnsembleError::RowMismatch {
                    block,
                    rows: b.n_rows(),
                    expected: n,
                });
            }
            if b.n_cols() == 0 {
                return Err(EnsembleError::NoColumns { block });
            }
            if b.n_cols() > MAX_UNIVERSE {
                return Err(EnsembleError::TooManyColumns { block, cols: b.n_cols() });
            }
            let rank = b.rank();
            if rank < b.n_cols() {
                return Err(EnsembleError::RankDeficient {
                    block,
                    rank,
                    cols: b.n_cols(),
                });
            }
        }
        let total: usize = blocks.iter().map(ExactMatrix::n_cols).sum();
        Ok(Ensemble {
            n,
            r: total.min(n),
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// `R = min(Σ m_i, n)`.
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[ExactMatrix] {
        &self.blocks
    }

    /// Block `i`, 0-based.
    pub fn block(&self, i: usize) -> &ExactMatrix {
        &self.blocks[i]
    }

    pub fn m(&self, i: usize) -> usize {
        self.blocks[i].n_cols()
    }

    pub fn column_counts(&self) -> Vec<usize> {
        self.blocks.iter().map(ExactMatrix::n_cols).collect()
    }

    pub fn total_columns(&self) -> usize {
        self.blocks.iter().map(ExactMatrix::n_cols).sum()
    }

    pub fn rows(&self) -> IndexSet {
        IndexSet::full(self.n)
    }

    /// `B_{i,*,Y_i}` for every block.
    pub fn restrict(&self, ys: &[IndexSet]) -> Vec<ExactMatrix> {
        self.blocks
            .iter()
            .zip(ys)
            .map(|(b, y)| b.select_columns(y).expect("column set matches block width"))
            .collect()
    }

    /// Same ensemble with every block's rows permuted: new row `r` is old row `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let rows: Vec<Vec<_>> = perm
                    .iter()
                    .map(|&p| (0..b.n_cols()).map(|c| b.get(p, c).clone()).collect())
                    .collect();
                ExactMatrix::from_rows(&rows).expect("permutation keeps shape")
            })
            .collect();
        Ensemble::new(blocks).expect("row permutation keeps column rank")
    }
}
