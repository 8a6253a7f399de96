use std::collections::HashMap;

use super::Ensemble;
use crate::exactla::IndexSet;

/// Dense tables are used while `2^(m_i + n)` stays at or below this many entries.
const DENSE_BITS: usize = 20;
const UNKNOWN: u8 = u8::MAX;

enum Table {
    Dense(Vec<u8>),
    Sparse(HashMap<(u64, u64), u8>),
}

impl Table {
    fn new(bits: usize) -> Self {
        if bits <= DENSE_BITS {
            Table::Dense(vec![UNKNOWN; 1 << bits])
        } else {
            Table::Sparse(HashMap::new())
        }
    }

    fn get_or(&mut self, n: usize, a: u64, b: u64, f: impl FnOnce() -> u8) -> u8 {
        match self {
            Table::Dense(v) => {
                let idx = (a << n | b) as usize;
                if v[idx] == UNKNOWN {
                    v[idx] = f();
                }
                v[idx]
            }
            Table::Sparse(m) => *m.entry((a, b)).or_insert_with(f),
        }
    }
}

/// Memoized per-block `sparse_dim(B_{i,*,Y}, J)` and `det(B_{i,I,Y}) ≠ 0`.
pub struct DimCache<'a> {
    e: &'a Ensemble,
    dims: Vec<Table>,
    dets: Vec<Table>,
}

impl<'a> DimCache<'a> {
    pub fn new(e: &'a Ensemble) -> Self {
        let bits = |i: usize| e.m(i) + e.n();
        DimCache {
            e,
            dims: (0..e.k()).map(|i| Table::new(bits(i))).collect(),
            dets: (0..e.k()).map(|i| Table::new(bits(i))).collect(),
        }
    }

    /// `dim(S_J ∩ colspan(B_{i,*,Y}))`; block index is 0-based, sets are masks.
    pub fn sparse_dim(&mut self, i: usize, y: u64, j: u64) -> usize {
        let e = self.e;
        let n = e.n();
        usize::from(self.dims[i].get_or(n, y, j, || {
            let ys = IndexSet::from_mask(e.m(i), y).expect("mask within block width");
            let outside = IndexSet::from_mask(n, j).expect("mask within rows").complement();
            // the chosen columns are independent, so rank(B_{*,Y}) = |Y|
            let rest = e.block(i).submatrix(&outside, &ys).expect("sets match block shape").rank();
            (ys.len() - rest) as u8
        }))
    }

    /// Whether `det(B_{i,I,Y})` is nonzero; `|I| = |Y|` is required.
    pub fn det_nonzero(&mut self, i: usize, rows: u64, y: u64) -> bool {
        let e = self.e;
        let n = e.n();
        self.dets[i].get_or(n, y, rows, || {
            let ys = IndexSet::from_mask(e.m(i), y).expect("mask within block width");
            let xs = IndexSet::from_mask(n, rows).expect("mask within rows");
            let d = e.block(i).submatrix(&xs, &ys).expect("sets match block shape").determinant();
            u8::from(!num_traits::Zero::is_zero(&d.expect("square selection")))
        }) == 1
    }
}
