use super::topology::{check_p1_p2, Topology};
use super::{Scheme, SparseAssignment, TimError};
use crate::exactla::{sparse_dim, ExactMatrix, IndexSet, Rational};

fn unit(n: usize, row: usize) -> Vec<Rational> {
    let mut v = vec![Rational::from_integer(0.into()); n];
    v[row] = Rational::from_integer(1.into());
    v
}

/// Appends each candidate that raises the rank of `cols`, stopping at `target` columns.
fn extend_independent(n: usize, cols: &mut Vec<Vec<Rational>>, candidates: Vec<Vec<Rational>>, target: usize) {
    let mut rank = if cols.is_empty() {
        0
    } else {
        ExactMatrix::from_columns(n, cols).expect("columns of length n").rank()
    };
    for c in candidates {
        if cols.len() >= target {
            break;
        }
        cols.push(c);
        let r = ExactMatrix::from_columns(n, cols).expect("columns of length n").rank();
        if r > rank {
            rank = r;
        } else {
            cols.pop();
        }
    }
}

/// Columns of `b` that complete a basis of `colspan(b)` modulo `v`.
fn complement_columns(n: usize, b: &ExactMatrix, v: &ExactMatrix) -> Vec<Vec<Rational>> {
    let mut cols = v.columns();
    let base = cols.len();
    extend_independent(n, &mut cols, b.columns(), b.n_cols());
    cols.split_off(base)
}

/// Rebuilds the beamformers of every alignment pair so that each pair spans
/// `S_{J_r}` exactly on a set of `τ` rows that no member's own set touches.
///
/// For a receiver `r` with `I_r = {r1, r2}`, `J'_r` drops from `J_r` the sets
/// of those members that are themselves alignment receivers, and the first `τ`
/// rows of `J'_r` become the new set. Each member keeps the dimension of its
/// sparse part inside `S_{J'_r}` but rotates it to contain the new `S_J`,
/// then keeps a complement of that part from its original columns.
pub fn normalize_alignment(
    t: &Topology,
    s: &Scheme,
    a: &SparseAssignment,
) -> Result<(Scheme, SparseAssignment), TimError> {
    s.check_against(t)?;
    if !check_p1_p2(t).holds() {
        return Err(TimError::Precondition("topology violates P1 or P2".into()));
    }
    let (n, tau) = (s.n(), a.tau);
    if a.n != n || a.sets.len() != t.k() {
        return Err(TimError::Shape(format!(
            "assignment over n = {} for {} users, scheme has n = {n} and {} users",
            a.n,
            a.sets.len(),
            t.k()
        )));
    }
    let receivers = t.alignment_receivers();
    for r in 0..t.k() {
        let aligned = receivers.contains(&r);
        match a.sets[r] {
            None if aligned => {
                return Err(TimError::Precondition(format!("receiver {} has no sparse set", r + 1)));
            }
            Some(_) if !aligned => {
                return Err(TimError::Precondition(format!(
                    "receiver {} has a sparse set but not two interferers",
                    r + 1
                )));
            }
            Some(j) if j.universe() != n => {
                return Err(TimError::Shape(format!("set of receiver {} is not over [{n}]", r + 1)));
            }
            _ => {}
        }
    }
    for &r in &receivers {
        let j = a.sets[r].expect("checked above");
        let occ: usize = t
            .interferers(r)
            .iter()
            .map(|i| sparse_dim(s.beamformer(i), &j))
            .sum::<Result<_, _>>()?;
        if occ < j.len() + tau {
            return Err(TimError::Precondition(format!(
                "receiver {}: occupancy {occ} below |J| + tau = {}",
                r + 1,
                j.len() + tau
            )));
        }
        let own = sparse_dim(s.beamformer(r), &j)?;
        if own != 0 {
            return Err(TimError::Precondition(format!(
                "receiver {}: own beamformer meets S_J in {own} dimensions",
                r + 1
            )));
        }
    }

    let mut beamformers: Vec<ExactMatrix> = s.beamformers().to_vec();
    let mut new_sets = vec![None; t.k()];
    for &r in &receivers {
        let mut reduced = a.sets[r].expect("checked above");
        for i in t.interferers(r).iter() {
            if let Some(ji) = a.sets[i] {
                reduced = reduced.difference(&ji);
            }
        }
        let occ: usize = t
            .interferers(r)
            .iter()
            .map(|i| sparse_dim(s.beamformer(i), &reduced))
            .sum::<Result<_, _>>()?;
        if occ < reduced.len() + tau {
            return Err(TimError::Precondition(format!(
                "receiver {}: occupancy {occ} of the reduced set {reduced} is below |J'| + tau = {}",
                r + 1,
                reduced.len() + tau
            )));
        }
        let j_new = IndexSet::from_zero_based(n, reduced.iter().take(tau))?;
        for i in t.interferers(r).iter() {
            let b = s.beamformer(i);
            let v = b.sparse_subspace_basis(&reduced)?;
            let mut cols: Vec<Vec<Rational>> = j_new.iter().map(|row| unit(n, row)).collect();
            extend_independent(n, &mut cols, v.columns(), v.n_cols());
            if cols.len() != v.n_cols() {
                return Err(TimError::Internal(format!(
                    "user {}: rotated sparse part has {} columns, expected {}",
                    i + 1,
                    cols.len(),
                    v.n_cols()
                )));
            }
            cols.extend(complement_columns(n, b, &v));
            beamformers[i] = ExactMatrix::from_columns(n, &cols)?;
        }
        new_sets[r] = Some(j_new);
    }

    let scheme = Scheme::new(n, beamformers).map_err(|e| TimError::Internal(e.to_string()))?;
    for &r in &receivers {
        let j = new_sets[r].expect("assigned above");
        let aligned = t
            .interferers(r)
            .iter()
            .map(|i| sparse_dim(scheme.beamformer(i), &j))
            .collect::<Result<Vec<_>, _>>()?;
        if j.len() != tau || aligned.iter().any(|&d| d != tau) || sparse_dim(scheme.beamformer(r), &j)? != 0 {
            return Err(TimError::Internal(format!(
                "receiver {}: normalized set {j} violates the alignment postcondition",
                r + 1
            )));
        }
    }
    Ok((
        scheme,
        SparseAssignment {
            n,
            tau,
            sets: new_sets,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::t9a;
    use super::super::synth_exclusive_scheme;
    use super::*;
    use crate::exactla::{intersect_dim, rat};

    fn profile(s: &Scheme, sets: &SparseAssignment) -> Vec<usize> {
        let mut out = Vec::new();
        for b in s.beamformers() {
            for j in sets.sets.iter().flatten() {
                out.push(sparse_dim(b, j).unwrap());
            }
        }
        out
    }

    #[test]
    fn exclusive_output_is_a_fixed_point() {
        let t = t9a();
        let d = synth_exclusive_scheme(&t).unwrap();
        let (s, a) = normalize_alignment(&t, &d.scheme, &d.assignment).unwrap();
        assert_eq!(a, d.assignment);
        assert_eq!(profile(&s, &a), profile(&d.scheme, &d.assignment));
        for i in 0..t.k() {
            assert_eq!(intersect_dim(s.beamformer(i), d.scheme.beamformer(i)).unwrap(), d.m);
        }
    }

    fn column(n: usize, entries: &[(usize, i64)]) -> Vec<Rational> {
        let mut v = vec![rat(0); n];
        for &(r, x) in entries {
            v[r - 1] = rat(x);
        }
        v
    }

    fn generic(n: usize, seed: i64) -> Vec<Rational> {
        (0..n as i64).map(|r| rat(seed * 7 + r * r + 1)).collect()
    }

    #[test]
    fn oversized_set_shrinks_to_tau() {
        let t = t9a();
        let n = 9;
        let d = synth_exclusive_scheme(&t).unwrap();
        let mut bs: Vec<ExactMatrix> = d.scheme.beamformers().to_vec();
        bs[3] = ExactMatrix::from_columns(
            n,
            &[column(n, &[(1, 1), (2, 1)]), column(n, &[(2, 1), (3, 1)]), generic(n, 1), generic(n, 2)],
        )
        .unwrap();
        let s = Scheme::new(n, bs).unwrap();
        let mut a = d.assignment.clone();
        a.tau = 2;
        let (out, na) = normalize_alignment(&t, &s, &a).unwrap();
        let j1 = na.sets[0].unwrap();
        assert_eq!(j1.one_based(), vec![1, 2]);
        assert_eq!(sparse_dim(out.beamformer(3), &j1).unwrap(), 2);
        assert_eq!(sparse_dim(out.beamformer(1), &j1).unwrap(), 2);
        assert_eq!(sparse_dim(out.beamformer(0), &j1).unwrap(), 0);
        assert_eq!(out.m(3), 4);
        // generic columns of user 4 survive
        assert_eq!(intersect_dim(out.beamformer(3), s.beamformer(3)).unwrap(), 3);
    }

    #[test]
    fn own_overlap_is_rejected() {
        let t = t9a();
        let d = synth_exclusive_scheme(&t).unwrap();
        let mut bs: Vec<ExactMatrix> = d.scheme.beamformers().to_vec();
        let mut cols = bs[0].columns();
        cols[3] = column(9, &[(1, 1)]);
        bs[0] = ExactMatrix::from_columns(9, &cols).unwrap();
        let s = Scheme::new(9, bs).unwrap();
        assert!(matches!(
            normalize_alignment(&t, &s, &d.assignment),
            Err(TimError::Precondition(m)) if m.contains("own beamformer")
        ));
    }
}
