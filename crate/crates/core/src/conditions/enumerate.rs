//! Canonical enumeration orders shared by every condition check.

use std::cmp::Ordering;

/// Weak compositions `(c_1..c_K)` of `total` with `c_i ≤ caps[i]`, in lexicographic order.
pub(crate) fn compositions(caps: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn rec(caps: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = cur.len();
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room: usize = caps[i + 1..].iter().sum();
        let lo = left.saturating_sub(room);
        for c in lo..=caps[i].min(left) {
            cur.push(c);
            rec(caps, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(caps, total, &mut Vec::new(), &mut out);
    out
}

/// `k`-subsets of the bits of `within`, lexicographic by sorted members.
pub(crate) fn combos(within: u64, k: usize) -> Vec<u64> {
    let members: Vec<usize> = (0..64).filter(|&i| within >> i & 1 == 1).collect();
    let mut out = Vec::new();
    fn rec(members: &[usize], start: usize, k: usize, cur: u64, out: &mut Vec<u64>) {
        if k == 0 {
            out.push(cur);
            return;
        }
        for p in start..=members.len() - k {
            rec(members, p + 1, k - 1, cur | 1 << members[p], out);
        }
    }
    if k <= members.len() {
        rec(&members, 0, k, 0, &mut out);
    }
    out
}

/// Column choices `(Y_1..Y_K)` as per-block masks with `Σ|Y_i| = total`:
/// compositions in lexicographic order, then subsets lexicographically with
/// block 1 varying slowest.
pub(crate) fn column_choices(caps: &[usize], total: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for comp in compositions(caps, total) {
        let per_block: Vec<Vec<u64>> = comp
            .iter()
            .zip(caps)
            .map(|(&c, &m)| combos(full_mask(m), c))
            .collect();
        let mut cur = Vec::with_capacity(caps.len());
        product(&per_block, &mut cur, &mut out);
    }
    out
}

fn product(lists: &[Vec<u64>], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    let i = cur.len();
    if i == lists.len() {
        out.push(cur.clone());
        return;
    }
    for &v in &lists[i] {
        cur.push(v);
        product(lists, cur, out);
        cur.pop();
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Compares two sets by their sorted member lists (a proper prefix sorts first).
pub(crate) fn lex_cmp(a: u64, b: u64) -> Ordering {
    let (mut a, mut b) = (a, b);
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x.cmp(&y);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::lex_masks;

    #[test]
    fn compositions_lex_and_bounded() {
        assert_eq!(
            compositions(&[2, 1, 2], 3),
            vec![
                vec![0, 1, 2],
                vec![1, 0, 2],
                vec![1, 1, 1],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert!(compositions(&[1, 1], 3).is_empty());
        assert_eq!(compositions(&[3], 0), vec![vec![0]]);
    }

    #[test]
    fn combos_in_order() {
        assert_eq!(combos(0b1011, 2), vec![0b0011, 0b1001, 0b1010]);
        assert_eq!(combos(0b111, 0), vec![0]);
        assert!(combos(0b1, 2).is_empty());
    }

    #[test]
    fn choices_count() {
        // C(5, 3) ways to pick 3 of the 2+3 columns
        assert_eq!(column_choices(&[2, 3], 3).len(), 10);
        assert_eq!(column_choices(&[2, 3], 3)[0], vec![0, 0b111]);
    }

    #[test]
    fn lex_cmp_agrees_with_enumeration() {
        let order = lex_masks(&[0, 1, 2, 3]);
        for w in order.windows(2) {
            assert_eq!(lex_cmp(w[0], w[1]), Ordering::Less, "{:b} {:b}", w[0], w[1]);
        }
    }
}
