use std::fmt;

use serde::{Deserialize, Serialize};

use super::LinAlgError;

/// Largest universe an [`IndexSet`] can describe.
pub const MAX_UNIVERSE: usize = 64;

/// A subset of `[universe]`, stored as a bitmask.
///
/// Internally members are 0-based; everything that crosses a file or report
/// boundary goes through the 1-based accessors.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSet {
    universe: usize,
    bits: u64,
}

fn universe_mask(universe: usize) -> u64 {
    if universe >= 64 {
        u64::MAX
    } else {
        (1u64 << universe) - 1
    }
}

impl IndexSet {
    pub fn empty(universe: usize) -> Self {
        assert!(universe <= MAX_UNIVERSE, "universe {universe} exceeds {MAX_UNIVERSE}");
        IndexSet { universe, bits: 0 }
    }

    pub fn full(universe: usize) -> Self {
        assert!(universe <= MAX_UNIVERSE, "universe {universe} exceeds {MAX_UNIVERSE}");
        IndexSet {
            universe,
            bits: universe_mask(universe),
        }
    }

    /// Builds a set from a raw mask; bits outside the universe are an error.
    pub fn from_mask(universe: usize, bits: u64) -> Result<Self, LinAlgError> {
        if universe > MAX_UNIVERSE {
            return Err(LinAlgError::UniverseTooLarge(universe));
        }
        if bits & !universe_mask(universe) != 0 {
            return Err(LinAlgError::IndexOutOfRange {
                index: 64 - bits.leading_zeros() as usize,
                bound: universe,
            });
        }
        Ok(IndexSet { universe, bits })
    }

    /// Builds a set from 0-based indices.
    pub fn from_zero_based<I: IntoIterator<Item = usize>>(
        universe: usize,
        members: I,
    ) -> Result<Self, LinAlgError> {
        if universe > MAX_UNIVERSE {
            return Err(LinAlgError::UniverseTooLarge(universe));
        }
        let mut bits = 0u64;
        for i in members {
            if i >= universe {
                return Err(LinAlgError::IndexOutOfRange {
                    index: i + 1,
                    bound: universe,
                });
            }
            bits |= 1 << i;
        }
        Ok(IndexSet { universe, bits })
    }

    /// Builds a set from 1-based indices, the convention of every external format.
    pub fn from_one_based<I: IntoIterator<Item = usize>>(
        universe: usize,
        members: I,
    ) -> Result<Self, LinAlgError> {
        if universe > MAX_UNIVERSE {
            return Err(LinAlgError::UniverseTooLarge(universe));
        }
        let mut bits = 0u64;
        for i in members {
            if i == 0 || i > universe {
                return Err(LinAlgError::IndexOutOfRange { index: i, bound: universe });
            }
            bits |= 1 << (i - 1);
        }
        Ok(IndexSet { universe, bits })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn mask(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.bits >> i & 1 == 1
    }

    /// 0-based members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.universe).filter(move |&i| bits >> i & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    pub fn complement(&self) -> Self {
        IndexSet {
            universe: self.universe,
            bits: !self.bits & universe_mask(self.universe),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        IndexSet {
            universe: self.universe,
            bits: self.bits | other.bits,
        }
    }

    pub fn intersection(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        IndexSet {
            universe: self.universe,
            bits: self.bits & other.bits,
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.universe, other.universe);
        IndexSet {
            universe: self.universe,
            bits: self.bits & !other.bits,
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn with(&self, i: usize) -> Self {
        assert!(i < self.universe);
        IndexSet {
            universe: self.universe,
            bits: self.bits | 1 << i,
        }
    }

    pub fn without(&self, i: usize) -> Self {
        IndexSet {
            universe: self.universe,
            bits: self.bits & !(1u64 << i),
        }
    }

    /// All subsets of this set in canonical lexicographic order of their
    /// sorted member lists (prefixes first): ∅, {1}, {1,2}, {1,2,3}, …, {1,3}, ….
    pub fn subsets_lex(&self) -> Vec<IndexSet> {
        let members = self.to_vec();
        lex_masks(&members)
            .into_iter()
            .map(|bits| IndexSet {
                universe: self.universe,
                bits,
            })
            .collect()
    }

    /// Subsets of exactly `k` members, in lexicographic order.
    pub fn subsets_of_size(&self, k: usize) -> Vec<IndexSet> {
        let members = self.to_vec();
        let mut out = Vec::new();
        if k > members.len() {
            return out;
        }
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let bits = pick.iter().fold(0u64, |acc, &p| acc | 1 << members[p]);
            out.push(IndexSet {
                universe: self.universe,
                bits,
            });
            // advance to the next k-combination
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if pick[i] < members.len() - k + i {
                    pick[i] += 1;
                    for j in i + 1..k {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
}

/// Masks of all subsets of `members` (sorted, 0-based) in lexicographic order.
pub(crate) fn lex_masks(members: &[usize]) -> Vec<u64> {
    fn rec(members: &[usize], start: usize, cur: u64, out: &mut Vec<u64>) {
        out.push(cur);
        for p in start..members.len() {
            rec(members, p + 1, cur | 1 << members[p], out);
        }
    }
    let mut out = Vec::with_capacity(1 << members.len().min(20));
    rec(members, 0, 0, &mut out);
    out
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Serialized as the sorted 1-based member list; the universe is supplied by context.
impl Serialize for IndexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

/// Deserialized member lists carry no universe; callers re-validate with
/// [`IndexSet::from_one_based`] once the universe is known.
impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(d)?;
        let universe = members.iter().copied().max().unwrap_or(0);
        IndexSet::from_one_based(universe, members).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_order_is_prefix_first() {
        let s = IndexSet::full(3);
        let got: Vec<Vec<usize>> = s.subsets_lex().iter().map(|x| x.one_based()).collect();
        let want: Vec<Vec<usize>> = vec![
            vec![],
            vec![1],
            vec![1, 2],
            vec![1, 2, 3],
            vec![1, 3],
            vec![2],
            vec![2, 3],
            vec![3],
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn combinations_in_order() {
        let s = IndexSet::from_one_based(5, [1, 3, 4, 5]).unwrap();
        let got: Vec<Vec<usize>> = s.subsets_of_size(2).iter().map(|x| x.one_based()).collect();
        assert_eq!(
            got,
            vec![vec![1, 3], vec![1, 4], vec![1, 5], vec![3, 4], vec![3, 5], vec![4, 5]]
        );
        assert_eq!(s.subsets_of_size(0).len(), 1);
        assert!(s.subsets_of_size(5).is_empty());
    }

    #[test]
    fn one_based_bounds() {
        assert!(IndexSet::from_one_based(4, [0]).is_err());
        assert!(IndexSet::from_one_based(4, [5]).is_err());
        let s = IndexSet::from_one_based(4, [4, 1]).unwrap();
        assert_eq!(s.one_based(), vec![1, 4]);
        assert_eq!(s.complement().one_based(), vec![2, 3]);
        assert!(IndexSet::from_mask(3, 0b1000).is_err());
    }

    #[test]
    fn full_universe_of_64() {
        let s = IndexSet::full(64);
        assert_eq!(s.len(), 64);
        assert!(s.complement().is_empty());
    }
}
