use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{lam, mu};

/// A finite set of non-negative integers, stored sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteSet(Vec<u64>);

impl FiniteSet {
    pub fn new(elements: impl IntoIterator<Item = u64>) -> Self {
        let mut v: Vec<u64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet(v)
    }

    /// Accepts only strictly increasing input.
    pub fn from_sorted(elements: Vec<u64>) -> Result<Self> {
        if let Some(w) = elements.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "elements must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        Ok(FiniteSet(elements))
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteSet(elements)
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.0.iter()
    }

    pub fn is_subset_of(&self, other: &FiniteSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a u64;
    type IntoIter = std::slice::Iter<'a, u64>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Outcome of an apartness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Apartness {
    Apart,
    /// First adjacent pair `(x, x')` with `μ(x) >= λ(x')`.
    Violation(u64, u64),
}

impl Apartness {
    pub fn is_apart(self) -> bool {
        matches!(self, Apartness::Apart)
    }
}

/// Checks the `t`-apartness condition on a strictly increasing list of
/// positive integers. Apartness is decided on adjacent pairs only: the
/// exponent intervals are ordered, so adjacency implies the general case.
pub fn check_apart(members: &[u64], t: u32) -> Result<Apartness> {
    if t < 2 {
        return Err(Error::domain(format!("base must be at least 2, got {t}")));
    }
    if members.contains(&0) {
        return Err(Error::domain("apart sets contain positive integers only"));
    }
    if let Some(w) = members.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::domain(format!(
            "members must be strictly increasing, found {} before {}",
            w[0], w[1]
        )));
    }
    Ok(members
        .windows(2)
        .find(|w| mu(w[0], t) >= lam(w[1], t))
        .map_or(Apartness::Apart, |w| Apartness::Violation(w[0], w[1])))
}

/// A `t`-apart set: consecutive members have disjoint, ordered exponent
/// intervals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApartSet {
    base: u32,
    members: FiniteSet,
}

impl ApartSet {
    pub fn new(members: FiniteSet, base: u32) -> Result<Self> {
        match check_apart(members.as_slice(), base)? {
            Apartness::Apart => Ok(ApartSet { base, members }),
            Apartness::Violation(x, y) => Err(Error::domain(format!(
                "{x} and {y} violate {base}-apartness"
            ))),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn members(&self) -> &FiniteSet {
        &self.members
    }

    pub fn as_slice(&self) -> &[u64] {
        self.members.as_slice()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Finite sets `X_1, X_2, ...` with `max(X_i) < min(X_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockSequence {
    blocks: Vec<FiniteSet>,
}

impl BlockSequence {
    pub fn new(blocks: Vec<FiniteSet>) -> Result<Self> {
        if blocks.iter().any(FiniteSet::is_empty) {
            return Err(Error::domain("blocks must be non-empty"));
        }
        for w in blocks.windows(2) {
            if w[0].max() >= w[1].min() {
                return Err(Error::domain(format!(
                    "blocks {} and {} are meshed",
                    w[0], w[1]
                )));
            }
        }
        Ok(BlockSequence { blocks })
    }

    pub fn blocks(&self) -> &[FiniteSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// `|S| = min(S) + 1`.
pub fn is_exactly_large(set: &FiniteSet) -> Result<bool> {
    let min = set
        .min()
        .ok_or_else(|| Error::domain("the empty set is neither large nor small"))?;
    Ok(min.checked_add(1) == Some(set.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> FiniteSet {
        FiniteSet::new(v.iter().copied())
    }

    #[test]
    fn exactly_large_examples() {
        assert!(is_exactly_large(&set(&[1, 2])).unwrap());
        assert!(is_exactly_large(&set(&[2, 5, 9])).unwrap());
        assert!(!is_exactly_large(&set(&[3, 4])).unwrap());
        assert!(is_exactly_large(&set(&[0])).unwrap());
        assert!(is_exactly_large(&set(&[])).is_err());
    }

    #[test]
    fn apart_examples() {
        assert_eq!(check_apart(&[3, 12], 2).unwrap(), Apartness::Apart);
        assert_eq!(check_apart(&[3, 6], 2).unwrap(), Apartness::Violation(3, 6));
        assert_eq!(check_apart(&[2, 8, 32], 2).unwrap(), Apartness::Apart);
        assert_eq!(check_apart(&[1, 9], 3).unwrap(), Apartness::Apart);
        assert!(check_apart(&[4, 4], 2).is_err());
        assert!(check_apart(&[8, 4], 2).is_err());
        assert!(check_apart(&[0, 4], 2).is_err());
        assert!(check_apart(&[1, 4], 1).is_err());
    }

    #[test]
    fn apart_set_constructor_validates() {
        assert!(ApartSet::new(set(&[1, 4, 16]), 2).is_ok());
        assert!(ApartSet::new(set(&[3, 6]), 2).is_err());
    }

    #[test]
    fn block_sequence_validates() {
        assert!(BlockSequence::new(vec![set(&[1]), set(&[3, 4])]).is_ok());
        assert!(BlockSequence::new(vec![set(&[1, 5]), set(&[3, 4])]).is_err());
        assert!(BlockSequence::new(vec![set(&[1]), set(&[])]).is_err());
    }

    #[test]
    fn from_sorted_rejects_unsorted() {
        assert!(FiniteSet::from_sorted(vec![1, 1]).is_err());
        assert!(FiniteSet::from_sorted(vec![2, 1]).is_err());
        assert_eq!(FiniteSet::from_sorted(vec![0, 1]).unwrap(), set(&[1, 0]));
    }
}
