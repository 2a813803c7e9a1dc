use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{BlockSequence, FiniteSet};

/// Which subset sizes count as admissible sums (or unions).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LengthSpec {
    AtMost(u32),
    Exactly(u32),
    ExplicitSet(Vec<u32>),
    /// Sums over exactly large subsets, `|S| = min(S) + 1`.
    ExactlyLarge,
    /// Every length from 1 to the bound. Same admissible lengths as
    /// `AtMost`; kept distinct so it round-trips through the text form.
    AllUpTo(u32),
}

impl LengthSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LengthSpec::AtMost(0) | LengthSpec::Exactly(0) | LengthSpec::AllUpTo(0) => {
                Err(Error::domain("lengths must be at least 1"))
            }
            LengthSpec::ExplicitSet(v) if v.is_empty() || v.contains(&0) => Err(Error::domain(
                "explicit length sets must be non-empty and positive",
            )),
            _ => Ok(()),
        }
    }

    /// Largest admissible length, or `None` when it depends on the ground set.
    pub fn max_len(&self) -> Option<usize> {
        match self {
            LengthSpec::AtMost(n) | LengthSpec::Exactly(n) | LengthSpec::AllUpTo(n) => {
                Some(*n as usize)
            }
            LengthSpec::ExplicitSet(v) => v.iter().max().map(|&n| n as usize),
            LengthSpec::ExactlyLarge => None,
        }
    }

    /// Whether a subset of `len` elements with least element `min` counts.
    pub fn admits(&self, len: usize, min: u64) -> bool {
        match self {
            LengthSpec::AtMost(n) | LengthSpec::AllUpTo(n) => len >= 1 && len <= *n as usize,
            LengthSpec::Exactly(n) => len == *n as usize,
            LengthSpec::ExplicitSet(v) => v.iter().any(|&n| n as usize == len),
            LengthSpec::ExactlyLarge => min.checked_add(1) == Some(len as u64),
        }
    }

    /// Fixed admissible lengths in increasing order (not for `ExactlyLarge`).
    pub(crate) fn fixed_lengths(&self) -> Vec<usize> {
        match self {
            LengthSpec::AtMost(n) | LengthSpec::AllUpTo(n) => (1..=*n as usize).collect(),
            LengthSpec::Exactly(n) => vec![*n as usize],
            LengthSpec::ExplicitSet(v) => {
                let s: BTreeSet<usize> = v.iter().map(|&n| n as usize).collect();
                s.into_iter().collect()
            }
            LengthSpec::ExactlyLarge => Vec::new(),
        }
    }
}

impl fmt::Display for LengthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthSpec::AtMost(n) => write!(f, "<={n}"),
            LengthSpec::Exactly(n) => write!(f, "={n}"),
            LengthSpec::ExplicitSet(v) => {
                let parts: Vec<String> = v.iter().map(u32::to_string).collect();
                write!(f, "{{{}}}", parts.join(","))
            }
            LengthSpec::ExactlyLarge => write!(f, "!w"),
            LengthSpec::AllUpTo(n) => write!(f, "all<={n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed length spec `{0}` (expected <=n, =n, {{a,b,..}}, !w or all<=n)")]
pub struct ParseLengthError(pub String);

impl FromStr for LengthSpec {
    type Err = ParseLengthError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = || ParseLengthError(s.to_string());
        let s = s.trim();
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| err());
        let spec = if s == "!w" {
            LengthSpec::ExactlyLarge
        } else if let Some(rest) = s.strip_prefix("all<=") {
            LengthSpec::AllUpTo(num(rest)?)
        } else if let Some(rest) = s.strip_prefix("<=") {
            LengthSpec::AtMost(num(rest)?)
        } else if let Some(rest) = s.strip_prefix('=') {
            LengthSpec::Exactly(num(rest)?)
        } else if let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            let v = inner
                .split(',')
                .map(num)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            LengthSpec::ExplicitSet(v)
        } else {
            return Err(err());
        };
        spec.validate().map_err(|_| err())?;
        Ok(spec)
    }
}

/// Advances `idx` to the next `idx.len()`-combination of `0..n` in
/// lexicographic order. Returns false once exhausted.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn visit_combinations<B>(
    offset: usize,
    n: usize,
    k: usize,
    prefix: &[usize],
    visit: &mut impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    if k > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut full = Vec::with_capacity(prefix.len() + k);
    loop {
        full.clear();
        full.extend_from_slice(prefix);
        full.extend(idx.iter().map(|i| i + offset));
        if let ControlFlow::Break(b) = visit(&full) {
            return Some(b);
        }
        if k == 0 || !next_combination(&mut idx, n) {
            return None;
        }
    }
}

/// Visits the index sets of every admissible subset of `ground` (sorted
/// ascending), stopping at the first `Break`. Fixed-length specs are visited
/// length by length, each length in lexicographic order; exactly large
/// subsets are visited by least index, then lexicographically.
pub fn visit_subsets<B>(
    ground: &[u64],
    spec: &LengthSpec,
    mut visit: impl FnMut(&[usize]) -> ControlFlow<B>,
) -> Option<B> {
    let n = ground.len();
    match spec {
        LengthSpec::ExactlyLarge => {
            for (i, &m) in ground.iter().enumerate() {
                let rest = n - i - 1;
                if m > rest as u64 {
                    continue;
                }
                if let Some(b) = visit_combinations(i + 1, rest, m as usize, &[i], &mut visit) {
                    return Some(b);
                }
            }
            None
        }
        _ => {
            for k in spec.fixed_lengths() {
                if k == 0 || k > n {
                    continue;
                }
                if let Some(b) = visit_combinations(0, n, k, &[], &mut visit) {
                    return Some(b);
                }
            }
            None
        }
    }
}

/// Sum of the selected elements, failing on 64-bit overflow.
pub fn checked_sum(values: &[u64], idx: &[usize]) -> Result<u64> {
    idx.iter()
        .try_fold(0u64, |acc, &i| acc.checked_add(values[i]))
        .ok_or_else(|| {
            let terms: Vec<u64> = idx.iter().map(|&i| values[i]).collect();
            Error::overflow(format!("sum of {terms:?}"))
        })
}

/// FS^{spec}(B), deduplicated.
pub fn enumerate_sums(ground: &FiniteSet, spec: &LengthSpec) -> Result<FiniteSet> {
    if ground.is_empty() {
        return Err(Error::domain("finite sums need a non-empty ground set"));
    }
    spec.validate()?;
    let values = ground.as_slice();
    let mut out = BTreeSet::new();
    let failed = visit_subsets(values, spec, |idx| match checked_sum(values, idx) {
        Ok(s) => {
            out.insert(s);
            ControlFlow::Continue(())
        }
        Err(e) => ControlFlow::Break(e),
    });
    match failed {
        Some(e) => Err(e),
        None => Ok(FiniteSet::from_sorted_unchecked(out.into_iter().collect())),
    }
}

/// All unions of admissible numbers of distinct blocks. Only `AtMost`,
/// `AllUpTo` and `Exactly` are supported.
pub fn enumerate_unions(blocks: &BlockSequence, spec: &LengthSpec) -> Result<Vec<FiniteSet>> {
    if blocks.is_empty() {
        return Err(Error::domain("finite unions need at least one block"));
    }
    if !matches!(
        spec,
        LengthSpec::AtMost(_) | LengthSpec::Exactly(_) | LengthSpec::AllUpTo(_)
    ) {
        return Err(Error::domain(format!(
            "unions are not defined for length spec {spec}"
        )));
    }
    spec.validate()?;
    let b = blocks.blocks();
    // Block minima stand in for the ground set; only lengths matter here.
    let mins: Vec<u64> = b.iter().map(|x| x.min().unwrap_or(0)).collect();
    let mut out = Vec::new();
    visit_subsets::<()>(&mins, spec, |idx| {
        // Unmeshed blocks: concatenation in index order stays sorted.
        let union: Vec<u64> = idx.iter().flat_map(|&i| b[i].iter().copied()).collect();
        out.push(FiniteSet::from_sorted_unchecked(union));
        ControlFlow::Continue(())
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> FiniteSet {
        FiniteSet::new(v.iter().copied())
    }

    /// Independent oracle: bitmask enumeration of every subset.
    fn brute_sums(ground: &[u64], spec: &LengthSpec) -> BTreeSet<u64> {
        let n = ground.len();
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<u64> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ground[i])
                .collect();
            if spec.admits(members.len(), members[0]) {
                out.insert(members.iter().sum());
            }
        }
        out
    }

    #[test]
    fn sum_examples() {
        assert_eq!(
            enumerate_sums(&set(&[1, 4, 16]), &LengthSpec::AtMost(2)).unwrap(),
            set(&[1, 4, 5, 16, 17, 20])
        );
        assert_eq!(
            enumerate_sums(&set(&[1, 2, 4]), &LengthSpec::Exactly(2)).unwrap(),
            set(&[3, 5, 6])
        );
    }

    #[test]
    fn exactly_large_sums_match_bitmask_oracle() {
        // Oracle: exactly large subsets of {1,2,8} are {1,2} and {1,8}; {1,2,8}
        // has min 1 and size 3, so it is not exactly large.
        let oracle = brute_sums(&[1, 2, 8], &LengthSpec::ExactlyLarge);
        assert_eq!(oracle, BTreeSet::from([3, 9]));
        assert_eq!(
            enumerate_sums(&set(&[1, 2, 8]), &LengthSpec::ExactlyLarge).unwrap(),
            set(&[3, 9])
        );
        let ground = [1, 2, 3, 5, 8, 13, 21];
        assert_eq!(
            enumerate_sums(&set(&ground), &LengthSpec::ExactlyLarge)
                .unwrap()
                .into_vec(),
            brute_sums(&ground, &LengthSpec::ExactlyLarge)
                .into_iter()
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn sums_match_oracle_for_every_fixed_spec() {
        let ground = [1, 3, 4, 9, 10, 30];
        let specs = [
            LengthSpec::AtMost(3),
            LengthSpec::Exactly(4),
            LengthSpec::ExplicitSet(vec![1, 5]),
            LengthSpec::AllUpTo(6),
            LengthSpec::Exactly(7),
        ];
        for spec in specs {
            let got = enumerate_sums(&set(&ground), &spec).unwrap().into_vec();
            let want: Vec<u64> = brute_sums(&ground, &spec).into_iter().collect();
            assert_eq!(got, want, "{spec}");
        }
    }

    #[test]
    fn sums_report_overflow() {
        let r = enumerate_sums(&set(&[u64::MAX - 1, 5]), &LengthSpec::AtMost(2));
        assert!(matches!(r, Err(Error::Overflow(_))));
        assert!(enumerate_sums(&set(&[]), &LengthSpec::AtMost(2)).is_err());
    }

    #[test]
    fn union_examples() {
        let b = BlockSequence::new(vec![set(&[1]), set(&[3, 4])]).unwrap();
        assert_eq!(
            enumerate_unions(&b, &LengthSpec::Exactly(2)).unwrap(),
            vec![set(&[1, 3, 4])]
        );
        let b = BlockSequence::new(vec![set(&[1]), set(&[3])]).unwrap();
        assert_eq!(
            enumerate_unions(&b, &LengthSpec::AtMost(2)).unwrap(),
            vec![set(&[1]), set(&[3]), set(&[1, 3])]
        );
        let b = BlockSequence::new(vec![set(&[0, 1]), set(&[5]), set(&[7, 9])]).unwrap();
        assert_eq!(
            enumerate_unions(&b, &LengthSpec::Exactly(2)).unwrap(),
            vec![set(&[0, 1, 5]), set(&[0, 1, 7, 9]), set(&[5, 7, 9])]
        );
        assert!(enumerate_unions(&b, &LengthSpec::ExactlyLarge).is_err());
    }

    #[test]
    fn length_spec_text_form() {
        for s in ["<=2", "=3", "{1,3}", "!w", "all<=4"] {
            assert_eq!(s.parse::<LengthSpec>().unwrap().to_string(), s);
        }
        for bad in ["", "<=", "=0", "{}", "{1,x}", "<2", "!x"] {
            assert!(bad.parse::<LengthSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn combinations_are_lexicographic_and_complete() {
        let mut idx = vec![0, 1];
        let mut seen = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            seen.push(idx.clone());
        }
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }
}
