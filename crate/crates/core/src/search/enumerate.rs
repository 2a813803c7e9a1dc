use crate::error::{Error, Result};
use crate::numerics::LengthSpec;
use crate::principles::{window_args, Arity, Coloring};
use crate::search::engine::{dfs, Candidates, Objective, RawStatus};

/// Number of colorings of `points` points with at most `k` colors, counted
/// up to renaming colors: `Σ_{j ≤ k} S(points, j)`. Saturates at `u128::MAX`.
pub fn canonical_count(points: u64, k: u32) -> u128 {
    if points == 0 {
        return 1;
    }
    let k = k as usize;
    // Stirling numbers of the second kind, row by row.
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 0..points {
        for j in (1..=k).rev() {
            row[j] = row[j].saturating_mul(j as u128).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[1..].iter().fold(0u128, |a, &b| a.saturating_add(b))
}

/// Restricted growth strings of length `len` over `k` colors: the first
/// occurrences of the colors appear in increasing order.
pub struct RestrictedGrowth {
    k: u32,
    current: Option<Vec<u32>>,
}

impl RestrictedGrowth {
    pub fn new(len: usize, k: u32) -> Self {
        RestrictedGrowth {
            k,
            current: (k >= 1).then(|| vec![0; len]),
        }
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.clone()?;
        let a = self.current.as_mut().expect("checked above");
        let mut prefix_max = Vec::with_capacity(a.len());
        let mut m = 0;
        for &v in a.iter() {
            m = m.max(v);
            prefix_max.push(m);
        }
        let mut i = a.len();
        loop {
            if i <= 1 {
                self.current = None;
                break;
            }
            i -= 1;
            let limit = (prefix_max[i - 1] + 1).min(self.k - 1);
            if a[i] < limit {
                a[i] += 1;
                a[i + 1..].iter_mut().for_each(|v| *v = 0);
                break;
            }
        }
        Some(out)
    }
}

/// One table coloring per color-permutation orbit over the window
/// `lo..=hi`, each extended by `fallback` outside it.
pub fn enumerate_colorings(
    arity: Arity,
    k: u32,
    lo: u64,
    hi: u64,
    fallback: Option<Coloring>,
    max_count: u64,
) -> Result<impl Iterator<Item = Coloring>> {
    if k == 0 || hi < lo {
        return Err(Error::domain(format!(
            "cannot enumerate {k}-colorings of window {lo}..{hi}"
        )));
    }
    let points = window_args(arity, lo, hi).len();
    let count = canonical_count(points as u64, k);
    if count > u128::from(max_count) {
        return Err(Error::Budget(format!(
            "{count} canonical colorings of {points} points exceed the cap of {max_count}"
        )));
    }
    // Validate the window once; entries are then always well formed.
    Coloring::table(arity, k, lo, hi, vec![0; points], fallback.clone())?;
    Ok(RestrictedGrowth::new(points, k).map(move |entries| {
        Coloring::table(arity, k, lo, hi, entries, fallback.clone()).expect("window validated")
    }))
}

/// Least `N` such that every `k`-coloring of `1..=N` admits a `t`-apart set
/// of `target` members whose admissible sums all lie in `1..=N` and are
/// monochromatic. Tries `N = 1, 2, …, max_n`.
pub fn witness_number(
    spec: &LengthSpec,
    k: u32,
    target: usize,
    t: u32,
    max_n: u64,
    max_colorings: u64,
) -> Result<u64> {
    spec.validate()?;
    if t < 2 || k == 0 || target == 0 {
        return Err(Error::domain(
            "witness numbers need t >= 2, k >= 1 and a positive target",
        ));
    }
    for n in 1..=max_n {
        let mut max_exponent = 0;
        while u64::from(t)
            .checked_pow(max_exponent + 1)
            .is_some_and(|p| p <= n)
        {
            max_exponent += 1;
        }
        let cands = Candidates::Apart {
            base: t,
            max_exponent,
        };
        let mut all = true;
        for f in enumerate_colorings(Arity::Nat, k, 1, n, None, max_colorings)? {
            let obj = Objective::Sums {
                f: &f,
                spec,
                cap: Some(n),
            };
            let raw = dfs(obj, &cands, target, u64::MAX);
            if raw.status != RawStatus::Found {
                all = false;
                break;
            }
        }
        if all {
            return Ok(n);
        }
    }
    Err(Error::Budget(format!("no witness number up to {max_n}")))
}
