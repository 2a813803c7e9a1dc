use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{encode_set, lam, least_coefficient, mu, support_set, FiniteSet};
use crate::principles::Injection;

/// What a coloring colors: positive integers, increasing `n`-tuples over ℕ₀,
/// or non-empty finite subsets of ℕ₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    Nat,
    Tuple(u32),
    Set,
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Nat => write!(f, "nat"),
            Arity::Tuple(n) => write!(f, "tuple{n}"),
            Arity::Set => write!(f, "set"),
        }
    }
}

impl std::str::FromStr for Arity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nat" => Ok(Arity::Nat),
            "set" => Ok(Arity::Set),
            _ => s
                .strip_prefix("tuple")
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .map(Arity::Tuple)
                .ok_or_else(|| Error::domain(format!("unknown arity `{s}`"))),
        }
    }
}

/// Statistic of a sorted argument list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stat {
    Sum,
    Min,
    Max,
    Size,
    Span,
}

impl Stat {
    pub const ALL: [Stat; 5] = [Stat::Sum, Stat::Min, Stat::Max, Stat::Size, Stat::Span];

    pub fn name(self) -> &'static str {
        match self {
            Stat::Sum => "sum",
            Stat::Min => "min",
            Stat::Max => "max",
            Stat::Size => "size",
            Stat::Span => "span",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Stat::ALL.into_iter().find(|st| st.name() == s)
    }

    fn eval(self, args: &[u64]) -> Result<u64> {
        let first = args[0];
        let last = args[args.len() - 1];
        Ok(match self {
            Stat::Sum => args
                .iter()
                .try_fold(0u64, |a, &x| a.checked_add(x))
                .ok_or_else(|| Error::overflow(format!("sum of {args:?}")))?,
            Stat::Min => first,
            Stat::Max => last,
            Stat::Size => args.len() as u64,
            Stat::Span => last - first,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DigitKind {
    /// λ
    Least,
    /// μ
    Greatest,
    /// coefficient of the least term
    Coefficient,
}

impl DigitKind {
    pub fn name(self) -> &'static str {
        match self {
            DigitKind::Least => "least",
            DigitKind::Greatest => "greatest",
            DigitKind::Coefficient => "coef",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            DigitKind::Least,
            DigitKind::Greatest,
            DigitKind::Coefficient,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Closed catalog of total coloring rules. The last group are the images of
/// other colorings under the forward maps of the reductions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Constant(u32),
    /// `map[n mod modulus]`
    Mod {
        modulus: u64,
        map: Vec<u32>,
    },
    /// `map[stat(args) mod len]`
    Stat {
        stat: Stat,
        map: Vec<u32>,
    },
    /// `map[v mod len]` where `v` is λ, μ or the least coefficient in `base`.
    Digit {
        base: u32,
        kind: DigitKind,
        map: Vec<u32>,
    },
    /// `map[w mod len]` where `w` counts the non-zero digits in `base`.
    Weight {
        base: u32,
        map: Vec<u32>,
    },
    /// Parity of the number of important indices of `n` for the injection.
    ImportantParity(Injection),
    /// `m ↦ inner(exponent set of m in base)`
    Support {
        base: u32,
        inner: Box<Coloring>,
    },
    /// `S ↦ inner(Σ_{s∈S} base^s)`
    Encode {
        base: u32,
        inner: Box<Coloring>,
    },
    /// `n ↦ inner(n)` when the base-3 least coefficient is 1, `k + inner(n)` when it is 2.
    Doubling {
        inner: Box<Coloring>,
    },
    /// `(a_1, …) ↦ inner(a_1 + …)`
    SumOf {
        inner: Box<Coloring>,
    },
    /// `n ↦ 0` for powers of 2, otherwise `inner(λ(n), μ(n))`.
    LambdaMu {
        inner: Box<Coloring>,
    },
    /// `(x_1,x_2,x_3) ↦ ⟨inner(x_1), inner(x_1+x_2), inner(x_1+x_2+x_3)⟩` as a 3-bit number.
    PrefixSums {
        inner: Box<Coloring>,
    },
}

/// Explicit colors over a window `lo..=hi`, optionally extended by a fallback
/// coloring outside it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    pub lo: u64,
    pub hi: u64,
    pub colors: Vec<u32>,
    pub fallback: Option<Box<Coloring>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Body {
    Rule(Rule),
    Table(Table),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring {
    arity: Arity,
    colors: u32,
    body: Body,
}

/// Largest window accepted for set tables (2^20 - 1 entries).
pub const MAX_SET_WINDOW: u64 = 20;

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Canonical argument lists of a table window, in entry order.
pub fn window_args(arity: Arity, lo: u64, hi: u64) -> Vec<Vec<u64>> {
    match arity {
        Arity::Nat => (lo..=hi).map(|n| vec![n]).collect(),
        Arity::Tuple(n) => {
            let w = (hi - lo + 1) as usize;
            let n = n as usize;
            if n > w {
                return Vec::new();
            }
            let mut idx: Vec<usize> = (0..n).collect();
            let mut out = Vec::new();
            loop {
                out.push(idx.iter().map(|&i| lo + i as u64).collect());
                if !crate::numerics::next_combination(&mut idx, w) {
                    return out;
                }
            }
        }
        Arity::Set => {
            let w = hi - lo + 1;
            (1u64..(1 << w))
                .map(|mask| {
                    (0..w)
                        .filter(|b| mask >> b & 1 == 1)
                        .map(|b| lo + b)
                        .collect()
                })
                .collect()
        }
    }
}

fn window_size(arity: Arity, lo: u64, hi: u64) -> u64 {
    let w = hi - lo + 1;
    match arity {
        Arity::Nat => w,
        Arity::Tuple(n) => binomial(w, u64::from(n)),
        Arity::Set => (1u64 << w) - 1,
    }
}

fn check_map(map: &[u32], k: u32) -> Result<()> {
    if map.is_empty() {
        return Err(Error::domain("color maps must be non-empty"));
    }
    if let Some(c) = map.iter().find(|&&c| c >= k) {
        return Err(Error::domain(format!(
            "color {c} out of range for {k} colors"
        )));
    }
    Ok(())
}

impl Coloring {
    pub fn rule(arity: Arity, colors: u32, rule: Rule) -> Result<Self> {
        if colors == 0 {
            return Err(Error::domain("a coloring needs at least one color"));
        }
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "rule {what} does not fit arity {arity} with {colors} colors"
                )))
            }
        };
        match &rule {
            Rule::Constant(c) => need(*c < colors, "constant")?,
            Rule::Mod { modulus, map } => {
                need(
                    arity == Arity::Nat && *modulus >= 1 && map.len() as u64 == *modulus,
                    "mod",
                )?;
                check_map(map, colors)?;
            }
            Rule::Stat { map, .. } => check_map(map, colors)?,
            Rule::Digit { base, map, .. } | Rule::Weight { base, map } => {
                need(arity == Arity::Nat && *base >= 2, "digit")?;
                check_map(map, colors)?;
            }
            Rule::ImportantParity(f) => {
                need(arity == Arity::Nat && colors == 2, "important-parity")?;
                f.check_injective(64)?;
            }
            Rule::Support { base, inner } => need(
                arity == Arity::Nat
                    && *base >= 2
                    && inner.arity == Arity::Set
                    && inner.colors == colors,
                "support",
            )?,
            Rule::Encode { base, inner } => need(
                arity == Arity::Set
                    && *base >= 2
                    && inner.arity == Arity::Nat
                    && inner.colors == colors,
                "encode",
            )?,
            Rule::Doubling { inner } => need(
                arity == Arity::Nat && inner.arity == Arity::Nat && colors == 2 * inner.colors,
                "doubling",
            )?,
            Rule::SumOf { inner } => need(
                matches!(arity, Arity::Tuple(_) | Arity::Set)
                    && inner.arity == Arity::Nat
                    && inner.colors == colors,
                "sum-of",
            )?,
            Rule::LambdaMu { inner } => need(
                arity == Arity::Nat && inner.arity == Arity::Tuple(2) && inner.colors == colors,
                "lambda-mu",
            )?,
            Rule::PrefixSums { inner } => need(
                arity == Arity::Tuple(3)
                    && inner.arity == Arity::Nat
                    && inner.colors == 2
                    && colors == 8,
                "prefix-sums",
            )?,
        }
        Ok(Coloring {
            arity,
            colors,
            body: Body::Rule(rule),
        })
    }

    pub fn table(
        arity: Arity,
        colors: u32,
        lo: u64,
        hi: u64,
        entries: Vec<u32>,
        fallback: Option<Coloring>,
    ) -> Result<Self> {
        if colors == 0 {
            return Err(Error::domain("a coloring needs at least one color"));
        }
        if hi < lo {
            return Err(Error::domain(format!("empty window {lo}..{hi}")));
        }
        if arity == Arity::Nat && lo == 0 {
            return Err(Error::domain("nat tables start at 1"));
        }
        if arity == Arity::Set && hi - lo + 1 > MAX_SET_WINDOW {
            return Err(Error::domain(format!(
                "set windows are limited to {MAX_SET_WINDOW} points"
            )));
        }
        let expected = window_size(arity, lo, hi);
        if entries.len() as u64 != expected {
            return Err(Error::domain(format!(
                "window {lo}..{hi} of arity {arity} needs {expected} entries, got {}",
                entries.len()
            )));
        }
        if let Some(c) = entries.iter().find(|&&c| c >= colors) {
            return Err(Error::domain(format!(
                "color {c} out of range for {colors} colors"
            )));
        }
        if let Some(fb) = &fallback {
            if fb.arity != arity || fb.colors != colors {
                return Err(Error::domain("fallback must share arity and color count"));
            }
        }
        Ok(Coloring {
            arity,
            colors,
            body: Body::Table(Table {
                lo,
                hi,
                colors: entries,
                fallback: fallback.map(Box::new),
            }),
        })
    }

    pub fn constant(arity: Arity, colors: u32, c: u32) -> Result<Self> {
        Coloring::rule(arity, colors, Rule::Constant(c))
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn is_rule(&self) -> bool {
        matches!(self.body, Body::Rule(_))
    }

    /// Colors a positive integer.
    pub fn color_nat(&self, n: u64) -> Result<u32> {
        self.color(&[n])
    }

    /// Colors an argument list: `[n]` for `Nat`, the increasing tuple for
    /// `Tuple(n)`, the sorted elements for `Set`.
    pub fn color(&self, args: &[u64]) -> Result<u32> {
        match self.arity {
            Arity::Nat => {
                if args.len() != 1 || args[0] == 0 {
                    return Err(Error::domain(format!(
                        "nat colorings take one positive integer, got {args:?}"
                    )));
                }
            }
            Arity::Tuple(n) => {
                if args.len() != n as usize || args.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::domain(format!(
                        "expected an increasing {n}-tuple, got {args:?}"
                    )));
                }
            }
            Arity::Set => {
                if args.is_empty() || args.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::domain(format!(
                        "expected a non-empty sorted set, got {args:?}"
                    )));
                }
            }
        }
        let c = match &self.body {
            Body::Rule(rule) => self.eval_rule(rule, args)?,
            Body::Table(table) => self.eval_table(table, args)?,
        };
        debug_assert!(c < self.colors);
        Ok(c)
    }

    fn eval_rule(&self, rule: &Rule, args: &[u64]) -> Result<u32> {
        let pick = |map: &[u32], v: u64| map[(v % map.len() as u64) as usize];
        Ok(match rule {
            Rule::Constant(c) => *c,
            Rule::Mod { modulus, map } => map[(args[0] % modulus) as usize],
            Rule::Stat { stat, map } => pick(map, stat.eval(args)?),
            Rule::Digit { base, kind, map } => {
                let n = args[0];
                let v = match kind {
                    DigitKind::Least => u64::from(lam(n, *base)),
                    DigitKind::Greatest => u64::from(mu(n, *base)),
                    DigitKind::Coefficient => least_coefficient(n, *base)?,
                };
                pick(map, v)
            }
            Rule::Weight { base, map } => {
                let mut rest = args[0];
                let mut w = 0;
                while rest > 0 {
                    w += u64::from(rest % u64::from(*base) != 0);
                    rest /= u64::from(*base);
                }
                pick(map, w)
            }
            Rule::ImportantParity(f) => important_parity(f, args[0])?,
            Rule::Support { base, inner } => {
                inner.color(support_set(args[0], *base)?.as_slice())?
            }
            Rule::Encode { base, inner } => inner.color_nat(encode_set(
                &FiniteSet::from_sorted_unchecked(args.to_vec()),
                *base,
            )?)?,
            Rule::Doubling { inner } => {
                let c = inner.color_nat(args[0])?;
                if least_coefficient(args[0], 3)? == 1 {
                    c
                } else {
                    inner.colors + c
                }
            }
            Rule::SumOf { inner } => inner.color_nat(Stat::Sum.eval(args)?)?,
            Rule::LambdaMu { inner } => {
                let n = args[0];
                if n.is_power_of_two() {
                    0
                } else {
                    inner.color(&[u64::from(lam(n, 2)), u64::from(mu(n, 2))])?
                }
            }
            Rule::PrefixSums { inner } => {
                let s1 = args[0];
                let s2 = s1
                    .checked_add(args[1])
                    .ok_or_else(|| Error::overflow("prefix sum"))?;
                let s3 = s2
                    .checked_add(args[2])
                    .ok_or_else(|| Error::overflow("prefix sum"))?;
                let b = |s| inner.color_nat(s);
                (b(s1)? << 2) | (b(s2)? << 1) | b(s3)?
            }
        })
    }

    fn eval_table(&self, table: &Table, args: &[u64]) -> Result<u32> {
        let inside = args.iter().all(|&a| a >= table.lo && a <= table.hi);
        if !inside {
            return match &table.fallback {
                Some(fb) => fb.color(args),
                None => Err(Error::Window {
                    args: args.to_vec(),
                    window: format!("{} {}..{}", self.arity, table.lo, table.hi),
                }),
            };
        }
        let w = table.hi - table.lo + 1;
        let index = match self.arity {
            Arity::Nat => (args[0] - table.lo) as usize,
            Arity::Tuple(n) => {
                // Lexicographic rank of the combination.
                let n = u64::from(n);
                let mut rank = 0u64;
                let mut next = 0u64;
                for (i, &a) in args.iter().enumerate() {
                    let p = a - table.lo;
                    for v in next..p {
                        rank += binomial(w - 1 - v, n - 1 - i as u64);
                    }
                    next = p + 1;
                }
                rank as usize
            }
            Arity::Set => {
                let mask: u64 = args.iter().map(|&a| 1u64 << (a - table.lo)).sum();
                (mask - 1) as usize
            }
        };
        Ok(table.colors[index])
    }
}

/// Indices `j` that are important in `n = 2^{n_0} + … + 2^{n_r}` for the
/// injection `f`: some positive argument in `[n_{j-1}, n_j)` (with
/// `n_{-1} = 0`) is mapped below `n_0`.
pub fn important_indices(f: &Injection, n: u64) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::domain(
            "important indices are defined for positive integers",
        ));
    }
    let n0 = u64::from(lam(n, 2));
    let mut out = Vec::new();
    let mut lower = 0u64;
    let mut j = 0usize;
    let mut rest = n;
    while rest != 0 {
        let upper = u64::from(rest.trailing_zeros());
        rest &= rest - 1;
        for a in lower.max(1)..upper {
            if f.apply(a)? < n0 {
                out.push(j);
                break;
            }
        }
        lower = upper;
        j += 1;
    }
    Ok(out)
}

pub fn important_parity(f: &Injection, n: u64) -> Result<u32> {
    Ok((important_indices(f, n)?.len() % 2) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat_mod2() -> Coloring {
        Coloring::rule(
            Arity::Nat,
            2,
            Rule::Mod {
                modulus: 2,
                map: vec![0, 1],
            },
        )
        .unwrap()
    }

    #[test]
    fn table_rank_matches_window_order() {
        for arity in [Arity::Nat, Arity::Tuple(2), Arity::Tuple(3), Arity::Set] {
            let (lo, hi) = if arity == Arity::Nat { (1, 7) } else { (0, 5) };
            let args = window_args(arity, lo, hi);
            let entries: Vec<u32> = (0..args.len() as u32).collect();
            let c = Coloring::table(arity, args.len() as u32, lo, hi, entries, None).unwrap();
            for (i, a) in args.iter().enumerate() {
                assert_eq!(c.color(a).unwrap(), i as u32, "{arity} {a:?}");
            }
        }
    }

    #[test]
    fn table_outside_window() {
        let t = Coloring::table(Arity::Nat, 2, 1, 3, vec![0, 1, 1], None).unwrap();
        assert!(matches!(t.color_nat(4), Err(Error::Window { .. })));
        let t = Coloring::table(Arity::Nat, 2, 1, 3, vec![0, 1, 1], Some(nat_mod2())).unwrap();
        assert_eq!(t.color_nat(4).unwrap(), 0);
        assert_eq!(t.color_nat(2).unwrap(), 1);
    }

    #[test]
    fn rule_validation() {
        assert!(Coloring::rule(Arity::Nat, 2, Rule::Constant(2)).is_err());
        assert!(Coloring::rule(
            Arity::Nat,
            2,
            Rule::Mod {
                modulus: 3,
                map: vec![0, 1]
            }
        )
        .is_err());
        assert!(Coloring::rule(
            Arity::Set,
            2,
            Rule::Doubling {
                inner: Box::new(nat_mod2())
            }
        )
        .is_err());
        assert!(Coloring::rule(
            Arity::Nat,
            4,
            Rule::Doubling {
                inner: Box::new(nat_mod2())
            }
        )
        .is_ok());
    }

    #[test]
    fn doubling_examples() {
        let zero = Coloring::constant(Arity::Nat, 1, 0).unwrap();
        let g = Coloring::rule(
            Arity::Nat,
            2,
            Rule::Doubling {
                inner: Box::new(zero),
            },
        )
        .unwrap();
        assert_eq!(g.color_nat(5).unwrap(), 1);
        assert_eq!(g.color_nat(4).unwrap(), 0);
    }

    #[test]
    fn lambda_mu_and_prefix_sums() {
        let pair = Coloring::rule(
            Arity::Tuple(2),
            2,
            Rule::Stat {
                stat: Stat::Sum,
                map: vec![0, 1],
            },
        )
        .unwrap();
        let f = Coloring::rule(
            Arity::Nat,
            2,
            Rule::LambdaMu {
                inner: Box::new(pair),
            },
        )
        .unwrap();
        assert_eq!(f.color_nat(12).unwrap(), 1);
        assert_eq!(f.color_nat(8).unwrap(), 0);

        let c = Coloring::rule(
            Arity::Tuple(3),
            8,
            Rule::PrefixSums {
                inner: Box::new(nat_mod2()),
            },
        )
        .unwrap();
        assert_eq!(c.color(&[1, 4, 16]).unwrap(), 7);
        assert!(c.color(&[4, 1, 16]).is_err());
    }

    /// Direct transcription of the importance definition over explicit windows.
    fn importance_oracle(f: &Injection, n: u64) -> u32 {
        let exps: Vec<u64> = (0..64).filter(|b| n >> b & 1 == 1).collect();
        let n0 = exps[0];
        let mut count = 0;
        for j in 0..exps.len() {
            let lo = if j == 0 { 0 } else { exps[j - 1] };
            if (lo..exps[j])
                .filter(|&a| a >= 1)
                .any(|a| f.apply(a).unwrap() < n0)
            {
                count += 1;
            }
        }
        count % 2
    }

    #[test]
    fn important_parity_examples() {
        let id = Injection::Identity;
        assert_eq!(important_indices(&id, 40).unwrap(), vec![0]);
        assert_eq!(important_parity(&id, 40).unwrap(), 1);
        assert_eq!(important_parity(&id, 1).unwrap(), 0);
        let far = Injection::Shift(1 << 60);
        for n in [1u64, 7, 40, 1 << 30, (1 << 30) - 1] {
            assert_eq!(important_parity(&far, n).unwrap(), 0);
        }
        for f in crate::principles::injection_catalog() {
            for n in (1..3000u64).chain([1 << 40 | 1 << 7, 3 << 20]) {
                assert_eq!(
                    important_parity(&f, n).unwrap(),
                    importance_oracle(&f, n),
                    "{f} {n}"
                );
            }
        }
    }
}
