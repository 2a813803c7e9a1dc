use std::fmt;

use crate::error::{Error, Result};

/// Injective functions ℕ → ℕ from a closed catalog, used as the input of the
/// important-digit coloring and the range decoders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Injection {
    Identity,
    /// `n ↦ n + c`
    Shift(u64),
    /// `n ↦ 2n`
    Even,
    /// `base` everywhere except `at ↦ value`.
    Patched {
        base: Box<Injection>,
        at: u64,
        value: u64,
    },
}

impl Injection {
    pub fn apply(&self, n: u64) -> Result<u64> {
        let overflow = || Error::overflow(format!("{self} at {n}"));
        match self {
            Injection::Identity => Ok(n),
            Injection::Shift(c) => n.checked_add(*c).ok_or_else(overflow),
            Injection::Even => n.checked_mul(2).ok_or_else(overflow),
            Injection::Patched { base, at, value } => {
                if n == *at {
                    Ok(*value)
                } else {
                    base.apply(n)
                }
            }
        }
    }

    /// The unique positive argument mapped to `x`, if any. Computed from the
    /// closed form of each catalog entry; this is the ground truth the range
    /// decoders are checked against.
    pub fn preimage(&self, x: u64) -> Option<u64> {
        match self {
            Injection::Identity => (x >= 1).then_some(x),
            Injection::Shift(c) => x.checked_sub(*c).filter(|&a| a >= 1),
            Injection::Even => (x >= 2 && x % 2 == 0).then_some(x / 2),
            Injection::Patched { base, at, value } => {
                if x == *value {
                    Some(*at)
                } else {
                    base.preimage(x).filter(|a| a != at)
                }
            }
        }
    }

    pub fn in_range(&self, x: u64) -> bool {
        self.preimage(x).is_some()
    }

    /// Spot-checks injectivity on the arguments `1..=window`.
    pub fn check_injective(&self, window: u64) -> Result<()> {
        let mut seen = std::collections::HashMap::new();
        for a in 1..=window {
            let v = self.apply(a)?;
            if let Some(prev) = seen.insert(v, a) {
                return Err(Error::domain(format!(
                    "{self} is not injective: {prev} and {a} both map to {v}"
                )));
            }
        }
        Ok(())
    }

    pub(crate) fn write_tokens(&self, out: &mut Vec<String>) {
        match self {
            Injection::Identity => out.push("identity".into()),
            Injection::Shift(c) => out.extend(["shift".into(), c.to_string()]),
            Injection::Even => out.push("even".into()),
            Injection::Patched { base, at, value } => {
                out.extend(["patched".into(), at.to_string(), value.to_string()]);
                base.write_tokens(out);
            }
        }
    }

    pub(crate) fn parse_tokens<'a>(tokens: &mut impl Iterator<Item = &'a str>) -> Option<Self> {
        let num = |t: Option<&str>| t.and_then(|t| t.parse::<u64>().ok());
        match tokens.next()? {
            "identity" => Some(Injection::Identity),
            "shift" => Some(Injection::Shift(num(tokens.next())?)),
            "even" => Some(Injection::Even),
            "patched" => {
                let at = num(tokens.next())?;
                let value = num(tokens.next())?;
                let base = Injection::parse_tokens(tokens)?;
                Some(Injection::Patched {
                    base: Box::new(base),
                    at,
                    value,
                })
            }
            _ => None,
        }
    }
}

impl std::str::FromStr for Injection {
    type Err = Error;

    /// Parses the token form, e.g. `shift 10` or `patched 6 1 shift 3`.
    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let f = Injection::parse_tokens(&mut tokens)
            .filter(|_| tokens.next().is_none())
            .ok_or_else(|| Error::domain(format!("unknown injection `{s}`")))?;
        f.check_injective(64)?;
        Ok(f)
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tokens = Vec::new();
        self.write_tokens(&mut tokens);
        write!(f, "{}", tokens.join(" "))
    }
}

/// The injections the decoders are exercised on: identity, shifts by 3 and
/// 10, the even enumerator, and a shift with one small value moved late
/// (`6 ↦ 1`), which only a long enough homogeneous set can detect.
pub fn injection_catalog() -> Vec<Injection> {
    vec![
        Injection::Identity,
        Injection::Shift(3),
        Injection::Shift(10),
        Injection::Even,
        Injection::Patched {
            base: Box::new(Injection::Shift(3)),
            at: 6,
            value: 1,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preimage_agrees_with_brute_force() {
        for inj in injection_catalog() {
            inj.check_injective(200).unwrap();
            for x in 1..60 {
                let brute = (1..=200).find(|&a| inj.apply(a).unwrap() == x);
                assert_eq!(inj.preimage(x), brute, "{inj} at {x}");
            }
        }
    }

    #[test]
    fn detects_non_injective_patch() {
        let bad = Injection::Patched {
            base: Box::new(Injection::Identity),
            at: 3,
            value: 5,
        };
        assert!(bad.check_injective(10).is_err());
    }

    #[test]
    fn token_form_round_trips() {
        for inj in injection_catalog() {
            let text = inj.to_string();
            let parsed = Injection::parse_tokens(&mut text.split_whitespace()).unwrap();
            assert_eq!(parsed, inj);
        }
    }
}
