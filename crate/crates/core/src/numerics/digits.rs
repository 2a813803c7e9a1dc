use crate::error::{Error, Result};
use crate::numerics::FiniteSet;

/// Positional representation of a positive integer in base `t`.
///
/// `digits` holds `(exponent, coefficient)` pairs for the non-zero digits,
/// ordered by increasing exponent. The first pair gives the least exponent
/// (and the least coefficient), the last pair the greatest exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitProfile {
    value: u64,
    base: u32,
    digits: Vec<(u32, u64)>,
}

fn check_base(t: u32) -> Result<()> {
    if t < 2 {
        return Err(Error::domain(format!("base must be at least 2, got {t}")));
    }
    Ok(())
}

fn check_positive(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("0 has no base-t exponents"));
    }
    Ok(())
}

impl DigitProfile {
    pub fn new(n: u64, t: u32) -> Result<Self> {
        check_positive(n)?;
        check_base(t)?;
        let base = u64::from(t);
        let mut digits = Vec::new();
        let mut rest = n;
        let mut exponent = 0;
        while rest > 0 {
            let coefficient = rest % base;
            if coefficient != 0 {
                digits.push((exponent, coefficient));
            }
            rest /= base;
            exponent += 1;
        }
        Ok(DigitProfile {
            value: n,
            base: t,
            digits,
        })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn digits(&self) -> &[(u32, u64)] {
        &self.digits
    }

    /// λ: the least exponent with a non-zero digit.
    pub fn least_exponent(&self) -> u32 {
        self.digits[0].0
    }

    /// μ: the greatest exponent with a non-zero digit.
    pub fn greatest_exponent(&self) -> u32 {
        self.digits[self.digits.len() - 1].0
    }

    /// Coefficient of the least term. Only the base-3 case carries meaning for
    /// the color-doubling reduction, but it is well defined for every base.
    pub fn least_coefficient(&self) -> u64 {
        self.digits[0].1
    }

    pub fn exponents(&self) -> impl Iterator<Item = u32> + '_ {
        self.digits.iter().map(|&(e, _)| e)
    }

    /// Σ coefficient·t^exponent, computed in 128 bits.
    pub fn reconstruct(&self) -> u128 {
        let base = u128::from(self.base);
        self.digits
            .iter()
            .map(|&(e, c)| u128::from(c) * base.pow(e))
            .sum()
    }
}

/// Least exponent without validation; `n >= 1`, `t >= 2`.
#[inline]
pub(crate) fn lam(n: u64, t: u32) -> u32 {
    debug_assert!(n > 0 && t >= 2);
    if t == 2 {
        return n.trailing_zeros();
    }
    let base = u64::from(t);
    let mut rest = n;
    let mut e = 0;
    while rest % base == 0 {
        rest /= base;
        e += 1;
    }
    e
}

/// Greatest exponent without validation; `n >= 1`, `t >= 2`.
#[inline]
pub(crate) fn mu(n: u64, t: u32) -> u32 {
    debug_assert!(n > 0 && t >= 2);
    if t == 2 {
        return 63 - n.leading_zeros();
    }
    let base = u64::from(t);
    let mut rest = n;
    let mut e = 0;
    while rest >= base {
        rest /= base;
        e += 1;
    }
    e
}

pub fn least_exponent(n: u64, t: u32) -> Result<u32> {
    check_positive(n)?;
    check_base(t)?;
    Ok(lam(n, t))
}

pub fn greatest_exponent(n: u64, t: u32) -> Result<u32> {
    check_positive(n)?;
    check_base(t)?;
    Ok(mu(n, t))
}

pub fn least_coefficient(n: u64, t: u32) -> Result<u64> {
    check_positive(n)?;
    check_base(t)?;
    Ok((n / u64::from(t).pow(lam(n, t))) % u64::from(t))
}

/// The set of base-`t` exponents carrying a non-zero digit of `n`.
pub fn support_set(n: u64, t: u32) -> Result<FiniteSet> {
    let profile = DigitProfile::new(n, t)?;
    Ok(FiniteSet::from_sorted_unchecked(
        profile.exponents().map(u64::from).collect(),
    ))
}

/// Σ_{s∈S} t^s.
pub fn encode_set(set: &FiniteSet, t: u32) -> Result<u64> {
    check_base(t)?;
    if set.is_empty() {
        return Err(Error::domain("cannot encode the empty set"));
    }
    let base = u64::from(t);
    set.iter().try_fold(0u64, |acc, &s| {
        let exponent = u32::try_from(s).map_err(|_| Error::overflow(format!("{t}^{s}")))?;
        base.checked_pow(exponent)
            .and_then(|p| acc.checked_add(p))
            .ok_or_else(|| Error::overflow(format!("encoding {set} in base {t}")))
    })
}
