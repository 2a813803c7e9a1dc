//! Range decoders: reading membership in the range of an injection off a
//! set homogeneous for its important-digit parity coloring.

use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{lam, mu, ApartSet, LengthSpec};
use crate::principles::{verify_ht, Arity, Coloring, Injection, Rule};
use crate::search::{search_sums, SearchBudget};

/// The 2-coloring counting important digits of `n` modulo 2.
pub fn important_parity_coloring(f: &Injection) -> Result<Coloring> {
    Coloring::rule(Arity::Nat, 2, Rule::ImportantParity(f.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    InRange,
    NotInRange,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::InRange => "in-range",
            Verdict::NotInRange => "not-in-range",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// A verdict with the prefix sum `n` and partner `k` it was read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decoded {
    pub verdict: Verdict,
    pub n: Option<u64>,
    pub k: Option<u64>,
}

impl Decoded {
    fn inconclusive() -> Self {
        Decoded {
            verdict: Verdict::Inconclusive,
            n: None,
            k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeDecoder {
    injection: Injection,
    g: Coloring,
    spec: LengthSpec,
    h: ApartSet,
    r: u32,
}

impl RangeDecoder {
    /// Checks that `h` is 2-apart and that the admissible sums of `h` are
    /// monochromatic for the important-digit parity coloring of `f`.
    pub fn new(injection: Injection, h: ApartSet, spec: LengthSpec) -> Result<Self> {
        match spec {
            LengthSpec::AtMost(2) | LengthSpec::ExactlyLarge => {}
            LengthSpec::Exactly(a) if a >= 3 => {}
            ref other => {
                return Err(Error::domain(format!(
                    "no range decoder for length spec {other}"
                )))
            }
        }
        if h.base() != 2 {
            return Err(Error::domain("range decoders work on 2-apart sets"));
        }
        let g = important_parity_coloring(&injection)?;
        let report = verify_ht(&g, &spec, h.members(), Some(2))?;
        let r = match (report.is_valid(), report.color) {
            (true, Some(r)) => r,
            _ => {
                return Err(Error::domain(format!(
                    "the set is not homogeneous for the parity coloring: {report}"
                )))
            }
        };
        Ok(RangeDecoder {
            injection,
            g,
            spec,
            h,
            r,
        })
    }

    /// Searches the least 2-apart set of `size` members homogeneous for
    /// the parity coloring of `f`; `None` when the budget runs out first.
    pub fn search(
        injection: Injection,
        spec: LengthSpec,
        size: usize,
        max_exponent: u32,
        max_nodes: u64,
    ) -> Result<Option<Self>> {
        let g = important_parity_coloring(&injection)?;
        let budget = SearchBudget::new(max_exponent, max_nodes, size)?;
        let out = search_sums(&g, &spec, Some(2), &budget, 1)?;
        match out.solution {
            Some(s) => {
                let set = s.shape.as_set().expect("set shape").clone();
                Ok(Some(RangeDecoder::new(
                    injection,
                    ApartSet::new(set, 2)?,
                    spec,
                )?))
            }
            None => Ok(None),
        }
    }

    pub fn injection(&self) -> &Injection {
        &self.injection
    }

    pub fn coloring(&self) -> &Coloring {
        &self.g
    }

    pub fn set(&self) -> &ApartSet {
        &self.h
    }

    pub fn color(&self) -> u32 {
        self.r
    }

    /// Whether `x` is among `f(1), …, f(m - 1)`, by direct evaluation.
    fn hit_below(&self, x: u64, m: u32) -> Result<bool> {
        for a in 1..u64::from(m) {
            if self.injection.apply(a)? == x {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Decides whether `x` lies in the range of `f`.
    pub fn decode(&self, x: u64) -> Result<Decoded> {
        if x == 0 {
            return Err(Error::domain("queries are positive integers"));
        }
        let h = self.h.as_slice();
        let Some(i0) = h.iter().position(|&v| u64::from(lam(v, 2)) > x) else {
            return Ok(Decoded::inconclusive());
        };
        match self.spec {
            LengthSpec::AtMost(_) => self.decode_le2(x, i0),
            LengthSpec::Exactly(a) => self.decode_with_prefix(x, i0, a as usize - 2),
            _ => {
                let terms = usize::try_from(h[i0] - 1).unwrap_or(usize::MAX);
                self.decode_with_prefix(x, i0, terms)
            }
        }
    }

    /// Reads the answer off `μ(h_i)` for the first `h_i` with `x < λ(h_i)`;
    /// every later member with a successor must give the same answer.
    fn decode_le2(&self, x: u64, i0: usize) -> Result<Decoded> {
        let h = self.h.as_slice();
        if i0 + 1 >= h.len() {
            return Ok(Decoded::inconclusive());
        }
        let first = self.hit_below(x, mu(h[i0], 2))?;
        for &later in &h[i0 + 1..h.len() - 1] {
            if self.hit_below(x, mu(later, 2))? != first {
                return Ok(Decoded::inconclusive());
            }
        }
        Ok(Decoded {
            verdict: verdict(first),
            n: Some(h[i0]),
            k: None,
        })
    }

    /// Sums `terms` members from `i0` into `n`, then reads the answer off
    /// `μ(k)` for each later `k` with `g(n + k) = r` that has a successor;
    /// all such `k` must agree.
    fn decode_with_prefix(&self, x: u64, i0: usize, terms: usize) -> Result<Decoded> {
        let h = self.h.as_slice();
        if terms == 0 || i0 + terms > h.len() {
            return Ok(Decoded::inconclusive());
        }
        let n = h[i0..i0 + terms]
            .iter()
            .try_fold(0u64, |a, &v| a.checked_add(v))
            .ok_or_else(|| Error::overflow("decoder prefix sum"))?;
        let mut answer: Option<(bool, u64)> = None;
        let rest = &h[i0 + terms..];
        for (j, &k) in rest.iter().enumerate() {
            if j + 1 == rest.len() {
                break;
            }
            let s = n
                .checked_add(k)
                .ok_or_else(|| Error::overflow("decoder sum n + k"))?;
            if self.g.color_nat(s)? != self.r {
                continue;
            }
            let hit = self.hit_below(x, mu(k, 2))?;
            match answer {
                None => answer = Some((hit, k)),
                Some((prev, _)) if prev != hit => return Ok(Decoded::inconclusive()),
                Some(_) => {}
            }
        }
        Ok(match answer {
            Some((hit, k)) => Decoded {
                verdict: verdict(hit),
                n: Some(n),
                k: Some(k),
            },
            None => Decoded::inconclusive(),
        })
    }
}

fn verdict(hit: bool) -> Verdict {
    if hit {
        Verdict::InRange
    } else {
        Verdict::NotInRange
    }
}
