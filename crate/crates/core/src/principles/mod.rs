//! Principle descriptors, instance colorings, solution shapes and verifiers.

mod coloring;
mod format;
mod injection;
mod solution;
mod verify;

use std::fmt;

pub use coloring::{
    important_indices, important_parity, window_args, Arity, Body, Coloring, DigitKind, Rule, Stat,
    Table, MAX_SET_WINDOW,
};
pub use format::{
    coloring_from_text, coloring_to_text, parse_rule_expr, solution_from_text, solution_to_text,
};
pub use injection::{injection_catalog, Injection};
pub use solution::{Shape, Solution};
pub use verify::{
    verify, verify_fut, verify_ht, verify_ipt, verify_large_ramsey, verify_polarized_ht, verify_rt,
    Status, VerificationReport, Witness,
};

pub(crate) use verify::visit_selections;

use crate::numerics::LengthSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Finite sums of admissible lengths monochromatic.
    HT,
    /// Finite unions of a block sequence monochromatic.
    FUT,
    /// Ramsey's theorem for `n`-tuples.
    RT,
    /// Increasing polarized Ramsey.
    IPT,
    /// Increasing polarized Hindman.
    IPHT,
    /// Polarized Hindman.
    PHT,
    /// Some pair of lengths `a < b` with `FS^{a,b}` monochromatic.
    HTExists,
    /// Ramsey's theorem for exactly large sets.
    RTLarge,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::HT => "HT",
            Family::FUT => "FUT",
            Family::RT => "RT",
            Family::IPT => "IPT",
            Family::IPHT => "IPHT",
            Family::PHT => "PHT",
            Family::HTExists => "HT-exists",
            Family::RTLarge => "RT-large",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Family::HT,
            Family::FUT,
            Family::RT,
            Family::IPT,
            Family::IPHT,
            Family::PHT,
            Family::HTExists,
            Family::RTLarge,
        ]
        .into_iter()
        .find(|f| f.name().eq_ignore_ascii_case(s))
    }
}

/// A principle together with its parameters.
///
/// `length` is used by HT and FUT, `dimension` by RT, IPT, IPHT and PHT.
/// `apart` is only meaningful for the Hindman families.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PrincipleId {
    pub family: Family,
    pub length: Option<LengthSpec>,
    pub dimension: Option<u32>,
    pub colors: u32,
    pub apart: Option<u32>,
}

impl PrincipleId {
    pub fn ht(length: LengthSpec, colors: u32, apart: Option<u32>) -> Self {
        PrincipleId {
            family: Family::HT,
            length: Some(length),
            dimension: None,
            colors,
            apart,
        }
    }

    pub fn fut(length: LengthSpec, colors: u32) -> Self {
        PrincipleId {
            family: Family::FUT,
            length: Some(length),
            dimension: None,
            colors,
            apart: None,
        }
    }

    pub fn dimensional(family: Family, dimension: u32, colors: u32, apart: Option<u32>) -> Self {
        PrincipleId {
            family,
            length: None,
            dimension: Some(dimension),
            colors,
            apart,
        }
    }

    pub fn ht_exists(colors: u32, apart: Option<u32>) -> Self {
        PrincipleId {
            family: Family::HTExists,
            length: None,
            dimension: None,
            colors,
            apart,
        }
    }

    pub fn rt_large(colors: u32) -> Self {
        PrincipleId {
            family: Family::RTLarge,
            length: None,
            dimension: None,
            colors,
            apart: None,
        }
    }

    /// Arity of the instances of this principle.
    pub fn instance_arity(&self) -> Arity {
        match self.family {
            Family::HT | Family::HTExists | Family::IPHT | Family::PHT => Arity::Nat,
            Family::FUT | Family::RTLarge => Arity::Set,
            Family::RT | Family::IPT => Arity::Tuple(self.dimension.unwrap_or(2)),
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family.name())?;
        if let Some(l) = &self.length {
            write!(f, "^{{{l}}}")?;
        }
        if let Some(d) = self.dimension {
            write!(f, "^{d}")?;
        }
        write!(f, "_{}", self.colors)?;
        if let Some(t) = self.apart {
            write!(f, " apart{t}")?;
        }
        Ok(())
    }
}
