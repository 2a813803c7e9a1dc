//! Base-`t` digit arithmetic and the finite set machinery every other module
//! builds on. All values are `u64`; anything that would leave that range is
//! reported as [`Error::Overflow`](crate::Error::Overflow) instead of wrapping.

mod digits;
mod sets;
mod sums;

pub use digits::{
    encode_set, greatest_exponent, least_coefficient, least_exponent, support_set, DigitProfile,
};
pub use sets::{check_apart, is_exactly_large, ApartSet, Apartness, BlockSequence, FiniteSet};
pub use sums::{
    checked_sum, enumerate_sums, enumerate_unions, visit_subsets, LengthSpec, ParseLengthError,
};

pub(crate) use digits::{lam, mu};
pub(crate) use sums::next_combination;
