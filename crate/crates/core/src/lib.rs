//! Bounded restrictions of Hindman's finite sums theorem as executable code.
//!
//! The crate is organised in layers:
//!
//! * [`numerics`]: base-`t` digit profiles, apartness, finite sums and unions,
//!   exactly large sets.
//! * [`principles`]: colorings, solution shapes and verifiers for every
//!   principle (HT, FUT, RT, IPT, IPHT, PHT and their variants).
//! * [`reductions`]: strong computable reductions as forward/backward pairs
//!   and the range decoders built on the important-digit coloring.
//! * [`search`]: deterministic brute-force witness search.
//! * [`cli`]: the `hindman` command line front end.

pub mod cli;
pub mod error;
pub mod numerics;
pub mod principles;
pub mod reductions;
pub mod search;

pub use error::{Error, Result};
