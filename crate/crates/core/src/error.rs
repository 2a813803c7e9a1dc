use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("64-bit overflow while computing {0}")]
    Overflow(String),
    #[error("argument {args:?} lies outside the table window {window}")]
    Window { args: Vec<u64>, window: String },
    #[error("thinning failed: members {0} and {1} share base-3 least exponent {2}")]
    Thinning(u64, u64, u32),
    #[error("no alternating chain of length {0} exists in the given pair of sets")]
    Interleave(usize),
    #[error("only {0} complete exactly large chunk(s) fit; at least 2 are needed")]
    Chunk(usize),
    #[error("cannot compose `{0}` (target {1}) with `{2}` (source {3})")]
    Composition(String, String, String, String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("solution shape {found} does not match principle {principle}")]
    Shape { principle: String, found: String },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown reduction id `{0}`")]
    UnknownReduction(String),
    #[error("solution too short: {0}")]
    TooShort(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn overflow(what: impl Into<String>) -> Self {
        Error::Overflow(what.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
