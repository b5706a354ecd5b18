use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infinite valuation: the argument is zero")]
    InfiniteValuation,

    /// `f^n(0)` vanishes identically for this parameter (a PCF collision).
    #[error("zero iterate: f^{n}(0) = 0 exactly")]
    ZeroIterate { n: u32 },

    #[error("size guard exceeded for {what}: estimated {estimate_bits} bits, limit {limit_bits}")]
    SizeGuard {
        what: String,
        estimate_bits: u64,
        limit_bits: u64,
    },

    #[error("{p} is not a primitive prime divisor of f^{n}(0) at c = {c0}")]
    NotPrimitive { p: BigUint, n: u32, c0: String },

    /// `v_p(F) > 2 v_p(F')` fails; `v_f = None` never occurs here but
    /// `v_df = None` means the derivative vanished to the precision cap.
    #[error("Hensel hypothesis fails: v(F) = {v_f}, v(F') = {}", fmt_opt(.v_df))]
    HenselHypothesis { v_f: u32, v_df: Option<u32> },

    #[error("Newton iteration did not converge within {iterations} steps")]
    NonConvergence { iterations: u32 },

    #[error("disc obstruction: {p} divides disc(G_{{d,{n}}})")]
    DiscObstruction { p: BigUint, n: u32 },

    #[error("prime {p} not admissible for iterate {n}: no parameter mod p has exact period {n}")]
    NotAdmissible { p: BigUint, n: u32 },

    #[error("no prime found within bound {bound}")]
    NoPrimeFound { bound: u64 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

fn fmt_opt(v: &Option<u32>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "beyond precision cap".to_string(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
