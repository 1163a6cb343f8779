use thiserror::Error;

/// Errors raised by the torus, Weyl-group and matrix computations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator {den} is divisible by the characteristic {p}")]
    DenominatorDivisibleByP { den: u64, p: u64 },

    #[error("basis matrix has determinant {0}; expected one of ±1, ±2")]
    SingularBasis(i64),

    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("root set is not closed under negation")]
    NotClosedUnderNegation,

    #[error("cannot classify a root subsystem component of rank {0}")]
    UnclassifiableComponent(usize),

    #[error("search bound exceeded for {what}: needs {needed}, bound is {bound}")]
    BoundExceeded { what: &'static str, needed: u128, bound: u128 },

    #[error("element does not stabilize the torus point")]
    NotInStabilizer,

    #[error("signed permutation has odd flip parity")]
    OddParity,

    #[error("a Frobenius endomorphism needs a positive p-power exponent")]
    FrobeniusPowerZero,

    #[error("element does not fix the torus point")]
    NotFixed,

    #[error("class is not stable under {0}")]
    NotStable(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("denominator {den} does not split in GF({p}^{k}); smallest working degree is {suggested}")]
    DenominatorNotSplit { den: u64, p: u64, k: u32, suggested: u32 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Outcome carried by every checker report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisViolated,
}

impl Verdict {
    pub fn from_checks<'a, I: IntoIterator<Item = &'a bool>>(checks: I) -> Verdict {
        if checks.into_iter().all(|&b| b) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypothesisViolated => "hypothesis_violated",
        })
    }
}
