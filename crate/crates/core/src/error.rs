use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Every variant belongs to one of three families (see [`ErrorKind`]), which
/// the command-line front end maps onto process exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("rational magnitude exceeds the configured bound")]
    MagnitudeExceeded,
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("operation unsupported over this residue field")]
    UnsupportedField,
    #[error("entry is not fixed by the residue automorphism")]
    EntryNotFixed,
    #[error("precision exhausted: value is indistinguishable from zero")]
    PrecisionExhausted,
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("element is not a square")]
    NotASquare,
    #[error("invalid field description: {0}")]
    InvalidField(String),
    #[error("quaternion algebra is split (norm form is isotropic)")]
    SplitAlgebra,
    #[error("division cannot be decided over this residue field; assert it explicitly")]
    UndecidableDivision,
    #[error("twisting element is not skew under the canonical involution")]
    NotSkew,
    #[error("ramified algebra admits a unit complement basis vector")]
    UnitComplementContradiction,
    #[error("s_eps is even; no symmetric uniformizer exists")]
    EvenS,
    #[error("entry {0} is not epsilon-symmetric")]
    NotEpsilonSymmetric(usize),
    #[error("entry {0} is zero")]
    ZeroEntry(usize),
    #[error("entry value parity cannot be normalized")]
    ValueParityImpossible,
    #[error("residue condition for isometry lifting fails")]
    ResidueConditionFails,
    #[error("lifting inputs must be units")]
    NonUnit,
    #[error("operation requires a different ramification type")]
    UnsupportedRamification,
    #[error("this case has no ramified residue part")]
    RamifiedPartForbidden,
    #[error("forms live over different (algebra, involution, eps)")]
    StructureMismatch,
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Coarse classification of [`Error`] values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent input.
    Input,
    /// The mathematics rules the request out (split algebra, bad field, ...).
    MathDomain,
    /// Finite precision was insufficient to certify the answer.
    Precision,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Parse { .. }
            | FieldMismatch
            | InvalidField(_)
            | NotEpsilonSymmetric(_)
            | ZeroEntry(_)
            | NotSkew
            | StructureMismatch
            | ZeroInput => ErrorKind::Input,
            PrecisionExhausted | MagnitudeExceeded => ErrorKind::Precision,
            _ => ErrorKind::MathDomain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
