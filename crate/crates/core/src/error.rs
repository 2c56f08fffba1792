use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the algebraic and combinatorial layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The characteristic is not a prime.
    NotPrime(u64),
    /// Bad extension degree, modulus shape or field size.
    InvalidField(String),
    /// The supplied modulus factors over the prime field.
    ReducibleModulus,
    /// Inversion of zero.
    ZeroInverse,
    /// A subfield degree that does not divide the extension degree.
    NotDivisor { sub: u32, degree: u32 },
    /// An enumeration would exceed the desk-scale guard.
    TooLarge { size: u128, limit: u128 },
    /// An argument was required to lie in a subfield and does not.
    NotInSubfield,
    /// Transversal membership was queried for an element of a proper subfield.
    InSubfieldUnion,
    /// Construction or check parameters are inconsistent.
    InvalidParams(String),
    /// The family never reached its density threshold.
    ReseedCapExceeded {
        attempts: u32,
        best: usize,
        threshold: usize,
    },
    /// Malformed textual input.
    Parse(String),
    /// A certified invariant failed; indicates a bug.
    Internal(String),
}

impl Error {
    /// Resource guards and reseed caps, as opposed to plain parameter errors.
    pub fn is_resource_guard(&self) -> bool {
        matches!(
            self,
            Error::TooLarge { .. } | Error::ReseedCapExceeded { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrime(p) => write!(f, "{p} is not a prime"),
            Error::InvalidField(msg) => write!(f, "invalid field: {msg}"),
            Error::ReducibleModulus => write!(f, "modulus is reducible"),
            Error::ZeroInverse => write!(f, "zero has no inverse"),
            Error::NotDivisor { sub, degree } => {
                write!(f, "subfield degree {sub} does not divide {degree}")
            }
            Error::TooLarge { size, limit } => {
                write!(f, "enumeration of {size} items exceeds guard {limit} (use --force)")
            }
            Error::NotInSubfield => write!(f, "element is outside the required subfield"),
            Error::InSubfieldUnion => {
                write!(f, "element lies in a proper subfield; transversal undefined")
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::ReseedCapExceeded {
                attempts,
                best,
                threshold,
            } => write!(
                f,
                "family stayed below density threshold {threshold} after {attempts} seeds (best {best})"
            ),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
