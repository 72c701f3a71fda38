use core::fmt;

/// Errors reported by the exact-algebra kernel and the group algorithms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Inversion of the zero field element.
    DivisionByZero,
    /// Matrix inversion of a singular matrix.
    SingularMatrix,
    /// The element is not a power of the given base.
    NotAPower,
    /// The element is not a square in the field.
    NonSquare,
    /// A projective point does not lie on the ovoid.
    NotOnOvoid,
    /// An element does not have the shape required by the operation
    /// (e.g. not upper triangular, not in the image of the symmetric square).
    BadShape(&'static str),
    /// The input is not a member of the group in question.
    NotInGroup(&'static str),
    /// A Las Vegas search exhausted its retry budget.
    BudgetExhausted(&'static str),
    /// Invalid parameters (bad m, mismatched dimensions, SLP slot out of range, ...).
    Invalid(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero in the field"),
            Error::SingularMatrix => write!(f, "matrix is singular"),
            Error::NotAPower => write!(f, "element is not a power of the base"),
            Error::NonSquare => write!(f, "element is not a square"),
            Error::NotOnOvoid => write!(f, "point is not on the ovoid"),
            Error::BadShape(what) => write!(f, "unexpected shape: {what}"),
            Error::NotInGroup(what) => write!(f, "element not in group: {what}"),
            Error::BudgetExhausted(what) => write!(f, "Las Vegas budget exhausted: {what}"),
            Error::Invalid(what) => write!(f, "invalid input: {what}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
