use alloc::string::String;
use core::fmt;

/// Errors surfaced by state construction and the analysis operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand dimensions do not match.
    DimensionMismatch { expected: usize, actual: usize },
    /// Operands live on different composite layouts.
    LayoutMismatch,
    /// Tensor composition would duplicate a subsystem label.
    LabelCollision(String),
    /// A subsystem label is not part of the layout.
    UnknownLabel(String),
    /// A layout was declared with a zero dimension or duplicate labels.
    InvalidLayout(String),
    /// State vector norm or density-matrix trace deviates from 1.
    NotNormalized(f64),
    /// Matrix deviates from its conjugate transpose by the given norm.
    NotHermitian(f64),
    /// Candidate deviates from idempotency by the given norm.
    NotAProjector(f64),
    /// Pointer projectors do not resolve the identity.
    IncompleteProjectors(f64),
    /// Premeasurement requires the pointer in its ready state.
    PointerNotInitial(f64),
    /// State is not a superposition of orthogonal pointer-tagged branches.
    NotBranchForm(f64),
    /// Gemenge probabilities are negative or do not sum to 1.
    BadProbabilities(f64),
    /// Feasibility analysis needs at least one eigenstate constraint.
    EmptyConstraints,
    /// Constraints do not all act on the same subsystem set.
    ConstraintSubsystemMismatch,
    /// Distinctness requires at least two constraint classes.
    TooFewClasses,
    /// Interference branches must be orthonormal.
    BranchesNotOrthonormal(f64),
    /// A scalar parameter is outside its admissible range.
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::LayoutMismatch => write!(f, "operands have different subsystem layouts"),
            Error::LabelCollision(l) => write!(f, "subsystem label {l:?} already present"),
            Error::UnknownLabel(l) => write!(f, "unknown subsystem label {l:?}"),
            Error::InvalidLayout(msg) => write!(f, "invalid layout: {msg}"),
            Error::NotNormalized(dev) => {
                write!(f, "state is not normalized (deviation {dev:.3e})")
            }
            Error::NotHermitian(dev) => {
                write!(f, "matrix is not Hermitian (deviation {dev:.3e})")
            }
            Error::NotAProjector(dev) => {
                write!(f, "candidate is not idempotent (deviation {dev:.3e})")
            }
            Error::IncompleteProjectors(dev) => {
                write!(f, "projectors do not sum to identity (deviation {dev:.3e})")
            }
            Error::PointerNotInitial(dev) => {
                write!(f, "pointer is not in its ready state (deviation {dev:.3e})")
            }
            Error::NotBranchForm(dev) => {
                write!(f, "state is not in pointer branch form (cross term {dev:.3e})")
            }
            Error::BadProbabilities(dev) => {
                write!(f, "probabilities invalid (deviation {dev:.3e})")
            }
            Error::EmptyConstraints => write!(f, "no eigenstate constraints given"),
            Error::ConstraintSubsystemMismatch => {
                write!(f, "constraints act on different subsystem sets")
            }
            Error::TooFewClasses => write!(f, "need at least two distinctness classes"),
            Error::BranchesNotOrthonormal(dev) => {
                write!(f, "branch vectors are not orthonormal (deviation {dev:.3e})")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
