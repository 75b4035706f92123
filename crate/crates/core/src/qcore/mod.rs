//! Linear-algebraic substrate: composite layouts, pure and mixed states,
//! Hermitian observables, reduction and spectral analysis.

mod layout;
mod observable;
mod state;

pub use layout::{CompositeLayout, Subsystem};
pub use observable::{
    eigen_residual, expectation_power, is_eigenstate, spectral_decompose, HermitianObservable,
    QuantumState, SpectralDecomposition, EIGEN_CLUSTER_REL,
};
pub use state::{partial_trace, trace_distance, DensityMatrix, Ket};

/// Numeric tolerances used across the toolkit.
///
/// `decision` guards feasibility, orthogonality and normalization
/// decisions; `identity` guards checks that should hold at machine
/// precision (identities of exact linear algebra). Both leave ample
/// double-precision headroom at the dimensions handled here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub decision: f64,
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            decision: 1e-9,
            identity: 1e-12,
        }
    }
}
