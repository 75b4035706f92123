use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_hermitian, CMatrix};
use crate::math;
use crate::qcore::layout::CompositeLayout;
use crate::qcore::Tolerances;

/// Pure state over a composite finite-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amplitudes: Vec<Complex64>,
    layout: CompositeLayout,
}

impl Ket {
    /// Validates length against the layout and squared norm against 1.
    pub fn new(amplitudes: Vec<Complex64>, layout: CompositeLayout) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: amplitudes.len(),
            });
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let dev = math::abs(norm_sqr - 1.0);
        if dev > Tolerances::default().decision {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { amplitudes, layout })
    }

    /// Rescales the amplitudes to unit norm before constructing.
    pub fn new_normalized(mut amplitudes: Vec<Complex64>, layout: CompositeLayout) -> Result<Self> {
        let norm: f64 = math::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum());
        if norm == 0.0 {
            return Err(Error::NotNormalized(1.0));
        }
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        Self::new(amplitudes, layout)
    }

    /// Computational basis vector `|index>`.
    pub fn basis_state(layout: CompositeLayout, index: usize) -> Result<Self> {
        if index >= layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: index,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, layout })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn layout(&self) -> &CompositeLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.amplitudes.iter().map(|a| a.norm_sqr()).sum())
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch);
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product with concatenated layout.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amplitudes = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(Ket { amplitudes, layout })
    }

    /// Projector `|psi><psi|` as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: CMatrix::outer(&self.amplitudes, &self.amplitudes),
            layout: self.layout.clone(),
        }
    }
}

/// Statistical state: Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    layout: CompositeLayout,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity and unit trace. Positivity is not
    /// checked on every construction (it costs an eigendecomposition);
    /// use [`DensityMatrix::min_eigenvalue`] where it matters.
    pub fn new(matrix: CMatrix, layout: CompositeLayout) -> Result<Self> {
        if matrix.rows() != layout.dim() || matrix.cols() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: matrix.rows(),
            });
        }
        let tol = Tolerances::default();
        let herm = matrix.hermiticity_deviation();
        if herm > tol.decision {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        let dev = math::hypot(tr.re - 1.0, tr.im);
        if dev > tol.decision {
            return Err(Error::NotNormalized(dev));
        }
        Ok(Self { matrix, layout })
    }

    pub fn from_pure(psi: &Ket) -> Self {
        psi.density()
    }

    /// Maximally mixed state `I / d`.
    pub fn maximally_mixed(layout: CompositeLayout) -> Self {
        let d = layout.dim();
        let matrix = CMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
        Self { matrix, layout }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn layout(&self) -> &CompositeLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let eig = eigen_hermitian(&self.matrix);
        *eig.values.last().unwrap()
    }

    /// Kronecker product with concatenated layout.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
            layout,
        })
    }

    /// Reduced state on the `keep` subsystems (in layout order), obtained
    /// by tracing out everything else.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        partial_trace(self, keep)
    }

    /// Convex combination helper used by gemenge conversion.
    pub(crate) fn weighted_sum(parts: &[(CMatrix, f64)], layout: CompositeLayout) -> Result<Self> {
        let d = layout.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (m, w) in parts {
            acc = acc.add(&m.scale(Complex64::new(*w, 0.0)));
        }
        DensityMatrix::new(acc, layout)
    }
}

/// Partial trace of `rho` onto the `keep` subsystems.
///
/// Kept subsystems retain their relative order from the original layout;
/// trace and Hermiticity are preserved by construction.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> Result<DensityMatrix> {
    let layout = rho.layout();
    for l in keep {
        if !layout.contains(l) {
            return Err(Error::UnknownLabel((*l).into()));
        }
    }
    let kept_layout = layout.sub_layout(keep)?;
    let n = layout.len();
    let dims = layout.dims();
    let kept_positions: Vec<usize> = (0..n)
        .filter(|&i| keep.contains(&layout.parts()[i].label()))
        .collect();
    let traced_positions: Vec<usize> = (0..n).filter(|i| !kept_positions.contains(i)).collect();

    let kept_dim = kept_layout.dim();
    let traced_dim: usize = traced_positions.iter().map(|&i| dims[i]).product();

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    let mut row_multi = vec![0usize; n];
    let mut col_multi = vec![0usize; n];
    let mut kept_row = vec![0usize; kept_positions.len()];
    let mut kept_col = vec![0usize; kept_positions.len()];
    let mut traced = vec![0usize; traced_positions.len()];

    for i in 0..kept_dim {
        kept_layout.decode(i, &mut kept_row);
        for j in 0..kept_dim {
            kept_layout.decode(j, &mut kept_col);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                // Expand the traced flat index over the traced positions.
                let mut rem = t;
                for (slot, &pos) in traced.iter_mut().zip(traced_positions.iter()).rev() {
                    *slot = rem % dims[pos];
                    rem /= dims[pos];
                }
                for (k, &pos) in kept_positions.iter().enumerate() {
                    row_multi[pos] = kept_row[k];
                    col_multi[pos] = kept_col[k];
                }
                for (k, &pos) in traced_positions.iter().enumerate() {
                    row_multi[pos] = traced[k];
                    col_multi[pos] = traced[k];
                }
                acc += rho.matrix()[(layout.encode(&row_multi), layout.encode(&col_multi))];
            }
            out[(i, j)] = acc;
        }
    }

    Ok(DensityMatrix {
        matrix: out,
        layout: kept_layout,
    })
}

/// Trace distance `(1/2) * sum |eigenvalues(r1 - r2)|`, in [0, 1].
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.layout() != r2.layout() {
        return Err(Error::LayoutMismatch);
    }
    let diff = r1.matrix().sub(r2.matrix());
    let eig = eigen_hermitian(&diff);
    Ok(0.5 * eig.values.iter().map(|v| math::abs(*v)).sum::<f64>())
}
