use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_hermitian, CMatrix};
use crate::math;
use crate::qcore::layout::CompositeLayout;
use crate::qcore::state::{DensityMatrix, Ket};
use crate::qcore::Tolerances;

/// Relative threshold for merging near-degenerate eigenvalues into one
/// spectral projector, measured against the spectral range. The
/// degeneracy structure (e.g. a two-dimensional null space) is what the
/// projector arguments rely on, so clustering is deliberately coarse.
pub const EIGEN_CLUSTER_REL: f64 = 1e-8;

/// Hermitian operator over a composite layout.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    matrix: CMatrix,
    layout: CompositeLayout,
}

impl HermitianObservable {
    pub fn new(matrix: CMatrix, layout: CompositeLayout) -> Result<Self> {
        if matrix.rows() != layout.dim() || matrix.cols() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: matrix.rows(),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > Tolerances::default().decision {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self { matrix, layout })
    }

    pub fn diagonal(layout: CompositeLayout, values: &[f64]) -> Result<Self> {
        if values.len() != layout.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                actual: values.len(),
            });
        }
        let mut m = CMatrix::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        Ok(Self { matrix: m, layout })
    }

    pub fn identity(layout: CompositeLayout) -> Self {
        let d = layout.dim();
        Self {
            matrix: CMatrix::identity(d),
            layout,
        }
    }

    /// Rank-1 projector `|psi><psi|`.
    pub fn projector_onto(psi: &Ket) -> Self {
        Self {
            matrix: CMatrix::outer(psi.amplitudes(), psi.amplitudes()),
            layout: psi.layout().clone(),
        }
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

    /// Embeds this observable into `target`, acting as the identity on
    /// every subsystem not in its own layout. The observable's labels
    /// must all appear in `target` (their relative order must match,
    /// which holds for all chain-built layouts).
    pub fn lift(&self, target: &CompositeLayout) -> Result<HermitianObservable> {
        if *target == self.layout {
            return Ok(self.clone());
        }
        let own_labels: Vec<&str> = self.layout.parts().iter().map(|p| p.label()).collect();
        let sub = target.sub_layout(&own_labels)?;
        if sub != self.layout {
            return Err(Error::LayoutMismatch);
        }
        let n = target.len();
        let dims = target.dims();
        let acting: Vec<usize> = (0..n)
            .filter(|&i| own_labels.contains(&target.parts()[i].label()))
            .collect();
        let d = target.dim();
        let mut out = CMatrix::zeros(d, d);
        let mut row = vec![0usize; n];
        let mut col = vec![0usize; n];
        let mut sub_row = vec![0usize; acting.len()];
        let mut sub_col = vec![0usize; acting.len()];
        for i in 0..d {
            target.decode(i, &mut row);
            for j in 0..d {
                target.decode(j, &mut col);
                // Identity on spectator subsystems.
                let spectators_match = (0..n)
                    .filter(|p| !acting.contains(p))
                    .all(|p| row[p] == col[p]);
                if !spectators_match {
                    continue;
                }
                for (k, &p) in acting.iter().enumerate() {
                    sub_row[k] = row[p];
                    sub_col[k] = col[p];
                }
                let _ = dims;
                out[(i, j)] = self.matrix[(
                    self.layout.encode(&sub_row),
                    self.layout.encode(&sub_col),
                )];
            }
        }
        Ok(HermitianObservable {
            matrix: out,
            layout: target.clone(),
        })
    }
}

/// Spectral data with degenerate eigenvalues merged into one projector.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Distinct eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal projectors, aligned with `eigenvalues`; they are
    /// idempotent, mutually orthogonal and resolve the identity.
    pub projectors: Vec<HermitianObservable>,
    /// Rank of each projector.
    pub multiplicities: Vec<usize>,
}

impl SpectralDecomposition {
    /// `sum_k g_k P_k`, for reconstruction checks.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.projectors[0].dim();
        let mut acc = CMatrix::zeros(d, d);
        for (g, p) in self.eigenvalues.iter().zip(self.projectors.iter()) {
            acc = acc.add(&p.matrix().scale(Complex64::new(*g, 0.0)));
        }
        acc
    }
}

/// Eigendecomposition with tolerance-based clustering of degenerate
/// eigenvalues (threshold [`EIGEN_CLUSTER_REL`] relative to the spectral
/// range).
pub fn spectral_decompose(obs: &HermitianObservable) -> SpectralDecomposition {
    let eig = eigen_hermitian(obs.matrix());
    let n = eig.values.len();
    let range = eig.values[0] - eig.values[n - 1];
    let gap = if range > 0.0 {
        range * EIGEN_CLUSTER_REL
    } else {
        0.0
    };

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut multiplicities = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end - 1] - eig.values[end] <= gap {
            end += 1;
        }
        let cluster = &eig.values[start..end];
        let rep = cluster.iter().sum::<f64>() / cluster.len() as f64;
        let mut proj = CMatrix::zeros(n, n);
        for k in start..end {
            let vk = eig.vectors.column(k);
            proj = proj.add(&CMatrix::outer(&vk, &vk));
        }
        eigenvalues.push(rep);
        projectors.push(HermitianObservable {
            matrix: proj,
            layout: obs.layout().clone(),
        });
        multiplicities.push(end - start);
        start = end;
    }

    SpectralDecomposition {
        eigenvalues,
        projectors,
        multiplicities,
    }
}

/// States that can report raw moments `<G^l>`. Implemented by [`Ket`]
/// (via repeated matrix-vector application) and [`DensityMatrix`] (via
/// `Tr(rho G^l)`).
pub trait QuantumState {
    fn layout(&self) -> &CompositeLayout;

    /// `<G^l>` for the raw complex matrix `m`, which must match this
    /// state's dimension.
    fn raw_moment(&self, m: &CMatrix, l: u32) -> Complex64;

    fn to_density(&self) -> DensityMatrix;
}

impl QuantumState for Ket {
    fn layout(&self) -> &CompositeLayout {
        Ket::layout(self)
    }

    fn raw_moment(&self, m: &CMatrix, l: u32) -> Complex64 {
        let mut v = self.amplitudes().to_vec();
        for _ in 0..l {
            v = m.matvec(&v);
        }
        self.amplitudes()
            .iter()
            .zip(v.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn to_density(&self) -> DensityMatrix {
        self.density()
    }
}

impl QuantumState for DensityMatrix {
    fn layout(&self) -> &CompositeLayout {
        DensityMatrix::layout(self)
    }

    fn raw_moment(&self, m: &CMatrix, l: u32) -> Complex64 {
        self.matrix().mul(&m.pow(l)).trace()
    }

    fn to_density(&self) -> DensityMatrix {
        self.clone()
    }
}

/// Expectation value `<G^l>`, with `l >= 1`.
///
/// If the observable lives on a sub-layout of the state it is lifted
/// (identity on the spectators) first. The imaginary residue of the
/// trace must vanish; it is asserted against the identity tolerance.
pub fn expectation_power<S: QuantumState>(
    state: &S,
    obs: &HermitianObservable,
    l: u32,
) -> Result<f64> {
    if l == 0 {
        return Err(Error::InvalidParameter("moment order must be >= 1"));
    }
    let value = if obs.layout() == state.layout() {
        state.raw_moment(obs.matrix(), l)
    } else {
        let lifted = obs.lift(state.layout())?;
        state.raw_moment(lifted.matrix(), l)
    };
    debug_assert!(
        math::abs(value.im) <= Tolerances::default().decision * (1.0 + math::abs(value.re)),
        "imaginary residue in Hermitian moment"
    );
    Ok(value.re)
}

/// Frobenius residual `|| G rho - g rho ||` of the direct eigenstate test.
pub fn eigen_residual(state: &DensityMatrix, obs: &HermitianObservable, g: f64) -> Result<f64> {
    let m = if obs.layout() == state.layout() {
        obs.matrix().clone()
    } else {
        obs.lift(state.layout())?.matrix().clone()
    };
    let g_rho = m.mul(state.matrix());
    let scaled = state.matrix().scale(Complex64::new(g, 0.0));
    Ok(g_rho.sub(&scaled).frobenius_norm())
}

/// Moment-criterion eigenstate test: `rho` is an eigenstate of `G` with
/// eigenvalue `g` exactly when `<G^l> = g^l` for every natural `l`. In
/// dimension `d` the first `d` moments already determine the restricted
/// spectral distribution, so the test stops there.
///
/// Returns the eigenvalue when the criterion holds within `tol`.
pub fn is_eigenstate<S: QuantumState>(
    state: &S,
    obs: &HermitianObservable,
    tol: f64,
) -> Result<Option<f64>> {
    let lifted;
    let m = if obs.layout() == state.layout() {
        obs.matrix()
    } else {
        lifted = obs.lift(state.layout())?;
        lifted.matrix()
    };
    let d = state.layout().dim() as u32;
    let scale = m.frobenius_norm().max(1.0);
    let g = state.raw_moment(m, 1).re;
    for l in 2..=d {
        let moment = state.raw_moment(m, l).re;
        let expected = math::powi(g, l as i32);
        if math::abs(moment - expected) > tol * math::powi(scale, l as i32) {
            return Ok(None);
        }
    }
    Ok(Some(g))
}
