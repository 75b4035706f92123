//! Dense complex matrices and the two decompositions the toolkit needs:
//! a cyclic Jacobi eigensolver for Hermitian matrices and a one-sided
//! Jacobi SVD used for nullspace extraction.
//!
//! Everything here targets small matrices (dimension at most a few
//! hundred), where Jacobi iteration is simple, allocation-light and
//! accurate to within a few ulps of the spectral data.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};
use num_complex::Complex64;

use crate::math;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    /// Builds a matrix from a flat row-major slice of (re, im) pairs.
    pub fn from_reals(rows: usize, cols: usize, entries: &[(f64, f64)]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            data: entries.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(rhs.data.iter()) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest deviation from the conjugate transpose.
    pub fn hermiticity_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > dev {
                    dev = d;
                }
            }
        }
        dev
    }

    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Outer product `v w†`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> CMatrix {
        let mut out = CMatrix::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                out[(i, j)] = v[i] * w[j].conj();
            }
        }
        out
    }

    /// Matrix power by repeated multiplication (exponents stay small here).
    pub fn pow(&self, l: u32) -> CMatrix {
        assert_eq!(self.rows, self.cols);
        let mut out = CMatrix::identity(self.rows);
        for _ in 0..l {
            out = out.mul(self);
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as matrix columns, ordered like `values`.
    pub vectors: CMatrix,
}

/// Cyclic complex Jacobi iteration. The rotation that annihilates the
/// (p, q) entry of a Hermitian matrix is a phase times a real Givens
/// rotation; sweeps continue until the off-diagonal mass hits the
/// machine floor.
pub fn eigen_hermitian(m: &CMatrix) -> HermitianEigen {
    assert_eq!(m.rows(), m.cols(), "eigen of non-square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);

    let frob = a.frobenius_norm();
    let floor = frob * 1e-15 * (n as f64);

    for _sweep in 0..80 {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if math::sqrt(2.0 * off) <= floor {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= floor * 1e-2 || r == 0.0 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let u = phase.conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let zeta = (aqq - app) / (2.0 * r);
                let t = math::signum(zeta) / (math::abs(zeta) + math::hypot(1.0, zeta));
                let c = 1.0 / math::hypot(1.0, t);
                let s = t * c;

                // Columns: col_p' = c col_p - u s col_q ; col_q' = s col_p + u c col_q
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * (u * s);
                    a[(k, q)] = akp * s + akq * (u * c);
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * (u * s);
                    v[(k, q)] = vkp * s + vkq * (u * c);
                }
                // Rows: row_p' = c row_p - conj(u) s row_q ; row_q' = s row_p + conj(u) c row_q
                let uc = u.conj();
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * (uc * s);
                    a[(q, k)] = apk * s + aqk * (uc * c);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());

    let mut sorted_values = Vec::with_capacity(n);
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sorted_values.push(values[src]);
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }

    HermitianEigen {
        values: sorted_values,
        vectors,
    }
}

/// Right singular subspace data of a real matrix.
#[derive(Debug, Clone)]
pub struct Nullspace {
    /// All singular values, descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of the nullspace (right singular vectors whose
    /// singular value falls below the relative threshold).
    pub basis: Vec<Vec<f64>>,
}

/// One-sided Jacobi SVD restricted to what nullspace extraction needs.
///
/// Columns of the working copy are orthogonalized pairwise; the right
/// rotations are accumulated so that, at convergence, column norms are
/// the singular values and the accumulated matrix holds the right
/// singular vectors. Singular values at or below `rel_tol` times the
/// largest one are treated as zero (scale-invariant rank decision).
#[allow(clippy::needless_range_loop)] // paired row rotations need the raw index
pub fn nullspace(matrix: &[Vec<f64>], cols: usize, rel_tol: f64) -> Nullspace {
    let m = matrix.len().max(cols);
    // Column-major working copy, zero-padded so m >= cols.
    let mut u: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            (0..m)
                .map(|i| if i < matrix.len() { matrix[i][j] } else { 0.0 })
                .collect()
        })
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let eps = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..cols {
            for j in (i + 1)..cols {
                let mut a = 0.0;
                let mut b = 0.0;
                let mut g = 0.0;
                for k in 0..m {
                    a += u[i][k] * u[i][k];
                    b += u[j][k] * u[j][k];
                    g += u[i][k] * u[j][k];
                }
                if math::abs(g) <= eps * math::sqrt(a * b) || g == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = math::signum(zeta) / (math::abs(zeta) + math::hypot(1.0, zeta));
                let c = 1.0 / math::hypot(1.0, t);
                let s = t * c;
                for k in 0..m {
                    let uik = u[i][k];
                    let ujk = u[j][k];
                    u[i][k] = c * uik - s * ujk;
                    u[j][k] = s * uik + c * ujk;
                }
                for k in 0..cols {
                    let vik = v[i][k];
                    let vjk = v[j][k];
                    v[i][k] = c * vik - s * vjk;
                    v[j][k] = s * vik + c * vjk;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<(f64, usize)> = (0..cols)
        .map(|j| {
            let norm: f64 = u[j].iter().map(|x| x * x).sum();
            (math::sqrt(norm), j)
        })
        .collect();
    sigma.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let sigma_max = sigma.first().map(|s| s.0).unwrap_or(0.0);
    let threshold = rel_tol * sigma_max;
    let mut basis = Vec::new();
    for &(s, j) in &sigma {
        if sigma_max == 0.0 || s <= threshold {
            basis.push(v[j].clone());
        }
    }

    Nullspace {
        singular_values: sigma.into_iter().map(|s| s.0).collect(),
        basis,
    }
}
