//! Dense complex linear algebra for the small matrices HHL works with.
//!
//! Everything here is sized for dimension ≤ 64: Hermitian eigendecomposition
//! by cyclic Jacobi rotations, exponentials `e^{iAt}` built from the
//! eigenbasis, Gaussian elimination with partial pivoting, and the state
//! fidelity metric.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use thiserror::Error;

/// Largest dimension the dense routines accept.
pub const MAX_DIM: usize = 64;

/// Tolerance for the Hermitian / symmetric check.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Tolerance for the unitarity check.
pub const UNITARY_TOL: f64 = 1e-10;

/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// fraction of the full Frobenius norm.
pub const JACOBI_OFF_TOL: f64 = 1e-14;

pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Pivots smaller than this in magnitude mark the matrix singular.
pub const PIVOT_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} outside supported range 1..={MAX_DIM}")]
    UnsupportedDimension(usize),
    #[error("matrix is not symmetric with real entries")]
    NotSymmetric,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("zero vector has no defined state")]
    ZeroVector,
    #[error("Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps")]
    NoConvergence,
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries; the entry count must be a
    /// perfect square.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self, LinalgError> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() || dim == 0 {
            return Err(LinalgError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(entries)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.dim).map(|i| self[(i, j)]).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim, v.dim(), "apply dimension mismatch");
        let n = self.dim;
        ComplexVector::new((0..n).map(|i| (0..n).map(|j| self[(i, j)] * v[j]).sum()).collect())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.dim)) <= tol
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap();
            if a[pivot * n + col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self(entries)
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨self, other⟩` with the first argument conjugated.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.iter().map(|&z| z * factor).collect())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// `V diag(f(λ)) V†`.
    pub fn reassemble<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn eigenvector(&self, k: usize) -> ComplexVector {
        self.eigenvectors.column(k)
    }
}

/// Eigendecomposition of a real symmetric matrix stored as complex.
pub fn eigendecompose_symmetric(a: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_real(HERMITIAN_TOL) || !a.is_hermitian(HERMITIAN_TOL) {
        return Err(LinalgError::NotSymmetric);
    }
    jacobi_hermitian(a)
}

/// Eigendecomposition of a complex Hermitian matrix.
pub fn eigendecompose_hermitian(a: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    if !a.is_hermitian(HERMITIAN_TOL) {
        return Err(LinalgError::NotHermitian);
    }
    jacobi_hermitian(a)
}

fn jacobi_hermitian(input: &ComplexMatrix) -> Result<EigenDecomposition, LinalgError> {
    let n = input.dim();
    if n == 0 || n > MAX_DIM {
        return Err(LinalgError::UnsupportedDimension(n));
    }
    let mut a = input.clone();
    // Symmetrize the strict triangles so roundoff in the input cannot bias
    // the rotations.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(LinalgError::NoConvergence);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        // Fix the phase: first non-negligible component real and positive.
        let lead = (0..n).map(|i| v[(i, k)]).find(|z| z.norm() > 1e-12).unwrap_or(ONE);
        let phase = lead.conj() / lead.norm();
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)] * phase;
        }
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Hermitian Jacobi rotation zeroing `a[p][q]`: `A ← G†AG`, `V ← VG`,
/// with `G = diag(1, e^{-iφ}) · R(θ)` on the `(p, q)` plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let unit = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * r).atan2(aqq - app);
    let (s, c) = theta.sin_cos();
    let phase = unit.conj();
    // G block: [[c, s], [-s·e^{-iφ}, c·e^{-iφ}]]
    let g = [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [phase * (-s), phase * c],
    ];

    // A ← A G (columns p, q)
    for i in 0..n {
        let (aip, aiq) = (a[(i, p)], a[(i, q)]);
        a[(i, p)] = aip * g[0][0] + aiq * g[1][0];
        a[(i, q)] = aip * g[0][1] + aiq * g[1][1];
    }
    // A ← G† A (rows p, q)
    for j in 0..n {
        let (apj, aqj) = (a[(p, j)], a[(q, j)]);
        a[(p, j)] = g[0][0].conj() * apj + g[1][0].conj() * aqj;
        a[(q, j)] = g[0][1].conj() * apj + g[1][1].conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for i in 0..n {
        let (vip, viq) = (v[(i, p)], v[(i, q)]);
        v[(i, p)] = vip * g[0][0] + viq * g[1][0];
        v[(i, q)] = vip * g[0][1] + viq * g[1][1];
    }
}

/// `e^{iAt}` for Hermitian `A`, assembled from the eigenbasis.
pub fn hamiltonian_exponential(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix, LinalgError> {
    let eig = eigendecompose_hermitian(a)?;
    Ok(eig.reassemble(|lambda| Complex64::from_polar(1.0, lambda * t)))
}

/// Solves `Ax = b` by Gaussian elimination with partial pivoting.
pub fn solve_direct(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector, LinalgError> {
    let n = a.dim();
    if b.dim() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    let mut m = a.entries().to_vec();
    let mut rhs = b.entries().to_vec();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| m[r * n + col].norm().total_cmp(&m[s * n + col].norm()))
            .unwrap();
        let pivot = m[pivot_row * n + col];
        if pivot.norm() < PIVOT_TOL {
            return Err(LinalgError::Singular {
                column: col,
                pivot: pivot.norm(),
            });
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            rhs.swap(col, pivot_row);
        }
        for r in col + 1..n {
            let factor = m[r * n + col] / pivot;
            if factor == ZERO {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[r * n + j] -= factor * v;
            }
            let v = rhs[col];
            rhs[r] -= factor * v;
        }
    }

    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= m[i * n + j] * x[j];
        }
        x[i] = acc / m[i * n + i];
    }
    Ok(ComplexVector::new(x))
}

/// `|⟨u/‖u‖, v/‖v‖⟩|²`.
pub fn vector_fidelity(u: &ComplexVector, v: &ComplexVector) -> Result<f64, LinalgError> {
    if u.dim() != v.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(LinalgError::ZeroVector);
    }
    let overlap = u.inner(v).norm() / (nu * nv);
    Ok((overlap * overlap).min(1.0))
}
