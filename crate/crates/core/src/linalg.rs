//! Dense complex linear algebra for Hilbert spaces of a few qubits.
//!
//! Matrices are stored row-major. Tensor factors follow the usual Kronecker
//! convention: subsystem 0 is the leftmost, slowest-varying factor.
//!
//! Matrix functions (exponential, logarithm, entropies) all go through the
//! Hermitian eigendecomposition in [`herm_eig`]; at dimension ≤ 64 this is
//! exact to machine precision.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};
#[allow(unused_imports)] // inherent f64 math shadows this whenever std is linked
use num_traits::Float;

use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Maximum entry-wise deviation from Hermiticity accepted on construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVE_EIGEN_TOL, 0)` are roundoff; below that the state is rejected.
pub const NEGATIVE_EIGEN_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exact zeros in `x ln x`.
pub const ZERO_EIGEN_CUTOFF: f64 = 1e-14;
/// Eigenvalue threshold defining the support of the second argument of the relative entropy.
pub const SUPPORT_TOL: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = re(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for col in 0..cols {
                m.data[r * cols + col] = f(r, col);
            }
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    /// Convenience for small literal matrices written with real entries.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, N, |r, col| re(rows[r][col]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = re(d);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, col| self[(col, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Kronecker product with `self` as the slower-varying block index.
    pub fn kron(&self, other: &ComplexMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for ar in 0..self.rows {
            for ac in 0..self.cols {
                let a = self[(ar, ac)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for br in 0..other.rows {
                    let row = ar * other.rows + br;
                    for bc in 0..other.cols {
                        out.data[row * cols + ac * other.cols + bc] = a * other[(br, bc)];
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &ComplexMatrix) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &ComplexMatrix) -> Self {
        &self.matmul(other) + &other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise deviation `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// `tr(A B)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        acc
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, col): (usize, usize)) -> &C64 {
        assert!(r < self.rows && col < self.cols, "matrix index out of bounds");
        &self.data[r * self.cols + col]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, col): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && col < self.cols, "matrix index out of bounds");
        &mut self.data[r * self.cols + col]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub dimension mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// A square matrix known to be Hermitian within [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), found: matrix.cols() });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        Ok(HermitianOperator { matrix })
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.hermiticity_deviation() <= HERMITIAN_TOL);
        HermitianOperator { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn add(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator { matrix: &self.matrix + &other.matrix }
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        HermitianOperator { matrix: self.matrix.scale_real(s) }
    }

    /// `⟨A⟩_ρ = tr(ρ A)`; real for Hermitian `ρ` and `A`.
    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        rho.trace_product(&self.matrix).re
    }

    /// Real diagonal of an operator that is diagonal in the computational basis.
    pub fn diagonal_real(&self) -> Vec<f64> {
        self.matrix.diagonal().into_iter().map(|z| z.re).collect()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// Decomposes an arbitrary square matrix after checking Hermiticity.
    pub fn of(matrix: &ComplexMatrix) -> Result<Self> {
        HermitianOperator::new(matrix.clone()).map(|h| herm_eig(&h))
    }

    /// `V diag(f(λ)) V†`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let fl: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fl[k] * v[(j, k)].conj()).sum())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_eigenvalues(re)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition with eigenvalues in descending order.
pub fn herm_eig(h: &HermitianOperator) -> Spectrum {
    let m = h.matrix();
    let n = m.dim();
    // Symmetrize exactly; the solver only reads one triangle.
    let herm = m.hermitian_part();
    let dm = nalgebra::DMatrix::<C64>::from_row_slice(n, n, herm.as_slice());
    let eig = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Spectrum { eigenvalues, eigenvectors }
}

/// `exp(-i θ h)`.
pub fn unitary_exp(h: &HermitianOperator, theta: f64) -> ComplexMatrix {
    if theta == 0.0 {
        return ComplexMatrix::identity(h.dim());
    }
    herm_eig(h).map_eigenvalues(|l| {
        let phase = -theta * l;
        c(phase.cos(), phase.sin())
    })
}

/// A validated state on a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (min eigenvalue ≥ −1e−10).
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(dims, matrix, NEGATIVE_EIGEN_TOL)
    }

    /// Like [`DensityMatrix::new`] with a caller-chosen negativity tolerance.
    pub fn with_tolerance(dims: Vec<usize>, matrix: ComplexMatrix, negative_tol: f64) -> Result<Self> {
        let total: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::invalid("subsystem dimensions must be positive"));
        }
        if !matrix.is_square() || matrix.rows() != total {
            return Err(Error::DimensionMismatch { expected: total, found: matrix.rows() });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { max_deviation: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { trace: tr.re });
        }
        let min = herm_eig(&HermitianOperator::new_unchecked(matrix.clone())).min_eigenvalue();
        if min < -negative_tol {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        DensityMatrix { dims, matrix }
    }

    /// State on `n` qubits.
    pub fn qubits(n: usize, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(vec![2; n], matrix)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Product state `self ⊗ other`; the factor lists are concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { dims, matrix: self.matrix.kron(&other.matrix) }
    }

    pub fn spectrum(&self) -> Spectrum {
        herm_eig(&HermitianOperator::new_unchecked(self.matrix.clone()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().min_eigenvalue()
    }

    /// Probabilities in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().into_iter().map(|z| z.re).collect()
    }

    /// `U ρ U†`, revalidated.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.dims.clone(), self.matrix.conjugate_by(u).hermitian_part())
    }
}

/// Partial trace of a raw matrix over all factors not listed in `keep`.
pub fn partial_trace_matrix(matrix: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = dims.len();
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one subsystem"));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= n) {
        return Err(Error::IndexOutOfRange { index: bad, len: n });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();

    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |which: &[usize]| -> Vec<usize> {
        let size: usize = which.iter().map(|&i| dims[i]).product();
        (0..size)
            .map(|mut flat| {
                let mut off = 0;
                for &i in which.iter().rev() {
                    off += (flat % dims[i]) * strides[i];
                    flat /= dims[i];
                }
                off
            })
            .collect()
    };
    let ok = offsets(&kept);
    let ot = offsets(&traced);
    let d = ok.len();
    Ok(ComplexMatrix::from_fn(d, d, |i, j| ot.iter().map(|&t| matrix[(ok[i] + t, ok[j] + t)]).sum()))
}

/// Reduced state on the factors in `keep` (order of factors preserved).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho.matrix(), rho.dims(), keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let dims = kept.iter().map(|&i| rho.dims[i]).collect();
    // A marginal of a valid state is valid; only Hermiticity drift is repaired here.
    Ok(DensityMatrix { dims, matrix: m.hermitian_part() })
}

fn entropy_of_eigenvalues(eigs: &[f64]) -> f64 {
    eigs.iter().filter(|&&l| l > ZERO_EIGEN_CUTOFF).map(|&l| -l * l.ln()).sum()
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_eigenvalues(&rho.spectrum().eigenvalues)
}

/// Entropy of a probability vector (the dephased state's spectrum).
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    entropy_of_eigenvalues(probs)
}

/// `S(ρ‖σ) = tr ρ ln ρ − tr ρ ln σ` in nats.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let neg_entropy = -von_neumann_entropy(rho);
    let sig = sigma.spectrum();
    let v = &sig.eigenvectors;
    let n = rho.dim();
    let mut cross = 0.0;
    for (k, &lam) in sig.eigenvalues.iter().enumerate() {
        // ⟨v_k|ρ|v_k⟩
        let mut w = C64::new(0.0, 0.0);
        for i in 0..n {
            let vi = v[(i, k)].conj();
            if vi == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                w += vi * rho.matrix()[(i, j)] * v[(j, k)];
            }
        }
        if lam <= SUPPORT_TOL {
            if w.re > SUPPORT_TOL {
                return Err(Error::SupportViolation);
            }
            continue;
        }
        cross += w.re * lam.ln();
    }
    Ok(neg_entropy - cross)
}
