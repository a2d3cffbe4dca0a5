//! Dense complex matrices and the few decompositions the pipeline needs:
//! Hermitian eigensolve, positive semidefinite square root, spectral norm,
//! and completion of a partial orthonormal row set to a full unitary.
//!
//! Operators here are small (dimension at most 64), so cyclic Jacobi sweeps
//! and modified Gram-Schmidt are accurate, fast, and need nothing external.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Bound on structural checks: hermiticity of eigensolver input,
/// orthonormality of constraint rows, unitarity residuals.
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Bound on multiply-back checks: eigendecomposition reassembly and the
/// square of a PSD square root against the original matrix.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// A completion candidate whose residual norm falls below this after
/// orthogonalization is already spanned and gets skipped.
const COMPLETION_SKIP_TOL: f64 = 1e-8;

/// Jacobi sweep cap. Quadratic convergence lands well under this for any
/// dimension this crate handles.
const MAX_JACOBI_SWEEPS: usize = 64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Dimensions must be positive,
    /// the entry count must match, and every entry must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch {
                detail: format!("matrix dimensions {rows}x{cols} must be positive"),
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                detail: format!("{} entries supplied for a {rows}x{cols} matrix", data.len()),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entry",
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Builds a square matrix from whole rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    detail: format!("row of length {} in a {n}-column matrix", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, n, data)
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    /// Borrows row `i` as a slice.
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                detail: format!(
                    "cannot multiply {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                detail: format!("vector of length {} against {} columns", v.len(), self.cols),
            });
        }
        let mut out = vec![Complex64::ZERO; self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for (j, x) in v.iter().enumerate() {
                acc += self.get(i, j) * x;
            }
            *o = acc;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Entry-wise difference `self - other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                detail: format!(
                    "cannot subtract {}x{} from {}x{}",
                    other.rows, other.cols, self.rows, self.cols
                ),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-magnitude entry of `A A^dagger - I`. Zero for a perfect unitary.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::ZERO;
                for k in 0..n {
                    acc += self.get(i, k) * self.get(j, k).conj();
                }
                if i == j {
                    acc -= Complex64::ONE;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }
}

/// Outcome of measuring how far a matrix is from unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityCertificate {
    pub residual: f64,
    pub tolerance: f64,
}

impl UnitarityCertificate {
    /// Measures `m` against `tolerance`.
    pub fn measure(m: &ComplexMatrix, tolerance: f64) -> Self {
        Self {
            residual: m.unitarity_residual(),
            tolerance,
        }
    }

    pub fn passes(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// Conjugate inner product `<a|b>` (conjugation on the left argument).
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Subtracts from `v` its component along the unit vector `q`.
fn project_out(q: &[Complex64], v: &mut [Complex64]) {
    let overlap = inner(q, v);
    for (vi, qi) in v.iter_mut().zip(q.iter()) {
        *vi -= overlap * qi;
    }
}

fn hermitian_deviation(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a.get(i, j) - a.get(j, i).conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in ascending order and a matrix whose columns are the
/// matching eigenvectors, so `A = V diag(lambda) V^dagger`. Input must be
/// Hermitian within [`STRUCTURAL_TOL`].
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    hermitian_eig_with_tol(a, STRUCTURAL_TOL)
}

/// [`hermitian_eig`] with an explicit hermiticity tolerance.
pub fn hermitian_eig_with_tol(
    a: &ComplexMatrix,
    tolerance: f64,
) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "eigensolver needs a square matrix, got {}x{}",
                a.rows, a.cols
            ),
        });
    }
    let deviation = hermitian_deviation(a);
    if deviation > tolerance {
        return Err(Error::NonHermitianInput {
            deviation,
            tolerance,
        });
    }

    let n = a.rows();
    // Work on the exactly Hermitian average so roundoff asymmetry in the
    // input cannot leak into the rotations.
    let mut b = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            b.set(i, j, v);
        }
    }
    let mut v = ComplexMatrix::identity(n);

    let scale = b.max_abs().max(1.0);
    let threshold = scale * 1e-14;

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(b.get(p, q).norm());
            }
        }
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = b.get(p, q);
                let beta_abs = beta.norm();
                if beta_abs == 0.0 {
                    continue;
                }
                let phase = beta / beta_abs;
                let alpha = b.get(p, p).re;
                let gamma = b.get(q, q).re;
                let theta = (gamma - alpha) / (2.0 * beta_abs);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = phase * (t * c);

                // B <- G^dagger B G with G[p][p] = G[q][q] = c,
                // G[p][q] = s, G[q][p] = -conj(s).
                for k in 0..n {
                    let bkp = b.get(k, p);
                    let bkq = b.get(k, q);
                    b.set(k, p, bkp * c - bkq * s.conj());
                    b.set(k, q, bkp * s + bkq * c);
                }
                for k in 0..n {
                    let bpk = b.get(p, k);
                    let bqk = b.get(q, k);
                    b.set(p, k, bpk * c - bqk * s);
                    b.set(q, k, bpk * s.conj() + bqk * c);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c - vkq * s.conj());
                    v.set(k, q, vkp * s + vkq * c);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b.get(i, i).re.total_cmp(&b.get(j, j).re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| b.get(i, i).re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors.set(k, dst, v.get(k, src));
        }
    }
    Ok((eigenvalues, vectors))
}

/// Hermitian square root of a positive semidefinite matrix.
///
/// Eigenvalues inside `[-STRUCTURAL_TOL, 0)` count as roundoff and clamp to
/// zero; anything lower is a genuine negative direction and errors.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with_tol(a, STRUCTURAL_TOL)
}

/// [`psd_sqrt`] with an explicit clamp band for small negative eigenvalues.
pub fn psd_sqrt_with_tol(a: &ComplexMatrix, tolerance: f64) -> Result<ComplexMatrix> {
    let (eigenvalues, vectors) = hermitian_eig_with_tol(a, tolerance)?;
    if let Some(&min) = eigenvalues.first() {
        if min < -tolerance {
            return Err(Error::IndefiniteInput {
                min_eigenvalue: min,
            });
        }
    }
    Ok(rebuild_sqrt(&eigenvalues, &vectors, |x| x.max(0.0)))
}

/// Square root with every negative eigenvalue clamped, however large.
/// Diagnostic helper for quantifying how badly an indefinite radicand fails;
/// not a substitute for [`psd_sqrt`].
pub(crate) fn clamped_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (eigenvalues, vectors) = hermitian_eig(a)?;
    Ok(rebuild_sqrt(&eigenvalues, &vectors, |x| x.max(0.0)))
}

fn rebuild_sqrt(
    eigenvalues: &[f64],
    vectors: &ComplexMatrix,
    clamp: impl Fn(f64) -> f64,
) -> ComplexMatrix {
    let n = eigenvalues.len();
    let roots: Vec<f64> = eigenvalues.iter().map(|&l| clamp(l).sqrt()).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for (k, &r) in roots.iter().enumerate() {
                acc += vectors.get(i, k) * r * vectors.get(j, k).conj();
            }
            out.set(i, j, acc);
            // The result is Hermitian by construction; mirror instead of
            // recomputing so roundoff cannot break the symmetry.
            if i != j {
                out.set(j, i, acc.conj());
            } else {
                out.set(i, i, Complex64::new(acc.re, 0.0));
            }
        }
    }
    out
}

/// Largest singular value, computed as the root of the top eigenvalue of
/// `A^dagger A`. Works for rectangular input.
pub fn spectral_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = a.adjoint().mul(a)?;
    let (eigenvalues, _) = hermitian_eig(&gram)?;
    let top = eigenvalues.last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// Completes fixed orthonormal rows to a full unitary matrix.
///
/// `fixed` pairs a row index with the row to pin there; those rows are
/// copied into the result bit-for-bit. Remaining rows come from modified
/// Gram-Schmidt over the canonical basis vectors e_0, e_1, ... in ascending
/// index order, skipping candidates the span already covers, and fill the
/// free row indices in ascending order. The procedure is deterministic:
/// identical input yields an identical matrix.
pub fn complete_to_unitary(fixed: &[(usize, Vec<Complex64>)], dim: usize) -> Result<ComplexMatrix> {
    complete_to_unitary_with_tol(fixed, dim, STRUCTURAL_TOL)
}

/// [`complete_to_unitary`] with an explicit orthonormality tolerance.
pub fn complete_to_unitary_with_tol(
    fixed: &[(usize, Vec<Complex64>)],
    dim: usize,
    tolerance: f64,
) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::DimensionMismatch {
            detail: "cannot complete a 0-dimensional unitary".into(),
        });
    }
    if fixed.len() > dim {
        return Err(Error::DimensionMismatch {
            detail: format!("{} fixed rows exceed dimension {dim}", fixed.len()),
        });
    }
    let mut seen = vec![false; dim];
    for (index, row) in fixed {
        if *index >= dim {
            return Err(Error::DimensionMismatch {
                detail: format!("row index {index} outside dimension {dim}"),
            });
        }
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                detail: format!("fixed row of length {} in dimension {dim}", row.len()),
            });
        }
        if seen[*index] {
            return Err(Error::DimensionMismatch {
                detail: format!("row index {index} fixed twice"),
            });
        }
        seen[*index] = true;
        if !row.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "fixed row entry",
            });
        }
    }
    for (i, (index_a, row_a)) in fixed.iter().enumerate() {
        let norm_dev = (vec_norm(row_a) - 1.0).abs();
        if norm_dev > tolerance {
            return Err(Error::NonOrthonormalConstraint {
                detail: format!("row {index_a} norm deviates from 1 by {norm_dev:.3e}"),
            });
        }
        for (index_b, row_b) in fixed.iter().skip(i + 1) {
            let overlap = inner(row_a, row_b).norm();
            if overlap > tolerance {
                return Err(Error::NonOrthonormalConstraint {
                    detail: format!("rows {index_a} and {index_b} overlap by {overlap:.3e}"),
                });
            }
        }
    }

    let needed = dim - fixed.len();
    let mut generated: Vec<Vec<Complex64>> = Vec::with_capacity(needed);
    for k in 0..dim {
        if generated.len() == needed {
            break;
        }
        let mut v = vec![Complex64::ZERO; dim];
        v[k] = Complex64::ONE;
        // Two orthogonalization passes; the second scrubs the residue the
        // first leaves behind when a constraint row nearly contains e_k.
        for _ in 0..2 {
            for (_, q) in fixed {
                project_out(q, &mut v);
            }
            for q in &generated {
                project_out(q, &mut v);
            }
        }
        let remaining = vec_norm(&v);
        if remaining < COMPLETION_SKIP_TOL {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= remaining;
        }
        generated.push(v);
    }
    debug_assert_eq!(generated.len(), needed, "canonical basis spans everything");

    let mut out = ComplexMatrix::zeros(dim, dim);
    for (index, row) in fixed {
        for (j, &value) in row.iter().enumerate() {
            out.set(*index, j, value);
        }
    }
    let mut next = generated.into_iter();
    for (index, was_fixed) in seen.iter().enumerate() {
        if !was_fixed {
            let row = next.next().expect("one generated row per free index");
            for (j, value) in row.into_iter().enumerate() {
                out.set(index, j, value);
            }
        }
    }

    let residual = out.unitarity_residual();
    if residual > tolerance {
        return Err(Error::NonOrthonormalConstraint {
            detail: format!(
                "completed matrix has unitarity residual {residual:.3e}; \
                 constraint rows are too noisy"
            ),
        });
    }
    Ok(out)
}
