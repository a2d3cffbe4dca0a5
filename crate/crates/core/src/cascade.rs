//! Two-stage filter cascades: the first-stage circulant operator (not
//! unitary in general), its unitary dilation with explicit subnormalization,
//! the second-stage unitary, and their composition, whose designated row
//! carries the convolved tap sequence.

use num_complex::Complex64;

use crate::encoding::{choose_qubits, ScalePolicy, StateVector};
use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::linalg::{
    clamped_sqrt, complete_to_unitary, psd_sqrt, spectral_norm, ComplexMatrix,
    UnitarityCertificate, STRUCTURAL_TOL,
};

/// Relative cushion on the subnormalization so the scaled operator sits
/// strictly inside the unit ball despite roundoff.
const ALPHA_CUSHION: f64 = 1e-12;

/// A literal-form dilation whose unitarity residual exceeds this is refused
/// for simulation; below it, the form is close enough to study.
pub const LITERAL_RESIDUAL_TOL: f64 = 1e-8;

/// Which dilation to build for the non-unitary first stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DilationMode {
    /// [[A, sqrt(I-AA*)], [sqrt(I-A*A), -A*]] on the subnormalized A; always
    /// unitary.
    Exact,
    /// [[A, B], [B, -A]] with B = sqrt(I-AA*) on the unscaled operator; only
    /// unitary in special cases, kept for fidelity experiments.
    PaperLiteral,
}

/// A matrix paired with the subnormalization that makes it a contraction,
/// plus the certificate of its exact dilation.
#[derive(Debug, Clone)]
pub struct ScaledOperator {
    matrix: ComplexMatrix,
    alpha: f64,
    certificate: UnitarityCertificate,
}

impl ScaledOperator {
    /// Wraps any finite matrix: alpha = max(1, sigma_max) with a relative
    /// cushion, and the certificate measures the exact dilation of
    /// matrix/alpha.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                detail: format!(
                    "can only subnormalize a square matrix, got {}x{}",
                    matrix.rows(),
                    matrix.cols()
                ),
            });
        }
        let sigma = spectral_norm(&matrix)?;
        let alpha = sigma.max(1.0) * (1.0 + ALPHA_CUSHION);
        let dilation = exact_dilation(&matrix.scaled(1.0 / alpha))?;
        let certificate = UnitarityCertificate::measure(&dilation, STRUCTURAL_TOL);
        Ok(Self {
            matrix,
            alpha,
            certificate,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn certificate(&self) -> UnitarityCertificate {
        self.certificate
    }
}

/// A dilation matrix together with its measured unitarity.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub matrix: ComplexMatrix,
    pub certificate: UnitarityCertificate,
}

/// First-stage operator for a pair of 2-tap coefficients: the 4x4 pattern
/// with normalized (a1, b1) cycled through the top 3x3 block and the
/// normalization slot passed through.
pub fn build_u1(a1: Complex64, b1: Complex64) -> Result<ScaledOperator> {
    let f = FilterSpec::new(vec![a1, b1])?;
    let n = f.tap_norm();
    let a = a1 / n;
    let b = b1 / n;
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    let matrix = ComplexMatrix::from_rows(&[
        vec![a, z, b, z],
        vec![b, a, z, z],
        vec![z, b, a, z],
        vec![z, z, z, one],
    ])?;
    ScaledOperator::from_matrix(matrix)
}

/// First-stage operator for a d1-tap first factor inside a cascade of d
/// total taps: normalized taps cycled through the top d x d block (row r
/// carries tap i at column (r - i) mod d), identity on the remaining rows.
/// Reduces to [`build_u1`]'s pattern for d1 = 2, d = 3, dim = 4.
pub fn build_general_u1(f1: &FilterSpec, d: usize, dim: usize) -> Result<ScaledOperator> {
    let d1 = f1.d();
    if d1 > d {
        return Err(Error::ArityMismatch {
            detail: format!("first stage has {d1} taps but the cascade covers only {d} total"),
        });
    }
    if dim < d + 1 {
        return Err(Error::DimensionMismatch {
            detail: format!("dimension {dim} too small for {d} taps plus the normalization slot"),
        });
    }
    let n = f1.tap_norm();
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for r in 0..d {
        for (i, tap) in f1.taps().iter().enumerate() {
            matrix.set(r, (r + d - i) % d, tap / n);
        }
    }
    for r in d..dim {
        matrix.set(r, r, Complex64::ONE);
    }
    ScaledOperator::from_matrix(matrix)
}

/// Builds the requested dilation of a subnormalized operator.
///
/// Exact mode always succeeds and passes unitarity. Paper-literal mode uses
/// the unscaled operator; when its spectral norm exceeds 1 the radicand is
/// indefinite and the mode refuses with the measured residual of the
/// best-effort (negative eigenvalues clamped) literal block.
pub fn dilate(s: &ScaledOperator, mode: DilationMode) -> Result<Dilation> {
    match mode {
        DilationMode::Exact => {
            let matrix = exact_dilation(&s.matrix.scaled(1.0 / s.alpha))?;
            let certificate = UnitarityCertificate::measure(&matrix, STRUCTURAL_TOL);
            if !certificate.passes() {
                return Err(Error::CertificateFailure {
                    residual: certificate.residual,
                    tolerance: certificate.tolerance,
                });
            }
            Ok(Dilation {
                matrix,
                certificate,
            })
        }
        DilationMode::PaperLiteral => {
            let sigma = spectral_norm(&s.matrix)?;
            let matrix = literal_dilation(&s.matrix)?;
            let certificate = UnitarityCertificate::measure(&matrix, LITERAL_RESIDUAL_TOL);
            if sigma > 1.0 + STRUCTURAL_TOL {
                return Err(Error::NotAContraction {
                    sigma_max: sigma,
                    literal_residual: certificate.residual,
                });
            }
            Ok(Dilation {
                matrix,
                certificate,
            })
        }
    }
}

fn exact_dilation(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let adj = a.adjoint();
    let b_top = psd_sqrt(&id.sub(&a.mul(&adj)?)?)?;
    let b_bot = psd_sqrt(&id.sub(&adj.mul(a)?)?)?;
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, a.get(i, j));
            m.set(i, j + n, b_top.get(i, j));
            m.set(i + n, j, b_bot.get(i, j));
            m.set(i + n, j + n, -adj.get(i, j));
        }
    }
    Ok(m)
}

fn literal_dilation(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    // Negative eigenvalues of the radicand (present whenever sigma_max > 1)
    // clamp to zero: the caller reports how non-unitary the result is.
    let b = clamped_sqrt(&id.sub(&a.mul(&a.adjoint())?)?)?;
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, a.get(i, j));
            m.set(i, j + n, b.get(i, j));
            m.set(i + n, j, b.get(i, j));
            m.set(i + n, j + n, -a.get(i, j));
        }
    }
    Ok(m)
}

/// Second-stage 4x4 unitary for 2-tap coefficients (a2, b2). Real pairs use
/// the closed form verbatim, including the negated a entry at (1, 1), which
/// is a reflection and hence unitary; complex pairs keep only the two rows
/// that matter (the tap row and the normalization slot) and complete the
/// rest.
pub fn build_u2(a2: Complex64, b2: Complex64) -> Result<ComplexMatrix> {
    let f = FilterSpec::new(vec![a2, b2])?;
    let n = f.tap_norm();
    let a = a2 / n;
    let b = b2 / n;
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    if a2.im == 0.0 && b2.im == 0.0 {
        let m = ComplexMatrix::from_rows(&[
            vec![one, z, z, z],
            vec![z, -a, b, z],
            vec![z, b, a, z],
            vec![z, z, z, one],
        ])?;
        let certificate = UnitarityCertificate::measure(&m, STRUCTURAL_TOL);
        if !certificate.passes() {
            return Err(Error::CertificateFailure {
                residual: certificate.residual,
                tolerance: certificate.tolerance,
            });
        }
        Ok(m)
    } else {
        let row2 = vec![z, b, a, z];
        let mut row3 = vec![z; 4];
        row3[3] = one;
        complete_to_unitary(&[(2, row2), (3, row3)], 4)
    }
}

/// Second-stage unitary for a d2-tap second factor: reversed normalized
/// taps in row d-1 at columns d-d2 .. d-1, normalization slot pinned,
/// everything else completed. Multiplying by the first-stage circulant puts
/// the normalized tap convolution into row d-1.
pub fn build_general_u2(f2: &FilterSpec, d: usize, dim: usize) -> Result<ComplexMatrix> {
    let d2 = f2.d();
    if d2 > d {
        return Err(Error::ArityMismatch {
            detail: format!("second stage has {d2} taps but the cascade covers only {d} total"),
        });
    }
    if dim < d + 1 {
        return Err(Error::DimensionMismatch {
            detail: format!("dimension {dim} too small for {d} taps plus the normalization slot"),
        });
    }
    let n = f2.tap_norm();
    let mut tap_row = vec![Complex64::ZERO; dim];
    for (j, tap) in f2.taps().iter().enumerate() {
        tap_row[d - 1 - j] = tap / n;
    }
    let mut last = vec![Complex64::ZERO; dim];
    last[dim - 1] = Complex64::ONE;
    complete_to_unitary(&[(d - 1, tap_row), (dim - 1, last)], dim)
}

/// Doubles the second stage onto the dilated space: Z tensor u2, i.e.
/// block-diag(u2, -u2).
pub fn extend_u2(u2: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !u2.is_square() || !u2.rows().is_power_of_two() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "second-stage extension needs a square power-of-two matrix, got {}x{}",
                u2.rows(),
                u2.cols()
            ),
        });
    }
    let n = u2.rows();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            m.set(i, j, u2.get(i, j));
            m.set(i + n, j + n, -u2.get(i, j));
        }
    }
    Ok(m)
}

/// The composed cascade operator and its bookkeeping.
#[derive(Debug, Clone)]
pub struct CascadeOperator {
    u1_dilated: ComplexMatrix,
    u2_extended: ComplexMatrix,
    composed: ComplexMatrix,
    alpha: f64,
    mode: DilationMode,
}

impl CascadeOperator {
    pub fn u1_dilated(&self) -> &ComplexMatrix {
        &self.u1_dilated
    }

    pub fn u2_extended(&self) -> &ComplexMatrix {
        &self.u2_extended
    }

    pub fn composed(&self) -> &ComplexMatrix {
        &self.composed
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> DilationMode {
        self.mode
    }

    /// Upper-left half-dimension block of the composition; carries the
    /// subnormalized second-stage-times-first-stage product.
    pub fn top_left_block(&self) -> ComplexMatrix {
        let n = self.composed.rows() / 2;
        let mut block = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                block.set(i, j, self.composed.get(i, j));
            }
        }
        block
    }

    /// Effective cascaded taps read from the designated row of the top-left
    /// block, reversed back to tap order. Still carries the 1/(norm product
    /// times alpha) scaling of the block.
    pub fn effective_taps(&self, d: usize) -> Vec<Complex64> {
        let block = self.top_left_block();
        (0..d).map(|i| block.get(d - 1, d - 1 - i)).collect()
    }

    /// Worst unitarity residual across both factors and the composition.
    pub fn max_residual(&self) -> f64 {
        self.u1_dilated
            .unitarity_residual()
            .max(self.u2_extended.unitarity_residual())
            .max(self.composed.unitarity_residual())
    }
}

/// Composes the extended second stage with the dilated first stage. Both
/// factors must hold unitarity at the mode's tolerance; the paper-literal
/// tolerance is looser but a residual beyond it refuses to simulate.
pub fn compose(
    u1d: &ComplexMatrix,
    u2e: &ComplexMatrix,
    alpha: f64,
    mode: DilationMode,
) -> Result<CascadeOperator> {
    if !u1d.is_square() || u1d.rows() != u2e.rows() || u1d.cols() != u2e.cols() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "cannot compose {}x{} with {}x{}",
                u2e.rows(),
                u2e.cols(),
                u1d.rows(),
                u1d.cols()
            ),
        });
    }
    let tolerance = match mode {
        DilationMode::Exact => STRUCTURAL_TOL,
        DilationMode::PaperLiteral => LITERAL_RESIDUAL_TOL,
    };
    for factor in [u1d, u2e] {
        let certificate = UnitarityCertificate::measure(factor, tolerance);
        if !certificate.passes() {
            return Err(Error::CertificateFailure {
                residual: certificate.residual,
                tolerance,
            });
        }
    }
    let composed = u2e.mul(u1d)?;
    Ok(CascadeOperator {
        u1_dilated: u1d.clone(),
        u2_extended: u2e.clone(),
        composed,
        alpha,
        mode,
    })
}

/// Runs the cascade on an encoded window state: the input rides in the
/// upper block (ancilla zero), and the designated amplitude of the output
/// holds the cascaded filter result divided by alpha.
pub fn cascaded_output(c: &CascadeOperator, x: &StateVector) -> Result<StateVector> {
    let dim = c.composed.rows();
    if x.dim() * 2 != dim {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "cascade operator dimension {dim} wants a state of dimension {}, got {}",
                dim / 2,
                x.dim()
            ),
        });
    }
    let mut vector = x.amplitudes().to_vec();
    vector.resize(dim, Complex64::ZERO);
    StateVector::new(c.composed.mul_vec(&vector)?)
}

/// End-to-end cascade of two FIR filters as one operator pipeline.
#[derive(Debug, Clone)]
pub struct CascadedFilter {
    f1: FilterSpec,
    f2: FilterSpec,
    operator: CascadeOperator,
    d: usize,
    m: u32,
    pair_norm: f64,
}

impl CascadedFilter {
    /// Builds both stages for filters of any tap counts, dilates the first,
    /// extends the second, and composes them. The effective filter has
    /// d1 + d2 - 1 taps on choose_qubits(d) + 1 qubits.
    pub fn build(f1: FilterSpec, f2: FilterSpec, mode: DilationMode) -> Result<Self> {
        let d = f1.d() + f2.d() - 1;
        let m = choose_qubits(d);
        let dim = 1usize << m;
        let u1 = build_general_u1(&f1, d, dim)?;
        let u2 = build_general_u2(&f2, d, dim)?;
        let u1d = dilate(&u1, mode)?;
        let u2e = extend_u2(&u2)?;
        let operator = compose(&u1d.matrix, &u2e, u1.alpha(), mode)?;
        let pair_norm = f1.tap_norm() * f2.tap_norm();
        Ok(Self {
            f1,
            f2,
            operator,
            d,
            m,
            pair_norm,
        })
    }

    pub fn first(&self) -> &FilterSpec {
        &self.f1
    }

    pub fn second(&self) -> &FilterSpec {
        &self.f2
    }

    pub fn operator(&self) -> &CascadeOperator {
        &self.operator
    }

    /// Effective tap count d1 + d2 - 1.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Qubits of the window state; the operator acts on one more.
    pub fn qubits(&self) -> u32 {
        self.m
    }

    pub fn alpha(&self) -> f64 {
        self.operator.alpha()
    }

    /// Product of the two stage tap norms.
    pub fn pair_norm(&self) -> f64 {
        self.pair_norm
    }

    /// What the designated output amplitude must be multiplied by to undo
    /// both stage normalizations and the subnormalization.
    pub fn output_scale(&self) -> f64 {
        self.pair_norm * self.operator.alpha()
    }

    pub fn output_slot(&self) -> usize {
        self.d - 1
    }

    pub fn run_window(&self, x: &StateVector) -> Result<StateVector> {
        cascaded_output(&self.operator, x)
    }

    /// Recovers |y[n]| of the cascaded filter from the probability at the
    /// output slot.
    pub fn reconstruct_magnitude(&self, p: f64, s: &ScalePolicy) -> f64 {
        p.sqrt() * self.output_scale() * s.max_amplitude() * (s.d() as f64).sqrt()
    }
}
