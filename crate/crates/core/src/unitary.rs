//! The single-filter unitary: normalized taps pinned into one row, the
//! normalization slot fixed, everything else completed to a unitary. Running
//! it on an encoded window puts the filter output (scaled) into one
//! amplitude, whose measurement probability recovers |y[n]|.

use num_complex::Complex64;

use crate::encoding::{ScalePolicy, StateVector};
use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::linalg::{complete_to_unitary, ComplexMatrix, UnitarityCertificate, STRUCTURAL_TOL};

/// Unitary realization of one FIR filter on m qubits.
#[derive(Debug, Clone)]
pub struct FilterUnitary {
    matrix: ComplexMatrix,
    d: usize,
    m: u32,
    tap_norm: f64,
    certificate: UnitarityCertificate,
}

impl FilterUnitary {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn qubits(&self) -> u32 {
        self.m
    }

    pub fn tap_norm(&self) -> f64 {
        self.tap_norm
    }

    pub fn certificate(&self) -> UnitarityCertificate {
        self.certificate
    }

    /// Row index holding the filter output after application.
    pub fn output_slot(&self) -> usize {
        self.d - 1
    }
}

/// Measurement of a single basis-state probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Projector {
    pub index: usize,
}

impl Projector {
    /// The slot where a d-tap filter leaves its output.
    pub fn output_slot(d: usize) -> Self {
        Self { index: d - 1 }
    }
}

/// Builds the filter unitary on m qubits. Row d-1 holds the normalized taps
/// reversed (newest coefficient at column d-1, matching the oldest-first
/// window layout); the last row pins the normalization slot; every other row
/// is a deterministic orthonormal completion.
pub fn build_filter_unitary(f: &FilterSpec, m: u32) -> Result<FilterUnitary> {
    let d = f.d();
    let dim = 1usize << m;
    if dim < d + 1 {
        return Err(Error::DimensionMismatch {
            detail: format!("{m} qubits give dimension {dim}, too small for d = {d} plus the normalization slot"),
        });
    }
    let tap_norm = f.tap_norm();
    let mut tap_row = vec![Complex64::ZERO; dim];
    for (j, tap) in f.taps().iter().rev().enumerate() {
        tap_row[j] = tap / tap_norm;
    }
    let mut last_row = vec![Complex64::ZERO; dim];
    last_row[dim - 1] = Complex64::ONE;

    // The tap row lives in columns 0..d-1 and the last row in column dim-1,
    // so the pair is orthonormal by construction; completion cannot fail.
    let fixed = vec![(d - 1, tap_row), (dim - 1, last_row)];
    let matrix = complete_to_unitary(&fixed, dim)?;
    let certificate = UnitarityCertificate::measure(&matrix, STRUCTURAL_TOL);
    if !certificate.passes() {
        return Err(Error::CertificateFailure {
            residual: certificate.residual,
            tolerance: certificate.tolerance,
        });
    }
    Ok(FilterUnitary {
        matrix,
        d,
        m,
        tap_norm,
        certificate,
    })
}

/// Applies the unitary to an encoded window state.
pub fn apply(u: &FilterUnitary, x: &StateVector) -> Result<StateVector> {
    if x.dim() != u.matrix.rows() {
        return Err(Error::DimensionMismatch {
            detail: format!(
                "state dimension {} against operator dimension {}",
                x.dim(),
                u.matrix.rows()
            ),
        });
    }
    StateVector::new(u.matrix.mul_vec(x.amplitudes())?)
}

/// Probability of observing the projector's basis index on this state.
pub fn ideal_probability(y: &StateVector, pi: Projector) -> f64 {
    y.amplitude(pi.index).norm_sqr()
}

/// Undoes the two normalizations on a measured probability, recovering the
/// magnitude of the classical filter output: sqrt(p) * tap_norm * M * sqrt(d).
/// Exact for ideal probabilities, an estimator for sampled ones.
pub fn reconstruct_magnitude(p: f64, f: &FilterSpec, s: &ScalePolicy) -> f64 {
    p.sqrt() * f.tap_norm() * s.max_amplitude() * (s.d() as f64).sqrt()
}
