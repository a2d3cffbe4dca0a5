//! Amplitude encoding of signal windows into state vectors: uniform
//! scaling, window extraction, and the sliding-window update.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filter::Signal;

/// Band of negative radicand values treated as roundoff when computing the
/// normalization amplitude; anything lower is a scaling error.
const RADICAND_TOL: f64 = 1e-12;

/// Uniform scaling rule: every sample is multiplied by 1/(M sqrt(d)) so a
/// d-sample window of amplitudes bounded by M fits inside a unit-norm state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePolicy {
    max_amplitude: f64,
    d: usize,
    factor: f64,
}

impl ScalePolicy {
    /// `max_amplitude` is the bound M on the samples the policy will scale.
    pub fn new(max_amplitude: f64, d: usize) -> Result<Self> {
        if !(max_amplitude.is_finite() && max_amplitude > 0.0) {
            return Err(Error::NonFinite {
                context: "scale bound",
            });
        }
        if d == 0 {
            return Err(Error::DimensionMismatch {
                detail: "scale policy needs d >= 1".into(),
            });
        }
        let factor = 1.0 / (max_amplitude * (d as f64).sqrt());
        Ok(Self {
            max_amplitude,
            d,
            factor,
        })
    }

    /// Batch-mode default: M is the largest sample magnitude in the signal.
    /// An all-zero signal has no scale of its own, so M falls back to 1.
    pub fn from_signal(x: &Signal, d: usize) -> Result<Self> {
        let peak = x.max_abs();
        Self::new(if peak > 0.0 { peak } else { 1.0 }, d)
    }

    pub fn max_amplitude(&self) -> f64 {
        self.max_amplitude
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }
}

/// Unit-norm complex amplitude vector on `m` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    m: u32,
}

impl StateVector {
    /// Length must be a power of two and the norm must be 1 within 1e-10.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::raw(amplitudes)?;
        let deviation = (state.norm_sqr() - 1.0).abs();
        if deviation > 1e-10 {
            return Err(Error::UnnormalizedState { deviation });
        }
        Ok(state)
    }

    /// Shape-checked but not norm-checked; lets diagnostics carry states a
    /// failed operator produced. Everything downstream still verifies norm.
    pub(crate) fn raw(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() || !amplitudes.len().is_power_of_two() {
            return Err(Error::DimensionMismatch {
                detail: format!("state length {} is not a power of two", amplitudes.len()),
            });
        }
        if !amplitudes
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
        {
            return Err(Error::NonFinite {
                context: "state amplitude",
            });
        }
        let m = amplitudes.len().trailing_zeros();
        Ok(Self { amplitudes, m })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Qubit count.
    pub fn qubits(&self) -> u32 {
        self.m
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Minimum qubit count for d samples plus the normalization slot.
pub fn choose_qubits(d: usize) -> u32 {
    (d + 1).next_power_of_two().trailing_zeros()
}

/// Encodes the d-sample window ending at time index `n`, oldest sample
/// first, with the normalization amplitude in the last slot. Samples before
/// the signal start count as zero.
pub fn encode_window(x: &Signal, n: usize, d: usize, s: &ScalePolicy) -> Result<StateVector> {
    if s.d() != d {
        return Err(Error::DimensionMismatch {
            detail: format!("scale policy built for d = {}, window has d = {d}", s.d()),
        });
    }
    if n >= x.len() {
        return Err(Error::DimensionMismatch {
            detail: format!("time index {n} outside signal of length {}", x.len()),
        });
    }
    let window: Vec<Complex64> = (0..d)
        .map(|i| x.at(n as isize - (d - 1 - i) as isize))
        .collect();
    encode_window_samples(&window, s)
}

/// Encodes an explicit window of raw samples (streaming form; the caller
/// supplies the window and the scale policy).
pub fn encode_window_samples(window: &[Complex64], s: &ScalePolicy) -> Result<StateVector> {
    let d = s.d();
    if window.len() != d {
        return Err(Error::DimensionMismatch {
            detail: format!("window of {} samples under a d = {d} policy", window.len()),
        });
    }
    let m = choose_qubits(d);
    let dim = 1usize << m;
    let mut amplitudes = vec![Complex64::ZERO; dim];
    let mut sum_sqr = 0.0;
    for (i, sample) in window.iter().enumerate() {
        let scaled = sample * s.factor();
        sum_sqr += scaled.norm_sqr();
        amplitudes[i] = scaled;
    }
    let radicand = 1.0 - sum_sqr;
    if radicand < -RADICAND_TOL {
        return Err(Error::ScaleOverflow {
            norm: sum_sqr.sqrt(),
        });
    }
    amplitudes[dim - 1] = Complex64::new(radicand.max(0.0).sqrt(), 0.0);
    StateVector::new(amplitudes)
}

/// Advances a window by one step: drops the oldest sample, appends the new
/// one.
pub fn slide_window(prev: &[Complex64], x_next: Complex64) -> Vec<Complex64> {
    let mut next = Vec::with_capacity(prev.len());
    if prev.len() > 1 {
        next.extend_from_slice(&prev[1..]);
    }
    next.push(x_next);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::CounterRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn qubit_counts() {
        assert_eq!(choose_qubits(1), 1);
        assert_eq!(choose_qubits(2), 2);
        assert_eq!(choose_qubits(3), 2);
        assert_eq!(choose_qubits(4), 3);
        assert_eq!(choose_qubits(7), 3);
        assert_eq!(choose_qubits(8), 4);
    }

    #[test]
    fn scale_policy_round_trip() {
        let s = ScalePolicy::new(2.0, 4).unwrap();
        assert!((s.factor() * s.max_amplitude() * 2.0 - 1.0).abs() <= 1e-12);
        assert!(ScalePolicy::new(0.0, 3).is_err());
        assert!(ScalePolicy::new(1.0, 0).is_err());
    }

    #[test]
    fn zero_signal_encodes_to_last_basis_vector() {
        let x = Signal::from_real(&[0.0; 6], 1.0).unwrap();
        let s = ScalePolicy::from_signal(&x, 3).unwrap();
        assert_eq!(s.max_amplitude(), 1.0); // fallback M for an all-zero signal
        let state = encode_window(&x, 4, 3, &s).unwrap();
        for i in 0..3 {
            assert_eq!(state.amplitude(i), Complex64::ZERO);
        }
        assert_eq!(state.amplitude(3), c(1.0, 0.0));
    }

    #[test]
    fn single_sample_window_is_the_right_triangle() {
        // Scaled sample 0.6 pairs with normalization 0.8.
        let x = Signal::from_real(&[0.6], 1.0).unwrap();
        let s = ScalePolicy::new(1.0, 1).unwrap();
        let state = encode_window(&x, 0, 1, &s).unwrap();
        assert_eq!(state.dim(), 2);
        assert!((state.amplitude(0).re - 0.6).abs() < 1e-15);
        assert!((state.amplitude(1).re - 0.8).abs() < 1e-15);
    }

    #[test]
    fn window_ordering_and_normalization_slot() {
        // Construct a signal whose scaled window is exactly (0.1, 0.2, 0.3):
        // M = 1 and d = 3 give factor 1/sqrt(3), so feed samples already
        // multiplied by sqrt(3).
        let r3 = 3.0f64.sqrt();
        let x = Signal::from_real(&[0.1 * r3, 0.2 * r3, 0.3 * r3], 1.0).unwrap();
        let s = ScalePolicy::new(1.0, 3).unwrap();
        let state = encode_window(&x, 2, 3, &s).unwrap();
        assert!((state.amplitude(0).re - 0.1).abs() <= 1e-15, "oldest first");
        assert!((state.amplitude(1).re - 0.2).abs() <= 1e-15);
        assert!((state.amplitude(2).re - 0.3).abs() <= 1e-15);
        let eta = state.amplitude(3).re;
        assert!((eta - 0.86f64.sqrt()).abs() <= 1e-12);
        assert!((eta - 0.9273618495495703).abs() <= 1e-12);
        assert!((state.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn interior_zero_slots_are_exact() {
        // d = 4 needs 8 slots: indices 4..6 stay exactly zero.
        let x = Signal::from_real(&[0.5, -0.5, 0.25, 0.1], 1.0).unwrap();
        let s = ScalePolicy::from_signal(&x, 4).unwrap();
        let state = encode_window(&x, 3, 4, &s).unwrap();
        assert_eq!(state.dim(), 8);
        for i in 4..7 {
            assert_eq!(state.amplitude(i), Complex64::ZERO);
        }
        assert!(state.amplitude(7).re > 0.0);
    }

    #[test]
    fn early_windows_zero_fill() {
        let x = Signal::from_real(&[0.3, 0.7, -0.2], 1.0).unwrap();
        let s = ScalePolicy::from_signal(&x, 3).unwrap();
        let direct = encode_window(&x, 0, 3, &s).unwrap();
        let padded = encode_window_samples(&[c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)], &s).unwrap();
        assert_eq!(direct, padded);
    }

    #[test]
    fn scale_overflow_detected() {
        let x = Signal::from_real(&[3.0, 3.0, 3.0], 1.0).unwrap();
        let s = ScalePolicy::new(1.0, 3).unwrap(); // M badly undersized
        assert!(matches!(
            encode_window(&x, 2, 3, &s),
            Err(Error::ScaleOverflow { .. })
        ));

        // Norm exactly 1 is legal; the radicand clamps to 0.
        let full = encode_window_samples(&[c(1.0, 0.0)], &ScalePolicy::new(1.0, 1).unwrap());
        let state = full.unwrap();
        assert_eq!(state.amplitude(1), Complex64::ZERO);
    }

    #[test]
    fn sliding_matches_direct_encoding() {
        let mut rng = CounterRng::new(0xe11c_0001);
        for case in 0..100 {
            let d = 1 + case % 4;
            let len = d + 5 + case % 7;
            let samples: Vec<Complex64> = (0..len)
                .map(|_| c(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
                .collect();
            let x = Signal::new(samples.clone(), 0.25).unwrap();
            let s = ScalePolicy::from_signal(&x, d).unwrap();

            let mut window = vec![Complex64::ZERO; d];
            for (n, &sample) in samples.iter().enumerate() {
                window = slide_window(&window, sample);
                let slid = encode_window_samples(&window, &s).unwrap();
                let direct = encode_window(&x, n, d, &s).unwrap();
                for i in 0..slid.dim() {
                    let diff = (slid.amplitude(i) - direct.amplitude(i)).norm();
                    assert!(diff <= 1e-15, "case {case}, n {n}, slot {i}");
                }
            }
        }
    }

    #[test]
    fn sliding_a_zero_window_with_zero_stays_zero() {
        let window = vec![Complex64::ZERO; 3];
        let slid = slide_window(&window, Complex64::ZERO);
        assert_eq!(slid, window);
    }

    #[test]
    fn norm_preservation_over_random_windows() {
        let mut rng = CounterRng::new(0xe11c_0002);
        for case in 0..500 {
            let d = 1 + case % 6;
            let len = d + case % 9;
            let samples: Vec<Complex64> = (0..len)
                .map(|_| c(4.0 * rng.next_f64() - 2.0, 4.0 * rng.next_f64() - 2.0))
                .collect();
            let x = Signal::new(samples, 0.5).unwrap();
            let s = ScalePolicy::from_signal(&x, d).unwrap();
            let n = case % len;
            let state = encode_window(&x, n, d, &s).unwrap();
            assert!(
                (state.norm_sqr() - 1.0).abs() <= 1e-10,
                "case {case}: norm_sqr {}",
                state.norm_sqr()
            );
        }
    }

    #[test]
    fn scale_round_trip_recovers_samples() {
        let mut rng = CounterRng::new(0xe11c_0003);
        for case in 0..100 {
            let d = 1 + case % 4;
            let samples: Vec<Complex64> = (0..d + 3)
                .map(|_| c(2.0 * rng.next_f64() - 1.0, rng.next_f64() - 0.5))
                .collect();
            let x = Signal::new(samples.clone(), 1.0).unwrap();
            let s = ScalePolicy::from_signal(&x, d).unwrap();
            let n = d + 1;
            let state = encode_window(&x, n, d, &s).unwrap();
            let back = s.max_amplitude() * (d as f64).sqrt();
            for i in 0..d {
                let recovered = state.amplitude(i) * back;
                let original = x.at(n as isize - (d - 1 - i) as isize);
                assert!(
                    (recovered - original).norm() <= 1e-12,
                    "case {case}, slot {i}"
                );
            }
        }
    }
}
