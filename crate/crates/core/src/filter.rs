//! Classical FIR filtering: the ground truth every quantum path is checked
//! against. Also generates the two-tone test signals and evaluates the
//! frequency response.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Discrete-time signal: complex samples at a fixed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_interval: f64,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>, sample_interval: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::DimensionMismatch {
                detail: "signal needs at least one sample".into(),
            });
        }
        if !samples.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite {
                context: "signal sample",
            });
        }
        if !(sample_interval.is_finite() && sample_interval > 0.0) {
            return Err(Error::NonFinite {
                context: "sample interval",
            });
        }
        Ok(Self {
            samples,
            sample_interval,
        })
    }

    pub fn from_real(samples: &[f64], sample_interval: f64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            sample_interval,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty sample lists
    }

    pub fn sample_interval(&self) -> f64 {
        self.sample_interval
    }

    /// Sample at index `n`, with zeros before the signal starts.
    pub fn at(&self, n: isize) -> Complex64 {
        if n < 0 {
            Complex64::ZERO
        } else {
            self.samples
                .get(n as usize)
                .copied()
                .unwrap_or(Complex64::ZERO)
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// FIR filter tap list p_0..p_{d-1}.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    taps: Vec<Complex64>,
}

impl FilterSpec {
    /// Rejects empty, non-finite, and all-zero tap lists.
    pub fn new(taps: Vec<Complex64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(Error::ZeroFilter);
        }
        if !taps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { context: "tap" });
        }
        if taps.iter().all(|z| *z == Complex64::ZERO) {
            return Err(Error::ZeroFilter);
        }
        Ok(Self { taps })
    }

    pub fn from_real(taps: &[f64]) -> Result<Self> {
        Self::new(taps.iter().map(|&p| Complex64::new(p, 0.0)).collect())
    }

    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Tap count d.
    pub fn d(&self) -> usize {
        self.taps.len()
    }

    /// Root of the summed squared tap moduli; positive by construction.
    pub fn tap_norm(&self) -> f64 {
        self.taps.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Runs the filter over the signal: y[n] = sum_i p_i x[n-i], with x = 0
/// before the first sample. Output length equals input length.
pub fn fir_apply(f: &FilterSpec, x: &Signal) -> Signal {
    let taps = f.taps();
    let samples = (0..x.len())
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(i, p)| p * x.at(n as isize - i as isize))
                .sum()
        })
        .collect();
    Signal {
        samples,
        sample_interval: x.sample_interval,
    }
}

/// Coefficients of the 3-tap filter equivalent to running two 2-tap
/// filters back to back: (a1 a2, a1 b2 + a2 b1, b1 b2).
pub fn cascade_taps(f1: &FilterSpec, f2: &FilterSpec) -> Result<FilterSpec> {
    if f1.d() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            actual: f1.d(),
        });
    }
    if f2.d() != 2 {
        return Err(Error::WrongArity {
            expected: 2,
            actual: f2.d(),
        });
    }
    let (a1, b1) = (f1.taps[0], f1.taps[1]);
    let (a2, b2) = (f2.taps[0], f2.taps[1]);
    FilterSpec::new(vec![a1 * a2, a1 * b2 + a2 * b1, b1 * b2])
}

/// Two superposed sinusoids, each of amplitude 0.5, sampled at the given
/// interval: 0.5 sin(2 pi f_low t) + 0.5 sin(2 pi f_high t).
pub fn two_tone(n: usize, f_low: f64, f_high: f64, sample_interval: f64) -> Result<Signal> {
    if n == 0 {
        return Err(Error::DimensionMismatch {
            detail: "two_tone needs at least one sample".into(),
        });
    }
    if !(sample_interval.is_finite() && sample_interval > 0.0) {
        return Err(Error::NonFinite {
            context: "sample interval",
        });
    }
    let nyquist = 0.5 / sample_interval;
    for &f in &[f_low, f_high] {
        if !f.is_finite() {
            return Err(Error::NonFinite {
                context: "tone frequency",
            });
        }
        if f.abs() >= nyquist {
            return Err(Error::AliasedTone {
                frequency: f,
                nyquist,
            });
        }
    }
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 * sample_interval;
            let x = 0.5 * (2.0 * PI * f_low * t).sin() + 0.5 * (2.0 * PI * f_high * t).sin();
            Complex64::new(x, 0.0)
        })
        .collect();
    Signal::new(samples, sample_interval)
}

/// Frequency response H(omega) = sum_i p_i e^{-j omega i} at a single
/// angular frequency (radians per sample).
pub fn dtft_gain(f: &FilterSpec, omega: f64) -> Complex64 {
    f.taps
        .iter()
        .enumerate()
        .map(|(i, p)| p * Complex64::from_polar(1.0, -omega * i as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::CounterRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_taps(rng: &mut CounterRng, d: usize, complex: bool) -> FilterSpec {
        loop {
            let taps: Vec<Complex64> = (0..d)
                .map(|_| {
                    let re = 2.0 * rng.next_f64() - 1.0;
                    let im = if complex {
                        2.0 * rng.next_f64() - 1.0
                    } else {
                        0.0
                    };
                    c(re, im)
                })
                .collect();
            if let Ok(f) = FilterSpec::new(taps) {
                return f;
            }
        }
    }

    fn random_signal(rng: &mut CounterRng, n: usize) -> Signal {
        let samples = (0..n)
            .map(|_| c(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
            .collect();
        Signal::new(samples, 0.01).unwrap()
    }

    #[test]
    fn rejects_zero_and_malformed_filters() {
        assert!(matches!(FilterSpec::new(vec![]), Err(Error::ZeroFilter)));
        assert!(matches!(
            FilterSpec::from_real(&[0.0, 0.0]),
            Err(Error::ZeroFilter)
        ));
        assert!(matches!(
            FilterSpec::new(vec![c(f64::INFINITY, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn identity_filter_passes_signal_through() {
        let f = FilterSpec::from_real(&[1.0]).unwrap();
        let x = Signal::from_real(&[0.3, -0.7, 0.1, 0.9], 0.5).unwrap();
        let y = fir_apply(&f, &x);
        assert_eq!(y.samples(), x.samples());
        assert_eq!(y.sample_interval(), 0.5);
    }

    #[test]
    fn zero_sum_taps_kill_dc() {
        // Taps summing to zero give y[n] = 0 on constant input once the
        // window is fully inside the signal (n >= 2 here).
        let f = FilterSpec::from_real(&[-0.25, 0.5, -0.25]).unwrap();
        let x = Signal::from_real(&[1.0; 8], 1.0).unwrap();
        let y = fir_apply(&f, &x);
        assert_eq!(y.at(0), c(-0.25, 0.0));
        assert_eq!(y.at(1), c(0.25, 0.0));
        for n in 2..8 {
            assert_eq!(y.at(n), c(0.0, 0.0), "n = {n}");
        }
    }

    #[test]
    fn alternating_input_hits_full_negative_gain() {
        // x[n] = cos(pi n) alternates; once warmed up, the response is the
        // gain at omega = pi (which is -1) times the alternation.
        let f = FilterSpec::from_real(&[-0.25, 0.5, -0.25]).unwrap();
        let x: Vec<f64> = (0..8).map(|n| (PI * n as f64).cos()).collect();
        let y = fir_apply(&f, &Signal::from_real(&x, 1.0).unwrap());
        for n in 2..8 {
            let expected = if n % 2 == 0 { -1.0 } else { 1.0 };
            assert!(
                (y.at(n as isize).re - expected).abs() < 1e-12,
                "n = {n}: {}",
                y.at(n as isize).re
            );
            assert_eq!(y.at(n as isize).im, 0.0);
        }
    }

    #[test]
    fn cascade_tap_algebra() {
        let ones = FilterSpec::from_real(&[1.0, 1.0]).unwrap();
        let c3 = cascade_taps(&ones, &ones).unwrap();
        assert_eq!(c3.taps(), &[c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);

        let f1 = FilterSpec::from_real(&[-0.5, 0.5]).unwrap();
        let f2 = FilterSpec::from_real(&[0.5, -0.5]).unwrap();
        let hp = cascade_taps(&f1, &f2).unwrap();
        assert_eq!(hp.taps(), &[c(-0.25, 0.0), c(0.5, 0.0), c(-0.25, 0.0)]);

        let three = FilterSpec::from_real(&[1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            cascade_taps(&three, &ones),
            Err(Error::WrongArity {
                expected: 2,
                actual: 3
            })
        ));
        assert!(matches!(
            cascade_taps(&ones, &three),
            Err(Error::WrongArity {
                expected: 2,
                actual: 3
            })
        ));
    }

    #[test]
    fn cascade_taps_compose_like_sequential_filters() {
        let mut rng = CounterRng::new(0xf11e_0001);
        for case in 0..200 {
            let f1 = random_taps(&mut rng, 2, case % 2 == 0);
            let f2 = random_taps(&mut rng, 2, case % 3 == 0);
            let combined = match cascade_taps(&f1, &f2) {
                Ok(f) => f,
                // Random draws can multiply out to all-zero taps; that
                // degenerate cascade has no 3-tap equivalent to compare.
                Err(Error::ZeroFilter) => continue,
                Err(e) => panic!("unexpected error: {e}"),
            };
            let x = random_signal(&mut rng, 24);
            let direct = fir_apply(&combined, &x);
            let sequential = fir_apply(&f2, &fir_apply(&f1, &x));
            for n in 0..x.len() {
                let diff = (direct.at(n as isize) - sequential.at(n as isize)).norm();
                assert!(diff <= 1e-12, "case {case}, n {n}: diff {diff}");
            }
        }
    }

    #[test]
    fn linearity_and_time_invariance() {
        let mut rng = CounterRng::new(0xf11e_0002);
        for case in 0..50 {
            let f = random_taps(&mut rng, 1 + case % 4, true);
            let x = random_signal(&mut rng, 20);
            let z = random_signal(&mut rng, 20);
            let alpha = c(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);
            let beta = c(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0);

            let mixed: Vec<Complex64> = x
                .samples()
                .iter()
                .zip(z.samples())
                .map(|(a, b)| alpha * a + beta * b)
                .collect();
            let lhs = fir_apply(&f, &Signal::new(mixed, 0.01).unwrap());
            let fx = fir_apply(&f, &x);
            let fz = fir_apply(&f, &z);
            for n in 0..20 {
                let rhs = alpha * fx.at(n) + beta * fz.at(n);
                assert!((lhs.at(n) - rhs).norm() <= 1e-12, "case {case}");
            }

            // Shift input by k with zero fill; output shifts by k.
            let k = 1 + case % 5;
            let mut shifted = vec![Complex64::ZERO; k];
            shifted.extend_from_slice(x.samples());
            let fy = fir_apply(&f, &Signal::new(shifted, 0.01).unwrap());
            for n in 0..20 {
                let diff = (fy.at(n + k as isize) - fx.at(n)).norm();
                assert!(diff <= 1e-12, "case {case}, shift {k}, n {n}");
            }
        }
    }

    #[test]
    fn two_tone_shapes_and_power() {
        // Zero low tone leaves just the half-amplitude high tone.
        let s = two_tone(4, 0.0, 10.0, 0.001).unwrap();
        for (k, sample) in s.samples().iter().enumerate() {
            let expected = 0.5 * (2.0 * PI * 10.0 * (k as f64 * 0.001)).sin();
            assert!((sample.re - expected).abs() < 1e-15);
            assert_eq!(sample.im, 0.0);
        }

        // 249 samples over ~1 s stay finite and within amplitude 1.
        let s = two_tone(249, 5.0, 60.0, 1.0 / 249.0).unwrap();
        assert_eq!(s.len(), 249);
        assert!(s.max_abs() <= 1.0);

        // Mean square of a single half-amplitude tone over whole periods.
        let s = two_tone(100, 0.0, 5.0, 0.01).unwrap();
        let mean_sq: f64 = s.samples().iter().map(|z| z.norm_sqr()).sum::<f64>() / s.len() as f64;
        assert!((mean_sq - 0.125).abs() <= 1e-6, "mean square {mean_sq}");
    }

    #[test]
    fn two_tone_rejects_aliased_frequencies() {
        let nyquist = 0.5 / 0.004;
        assert!(matches!(
            two_tone(16, 5.0, nyquist, 0.004),
            Err(Error::AliasedTone { .. })
        ));
        assert!(matches!(
            two_tone(16, -nyquist, 5.0, 0.004),
            Err(Error::AliasedTone { .. })
        ));
        assert!(two_tone(16, 5.0, nyquist * 0.999, 0.004).is_ok());
    }

    #[test]
    fn dtft_gain_known_points() {
        let hp = FilterSpec::from_real(&[-0.25, 0.5, -0.25]).unwrap();
        // Taps sum to zero, and they do so exactly in binary floating point.
        assert_eq!(dtft_gain(&hp, 0.0), c(0.0, 0.0));
        assert!((dtft_gain(&hp, PI).norm() - 1.0).abs() <= 1e-12);

        let identity = FilterSpec::from_real(&[1.0]).unwrap();
        for &w in &[0.0, 0.3, PI / 2.0, PI] {
            assert!((dtft_gain(&identity, w) - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn dtft_matches_steady_state_response() {
        // Drive the filter with a long complex exponential and compare the
        // settled output against H(omega) times the input.
        let mut rng = CounterRng::new(0xf11e_0003);
        for case in 0..20 {
            let f = random_taps(&mut rng, 1 + case % 4, true);
            let omega = PI * rng.next_f64();
            let x: Vec<Complex64> = (0..32)
                .map(|n| Complex64::from_polar(1.0, omega * n as f64))
                .collect();
            let y = fir_apply(&f, &Signal::new(x.clone(), 1.0).unwrap());
            let gain = dtft_gain(&f, omega);
            for n in (f.d() - 1)..32 {
                let expected = gain * x[n];
                assert!(
                    (y.at(n as isize) - expected).norm() <= 1e-12,
                    "case {case}, n {n}"
                );
            }
        }
    }
}
