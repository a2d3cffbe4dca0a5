//! Time-series CSV: the fixed 7-column result schema with floats at 17
//! significant digits and LF endings, plus the 2-column `t,value` ingest
//! format.

use std::fs;
use std::path::Path;

use qfir_core::filter::Signal;

use crate::run::CliError;

pub const HEADER: &str =
    "n,t_seconds,classical_y,classical_abs_y,ideal_prob,sampled_prob,reconstructed_abs_y";

#[derive(Debug, Clone, Copy)]
pub struct CsvRow {
    pub n: usize,
    pub t_seconds: f64,
    pub classical_y: f64,
    pub classical_abs_y: f64,
    pub ideal_prob: f64,
    pub sampled_prob: f64,
    pub reconstructed_abs_y: f64,
}

/// 17 significant digits: enough to reproduce the f64 bit pattern on parse.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn render_series(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(HEADER.len() + 1 + rows.len() * 160);
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            format_float(r.t_seconds),
            format_float(r.classical_y),
            format_float(r.classical_abs_y),
            format_float(r.ideal_prob),
            format_float(r.sampled_prob),
            format_float(r.reconstructed_abs_y),
        ));
    }
    out
}

pub fn write_series(path: &Path, rows: &[CsvRow]) -> Result<(), CliError> {
    fs::write(path, render_series(rows))
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Reads a `t,value` series with one header line. The sample interval comes
/// from the first two data rows; every later step must match it to 1e-9
/// relative.
pub fn ingest_csv(path: &Path) -> Result<Signal, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if idx == 0 {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(CliError::Parse {
                line: lineno,
                detail: "expected exactly two fields t,value".into(),
            });
        };
        let t: f64 = t.trim().parse().map_err(|_| CliError::Parse {
            line: lineno,
            detail: format!("bad timestamp \"{t}\""),
        })?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Parse {
            line: lineno,
            detail: format!("bad value \"{v}\""),
        })?;
        times.push(t);
        values.push(v);
    }
    if values.len() < 2 {
        return Err(CliError::Parse {
            line: text.lines().count(),
            detail: "need at least two data rows to infer the sample interval".into(),
        });
    }
    let dt = times[1] - times[0];
    if !dt.is_finite() || dt <= 0.0 {
        return Err(CliError::Parse {
            line: 3,
            detail: format!("timestamps must increase; first interval is {dt}"),
        });
    }
    for k in 2..times.len() {
        let step = times[k] - times[k - 1];
        if (step - dt).abs() > 1e-9 * dt {
            return Err(CliError::NonUniformSampling {
                line: k + 2,
                expected: dt,
                actual: step,
            });
        }
    }
    Ok(Signal::from_real(&values, dt)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qfir_core::sampling::CounterRng;
    use std::io::Write;

    fn temp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_row_file_infers_the_interval() {
        let f = temp_csv("t,value\n0,0.5\n0.01,-0.5\n");
        let x = ingest_csv(f.path()).unwrap();
        assert_eq!(x.len(), 2);
        assert_eq!(x.sample_interval(), 0.01);
        assert_eq!(x.at(0).re, 0.5);
        assert_eq!(x.at(1).re, -0.5);
    }

    #[test]
    fn printed_floats_round_trip_bit_for_bit() {
        let mut rng = CounterRng::new(0xc5f);
        let dt = 1.0 / 249.0;
        let samples: Vec<f64> = (0..100).map(|_| 4.0 * rng.next_f64() - 2.0).collect();
        let mut text = String::from("t,value\n");
        for (k, v) in samples.iter().enumerate() {
            text.push_str(&format!(
                "{},{}\n",
                format_float(k as f64 * dt),
                format_float(*v)
            ));
        }
        let f = temp_csv(&text);
        let x = ingest_csv(f.path()).unwrap();
        assert_eq!(x.len(), samples.len());
        for (k, v) in samples.iter().enumerate() {
            assert_eq!(x.at(k as isize).re.to_bits(), v.to_bits(), "sample {k}");
        }
    }

    #[test]
    fn render_is_deterministic_and_lf_terminated() {
        let rows = vec![
            CsvRow {
                n: 0,
                t_seconds: 0.0,
                classical_y: -0.125,
                classical_abs_y: 0.125,
                ideal_prob: 0.25,
                sampled_prob: 0.25390625,
                reconstructed_abs_y: 0.125,
            };
            3
        ];
        let a = render_series(&rows);
        let b = render_series(&rows);
        assert_eq!(a, b);
        assert!(a.starts_with(HEADER));
        assert!(a.ends_with('\n'));
        assert!(!a.contains('\r'));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn parse_failures_carry_line_numbers() {
        let f = temp_csv("t,value\n0,0.5\n0.01,oops\n");
        match ingest_csv(f.path()) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }

        let f = temp_csv("t,value\n0,0.5,9\n");
        match ingest_csv(f.path()) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }

        let f = temp_csv("t,value\n0,0.5\n");
        assert!(matches!(ingest_csv(f.path()), Err(CliError::Parse { .. })));

        let f = temp_csv("t,value\n0,0.5\n0.01,0.4\n0.025,0.3\n");
        match ingest_csv(f.path()) {
            Err(CliError::NonUniformSampling { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected NonUniformSampling, got {other:?}"),
        }
    }
}
