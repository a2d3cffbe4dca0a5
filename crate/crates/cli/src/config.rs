//! Experiment configuration: CLI flags, an optional JSON config file, the
//! merge rule (flags win), and the parsers for coefficients and signal
//! specs.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::Deserialize;

use crate::run::CliError;

#[derive(clap::Args, Debug, Default)]
pub struct RunArgs {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pipeline layout.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Comma-separated taps for single mode, e.g. "-0.25,0.5,-0.25" or "1+2i,0.5".
    #[arg(long, allow_hyphen_values = true)]
    pub taps: Option<String>,
    /// Cascade factor coefficients a1,b1,a2,b2.
    #[arg(long, allow_hyphen_values = true)]
    pub factors: Option<String>,
    /// "two-tone:F_LOW,F_HIGH,N,DT" or "csv:PATH".
    #[arg(long)]
    pub signal: Option<String>,
    /// Measurement shots per time index.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Base seed; each time index derives its own stream from it.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Amplitude bound M used by the encoder; defaults to max |x|.
    #[arg(long = "M", value_name = "VALUE")]
    pub m: Option<f64>,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cascade only: dilate with the literal block form instead of the exact one.
    #[arg(long)]
    pub paper_literal_dilation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Single,
    Cascade,
}

/// A coefficient in a JSON config: a plain real or an [re, im] pair.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        match c {
            ComplexSpec::Real(re) => Complex64::new(re, 0.0),
            ComplexSpec::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// JSON mirror of the flags; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mode: Option<Mode>,
    pub taps: Option<Vec<ComplexSpec>>,
    pub factors: Option<Vec<ComplexSpec>>,
    pub signal: Option<String>,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub paper_literal_dilation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalSpec {
    TwoTone {
        f_low: f64,
        f_high: f64,
        n: usize,
        dt: f64,
    },
    Csv(PathBuf),
}

/// A fully resolved experiment.
#[derive(Debug)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub taps: Vec<Complex64>,
    pub factors: Vec<Complex64>,
    pub signal: SignalSpec,
    pub shots: u64,
    pub seed: u64,
    pub m: Option<f64>,
    pub out: PathBuf,
    pub paper_literal_dilation: bool,
}

pub fn resolve(args: RunArgs) -> Result<ExperimentConfig, CliError> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let mode = args.mode.or(file.mode).unwrap_or(Mode::Single);

    let taps: Vec<Complex64> = match (&args.taps, &file.taps) {
        (Some(s), _) => parse_complex_list(s)?,
        (None, Some(list)) => list.iter().copied().map(Complex64::from).collect(),
        (None, None) => Vec::new(),
    };
    let factors: Vec<Complex64> = match (&args.factors, &file.factors) {
        (Some(s), _) => parse_complex_list(s)?,
        (None, Some(list)) => list.iter().copied().map(Complex64::from).collect(),
        (None, None) => Vec::new(),
    };

    let signal = match args.signal.as_deref().or(file.signal.as_deref()) {
        Some(spec) => parse_signal_spec(spec)?,
        None => SignalSpec::TwoTone {
            f_low: 5.0,
            f_high: 60.0,
            n: 249,
            dt: 1.0 / 249.0,
        },
    };

    let shots = args.shots.or(file.shots).unwrap_or(1024);
    if shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    let seed = args.seed.or(file.seed).unwrap_or(42);
    let m = args.m.or(file.m);
    if let Some(m) = m {
        if !m.is_finite() || m <= 0.0 {
            return Err(CliError::Config(format!(
                "M must be finite and positive, got {m}"
            )));
        }
    }
    let out = args
        .out
        .or(file.out)
        .ok_or_else(|| CliError::Config("an output CSV path is required (--out)".into()))?;

    match mode {
        Mode::Single if taps.is_empty() => {
            return Err(CliError::Config(
                "single mode needs filter taps (--taps)".into(),
            ));
        }
        Mode::Cascade if factors.len() != 4 => {
            return Err(CliError::Config(format!(
                "cascade mode needs exactly four factor coefficients a1,b1,a2,b2, got {}",
                factors.len()
            )));
        }
        _ => {}
    }

    Ok(ExperimentConfig {
        mode,
        taps,
        factors,
        signal,
        shots,
        seed,
        m,
        out,
        paper_literal_dilation: args.paper_literal_dilation || file.paper_literal_dilation,
    })
}

pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',')
        .map(|item| parse_complex(item).map_err(CliError::Config))
        .collect()
}

/// Parses "1.5", "-0.25", "1e-3", "1+2i", "0.6-0.8i", "2.5e-3-1e-2i", "i",
/// "-i", "0.5i".
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty coefficient".into());
    }
    let Some(body) = t.strip_suffix(['i', 'I']) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("cannot parse \"{t}\" as a number"));
    };
    // Split real from imaginary at the last sign that is not leading and not
    // part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re: f64 = if re_str.is_empty() {
        0.0
    } else {
        re_str
            .trim()
            .parse()
            .map_err(|_| format!("cannot parse the real part of \"{t}\""))?
    };
    let im: f64 = match im_str.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other
            .parse()
            .map_err(|_| format!("cannot parse the imaginary part of \"{t}\""))?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_signal_spec(spec: &str) -> Result<SignalSpec, CliError> {
    if let Some(rest) = spec.strip_prefix("two-tone:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 4 {
            return Err(CliError::Config(format!(
                "two-tone takes F_LOW,F_HIGH,N,DT; got \"{rest}\""
            )));
        }
        let field = |k: usize, name: &str| -> Result<f64, CliError> {
            parts[k]
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad two-tone {name} \"{}\"", parts[k])))
        };
        let f_low = field(0, "F_LOW")?;
        let f_high = field(1, "F_HIGH")?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad two-tone N \"{}\"", parts[2])))?;
        let dt = field(3, "DT")?;
        Ok(SignalSpec::TwoTone {
            f_low,
            f_high,
            n,
            dt,
        })
    } else if let Some(path) = spec.strip_prefix("csv:") {
        if path.is_empty() {
            return Err(CliError::Config("csv: needs a file path".into()));
        }
        Ok(SignalSpec::Csv(PathBuf::from(path)))
    } else {
        Err(CliError::Config(format!(
            "unknown signal spec \"{spec}\"; use two-tone:F_LOW,F_HIGH,N,DT or csv:PATH"
        )))
    }
}
