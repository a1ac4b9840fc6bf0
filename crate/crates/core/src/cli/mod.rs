//! Command-line front end. `main.rs` only forwards to [`main_with_args`].

mod evaluate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::audio_io::{load_wav, obfuscate, save_wav, synth, ObfuscationKind, ObfuscationSpec, SynthSpec};
use crate::error::{Error, Result};
use crate::fingerprint::{fingerprint_track, read_fingerprint, write_fingerprint, Fingerprint, FingerprintConfig};
use crate::matching::{compare, CompareParams, Decision, DEFAULT_KAPPA, DEFAULT_SMOOTH_K};
use crate::spectral::StftConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

pub const THREADS_ENV: &str = "TOPOPRINT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "topoprint", version, about = "Topological audio fingerprinting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fingerprint a WAV file into a JSON fingerprint.
    Fingerprint {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Compare two tracks (WAV or fingerprint JSON). Exit 0 if positive, 1 if negative.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        matching: MatchArgs,
        /// Write `t_i,t_j,t_j_smoothed` rows for every matched pair.
        #[arg(long)]
        dump_pairs: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Apply an obfuscation to a WAV file.
    Obfuscate {
        input: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        kind: ObfuscationKind,
        #[arg(long, allow_hyphen_values = true)]
        degree: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Score every pair of a manifest CSV and write metrics, ROC and CDF tables.
    Evaluate {
        manifest: PathBuf,
        #[arg(long, default_value = "eval-out")]
        out_dir: PathBuf,
        #[command(flatten)]
        matching: MatchArgs,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render a synthetic test signal, e.g. '{"kind":"sine","freq":440,"duration":1}'.
    Synth {
        spec: String,
        #[arg(long, default_value_t = crate::audio_io::DEFAULT_SAMPLE_RATE)]
        sample_rate: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Window length in seconds.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub omega: f64,
    /// Window overlap, in [0, 1).
    #[arg(long, default_value_t = 0.4, value_parser = parse_overlap)]
    pub tau: f64,
    #[arg(long, default_value_t = 256)]
    pub betti_res: usize,
    #[arg(long, default_value_t = 128)]
    pub nmels: usize,
    #[arg(long, default_value_t = 1024)]
    pub nfft: usize,
    #[arg(long, default_value_t = 256)]
    pub hop: usize,
}

impl ConfigArgs {
    pub fn to_config(&self, lambda: f64) -> Result<FingerprintConfig> {
        let cfg = FingerprintConfig {
            window_seconds: self.omega,
            overlap: self.tau,
            lambda,
            betti_resolution: self.betti_res,
            stft: StftConfig { window_size: self.nfft, hop: self.hop, n_mels: self.nmels, ..Default::default() },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct MatchArgs {
    /// Weight of the dimension-0 distance, in [0, 1].
    #[arg(long, default_value_t = 0.5, value_parser = parse_unit)]
    pub lambda: f64,
    /// Decision threshold on the error.
    #[arg(long, default_value_t = DEFAULT_KAPPA)]
    pub kappa: f64,
    #[arg(long, default_value_t = DEFAULT_SMOOTH_K)]
    pub smooth_k: usize,
}

impl MatchArgs {
    pub fn params(&self) -> CompareParams {
        CompareParams { lambda: self.lambda, smooth_k: self.smooth_k, kappa: self.kappa }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn parse_unit(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

fn parse_overlap(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1)"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v = parse_f64(s)?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn parse_kind(s: &str) -> std::result::Result<ObfuscationKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = path.with_file_name(format!(".{name}.{}.tmp", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// A fingerprint from `.json`, or computed from `.wav`.
pub fn load_input(path: &Path, cfg: &FingerprintConfig) -> Result<Fingerprint> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("json") => read_fingerprint(path),
        Some("wav") => fingerprint_track(&load_wav(path)?, cfg),
        _ => Err(Error::invalid(format!("{}: expected a .wav or .json file", path.display()))),
    }
}

#[derive(Serialize)]
struct CompareReport<'a> {
    error: f64,
    rho: f64,
    n_pairs: usize,
    decision: &'a str,
    kappa: f64,
    lambda: f64,
}

fn run_compare(a: &Path, b: &Path, m: &MatchArgs, dump: Option<&Path>, config: &ConfigArgs) -> Result<u8> {
    let cfg = config.to_config(m.lambda)?;
    let fa = load_input(a, &cfg)?;
    let fb = load_input(b, &cfg)?;
    let result = compare(&fa, &fb, &m.params())?;
    if let Some(path) = dump {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["t_i", "t_j", "t_j_smoothed"]).map_err(csv_error)?;
        for (p, s) in result.pairs.iter().zip(&result.smoothed) {
            w.write_record([p.0.to_string(), p.1.to_string(), s.1.to_string()]).map_err(csv_error)?;
        }
        write_atomic(path, &w.into_inner().map_err(|e| Error::invalid(e.to_string()))?)?;
    }
    let report = CompareReport {
        error: result.error,
        rho: result.rho,
        n_pairs: result.pairs.len(),
        decision: result.decision.as_str(),
        kappa: m.kappa,
        lambda: m.lambda,
    };
    println!("{}", serde_json::to_string(&report).expect("report serialises"));
    Ok(match result.decision {
        Decision::Positive => EXIT_OK,
        Decision::Negative => EXIT_NEGATIVE,
    })
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Fingerprint { input, output, config } => {
            let cfg = config.to_config(0.5)?;
            let fp = fingerprint_track(&load_wav(&input)?, &cfg)?;
            write_fingerprint(&fp, &output)?;
            eprintln!("{}: {} windows -> {}", input.display(), fp.len(), output.display());
            Ok(EXIT_OK)
        }
        Command::Compare { a, b, matching, dump_pairs, config } => {
            run_compare(&a, &b, &matching, dump_pairs.as_deref(), &config)
        }
        Command::Obfuscate { input, kind, degree, seed, output } => {
            let spec = ObfuscationSpec::new(kind, degree)?;
            let w = load_wav(&input)?;
            save_wav(&obfuscate(&w, &spec, seed)?, &output)?;
            Ok(EXIT_OK)
        }
        Command::Evaluate { manifest, out_dir, matching, config } => {
            evaluate::run(&manifest, &out_dir, &matching, &config)
        }
        Command::Synth { spec, sample_rate, output } => {
            let spec: SynthSpec =
                serde_json::from_str(&spec).map_err(|e| Error::invalid(format!("bad synth spec: {e}")))?;
            save_wav(&synth(&spec, sample_rate)?, &output)?;
            Ok(EXIT_OK)
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        // ignore the error when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_FAILURE } else { EXIT_OK };
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
