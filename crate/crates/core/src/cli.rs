//! The `fptc` command-line tool.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::decoder::{decompress_with, default_workers};
use crate::encoder::compress;
use crate::entropy::DEFAULT_MAX_CODE_LEN;
use crate::error::{Error, Result};
use crate::metrics::{compression_ratio, measure_throughput, prd, rd_csv, RdPoint};
use crate::profile::{train_profile, DomainProfile};
use crate::quantization::CodecParams;
use crate::signal_io::{read_signal, write_signal};
use crate::synth::SineMix;

pub const EXIT_USER: u8 = 2;
pub const EXIT_CORRUPT: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "fptc", version, about = "Lossy signal codec with a parallel decoder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a domain profile (quantization table + codebook) from signal files.
    Train(TrainArgs),
    /// Compress a signal file with a trained profile.
    Compress(CompressArgs),
    /// Decompress a container back into a signal file.
    Decompress(DecompressArgs),
    /// Train, compress and decompress over a parameter grid; emit RD points as CSV.
    Sweep(SweepArgs),
    /// Measure decode throughput of a container.
    Bench(BenchArgs),
    /// Write a seeded synthetic signal (sum of sinusoids plus noise).
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Transform block size N.
    #[arg(short = 'n', long, default_value_t = 32)]
    pub window_len: usize,
    /// Retained coefficients E.
    #[arg(short = 'e', long, default_value_t = 16)]
    pub retained: usize,
    /// Zone 0/1 boundary B1.
    #[arg(long, default_value_t = 2)]
    pub boundary1: usize,
    /// Zone 1/2 boundary B2.
    #[arg(long, default_value_t = 16)]
    pub boundary2: usize,
    /// Companding strength.
    #[arg(long, default_value_t = 50.0)]
    pub mu: f32,
    /// Zone-1 deadzone ratio.
    #[arg(long, default_value_t = 0.004)]
    pub dead_ratio: f32,
    /// Amplitude clip percentile.
    #[arg(long, default_value_t = 99.9)]
    pub zone_percentile: f32,
}

impl ParamArgs {
    pub fn params(&self) -> CodecParams {
        CodecParams {
            window_len: self.window_len,
            retained: self.retained,
            linear_start: self.boundary1,
            zeroed_start: self.boundary2,
            mu: self.mu,
            dead_ratio: self.dead_ratio,
            zone_percentile: self.zone_percentile,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Signal files (raw little-endian f32, or .csv).
    #[arg(short, long = "input", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Output profile path.
    #[arg(short, long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Maximum Huffman code length.
    #[arg(long, default_value_t = DEFAULT_MAX_CODE_LEN)]
    pub max_code_len: u8,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub profile: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Decode workers (defaults to available cores).
    #[arg(short, long)]
    pub workers: Option<usize>,
    /// Also write the stage timing breakdown as CSV.
    #[arg(long)]
    pub timings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    /// CSV output path.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Grid syntax: comma lists of values or inclusive ranges `a..b[:step]`.
    #[arg(short = 'n', long, default_value = "32")]
    pub window_len: String,
    #[arg(short = 'e', long, default_value = "4,8,16,32")]
    pub retained: String,
    #[arg(long, default_value = "2")]
    pub boundary1: String,
    /// Defaults to B2 = E for every configuration.
    #[arg(long)]
    pub boundary2: Option<String>,
    #[arg(long, default_value = "50")]
    pub mu: String,
    #[arg(long, default_value = "0.004")]
    pub dead_ratio: String,
    #[arg(long, default_value = "99.9")]
    pub zone_percentile: String,
    #[arg(long, default_value_t = DEFAULT_MAX_CODE_LEN)]
    pub max_code_len: u8,
    #[arg(short, long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(short, long)]
    pub workers: Option<usize>,
    /// Also write the per-trial report as CSV.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(short = 'n', long, default_value_t = 1 << 20)]
    pub samples: usize,
    #[arg(short, long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub components: usize,
    #[arg(long, default_value_t = 256.0)]
    pub min_period: f64,
    #[arg(long, default_value_t = 4096.0)]
    pub max_period: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

/// Parses `v1,v2,a..b,a..b:step` into a value list (ranges inclusive).
pub fn parse_grid(grid: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in grid.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || Error::Input(format!("bad grid item {item:?}"));
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step.parse::<f64>().map_err(|_| bad())?),
                None => (rest, 1.0),
            };
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            if step.is_nan() || step <= 0.0 || hi < lo || (hi - lo) / step > 1e6 {
                return Err(bad());
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            out.extend((0..=count).map(|i| lo + i as f64 * step));
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(Error::Input(format!("empty grid {grid:?}")));
    }
    Ok(out)
}

fn parse_int_grid(grid: &str) -> Result<Vec<usize>> {
    parse_grid(grid)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Input(format!("{v} is not a non-negative integer in {grid:?}")))
            }
        })
        .collect()
}

fn parse_float_grid(grid: &str) -> Result<Vec<f32>> {
    Ok(parse_grid(grid)?.into_iter().map(|v| v as f32).collect())
}

/// Cartesian product of the sweep grid; invalid combinations are reported and skipped.
pub fn sweep_configs(args: &SweepArgs, log: &mut dyn Write) -> Result<Vec<CodecParams>> {
    let windows = parse_int_grid(&args.window_len)?;
    let retained = parse_int_grid(&args.retained)?;
    let b1s = parse_int_grid(&args.boundary1)?;
    let b2s = args.boundary2.as_deref().map(parse_int_grid).transpose()?;
    let mus = parse_float_grid(&args.mu)?;
    let alphas = parse_float_grid(&args.dead_ratio)?;
    let pcts = parse_float_grid(&args.zone_percentile)?;

    let mut configs = Vec::new();
    for &n in &windows {
        for &e in &retained {
            for &b1 in &b1s {
                let b2_list = b2s.clone().unwrap_or_else(|| vec![e]);
                for &b2 in &b2_list {
                    for &mu in &mus {
                        for &alpha in &alphas {
                            for &pct in &pcts {
                                let p = CodecParams {
                                    window_len: n,
                                    retained: e,
                                    linear_start: b1,
                                    zeroed_start: b2,
                                    mu,
                                    dead_ratio: alpha,
                                    zone_percentile: pct,
                                };
                                match p.validate() {
                                    Ok(()) => configs.push(p),
                                    Err(e) => writeln!(log, "skipping {p:?}: {e}")?,
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if configs.is_empty() {
        return Err(Error::Input("parameter grid has no valid configuration".into()));
    }
    Ok(configs)
}

fn load_profile(path: &Path) -> Result<DomainProfile> {
    Ok(DomainProfile::from_bytes(&fs::read(path)?)?)
}

fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let params = args.params.params();
    params.validate()?;
    let strips = args
        .inputs
        .iter()
        .map(|p| read_signal(p))
        .collect::<Result<Vec<_>>>()?;
    let profile = train_profile(&strips, params, args.max_code_len)?;
    fs::write(&args.profile, profile.to_bytes())?;
    let samples: usize = strips.iter().map(Vec::len).sum();
    writeln!(
        out,
        "trained on {samples} samples: A0={} A1={} Lmax={}",
        profile.table.a0(),
        profile.table.a1(),
        profile.codebook.max_len()
    )?;
    Ok(())
}

fn cmd_compress(args: &CompressArgs, out: &mut dyn Write) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let samples = read_signal(&args.input)?;
    let bytes = compress(&samples, &profile)?.to_bytes();
    fs::write(&args.output, &bytes)?;
    let orig = samples.len() as u64 * 4;
    let cr = compression_ratio(orig, bytes.len() as u64)?;
    writeln!(
        out,
        "{} samples, {orig} -> {} bytes, compression ratio {cr:.4}",
        samples.len(),
        bytes.len()
    )?;
    Ok(())
}

fn cmd_decompress(args: &DecompressArgs, out: &mut dyn Write) -> Result<()> {
    let bytes = fs::read(&args.input)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let decoded = decompress_with(&bytes, workers)?;
    write_signal(&args.output, &decoded.samples)?;
    let csv = decoded.timings.to_csv();
    writeln!(out, "{} samples decoded with {workers} workers", decoded.samples.len())?;
    write!(out, "{csv}")?;
    if let Some(path) = &args.timings {
        fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let samples = read_signal(&args.input)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let configs = sweep_configs(args, out)?;
    let mut points = Vec::with_capacity(configs.len());
    for params in configs {
        let profile = train_profile(&[&samples], params, args.max_code_len)?;
        let bytes = compress(&samples, &profile)?.to_bytes();
        let start = Instant::now();
        let decoded = decompress_with(&bytes, workers)?;
        let secs = start.elapsed().as_secs_f64().max(1e-9);
        let mut pt = RdPoint::new(
            prd(&samples, &decoded.samples)?,
            compression_ratio(samples.len() as u64 * 4, bytes.len() as u64)?,
            params,
        );
        pt.max_code_len = args.max_code_len;
        pt.throughput_gbps = Some(decoded.samples.len() as f64 * 4.0 / secs / 1e9);
        points.push(pt);
    }
    fs::write(&args.output, rd_csv(&points))?;
    writeln!(out, "{} configurations written to {}", points.len(), args.output.display())?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    let bytes = fs::read(&args.input)?;
    let workers = args.workers.unwrap_or_else(default_workers);
    let report = measure_throughput(&bytes, args.repetitions, workers)?;
    let csv = report.to_csv();
    writeln!(out, "{} output bytes per trial, {workers} workers", report.output_bytes)?;
    write!(out, "{csv}")?;
    if let Some(path) = &args.output {
        fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<()> {
    if !(args.min_period > 0.0 && args.min_period <= args.max_period) {
        return Err(Error::Input("periods must satisfy 0 < min <= max".into()));
    }
    let mix = SineMix {
        components: args.components,
        period_range: (args.min_period, args.max_period),
        amplitude: args.amplitude,
        noise: args.noise,
        seed: args.seed,
    };
    write_signal(&args.output, &mix.generate(args.samples))?;
    writeln!(out, "wrote {} samples to {}", args.samples, args.output.display())?;
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Train(a) => cmd_train(a, out),
        Command::Compress(a) => cmd_compress(a, out),
        Command::Decompress(a) => cmd_decompress(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Generate(a) => cmd_generate(a, out),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_corruption() {
        EXIT_CORRUPT
    } else if matches!(err, Error::Internal(_)) {
        EXIT_INTERNAL
    } else {
        EXIT_USER
    }
}

/// Parses `args` and runs the command, reporting errors on stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USER)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = std::io::stdout();
    match execute(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("4,8,16").unwrap(), vec![4.0, 8.0, 16.0]);
        assert_eq!(parse_grid("1..4").unwrap(), vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_grid("0..1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("2, 8..16:4").unwrap(), vec![2.0, 8.0, 12.0, 16.0]);
        for bad in ["", "x", "4..2", "1..3:0", "1..3:-1", "1..z"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
        assert!(parse_int_grid("1.5").is_err());
    }

    #[test]
    fn sweep_skips_invalid_combinations() {
        let args = SweepArgs {
            input: PathBuf::new(),
            output: PathBuf::new(),
            window_len: "8".into(),
            retained: "4,8,16".into(),
            boundary1: "2,6".into(),
            boundary2: None,
            mu: "50".into(),
            dead_ratio: "0.004".into(),
            zone_percentile: "99.9".into(),
            max_code_len: 12,
            workers: None,
        };
        let mut log = Vec::new();
        let configs = sweep_configs(&args, &mut log).unwrap();
        // E=16 > N is invalid; B1=6 > E=4 is invalid.
        let got: Vec<_> = configs.iter().map(|p| (p.retained, p.linear_start, p.zeroed_start)).collect();
        assert_eq!(got, vec![(4, 2, 4), (8, 2, 8), (8, 6, 8)]);
        assert_eq!(String::from_utf8(log).unwrap().lines().count(), 3);
    }

    #[test]
    fn exit_classes() {
        assert_eq!(exit_code(&Error::Param("x".into())), EXIT_USER);
        assert_eq!(exit_code(&Error::Corrupt("x".into())), EXIT_CORRUPT);
        assert_eq!(
            exit_code(&Error::Parse(crate::error::ParseError::BadMagic { found: [0; 4] })),
            EXIT_CORRUPT
        );
        assert_eq!(exit_code(&Error::Internal("x".into())), EXIT_INTERNAL);
    }
}
