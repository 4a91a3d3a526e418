//! Command-line interface.

use std::fs;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lagmotif_core::synth::{gen_pair, Family, GeneratorConfig, MotifForm};
use lagmotif_core::{
    add_gaussian_noise, downsample_mean, following_motif_method, infer_following_motifs_exact,
    matrix_profile_ab, matrix_profile_naive, noise_sweep, FollowParams, GroundTruth, SeriesMasks,
    TimeSeries,
};
use serde::Serialize;

use crate::dataset::{load_dataset, write_pair};
use crate::evaluate::{evaluate, EvalConfig, Method, BENCHMARK_PERCENTILE_GAP};
use crate::io::{load_csv, read_json};
use crate::report::{self, emit, to_json, Format};

#[derive(Debug, Parser)]
#[command(
    name = "lagmotif",
    version,
    about = "Variable-lag following-motif analysis of time series pairs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write seeded synthetic leader/follower pairs with ground truth.
    Generate(GenerateArgs),
    /// Decide which of two series leads and locate the following motifs.
    Analyze(AnalyzeArgs),
    /// AB-join matrix profile of two series.
    Mp(MpArgs),
    /// Score a method on a labeled dataset.
    Evaluate(EvaluateArgs),
    /// Rerun the analysis under increasing additive noise.
    Sweep(SweepArgs),
    /// Time the matrix-profile kernel on random data.
    Bench(BenchArgs),
}

/// Inclusive seed range written `A..B`, or a single seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedRange {
    pub first: u64,
    pub last: u64,
}

impl SeedRange {
    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.first..=self.last
    }
}

impl FromStr for SeedRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad seed {t:?}: {e}"))
        };
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if first > last {
            return Err(format!("empty seed range {s}"));
        }
        Ok(Self { first, last })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Single,
    Continuous,
    Noncontinuous,
    Mixed,
}

impl FamilyArg {
    fn families(self) -> Vec<Family> {
        match self {
            FamilyArg::Single => vec![Family::Single],
            FamilyArg::Continuous => vec![Family::Continuous],
            FamilyArg::Noncontinuous => vec![Family::Noncontinuous],
            FamilyArg::Mixed => Family::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormArg {
    #[default]
    Sine,
    Ramp,
}

impl From<FormArg> for MotifForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Sine => MotifForm::Sine,
            FormArg::Ramp => MotifForm::Ramp,
        }
    }
}

fn parse_gap(s: &str) -> Result<f64, String> {
    let g: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if g > 0.0 && g < 50.0 {
        Ok(g)
    } else {
        Err(format!("percentile gap must lie in (0, 50), got {g}"))
    }
}

fn parse_nonneg(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite non-negative number, got {s}"))
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("fraction must lie in (0, 1], got {s}"))
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Inclusive range, e.g. `0..99`.
    #[arg(long)]
    pub seeds: SeedRange,
    #[arg(long, default_value_t = lagmotif_core::synth::DEFAULT_SERIES_LENGTH)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = FormArg::Sine)]
    pub form: FormArg,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub leader: PathBuf,
    #[arg(long)]
    pub follower: PathBuf,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_gap)]
    pub gap: f64,
    /// Exact equal-motif search instead of the percentile method.
    #[arg(long)]
    pub exact: bool,
    /// Element-wise tolerance of the exact search.
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonneg, requires = "exact")]
    pub epsilon: f64,
    /// Standard deviation of Gaussian noise added to both inputs.
    #[arg(long, default_value_t = 0.0, value_parser = parse_nonneg)]
    pub noise: f64,
    /// Seed of the added noise; the follower uses `seed + 1`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Replace each group of `⌈n · fraction⌉` samples by its mean first.
    #[arg(long, value_parser = parse_fraction)]
    pub downsample: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MpArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
    /// Use the quadratic reference implementation.
    #[arg(long)]
    pub naive: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory written by `generate`.
    #[arg(long, conflicts_with_all = ["family", "seeds"], required_unless_present = "family")]
    pub dataset: Option<PathBuf>,
    /// Generate the dataset in memory instead.
    #[arg(long, value_enum, requires = "seeds")]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub seeds: Option<SeedRange>,
    #[arg(long, default_value_t = lagmotif_core::synth::DEFAULT_SERIES_LENGTH)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = Method::Fmm)]
    pub method: Method,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
    #[arg(long, default_value_t = BENCHMARK_PERCENTILE_GAP, value_parser = parse_gap)]
    pub gap: f64,
    /// Cross-correlation lag radius; half the shorter series by default.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_lag: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub leader: PathBuf,
    #[arg(long)]
    pub follower: PathBuf,
    /// Comma-separated noise levels, e.g. `0,0.001,0.005`.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_nonneg)]
    pub sigmas: Vec<f64>,
    /// Ground-truth sidecar for per-time-step scoring.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
    #[arg(long, default_value_t = 0.01, value_parser = parse_gap)]
    pub gap: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: u64,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(2..))]
    pub window: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also time the quadratic reference implementation.
    #[arg(long)]
    pub naive: bool,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Analyze(a) => analyze(a),
        Command::Mp(a) => mp(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let config = GeneratorConfig {
        series_length: args.length,
        form: args.form.into(),
    };
    let mut count = 0;
    for family in args.family.families() {
        for seed in args.seeds.iter() {
            let pair =
                gen_pair(family, seed, config).with_context(|| format!("{family} seed {seed}"))?;
            write_pair(&args.out, &pair)?;
            count += 1;
        }
    }
    eprintln!("wrote {count} pairs to {}", args.out.display());
    Ok(())
}

fn prepare(
    series: TimeSeries,
    downsample: Option<f64>,
    noise: f64,
    seed: u64,
) -> Result<TimeSeries> {
    let series = match downsample {
        Some(f) => downsample_mean(&series, f)?,
        None => series,
    };
    Ok(add_gaussian_noise(&series, noise, seed)?)
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let leader = prepare(
        load_csv(&args.leader)?,
        args.downsample,
        args.noise,
        args.seed,
    )?;
    let follower = prepare(
        load_csv(&args.follower)?,
        args.downsample,
        args.noise,
        args.seed.wrapping_add(1),
    )?;
    let window = args.window as usize;
    let out = args.output.out.as_deref();
    if args.exact {
        let set = infer_following_motifs_exact(&leader, &follower, window, args.epsilon)?;
        let text = match args.output.format {
            Format::Json => to_json(&set),
            Format::Csv => report::motif_set_csv(&set),
        };
        return Ok(emit(&text, out)?);
    }
    let result = following_motif_method(&leader, &follower, FollowParams::new(window, args.gap))?;
    let text = match args.output.format {
        Format::Json => to_json(&result),
        Format::Csv => report::follow_report_csv(&result),
    };
    Ok(emit(&text, out)?)
}

fn mp(args: MpArgs) -> Result<()> {
    let a = load_csv(&args.a)?;
    let b = load_csv(&args.b)?;
    let window = args.window as usize;
    let profile = if args.naive {
        matrix_profile_naive(&a, &b, window)?
    } else {
        matrix_profile_ab(&a, &b, window)?
    };
    let text = match args.output.format {
        Format::Json => to_json(&profile),
        Format::Csv => report::matrix_profile_csv(&profile),
    };
    Ok(emit(&text, args.output.out.as_deref())?)
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let dataset = match (&args.dataset, args.family, args.seeds) {
        (Some(dir), _, _) => load_dataset(dir)?,
        (None, Some(family), Some(seeds)) => {
            let config = GeneratorConfig::with_length(args.length);
            let mut pairs = Vec::new();
            for f in family.families() {
                for seed in seeds.iter() {
                    pairs.push(
                        gen_pair(f, seed, config).with_context(|| format!("{f} seed {seed}"))?,
                    );
                }
            }
            pairs
        }
        _ => anyhow::bail!("either --dataset or --family with --seeds is required"),
    };
    let config = match args.method {
        Method::Fmm => EvalConfig::fmm(FollowParams::new(args.window as usize, args.gap)),
        Method::Xcorr => EvalConfig::xcorr(args.max_lag.map(|l| l as usize)),
    };
    let result = evaluate(&dataset, &config)?;
    let text = match args.output.format {
        Format::Json => to_json(&result),
        Format::Csv => report::evaluation_csv(&result),
    };
    Ok(emit(&text, args.output.out.as_deref())?)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let leader = load_csv(&args.leader)?;
    let follower = load_csv(&args.follower)?;
    let truth = match &args.truth {
        Some(path) => {
            let t: GroundTruth = read_json(path)?;
            anyhow::ensure!(
                t.series_length == leader.len() && t.series_length == follower.len(),
                "ground truth length {} does not match the series",
                t.series_length
            );
            Some(SeriesMasks {
                leader: t.leader_mask(),
                follower: t.follower_mask(),
            })
        }
        None => None,
    };
    let params = FollowParams::new(args.window as usize, args.gap);
    let rows = noise_sweep(
        &leader,
        &follower,
        truth.as_ref(),
        &args.sigmas,
        params,
        args.seed,
    )?;
    let text = match args.output.format {
        Format::Json => to_json(&rows),
        Format::Csv => report::sweep_csv(&rows),
    };
    Ok(emit(&text, args.output.out.as_deref())?)
}

#[derive(Serialize)]
struct BenchRow {
    kernel: &'static str,
    n: usize,
    window: usize,
    seconds: f64,
}

fn bench(args: BenchArgs) -> Result<()> {
    let n = args.n as usize;
    let window = args.window as usize;
    let zeros = TimeSeries::new(vec![0.0; n])?;
    let a = add_gaussian_noise(&zeros, 1.0, args.seed)?;
    let b = add_gaussian_noise(&zeros, 1.0, args.seed.wrapping_add(1))?;
    let mut rows = Vec::new();
    let start = Instant::now();
    matrix_profile_ab(&a, &b, window)?;
    rows.push(BenchRow {
        kernel: "diagonal",
        n,
        window,
        seconds: start.elapsed().as_secs_f64(),
    });
    if args.naive {
        let start = Instant::now();
        matrix_profile_naive(&a, &b, window)?;
        rows.push(BenchRow {
            kernel: "naive",
            n,
            window,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    print!("{}", to_json(&rows));
    Ok(())
}
