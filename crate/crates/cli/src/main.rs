use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pulsecut::synth::MurmurPlacement;
use pulsecut::{Error, PipelineConfig, Result};

mod corpus;
mod evaluate;
mod segment;
mod util;

#[derive(Parser, Debug)]
#[command(
    name = "pulsecut",
    version,
    about = "Unsupervised S1/S2 segmentation of heart-sound recordings"
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,

    /// Worker threads for batch commands; 0 uses every logical core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

/// Pipeline settings. Flags win over the config file, which wins over the
/// built-in defaults.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat JSON config file.
    #[arg(long, global = true, env = "PULSECUT_CONFIG")]
    config: Option<PathBuf>,
    /// Analysis sample rate in Hz; recordings are resampled to it.
    #[arg(long, global = true)]
    fs: Option<u32>,
    #[arg(long, global = true)]
    eta_ms: Option<f64>,
    /// Matching tolerance for evaluation.
    #[arg(long, global = true)]
    tol_ms: Option<f64>,
    /// Histogram bins used to estimate the systole duration.
    #[arg(long, global = true)]
    hist_bins: Option<usize>,
}

impl Overrides {
    fn resolve(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = self.fs {
            cfg.fs = v;
        }
        if let Some(v) = self.eta_ms {
            cfg.eta_ms = v;
        }
        if let Some(v) = self.tol_ms {
            cfg.tol_ms = v;
        }
        if let Some(v) = self.hist_bins {
            cfg.hist_bins = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Segment WAV files (or directories of them) into S1/S2 annotations.
    Segment {
        /// WAV files or directories holding them.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write `<stem>.alpha.csv` with the divergence profile.
        #[arg(long)]
        dump_alpha: bool,
        /// Also write `<stem>.dissim.bin` with the full dissimilarity matrix.
        #[arg(long)]
        dump_dissimilarity: bool,
    },
    /// Score detected annotations against ground truth, pairing files by stem.
    Evaluate {
        detected: PathBuf,
        truth: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Generate a synthetic annotated corpus.
    Synth {
        #[arg(short, long)]
        out: PathBuf,
        /// Corpus spec JSON; flags below override its fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        duration_s: Option<f64>,
        /// Add a murmur (band 15-700 Hz, gain 0.5) in this phase.
        #[arg(long, value_enum)]
        murmur: Option<MurmurArg>,
    },
    /// Add noise to a corpus at one or more SNRs, one sibling corpus each.
    Mix {
        corpus: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Comma-separated SNRs in dB.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0")]
        snr: Vec<f64>,
        /// WAV of recorded ambient noise; white Gaussian noise when absent.
        #[arg(long)]
        noise: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum MurmurArg {
    Systolic,
    Diastolic,
}

impl From<MurmurArg> for MurmurPlacement {
    fn from(m: MurmurArg) -> Self {
        match m {
            MurmurArg::Systolic => MurmurPlacement::Systolic,
            MurmurArg::Diastolic => MurmurPlacement::Diastolic,
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Param(format!("worker pool: {e}")))?;
    match cli.command {
        Command::Segment {
            inputs,
            out,
            dump_alpha,
            dump_dissimilarity,
        } => {
            let cfg = cli.overrides.resolve()?;
            let opts = segment::Options {
                dump_alpha,
                dump_dissimilarity,
            };
            pool.install(|| segment::run(&inputs, &out, &cfg, opts))
        }
        Command::Evaluate { detected, truth, out } => {
            let cfg = cli.overrides.resolve()?;
            pool.install(|| evaluate::run(&detected, &truth, &out, &cfg))
        }
        Command::Synth {
            out,
            spec,
            count,
            seed,
            duration_s,
            murmur,
        } => {
            let args = corpus::SynthArgs {
                spec,
                count,
                seed,
                duration_s,
                murmur: murmur.map(Into::into),
                fs: cli.overrides.fs,
            };
            pool.install(|| corpus::synth(&out, &args))
        }
        Command::Mix {
            corpus: src,
            out,
            snr,
            noise,
            seed,
        } => pool.install(|| corpus::mix(&src, &out, &snr, noise.as_deref(), seed)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
