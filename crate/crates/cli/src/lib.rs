//! `ssf` command-line pipeline: dense ground-truth annotation from active
//! stereo, proxy-label distillation, evaluation and MS registration.

pub mod annotate;
pub mod config;
pub mod evaluate;
pub mod proxy;
pub mod register;
pub mod scene;
pub mod selftest;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ssf_core::refine::SubpixelMode;
use ssf_core::supervision::ProxySource;

use crate::config::PipelineConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_REJECTED: u8 = 2;
pub const EXIT_INPUT: u8 = 3;

/// Error tagged with the pipeline stage that raised it and the exit code
/// it maps to.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub code: u8,
    pub error: anyhow::Error,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage: {:#}", self.stage, self.error)
    }
}

impl std::error::Error for Failure {}

pub trait StageExt<T> {
    /// Input-side failure of `stage` (exit code 3).
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
    /// Output-side failure of `stage` (exit code 1).
    fn output(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> StageExt<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            stage,
            code: EXIT_INPUT,
            error: e.into(),
        })
    }

    fn output(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            stage,
            code: EXIT_FAILURE,
            error: e.into(),
        })
    }
}

/// Normal completion of a subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Output produced but rejected by the density gate.
    Rejected,
}

#[derive(Debug, Parser)]
#[command(name = "ssf", version, about = "Space-time stereo annotation and cross-spectral registration")]
pub struct Cli {
    /// Pipeline configuration document (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dense disparity ground truth from a scene of active stereo pairs.
    Annotate {
        scene: PathBuf,
        /// Output directory; defaults to `<scene>/annotation`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sub-pixel refinement: `parabola` or `literal`.
        #[arg(long, value_parser = parse_subpixel)]
        subpixel: Option<SubpixelMode>,
    },
    /// SGM proxy labels for every scene of a dataset directory.
    Proxy {
        dataset: PathBuf,
        /// Output directory; defaults to `<dataset>/proxy`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Proxy source: `second-rgb` or `direct-rgbms`.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<ProxySource>,
        /// Sub-pixel refinement: `parabola` or `literal`.
        #[arg(long, value_parser = parse_subpixel)]
        subpixel: Option<SubpixelMode>,
    },
    /// Registration and depth metrics of a prediction against ground truth.
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        calib: PathBuf,
        /// Comma-separated flow tolerances, e.g. `1,2,3`.
        #[arg(long, value_delimiter = ',')]
        taus: Option<Vec<f64>>,
        /// Directory for `report.toml` and `report.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resamples an MS image onto the RGB frame using a disparity map.
    Register {
        #[arg(long)]
        ms: PathBuf,
        #[arg(long)]
        disp: PathBuf,
        #[arg(long)]
        calib: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Checks that configuration defaults match the library defaults.
    Selftest,
}

fn parse_subpixel(s: &str) -> Result<SubpixelMode, String> {
    match s {
        "parabola" => Ok(SubpixelMode::ParabolaVertex),
        "literal" => Ok(SubpixelMode::LiteralRatio),
        other => Err(format!("unknown sub-pixel mode `{other}` (expected parabola or literal)")),
    }
}

fn parse_mode(s: &str) -> Result<ProxySource, String> {
    s.parse().map_err(|e: ssf_core::Error| e.to_string())
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, Failure> {
    match &cli.config {
        Some(p) => PipelineConfig::load(p).stage("config"),
        None => Ok(PipelineConfig::default()),
    }
}

fn dispatch(cli: &Cli) -> Result<Status, Failure> {
    let mut cfg = load_config(cli)?;
    match &cli.command {
        Command::Annotate { scene, out, subpixel } => {
            if let Some(m) = subpixel {
                cfg.refine.subpixel = *m;
            }
            let out = out.clone().unwrap_or_else(|| scene.join("annotation"));
            annotate::run(scene, &out, &cfg).map(|r| r.status())
        }
        Command::Proxy {
            dataset,
            out,
            mode,
            subpixel,
        } => {
            if let Some(m) = mode {
                cfg.supervision.mode = *m;
            }
            if let Some(m) = subpixel {
                cfg.refine.subpixel = *m;
            }
            let out = out.clone().unwrap_or_else(|| dataset.join("proxy"));
            proxy::run(dataset, &out, &cfg)
        }
        Command::Eval {
            pred,
            gt,
            calib,
            taus,
            out,
        } => {
            if let Some(t) = taus {
                cfg.eval.taus = t.clone();
            }
            evaluate::run(pred, gt, calib, out.as_deref(), &cfg)
        }
        Command::Register { ms, disp, calib, out } => register::run(ms, disp, calib, out),
        Command::Selftest => selftest::run(),
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> ExitCode {
    let outcome = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure {
                stage: "setup",
                code: EXIT_FAILURE,
                error: e.into(),
            }),
        },
        None => dispatch(&cli),
    };
    match outcome {
        Ok(Status::Success) => ExitCode::from(EXIT_OK),
        Ok(Status::Rejected) => ExitCode::from(EXIT_REJECTED),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
