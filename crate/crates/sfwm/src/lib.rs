//! Command-line front end for `sfwm-core`: reads one JSON run configuration,
//! runs a subcommand and writes CSV/JSON results plus a manifest.
//!
//! Runs are reproducible byte for byte: parallel regions collect their
//! results in input order, numbers are printed with twelve significant
//! digits, and the manifest records nothing that changes between reruns.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::commands::{execute, read_gvd_csv, Context};
use crate::config::RunConfig;
use crate::error::{RunError, Stage};
use crate::manifest::Manifest;
use crate::output::json_bytes;

#[derive(Debug, Parser)]
#[command(name = "sfwm", version, about = "Photon-pair spectra and g2 of spliced fibers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for the noise added to synthetic fit samples.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dispersion curves and zero-dispersion wavelengths per segment.
    Dispersion,
    /// Core radius and air fill from tabulated GVD.
    Fit,
    /// Phase-matched wavelengths, group slowness mismatch and angle per segment.
    Phasematch,
    /// Phase matching against pump wavelength, with AGVM roots.
    GvmCurve,
    /// Joint spectral intensity matrix.
    Jsa,
    /// Signal and idler marginal spectra.
    Marginal,
    /// Filtered counting rate against filter centre.
    FilterScan,
    /// g2 of the assembly made of all segments in order.
    G2,
    /// g2 of every listed configuration at every pump width.
    G2Table,
    /// Best splice order from the segment pool.
    Plan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Dispersion => "dispersion",
            Command::Fit => "fit",
            Command::Phasematch => "phasematch",
            Command::GvmCurve => "gvm-curve",
            Command::Jsa => "jsa",
            Command::Marginal => "marginal",
            Command::FilterScan => "filter-scan",
            Command::G2 => "g2",
            Command::G2Table => "g2-table",
            Command::Plan => "plan",
        }
    }
}

/// Validates, computes, then writes. Returns the paths written.
pub fn run(cmd: Command, flags: &Flags) -> Result<Vec<PathBuf>, RunError> {
    let config_path = flags
        .config
        .as_deref()
        .ok_or_else(|| RunError::new(Stage::Config, "--config is required"))?;
    let (cfg, raw) = RunConfig::load(config_path)?;
    cfg.validate(cmd)?;
    if flags.threads == Some(0) {
        return Err(RunError::new(Stage::Config, "--threads must be at least 1"));
    }
    let mut ctx = Context::new(&cfg, flags.seed)?;
    if cmd == Command::Fit {
        if let Some(p) = cfg.fit.as_ref().and_then(|f| f.gvd_csv.as_ref()) {
            ctx.gvd_samples = Some(load_gvd(&resolve(config_path, p))?);
        }
    }
    let out_dir = flags.out.clone().unwrap_or_else(|| cfg.output_dir.clone());

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = flags.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| RunError::new(Stage::Compute, format!("thread pool: {e}")))?;
    let mut product = pool.install(|| execute(cmd, &ctx))?;

    let mut manifest = Manifest::new(cmd.name(), &raw, flags.seed);
    manifest.grids = std::mem::take(&mut product.grids);
    manifest.outputs = product.files.names();
    product.files.add("manifest.json", json_bytes(&manifest));
    product.files.write(&out_dir)
}

/// Relative paths inside a configuration are taken from its directory.
fn resolve(config_path: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        config_path.parent().unwrap_or(Path::new(".")).join(p)
    }
}

fn load_gvd(path: &Path) -> Result<Vec<sfwm_core::GvdSample>, RunError> {
    let bytes = std::fs::read(path).map_err(|e| RunError::new(Stage::Input, format!("{}: {e}", path.display())))?;
    read_gvd_csv(&bytes).map_err(|e| RunError::new(Stage::Input, format!("{}: {e}", path.display())))
}
