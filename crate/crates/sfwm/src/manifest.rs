//! Run manifest: what was run, on which configuration, on which grids.
//! Holds nothing that varies between identical runs (no timestamps, paths
//! or thread counts).

use serde::Serialize;
use sfwm_core::units::nm_from_omega;
use sfwm_core::{FrequencyGrid, UniformAxis};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub core_version: &'static str,
    pub subcommand: &'static str,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub grids: Vec<GridRecord>,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(subcommand: &'static str, config_bytes: &[u8], seed: Option<u64>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: sfwm_core::VERSION,
            subcommand,
            config_sha256: sha256_hex(config_bytes),
            seed,
            grids: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct AxisRecord {
    pub start_rad_per_s: f64,
    pub step_rad_per_s: f64,
    pub points: usize,
    pub wavelength_range_nm: [f64; 2],
}

impl From<&UniformAxis> for AxisRecord {
    fn from(a: &UniformAxis) -> Self {
        Self {
            start_rad_per_s: a.start,
            step_rad_per_s: a.step,
            points: a.len,
            wavelength_range_nm: [nm_from_omega(a.end()), nm_from_omega(a.start)],
        }
    }
}

/// A frequency grid actually used, with the label of what it was used for.
#[derive(Debug, Clone, Serialize)]
pub struct GridRecord {
    pub label: String,
    pub signal: AxisRecord,
    pub idler: AxisRecord,
}

impl GridRecord {
    pub fn new(label: impl Into<String>, grid: &FrequencyGrid) -> Self {
        Self {
            label: label.into(),
            signal: (&grid.signal).into(),
            idler: (&grid.idler).into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
