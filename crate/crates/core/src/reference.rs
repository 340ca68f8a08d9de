//! Published elemental segments and the `g²` values computed from them.
//!
//! Four segments S1–S4 of one fiber family (air-filling fraction 29.6 %)
//! differ only in core radius. Their phase-matching data at a 1070 nm pump
//! drive the spliced-assembly regressions.

use alloc::format;
use alloc::vec::Vec;

use crate::correlation::G2Configuration;
use crate::dispersion::FiberSegment;
use crate::error::{invalid, Result};
use crate::phasematch::{PhaseMatchPoint, PumpSpec};
use crate::spectra::{AssemblySegment, AssemblySpec, GridOptions, ModelMode};

pub const PUMP_CENTER_NM: f64 = 1070.0;
pub const ELEMENT_LENGTH_M: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementalSegment {
    pub label: &'static str,
    pub core_radius_nm: f64,
    pub air_fill: f64,
    pub lambda_s0_nm: f64,
    pub lambda_i0_nm: f64,
    pub tau_s_ps_per_m: f64,
    /// `|arctan(τ_i/τ_s)|`, rad.
    pub theta_rad: f64,
}

pub const ELEMENTAL_SEGMENTS: [ElementalSegment; 4] = [
    ElementalSegment {
        label: "S1",
        core_radius_nm: 947.0,
        air_fill: 0.296,
        lambda_s0_nm: 1409.9,
        lambda_i0_nm: 862.1,
        tau_s_ps_per_m: 3.2,
        theta_rad: 0.004,
    },
    ElementalSegment {
        label: "S2",
        core_radius_nm: 947.5,
        air_fill: 0.296,
        lambda_s0_nm: 1413.6,
        lambda_i0_nm: 860.8,
        tau_s_ps_per_m: 3.2,
        theta_rad: 0.002,
    },
    ElementalSegment {
        label: "S3",
        core_radius_nm: 948.0,
        air_fill: 0.296,
        lambda_s0_nm: 1417.3,
        lambda_i0_nm: 859.4,
        tau_s_ps_per_m: 3.3,
        theta_rad: 0.001,
    },
    ElementalSegment {
        label: "S4",
        core_radius_nm: 948.5,
        air_fill: 0.296,
        lambda_s0_nm: 1421.0,
        lambda_i0_nm: 858.1,
        tau_s_ps_per_m: 3.4,
        theta_rad: 0.004,
    },
];

impl ElementalSegment {
    pub fn by_label(label: &str) -> Result<&'static ElementalSegment> {
        ELEMENTAL_SEGMENTS
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| invalid("segment label", format!("unknown segment {label}")))
    }

    /// Linearisation at the 1070 nm pump; `tau_i_sign` is ±1.
    pub fn point(&self, tau_i_sign: f64) -> Result<PhaseMatchPoint> {
        PhaseMatchPoint::from_tabulated(
            PUMP_CENTER_NM,
            self.lambda_s0_nm,
            self.tau_s_ps_per_m,
            self.theta_rad,
            tau_i_sign,
        )
    }

    pub fn fiber(&self, length_m: f64) -> Result<FiberSegment> {
        FiberSegment::new(self.label, self.core_radius_nm, self.air_fill, length_m)
    }

    pub fn assembly_segment(&self, length_m: f64, tau_i_sign: f64) -> Result<AssemblySegment> {
        Ok(AssemblySegment::linearized(
            self.label,
            length_m,
            self.point(tau_i_sign)?,
        ))
    }
}

/// Linearised assembly from `(label, length)` pairs in splice order.
pub fn assembly(name: &str, parts: &[(&str, f64)], tau_i_sign: f64) -> Result<AssemblySpec> {
    let segs = parts
        .iter()
        .map(|&(l, len)| ElementalSegment::by_label(l)?.assembly_segment(len, tau_i_sign))
        .collect::<Result<Vec<_>>>()?;
    AssemblySpec::new(name, segs, ModelMode::Linearized)
}

/// One published `g²` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedG2 {
    pub label: &'static str,
    /// Segments in splice order with their lengths, m.
    pub parts: &'static [(&'static str, f64)],
    pub total_length_m: f64,
    /// At pump FWHM 2 nm and 5 nm.
    pub g2: [f64; 2],
}

pub const PUBLISHED_PUMP_FWHM_NM: [f64; 2] = [2.0, 5.0];

pub const PUBLISHED_G2: [PublishedG2; 10] = [
    PublishedG2 {
        label: "S1+S2",
        parts: &[("S1", 0.3), ("S2", 0.3)],
        total_length_m: 0.6,
        g2: [1.62, 1.86],
    },
    PublishedG2 {
        label: "S1+S3",
        parts: &[("S1", 0.3), ("S3", 0.3)],
        total_length_m: 0.6,
        g2: [1.43, 1.75],
    },
    PublishedG2 {
        label: "S1+S2+S3",
        parts: &[("S1", 0.3), ("S2", 0.3), ("S3", 0.3)],
        total_length_m: 0.9,
        g2: [1.52, 1.82],
    },
    PublishedG2 {
        label: "S1+S2+S3+S4",
        parts: &[("S1", 0.3), ("S2", 0.3), ("S3", 0.3), ("S4", 0.3)],
        total_length_m: 1.2,
        g2: [1.42, 1.75],
    },
    PublishedG2 {
        label: "S1+S4+S2+S3",
        parts: &[("S1", 0.3), ("S4", 0.3), ("S2", 0.3), ("S3", 0.3)],
        total_length_m: 1.2,
        g2: [1.44, 1.76],
    },
    PublishedG2 {
        label: "S1+S3 (1.5 m each)",
        parts: &[("S1", 1.5), ("S3", 1.5)],
        total_length_m: 3.0,
        g2: [1.49, 1.79],
    },
    PublishedG2 {
        label: "S2 0.3 m",
        parts: &[("S2", 0.3)],
        total_length_m: 0.3,
        g2: [1.56, 1.81],
    },
    PublishedG2 {
        label: "S2 0.6 m",
        parts: &[("S2", 0.6)],
        total_length_m: 0.6,
        g2: [1.75, 1.90],
    },
    PublishedG2 {
        label: "S2 0.9 m",
        parts: &[("S2", 0.9)],
        total_length_m: 0.9,
        g2: [1.83, 1.93],
    },
    PublishedG2 {
        label: "S2 1.5 m",
        parts: &[("S2", 1.5)],
        total_length_m: 1.5,
        g2: [1.89, 1.96],
    },
];

/// All published rows at both pump bandwidths, row-major (FWHM varies fastest).
pub fn published_configurations(tau_i_sign: f64, grid: &GridOptions) -> Result<Vec<G2Configuration>> {
    let mut out = Vec::new();
    for row in &PUBLISHED_G2 {
        let asm = assembly(row.label, row.parts, tau_i_sign)?;
        for fwhm in PUBLISHED_PUMP_FWHM_NM {
            out.push(G2Configuration {
                label: row.label.into(),
                assembly: asm.clone(),
                pump: PumpSpec::new(PUMP_CENTER_NM, fwhm)?,
                grid: grid.clone(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idler_follows_from_energy_conservation() {
        for s in &ELEMENTAL_SEGMENTS {
            let p = s.point(1.0).unwrap();
            assert!((p.lambda_i0_nm() - s.lambda_i0_nm).abs() < 0.1, "{}", s.label);
        }
    }

    #[test]
    fn lengths_add_up() {
        for row in &PUBLISHED_G2 {
            let total: f64 = row.parts.iter().map(|p| p.1).sum();
            assert!((total - row.total_length_m).abs() < 1e-12);
        }
    }
}
