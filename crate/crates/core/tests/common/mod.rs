#![allow(dead_code)]

use sfwm_core::reference::{assembly, ElementalSegment};
use sfwm_core::{AssemblySpec, PhaseMatchPoint, PumpSpec};

pub const PUMP_NM: f64 = 1070.0;

pub fn pump(fwhm_nm: f64) -> PumpSpec {
    PumpSpec::new(PUMP_NM, fwhm_nm).unwrap()
}

pub fn point(label: &str) -> PhaseMatchPoint {
    ElementalSegment::by_label(label).unwrap().point(1.0).unwrap()
}

/// Assembly of elemental segments in the given order, every piece `len` long.
pub fn spliced(labels: &[&str], len: f64) -> AssemblySpec {
    let parts: Vec<(&str, f64)> = labels.iter().map(|l| (*l, len)).collect();
    assembly(&labels.join("+"), &parts, 1.0).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
