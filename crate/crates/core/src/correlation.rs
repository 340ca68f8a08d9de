//! Unheralded second-order correlation of one daughter field and the Schmidt
//! decomposition of the joint spectral amplitude.
//!
//! `g² = 1 + ∫∫|∫f*(ω_s,ω_i) f(ω_s′,ω_i) dω_i|² dω_s dω_s′ / (∫∫|f|²)²`,
//! which is `1 + 1/K` with `K` the Schmidt number.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::phasematch::PumpSpec;
use crate::spectra::{auto_grid, build_jsa, AssemblySpec, FrequencyGrid, GridOptions, JsaGrid};

/// `√(w_s w_i)·f`, laid out so that each row runs along the longer axis.
fn weighted_lines(jsa: &JsaGrid) -> (Vec<Complex64>, usize, usize) {
    let g = jsa.grid();
    let (ns, ni) = (jsa.ns(), jsa.ni());
    let ws: Vec<f64> = (0..ns).map(|s| sqrt(g.signal.weight(s))).collect();
    let wi: Vec<f64> = (0..ni).map(|i| sqrt(g.idler.weight(i))).collect();
    let mut out = Vec::with_capacity(ns * ni);
    if ns <= ni {
        for (s, a) in ws.iter().enumerate() {
            out.extend(jsa.row(s).iter().zip(&wi).map(|(z, w)| z * (w * a)));
        }
        (out, ns, ni)
    } else {
        for (i, b) in wi.iter().enumerate() {
            out.extend(ws.iter().enumerate().map(|(s, a)| jsa.amplitude(s, i) * (a * b)));
        }
        (out, ni, ns)
    }
}

/// Trapezoid-weighted `g²` through the Gram matrix
/// `M(s, s′) = Σ_i w_i f*(s,i) f(s′,i)`, summed in a fixed order.
///
/// `Σ|M(s,s′)|² w_s w_s′` equals the same sum built over the idler axis, so
/// the Gram matrix is formed over whichever axis is shorter.
pub fn g2_quadrature(jsa: &JsaGrid) -> Result<f64> {
    let (a, rows, len) = weighted_lines(jsa);
    let line = |r: usize| &a[r * len..(r + 1) * len];
    let mut num = 0.0;
    let mut norm = 0.0;
    for r in 0..rows {
        let x = line(r);
        let diag: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        norm += diag;
        num += diag * diag;
        for t in r + 1..rows {
            let mut m = Complex64::new(0.0, 0.0);
            for (p, q) in x.iter().zip(line(t)) {
                m += p.conj() * q;
            }
            num += 2.0 * m.norm_sqr();
        }
    }
    if !(norm > 0.0) {
        return Err(Error::ZeroAmplitude);
    }
    Ok(1.0 + num / (norm * norm))
}

/// Singular values of the weighted amplitude matrix and the quantities
/// derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtResult {
    /// Descending, common scale arbitrary.
    pub singular_values: Vec<f64>,
    /// `K = (Σσ²)²/Σσ⁴`.
    pub schmidt_number: f64,
    /// Heralded purity `1/K`.
    pub purity: f64,
    pub g2: f64,
}

impl SchmidtResult {
    pub fn from_singular_values(mut singular_values: Vec<f64>) -> Result<Self> {
        singular_values.sort_by(|a, b| b.total_cmp(a));
        let s2: f64 = singular_values.iter().map(|s| s * s).sum();
        let s4: f64 = singular_values.iter().map(|s| s * s * s * s).sum();
        if !(s2 > 0.0) {
            return Err(Error::ZeroAmplitude);
        }
        let purity = s4 / (s2 * s2);
        Ok(Self {
            singular_values,
            schmidt_number: 1.0 / purity,
            purity,
            g2: 1.0 + purity,
        })
    }

    /// Number of modes above `rel` times the largest.
    pub fn rank(&self, rel: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().filter(|&&s| s > rel * top).count()
    }
}

/// SVD of `√(w_s w_i)·f(s, i)`.
pub fn schmidt_decompose(jsa: &JsaGrid) -> Result<SchmidtResult> {
    let (ns, ni) = (jsa.ns(), jsa.ni());
    let g = jsa.grid();
    let ws: Vec<f64> = (0..ns).map(|s| sqrt(g.signal.weight(s))).collect();
    let wi: Vec<f64> = (0..ni).map(|i| sqrt(g.idler.weight(i))).collect();
    let m = DMatrix::from_fn(ns, ni, |s, i| jsa.amplitude(s, i) * (ws[s] * wi[i]));
    let svd = m.try_svd(false, false, f64::EPSILON, 0).ok_or(Error::NoConvergence {
        what: "singular value decomposition",
        residual: f64::NAN,
    })?;
    SchmidtResult::from_singular_values(svd.singular_values.iter().copied().collect())
}

/// One row of a `g²` table: an assembly under one pump.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Configuration {
    pub label: String,
    pub assembly: AssemblySpec,
    pub pump: PumpSpec,
    pub grid: GridOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2Row {
    pub label: String,
    pub total_length_m: f64,
    pub pump_fwhm_nm: f64,
    pub g2: f64,
    pub schmidt_number: f64,
    pub purity: f64,
    pub grid: FrequencyGrid,
}

impl G2Configuration {
    pub fn evaluate(&self) -> Result<G2Row> {
        let grid = auto_grid(&self.assembly, &self.pump, &self.grid)?;
        let jsa = build_jsa(&self.assembly, &self.pump, &grid)?;
        let g2 = g2_quadrature(&jsa)?;
        let purity = g2 - 1.0;
        Ok(G2Row {
            label: self.label.clone(),
            total_length_m: self.assembly.total_length_m(),
            pump_fwhm_nm: self.pump.fwhm_nm,
            g2,
            schmidt_number: 1.0 / purity,
            purity,
            grid,
        })
    }
}

/// Evaluates every configuration; a failing row does not stop the others.
pub fn g2_table(configurations: &[G2Configuration]) -> Vec<Result<G2Row>> {
    configurations.iter().map(G2Configuration::evaluate).collect()
}
