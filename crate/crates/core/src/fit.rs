//! Effective structure `(r, f)` from tabulated group-velocity dispersion.
//!
//! Damped Gauss-Newton (Levenberg-Marquardt) on the two parameters with a
//! forward-difference Jacobian. Residuals are summed in sample order.

use alloc::vec::Vec;

use crate::dispersion::{DispersionModel, GvdSample, Structure};
use crate::error::{invalid, Error, Result};
use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub radius_bounds_nm: (f64, f64),
    pub air_fill_bounds: (f64, f64),
    /// Converged once a step moves `r` by less than this (nm) ...
    pub radius_tolerance_nm: f64,
    /// ... and `f` by less than this.
    pub air_fill_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 60,
            radius_bounds_nm: (200.0, 5000.0),
            air_fill_bounds: (0.01, 0.9),
            radius_tolerance_nm: 1e-4,
            air_fill_tolerance: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub core_radius_nm: f64,
    pub air_fill: f64,
    /// RMS of model minus sample GVD, ps²/m.
    pub residual: f64,
    pub iterations: usize,
}

const STEP_R_NM: f64 = 0.05;
const STEP_F: f64 = 5e-5;
// parameters are scaled so that one unit is 1 nm of radius or 1e-3 of fill
const SCALE_F: f64 = 1e-3;

fn residuals(model: &DispersionModel, samples: &[GvdSample], r: f64, f: f64) -> Result<Vec<f64>> {
    let s = Structure::new(r, f)?;
    samples
        .iter()
        .map(|p| Ok(model.gvd(s, p.wavelength_nm)? - p.gvd_ps2_per_m))
        .collect()
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn clamp(x: f64, (lo, hi): (f64, f64)) -> f64 {
    x.max(lo).min(hi)
}

pub fn fit_structure(
    model: &DispersionModel,
    samples: &[GvdSample],
    initial_guess: (f64, f64),
    opts: &FitOptions,
) -> Result<FitResult> {
    if samples.len() < 6 {
        return Err(invalid("samples", "need at least six GVD samples"));
    }
    if samples
        .iter()
        .any(|s| !s.wavelength_nm.is_finite() || !s.gvd_ps2_per_m.is_finite())
    {
        return Err(invalid("samples", "must be finite"));
    }
    let (mut r, mut f) = initial_guess;
    Structure::new(r, f)?;
    r = clamp(r, opts.radius_bounds_nm);
    f = clamp(f, opts.air_fill_bounds);

    let mut res = residuals(model, samples, r, f)?;
    let mut cost = sum_sq(&res);
    let mut lambda = 1e-3;
    let rms = |c: f64| sqrt(c / samples.len() as f64);

    for iter in 1..=opts.max_iterations {
        let rr = residuals(model, samples, r + STEP_R_NM, f)?;
        let rf = residuals(model, samples, r, f + STEP_F)?;
        // Jacobian columns in scaled units
        let jr: Vec<f64> = rr.iter().zip(&res).map(|(a, b)| (a - b) / STEP_R_NM).collect();
        let jf: Vec<f64> = rf.iter().zip(&res).map(|(a, b)| (a - b) / STEP_F * SCALE_F).collect();
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for k in 0..res.len() {
            a11 += jr[k] * jr[k];
            a12 += jr[k] * jf[k];
            a22 += jf[k] * jf[k];
            g1 += jr[k] * res[k];
            g2 += jf[k] * res[k];
        }

        let mut accepted = None;
        for _ in 0..30 {
            let b11 = a11 * (1.0 + lambda);
            let b22 = a22 * (1.0 + lambda);
            let det = b11 * b22 - a12 * a12;
            if !(det.abs() > 0.0) {
                lambda *= 10.0;
                continue;
            }
            let dr = -(b22 * g1 - a12 * g2) / det;
            let df = -(b11 * g2 - a12 * g1) / det * SCALE_F;
            let nr = clamp(r + dr, opts.radius_bounds_nm);
            let nf = clamp(f + df, opts.air_fill_bounds);
            match residuals(model, samples, nr, nf) {
                Ok(nres) if sum_sq(&nres) <= cost => {
                    accepted = Some((nr, nf, nres));
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        // no damped step lowers the cost: a stationary point
        let Some((nr, nf, nres)) = accepted else {
            return Ok(FitResult {
                core_radius_nm: r,
                air_fill: f,
                residual: rms(cost),
                iterations: iter,
            });
        };
        let (step_r, step_f) = ((nr - r).abs(), (nf - f).abs());
        r = nr;
        f = nf;
        cost = sum_sq(&nres);
        res = nres;
        lambda = (lambda * 0.1).max(1e-12);
        if step_r < opts.radius_tolerance_nm && step_f < opts.air_fill_tolerance {
            return Ok(FitResult {
                core_radius_nm: r,
                air_fill: f,
                residual: rms(cost),
                iterations: iter,
            });
        }
    }
    Err(Error::FitFailed {
        core_radius_nm: r,
        air_fill: f,
        residual: rms(cost),
    })
}
