use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::math::exp;
use crate::phasematch::PumpSpec;

use super::assembly::{phi_assembly, AssemblySpec, ModelMode};
use super::grid::{check_resolution, FrequencyGrid};

/// Gaussian pump envelope `exp[−(ω_s + ω_i − 2ω_pc)²/(4σ_p²)]`.
pub fn pump_envelope(pump: &PumpSpec, omega_s: f64, omega_i: f64) -> f64 {
    let d = omega_s + omega_i - 2.0 * pump.center_omega();
    let sp = pump.sigma_p();
    exp(-d * d / (4.0 * sp * sp))
}

/// Joint spectral amplitude sampled on a grid, row-major in the signal index.
#[derive(Debug, Clone, PartialEq)]
pub struct JsaGrid {
    grid: FrequencyGrid,
    amplitude: Vec<Complex64>,
    pump: PumpSpec,
    assembly: AssemblySpec,
}

impl JsaGrid {
    /// Checks everything [`build_jsa`] checks, so callers can evaluate rows
    /// themselves (for instance in parallel) and hand them to
    /// [`JsaGrid::from_rows`].
    pub fn validate_inputs(asm: &AssemblySpec, pump: &PumpSpec, grid: &FrequencyGrid) -> Result<()> {
        pump.validate()?;
        if asm.mode() == ModelMode::Linearized {
            let w = pump.center_omega();
            if ((asm.omega_pc() - w) / w).abs() > 1e-9 {
                return Err(invalid(
                    "pump",
                    "centre differs from the one the assembly was linearised at",
                ));
            }
        }
        check_resolution(asm, grid)
    }

    /// One signal row `f(ω_s[row], ·)`.
    pub fn evaluate_row(
        asm: &AssemblySpec,
        pump: &PumpSpec,
        grid: &FrequencyGrid,
        row: usize,
    ) -> Result<Vec<Complex64>> {
        let ws = grid.signal.value(row);
        (0..grid.idler.len)
            .map(|j| {
                let wi = grid.idler.value(j);
                Ok(phi_assembly(asm, ws, wi)? * pump_envelope(pump, ws, wi))
            })
            .collect()
    }

    pub fn from_rows(
        asm: &AssemblySpec,
        pump: &PumpSpec,
        grid: &FrequencyGrid,
        rows: Vec<Vec<Complex64>>,
    ) -> Result<Self> {
        Self::validate_inputs(asm, pump, grid)?;
        if rows.len() != grid.signal.len || rows.iter().any(|r| r.len() != grid.idler.len) {
            return Err(invalid("rows", "dimensions do not match the grid"));
        }
        let amplitude: Vec<Complex64> = rows.into_iter().flatten().collect();
        if amplitude.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NoConvergence {
                what: "joint spectral amplitude",
                residual: f64::NAN,
            });
        }
        Ok(Self {
            grid: *grid,
            amplitude,
            pump: *pump,
            assembly: asm.clone(),
        })
    }

    /// Wraps amplitudes computed elsewhere (row-major in the signal index).
    /// Only dimensions and finiteness are checked.
    pub fn from_samples(
        asm: &AssemblySpec,
        pump: &PumpSpec,
        grid: &FrequencyGrid,
        amplitude: Vec<Complex64>,
    ) -> Result<Self> {
        pump.validate()?;
        if amplitude.len() != grid.signal.len * grid.idler.len {
            return Err(invalid("amplitudes", "length does not match the grid"));
        }
        if amplitude.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("amplitudes", "must be finite"));
        }
        Ok(Self {
            grid: *grid,
            amplitude,
            pump: *pump,
            assembly: asm.clone(),
        })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn pump(&self) -> &PumpSpec {
        &self.pump
    }

    pub fn assembly(&self) -> &AssemblySpec {
        &self.assembly
    }

    pub fn ns(&self) -> usize {
        self.grid.signal.len
    }

    pub fn ni(&self) -> usize {
        self.grid.idler.len
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitude
    }

    #[inline]
    pub fn amplitude(&self, s: usize, i: usize) -> Complex64 {
        self.amplitude[s * self.grid.idler.len + i]
    }

    #[inline]
    pub fn intensity(&self, s: usize, i: usize) -> f64 {
        self.amplitude(s, i).norm_sqr()
    }

    pub fn row(&self, s: usize) -> &[Complex64] {
        let n = self.grid.idler.len;
        &self.amplitude[s * n..(s + 1) * n]
    }

    /// Grid indices of the largest `|f|²`.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0.0);
        for (k, z) in self.amplitude.iter().enumerate() {
            let v = z.norm_sqr();
            if v > best.1 {
                best = (k, v);
            }
        }
        (best.0 / self.ni(), best.0 % self.ni())
    }
}

/// `f = α·φ` on every grid point.
pub fn build_jsa(asm: &AssemblySpec, pump: &PumpSpec, grid: &FrequencyGrid) -> Result<JsaGrid> {
    JsaGrid::validate_inputs(asm, pump, grid)?;
    let rows = (0..grid.signal.len)
        .map(|row| JsaGrid::evaluate_row(asm, pump, grid, row))
        .collect::<Result<Vec<_>>>()?;
    JsaGrid::from_rows(asm, pump, grid, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_examples() {
        let pump = PumpSpec::new(1070.0, 2.0).unwrap();
        let w = pump.center_omega();
        let sp = pump.sigma_p();
        assert_eq!(pump_envelope(&pump, w + 3e12, w - 3e12), 1.0);
        let e = pump_envelope(&pump, w + sp, w + sp);
        assert!((e - (-1.0f64).exp()).abs() < 1e-12);
        let a = pump_envelope(&pump, w + 1e12, w - 7e12);
        let b = pump_envelope(&pump, w - 7e12, w + 1e12);
        assert_eq!(a, b);
    }
}
