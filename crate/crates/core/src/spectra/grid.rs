use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::math::{ceil, floor, PI};
use crate::phasematch::PumpSpec;
use crate::units::omega_from_nm;

use super::assembly::{delta_k, AssemblySpec};

/// Largest change of the accumulated phase `Σ|Δkₙ|Lₙ` allowed between adjacent
/// samples at the grid edge.
pub const MAX_PHASE_STEP: f64 = PI / 8.0;

/// Uniformly spaced ascending axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformAxis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformAxis {
    pub fn new(start: f64, end: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(invalid("axis", "needs at least two points"));
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(invalid("axis", "range must be finite and ascending"));
        }
        Ok(Self {
            start,
            step: (end - start) / (len - 1) as f64,
            len,
        })
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.start + self.step * j as f64
    }

    pub fn end(&self) -> f64 {
        self.value(self.len - 1)
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len).map(|j| self.value(j)).collect()
    }

    /// Trapezoid weight of sample `j`.
    #[inline]
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.len {
            0.5 * self.step
        } else {
            self.step
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.start && x <= self.end()
    }

    fn with_len(&self, len: usize) -> Result<Self> {
        Self::new(self.start, self.end(), len)
    }
}

/// Signal and idler angular-frequency axes, rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub signal: UniformAxis,
    pub idler: UniformAxis,
}

impl FrequencyGrid {
    pub fn new(signal: UniformAxis, idler: UniformAxis) -> Self {
        Self { signal, idler }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptions {
    pub ns: usize,
    pub ni: usize,
    /// Signal wavelength range in nm; derived from the assembly when unset.
    pub signal_range_nm: Option<(f64, f64)>,
    /// Idler wavelength range in nm; reflection of the signal range when unset.
    pub idler_range_nm: Option<(f64, f64)>,
    /// Sinc lobes kept on each side of every segment's phase-matched signal.
    pub lobes: f64,
    /// Pump-envelope padding of the reflected idler range, in units of σ_p.
    pub pump_padding_sigmas: f64,
    /// Raise point counts until the phase-step rule holds.
    pub auto_refine: bool,
    pub max_points: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            ns: 512,
            ni: 512,
            signal_range_nm: None,
            idler_range_nm: None,
            lobes: 15.0,
            pump_padding_sigmas: 4.0,
            auto_refine: true,
            max_points: 16384,
        }
    }
}

fn omega_range(range_nm: (f64, f64)) -> Result<(f64, f64)> {
    let (a, b) = range_nm;
    if !(a > 0.0 && b > a) {
        return Err(invalid("wavelength range", "must be positive and ascending"));
    }
    Ok((omega_from_nm(b), omega_from_nm(a)))
}

fn lobe_union(centres_and_widths: impl Iterator<Item = (f64, f64)>) -> Option<(f64, f64)> {
    let mut out: Option<(f64, f64)> = None;
    for (c, w) in centres_and_widths {
        let (lo, hi) = (c - w, c + w);
        out = Some(match out {
            None => (lo, hi),
            Some((a, b)) => (a.min(lo), b.max(hi)),
        });
    }
    out
}

fn reflect(range: (f64, f64), omega_pc: f64, pad: f64) -> (f64, f64) {
    (2.0 * omega_pc - range.1 - pad, 2.0 * omega_pc - range.0 + pad)
}

fn default_ranges(asm: &AssemblySpec, pump: &PumpSpec, opts: &GridOptions) -> Result<((f64, f64), (f64, f64))> {
    let omega_pc = pump.center_omega();
    let pad = opts.pump_padding_sigmas * pump.sigma_p();
    let half = 2.0 * PI * opts.lobes;
    let signal_lobes = lobe_union(
        asm.segments()
            .iter()
            .filter(|s| s.point.tau_s != 0.0)
            .map(|s| (s.point.omega_s0, half / (s.point.tau_s.abs() * s.length_m))),
    );
    let idler_lobes = lobe_union(
        asm.segments()
            .iter()
            .filter(|s| s.point.tau_i != 0.0)
            .map(|s| (s.point.omega_i0, half / (s.point.tau_i.abs() * s.length_m))),
    );
    let given_s = opts.signal_range_nm.map(omega_range).transpose()?;
    let given_i = opts.idler_range_nm.map(omega_range).transpose()?;
    match (given_s, given_i) {
        (Some(s), Some(i)) => Ok((s, i)),
        (Some(s), None) => Ok((s, reflect(s, omega_pc, pad))),
        (None, Some(i)) => Ok((reflect(i, omega_pc, pad), i)),
        (None, None) => match (signal_lobes, idler_lobes) {
            (Some(s), _) => Ok((s, reflect(s, omega_pc, pad))),
            (None, Some(i)) => Ok((reflect(i, omega_pc, pad), i)),
            (None, None) => Err(invalid(
                "assembly",
                "both group-velocity mismatches vanish, so a grid range must be given",
            )),
        },
    }
}

fn total_phase(asm: &AssemblySpec, ws: f64, wi: f64) -> Result<f64> {
    let mut sum = 0.0;
    for seg in asm.segments() {
        sum += delta_k(seg, asm.mode(), ws, wi)?.abs() * seg.length_m;
    }
    Ok(sum)
}

/// Largest change of `Σ|Δkₙ|Lₙ` between adjacent samples along the signal and
/// idler axes, measured on the four grid edges.
pub fn phase_steps(asm: &AssemblySpec, grid: &FrequencyGrid) -> Result<(f64, f64)> {
    let (s, i) = (grid.signal, grid.idler);
    let (ns, ni) = (s.len, i.len);
    let mut step_s: f64 = 0.0;
    for wi in [i.value(0), i.value(ni - 1)] {
        for (a, b) in [(0, 1), (ns - 2, ns - 1)] {
            let d = total_phase(asm, s.value(b), wi)? - total_phase(asm, s.value(a), wi)?;
            step_s = step_s.max(d.abs());
        }
    }
    let mut step_i: f64 = 0.0;
    for ws in [s.value(0), s.value(ns - 1)] {
        for (a, b) in [(0, 1), (ni - 2, ni - 1)] {
            let d = total_phase(asm, ws, i.value(b))? - total_phase(asm, ws, i.value(a))?;
            step_i = step_i.max(d.abs());
        }
    }
    Ok((step_s, step_i))
}

fn required_len(len: usize, step: f64) -> usize {
    if step < MAX_PHASE_STEP {
        len
    } else {
        floor((len - 1) as f64 * step / MAX_PHASE_STEP) as usize + 2
    }
}

/// Refuses grids that violate the phase-step rule, reporting the counts that
/// would satisfy it on the same ranges.
pub fn check_resolution(asm: &AssemblySpec, grid: &FrequencyGrid) -> Result<()> {
    let (step_s, step_i) = phase_steps(asm, grid)?;
    if step_s < MAX_PHASE_STEP && step_i < MAX_PHASE_STEP {
        return Ok(());
    }
    Err(Error::GridTooCoarse {
        required_ns: required_len(grid.signal.len, step_s),
        required_ni: required_len(grid.idler.len, step_i),
    })
}

/// Grid covering the assembly's phase-matched region and the pump envelope.
pub fn auto_grid(asm: &AssemblySpec, pump: &PumpSpec, opts: &GridOptions) -> Result<FrequencyGrid> {
    pump.validate()?;
    if !(opts.lobes > 0.0) || !(opts.pump_padding_sigmas >= 0.0) {
        return Err(invalid(
            "grid options",
            "lobes must be positive and padding non-negative",
        ));
    }
    let (rs, ri) = default_ranges(asm, pump, opts)?;
    let mut grid = FrequencyGrid::new(
        UniformAxis::new(rs.0, rs.1, opts.ns)?,
        UniformAxis::new(ri.0, ri.1, opts.ni)?,
    );
    if !opts.auto_refine {
        return Ok(grid);
    }
    for _ in 0..12 {
        let (step_s, step_i) = phase_steps(asm, &grid)?;
        if step_s < MAX_PHASE_STEP && step_i < MAX_PHASE_STEP {
            return Ok(grid);
        }
        let ns = required_len(grid.signal.len, step_s);
        let ni = required_len(grid.idler.len, step_i);
        if ns > opts.max_points || ni > opts.max_points {
            return Err(Error::GridTooCoarse {
                required_ns: ns,
                required_ni: ni,
            });
        }
        grid = FrequencyGrid::new(grid.signal.with_len(ns)?, grid.idler.with_len(ni)?);
    }
    check_resolution(asm, &grid)?;
    Ok(grid)
}

/// Number of samples needed so that the spacing over `span` is at most `step`.
pub(crate) fn count_for_step(span: f64, step: f64) -> usize {
    ceil(span / step) as usize + 1
}
