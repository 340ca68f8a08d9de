//! Energy and momentum conservation for degenerate-pump four-wave mixing:
//! `2ω_p = ω_s + ω_i` and `2k(ω_p) − k(ω_s) − k(ω_i) = 0` (the nonlinear
//! phase `2γP_p` is dropped). Solutions are linearised into a
//! [`PhaseMatchPoint`].

use alloc::vec::Vec;

use crate::dispersion::{DispersionModel, Structure};
use crate::error::{invalid, Error, Result};
use crate::math::{atan, ln, sqrt, tan, PI};
use crate::roots::{brent, linspace, sign_changes};
use crate::units::{nm_from_omega, omega_from_nm, PS_PER_M, SPEED_OF_LIGHT};

/// Signal wavelengths are searched from this far above the pump (nm), which
/// keeps the trivially degenerate root out of the brackets.
const MIN_DETUNING_NM: f64 = 2.0;
/// Upper end of the signal search (nm), below the material window with room
/// for the derivative stencil.
const MAX_SIGNAL_NM: f64 = 1990.0;
/// Local searches look this far either side of a hint (nm).
const HINT_WINDOW_NM: f64 = 25.0;

/// Nonlinear gain constants; `G ∝ γ P_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    /// Nonlinear coefficient, 1/(W·km).
    pub gamma_per_w_km: f64,
    /// Peak pump power, W.
    pub peak_power_w: f64,
}

/// Transform-limited Gaussian pump pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub center_wavelength_nm: f64,
    /// Intensity FWHM of the pump spectrum, nm.
    pub fwhm_nm: f64,
    pub gain: Option<Gain>,
}

impl PumpSpec {
    pub fn new(center_wavelength_nm: f64, fwhm_nm: f64) -> Result<Self> {
        let p = Self {
            center_wavelength_nm,
            fwhm_nm,
            gain: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_gain(mut self, gain: Gain) -> Self {
        self.gain = Some(gain);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.center_wavelength_nm > 0.0 && self.center_wavelength_nm.is_finite()) {
            return Err(invalid("pump center wavelength", "must be positive"));
        }
        if !(self.fwhm_nm > 0.0 && self.fwhm_nm.is_finite()) {
            return Err(invalid("pump fwhm", "must be positive"));
        }
        if let Some(g) = self.gain {
            if !(g.gamma_per_w_km >= 0.0 && g.peak_power_w >= 0.0) {
                return Err(invalid("pump gain", "gamma and peak power must be non-negative"));
            }
        }
        Ok(())
    }

    /// Central angular frequency `ω_pc`, rad/s.
    pub fn center_omega(&self) -> f64 {
        omega_from_nm(self.center_wavelength_nm)
    }

    /// Bandwidth `σ_p` (rad/s) of the amplitude `exp[−(ω−ω_pc)²/(2σ_p²)]`.
    /// The intensity FWHM in ω is `2σ_p√ln2`.
    pub fn sigma_p(&self) -> f64 {
        let l = self.center_wavelength_nm * 1e-9;
        PI * SPEED_OF_LIGHT * self.fwhm_nm * 1e-9 / (l * l * sqrt(ln(2.0)))
    }

    /// `G = γ P_p` in 1/m, when gain constants are given.
    pub fn gain_constant(&self) -> Option<f64> {
        self.gain.map(|g| g.gamma_per_w_km * 1e-3 * g.peak_power_w)
    }
}

/// Linearisation of the phase mismatch of one segment around its perfectly
/// phase-matched pair. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchPoint {
    /// Pump centre, rad/s.
    pub omega_pc: f64,
    pub omega_s0: f64,
    /// Always `2ω_pc − ω_s0`.
    pub omega_i0: f64,
    /// `k′_pc − k′_s0`, s/m.
    pub tau_s: f64,
    /// `k′_pc − k′_i0`, s/m.
    pub tau_i: f64,
}

impl PhaseMatchPoint {
    pub fn new(omega_pc: f64, omega_s0: f64, tau_s: f64, tau_i: f64) -> Self {
        Self {
            omega_pc,
            omega_s0,
            omega_i0: 2.0 * omega_pc - omega_s0,
            tau_s,
            tau_i,
        }
    }

    /// Builds a point from tabulated values: signal wavelength, `τ_s` and the
    /// angle `θ = |arctan(τ_i/τ_s)|`. The sign of `τ_i` is not recoverable
    /// from `θ` and is supplied separately.
    pub fn from_tabulated(
        pump_center_nm: f64,
        lambda_s0_nm: f64,
        tau_s_ps_per_m: f64,
        theta_rad: f64,
        tau_i_sign: f64,
    ) -> Result<Self> {
        if !(lambda_s0_nm > 0.0 && pump_center_nm > 0.0) {
            return Err(invalid("wavelength", "must be positive"));
        }
        if !(0.0..=PI / 2.0).contains(&theta_rad) {
            return Err(invalid("theta", "must lie in [0, π/2]"));
        }
        if tau_i_sign != 1.0 && tau_i_sign != -1.0 {
            return Err(invalid("tau_i_sign", "must be +1 or -1"));
        }
        let tau_s = tau_s_ps_per_m * PS_PER_M;
        let tau_i = tau_i_sign * tau_s.abs() * tan(theta_rad);
        Ok(Self::new(
            omega_from_nm(pump_center_nm),
            omega_from_nm(lambda_s0_nm),
            tau_s,
            tau_i,
        ))
    }

    pub fn lambda_pc_nm(&self) -> f64 {
        nm_from_omega(self.omega_pc)
    }

    pub fn lambda_s0_nm(&self) -> f64 {
        nm_from_omega(self.omega_s0)
    }

    pub fn lambda_i0_nm(&self) -> f64 {
        nm_from_omega(self.omega_i0)
    }

    pub fn tau_s_ps_per_m(&self) -> f64 {
        self.tau_s / PS_PER_M
    }

    pub fn tau_i_ps_per_m(&self) -> f64 {
        self.tau_i / PS_PER_M
    }

    /// Acute angle `|arctan(τ_i/τ_s)|` between the idler axis and the
    /// phase-matching contour.
    pub fn theta(&self) -> f64 {
        if self.tau_s == 0.0 {
            return if self.tau_i == 0.0 { 0.0 } else { PI / 2.0 };
        }
        atan(self.tau_i / self.tau_s).abs()
    }

    /// Relative residual of `2/λ_pc = 1/λ_s0 + 1/λ_i0`.
    pub fn energy_residual(&self) -> f64 {
        let (p, s, i) = (self.lambda_pc_nm(), self.lambda_s0_nm(), self.lambda_i0_nm());
        ((2.0 / p - 1.0 / s - 1.0 / i) * p / 2.0).abs()
    }

    /// Same point with `τ_i` negated.
    pub fn with_flipped_tau_i(mut self) -> Self {
        self.tau_i = -self.tau_i;
        self
    }
}

/// Result of [`solve_phase_match`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatchSolution {
    pub point: PhaseMatchPoint,
    /// More than one nondegenerate root was found on the red side; the one
    /// nearest the pump was kept.
    pub ambiguous: bool,
    /// `|2k(ω_pc) − k(ω_s0) − k(ω_i0)|` at the returned root, rad/m.
    pub momentum_residual: f64,
}

fn mismatch(model: &DispersionModel, s: Structure, omega_p: f64, k_p: f64, lambda_s: f64) -> Result<f64> {
    let ws = omega_from_nm(lambda_s);
    Ok(2.0 * k_p - model.k_at_omega(s, ws)? - model.k_at_omega(s, 2.0 * omega_p - ws)?)
}

fn solve_in(
    model: &DispersionModel,
    s: Structure,
    pump: &PumpSpec,
    lo_nm: f64,
    hi_nm: f64,
) -> Result<Option<PhaseMatchSolution>> {
    let omega_p = pump.center_omega();
    let k_p = model.k_at_omega(s, omega_p)?;
    let n = crate::math::ceil(hi_nm - lo_nm) as usize + 1;
    let grid = linspace(lo_nm, hi_nm, n.max(2));
    let f = |l: f64| mismatch(model, s, omega_p, k_p, l);
    let brackets = sign_changes(f, &grid);
    let Some(&(a, b)) = brackets.first() else {
        return Ok(None);
    };
    let lambda_s0 = brent(f, a, b, 1e-9)?;
    let omega_s0 = omega_from_nm(lambda_s0);
    let omega_i0 = 2.0 * omega_p - omega_s0;
    let k1_p = model.derivatives(s, omega_p)?.k1;
    let k1_s = model.derivatives(s, omega_s0)?.k1;
    let k1_i = model.derivatives(s, omega_i0)?.k1;
    let point = PhaseMatchPoint::new(omega_p, omega_s0, k1_p - k1_s, k1_p - k1_i);
    let residual = (2.0 * k_p - model.k_at_omega(s, omega_s0)? - model.k_at_omega(s, omega_i0)?).abs();
    Ok(Some(PhaseMatchSolution {
        point,
        ambiguous: brackets.len() > 1,
        momentum_residual: residual,
    }))
}

/// Nondegenerate phase-matched pair with the signal on the long-wavelength
/// side of the pump. Brackets on a 1 nm grid of signal wavelengths, then
/// polishes with Brent.
pub fn solve_phase_match(model: &DispersionModel, s: Structure, pump: &PumpSpec) -> Result<PhaseMatchSolution> {
    pump.validate()?;
    let lo = pump.center_wavelength_nm + MIN_DETUNING_NM;
    if lo >= MAX_SIGNAL_NM {
        return Err(Error::NoPhaseMatch {
            pump_nm: pump.center_wavelength_nm,
        });
    }
    solve_in(model, s, pump, lo, MAX_SIGNAL_NM)?.ok_or(Error::NoPhaseMatch {
        pump_nm: pump.center_wavelength_nm,
    })
}

/// Like [`solve_phase_match`] but searches only near `hint_nm` first, falling
/// back to the full search. Used by pump sweeps, where consecutive solutions
/// are close.
pub fn solve_phase_match_near(
    model: &DispersionModel,
    s: Structure,
    pump: &PumpSpec,
    hint_nm: f64,
) -> Result<PhaseMatchSolution> {
    pump.validate()?;
    let lo = (hint_nm - HINT_WINDOW_NM).max(pump.center_wavelength_nm + MIN_DETUNING_NM);
    let hi = (hint_nm + HINT_WINDOW_NM).min(MAX_SIGNAL_NM);
    if hi > lo {
        if let Some(sol) = solve_in(model, s, pump, lo, hi)? {
            return Ok(sol);
        }
    }
    solve_phase_match(model, s, pump)
}

/// One row of a pump-wavelength sweep; `point` is `None` where no
/// nondegenerate root exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvmPoint {
    pub pump_nm: f64,
    pub point: Option<PhaseMatchPoint>,
}

/// Sweeps the pump centre over `pump_range_nm` with `n_points` samples.
/// Per-point failures of any kind are recorded as absent.
pub fn gvm_curve(
    model: &DispersionModel,
    s: Structure,
    pump_fwhm_nm: f64,
    pump_range_nm: (f64, f64),
    n_points: usize,
) -> Result<Vec<GvmPoint>> {
    if n_points < 2 || !(pump_range_nm.1 > pump_range_nm.0) {
        return Err(invalid(
            "pump sweep",
            "need an increasing range and at least two points",
        ));
    }
    let mut hint: Option<f64> = None;
    let mut out = Vec::with_capacity(n_points);
    for lp in linspace(pump_range_nm.0, pump_range_nm.1, n_points) {
        let pump = PumpSpec::new(lp, pump_fwhm_nm)?;
        let sol = match hint {
            Some(h) => solve_phase_match_near(model, s, &pump, h),
            None => solve_phase_match(model, s, &pump),
        };
        let point = sol.ok().map(|s| s.point);
        hint = point.map(|p| p.lambda_s0_nm());
        out.push(GvmPoint { pump_nm: lp, point });
    }
    Ok(out)
}

/// Pump wavelengths at which `τ_i` and `τ_s` vanish (asymmetric group
/// velocity matching).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AgvmRoots {
    /// `τ_i = 0`, i.e. `θ = 0`.
    pub pump_for_tau_i_zero: Option<f64>,
    /// `τ_s = 0`, i.e. `θ = π/2`.
    pub pump_for_tau_s_zero: Option<f64>,
}

/// Locates the first sign change of `τ_i` and of `τ_s` over the pump range
/// (1 nm sweep) and polishes each with Brent to 1e-3 nm.
pub fn agvm_roots(model: &DispersionModel, s: Structure, pump_range_nm: (f64, f64)) -> Result<AgvmRoots> {
    const FWHM: f64 = 1.0;
    let n = crate::math::ceil(pump_range_nm.1 - pump_range_nm.0) as usize + 1;
    let sweep = gvm_curve(model, s, FWHM, pump_range_nm, n.max(2))?;

    let polish = |a: &GvmPoint, b: &GvmPoint, pick: fn(&PhaseMatchPoint) -> f64| -> Option<f64> {
        let (pa, pb) = (a.point?, b.point?);
        let hint_at = |lp: f64| {
            let t = (lp - a.pump_nm) / (b.pump_nm - a.pump_nm);
            pa.lambda_s0_nm() + t * (pb.lambda_s0_nm() - pa.lambda_s0_nm())
        };
        let f = |lp: f64| -> Result<f64> {
            let pump = PumpSpec::new(lp, FWHM)?;
            Ok(pick(&solve_phase_match_near(model, s, &pump, hint_at(lp))?.point))
        };
        brent(f, a.pump_nm, b.pump_nm, 1e-3).ok()
    };

    let mut roots = AgvmRoots::default();
    for w in sweep.windows(2) {
        let (Some(pa), Some(pb)) = (w[0].point, w[1].point) else {
            continue;
        };
        if roots.pump_for_tau_i_zero.is_none() && (pa.tau_i < 0.0) != (pb.tau_i < 0.0) {
            roots.pump_for_tau_i_zero = polish(&w[0], &w[1], |p| p.tau_i);
        }
        if roots.pump_for_tau_s_zero.is_none() && (pa.tau_s < 0.0) != (pb.tau_s < 0.0) {
            roots.pump_for_tau_s_zero = polish(&w[0], &w[1], |p| p.tau_s);
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_from_fwhm() {
        let p = PumpSpec::new(1070.0, 2.0).unwrap();
        // intensity |exp(−x²/2σ²)|² has FWHM 2σ√ln2
        let dw = crate::units::omega_width_from_nm(1070.0, 2.0);
        assert!((2.0 * p.sigma_p() * ln(2.0).sqrt() / dw - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gain_constant_units() {
        let p = PumpSpec::new(1070.0, 2.0).unwrap().with_gain(Gain {
            gamma_per_w_km: 37.0,
            peak_power_w: 10.0,
        });
        assert!((p.gain_constant().unwrap() - 0.37).abs() < 1e-15);
        assert!(PumpSpec::new(1070.0, 2.0).unwrap().gain_constant().is_none());
    }

    #[test]
    fn energy_conservation_from_table() {
        let p = PhaseMatchPoint::from_tabulated(1070.0, 1413.6, 3.2, 0.002, 1.0).unwrap();
        let expected = 1.0 / (2.0 / 1070.0 - 1.0 / 1413.6);
        assert!((p.lambda_i0_nm() - expected).abs() < 1e-9);
        assert!((p.lambda_i0_nm() - 860.8).abs() < 0.05);
        assert!(p.energy_residual() < 1e-12);
        assert!((p.theta() - 0.002).abs() < 1e-15);
    }

    #[test]
    fn theta_scale_invariance() {
        let p = PhaseMatchPoint::new(1.76e15, 1.33e15, 3.2e-12, 0.5e-12);
        for scale in [1e-3, 0.5, 7.0, 1e4] {
            let q = PhaseMatchPoint::new(p.omega_pc, p.omega_s0, p.tau_s * scale, p.tau_i * scale);
            assert!((q.theta() - p.theta()).abs() < 1e-15);
        }
        assert_eq!(PhaseMatchPoint::new(1.0, 1.0, 0.0, 1.0).theta(), PI / 2.0);
    }

    #[test]
    fn rejects_bad_tabulated_input() {
        assert!(PhaseMatchPoint::from_tabulated(1070.0, 1413.6, 3.2, 2.0, 1.0).is_err());
        assert!(PhaseMatchPoint::from_tabulated(1070.0, 1413.6, 3.2, 0.01, 0.5).is_err());
    }

    #[test]
    fn no_root_far_in_the_normal_regime() {
        // Pumping deep in normal dispersion leaves no nondegenerate root.
        let s = Structure::new(948.0, 0.296).unwrap();
        let pump = PumpSpec::new(800.0, 1.0).unwrap();
        let res = solve_phase_match(&DispersionModel::default(), s, &pump);
        assert!(matches!(res, Err(Error::NoPhaseMatch { .. })), "{res:?}");
    }
}
