//! Step-index equivalent model of a photonic crystal fiber.
//!
//! A segment is reduced to a silica core of effective radius `r` inside a
//! homogeneous cladding whose index is mixed from silica and air with the
//! air-filling fraction `f`. The fundamental mode index `n_eff(λ)` comes from
//! the step-index eigenvalue equation; `k(ω) = n_eff ω / c` and its
//! derivatives follow by Richardson-extrapolated central differences.

use alloc::string::String;
use alloc::vec::Vec;

use crate::bessel::{j0_j1, k0_k1_scaled};
use crate::error::{invalid, Error, Result};
use crate::interp::LocalPolynomial;
use crate::material::{cladding_index, silica_refractive_index};
use crate::math::{sqrt, PI};
use crate::roots::{brent, linspace, sign_changes};
use crate::units::{nm_from_omega, omega_from_nm, PS2_PER_M, SPEED_OF_LIGHT};

/// First zero of `J0`; the fundamental-mode `U` never reaches it.
const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Relative finite-difference step in ω.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// How the cladding index is mixed from silica and air.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CladdingRule {
    /// `n_cl = (1 − f)·n_si + f`
    #[default]
    IndexAverage,
    /// `n_cl² = (1 − f)·n_si² + f`
    PermittivityAverage,
}

/// Eigenvalue equation used for the fundamental mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeModel {
    /// Exact HE11 hybrid-mode equation of the step-index fiber.
    #[default]
    VectorHe11,
    /// Weakly guiding LP01 approximation, `U J1(U)/J0(U) = W K1(W)/K0(W)`.
    ScalarLp01,
}

/// Effective structural parameters of a homogeneous piece of fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Structure {
    pub core_radius_nm: f64,
    pub air_fill: f64,
}

impl Structure {
    pub fn new(core_radius_nm: f64, air_fill: f64) -> Result<Self> {
        let s = Self {
            core_radius_nm,
            air_fill,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.core_radius_nm > 0.0 && self.core_radius_nm.is_finite()) {
            return Err(invalid("core_radius", "must be positive"));
        }
        if !(self.air_fill > 0.0 && self.air_fill < 1.0) {
            return Err(invalid("air_fill", "must lie strictly between 0 and 1"));
        }
        Ok(())
    }
}

/// One homogeneous piece of fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberSegment {
    pub label: String,
    pub core_radius_nm: f64,
    pub air_fill: f64,
    pub length_m: f64,
}

impl FiberSegment {
    pub fn new(label: impl Into<String>, core_radius_nm: f64, air_fill: f64, length_m: f64) -> Result<Self> {
        let seg = Self {
            label: label.into(),
            core_radius_nm,
            air_fill,
            length_m,
        };
        seg.validate()?;
        Ok(seg)
    }

    pub fn validate(&self) -> Result<()> {
        self.structure().validate()?;
        if !(self.length_m > 0.0 && self.length_m.is_finite()) {
            return Err(invalid("length", "must be positive"));
        }
        Ok(())
    }

    pub fn structure(&self) -> Structure {
        Structure {
            core_radius_nm: self.core_radius_nm,
            air_fill: self.air_fill,
        }
    }
}

/// A measured group-velocity-dispersion sample, `β₂ = d²k/dω²` in ps²/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GvdSample {
    pub wavelength_nm: f64,
    pub gvd_ps2_per_m: f64,
}

/// `k(ω)` and its first two derivatives, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDerivatives {
    /// rad/m
    pub k: f64,
    /// s/m
    pub k1: f64,
    /// s²/m
    pub k2: f64,
}

/// One row of a tabulated dispersion curve, interface units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionRow {
    pub wavelength_nm: f64,
    pub n_eff: f64,
    pub k_rad_per_m: f64,
    pub k1_ps_per_m: f64,
    pub beta2_ps2_per_m: f64,
}

/// Combination of mode equation and cladding mixing rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DispersionModel {
    pub mode: ModeModel,
    pub cladding: CladdingRule,
}

impl DispersionModel {
    pub fn new(mode: ModeModel, cladding: CladdingRule) -> Self {
        Self { mode, cladding }
    }

    /// Effective index of the fundamental mode.
    pub fn effective_index(&self, s: Structure, wavelength_nm: f64) -> Result<f64> {
        s.validate()?;
        let n_co = silica_refractive_index(wavelength_nm)?;
        let n_cl = cladding_index(wavelength_nm, s.air_fill, self.cladding)?;
        let k0a = 2.0 * PI / wavelength_nm * s.core_radius_nm;
        let v = k0a * sqrt(n_co * n_co - n_cl * n_cl);
        if !(v > 1e-3) {
            return Err(Error::ModeCutoff { wavelength_nm });
        }
        let u = self.solve_u(v, n_co, n_cl, k0a, wavelength_nm)?;
        let n_eff = sqrt(n_co * n_co - (u / k0a) * (u / k0a));
        debug_assert!(n_eff > n_cl && n_eff < n_co);
        Ok(n_eff)
    }

    fn solve_u(&self, v: f64, n_co: f64, n_cl: f64, k0a: f64, wavelength_nm: f64) -> Result<f64> {
        let top = v.min(J0_FIRST_ZERO);
        let lo = 1e-4 * top;
        let hi = top * (1.0 - 1e-12);
        let eps = (n_cl * n_cl) / (n_co * n_co);
        let residual = |u: f64| -> Result<f64> {
            let w = sqrt(v * v - u * u);
            let (j0, j1) = j0_j1(u);
            let (k0, k1) = k0_k1_scaled(w);
            Ok(match self.mode {
                ModeModel::ScalarLp01 => u * j1 / j0 - w * k1 / k0,
                ModeModel::VectorHe11 => {
                    // J1'(u)/(u J1) and K1'(w)/(w K1) via the recurrences
                    let jt = (j0 / j1 - 1.0 / u) / u;
                    let kt = (-k0 / k1 - 1.0 / w) / w;
                    let b = 1.0 - (u / (k0a * n_co)) * (u / (k0a * n_co));
                    let s = 1.0 / (u * u) + 1.0 / (w * w);
                    (jt + kt) * (jt + eps * kt) - b * s * s
                }
            })
        };
        let (f_lo, f_hi) = (residual(lo)?, residual(hi)?);
        if f_lo.signum() == f_hi.signum() {
            return Err(Error::ModeCutoff { wavelength_nm });
        }
        brent(residual, lo, hi, 0.0)
    }

    /// Propagation constant `k(ω)` in rad/m at a vacuum wavelength in nm.
    pub fn propagation_constant(&self, s: Structure, wavelength_nm: f64) -> Result<f64> {
        Ok(self.effective_index(s, wavelength_nm)? * 2.0 * PI / (wavelength_nm * 1e-9))
    }

    /// Propagation constant at an angular frequency (rad/s).
    pub fn k_at_omega(&self, s: Structure, omega: f64) -> Result<f64> {
        Ok(self.effective_index(s, nm_from_omega(omega))? * omega / SPEED_OF_LIGHT)
    }

    /// `k`, `dk/dω` and `d²k/dω²` at `omega` with step `h` (rad/s),
    /// Richardson-extrapolated once from `h` and `h/2`.
    pub fn derivatives_with_step(&self, s: Structure, omega: f64, h: f64) -> Result<ModeDerivatives> {
        let k = |w: f64| self.k_at_omega(s, w);
        let k0 = k(omega)?;
        let (kp, km) = (k(omega + h)?, k(omega - h)?);
        let (kp2, km2) = (k(omega + 0.5 * h)?, k(omega - 0.5 * h)?);
        let d1_h = (kp - km) / (2.0 * h);
        let d1_h2 = (kp2 - km2) / h;
        let d2_h = (kp - 2.0 * k0 + km) / (h * h);
        let d2_h2 = (kp2 - 2.0 * k0 + km2) / (0.25 * h * h);
        Ok(ModeDerivatives {
            k: k0,
            k1: (4.0 * d1_h2 - d1_h) / 3.0,
            k2: (4.0 * d2_h2 - d2_h) / 3.0,
        })
    }

    /// Derivatives with the default step `1e-4·ω`.
    pub fn derivatives(&self, s: Structure, omega: f64) -> Result<ModeDerivatives> {
        self.derivatives_with_step(s, omega, DERIVATIVE_STEP * omega)
    }

    /// Group slowness `dk/dω` (inverse group velocity) in s/m.
    pub fn group_slowness(&self, s: Structure, wavelength_nm: f64) -> Result<f64> {
        Ok(self.derivatives(s, omega_from_nm(wavelength_nm))?.k1)
    }

    /// Group-velocity dispersion `β₂ = d²k/dω²` in ps²/m.
    pub fn gvd(&self, s: Structure, wavelength_nm: f64) -> Result<f64> {
        Ok(self.derivatives(s, omega_from_nm(wavelength_nm))?.k2 / PS2_PER_M)
    }

    /// Zero-dispersion wavelengths (nm) inside `range_nm`, ascending. Roots are
    /// bracketed on a 1 nm grid and polished below 0.01 nm.
    pub fn find_zdw(&self, s: Structure, range_nm: (f64, f64)) -> Result<Vec<f64>> {
        let (lo, hi) = range_nm;
        if !(hi > lo) {
            return Err(invalid("search range", "upper bound must exceed lower bound"));
        }
        let (wlo, whi) = crate::material::SELLMEIER_WINDOW_NM;
        if lo < wlo || hi > whi {
            return Err(Error::Domain {
                quantity: "ZDW search range (nm)",
                value: if lo < wlo { lo } else { hi },
                min: wlo,
                max: whi,
            });
        }
        let n = crate::math::ceil(hi - lo) as usize + 1;
        let grid = linspace(lo, hi, n.max(2));
        let gvd = |l: f64| self.gvd(s, l);
        let mut roots = Vec::new();
        for (a, b) in sign_changes(gvd, &grid) {
            roots.push(brent(gvd, a, b, 1e-4)?);
        }
        Ok(roots)
    }

    /// Tabulates `n_eff`, `k`, `k′` and `β₂` at the given wavelengths.
    pub fn tabulate(&self, s: Structure, wavelengths_nm: &[f64]) -> Result<Vec<DispersionRow>> {
        wavelengths_nm
            .iter()
            .map(|&l| {
                let omega = omega_from_nm(l);
                let d = self.derivatives(s, omega)?;
                Ok(DispersionRow {
                    wavelength_nm: l,
                    n_eff: d.k * SPEED_OF_LIGHT / omega,
                    k_rad_per_m: d.k,
                    k1_ps_per_m: d.k1 / crate::units::PS_PER_M,
                    beta2_ps2_per_m: d.k2 / PS2_PER_M,
                })
            })
            .collect()
    }

    /// Samples `k(λ)` into a [`DispersionCurve`].
    pub fn curve(&self, segment: &FiberSegment, wavelengths_nm: &[f64]) -> Result<DispersionCurve> {
        let s = segment.structure();
        let k = wavelengths_nm
            .iter()
            .map(|&l| self.propagation_constant(s, l))
            .collect::<Result<Vec<_>>>()?;
        DispersionCurve::new(
            wavelengths_nm.to_vec(),
            k,
            Provenance::Model {
                label: segment.label.clone(),
            },
        )
    }
}

/// Where a [`DispersionCurve`] came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Model { label: String },
    Measured,
}

/// Tabulated propagation constant, interpolable in ω.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionCurve {
    wavelength_nm: Vec<f64>,
    k: Vec<f64>,
    provenance: Provenance,
    by_omega: LocalPolynomial,
}

impl DispersionCurve {
    pub fn new(wavelength_nm: Vec<f64>, k: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if wavelength_nm.len() != k.len() {
            return Err(invalid("dispersion curve", "wavelength and k lists differ in length"));
        }
        if wavelength_nm.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("dispersion curve", "wavelengths must be strictly ascending"));
        }
        if k.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(invalid("dispersion curve", "k samples must be positive"));
        }
        let omega: Vec<f64> = wavelength_nm.iter().rev().map(|&l| omega_from_nm(l)).collect();
        let k_rev: Vec<f64> = k.iter().rev().copied().collect();
        let by_omega = LocalPolynomial::new(omega, k_rev)?;
        Ok(Self {
            wavelength_nm,
            k,
            provenance,
            by_omega,
        })
    }

    pub fn wavelengths_nm(&self) -> &[f64] {
        &self.wavelength_nm
    }

    pub fn k_samples(&self) -> &[f64] {
        &self.k
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Interpolated `k` at an angular frequency; domain error outside the table.
    pub fn k_at_omega(&self, omega: f64) -> Result<f64> {
        self.by_omega.eval(omega)
    }

    pub fn omega_range(&self) -> (f64, f64) {
        self.by_omega.range()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> Structure {
        Structure::new(948.0, 0.296).unwrap()
    }

    #[test]
    fn guided_mode_bound() {
        let model = DispersionModel::default();
        for seg in [947.0, 947.5, 948.0, 948.5] {
            let s = Structure::new(seg, 0.296).unwrap();
            for l in [850.0, 1070.0, 1409.9, 1450.0] {
                let n = model.effective_index(s, l).unwrap();
                let n_si = silica_refractive_index(l).unwrap();
                let n_cl = cladding_index(l, 0.296, CladdingRule::IndexAverage).unwrap();
                assert!(n_cl < n && n < n_si, "{seg} {l}: {n_cl} < {n} < {n_si}");
            }
        }
    }

    #[test]
    fn scalar_model_is_bounded_too() {
        let model = DispersionModel::new(ModeModel::ScalarLp01, CladdingRule::PermittivityAverage);
        let n = model.effective_index(reference(), 1070.0).unwrap();
        let n_cl = cladding_index(1070.0, 0.296, CladdingRule::PermittivityAverage).unwrap();
        assert!(n > n_cl && n < silica_refractive_index(1070.0).unwrap());
    }

    #[test]
    fn vector_and_scalar_differ_at_high_contrast() {
        let s = reference();
        let v = DispersionModel::default().effective_index(s, 1070.0).unwrap();
        let sc = DispersionModel::new(ModeModel::ScalarLp01, CladdingRule::IndexAverage)
            .effective_index(s, 1070.0)
            .unwrap();
        assert!((v - sc).abs() > 1e-5);
    }

    #[test]
    fn k_increases_with_omega() {
        let model = DispersionModel::default();
        for r in [947.0, 947.5, 948.0, 948.5] {
            let s = Structure::new(r, 0.296).unwrap();
            let mut prev = f64::INFINITY;
            // descending wavelength = ascending ω
            for i in 0..=120 {
                let l = 1450.0 - 5.0 * i as f64;
                let k = model.propagation_constant(s, l).unwrap();
                assert!(k > 0.0);
                if prev.is_finite() {
                    assert!(k > prev);
                }
                prev = k;
            }
        }
    }

    #[test]
    fn group_slowness_matches_half_step_oracle() {
        let model = DispersionModel::default();
        let s = reference();
        for l in [900.0, 1070.0, 1300.0, 1409.9] {
            let w = omega_from_nm(l);
            let got = model.group_slowness(s, l).unwrap();
            // independent central difference at half the step, straight from k
            let h = 0.5e-4 * w;
            let oracle = (model.propagation_constant(s, nm_from_omega(w + h)).unwrap()
                - model.propagation_constant(s, nm_from_omega(w - h)).unwrap())
                / (2.0 * h);
            assert!((got / oracle - 1.0).abs() < 1e-6, "{l}: {got} vs {oracle}");
        }
    }

    #[test]
    fn gvd_matches_half_step_oracle() {
        let model = DispersionModel::default();
        let s = reference();
        for l in [880.0, 1070.0, 1300.0, 1409.9] {
            let w = omega_from_nm(l);
            let got = model.gvd(s, l).unwrap();
            let h = 0.5e-4 * w;
            let k = |x: f64| model.propagation_constant(s, nm_from_omega(x)).unwrap();
            let oracle = (k(w + h) - 2.0 * k(w) + k(w - h)) / (h * h) / PS2_PER_M;
            // second differences of k ~ 1e7 rad/m carry ~1e-6 ps²/m of rounding
            assert!(
                (got - oracle).abs() < 1e-4 * oracle.abs() + 5e-6,
                "{l}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn zero_dispersion_pair() {
        let model = DispersionModel::default();
        let z = model.find_zdw(reference(), (900.0, 1250.0)).unwrap();
        assert_eq!(z.len(), 2, "{z:?}");
        assert!((z[0] - 942.0).abs() < 10.0, "{z:?}");
        assert!((z[1] - 1175.0).abs() < 10.0, "{z:?}");
        for root in &z {
            // β₂ slope is ~1e-3 ps²/m per nm, root polished to 1e-4 nm
            assert!(model.gvd(reference(), *root).unwrap().abs() < 1e-6);
        }
        assert!(model.find_zdw(reference(), (1000.0, 1100.0)).unwrap().is_empty());
    }

    #[test]
    fn gvd_sign_pattern() {
        let model = DispersionModel::default();
        let mut changes = 0;
        let mut prev = model.gvd(reference(), 900.0).unwrap();
        for i in 1..=300 {
            let g = model.gvd(reference(), 900.0 + i as f64).unwrap();
            if g.signum() != prev.signum() {
                changes += 1;
            }
            prev = g;
        }
        assert_eq!(changes, 2);
    }

    #[test]
    fn zdw_radius_perturbation() {
        let model = DispersionModel::default();
        let a = model.find_zdw(reference(), (900.0, 1250.0)).unwrap();
        let b = model
            .find_zdw(Structure::new(948.9, 0.296).unwrap(), (900.0, 1250.0))
            .unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 5.0);
        }
    }

    #[test]
    fn smooth_on_fine_grid() {
        let model = DispersionModel::default();
        let s = reference();
        let ks: Vec<f64> = (0..200)
            .map(|i| model.propagation_constant(s, 1400.0 + 0.1 * i as f64).unwrap())
            .collect();
        // second differences stay tiny compared to first differences
        for w in ks.windows(3) {
            let d1 = (w[2] - w[0]).abs();
            let d2 = (w[2] - 2.0 * w[1] + w[0]).abs();
            assert!(d2 < 1e-3 * d1);
        }
    }

    #[test]
    fn curve_interpolates_model() {
        let model = DispersionModel::default();
        let seg = FiberSegment::new("S3", 948.0, 0.296, 0.3).unwrap();
        let grid: Vec<f64> = (0..=700).map(|i| 800.0 + i as f64).collect();
        let curve = model.curve(&seg, &grid).unwrap();
        for l in [853.37, 1070.0, 1212.21, 1417.05] {
            let direct = model.propagation_constant(seg.structure(), l).unwrap();
            let interp = curve.k_at_omega(omega_from_nm(l)).unwrap();
            assert!((direct - interp).abs() < 1e-6, "{l}: {}", direct - interp);
        }
        assert!(curve.k_at_omega(omega_from_nm(1600.0)).is_err());
    }

    #[test]
    fn rejects_invalid_segments() {
        assert!(FiberSegment::new("x", 948.0, 1.2, 0.3).is_err());
        assert!(FiberSegment::new("x", -1.0, 0.3, 0.3).is_err());
        assert!(FiberSegment::new("x", 948.0, 0.3, 0.0).is_err());
    }

    #[test]
    fn outside_material_window() {
        let model = DispersionModel::default();
        assert!(matches!(
            model.propagation_constant(reference(), 250.0),
            Err(Error::Domain { .. })
        ));
    }
}
