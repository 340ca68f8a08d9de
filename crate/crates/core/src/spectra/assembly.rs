use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dispersion::DispersionCurve;
use crate::error::{invalid, Result};
use crate::math::{sin, sin_cos};
use crate::phasematch::PhaseMatchPoint;

/// How `Δk` is evaluated inside a segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelMode {
    /// `Δk = τ_s(ω_s − ω_s0) + τ_i(ω_i − ω_i0)`.
    #[default]
    Linearized,
    /// `Δk = 2k(ω_p) − k(ω_s) − k(ω_i)` with `ω_p = (ω_s + ω_i)/2`, from the
    /// segment's tabulated dispersion curve.
    Full,
}

/// One homogeneous piece of a spliced fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySegment {
    pub label: String,
    pub length_m: f64,
    pub point: PhaseMatchPoint,
    /// Needed in [`ModelMode::Full`] only.
    pub curve: Option<DispersionCurve>,
}

impl AssemblySegment {
    pub fn linearized(label: impl Into<String>, length_m: f64, point: PhaseMatchPoint) -> Self {
        Self {
            label: label.into(),
            length_m,
            point,
            curve: None,
        }
    }

    pub fn with_curve(mut self, curve: DispersionCurve) -> Self {
        self.curve = Some(curve);
        self
    }
}

/// Segments in physical splice order (pump enters the first one).
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblySpec {
    pub label: String,
    segments: Vec<AssemblySegment>,
    mode: ModelMode,
}

impl AssemblySpec {
    pub fn new(label: impl Into<String>, segments: Vec<AssemblySegment>, mode: ModelMode) -> Result<Self> {
        if segments.is_empty() {
            return Err(invalid("assembly", "needs at least one segment"));
        }
        for seg in &segments {
            if !(seg.length_m > 0.0 && seg.length_m.is_finite()) {
                return Err(invalid("segment length", "must be positive"));
            }
        }
        let omega_pc = segments[0].point.omega_pc;
        match mode {
            ModelMode::Linearized => {
                if segments
                    .iter()
                    .any(|s| ((s.point.omega_pc - omega_pc) / omega_pc).abs() > 1e-12)
                {
                    return Err(invalid("assembly", "linearised segments must share one pump"));
                }
            }
            ModelMode::Full => {
                if segments.iter().any(|s| s.curve.is_none()) {
                    return Err(invalid("assembly", "full mode needs a dispersion curve per segment"));
                }
            }
        }
        Ok(Self {
            label: label.into(),
            segments,
            mode,
        })
    }

    pub fn segments(&self) -> &[AssemblySegment] {
        &self.segments
    }

    pub fn mode(&self) -> ModelMode {
        self.mode
    }

    pub fn total_length_m(&self) -> f64 {
        self.segments.iter().map(|s| s.length_m).sum()
    }

    /// Pump centre the linearisations were taken at.
    pub fn omega_pc(&self) -> f64 {
        self.segments[0].point.omega_pc
    }
}

/// Wave-vector mismatch of one segment, rad/m.
pub fn delta_k(seg: &AssemblySegment, mode: ModelMode, omega_s: f64, omega_i: f64) -> Result<f64> {
    match (mode, &seg.curve) {
        (ModelMode::Full, Some(curve)) => {
            let omega_p = 0.5 * (omega_s + omega_i);
            Ok(2.0 * curve.k_at_omega(omega_p)? - curve.k_at_omega(omega_s)? - curve.k_at_omega(omega_i)?)
        }
        (ModelMode::Full, None) => Err(invalid("segment", "full mode needs a dispersion curve")),
        (ModelMode::Linearized, _) => {
            let p = &seg.point;
            Ok(p.tau_s * (omega_s - p.omega_s0) + p.tau_i * (omega_i - p.omega_i0))
        }
    }
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        sin(x) / x
    }
}

/// `L sinc(ΔkL/2) exp(iΔkL/2)`, the integral of `exp(iΔk z)` over `[0, L]`.
pub fn phi_homogeneous(length_m: f64, dk: f64) -> Complex64 {
    let x = 0.5 * dk * length_m;
    let (s, c) = sin_cos(x);
    Complex64::new(c, s) * (length_m * sinc(x))
}

fn coherent_sum<I>(terms: I) -> Complex64
where
    I: Iterator<Item = (f64, f64)>,
{
    let mut acc_phase = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for (length, dk) in terms {
        let x = 0.5 * dk * length;
        let (s, c) = sin_cos(x + acc_phase);
        sum += Complex64::new(c, s) * (length * sinc(x));
        acc_phase += dk * length;
    }
    sum
}

/// Phase-matching function of the whole assembly at `(ω_s, ω_i)`.
pub fn phi_assembly(asm: &AssemblySpec, omega_s: f64, omega_i: f64) -> Result<Complex64> {
    let dks = asm
        .segments()
        .iter()
        .map(|seg| Ok((seg.length_m, delta_k(seg, asm.mode(), omega_s, omega_i)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(coherent_sum(dks.into_iter()))
}

/// Phase-matching function as a function of the signal frequency alone, with
/// the idler argument pinned at each segment's phase-matched idler frequency.
/// Under `τ_i ≈ 0` this is the quantity the signal spectrum measures.
pub fn phi_signal(asm: &AssemblySpec, omega_s: f64) -> Result<Complex64> {
    let dks = asm
        .segments()
        .iter()
        .map(|seg| Ok((seg.length_m, delta_k(seg, asm.mode(), omega_s, seg.point.omega_i0)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(coherent_sum(dks.into_iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::PI;
    use crate::units::PS_PER_M;
    use alloc::vec;

    fn point(tau_s_ps: f64, tau_i_ps: f64) -> PhaseMatchPoint {
        PhaseMatchPoint::new(1.76e15, 1.336e15, tau_s_ps * PS_PER_M, tau_i_ps * PS_PER_M)
    }

    #[test]
    fn phi_at_zero_mismatch_is_length() {
        let phi = phi_homogeneous(0.3, 0.0);
        assert_eq!(phi, Complex64::new(0.3, 0.0));
    }

    #[test]
    fn phi_first_null() {
        let l = 0.7;
        let phi = phi_homogeneous(l, 2.0 * PI / l);
        assert!(phi.norm() < 1e-15);
    }

    #[test]
    fn delta_k_anchor_and_agvm() {
        let seg = AssemblySegment::linearized("a", 0.3, point(3.2, 0.0));
        let p = seg.point;
        assert_eq!(
            delta_k(&seg, ModelMode::Linearized, p.omega_s0, p.omega_i0).unwrap(),
            0.0
        );
        let a = delta_k(&seg, ModelMode::Linearized, p.omega_s0 + 1e12, p.omega_i0).unwrap();
        let b = delta_k(&seg, ModelMode::Linearized, p.omega_s0 + 1e12, p.omega_i0 - 3e12).unwrap();
        assert_eq!(a, b);
        // 3.2 ps/m times 1 rad/ps
        assert!((a - 3.2).abs() < 1e-12);
    }

    #[test]
    fn assembly_validation() {
        assert!(AssemblySpec::new("e", vec![], ModelMode::Linearized).is_err());
        let bad = AssemblySegment::linearized("a", -0.1, point(3.2, 0.0));
        assert!(AssemblySpec::new("b", vec![bad], ModelMode::Linearized).is_err());
        let ok = AssemblySegment::linearized("a", 0.3, point(3.2, 0.0));
        assert!(AssemblySpec::new("f", vec![ok.clone()], ModelMode::Full).is_err());
        let mut other = ok.clone();
        other.point.omega_pc *= 1.001;
        assert!(AssemblySpec::new("m", vec![ok, other], ModelMode::Linearized).is_err());
    }
}
