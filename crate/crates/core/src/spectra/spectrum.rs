use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{ceil, exp, floor, ln, sqrt, PI};
use crate::phasematch::PumpSpec;
use crate::units::{nm_from_omega, omega_from_nm, SPEED_OF_LIGHT};

use super::assembly::{phi_signal, AssemblySpec};
use super::grid::{auto_grid, count_for_step, GridOptions, UniformAxis};
use super::jsa::JsaGrid;

/// Abscissa of a [`Spectrum1D`].
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumAxis {
    /// rad/s
    AngularFrequency(Vec<f64>),
    /// nm
    Wavelength(Vec<f64>),
}

impl SpectrumAxis {
    pub fn values(&self) -> &[f64] {
        match self {
            SpectrumAxis::AngularFrequency(v) | SpectrumAxis::Wavelength(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    #[default]
    Raw,
    Peak,
}

/// Non-negative intensity over an ascending axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    axis: SpectrumAxis,
    values: Vec<f64>,
    normalization: Normalization,
}

impl Spectrum1D {
    pub fn new(axis: SpectrumAxis, values: Vec<f64>, normalization: Normalization) -> Result<Self> {
        let x = axis.values();
        if x.len() != values.len() || x.is_empty() {
            return Err(invalid(
                "spectrum",
                "axis and values must be non-empty and of equal length",
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("spectrum axis", "must be strictly ascending"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("spectrum values", "must be finite and non-negative"));
        }
        Ok(Self {
            axis,
            values,
            normalization,
        })
    }

    pub fn axis(&self) -> &SpectrumAxis {
        &self.axis
    }

    pub fn x(&self) -> &[f64] {
        self.axis.values()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Scaled so the maximum is 1; an all-zero spectrum stays zero.
    pub fn peak_normalized(&self) -> Self {
        let p = self.peak();
        let values = if p > 0.0 {
            self.values.iter().map(|v| v / p).collect()
        } else {
            self.values.clone()
        };
        Self {
            axis: self.axis.clone(),
            values,
            normalization: Normalization::Peak,
        }
    }

    /// Re-expressed over wavelength (ascending), keeping the per-sample
    /// intensities. No Jacobian is applied.
    pub fn to_wavelength(&self) -> Self {
        match &self.axis {
            SpectrumAxis::Wavelength(_) => self.clone(),
            SpectrumAxis::AngularFrequency(w) => Self {
                axis: SpectrumAxis::Wavelength(w.iter().rev().map(|&x| nm_from_omega(x)).collect()),
                values: self.values.iter().rev().copied().collect(),
                normalization: self.normalization,
            },
        }
    }

    /// Indices of interior local maxima that reach `fraction` of the peak.
    pub fn local_maxima(&self, fraction: f64) -> Vec<usize> {
        let v = &self.values;
        let thr = fraction * self.peak();
        (1..v.len().saturating_sub(1))
            .filter(|&j| v[j] >= thr && v[j] > v[j - 1] && v[j] >= v[j + 1])
            .collect()
    }

    /// Trapezoid integral over the axis units.
    pub fn integral(&self) -> f64 {
        let x = self.x();
        x.windows(2)
            .zip(self.values.windows(2))
            .map(|(xw, vw)| 0.5 * (xw[1] - xw[0]) * (vw[0] + vw[1]))
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    Signal,
    Idler,
}

/// Projection of `|f|²` onto one axis, trapezoid rule over the other.
pub fn marginal(jsa: &JsaGrid, axis: MarginalAxis) -> Spectrum1D {
    let g = jsa.grid();
    let (ns, ni) = (jsa.ns(), jsa.ni());
    let (x, values) = match axis {
        MarginalAxis::Signal => {
            let v = (0..ns)
                .map(|s| (0..ni).map(|i| g.idler.weight(i) * jsa.intensity(s, i)).sum())
                .collect();
            (g.signal.values(), v)
        }
        MarginalAxis::Idler => {
            let mut v = alloc::vec![0.0; ni];
            for s in 0..ns {
                let w = g.signal.weight(s);
                for (i, acc) in v.iter_mut().enumerate() {
                    *acc += w * jsa.intensity(s, i);
                }
            }
            (g.idler.values(), v)
        }
    };
    Spectrum1D {
        axis: SpectrumAxis::AngularFrequency(x),
        values,
        normalization: Normalization::Raw,
    }
}

/// Gaussian band-pass filter with transmission `exp[−(ω − ω′)²/σ_s²]`.
///
/// Unlike the pump, whose exponent carries `4σ_p²`, the filter uses `σ_s²`,
/// so `σ_s = (πc·fwhm/λ²)/√ln2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub center_nm: f64,
    pub fwhm_nm: f64,
}

impl FilterSpec {
    pub fn new(center_nm: f64, fwhm_nm: f64) -> Result<Self> {
        if !(center_nm > 0.0 && center_nm.is_finite()) {
            return Err(invalid("filter center", "must be positive"));
        }
        if !(fwhm_nm > 0.0 && fwhm_nm.is_finite()) {
            return Err(invalid("filter fwhm", "must be positive"));
        }
        Ok(Self { center_nm, fwhm_nm })
    }

    pub fn center_omega(&self) -> f64 {
        omega_from_nm(self.center_nm)
    }

    /// rad/s
    pub fn sigma(&self) -> f64 {
        let l = self.center_nm * 1e-9;
        PI * SPEED_OF_LIGHT * self.fwhm_nm * 1e-9 / (l * l * sqrt(ln(2.0)))
    }

    #[inline]
    pub fn transmission(&self, omega: f64) -> f64 {
        let d = (omega - self.center_omega()) / self.sigma();
        exp(-d * d)
    }
}

/// Filtered counting rate against filter centre.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterScan {
    /// Over the centre wavelengths, nm.
    pub spectrum: Spectrum1D,
    /// Centres outside the spectral support; their value is zero.
    pub out_of_support: Vec<usize>,
}

fn check_centres(centres_nm: &[f64], fwhm_nm: f64) -> Result<Vec<FilterSpec>> {
    if centres_nm.is_empty() {
        return Err(invalid("filter centres", "list is empty"));
    }
    if centres_nm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("filter centres", "must be strictly ascending"));
    }
    centres_nm.iter().map(|&c| FilterSpec::new(c, fwhm_nm)).collect()
}

fn prefactor(pump: &PumpSpec) -> f64 {
    match pump.gain_constant() {
        Some(g) => g * g / pump.sigma_p(),
        None => 1.0,
    }
}

/// Trapezoid sum of `density·transmission` over `axis`, restricted to where
/// the filter is above `e^{-64}`.
fn convolve(axis: &UniformAxis, density: &[f64], filter: &FilterSpec) -> f64 {
    let w0 = filter.center_omega();
    let reach = 8.0 * filter.sigma();
    let lo = floor((w0 - reach - axis.start) / axis.step).max(0.0) as usize;
    let hi = (ceil((w0 + reach - axis.start) / axis.step).max(0.0) as usize).min(axis.len - 1);
    (lo..=hi)
        .map(|j| axis.weight(j) * density[j] * filter.transmission(axis.value(j)))
        .sum()
}

fn scan(
    axis: &UniformAxis,
    density: &[f64],
    filters: &[FilterSpec],
    scale: f64,
    centres_nm: &[f64],
) -> Result<FilterScan> {
    let mut out_of_support = Vec::new();
    let values = filters
        .iter()
        .enumerate()
        .map(|(k, f)| {
            if axis.contains(f.center_omega()) {
                scale * convolve(axis, density, f)
            } else {
                out_of_support.push(k);
                0.0
            }
        })
        .collect();
    Ok(FilterScan {
        spectrum: Spectrum1D::new(
            SpectrumAxis::Wavelength(centres_nm.to_vec()),
            values,
            Normalization::Raw,
        )?,
        out_of_support,
    })
}

/// `(|G|²/σ_p)·∫|φ(ω_s)|² exp[−(ω_s − ω′)²/σ_s²] dω_s` for each centre `ω′`,
/// with `φ` the signal-only phase-matching function of the assembly.
///
/// The support is the signal range of the assembly's automatic grid; the
/// quadrature spacing is the finer of that grid's and a quarter of `σ_s`.
pub fn filter_scan_assembly(
    asm: &AssemblySpec,
    pump: &PumpSpec,
    fwhm_nm: f64,
    centres_nm: &[f64],
    opts: &GridOptions,
) -> Result<FilterScan> {
    let filters = check_centres(centres_nm, fwhm_nm)?;
    let support = auto_grid(asm, pump, opts)?.signal;
    let sigma_min = filters.iter().map(FilterSpec::sigma).fold(f64::INFINITY, f64::min);
    let span = support.end() - support.start;
    let n = count_for_step(span, 0.25 * sigma_min).max(support.len);
    if n > 1 << 22 {
        return Err(invalid("filter fwhm", "too narrow for the spectral support"));
    }
    let axis = UniformAxis::new(support.start, support.end(), n)?;
    let density = (0..n)
        .map(|j| Ok(phi_signal(asm, axis.value(j))?.norm_sqr()))
        .collect::<Result<Vec<_>>>()?;
    scan(&axis, &density, &filters, prefactor(pump), centres_nm)
}

/// Same scan driven by the signal marginal of a built JSA. The marginal
/// already integrates the pump, so the result carries an extra `√(2π)σ_p`
/// relative to [`filter_scan_assembly`] when `τ_i = 0`.
pub fn filter_scan_jsa(jsa: &JsaGrid, fwhm_nm: f64, centres_nm: &[f64]) -> Result<FilterScan> {
    let filters = check_centres(centres_nm, fwhm_nm)?;
    let m = marginal(jsa, MarginalAxis::Signal);
    scan(
        &jsa.grid().signal,
        m.values(),
        &filters,
        prefactor(jsa.pump()),
        centres_nm,
    )
}
