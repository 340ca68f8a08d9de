//! Run configuration. One JSON file per run; unknown keys are rejected and
//! every field is range-checked before any computation starts.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sfwm_core::dispersion::{CladdingRule, DispersionModel, ModeModel};
use sfwm_core::units::{nm_from_omega, omega_from_nm};
use sfwm_core::{GridOptions, ModelMode};

use crate::error::{RunError, Stage};
use crate::Command;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub pump: PumpConfig,
    #[serde(default)]
    pub segments: Vec<SegmentConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub model: ModelKind,
    #[serde(default)]
    pub dispersion_model: DispersionModelConfig,
    pub filter: Option<FilterConfig>,
    pub planner: Option<PlannerConfig>,
    pub configurations: Option<Vec<ConfigurationEntry>>,
    pub g2_table: Option<G2TableConfig>,
    pub dispersion: Option<DispersionConfig>,
    pub sweep: Option<SweepConfig>,
    pub fit: Option<FitConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub center_wavelength_nm: f64,
    pub fwhm_nm: f64,
    pub gamma_per_w_km: Option<f64>,
    pub peak_power_w: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentConfig {
    pub label: String,
    pub core_radius_nm: f64,
    pub air_fill: f64,
    pub length_m: f64,
    /// Tabulated phase-matching values used instead of solving from the
    /// structure.
    pub phase_match: Option<PhaseMatchOverride>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseMatchOverride {
    pub lambda_s0_nm: f64,
    pub lambda_i0_nm: f64,
    pub tau_s_ps_per_m: f64,
    pub theta_rad: f64,
    #[serde(default = "plus_one")]
    pub tau_i_sign: f64,
}

fn plus_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_points")]
    pub ns: usize,
    #[serde(default = "default_points")]
    pub ni: usize,
    pub signal_range_nm: Option<[f64; 2]>,
    pub idler_range_nm: Option<[f64; 2]>,
    pub lobes: Option<f64>,
    #[serde(default = "yes")]
    pub auto_refine: bool,
}

fn default_points() -> usize {
    512
}

fn yes() -> bool {
    true
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            ns: default_points(),
            ni: default_points(),
            signal_range_nm: None,
            idler_range_nm: None,
            lobes: None,
            auto_refine: true,
        }
    }
}

impl GridConfig {
    pub fn options(&self) -> GridOptions {
        let d = GridOptions::default();
        GridOptions {
            ns: self.ns,
            ni: self.ni,
            signal_range_nm: self.signal_range_nm.map(|[a, b]| (a, b)),
            idler_range_nm: self.idler_range_nm.map(|[a, b]| (a, b)),
            lobes: self.lobes.unwrap_or(d.lobes),
            auto_refine: self.auto_refine,
            ..d
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Linearized,
    Full,
}

impl ModelKind {
    pub fn mode(self) -> ModelMode {
        match self {
            ModelKind::Linearized => ModelMode::Linearized,
            ModelKind::Full => ModelMode::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionModelConfig {
    #[serde(default)]
    pub mode: ModeKind,
    #[serde(default)]
    pub cladding: CladdingKind,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeKind {
    #[default]
    VectorHe11,
    ScalarLp01,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CladdingKind {
    #[default]
    IndexAverage,
    PermittivityAverage,
}

impl DispersionModelConfig {
    pub fn model(self) -> DispersionModel {
        let mode = match self.mode {
            ModeKind::VectorHe11 => ModeModel::VectorHe11,
            ModeKind::ScalarLp01 => ModeModel::ScalarLp01,
        };
        let cladding = match self.cladding {
            CladdingKind::IndexAverage => CladdingRule::IndexAverage,
            CladdingKind::PermittivityAverage => CladdingRule::PermittivityAverage,
        };
        DispersionModel::new(mode, cladding)
    }
}

/// Either one filter centre or an evenly spaced scan of centres.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub fwhm_nm: f64,
    pub center_nm: Option<f64>,
    pub scan_range_nm: Option<[f64; 2]>,
    pub points: Option<usize>,
}

impl FilterConfig {
    pub fn centres_nm(&self) -> Vec<f64> {
        match (self.center_nm, self.scan_range_nm) {
            (Some(c), None) => vec![c],
            (None, Some([a, b])) => sfwm_core::roots::linspace(a, b, self.points.unwrap_or(201)),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Exhaustive,
    Greedy,
}

/// The segment pool is the `segments` list.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    pub target_total_length_m: f64,
    pub tolerance_m: Option<f64>,
    pub max_segments: Option<usize>,
    #[serde(default)]
    pub strategy: Strategy,
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationEntry {
    pub label: String,
    pub parts: Vec<PartEntry>,
}

/// A piece of a named segment; `length_m` overrides the segment's own length.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartEntry {
    pub segment: String,
    pub length_m: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G2TableConfig {
    pub pump_fwhm_nm: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DispersionConfig {
    pub wavelength_range_nm: [f64; 2],
    pub points: usize,
    pub zdw_range_nm: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub pump_range_nm: [f64; 2],
    pub points: usize,
}

/// GVD samples come from a CSV file or are synthesised from a known
/// structure (optionally with seeded noise).
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub gvd_csv: Option<PathBuf>,
    pub synthetic: Option<SyntheticGvd>,
    pub initial_guess: [f64; 2],
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticGvd {
    pub core_radius_nm: f64,
    pub air_fill: f64,
    pub wavelength_range_nm: [f64; 2],
    pub points: usize,
    #[serde(default)]
    pub noise_relative: f64,
}

fn bad(field: impl Into<String>, reason: impl std::fmt::Display) -> RunError {
    RunError::new(Stage::Config, format!("{}: {reason}", field.into()))
}

fn positive(field: impl Into<String>, v: f64) -> Result<(), RunError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("{v} must be positive")))
    }
}

fn range(field: impl Into<String>, r: [f64; 2]) -> Result<(), RunError> {
    let field = field.into();
    positive(field.clone(), r[0])?;
    if r[1] > r[0] && r[1].is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("[{}, {}] must be ascending", r[0], r[1])))
    }
}

fn required<'a, T>(v: &'a Option<T>, field: &str, cmd: Command) -> Result<&'a T, RunError> {
    v.as_ref()
        .ok_or_else(|| bad(field, format!("section is required by `{}`", cmd.name())))
}

impl RunConfig {
    /// Reads and parses the file; returns the raw bytes too, for hashing.
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), RunError> {
        let raw = std::fs::read(path)
            .map_err(|e| RunError::new(Stage::Config, format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_slice(&raw)
            .map_err(|e| RunError::new(Stage::Config, format!("{}: {e}", path.display())))?;
        Ok((cfg, raw))
    }

    pub fn segment(&self, label: &str) -> Option<&SegmentConfig> {
        self.segments.iter().find(|s| s.label == label)
    }

    /// Checks everything `cmd` will touch.
    pub fn validate(&self, cmd: Command) -> Result<(), RunError> {
        self.validate_pump()?;
        self.validate_segments()?;
        self.validate_grid()?;
        let needs_segments = !matches!(cmd, Command::Fit);
        if needs_segments && self.segments.is_empty() {
            return Err(bad(
                "segments",
                format!("at least one segment is required by `{}`", cmd.name()),
            ));
        }
        if self.model == ModelKind::Full && matches!(cmd, Command::Plan) {
            return Err(bad("model", "the planner works on linearized segments only"));
        }
        match cmd {
            Command::Dispersion => {
                let d = required(&self.dispersion, "dispersion", cmd)?;
                range("dispersion.wavelength_range_nm", d.wavelength_range_nm)?;
                if d.points < 2 {
                    return Err(bad("dispersion.points", "need at least 2"));
                }
                if let Some(r) = d.zdw_range_nm {
                    range("dispersion.zdw_range_nm", r)?;
                }
            }
            Command::Fit => self.validate_fit(cmd)?,
            Command::GvmCurve => {
                let s = required(&self.sweep, "sweep", cmd)?;
                range("sweep.pump_range_nm", s.pump_range_nm)?;
                if s.points < 2 {
                    return Err(bad("sweep.points", "need at least 2"));
                }
            }
            Command::FilterScan => {
                let f = required(&self.filter, "filter", cmd)?;
                positive("filter.fwhm_nm", f.fwhm_nm)?;
                match (f.center_nm, f.scan_range_nm) {
                    (Some(c), None) => positive("filter.center_nm", c)?,
                    (None, Some(r)) => {
                        range("filter.scan_range_nm", r)?;
                        if f.points.is_some_and(|n| n < 2) {
                            return Err(bad("filter.points", "need at least 2"));
                        }
                    }
                    _ => return Err(bad("filter", "give exactly one of center_nm and scan_range_nm")),
                }
            }
            Command::G2Table => {
                required(&self.configurations, "configurations", cmd)?;
            }
            Command::Plan => {
                let p = required(&self.planner, "planner", cmd)?;
                positive("planner.target_total_length_m", p.target_total_length_m)?;
                if let Some(t) = p.tolerance_m {
                    if !(t >= 0.0 && t.is_finite()) {
                        return Err(bad("planner.tolerance_m", format!("{t} must be non-negative")));
                    }
                }
                if p.max_segments == Some(0) {
                    return Err(bad("planner.max_segments", "must be at least 1"));
                }
                if p.cap == Some(0) {
                    return Err(bad("planner.cap", "must be at least 1"));
                }
            }
            Command::Phasematch | Command::Jsa | Command::Marginal | Command::G2 => {}
        }
        self.validate_table()
    }

    fn validate_pump(&self) -> Result<(), RunError> {
        let p = &self.pump;
        positive("pump.center_wavelength_nm", p.center_wavelength_nm)?;
        positive("pump.fwhm_nm", p.fwhm_nm)?;
        match (p.gamma_per_w_km, p.peak_power_w) {
            (None, None) => Ok(()),
            (Some(g), Some(w)) => {
                positive("pump.gamma_per_w_km", g)?;
                positive("pump.peak_power_w", w)
            }
            _ => Err(bad("pump", "gamma_per_w_km and peak_power_w go together")),
        }
    }

    fn validate_segments(&self) -> Result<(), RunError> {
        let mut seen = BTreeSet::new();
        let pump_omega = omega_from_nm(self.pump.center_wavelength_nm);
        for (k, s) in self.segments.iter().enumerate() {
            let at = |f: &str| format!("segments[{k}].{f}");
            if s.label.is_empty() {
                return Err(bad(at("label"), "must not be empty"));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(bad(at("label"), format!("duplicate label {:?}", s.label)));
            }
            positive(at("core_radius_nm"), s.core_radius_nm)?;
            if !(s.air_fill > 0.0 && s.air_fill < 1.0) {
                return Err(bad(
                    at("air_fill"),
                    format!("{} must lie strictly between 0 and 1", s.air_fill),
                ));
            }
            positive(at("length_m"), s.length_m)?;
            if let Some(pm) = &s.phase_match {
                let at = |f: &str| format!("segments[{k}].phase_match.{f}");
                positive(at("lambda_s0_nm"), pm.lambda_s0_nm)?;
                positive(at("lambda_i0_nm"), pm.lambda_i0_nm)?;
                if !pm.tau_s_ps_per_m.is_finite() {
                    return Err(bad(at("tau_s_ps_per_m"), "must be finite"));
                }
                if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&pm.theta_rad) {
                    return Err(bad(at("theta_rad"), format!("{} must lie in [0, pi/2]", pm.theta_rad)));
                }
                if pm.tau_i_sign != 1.0 && pm.tau_i_sign != -1.0 {
                    return Err(bad(at("tau_i_sign"), "must be 1 or -1"));
                }
                let idler = nm_from_omega(2.0 * pump_omega - omega_from_nm(pm.lambda_s0_nm));
                if !(idler > 0.0) || (idler - pm.lambda_i0_nm).abs() > 1.0 {
                    return Err(bad(
                        at("lambda_i0_nm"),
                        format!(
                            "{} nm is inconsistent with energy conservation ({idler:.3} nm)",
                            pm.lambda_i0_nm
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<(), RunError> {
        let g = &self.grid;
        if g.ns < 2 || g.ni < 2 {
            return Err(bad("grid", "ns and ni must be at least 2"));
        }
        if let Some(r) = g.signal_range_nm {
            range("grid.signal_range_nm", r)?;
        }
        if let Some(r) = g.idler_range_nm {
            range("grid.idler_range_nm", r)?;
        }
        if let Some(l) = g.lobes {
            positive("grid.lobes", l)?;
        }
        Ok(())
    }

    fn validate_fit(&self, cmd: Command) -> Result<(), RunError> {
        let f = required(&self.fit, "fit", cmd)?;
        positive("fit.initial_guess[0]", f.initial_guess[0])?;
        if !(f.initial_guess[1] > 0.0 && f.initial_guess[1] < 1.0) {
            return Err(bad(
                "fit.initial_guess[1]",
                "air fill must lie strictly between 0 and 1",
            ));
        }
        if f.max_iterations == Some(0) {
            return Err(bad("fit.max_iterations", "must be at least 1"));
        }
        match (&f.gvd_csv, &f.synthetic) {
            (Some(_), None) => Ok(()),
            (None, Some(s)) => {
                positive("fit.synthetic.core_radius_nm", s.core_radius_nm)?;
                if !(s.air_fill > 0.0 && s.air_fill < 1.0) {
                    return Err(bad(
                        "fit.synthetic.air_fill",
                        format!("{} must lie strictly between 0 and 1", s.air_fill),
                    ));
                }
                range("fit.synthetic.wavelength_range_nm", s.wavelength_range_nm)?;
                if s.points < 6 {
                    return Err(bad("fit.synthetic.points", "need at least 6"));
                }
                if !(s.noise_relative >= 0.0 && s.noise_relative < 1.0) {
                    return Err(bad("fit.synthetic.noise_relative", "must lie in [0, 1)"));
                }
                Ok(())
            }
            _ => Err(bad("fit", "give exactly one of gvd_csv and synthetic")),
        }
    }

    fn validate_table(&self) -> Result<(), RunError> {
        let Some(confs) = &self.configurations else {
            return Ok(());
        };
        if confs.is_empty() {
            return Err(bad("configurations", "must not be empty"));
        }
        for (k, c) in confs.iter().enumerate() {
            if c.parts.is_empty() {
                return Err(bad(format!("configurations[{k}].parts"), "must not be empty"));
            }
            for (j, p) in c.parts.iter().enumerate() {
                let at = format!("configurations[{k}].parts[{j}]");
                if self.segment(&p.segment).is_none() {
                    return Err(bad(format!("{at}.segment"), format!("unknown segment {:?}", p.segment)));
                }
                if let Some(l) = p.length_m {
                    positive(format!("{at}.length_m"), l)?;
                }
            }
        }
        if let Some(t) = &self.g2_table {
            if t.pump_fwhm_nm.is_empty() {
                return Err(bad("g2_table.pump_fwhm_nm", "must not be empty"));
            }
            for (k, &w) in t.pump_fwhm_nm.iter().enumerate() {
                positive(format!("g2_table.pump_fwhm_nm[{k}]"), w)?;
            }
        }
        Ok(())
    }
}
