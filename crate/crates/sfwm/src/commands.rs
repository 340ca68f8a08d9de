//! Subcommand bodies. Each returns the files it produced and the grids it
//! used; nothing touches the file system here.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sfwm_core::planner::{enumerate_plans, select_best};
use sfwm_core::roots::linspace;
use sfwm_core::spectra::auto_grid;
use sfwm_core::units::nm_from_omega;
use sfwm_core::*;

use crate::config::{FitConfig, ModelKind, RunConfig, SegmentConfig, Strategy};
use crate::error::{compute, RunError, Stage};
use crate::manifest::GridRecord;
use crate::output::{file_stem, fmt_num, fmt_opt, json_bytes, xy_csv, Csv, OutputSet};
use crate::Command;

/// Spacing of the tabulated `k(λ)` used by the full model, nm.
const CURVE_STEP_NM: f64 = 2.0;
/// Margin added on both sides of the grid when tabulating `k(λ)`, nm.
const CURVE_MARGIN_NM: f64 = 10.0;

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub model: DispersionModel,
    pub pump: PumpSpec,
    pub grid: GridOptions,
    pub seed: Option<u64>,
    /// Samples read from `fit.gvd_csv`, loaded before any computation.
    pub gvd_samples: Option<Vec<GvdSample>>,
}

#[derive(Default)]
pub struct Product {
    pub files: OutputSet,
    pub grids: Vec<GridRecord>,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a RunConfig, seed: Option<u64>) -> Result<Self, RunError> {
        let p = &cfg.pump;
        let mut pump = PumpSpec::new(p.center_wavelength_nm, p.fwhm_nm).map_err(config_error("pump"))?;
        if let (Some(gamma_per_w_km), Some(peak_power_w)) = (p.gamma_per_w_km, p.peak_power_w) {
            pump = pump.with_gain(Gain {
                gamma_per_w_km,
                peak_power_w,
            });
        }
        Ok(Self {
            cfg,
            model: cfg.dispersion_model.model(),
            pump,
            grid: cfg.grid.options(),
            seed,
            gvd_samples: None,
        })
    }
}

fn config_error(what: &'static str) -> impl FnOnce(sfwm_core::Error) -> RunError {
    move |e| RunError::new(Stage::Config, format!("{what}: {e}"))
}

pub fn execute(cmd: Command, ctx: &Context) -> Result<Product, RunError> {
    match cmd {
        Command::Dispersion => dispersion(ctx),
        Command::Fit => fit(ctx),
        Command::Phasematch => phasematch(ctx),
        Command::GvmCurve => gvm(ctx),
        Command::Jsa => jsa(ctx),
        Command::Marginal => marginals(ctx),
        Command::FilterScan => filter_scan(ctx),
        Command::G2 => g2(ctx),
        Command::G2Table => g2_table(ctx),
        Command::Plan => plan(ctx),
    }
}

fn fiber(seg: &SegmentConfig) -> FiberSegment {
    FiberSegment {
        label: seg.label.clone(),
        core_radius_nm: seg.core_radius_nm,
        air_fill: seg.air_fill,
        length_m: seg.length_m,
    }
}

fn dispersion(ctx: &Context) -> Result<Product, RunError> {
    let d = ctx.cfg.dispersion.as_ref().expect("validated");
    let [a, b] = d.wavelength_range_nm;
    let wl = linspace(a, b, d.points);
    let [za, zb] = d.zdw_range_nm.unwrap_or(d.wavelength_range_nm);
    let mut out = Product::default();
    let mut zdw = Csv::new(&["segment", "zdw_nm"]);
    for seg in &ctx.cfg.segments {
        let s = fiber(seg).structure();
        let rows = wl
            .par_iter()
            .map(|&l| ctx.model.tabulate(s, &[l]).map(|r| r[0]))
            .collect::<Result<Vec<_>>>()
            .map_err(compute(format!("dispersion of {}", seg.label)))?;
        let mut csv = Csv::new(&[
            "wavelength_nm",
            "n_eff",
            "k_rad_per_m",
            "k1_ps_per_m",
            "beta2_ps2_per_m",
        ]);
        for r in rows {
            csv.row(&[
                fmt_num(r.wavelength_nm),
                fmt_num(r.n_eff),
                fmt_num(r.k_rad_per_m),
                fmt_num(r.k1_ps_per_m),
                fmt_num(r.beta2_ps2_per_m),
            ]);
        }
        out.files
            .add(format!("dispersion_{}.csv", file_stem(&seg.label)), csv.into_bytes());
        let roots = ctx
            .model
            .find_zdw(s, (za, zb))
            .map_err(compute(format!("zero-dispersion wavelengths of {}", seg.label)))?;
        for z in roots {
            zdw.row(&[seg.label.clone(), fmt_num(z)]);
        }
    }
    out.files.add("zdw.csv", zdw.into_bytes());
    Ok(out)
}

/// Reads `wavelength_nm,beta2_ps2_per_m` rows.
pub fn read_gvd_csv(bytes: &[u8]) -> Result<Vec<GvdSample>, String> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Row {
        wavelength_nm: f64,
        beta2_ps2_per_m: f64,
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let mut out = Vec::new();
    for (k, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| format!("row {}: {e}", k + 1))?;
        if !(row.wavelength_nm > 0.0 && row.beta2_ps2_per_m.is_finite()) {
            return Err(format!("row {}: non-physical sample", k + 1));
        }
        out.push(GvdSample {
            wavelength_nm: row.wavelength_nm,
            gvd_ps2_per_m: row.beta2_ps2_per_m,
        });
    }
    Ok(out)
}

fn synthetic_samples(ctx: &Context, f: &FitConfig) -> Result<Vec<GvdSample>, RunError> {
    let syn = f.synthetic.as_ref().expect("validated");
    let s = Structure::new(syn.core_radius_nm, syn.air_fill).map_err(config_error("fit.synthetic"))?;
    let [a, b] = syn.wavelength_range_nm;
    let clean = linspace(a, b, syn.points)
        .into_par_iter()
        .map(|l| ctx.model.gvd(s, l).map(|g| (l, g)))
        .collect::<Result<Vec<_>>>()
        .map_err(compute("synthetic GVD samples"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed.unwrap_or(0));
    Ok(clean
        .into_iter()
        .map(|(l, g)| {
            let u: f64 = if syn.noise_relative > 0.0 {
                rng.random_range(-1.0..=1.0)
            } else {
                0.0
            };
            GvdSample {
                wavelength_nm: l,
                gvd_ps2_per_m: g * (1.0 + syn.noise_relative * u),
            }
        })
        .collect())
}

#[derive(Serialize)]
struct FitRecord {
    core_radius_nm: f64,
    air_fill: f64,
    residual_ps2_per_m: f64,
    iterations: usize,
    samples: usize,
}

fn fit(ctx: &Context) -> Result<Product, RunError> {
    let f = ctx.cfg.fit.as_ref().expect("validated");
    let samples = match &ctx.gvd_samples {
        Some(s) => s.clone(),
        None => synthetic_samples(ctx, f)?,
    };
    let mut opts = FitOptions::default();
    if let Some(n) = f.max_iterations {
        opts.max_iterations = n;
    }
    let [r0, f0] = f.initial_guess;
    let res = fit_structure(&ctx.model, &samples, (r0, f0), &opts).map_err(compute("structure fit"))?;
    let s = Structure::new(res.core_radius_nm, res.air_fill).map_err(compute("fitted structure"))?;
    let model_gvd = samples
        .par_iter()
        .map(|x| ctx.model.gvd(s, x.wavelength_nm))
        .collect::<Result<Vec<_>>>()
        .map_err(compute("fitted GVD"))?;
    let mut csv = Csv::new(&["wavelength_nm", "beta2_ps2_per_m", "model_beta2_ps2_per_m"]);
    for (x, m) in samples.iter().zip(&model_gvd) {
        csv.row(&[fmt_num(x.wavelength_nm), fmt_num(x.gvd_ps2_per_m), fmt_num(*m)]);
    }
    let mut out = Product::default();
    out.files.add(
        "fit.json",
        json_bytes(&FitRecord {
            core_radius_nm: res.core_radius_nm,
            air_fill: res.air_fill,
            residual_ps2_per_m: res.residual,
            iterations: res.iterations,
            samples: samples.len(),
        }),
    );
    out.files.add("fit_gvd.csv", csv.into_bytes());
    Ok(out)
}

fn phasematch(ctx: &Context) -> Result<Product, RunError> {
    let sols = ctx
        .cfg
        .segments
        .par_iter()
        .map(|seg| {
            solve_phase_match(&ctx.model, fiber(seg).structure(), &ctx.pump)
                .map_err(compute(format!("phase matching of {}", seg.label)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Csv::new(&[
        "segment",
        "core_radius_nm",
        "air_fill",
        "lambda_s0_nm",
        "lambda_i0_nm",
        "tau_s_ps_per_m",
        "tau_i_ps_per_m",
        "theta_rad",
        "ambiguous",
        "momentum_residual_rad_per_m",
    ]);
    for (seg, sol) in ctx.cfg.segments.iter().zip(&sols) {
        let p = sol.point;
        csv.row(&[
            seg.label.clone(),
            fmt_num(seg.core_radius_nm),
            fmt_num(seg.air_fill),
            fmt_num(p.lambda_s0_nm()),
            fmt_num(p.lambda_i0_nm()),
            fmt_num(p.tau_s_ps_per_m()),
            fmt_num(p.tau_i_ps_per_m()),
            fmt_num(p.theta()),
            sol.ambiguous.to_string(),
            fmt_num(sol.momentum_residual),
        ]);
    }
    let mut out = Product::default();
    out.files.add("phasematch.csv", csv.into_bytes());
    Ok(out)
}

fn gvm(ctx: &Context) -> Result<Product, RunError> {
    let sw = ctx.cfg.sweep.as_ref().expect("validated");
    let range = (sw.pump_range_nm[0], sw.pump_range_nm[1]);
    let results = ctx
        .cfg
        .segments
        .par_iter()
        .map(|seg| {
            let s = fiber(seg).structure();
            let curve = gvm_curve(&ctx.model, s, ctx.pump.fwhm_nm, range, sw.points)
                .map_err(compute(format!("pump sweep of {}", seg.label)))?;
            let roots = agvm_roots(&ctx.model, s, range).map_err(compute(format!("AGVM roots of {}", seg.label)))?;
            Ok((curve, roots))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    let mut out = Product::default();
    let mut agvm = Csv::new(&["segment", "pump_tau_i_zero_nm", "pump_tau_s_zero_nm"]);
    for (seg, (curve, roots)) in ctx.cfg.segments.iter().zip(results) {
        let mut csv = Csv::new(&[
            "lambda_p_nm",
            "lambda_s0_nm",
            "lambda_i0_nm",
            "tau_s_ps_per_m",
            "tau_i_ps_per_m",
            "theta_rad",
        ]);
        for g in curve {
            let p = g.point;
            csv.row(&[
                fmt_num(g.pump_nm),
                fmt_opt(p.map(|p| p.lambda_s0_nm())),
                fmt_opt(p.map(|p| p.lambda_i0_nm())),
                fmt_opt(p.map(|p| p.tau_s_ps_per_m())),
                fmt_opt(p.map(|p| p.tau_i_ps_per_m())),
                fmt_opt(p.map(|p| p.theta())),
            ]);
        }
        out.files
            .add(format!("gvm_{}.csv", file_stem(&seg.label)), csv.into_bytes());
        agvm.row(&[
            seg.label.clone(),
            fmt_opt(roots.pump_for_tau_i_zero),
            fmt_opt(roots.pump_for_tau_s_zero),
        ]);
    }
    out.files.add("agvm.csv", agvm.into_bytes());
    Ok(out)
}

/// Phase-matching points of every configured segment, keyed by label.
fn segment_points(ctx: &Context) -> Result<BTreeMap<String, PhaseMatchPoint>, RunError> {
    let pts = ctx
        .cfg
        .segments
        .par_iter()
        .map(|seg| {
            let point = match seg.phase_match {
                Some(pm) => PhaseMatchPoint::from_tabulated(
                    ctx.pump.center_wavelength_nm,
                    pm.lambda_s0_nm,
                    pm.tau_s_ps_per_m,
                    pm.theta_rad,
                    pm.tau_i_sign,
                )
                .map_err(config_error("phase_match"))?,
                None => {
                    solve_phase_match(&ctx.model, fiber(seg).structure(), &ctx.pump)
                        .map_err(compute(format!("phase matching of {}", seg.label)))?
                        .point
                }
            };
            Ok((seg.label.clone(), point))
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(pts.into_iter().collect())
}

/// Assembly of `(segment, length)` pieces in order. In full mode each piece
/// carries `k(λ)` tabulated over the grid the linearised assembly needs.
fn build_assembly(
    ctx: &Context,
    label: &str,
    parts: &[(&SegmentConfig, f64)],
    points: &BTreeMap<String, PhaseMatchPoint>,
) -> Result<AssemblySpec, RunError> {
    let segs: Vec<AssemblySegment> = parts
        .iter()
        .map(|(s, len)| AssemblySegment::linearized(s.label.clone(), *len, points[&s.label]))
        .collect();
    let err = compute(format!("assembly {label}"));
    let lin = AssemblySpec::new(label, segs.clone(), ModelMode::Linearized).map_err(err)?;
    if ctx.cfg.model == ModelKind::Linearized {
        return Ok(lin);
    }
    let grid = auto_grid(&lin, &ctx.pump, &ctx.grid).map_err(compute(format!("grid of {label}")))?;
    let lo = (nm_from_omega(grid.signal.end().max(grid.idler.end())) - CURVE_MARGIN_NM).floor();
    let hi = (nm_from_omega(grid.signal.start.min(grid.idler.start)) + CURVE_MARGIN_NM).ceil();
    let n = ((hi - lo) / CURVE_STEP_NM).ceil() as usize + 1;
    let wl = linspace(lo, hi, n);
    let mut full = Vec::with_capacity(segs.len());
    for (seg, (cfg_seg, _)) in segs.into_iter().zip(parts) {
        let s = fiber(cfg_seg).structure();
        let k = wl
            .par_iter()
            .map(|&l| ctx.model.propagation_constant(s, l))
            .collect::<Result<Vec<_>>>()
            .map_err(compute(format!("dispersion curve of {}", cfg_seg.label)))?;
        let curve = DispersionCurve::new(
            wl.clone(),
            k,
            Provenance::Model {
                label: cfg_seg.label.clone(),
            },
        )
        .map_err(compute(format!("dispersion curve of {}", cfg_seg.label)))?;
        full.push(seg.with_curve(curve));
    }
    AssemblySpec::new(label, full, ModelMode::Full).map_err(compute(format!("assembly {label}")))
}

/// Assemblies to run on: every entry of `configurations` when present,
/// otherwise all segments in order. The file suffix is empty in the second
/// case.
fn targets(ctx: &Context) -> Result<Vec<(String, AssemblySpec)>, RunError> {
    let points = segment_points(ctx)?;
    match &ctx.cfg.configurations {
        Some(confs) => confs
            .iter()
            .map(|c| {
                let parts: Vec<(&SegmentConfig, f64)> = c
                    .parts
                    .iter()
                    .map(|p| {
                        let seg = ctx.cfg.segment(&p.segment).expect("validated");
                        (seg, p.length_m.unwrap_or(seg.length_m))
                    })
                    .collect();
                Ok((
                    format!("_{}", file_stem(&c.label)),
                    build_assembly(ctx, &c.label, &parts, &points)?,
                ))
            })
            .collect(),
        None => {
            let parts: Vec<(&SegmentConfig, f64)> = ctx.cfg.segments.iter().map(|s| (s, s.length_m)).collect();
            let label = ctx
                .cfg
                .segments
                .iter()
                .map(|s| s.label.as_str())
                .collect::<Vec<_>>()
                .join("+");
            Ok(vec![(String::new(), build_assembly(ctx, &label, &parts, &points)?)])
        }
    }
}

/// Builds the JSA row by row in parallel; rows are collected in order so the
/// result does not depend on the thread count.
fn build_jsa_parallel(asm: &AssemblySpec, pump: &PumpSpec, opts: &GridOptions) -> Result<JsaGrid, RunError> {
    let grid = auto_grid(asm, pump, opts).map_err(compute(format!("grid of {}", asm.label)))?;
    let err = || compute(format!("JSA of {}", asm.label));
    JsaGrid::validate_inputs(asm, pump, &grid).map_err(err())?;
    let rows = (0..grid.signal.len)
        .into_par_iter()
        .map(|r| JsaGrid::evaluate_row(asm, pump, &grid, r))
        .collect::<Result<Vec<_>>>()
        .map_err(err())?;
    JsaGrid::from_rows(asm, pump, &grid, rows).map_err(err())
}

#[derive(Serialize)]
struct SegmentRecord {
    label: String,
    length_m: f64,
    lambda_s0_nm: f64,
    lambda_i0_nm: f64,
    tau_s_ps_per_m: f64,
    tau_i_ps_per_m: f64,
}

#[derive(Serialize)]
struct JsaMeta {
    pump_center_wavelength_nm: f64,
    pump_fwhm_nm: f64,
    model: &'static str,
    assembly: String,
    segments: Vec<SegmentRecord>,
    grid: GridRecord,
    normalization: &'static str,
    layout: &'static str,
}

fn jsa_meta(ctx: &Context, jsa: &JsaGrid, layout: &'static str) -> JsaMeta {
    let asm = jsa.assembly();
    JsaMeta {
        pump_center_wavelength_nm: ctx.pump.center_wavelength_nm,
        pump_fwhm_nm: ctx.pump.fwhm_nm,
        model: match ctx.cfg.model {
            ModelKind::Linearized => "linearized",
            ModelKind::Full => "full",
        },
        assembly: asm.label.clone(),
        segments: asm
            .segments()
            .iter()
            .map(|s| SegmentRecord {
                label: s.label.clone(),
                length_m: s.length_m,
                lambda_s0_nm: s.point.lambda_s0_nm(),
                lambda_i0_nm: s.point.lambda_i0_nm(),
                tau_s_ps_per_m: s.point.tau_s_ps_per_m(),
                tau_i_ps_per_m: s.point.tau_i_ps_per_m(),
            })
            .collect(),
        grid: GridRecord::new(asm.label.clone(), jsa.grid()),
        normalization: "raw",
        layout,
    }
}

fn jsa(ctx: &Context) -> Result<Product, RunError> {
    let mut out = Product::default();
    for (suffix, asm) in targets(ctx)? {
        let jsa = build_jsa_parallel(&asm, &ctx.pump, &ctx.grid)?;
        let g = jsa.grid();
        let mut header = vec![String::from("signal_nm\\idler_nm")];
        header.extend(g.idler.values().into_iter().map(|w| fmt_num(nm_from_omega(w))));
        let mut csv = Csv::new(&header);
        for s in 0..jsa.ns() {
            let mut row = Vec::with_capacity(jsa.ni() + 1);
            row.push(fmt_num(nm_from_omega(g.signal.value(s))));
            row.extend((0..jsa.ni()).map(|i| fmt_num(jsa.intensity(s, i))));
            csv.row(&row);
        }
        out.files.add(format!("jsi{suffix}.csv"), csv.into_bytes());
        out.files.add(
            format!("jsi{suffix}_meta.json"),
            json_bytes(&jsa_meta(
                ctx,
                &jsa,
                "rows follow the signal axis and columns the idler axis, both in ascending angular frequency; values are |f|^2",
            )),
        );
        out.grids.push(GridRecord::new(asm.label.clone(), g));
    }
    Ok(out)
}

fn marginals(ctx: &Context) -> Result<Product, RunError> {
    let mut out = Product::default();
    for (suffix, asm) in targets(ctx)? {
        let jsa = build_jsa_parallel(&asm, &ctx.pump, &ctx.grid)?;
        for (axis, name) in [(MarginalAxis::Signal, "signal"), (MarginalAxis::Idler, "idler")] {
            let m = marginal(&jsa, axis).to_wavelength();
            out.files
                .add(format!("marginal_{name}{suffix}.csv"), xy_csv(m.x(), m.values()));
        }
        out.files.add(
            format!("marginal{suffix}_meta.json"),
            json_bytes(&jsa_meta(
                ctx,
                &jsa,
                "trapezoid sums of |f|^2 over the other axis in rad/s, listed by ascending wavelength",
            )),
        );
        out.grids.push(GridRecord::new(asm.label.clone(), jsa.grid()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ScanMeta {
    assembly: String,
    filter_fwhm_nm: f64,
    out_of_support_nm: Vec<f64>,
}

fn filter_scan(ctx: &Context) -> Result<Product, RunError> {
    let f = ctx.cfg.filter.as_ref().expect("validated");
    let centres = f.centres_nm();
    let mut out = Product::default();
    for (suffix, asm) in targets(ctx)? {
        let scan = filter_scan_assembly(&asm, &ctx.pump, f.fwhm_nm, &centres, &ctx.grid)
            .map_err(compute(format!("filter scan of {}", asm.label)))?;
        let support = auto_grid(&asm, &ctx.pump, &ctx.grid).map_err(compute(format!("grid of {}", asm.label)))?;
        out.files.add(
            format!("filter_scan{suffix}.csv"),
            xy_csv(scan.spectrum.x(), scan.spectrum.values()),
        );
        out.files.add(
            format!("filter_scan{suffix}_meta.json"),
            json_bytes(&ScanMeta {
                assembly: asm.label.clone(),
                filter_fwhm_nm: f.fwhm_nm,
                out_of_support_nm: scan.out_of_support.iter().map(|&k| centres[k]).collect(),
            }),
        );
        out.grids.push(GridRecord::new(asm.label.clone(), &support));
    }
    Ok(out)
}

fn g2_header() -> Csv {
    Csv::new(&[
        "configuration",
        "total_length_m",
        "pump_fwhm_nm",
        "g2",
        "schmidt_number",
        "purity",
    ])
}

fn g2_row(csv: &mut Csv, r: &G2Row) {
    csv.row(&[
        r.label.clone(),
        fmt_num(r.total_length_m),
        fmt_num(r.pump_fwhm_nm),
        fmt_num(r.g2),
        fmt_num(r.schmidt_number),
        fmt_num(r.purity),
    ]);
}

fn g2(ctx: &Context) -> Result<Product, RunError> {
    let mut csv = g2_header();
    let mut out = Product::default();
    for (_, asm) in targets(ctx)? {
        let jsa = build_jsa_parallel(&asm, &ctx.pump, &ctx.grid)?;
        let g2 = g2_quadrature(&jsa).map_err(compute(format!("g2 of {}", asm.label)))?;
        g2_row(
            &mut csv,
            &G2Row {
                label: asm.label.clone(),
                total_length_m: asm.total_length_m(),
                pump_fwhm_nm: ctx.pump.fwhm_nm,
                g2,
                schmidt_number: 1.0 / (g2 - 1.0),
                purity: g2 - 1.0,
                grid: *jsa.grid(),
            },
        );
        out.grids.push(GridRecord::new(asm.label.clone(), jsa.grid()));
    }
    out.files.add("g2.csv", csv.into_bytes());
    Ok(out)
}

fn g2_table(ctx: &Context) -> Result<Product, RunError> {
    let widths = match &ctx.cfg.g2_table {
        Some(t) => t.pump_fwhm_nm.clone(),
        None => vec![ctx.pump.fwhm_nm],
    };
    let mut jobs = Vec::new();
    for (_, asm) in targets(ctx)? {
        for &w in &widths {
            let pump = PumpSpec { fwhm_nm: w, ..ctx.pump };
            jobs.push(G2Configuration {
                label: asm.label.clone(),
                assembly: asm.clone(),
                pump,
                grid: ctx.grid.clone(),
            });
        }
    }
    let rows = jobs
        .par_iter()
        .map(|j| {
            j.evaluate().map_err(compute(format!(
                "g2 of {} at {} nm pump width",
                j.label, j.pump.fwhm_nm
            )))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = g2_header();
    let mut out = Product::default();
    for r in &rows {
        g2_row(&mut csv, r);
        out.grids.push(GridRecord::new(
            format!("{} @ {} nm", r.label, fmt_num(r.pump_fwhm_nm)),
            &r.grid,
        ));
    }
    out.files.add("g2_table.csv", csv.into_bytes());
    Ok(out)
}

#[derive(Serialize)]
struct PlanRecord {
    strategy: &'static str,
    labels: Vec<String>,
    lengths_m: Vec<f64>,
    total_length_m: f64,
    predicted_g2: f64,
    spectrum_csv: &'static str,
}

fn plan(ctx: &Context) -> Result<Product, RunError> {
    let p = ctx.cfg.planner.as_ref().expect("validated");
    let points = segment_points(ctx)?;
    let candidates = ctx
        .cfg
        .segments
        .iter()
        .map(|s| Candidate {
            segment: fiber(s),
            point: points[&s.label],
        })
        .collect();
    let constraint = LengthConstraint {
        target_total_length_m: p.target_total_length_m,
        tolerance_m: p.tolerance_m,
        max_segments: p.max_segments,
    };
    let pool = SegmentPool::new(candidates, constraint).map_err(config_error("planner"))?;
    let mut opts = PlannerOptions {
        grid: ctx.grid.clone(),
        ..Default::default()
    };
    if let Some(cap) = p.cap {
        opts.cap = cap;
    }
    let mut out = Product::default();
    let best = match p.strategy {
        Strategy::Greedy => plan_greedy(&pool, &ctx.pump, &opts).map_err(compute("greedy plan"))?,
        Strategy::Exhaustive => {
            let orders = enumerate_plans(&pool, opts.cap).map_err(compute("plan enumeration"))?;
            let evaluated = orders
                .into_par_iter()
                .map(|o| evaluate_plan(&o, &pool, &ctx.pump, &opts).map(|e| (o, e)))
                .collect::<Result<Vec<_>>>()
                .map_err(compute("plan evaluation"))?;
            let mut csv = Csv::new(&["plan", "total_length_m", "g2"]);
            for (o, e) in &evaluated {
                let labels: Vec<&str> = o.iter().map(|&k| pool.candidates()[k].segment.label.as_str()).collect();
                csv.row(&[labels.join("+"), fmt_num(pool.total_length_m(o)), fmt_num(e.g2)]);
            }
            out.files.add("plan_candidates.csv", csv.into_bytes());
            select_best(&pool, evaluated).map_err(compute("plan selection"))?
        }
    };
    let asm = pool.assembly(&best.order).map_err(compute("chosen plan"))?;
    let grid = auto_grid(&asm, &ctx.pump, &ctx.grid).map_err(compute("grid of chosen plan"))?;
    out.grids.push(GridRecord::new(asm.label.clone(), &grid));
    let spectrum = &best.predicted_spectrum;
    out.files
        .add("plan_spectrum.csv", xy_csv(spectrum.x(), spectrum.values()));
    out.files.add(
        "plan.json",
        json_bytes(&PlanRecord {
            strategy: match p.strategy {
                Strategy::Exhaustive => "exhaustive",
                Strategy::Greedy => "greedy",
            },
            lengths_m: best
                .order
                .iter()
                .map(|&k| pool.candidates()[k].segment.length_m)
                .collect(),
            labels: best.labels.clone(),
            total_length_m: best.total_length_m,
            predicted_g2: best.predicted_g2,
            spectrum_csv: "plan_spectrum.csv",
        }),
    );
    Ok(out)
}
