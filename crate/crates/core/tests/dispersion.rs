use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfwm_core::*;

fn samples(model: &DispersionModel, r: f64, f: f64) -> Vec<GvdSample> {
    let s = Structure::new(r, f).unwrap();
    (0..=30)
        .map(|k| {
            let wavelength_nm = 900.0 + 10.0 * k as f64;
            GvdSample {
                wavelength_nm,
                gvd_ps2_per_m: model.gvd(s, wavelength_nm).unwrap(),
            }
        })
        .collect()
}

#[test]
fn zero_dispersion_wavelengths() {
    let model = DispersionModel::default();
    let s = Structure::new(948.0, 0.296).unwrap();
    let z = model.find_zdw(s, (900.0, 1250.0)).unwrap();
    assert_eq!(z.len(), 2);
    assert!((z[0] - 942.0).abs() < 10.0, "{z:?}");
    assert!((z[1] - 1175.0).abs() < 10.0, "{z:?}");
    assert!(model.find_zdw(s, (1000.0, 1100.0)).unwrap().is_empty());
}

#[test]
fn noiseless_fit_round_trip() {
    let model = DispersionModel::default();
    let data = samples(&model, 948.0, 0.296);
    let fit = fit_structure(&model, &data, (940.0, 0.28), &FitOptions::default()).unwrap();
    assert!((fit.core_radius_nm - 948.0).abs() < 1.0, "{fit:?}");
    assert!((fit.air_fill - 0.296).abs() < 0.002, "{fit:?}");
    assert!(fit.residual < 1e-4);
    // deterministic for fixed inputs
    let again = fit_structure(&model, &data, (940.0, 0.28), &FitOptions::default()).unwrap();
    assert_eq!(fit, again);
}

#[test]
fn noisy_fit_round_trip() {
    let model = DispersionModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let data: Vec<GvdSample> = samples(&model, 948.0, 0.296)
        .into_iter()
        .map(|s| GvdSample {
            gvd_ps2_per_m: s.gvd_ps2_per_m * (1.0 + rng.random_range(-0.02..0.02)),
            ..s
        })
        .collect();
    let fit = fit_structure(&model, &data, (940.0, 0.28), &FitOptions::default()).unwrap();
    assert!((fit.core_radius_nm - 948.0).abs() < 2.0, "{fit:?}");
}

#[test]
fn fit_needs_enough_samples() {
    let model = DispersionModel::default();
    let data = samples(&model, 948.0, 0.296);
    assert!(matches!(
        fit_structure(&model, &data[..5], (940.0, 0.28), &FitOptions::default()),
        Err(Error::InvalidParameter { .. })
    ));
}

#[test]
fn fit_reports_best_so_far_when_out_of_iterations() {
    let model = DispersionModel::default();
    let data = samples(&model, 948.0, 0.296);
    let opts = FitOptions {
        max_iterations: 1,
        ..Default::default()
    };
    match fit_structure(&model, &data, (930.0, 0.26), &opts) {
        Err(Error::FitFailed {
            core_radius_nm,
            air_fill,
            residual,
        }) => {
            assert!(core_radius_nm.is_finite() && air_fill.is_finite() && residual.is_finite());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn group_index_is_plausible() {
    // group index of a silica-core fiber sits a little above the material index
    let model = DispersionModel::default();
    let s = Structure::new(948.0, 0.296).unwrap();
    let ng = model.group_slowness(s, 1070.0).unwrap() * units::SPEED_OF_LIGHT;
    assert!(ng > 1.45 && ng < 1.55, "{ng}");
}
