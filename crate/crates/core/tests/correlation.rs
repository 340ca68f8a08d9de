mod common;

use common::{pump, spliced};
use proptest::prelude::*;
use sfwm_core::reference::{published_configurations, PUBLISHED_G2};
use sfwm_core::spectra::auto_grid;
use sfwm_core::*;

fn synthetic(ns: usize, ni: usize, f: impl Fn(f64, f64) -> Complex64) -> JsaGrid {
    let asm = spliced(&["S2"], 0.3);
    let grid = FrequencyGrid::new(
        UniformAxis::new(-1.0, 1.0, ns).unwrap(),
        UniformAxis::new(-1.0, 1.0, ni).unwrap(),
    );
    let mut amp = Vec::with_capacity(ns * ni);
    for s in 0..ns {
        for i in 0..ni {
            amp.push(f(grid.signal.value(s), grid.idler.value(i)));
        }
    }
    JsaGrid::from_samples(&asm, &pump(2.0), &grid, amp).unwrap()
}

fn gauss(x: f64, w: f64) -> f64 {
    (-x * x / (2.0 * w * w)).exp()
}

#[test]
fn outer_product_is_pure() {
    let jsa = synthetic(128, 96, |s, i| {
        Complex64::new(gauss(s - 0.1, 0.2) * gauss(i, 0.15), 0.0)
    });
    let g2 = g2_quadrature(&jsa).unwrap();
    assert!((g2 - 2.0).abs() < 1e-6, "{g2}");
    let sch = schmidt_decompose(&jsa).unwrap();
    assert_eq!(sch.rank(1e-10), 1);
    assert!((sch.schmidt_number - 1.0).abs() < 1e-6);
}

#[test]
fn strongly_correlated_gaussian_is_mixed() {
    // long along the anti-diagonal, 100 times narrower across it
    let jsa = synthetic(400, 400, |s, i| {
        let along = (s - i) / 2f64.sqrt();
        let across = (s + i) / 2f64.sqrt();
        Complex64::new(gauss(along, 0.3) * gauss(across, 0.003), 0.0)
    });
    let g2 = g2_quadrature(&jsa).unwrap();
    assert!(g2 < 1.1, "{g2}");
    // closed form for a two-dimensional Gaussian: K = (r + 1/r)/2 with r = 100
    let k = (100.0 + 0.01) / 2.0;
    assert!((g2 - (1.0 + 1.0 / k)).abs() < 5e-3, "{g2}");
}

#[test]
fn zero_amplitude_is_an_error() {
    let jsa = synthetic(8, 8, |_, _| Complex64::new(0.0, 0.0));
    assert_eq!(g2_quadrature(&jsa), Err(Error::ZeroAmplitude));
    assert_eq!(schmidt_decompose(&jsa), Err(Error::ZeroAmplitude));
}

fn random_jsa() -> impl Strategy<Value = JsaGrid> {
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 24 * 20),
        0.0f64..1.0,
    )
        .prop_map(|(v, mix)| {
            synthetic(24, 20, |s, i| {
                let k = (((s + 1.0) * 11.5).round() as usize * 20 + ((i + 1.0) * 9.5).round() as usize) % v.len();
                Complex64::new(gauss(s, 0.4) * gauss(i, 0.5), 0.0) * (1.0 - mix) + Complex64::new(v[k].0, v[k].1) * mix
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bounds_and_path_equivalence(jsa in random_jsa()) {
        let q = g2_quadrature(&jsa).unwrap();
        let s = schmidt_decompose(&jsa).unwrap();
        prop_assert!(q > 1.0 && q <= 2.0 + 1e-12, "{}", q);
        prop_assert!((q - s.g2).abs() < 1e-8);
        prop_assert!(s.schmidt_number >= 1.0 - 1e-12);
        prop_assert!(s.purity > 0.0 && s.purity <= 1.0 + 1e-12);
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn scale_invariance(jsa in random_jsa(), re in -3.0f64..3.0, im in 0.1f64..3.0) {
        let c = Complex64::new(re, im);
        let scaled: Vec<Complex64> = jsa.amplitudes().iter().map(|z| z * c).collect();
        let other = JsaGrid::from_samples(jsa.assembly(), jsa.pump(), jsa.grid(), scaled).unwrap();
        let (a, b) = (schmidt_decompose(&jsa).unwrap(), schmidt_decompose(&other).unwrap());
        prop_assert!((g2_quadrature(&jsa).unwrap() - g2_quadrature(&other).unwrap()).abs() < 1e-12);
        prop_assert!((a.g2 - b.g2).abs() < 1e-12);
        prop_assert!((a.schmidt_number - b.schmidt_number).abs() < 1e-12 * a.schmidt_number);
        prop_assert!((a.purity - b.purity).abs() < 1e-12);
    }
}

fn g2_of(labels: &[&str], len: f64, fwhm: f64) -> f64 {
    let asm = spliced(labels, len);
    let p = pump(fwhm);
    let grid = auto_grid(&asm, &p, &GridOptions::default()).unwrap();
    g2_quadrature(&build_jsa(&asm, &p, &grid).unwrap()).unwrap()
}

#[test]
fn homogeneous_and_spliced_examples() {
    assert!((g2_of(&["S2"], 0.9, 2.0) - 1.83).abs() < 0.05);
    assert!((g2_of(&["S1", "S3"], 0.3, 2.0) - 1.43).abs() < 0.05);
}

#[test]
fn published_rows_bandwidth_length_and_sign() {
    let plus: Vec<f64> = g2_table(&published_configurations(1.0, &GridOptions::default()).unwrap())
        .into_iter()
        .map(|r| r.unwrap().g2)
        .collect();
    let minus: Vec<f64> = g2_table(&published_configurations(-1.0, &GridOptions::default()).unwrap())
        .into_iter()
        .map(|r| r.unwrap().g2)
        .collect();
    for (k, row) in PUBLISHED_G2.iter().enumerate() {
        let (a, b) = (plus[2 * k], plus[2 * k + 1]);
        assert!((a - row.g2[0]).abs() < 0.05, "{} 2 nm: {a}", row.label);
        assert!((b - row.g2[1]).abs() < 0.05, "{} 5 nm: {b}", row.label);
        assert!(b > a, "{}", row.label);
        for j in [2 * k, 2 * k + 1] {
            assert!((plus[j] - minus[j]).abs() < 0.02, "{}", row.label);
        }
    }
    // homogeneous block, rows 6..10, at each bandwidth
    for bw in 0..2 {
        let h: Vec<f64> = (6..10).map(|k| plus[2 * k + bw]).collect();
        assert!(h.windows(2).all(|w| w[1] > w[0]), "{h:?}");
    }
}

#[test]
fn schmidt_path_matches_on_published_rows() {
    for c in published_configurations(1.0, &GridOptions::default())
        .unwrap()
        .iter()
        .step_by(2)
    {
        let grid = auto_grid(&c.assembly, &c.pump, &c.grid).unwrap();
        let jsa = build_jsa(&c.assembly, &c.pump, &grid).unwrap();
        let q = g2_quadrature(&jsa).unwrap();
        let s = schmidt_decompose(&jsa).unwrap();
        assert!((q - s.g2).abs() < 1e-8, "{}", c.label);
    }
}

#[test]
fn table_rows_carry_metadata() {
    let rows = g2_table(&published_configurations(1.0, &GridOptions::default()).unwrap()[..2]);
    let r = rows[1].as_ref().unwrap();
    assert_eq!(r.label, "S1+S2");
    assert_eq!(r.pump_fwhm_nm, 5.0);
    assert!((r.total_length_m - 0.6).abs() < 1e-12);
    assert!((r.purity - (r.g2 - 1.0)).abs() < 1e-15);
    assert!((r.schmidt_number * r.purity - 1.0).abs() < 1e-12);
}
