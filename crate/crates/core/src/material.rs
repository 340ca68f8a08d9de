//! Fused-silica refractive index and the effective cladding index of the
//! air/silica microstructure.

use crate::dispersion::CladdingRule;
use crate::error::{invalid, Error, Result};
use crate::math::sqrt;

/// Wavelength window (nm) over which the Sellmeier fit is trusted.
pub const SELLMEIER_WINDOW_NM: (f64, f64) = (300.0, 2000.0);

// Malitson's three-term fit for fused silica; resonances in µm.
const B: [f64; 3] = [0.696_166_3, 0.407_942_6, 0.897_479_4];
const C: [f64; 3] = [0.068_404_3, 0.116_241_4, 9.896_161];

/// Refractive index of fused silica.
pub fn silica_refractive_index(wavelength_nm: f64) -> Result<f64> {
    let (lo, hi) = SELLMEIER_WINDOW_NM;
    if !(lo..=hi).contains(&wavelength_nm) {
        return Err(Error::Domain {
            quantity: "wavelength (nm) for the fused-silica Sellmeier fit",
            value: wavelength_nm,
            min: lo,
            max: hi,
        });
    }
    let l2 = (wavelength_nm * 1e-3) * (wavelength_nm * 1e-3);
    let mut n2 = 1.0;
    for (b, c) in B.iter().zip(C.iter()) {
        n2 += b * l2 / (l2 - c * c);
    }
    Ok(sqrt(n2))
}

/// Effective index of the holey cladding with air-filling fraction `air_fill`.
pub fn cladding_index(wavelength_nm: f64, air_fill: f64, rule: CladdingRule) -> Result<f64> {
    if !(air_fill > 0.0 && air_fill < 1.0) {
        return Err(invalid("air_fill", "must lie strictly between 0 and 1"));
    }
    let n_si = silica_refractive_index(wavelength_nm)?;
    Ok(match rule {
        CladdingRule::IndexAverage => (1.0 - air_fill) * n_si + air_fill,
        CladdingRule::PermittivityAverage => sqrt((1.0 - air_fill) * n_si * n_si + air_fill),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct evaluation of the Sellmeier formula in µm.
    fn oracle(lambda_um: f64) -> f64 {
        let l2 = lambda_um * lambda_um;
        (1.0 + 0.6961663 * l2 / (l2 - 0.0684043f64.powi(2))
            + 0.4079426 * l2 / (l2 - 0.1162414f64.powi(2))
            + 0.8974794 * l2 / (l2 - 9.896161f64.powi(2)))
        .sqrt()
    }

    #[test]
    fn silica_at_1070_and_d_line() {
        let n = silica_refractive_index(1070.0).unwrap();
        assert!((n - 1.4497).abs() < 5e-4, "{n}");
        assert!((n - oracle(1.070)).abs() < 1e-14);
        let d = silica_refractive_index(587.6).unwrap();
        assert!((d - 1.4585).abs() < 5e-4, "{d}");
    }

    #[test]
    fn silica_outside_window() {
        let err = silica_refractive_index(200.0).unwrap_err();
        assert!(matches!(err, Error::Domain { min, max, .. } if min == 300.0 && max == 2000.0));
        assert!(silica_refractive_index(2100.0).is_err());
    }

    #[test]
    fn silica_smooth_and_above_one() {
        let mut prev = silica_refractive_index(300.0).unwrap();
        for i in 1..=1700 {
            let n = silica_refractive_index(300.0 + i as f64).unwrap();
            assert!(n > 1.0 && n < prev);
            prev = n;
        }
    }

    #[test]
    fn cladding_limits() {
        for rule in [CladdingRule::IndexAverage, CladdingRule::PermittivityAverage] {
            let n_si = silica_refractive_index(1070.0).unwrap();
            let lo = cladding_index(1070.0, 1e-9, rule).unwrap();
            let hi = cladding_index(1070.0, 1.0 - 1e-9, rule).unwrap();
            assert!((lo - n_si).abs() < 1e-8);
            assert!((hi - 1.0).abs() < 1e-8);
            let mut prev = n_si;
            for i in 1..100 {
                let n = cladding_index(1070.0, i as f64 / 100.0, rule).unwrap();
                assert!(n < prev && n > 1.0);
                prev = n;
            }
        }
    }

    #[test]
    fn cladding_at_reference_fill() {
        let n_si = oracle(1.070);
        let perm = cladding_index(1070.0, 0.296, CladdingRule::PermittivityAverage).unwrap();
        assert!((perm - ((1.0 - 0.296) * n_si * n_si + 0.296).sqrt()).abs() < 1e-14);
        assert!((perm - 1.3325).abs() < 1e-3);
        let idx = cladding_index(1070.0, 0.296, CladdingRule::IndexAverage).unwrap();
        assert!((idx - ((1.0 - 0.296) * n_si + 0.296)).abs() < 1e-14);
        assert!((idx - 1.3166).abs() < 1e-3);
    }

    #[test]
    fn cladding_rejects_bad_fill() {
        assert!(cladding_index(1070.0, 1.2, CladdingRule::IndexAverage).is_err());
        assert!(cladding_index(1070.0, 0.0, CladdingRule::IndexAverage).is_err());
    }
}
