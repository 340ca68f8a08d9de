//! Unit conversions. Everything inside the crate is SI (m, s, rad/s);
//! nanometres, ps/m and ps²/m appear only at the edges.

use crate::math::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// One picosecond per metre, in s/m.
pub const PS_PER_M: f64 = 1e-12;

/// One ps²/m, in s²/m.
pub const PS2_PER_M: f64 = 1e-24;

/// Angular frequency (rad/s) of a vacuum wavelength given in nm.
#[inline]
pub fn omega_from_nm(wavelength_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / (wavelength_nm * 1e-9)
}

/// Vacuum wavelength in nm of an angular frequency in rad/s.
#[inline]
pub fn nm_from_omega(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega * 1e9
}

/// Converts a wavelength width (nm) at `center_nm` into an angular-frequency
/// width (rad/s), to first order.
#[inline]
pub fn omega_width_from_nm(center_nm: f64, width_nm: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * width_nm * 1e-9 / ((center_nm * 1e-9) * (center_nm * 1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        for nm in [300.0, 862.1, 1070.0, 1409.9, 2000.0] {
            let back = nm_from_omega(omega_from_nm(nm));
            assert!((back - nm).abs() < 1e-12 * nm);
        }
    }

    #[test]
    fn one_micron_is_about_1_88e15() {
        let w = omega_from_nm(1000.0);
        assert!((w - 1.883_651_567_308_853e15).abs() < 1e3);
    }

    #[test]
    fn picosecond_bookkeeping() {
        // 3.2 ps/m times 1 rad/ps is 3.2 rad/m
        let tau = 3.2 * PS_PER_M;
        let detuning = 1.0 / 1e-12;
        assert!((tau * detuning - 3.2).abs() < 1e-12);
    }
}
