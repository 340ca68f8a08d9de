//! Integer-order Bessel functions `J0`, `J1`, `K0`, `K1` for real positive
//! arguments.
//!
//! Both families are evaluated from their integral representations with the
//! trapezoid rule:
//!
//! * `Jn(x) = (1/2π) ∫₀^{2π} cos(nτ − x sin τ) dτ` is periodic, so an
//!   `N`-point rule is exact up to terms of order `J_N(x)`, which vanish
//!   super-exponentially once `N` exceeds `x`.
//! * `Kn(x) = ∫₀^∞ exp(−x cosh t) cosh(nt) dt` is analytic in the strip
//!   `|Im t| < π/2` and decays doubly exponentially, so a uniform step `h`
//!   has error `O(exp(−π²/h))`.
//!
//! The results are smooth in `x` to rounding level, which matters because
//! the mode solver is differentiated twice by finite differences.

use crate::math::{acosh, cos, exp, sin_cos, PI};

const K_STEP: f64 = 0.125;
/// Terms with `x (cosh t − 1)` beyond this no longer affect a double.
const K_DECAY_LIMIT: f64 = 42.0;

/// `(J0(x), J1(x))`.
pub fn j0_j1(x: f64) -> (f64, f64) {
    let n = 32 + 2 * (x.abs() as usize);
    let step = 2.0 * PI / n as f64;
    let mut j0 = 0.0;
    let mut j1 = 0.0;
    for k in 0..n {
        let tau = k as f64 * step;
        let (s, c) = sin_cos(tau);
        let arg = x * s;
        j0 += cos(arg);
        // cos(τ − x sin τ) = cos τ cos(x sin τ) + sin τ sin(x sin τ)
        let (sa, ca) = sin_cos(arg);
        j1 += c * ca + s * sa;
    }
    (j0 / n as f64, j1 / n as f64)
}

/// `(K0(x)·eˣ, K1(x)·eˣ)` for `x > 0`. The exponential scaling keeps the
/// values representable for large arguments; ratios are unaffected.
pub fn k0_k1_scaled(x: f64) -> (f64, f64) {
    debug_assert!(x > 0.0);
    let t_max = acosh(1.0 + K_DECAY_LIMIT / x);
    let n = (t_max / K_STEP) as usize + 1;
    let mut k0 = 0.5;
    let mut k1 = 0.5;
    for j in 1..=n {
        let t = j as f64 * K_STEP;
        let e = exp(t);
        let cosh = 0.5 * (e + 1.0 / e);
        let w = exp(-x * (cosh - 1.0));
        k0 += w;
        k1 += w * cosh;
    }
    (k0 * K_STEP, k1 * K_STEP)
}

/// `J0(x)`.
pub fn j0(x: f64) -> f64 {
    j0_j1(x).0
}

/// `J1(x)`.
pub fn j1(x: f64) -> f64 {
    j0_j1(x).1
}

/// `K0(x)` for `x > 0`.
pub fn k0(x: f64) -> f64 {
    k0_k1_scaled(x).0 * exp(-x)
}

/// `K1(x)` for `x > 0`.
pub fn k1(x: f64) -> f64 {
    k0_k1_scaled(x).1 * exp(-x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::ln;

    // Power series, used as an independent oracle for small arguments.
    fn j_series(n: i32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(n);
        for k in 1..=n {
            term /= k as f64;
        }
        let mut sum = term;
        for m in 1..60 {
            term *= -(x * x / 4.0) / (m as f64 * (m + n) as f64);
            sum += term;
        }
        sum
    }

    fn i_series(n: i32, x: f64) -> f64 {
        let mut term = (x / 2.0).powi(n);
        for k in 1..=n {
            term /= k as f64;
        }
        let mut sum = term;
        for m in 1..80 {
            term *= (x * x / 4.0) / (m as f64 * (m + n) as f64);
            sum += term;
        }
        sum
    }

    fn k0_series(x: f64) -> f64 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut harmonic = 0.0;
        let mut sum = 0.0;
        for m in 1..80 {
            term *= q / (m as f64 * m as f64);
            harmonic += 1.0 / m as f64;
            sum += term * harmonic;
        }
        -(ln(x / 2.0) + EULER) * i_series(0, x) + sum
    }

    #[test]
    fn tabulated_values() {
        // (x, J0, J1, K0, K1)
        let table = [
            (
                0.05,
                0.9993750976494685,
                0.024992188313759704,
                3.1142340294719917,
                19.909674325882506,
            ),
            (
                0.5,
                0.938469807240813,
                0.24226845767487387,
                0.9244190712276656,
                1.6564411200033007,
            ),
            (
                1.0,
                0.7651976865579665,
                0.44005058574493355,
                0.42102443824070823,
                0.6019072301972346,
            ),
            (
                2.0,
                0.22389077914123562,
                0.5767248077568734,
                0.1138938727495334,
                0.13986588181652246,
            ),
            (
                2.4,
                0.002507683297243791,
                0.5201852681819311,
                0.0702173415434159,
                0.08372483875483218,
            ),
            (
                3.7,
                -0.3992302033711912,
                0.05383398774546181,
                0.015630659921626655,
                0.017628035102223265,
            ),
            (
                6.0,
                0.15064525725099695,
                -0.27668385812756563,
                0.0012439943280131234,
                0.001343919717735509,
            ),
        ];
        for (x, tj0, tj1, tk0, tk1) in table {
            let (a, b) = j0_j1(x);
            assert!((a - tj0).abs() < 2e-15, "J0({x})");
            assert!((b - tj1).abs() < 2e-15, "J1({x})");
            assert!((k0(x) / tk0 - 1.0).abs() < 1e-14, "K0({x})");
            assert!((k1(x) / tk1 - 1.0).abs() < 1e-14, "K1({x})");
        }
    }

    #[test]
    fn matches_power_series() {
        for i in 1..=40 {
            let x = 0.1 * i as f64;
            let (a, b) = j0_j1(x);
            assert!((a - j_series(0, x)).abs() < 1e-14);
            assert!((b - j_series(1, x)).abs() < 1e-14);
        }
        for i in 1..=20 {
            let x = 0.1 * i as f64;
            assert!((k0(x) / k0_series(x) - 1.0).abs() < 1e-13, "K0({x})");
        }
    }

    #[test]
    fn k_wronskian() {
        // I0 K1 + I1 K0 = 1/x
        for i in 1..=30 {
            let x = 0.15 * i as f64;
            let w = i_series(0, x) * k1(x) + i_series(1, x) * k0(x);
            assert!((w * x - 1.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn first_zero_of_j0() {
        assert!(j0(2.404_825_557_695_773).abs() < 1e-15);
    }
}
