//! Local polynomial interpolation on sorted, possibly non-uniform nodes.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

/// Order-6 (quintic) Lagrange interpolation using the six nodes nearest the
/// query point. Accurate to `O(h⁶)` for smooth data and needs no end
/// conditions, unlike a natural spline.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPolynomial {
    x: Vec<f64>,
    y: Vec<f64>,
}

const STENCIL: usize = 6;

impl LocalPolynomial {
    /// `x` must be strictly ascending with at least six points.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(invalid("interpolation table", "abscissa and ordinate lengths differ"));
        }
        if x.len() < STENCIL {
            return Err(invalid("interpolation table", "needs at least six samples"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("interpolation table", "abscissae must be strictly ascending"));
        }
        Ok(Self { x, y })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, at: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&at) {
            return Err(Error::Domain {
                quantity: "interpolation abscissa",
                value: at,
                min: lo,
                max: hi,
            });
        }
        let n = self.x.len();
        // index of the first node strictly greater than `at`
        let upper = self.x.partition_point(|&v| v <= at);
        let start = upper.saturating_sub(STENCIL / 2).min(n - STENCIL);
        let xs = &self.x[start..start + STENCIL];
        let ys = &self.y[start..start + STENCIL];
        let mut sum = 0.0;
        for j in 0..STENCIL {
            if at == xs[j] {
                return Ok(ys[j]);
            }
            let mut w = 1.0;
            for m in 0..STENCIL {
                if m != j {
                    w *= (at - xs[m]) / (xs[j] - xs[m]);
                }
            }
            sum += w * ys[j];
        }
        Ok(sum)
    }
}
