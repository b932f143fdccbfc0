//! Piecewise quintic Hermite interpolation from values, first and second
//! derivatives at the nodes.
//!
//! Second-order ODEs supply all three at every accepted step for free, and
//! the interpolant is then C² with O(h⁶) error (O(h⁵) for the derivative).

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct QuinticHermite {
    t: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
    ddy: Vec<f64>,
}

impl QuinticHermite {
    /// Nodes must be strictly increasing.
    pub fn new(t: Vec<f64>, y: Vec<f64>, dy: Vec<f64>, ddy: Vec<f64>) -> Result<Self> {
        let n = t.len();
        if n < 2 || y.len() != n || dy.len() != n || ddy.len() != n {
            return Err(Error::NumericalFailure(
                "Hermite interpolant needs at least two nodes with matching data".into(),
            ));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::NumericalFailure(
                "Hermite nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { t, y, dy, ddy })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.t
    }

    fn locate(&self, x: f64) -> usize {
        let n = self.t.len();
        let i = self.t.partition_point(|&v| v <= x);
        i.clamp(1, n - 1) - 1
    }

    pub fn contains(&self, x: f64) -> bool {
        let (a, b) = self.domain();
        let tol = 1e-12 * (b - a).abs().max(1.0);
        x >= a - tol && x <= b + tol
    }

    /// Value, first and second derivative at `x` (clamped to the segment
    /// nearest to `x`; callers check [`contains`](Self::contains)).
    pub fn eval3(&self, x: f64) -> (f64, f64, f64) {
        let i = self.locate(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (s4, s5) = (s3 * s, s3 * s2);

        let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
        let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
        let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
        let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
        let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
        let h5 = 0.5 * (s3 - 2.0 * s4 + s5);

        let d0 = -30.0 * s2 + 60.0 * s3 - 30.0 * s4;
        let d1 = 1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4;
        let d2 = 0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4);
        let d3 = -d0;
        let d4 = -12.0 * s2 + 28.0 * s3 - 15.0 * s4;
        let d5 = 0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4);

        let e0 = -60.0 * s + 180.0 * s2 - 120.0 * s3;
        let e1 = -36.0 * s + 96.0 * s2 - 60.0 * s3;
        let e2 = 0.5 * (2.0 - 18.0 * s + 36.0 * s2 - 20.0 * s3);
        let e3 = -e0;
        let e4 = -24.0 * s + 84.0 * s2 - 60.0 * s3;
        let e5 = 0.5 * (6.0 * s - 24.0 * s2 + 20.0 * s3);

        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (v0, v1) = (self.dy[i] * h, self.dy[i + 1] * h);
        let (a0, a1) = (self.ddy[i] * h * h, self.ddy[i + 1] * h * h);

        let val = y0 * h0 + v0 * h1 + a0 * h2 + y1 * h3 + v1 * h4 + a1 * h5;
        let der = (y0 * d0 + v0 * d1 + a0 * d2 + y1 * d3 + v1 * d4 + a1 * d5) / h;
        let sec = (y0 * e0 + v0 * e1 + a0 * e2 + y1 * e3 + v1 * e4 + a1 * e5) / (h * h);
        (val, der, sec)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval3(x).0
    }
}
