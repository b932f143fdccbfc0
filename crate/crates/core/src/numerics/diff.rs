//! Fourth-order finite-difference stencils.

use std::ops::{Add, Mul, Sub};

/// f′(x) from the five-point central stencil.
pub fn d1<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let (m2, m1, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
    ((m2 - p2) + (p1 - m1) * 8.0) * (1.0 / (12.0 * h))
}

/// f″(x) from the five-point central stencil.
pub fn d2<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h), f(x - h), f(x), f(x + h), f(x + 2.0 * h));
    ((m1 + p1) * 16.0 - (m2 + p2) - c * 30.0) * (1.0 / (12.0 * h * h))
}

/// Derivative of uniformly sampled data, fourth order everywhere.
///
/// Interior points use the central stencil; the two outermost points on each
/// side use one-sided five-point closures.
pub fn d1_uniform(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    assert!(n >= 5, "need at least five samples");
    let s = 1.0 / (12.0 * h);
    (0..n)
        .map(|i| match i {
            0 => (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s,
            1 => (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s,
            i if i == n - 2 => {
                (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] + 6.0 * y[n - 4] - y[n - 5]) * s
            }
            i if i == n - 1 => {
                (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] - 16.0 * y[n - 4] + 3.0 * y[n - 5])
                    * s
            }
            _ => (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) * s,
        })
        .collect()
}

/// Derivative at `x[i]` of the Lagrange polynomial through the given nodes.
pub fn lagrange_d1(x: &[f64], y: &[f64], at: f64) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for j in 0..n {
        // d/dx of the j-th basis polynomial.
        let mut denom = 1.0;
        for m in 0..n {
            if m != j {
                denom *= x[j] - x[m];
            }
        }
        let mut num = 0.0;
        for i in 0..n {
            if i == j {
                continue;
            }
            let mut p = 1.0;
            for (m, xm) in x.iter().enumerate().take(n) {
                if m != j && m != i {
                    p *= at - xm;
                }
            }
            num += p;
        }
        acc += y[j] * num / denom;
    }
    acc
}
