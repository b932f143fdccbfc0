//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Brent's method on a sign-changing bracket [a, b].
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !(fa.is_finite() && fb.is_finite()) {
        return Err(Error::NumericalFailure(format!(
            "root not bracketed on [{a}, {b}]"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NumericalFailure("Brent iteration did not converge".into()))
}

/// First sign change of `f` on a uniform scan of [a, b] with `n` cells,
/// refined with [`brent`]. Returns `None` if no sign change is found.
pub fn first_sign_change<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    n: usize,
    xtol: f64,
) -> Result<Option<f64>> {
    let mut x0 = a;
    let mut f0 = f(a);
    if f0 == 0.0 {
        return Ok(Some(a));
    }
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1);
        if f1 == 0.0 {
            return Ok(Some(x1));
        }
        if f1.signum() != f0.signum() {
            return brent(&mut f, x0, x1, xtol).map(Some);
        }
        x0 = x1;
        f0 = f1;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cosine_root() {
        let r = brent(f64::cos, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn unbracketed_is_error() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn scan_finds_first() {
        let r = first_sign_change(f64::sin, 0.5, 10.0, 100, 1e-14).unwrap().unwrap();
        assert!((r - std::f64::consts::PI).abs() < 1e-13);
    }
}
