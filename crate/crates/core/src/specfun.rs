//! Special functions needed by the solution formulas.
//!
//! * complete elliptic integral K(k) by the arithmetic-geometric mean,
//! * Jacobi sn, cn, dn by descending Landen transformation (AGM with
//!   backward phase recurrence),
//! * Airy Ai and Ai' by Maclaurin/Taylor series near the origin and
//!   asymptotic expansions for large |x|,
//! * log-Gamma for complex arguments (used for the Painlevé-II phase constant).
//!
//! Every elliptic routine takes the *modulus* k, not the parameter m = k².

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{ensure_finite, Error, Result};

/// Elliptic modulus k with 0 ≤ k ≤ 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || !(0.0..=1.0).contains(&k) {
            return Err(Error::Domain(format!(
                "elliptic modulus must lie in [0, 1], got {k}"
            )));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Complementary modulus k' = sqrt(1 - k²), computed without cancellation.
    #[inline]
    pub fn complementary(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// The triple (sn, cn, dn) at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind, K(k) = π / (2 AGM(1, k')).
pub fn complete_elliptic_k(k: EllipticModulus) -> Result<f64> {
    if k.value() >= 1.0 {
        return Err(Error::Domain(
            "K(k) diverges logarithmically at k = 1".into(),
        ));
    }
    let (mut a, mut b) = (1.0_f64, k.complementary());
    for _ in 0..AGM_MAX_ITER {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(PI / (2.0 * a))
}

/// Jacobi elliptic functions sn(u, k), cn(u, k), dn(u, k) for real u.
pub fn jacobi_elliptic(u: f64, k: EllipticModulus) -> Result<JacobiTriple> {
    ensure_finite("u", u)?;
    let kv = k.value();
    if kv == 0.0 {
        let (s, c) = u.sin_cos();
        return Ok(JacobiTriple { sn: s, cn: c, dn: 1.0 });
    }
    if kv == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(JacobiTriple {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        });
    }

    // Descending AGM: ratios c_n / a_n are kept for the backward sweep.
    let mut ratios = [0.0_f64; AGM_MAX_ITER];
    let (mut a, mut b, mut c) = (1.0_f64, k.complementary(), kv);
    let mut n = 0;
    while c.abs() > f64::EPSILON * a && n < AGM_MAX_ITER - 1 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        n += 1;
        ratios[n] = c / a;
    }
    let mut phi = (1u64 << n) as f64 * a * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (ratios[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn > 0 for real u.
    let dn = (1.0 - kv * kv * sn * sn).max(0.0).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}

// ---------------------------------------------------------------------------
// Airy function
// ---------------------------------------------------------------------------

/// Ai(0) = 1 / (3^{2/3} Γ(2/3)).
pub const AIRY_AI_0: f64 = 0.355_028_053_887_817_2;
/// Ai'(0) = -1 / (3^{1/3} Γ(1/3)).
pub const AIRY_AIP_0: f64 = -0.258_819_403_792_806_8;

/// For x at or above this value Ai uses the decaying asymptotic expansion.
/// At x = 9 the smallest term of the expansion is ~e^{-36}.
pub const AIRY_ASYMPTOTIC_POS: f64 = 9.0;
/// For x at or below this value Ai uses the oscillatory asymptotic expansion.
pub const AIRY_ASYMPTOTIC_NEG: f64 = -9.0;
/// Forward Taylor continuation from the origin is used up to this x > 0;
/// beyond it the recessive solution is continued backwards from
/// [`AIRY_ASYMPTOTIC_POS`], which is the numerically stable direction.
pub const AIRY_SERIES_POS: f64 = 2.0;

const TAYLOR_MAX_STEP: f64 = 1.0;

/// Ai(x).
pub fn airy_ai(x: f64) -> Result<f64> {
    airy_ai_with_derivative(x).map(|(ai, _)| ai)
}

/// (Ai(x), Ai'(x)).
pub fn airy_ai_with_derivative(x: f64) -> Result<(f64, f64)> {
    ensure_finite("x", x)?;
    if x >= AIRY_ASYMPTOTIC_POS {
        Ok(airy_asymptotic_pos(x))
    } else if x <= AIRY_ASYMPTOTIC_NEG {
        Ok(airy_asymptotic_neg(-x))
    } else if x > AIRY_SERIES_POS {
        let (w, wp) = airy_asymptotic_pos(AIRY_ASYMPTOTIC_POS);
        Ok(airy_continue(AIRY_ASYMPTOTIC_POS, w, wp, x))
    } else {
        Ok(airy_continue(0.0, AIRY_AI_0, AIRY_AIP_0, x))
    }
}

/// Continues a solution of w'' = x w from `x0` to `x1` by Taylor steps.
fn airy_continue(x0: f64, mut w: f64, mut wp: f64, x1: f64) -> (f64, f64) {
    let span = x1 - x0;
    let steps = (span.abs() / TAYLOR_MAX_STEP).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut x = x0;
    for _ in 0..steps {
        (w, wp) = airy_taylor_step(x, w, wp, h);
        x += h;
    }
    (w, wp)
}

/// One Taylor step of w'' = x w about `x0`; the coefficients obey
/// j (j-1) c_j = x0 c_{j-2} + c_{j-3}.
fn airy_taylor_step(x0: f64, w: f64, wp: f64, h: f64) -> (f64, f64) {
    let (mut c3, mut c2, mut c1) = (0.0, w, wp); // c_{j-3}, c_{j-2}, c_{j-1}
    let mut val = w + wp * h;
    let mut der = wp;
    let mut hpow = h; // h^{j-1}
    let mut small = 0;
    for j in 2..400 {
        let jf = j as f64;
        let cj = (x0 * c2 + c3) / (jf * (jf - 1.0));
        let dterm = jf * cj * hpow;
        hpow *= h;
        let vterm = cj * hpow;
        val += vterm;
        der += dterm;
        c3 = c2;
        c2 = c1;
        c1 = cj;
        if vterm.abs() <= 1e-18 * val.abs() && dterm.abs() <= 1e-18 * der.abs() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (val, der)
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions, up to `n` terms.
fn airy_asymptotic_coeffs(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    u.push(1.0);
    v.push(1.0);
    for k in 1..n {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

/// Sums Σ (-1)^k c_k ζ^{-k} over indices `start, start+step, ...`,
/// truncating at the smallest term.
fn truncated_sum(c: &[f64], zeta: f64, start: usize, step: usize) -> f64 {
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut sign = 1.0;
    let mut idx = start;
    while idx < c.len() {
        let term = c[idx] / zeta.powi(idx as i32);
        if term.abs() > prev {
            break;
        }
        sum += sign * term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        prev = term.abs();
        sign = -sign;
        idx += step;
    }
    sum
}

fn airy_asymptotic_pos(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (u, v) = airy_asymptotic_coeffs(80);
    let q = x.powf(0.25);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let ai = e / q * truncated_sum(&u, zeta, 0, 1);
    let aip = -e * q * truncated_sum(&v, zeta, 0, 1);
    (ai, aip)
}

/// Ai(-z), Ai'(-z) for large z > 0.
fn airy_asymptotic_neg(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let (u, v) = airy_asymptotic_coeffs(80);
    let q = z.powf(0.25);
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let ue = truncated_sum(&u, zeta, 0, 2);
    let uo = truncated_sum(&u, zeta, 1, 2);
    let ve = truncated_sum(&v, zeta, 0, 2);
    let vo = truncated_sum(&v, zeta, 1, 2);
    let rp = 1.0 / PI.sqrt();
    let ai = rp / q * (c * ue + s * uo);
    let aip = rp * q * (s * ve - c * vo);
    (ai, aip)
}

// ---------------------------------------------------------------------------
// Gamma function
// ---------------------------------------------------------------------------

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z) for complex z (Lanczos, reflection for Re z < 1/2).
///
/// The imaginary part is continuous along paths that avoid the poles, which
/// is what the phase constant of the nonlinear Airy asymptotics needs.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1-z) = π / sin(πz)
        let s = (Complex64::new(PI, 0.0) * z).sin();
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &p) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Phase of Γ(1 + i y) (continuous in y).
pub fn arg_gamma_one_plus_iy(y: f64) -> f64 {
    ln_gamma_complex(Complex64::new(1.0, y)).im
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn m(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(1.1).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        assert!(EllipticModulus::new(1.0).is_ok());
    }

    #[test]
    fn k_at_zero_is_half_pi() {
        assert_abs_diff_eq!(complete_elliptic_k(m(0.0)).unwrap(), FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn k_diverges_at_one() {
        assert!(matches!(complete_elliptic_k(m(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_moduli() {
        for &u in &[-3.0, -0.2, 0.0, 0.7, 5.5] {
            let t = jacobi_elliptic(u, m(0.0)).unwrap();
            assert_abs_diff_eq!(t.sn, f64::sin(u), epsilon = 1e-15);
            assert_abs_diff_eq!(t.cn, f64::cos(u), epsilon = 1e-15);
            assert_eq!(t.dn, 1.0);
            let t = jacobi_elliptic(u, m(1.0)).unwrap();
            assert_abs_diff_eq!(t.sn, u.tanh(), epsilon = 1e-15);
            assert_abs_diff_eq!(t.cn, 1.0 / u.cosh(), epsilon = 1e-15);
            assert_abs_diff_eq!(t.dn, 1.0 / u.cosh(), epsilon = 1e-15);
        }
    }

    #[test]
    fn near_unit_modulus_approaches_hyperbolic() {
        let t = jacobi_elliptic(1.3, m(1.0 - 1e-14)).unwrap();
        assert_abs_diff_eq!(t.sn, 1.3_f64.tanh(), epsilon = 1e-10);
        assert_abs_diff_eq!(t.cn, 1.0 / 1.3_f64.cosh(), epsilon = 1e-10);
    }

    #[test]
    fn non_finite_argument_rejected() {
        assert!(jacobi_elliptic(f64::INFINITY, m(0.3)).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }

    #[test]
    fn airy_decays() {
        let v = airy_ai(10.0).unwrap();
        assert!(v > 0.0 && v < 1e-9);
    }

    #[test]
    fn airy_pieces_join_continuously() {
        for &x in &[AIRY_SERIES_POS, AIRY_ASYMPTOTIC_POS, AIRY_ASYMPTOTIC_NEG] {
            let (l, lp) = airy_ai_with_derivative(x - 1e-9).unwrap();
            let (r, rp) = airy_ai_with_derivative(x + 1e-9).unwrap();
            // Remove the first-order change across the 2e-9 gap.
            let jump = r - (l + 2e-9 * lp);
            let jump_p = rp - (lp + 2e-9 * x * l);
            assert!(jump.abs() / l.abs().max(lp.abs()) < 1e-11, "Ai jump at {x}");
            assert!(jump_p.abs() / lp.abs() < 1e-11, "Ai' jump at {x}");
        }
    }

    #[test]
    fn arg_gamma_matches_series() {
        // arg Γ(1+iy) = -γ y + Σ_{n≥1} (y/n - atan(y/n))
        let euler = 0.577_215_664_901_532_9;
        for &y in &[-0.7, -0.05, 0.1, 0.3, 1.2] {
            // Summed smallest-first so the tail is not absorbed by rounding.
            let tail: f64 = (1..2_000_000)
                .rev()
                .map(|n| {
                    let q = y / n as f64;
                    q - q.atan()
                })
                .sum();
            assert_abs_diff_eq!(arg_gamma_one_plus_iy(y), tail - euler * y, epsilon = 1e-12);
        }
    }

    #[test]
    fn ln_gamma_real_values() {
        // Γ(5) = 24, Γ(1/2) = sqrt(pi)
        assert_abs_diff_eq!(ln_gamma_complex(Complex64::new(5.0, 0.0)).re, 24f64.ln(), epsilon = 1e-13);
        assert_abs_diff_eq!(
            ln_gamma_complex(Complex64::new(0.5, 0.0)).re,
            0.5 * PI.ln(),
            epsilon = 1e-13
        );
        // reflection branch
        assert_abs_diff_eq!(
            ln_gamma_complex(Complex64::new(-0.5, 0.0)).re,
            (2.0 * PI.sqrt()).ln(),
            epsilon = 1e-13
        );
    }
}
