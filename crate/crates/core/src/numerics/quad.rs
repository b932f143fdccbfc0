//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// True when `error` is at the roundoff floor and splitting cannot help.
    at_floor: bool,
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut kabs = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (fl, fr) = (f(c - dx), f(c + dx));
        k += WGK[j] * (fl + fr);
        kabs += WGK[j] * (fl.abs() + fr.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (fl + fr);
        }
    }
    let error = ((k - g) * h).abs();
    let floor = 50.0 * f64::EPSILON * (kabs * h).abs();
    Segment {
        a,
        b,
        value: k * h,
        error: error.max(floor),
        at_floor: error <= floor,
    }
}

/// Single 15-point Kronrod rule on [a, b]: (estimate, |K15 − G7|).
///
/// Non-adaptive, hence a smooth function of the limits; used where the
/// integral itself is integrated again.
pub fn kronrod15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> (f64, f64) {
    let s = kronrod(&mut f, a, b);
    (s.value, s.error)
}

/// ∫ₐᵇ f over the given break points (sorted, first and last are the limits).
pub fn gauss_kronrod_with_breaks<F>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let mut segs: Vec<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] != w[0])
        .map(|w| kronrod(&mut f, w[0], w[1]))
        .collect();
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NumericalFailure("non-finite integrand".into()));
        }
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok(total);
        }
        if segs.len() >= opts.max_intervals {
            return Err(Error::NumericalFailure(format!(
                "quadrature did not converge: error estimate {err:e} after {} intervals",
                segs.len()
            )));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        if segs[worst].at_floor {
            // The largest remaining error is roundoff; refinement cannot help.
            return Ok(total);
        }
        let s = segs.swap_remove(worst);
        let m = 0.5 * (s.a + s.b);
        if m <= s.a.min(s.b) || m >= s.a.max(s.b) {
            return Ok(total);
        }
        segs.push(kronrod(&mut f, s.a, m));
        segs.push(kronrod(&mut f, m, s.b));
    }
}

/// ∫ₐᵇ f(x) dx.
pub fn gauss_kronrod<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<f64> {
    gauss_kronrod_with_breaks(f, &[a, b], opts)
}
