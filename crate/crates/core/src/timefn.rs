//! Real functions of time used for the Hamiltonian coefficients.
//!
//! Every variant provides its value, first derivative and the integral from
//! zero, which is what the characteristic equation and the gauge factors need.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::numerics::diff::lagrange_d1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeFunction {
    Constant {
        value: f64,
    },
    /// Σ coeffs[i]·tⁱ.
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// offset + amplitude·sin(omega·t + phase).
    Sinusoid {
        offset: f64,
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// scale·exp(rate·t).
    Exponential {
        scale: f64,
        rate: f64,
    },
    Tabulated(Table),
    Sum {
        terms: Vec<TimeFunction>,
    },
}

impl TimeFunction {
    pub const ZERO: TimeFunction = TimeFunction::Constant { value: 0.0 };

    pub fn constant(value: f64) -> Self {
        TimeFunction::Constant { value }
    }

    pub fn linear(c0: f64, c1: f64) -> Self {
        TimeFunction::Polynomial {
            coeffs: vec![c0, c1],
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => *value,
            TimeFunction::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => offset + amplitude * (omega * t + phase).sin(),
            TimeFunction::Exponential { scale, rate } => scale * (rate * t).exp(),
            TimeFunction::Tabulated(tab) => tab.eval(t).0,
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.value(t)).sum(),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { .. } => 0.0,
            TimeFunction::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
            TimeFunction::Sinusoid {
                amplitude,
                omega,
                phase,
                ..
            } => amplitude * omega * (omega * t + phase).cos(),
            TimeFunction::Exponential { scale, rate } => scale * rate * (rate * t).exp(),
            TimeFunction::Tabulated(tab) => tab.eval(t).1,
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.derivative(t)).sum(),
        }
    }

    /// ∫₀ᵗ f(s) ds.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => value * t,
            TimeFunction::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + c / (i + 1) as f64)
                * t,
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => {
                if *omega == 0.0 {
                    (offset + amplitude * phase.sin()) * t
                } else {
                    offset * t + amplitude * (phase.cos() - (omega * t + phase).cos()) / omega
                }
            }
            TimeFunction::Exponential { scale, rate } => {
                if *rate == 0.0 {
                    scale * t
                } else {
                    scale * (rate * t).exp_m1() / rate
                }
            }
            TimeFunction::Tabulated(tab) => tab.integral(t),
            TimeFunction::Sum { terms } => terms.iter().map(|f| f.integral(t)).sum(),
        }
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        match self {
            TimeFunction::Constant { value } => *value == 0.0,
            TimeFunction::Polynomial { coeffs } => coeffs.iter().all(|c| *c == 0.0),
            TimeFunction::Sinusoid {
                offset, amplitude, ..
            } => *offset == 0.0 && *amplitude == 0.0,
            TimeFunction::Exponential { scale, .. } => *scale == 0.0,
            TimeFunction::Tabulated(tab) => tab.v.iter().all(|v| *v == 0.0),
            TimeFunction::Sum { terms } => terms.iter().all(|f| f.is_zero()),
        }
    }

    /// `factor · f`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            TimeFunction::Constant { value } => TimeFunction::Constant {
                value: value * factor,
            },
            TimeFunction::Polynomial { coeffs } => TimeFunction::Polynomial {
                coeffs: coeffs.iter().map(|c| c * factor).collect(),
            },
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => TimeFunction::Sinusoid {
                offset: offset * factor,
                amplitude: amplitude * factor,
                omega: *omega,
                phase: *phase,
            },
            TimeFunction::Exponential { scale, rate } => TimeFunction::Exponential {
                scale: scale * factor,
                rate: *rate,
            },
            TimeFunction::Tabulated(tab) => TimeFunction::Tabulated(Table::new(
                tab.t.clone(),
                tab.v.iter().map(|v| v * factor).collect(),
            )
            .expect("scaling preserves table validity")),
            TimeFunction::Sum { terms } => TimeFunction::Sum {
                terms: terms.iter().map(|f| f.scaled(factor)).collect(),
            },
        }
    }

    /// `t ↦ f(s·t)` for s > 0.
    pub fn time_scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::Domain(format!("time scale must be positive, got {s}")));
        }
        Ok(match self {
            TimeFunction::Constant { .. } => self.clone(),
            TimeFunction::Polynomial { coeffs } => TimeFunction::Polynomial {
                coeffs: coeffs.iter().enumerate().map(|(i, c)| c * s.powi(i as i32)).collect(),
            },
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => TimeFunction::Sinusoid {
                offset: *offset,
                amplitude: *amplitude,
                omega: omega * s,
                phase: *phase,
            },
            TimeFunction::Exponential { scale, rate } => TimeFunction::Exponential {
                scale: *scale,
                rate: rate * s,
            },
            TimeFunction::Tabulated(tab) => TimeFunction::Tabulated(Table::new(
                tab.t.iter().map(|t| t / s).collect(),
                tab.v.clone(),
            )?),
            TimeFunction::Sum { terms } => TimeFunction::Sum {
                terms: terms.iter().map(|f| f.time_scaled(s)).collect::<Result<_>>()?,
            },
        })
    }

    /// Interval on which the function is defined, if bounded.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            TimeFunction::Tabulated(tab) => Some((tab.t[0], tab.t[tab.t.len() - 1])),
            TimeFunction::Sum { terms } => terms
                .iter()
                .filter_map(|f| f.domain())
                .reduce(|x, y| (x.0.max(y.0), x.1.min(y.1))),
            _ => None,
        }
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        let finite = match self {
            TimeFunction::Constant { value } => value.is_finite(),
            TimeFunction::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            TimeFunction::Sinusoid {
                offset,
                amplitude,
                omega,
                phase,
            } => [offset, amplitude, omega, phase].iter().all(|v| v.is_finite()),
            TimeFunction::Exponential { scale, rate } => scale.is_finite() && rate.is_finite(),
            TimeFunction::Tabulated(_) => true,
            TimeFunction::Sum { terms } => {
                for f in terms {
                    f.validate(what)?;
                }
                true
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::Config(format!("coefficient `{what}` has non-finite parameters")))
        }
    }
}

/// Tabulated samples with C¹ piecewise-cubic Hermite interpolation.
///
/// Node slopes come from five-point Lagrange differentiation (fourth order,
/// one-sided near the ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableSpec", into = "TableSpec")]
pub struct Table {
    t: Vec<f64>,
    v: Vec<f64>,
    slope: Vec<f64>,
    cumulative: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TableSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    file: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    v: Vec<f64>,
}

impl TryFrom<TableSpec> for Table {
    type Error = Error;

    fn try_from(spec: TableSpec) -> Result<Self> {
        match spec.file {
            Some(path) => Table::from_file(path),
            None => Table::new(spec.t, spec.v),
        }
    }
}

impl From<Table> for TableSpec {
    fn from(tab: Table) -> Self {
        TableSpec {
            file: None,
            t: tab.t,
            v: tab.v,
        }
    }
}

impl Table {
    pub fn new(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::Config(
                "tabulated function needs at least two (t, value) pairs".into(),
            ));
        }
        if t.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::Config("tabulated function has non-finite entries".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "tabulated times must be strictly increasing".into(),
            ));
        }
        let n = t.len();
        let w = n.min(5);
        let slope: Vec<f64> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(w / 2).min(n - w);
                lagrange_d1(&t[lo..lo + w], &v[lo..lo + w], t[i])
            })
            .collect();
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let h = t[i] - t[i - 1];
            cumulative[i] = cumulative[i - 1]
                + h * (0.5 * (v[i - 1] + v[i]) + h * (slope[i - 1] - slope[i]) / 12.0);
        }
        let mut tab = Table {
            t,
            v,
            slope,
            cumulative,
        };
        // Re-anchor the running integral at t = 0 when 0 lies in the table.
        let zero = if tab.t[0] <= 0.0 && 0.0 <= tab.t[n - 1] {
            tab.integral_from_start(0.0)
        } else {
            0.0
        };
        tab.cumulative.iter_mut().for_each(|c| *c -= zero);
        Ok(tab)
    }

    /// Reads whitespace-separated `t value` rows; `#` starts a comment.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (mut t, mut v) = (Vec::new(), Vec::new());
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!("{}:{}: cannot parse `{s}`", path.display(), lineno + 1))
                })
            };
            if cols.len() != 2 {
                return Err(Error::Config(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            t.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        Table::new(t, v)
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.t.len();
        self.t.partition_point(|&v| v <= x).clamp(1, n - 1) - 1
    }

    /// Value and slope; outside the table the end segments are extrapolated.
    fn eval(&self, x: f64) -> (f64, f64) {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let val = v0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + m0 * (s3 - 2.0 * s2 + s)
            + v1 * (3.0 * s2 - 2.0 * s3)
            + m1 * (s3 - s2);
        let der = (v0 * (6.0 * s2 - 6.0 * s) + m0 * (3.0 * s2 - 4.0 * s + 1.0)
            + v1 * (6.0 * s - 6.0 * s2)
            + m1 * (3.0 * s2 - 2.0 * s))
            / h;
        (val, der)
    }

    fn integral_from_start(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = (x - self.t[i]) / h;
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let (v0, v1) = (self.v[i], self.v[i + 1]);
        let (m0, m1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let partial = v0 * (s - s3 + 0.5 * s4)
            + m0 * (0.5 * s2 - 2.0 * s3 / 3.0 + 0.25 * s4)
            + v1 * (s3 - 0.5 * s4)
            + m1 * (0.25 * s4 - s3 / 3.0);
        self.cumulative[i] + h * partial
    }

    fn integral(&self, x: f64) -> f64 {
        self.integral_from_start(x)
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_are_consistent() {
        let fs = [
            TimeFunction::constant(2.5),
            TimeFunction::Polynomial {
                coeffs: vec![1.0, -2.0, 0.5, 0.25],
            },
            TimeFunction::Sinusoid {
                offset: 1.0,
                amplitude: 0.3,
                omega: 2.0,
                phase: 0.4,
            },
            TimeFunction::Exponential {
                scale: 0.7,
                rate: -0.3,
            },
            TimeFunction::Sum {
                terms: vec![TimeFunction::constant(1.0), TimeFunction::linear(0.0, 2.0)],
            },
        ];
        for f in &fs {
            for &t in &[0.0, 0.4, 1.7] {
                let h = 1e-4;
                let fd = (f.value(t + h) - f.value(t - h)) / (2.0 * h);
                assert!((fd - f.derivative(t)).abs() < 1e-7, "{f:?}");
                let fi = (f.integral(t + h) - f.integral(t - h)) / (2.0 * h);
                assert!((fi - f.value(t)).abs() < 1e-7, "{f:?}");
            }
            assert_eq!(f.integral(0.0), 0.0);
        }
    }

    #[test]
    fn table_tracks_smooth_function() {
        let t: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
        let v: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let f = TimeFunction::Tabulated(Table::new(t, v).unwrap());
        for &x in &[0.0, 0.013, 3.3, 9.99, 10.0] {
            assert!((f.value(x) - x.sin()).abs() < 1e-6);
            assert!((f.derivative(x) - x.cos()).abs() < 1e-5);
            assert!((f.integral(x) - (1.0 - x.cos())).abs() < 1e-6);
        }
        assert_eq!(f.domain(), Some((0.0, 10.0)));
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(Table::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Table::new(vec![0.0], vec![1.0]).is_err());
        assert!(Table::new(vec![0.0, 1.0], vec![f64::NAN, 2.0]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let f = TimeFunction::Sinusoid {
            offset: 1.0,
            amplitude: 0.1,
            omega: 1.0,
            phase: 0.0,
        };
        let s = toml::to_string(&f).unwrap();
        let g: TimeFunction = toml::from_str(&s).unwrap();
        assert_eq!(f, g);
        let tab: TimeFunction = toml::from_str("kind = \"tabulated\"\nt = [0.0, 1.0, 2.0]\nv = [1.0, 2.0, 3.0]").unwrap();
        assert!((tab.value(1.5) - 2.5).abs() < 1e-12);
    }
}
