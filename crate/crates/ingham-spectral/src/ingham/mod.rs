//! Decay moduli θ, Ingham's box-product construction, Paley–Wiener transfer,
//! and Carleman / moment diagnostics.
//!
//! A compactly supported function can have transform decay e^{-|ξ|θ(|ξ|)}
//! exactly when ∫₁^∞ θ(t)/t dt < ∞. [`classify_theta`] decides the integral
//! numerically; the box construction realizes the convergent side.

mod audit;
mod boxes;
mod carleman;

pub(crate) use audit::{assemble as assemble_audit, check_vanishing, envelope_ratio, sample_points};
pub use audit::{envelope_grid, envelope_power_norms, envelope_window, AuditReport, AuditRow, PowerRow, AUDIT_M_MAX};
pub use boxes::{
    construct_box_product, construct_box_product_with, envelope_constant, transfer_via_paley_wiener, BoxProduct,
    Construction, EnvelopeReport, EnvelopeRow, SupportReport, Transfer, DEFAULT_CALIBRATION, TRANSFER_TAIL_LIMIT,
};
pub use carleman::{
    carleman_verdict, carleman_verdict_log, moment_report, CarlemanReport, CarlemanVerdict, MomentBound, MomentReport,
};

use std::f64::consts::{E, LN_2};
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::gauss::gauss_legendre;

/// Horizon used when no t_max is given.
pub const DEFAULT_T_MAX: f64 = 1e300;

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    InvSqrt,
    InvLog,
    LogLog,
    Zero,
    Table(Vec<(f64, f64)>),
}

/// A nonnegative, nonincreasing decay modulus on [0, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec {
    shape: Shape,
    scale: f64,
}

/// Names accepted by [`ThetaSpec::builtin`].
pub const BUILTIN_THETAS: [&str; 4] = ["inv-sqrt", "inv-log", "log-log", "zero"];

impl ThetaSpec {
    /// inv-sqrt (1+t)^{-1/2}, inv-log 1/log(e+t),
    /// log-log 1/(log(e+t) log log(e^e+t)), zero.
    pub fn builtin(name: &str) -> Result<Self> {
        let shape = match name {
            "inv-sqrt" => Shape::InvSqrt,
            "inv-log" => Shape::InvLog,
            "log-log" => Shape::LogLog,
            "zero" => Shape::Zero,
            _ => {
                return Err(Error::Domain(format!(
                    "unknown theta '{name}', expected one of {}",
                    BUILTIN_THETAS.join(", ")
                )))
            }
        };
        Ok(Self { shape, scale: 1.0 })
    }

    /// Multiplies θ by c > 0.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("theta scale must be positive, got {c}")));
        }
        self.scale *= c;
        Ok(self)
    }

    /// Piecewise-linear table in t, extended past the last node by the
    /// power law through the last two nodes.
    pub fn from_table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("theta table needs at least two rows".into()));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Domain(format!("duplicate t = {} in theta table", w[0].0)));
            }
        }
        let spec = Self { shape: Shape::Table(points), scale: 1.0 };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses `t,theta` rows; blank lines, `#` comments and one header line
    /// are skipped. Errors carry the offending line number.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        let mut first = true;
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            if rec.iter().all(str::is_empty) {
                continue;
            }
            if rec.len() != 2 {
                return Err(Error::Parse { line, message: format!("expected 2 columns, found {}", rec.len()) });
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(t), Ok(v)) => {
                    if !(t >= 0.0 && t.is_finite()) || !(v >= 0.0 && v.is_finite()) {
                        return Err(Error::Parse {
                            line,
                            message: format!("need t >= 0 and theta >= 0, got ({t}, {v})"),
                        });
                    }
                    points.push((t, v));
                }
                _ if first => {}
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("not a number pair: '{}', '{}'", &rec[0], &rec[1]),
                    })
                }
            }
            first = false;
        }
        if points.len() < 2 {
            return Err(Error::Parse { line: 0, message: "theta table needs at least two rows".into() });
        }
        Self::from_table(points)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let v = match &self.shape {
            Shape::InvSqrt => 1.0 / (1.0 + t).sqrt(),
            Shape::InvLog => 1.0 / (E + t).ln(),
            Shape::LogLog => 1.0 / ((E + t).ln() * (E.exp() + t).ln().ln()),
            Shape::Zero => 0.0,
            Shape::Table(pts) => table_eval(pts, t),
        };
        self.scale * v
    }

    pub fn name(&self) -> String {
        let base = match &self.shape {
            Shape::InvSqrt => "inv-sqrt".to_string(),
            Shape::InvLog => "inv-log".to_string(),
            Shape::LogLog => "log-log".to_string(),
            Shape::Zero => "zero".to_string(),
            Shape::Table(p) => format!("table[{}]", p.len()),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// Monotone, nonnegative, and decaying on a geometric sample.
    pub fn validate(&self) -> Result<()> {
        let mut ts: Vec<f64> = std::iter::once(0.0).chain((-12..=1200).map(|k| 10f64.powf(k as f64 / 4.0))).collect();
        if let Shape::Table(pts) = &self.shape {
            ts.extend(pts.iter().map(|p| p.0));
            ts.sort_by(f64::total_cmp);
        }
        let mut prev = f64::INFINITY;
        for &t in &ts {
            let v = self.eval(t);
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Invariant(format!("theta({t}) = {v} is not a nonnegative number")));
            }
            if v > prev * (1.0 + 1e-12) {
                return Err(Error::NonMonotone(format!("theta increases near t = {t:e}")));
            }
            prev = v;
        }
        let mid = self.eval(1e100);
        if mid > 0.0 && self.eval(1e300) > 0.9 * mid {
            return Err(Error::Invariant("theta does not decay towards 0".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn table_eval(pts: &[(f64, f64)], t: f64) -> f64 {
    let (t0, v0) = pts[0];
    if t <= t0 {
        return v0;
    }
    let n = pts.len();
    let (ta, va) = pts[n - 2];
    let (tb, vb) = pts[n - 1];
    if t >= tb {
        if vb == 0.0 || va == 0.0 || ta == 0.0 {
            return if vb == 0.0 { 0.0 } else { vb };
        }
        let slope = (vb / va).ln() / (tb / ta).ln();
        return vb * (t / tb).powf(slope.min(0.0));
    }
    let k = pts.partition_point(|p| p.0 <= t);
    let (x0, y0) = pts[k - 1];
    let (x1, y1) = pts[k];
    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
}

/// Outcome of the log-integral test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaClass {
    Divergent,
    Convergent,
    Undetermined,
}

impl fmt::Display for ThetaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaClass::Divergent => "divergent",
            ThetaClass::Convergent => "convergent",
            ThetaClass::Undetermined => "undetermined",
        })
    }
}

/// Classification plus the dyadic partial-integral trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaClassification {
    pub verdict: ThetaClass,
    /// (T, ∫₁^T θ(t)/t dt) at T = 2^k.
    pub trace: Vec<(f64, f64)>,
    /// Fitted block decay b_k ≈ k^{-p} (log k)^{-q}.
    pub p: f64,
    pub q: f64,
    /// Extrapolated ∫₁^∞ on the convergent side.
    pub extrapolated: Option<f64>,
}

const MIN_BLOCKS: usize = 16;
const P_BAND: f64 = 0.05;
const Q_DIVERGENT: f64 = 1.2;
const Q_CONVERGENT: f64 = 1.5;

/// Dyadic blocks b_k = ∫_{2^{k-1}}^{2^k} θ(t)/t dt up to t_max, fitted to
/// k^{-p}(log k)^{-q} by two secants. Σ b_k converges iff p > 1, or p = 1
/// and q > 1; the band around that boundary is reported as undetermined.
/// Geometric decay of the blocks (θ a power of t) is convergent outright.
pub fn classify_theta(theta: &ThetaSpec, t_max: f64) -> Result<ThetaClassification> {
    theta.validate()?;
    let k_max = t_max.log2().floor();
    if !(k_max >= MIN_BLOCKS as f64) {
        return Err(Error::Domain(format!("t_max = {t_max} gives fewer than {MIN_BLOCKS} dyadic blocks")));
    }
    let k_max = k_max.min(1020.0) as usize;
    let rule = gauss_legendre(16);
    let half = 0.5 * LN_2;
    let blocks: Vec<f64> = (1..=k_max)
        .map(|k| {
            let mid = (k as f64 - 0.5) * LN_2;
            rule.nodes.iter().zip(&rule.weights).map(|(x, w)| w * theta.eval((mid + half * x).exp())).sum::<f64>()
                * half
        })
        .collect();
    let mut acc = 0.0;
    let trace: Vec<(f64, f64)> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            acc += b;
            (2f64.powi(i as i32 + 1), acc)
        })
        .collect();
    let total = acc;
    let idx = [k_max / 4, k_max / 2, k_max];
    let b: Vec<f64> = idx.iter().map(|&k| blocks[k - 1]).collect();
    let lk: Vec<f64> = idx.iter().map(|&k| (k as f64 - 0.5).ln()).collect();
    let lb_last = *blocks.last().unwrap();

    if total == 0.0 || lb_last == 0.0 {
        let verdict = ThetaClass::Convergent;
        return Ok(ThetaClassification { verdict, trace, p: f64::INFINITY, q: 0.0, extrapolated: Some(total) });
    }
    let s1 = -(b[1] / b[0]).ln() / (lk[1] - lk[0]);
    let s2 = -(b[2] / b[1]).ln() / (lk[2] - lk[1]);
    let l1 = (lk[1].ln() - lk[0].ln()) / (lk[1] - lk[0]);
    let l2 = (lk[2].ln() - lk[1].ln()) / (lk[2] - lk[1]);
    let q = (s1 - s2) / (l1 - l2);
    let p = s2 - q * l2;

    let geometric = s2 > 0.0 && s2 > 1.5 * s1;
    let verdict = if geometric || p > 1.0 + P_BAND {
        ThetaClass::Convergent
    } else if p < 1.0 - P_BAND || q <= Q_DIVERGENT {
        ThetaClass::Divergent
    } else if q >= Q_CONVERGENT {
        ThetaClass::Convergent
    } else {
        ThetaClass::Undetermined
    };
    let extrapolated = (verdict == ThetaClass::Convergent).then(|| {
        let ratio = lb_last / blocks[k_max - 2];
        if geometric && ratio < 1.0 {
            total + lb_last * ratio / (1.0 - ratio)
        } else {
            // Σ_{k>K} k^{-p} ≈ K^{1-p}/(p-1)
            total + lb_last * k_max as f64 / (s2 - 1.0).max(1e-3)
        }
    });
    Ok(ThetaClassification { verdict, trace, p, q, extrapolated })
}
