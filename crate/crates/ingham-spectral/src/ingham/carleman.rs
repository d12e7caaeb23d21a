use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::numerics::{RadialGrid, SpectralSamples, WeightKind};
use crate::specfun::ln_gamma;
use crate::transforms::{hankel_constant, log_sum_exp, spectral_density, spectral_power_norm};

/// Partial sum treated as divergent evidence on its own.
pub const DIVERGENCE_SUM: f64 = 1e3;
/// Fitted term decay m^{-p}: at or below this, diverging.
pub const P_DIVERGING: f64 = 1.25;
/// At or above this, converging.
pub const P_CONVERGING: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlemanVerdict {
    Diverging,
    Converging,
    Inconclusive,
}

impl fmt::Display for CarlemanVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CarlemanVerdict::Diverging => "diverging",
            CarlemanVerdict::Converging => "converging",
            CarlemanVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Terms n_m^{-1/2m}, their partial sums, and the extrapolated verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CarlemanReport {
    /// Index m = 1, 2, …
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    /// p in terms ≈ c·m^{-p}, from the last half of the terms.
    pub tail_exponent: f64,
    pub verdict: CarlemanVerdict,
    /// Verdict unchanged after dropping the first j = 1, 2, 3 terms.
    pub shift_robust: bool,
}

impl CarlemanReport {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

pub fn carleman_verdict(norms: &[f64]) -> CarlemanReport {
    let logs: Vec<f64> = norms.iter().map(|&n| if n > 0.0 { n.ln() } else { f64::NEG_INFINITY }).collect();
    carleman_verdict_log(&logs)
}

/// Same as [`carleman_verdict`] from log n_m, for norms beyond f64.
pub fn carleman_verdict_log(log_norms: &[f64]) -> CarlemanReport {
    let terms: Vec<f64> = log_norms.iter().enumerate().map(|(i, ln)| (-ln / (2.0 * (i + 1) as f64)).exp()).collect();
    let partial_sums: Vec<f64> = terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect();
    let (tail_exponent, verdict) = judge(&terms);
    let shift_robust = (1..=3).all(|j| terms.len() < j + 4 || judge(&terms[j..]).1 == verdict);
    CarlemanReport { terms, partial_sums, tail_exponent, verdict, shift_robust }
}

fn judge(terms: &[f64]) -> (f64, CarlemanVerdict) {
    if terms.iter().any(|t| t.is_infinite()) {
        return (0.0, CarlemanVerdict::Diverging);
    }
    let n = terms.len();
    if n < 4 {
        return (f64::NAN, CarlemanVerdict::Inconclusive);
    }
    if terms[n - 1] == 0.0 && terms[n / 2 - 1] == 0.0 {
        return (f64::INFINITY, CarlemanVerdict::Converging);
    }
    let m1 = n / 2;
    let p = (terms[m1 - 1] / terms[n - 1]).ln() / (n as f64 / m1 as f64).ln();
    let sum: f64 = terms.iter().sum();
    let verdict = if p <= P_DIVERGING || (sum > DIVERGENCE_SUM && p < P_CONVERGING) {
        CarlemanVerdict::Diverging
    } else if p >= P_CONVERGING {
        CarlemanVerdict::Converging
    } else {
        CarlemanVerdict::Inconclusive
    };
    (p, verdict)
}

/// M(2m) ≤ C_j ‖L^{m+j}f‖₂ for one m, in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentBound {
    pub m: u32,
    pub log_moment: f64,
    pub log_bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    /// log M(2m), m = 0..=m_max.
    pub log_moments: Vec<f64>,
    /// exp of the above; infinite on overflow.
    pub moments: Vec<f64>,
    pub overflow: bool,
    /// Carleman terms M(2m)^{-1/2m}, m ≥ 1.
    pub carleman: CarlemanReport,
    pub shift: f64,
    pub j: u32,
    pub log_c_j: f64,
    pub bounds: Vec<MomentBound>,
}

impl MomentReport {
    pub fn verdict(&self) -> CarlemanVerdict {
        self.carleman.verdict
    }
}

/// Half-line moments M(2m) = ∫₀^∞ λ^{2m} |F(λ)| w(λ) dλ of dμ_f = |F| w dλ,
/// with the Cauchy–Schwarz cross-check against spectral power norms at
/// shift δ, C_j² = ∫(λ²+δ²)^{-2j} w dλ, j the smallest integer keeping C_j finite.
pub fn moment_report(big_f: &SpectralSamples, weight: WeightKind, m_max: u32, shift: f64) -> Result<MomentReport> {
    if !(shift > 0.0 && shift.is_finite()) {
        return Err(Error::IllPosed(format!("moment cross-check needs a positive shift, got {shift}")));
    }
    let pts: Vec<(f64, f64)> = big_f
        .lambdas()
        .iter()
        .zip(big_f.grid().weights())
        .zip(big_f.values())
        .filter(|(_, v)| **v != 0.0)
        .map(|((&l, &w), &v)| (l, (w * spectral_density(weight, l) * v.abs()).ln()))
        .collect();
    let log_moments: Vec<f64> = (0..=m_max)
        .map(|m| {
            let k = 2.0 * m as f64;
            log_sum_exp(pts.iter().map(|&(l, lw)| if m == 0 { lw } else { lw + k * l.ln() }))
        })
        .collect();
    let big = f64::MAX.ln();
    let overflow = log_moments.iter().any(|l| *l > big);
    let moments = log_moments.iter().map(|l| l.exp()).collect();
    let carleman = carleman_verdict_log(&log_moments[1..]);

    let nu = order_at_infinity(weight);
    let j = ((nu + 1.0) / 2.0).floor() as u32 + 1;
    let log_c_j = 0.5 * log_c_j_sq(weight, shift, j)?;
    let bounds = (0..=m_max)
        .map(|m| {
            let log_norm = spectral_power_norm(big_f, shift, m + j, weight).log_norm;
            let log_bound = log_c_j + log_norm;
            let log_moment = log_moments[m as usize];
            let holds = log_moment == f64::NEG_INFINITY || log_moment <= log_bound + 1e-12 * log_bound.abs().max(1.0);
            MomentBound { m, log_moment, log_bound, holds }
        })
        .collect();
    Ok(MomentReport { log_moments, moments, overflow, carleman, shift, j, log_c_j, bounds })
}

/// ν with w(λ) ~ λ^{2ν+1} as λ → ∞.
fn order_at_infinity(weight: WeightKind) -> f64 {
    match weight {
        WeightKind::HankelMeasure { alpha } | WeightKind::JacobiPlancherel { alpha, .. } => alpha,
        WeightKind::Custom => -0.5,
    }
}

/// log ∫₀^∞ (λ²+δ²)^{-2j} w(λ) dλ.
fn log_c_j_sq(weight: WeightKind, shift: f64, j: u32) -> Result<f64> {
    let s = 2.0 * j as f64;
    // ∫₀^∞ (λ²+δ²)^{-s} λ^{2ν+1} dλ = δ^{2ν+2-2s} Γ(ν+1)Γ(s-ν-1) / (2Γ(s))
    let closed = |nu: f64| -> Result<f64> {
        Ok((2.0 * nu + 2.0 - 2.0 * s) * shift.ln() + ln_gamma(nu + 1.0)? + ln_gamma(s - nu - 1.0)?
            - std::f64::consts::LN_2
            - ln_gamma(s)?)
    };
    match weight {
        WeightKind::HankelMeasure { alpha } => Ok(closed(alpha)? + hankel_constant(alpha).ln()),
        WeightKind::Custom => closed(-0.5),
        WeightKind::JacobiPlancherel { .. } => Ok(cot_quadrature(weight, shift, s)?.ln()),
    }
}

/// ∫₀^∞ (λ²+δ²)^{-s} w dλ under λ = δ cot u, graded at both ends of [0, π/2].
fn cot_quadrature(weight: WeightKind, shift: f64, s: f64) -> Result<f64> {
    let g = RadialGrid::graded(FRAC_PI_2 / 2.0, 8, 16, 24)?;
    let f = |u: f64| {
        let (sn, cs) = u.sin_cos();
        shift.powf(1.0 - 2.0 * s) * sn.powf(2.0 * s - 2.0) * spectral_density(weight, shift * cs / sn)
    };
    Ok(g.integrate_fn(f) + g.integrate_fn(|v| f(FRAC_PI_2 - v)))
}
