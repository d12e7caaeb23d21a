//! Normalized Bessel kernel ψ_α(t) = 2^α Γ(α+1) t^{-α} J_α(t).
//!
//! | regime            | method                                   |
//! |-------------------|------------------------------------------|
//! | t < 2             | power series                             |
//! | t ≥ 25            | Hankel asymptotic P/Q expansion          |
//! | otherwise         | Miller backward recurrence, Neumann sum  |
//!
//! The asymptotic branch falls back to Miller when its terms stop
//! shrinking before reaching double precision (large orders).

use std::f64::consts::PI;

use super::gamma::ln_gamma;
use crate::error::{domain, Result};

const SERIES_MAX: f64 = 2.0;
pub const ASYMPTOTIC_MIN: f64 = 25.0;

/// ψ_α(t), even in t, with ψ_α(0) = 1.
pub fn bessel_psi(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > -1.0) || !alpha.is_finite() {
        return domain(format!("bessel order must exceed -1, got {alpha}"));
    }
    if !t.is_finite() {
        return domain(format!("bessel argument must be finite, got {t}"));
    }
    Ok(psi_unchecked(alpha, t.abs()))
}

pub(crate) fn psi_unchecked(alpha: f64, t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else if t < SERIES_MAX {
        series(alpha, t)
    } else if t >= ASYMPTOTIC_MIN {
        asymptotic(alpha, t).unwrap_or_else(|| miller(alpha, t))
    } else {
        miller(alpha, t)
    }
}

fn series(alpha: f64, t: f64) -> f64 {
    let x = -0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let k = k as f64;
        term *= x / (k * (alpha + k));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Hankel expansion; `None` when the asymptotic series is not yet usable.
fn asymptotic(alpha: f64, t: f64) -> Option<f64> {
    let mu = 4.0 * alpha * alpha;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0f64;
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for k in 1..200usize {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (8.0 * k as f64 * t);
        let mag = term.abs();
        if mag == 0.0 {
            converged = true;
            break;
        }
        if mag > prev {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
        prev = mag;
        if mag < 1e-17 {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let phase = (0.5 * alpha + 0.25) * PI;
    let (st, ct) = t.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = ct * cp + st * sp;
    let sin_chi = st * cp - ct * sp;
    let log_pref =
        ln_gamma(alpha + 1.0).ok()? + alpha * std::f64::consts::LN_2 - (alpha + 0.5) * t.ln() + 0.5 * (2.0 / PI).ln();
    Some(log_pref.exp() * (p * cos_chi - q * sin_chi))
}

/// Backward recurrence on J_{α+k}, normalized through
/// (t/2)^α / Γ(α+1) = J_α + Σ_{k≥1} (α+2k)(α+1)_{k-1}/k! J_{α+2k}.
fn miller(alpha: f64, t: f64) -> f64 {
    let mut top = (t + 30.0 + 6.0 * t.sqrt()).ceil() as usize;
    if top % 2 == 1 {
        top += 1;
    }
    // P_i = (α+1)_{i-1}/i!, run forward to the top index
    let half = top / 2;
    let mut p = 1.0;
    for i in 1..half {
        p *= (alpha + i as f64) / (i as f64 + 1.0);
    }
    let mut jp1 = 0.0;
    let mut j = 1e-30;
    let mut sum = 0.0;
    let mut i = half;
    for k in (1..=top).rev() {
        if k % 2 == 0 {
            sum += (alpha + k as f64) * p * j;
            if i > 1 {
                p *= i as f64 / (alpha + (i - 1) as f64);
            }
            i -= 1;
        }
        let jm1 = 2.0 * (alpha + k as f64) / t * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            sum *= 1e-250;
        }
    }
    j / (j + sum)
}
