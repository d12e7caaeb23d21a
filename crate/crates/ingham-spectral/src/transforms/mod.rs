//! Hankel and Jacobi transform pairs.
//!
//! Hankel side: both directions integrate against
//! dμ_α(x) = x^{2α+1} dx / (2^α Γ(α+1)), so e^{-r²/2} is a fixed point
//! and the pair is unitary.
//!
//! Jacobi side: f̃(λ) = ∫ f φ_λ w̃ dr and
//! f(r) = (1/2π) ∫_0^∞ f̃(λ) φ_λ(r) |c(λ)|^{-2} dλ.

use std::sync::Arc;

use crate::error::{Error, Result, Warning};
use crate::numerics::{RadialGrid, SampledRadialFunction, SpectralSamples, WeightKind};
use crate::specfun::{jacobi_weight, ln_gamma, plancherel_density, psi_unchecked, JacobiParams, JacobiPhi};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Which transform pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairKind {
    Hankel { alpha: f64 },
    Jacobi(JacobiParams),
}

impl PairKind {
    pub fn weight_kind(&self) -> WeightKind {
        match self {
            PairKind::Hankel { alpha } => WeightKind::HankelMeasure { alpha: *alpha },
            PairKind::Jacobi(p) => WeightKind::JacobiPlancherel { alpha: p.alpha(), beta: p.beta() },
        }
    }

    /// Radial measure density.
    pub fn radial_weight(&self, r: f64) -> f64 {
        match self {
            PairKind::Hankel { alpha } => hankel_density(*alpha, r),
            PairKind::Jacobi(p) => jacobi_weight(p, r),
        }
    }

    /// Spectral measure density on the half-line.
    pub fn spectral_weight(&self, lambda: f64) -> f64 {
        spectral_density(self.weight_kind(), lambda)
    }

    /// Natural shift d with L ↔ -(λ² + d²).
    pub fn natural_shift(&self) -> f64 {
        match self {
            PairKind::Hankel { .. } => 0.0,
            PairKind::Jacobi(p) => p.rho(),
        }
    }
}

/// 1 / (2^α Γ(α+1)).
pub fn hankel_constant(alpha: f64) -> f64 {
    (-alpha * std::f64::consts::LN_2 - ln_gamma(alpha + 1.0).expect("alpha > -1")).exp()
}

fn hankel_density(alpha: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if 2.0 * alpha + 1.0 > 0.0 { 0.0 } else { f64::INFINITY };
    }
    hankel_constant(alpha) * x.powf(2.0 * alpha + 1.0)
}

/// Spectral density for a weight kind (`Custom` means dλ).
pub fn spectral_density(kind: WeightKind, lambda: f64) -> f64 {
    match kind {
        WeightKind::HankelMeasure { alpha } => hankel_density(alpha, lambda),
        WeightKind::JacobiPlancherel { alpha, beta } => {
            plancherel_density(&JacobiParams::unchecked(alpha, beta), lambda) / TWO_PI
        }
        WeightKind::Custom => 1.0,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > -1.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Hankel order must exceed -1, got {alpha}")))
    }
}

fn nonzero(f: &SampledRadialFunction) -> Vec<(f64, f64)> {
    f.nodes()
        .iter()
        .zip(f.grid().weights())
        .zip(f.values())
        .filter(|(_, v)| **v != 0.0)
        .map(|((&r, &w), &v)| (r, w * v))
        .collect()
}

/// H^(α)f(λ) = ∫ f(r) ψ_α(λr) dμ_α(r).
pub fn hankel_forward(f: &SampledRadialFunction, alpha: f64, lambdas: &Arc<RadialGrid>) -> Result<SpectralSamples> {
    check_alpha(alpha)?;
    let pts: Vec<(f64, f64)> = nonzero(f).into_iter().map(|(r, wv)| (r, wv * hankel_density(alpha, r))).collect();
    let values = lambdas
        .nodes()
        .iter()
        .map(|&l| pts.iter().map(|&(r, wv)| wv * psi_unchecked(alpha, (l * r).abs())).sum())
        .collect();
    SpectralSamples::new(Arc::clone(lambdas), values, WeightKind::HankelMeasure { alpha })
}

/// f(r) = ∫ F(λ) ψ_α(λr) dμ_α(λ) on the given grid.
pub fn hankel_inverse(big_f: &SpectralSamples, alpha: f64, r_grid: &Arc<RadialGrid>) -> Result<SampledRadialFunction> {
    check_alpha(alpha)?;
    let pts: Vec<(f64, f64)> = big_f
        .lambdas()
        .iter()
        .zip(big_f.grid().weights())
        .zip(big_f.values())
        .filter(|(_, v)| **v != 0.0)
        .map(|((&l, &w), &v)| (l, w * v * hankel_density(alpha, l)))
        .collect();
    let values = r_grid
        .nodes()
        .iter()
        .map(|&r| pts.iter().map(|&(l, wv)| wv * psi_unchecked(alpha, (l * r).abs())).sum())
        .collect();
    SampledRadialFunction::new(Arc::clone(r_grid), values)
}

/// f̃(λ) = ∫ f(r) φ_λ(r) w̃(r) dr.
pub fn jacobi_forward(
    f: &SampledRadialFunction,
    p: &JacobiParams,
    lambdas: &Arc<RadialGrid>,
) -> Result<SpectralSamples> {
    let pts: Vec<(f64, f64)> = nonzero(f).into_iter().map(|(r, wv)| (r, wv * jacobi_weight(p, r))).collect();
    let rs: Vec<f64> = pts.iter().map(|q| q.0).collect();
    let table = JacobiPhi::new(p).table(lambdas.nodes(), &rs);
    let values =
        (0..lambdas.len()).map(|i| table.row(i).iter().zip(&pts).map(|(phi, (_, wv))| phi * wv).sum()).collect();
    SpectralSamples::new(Arc::clone(lambdas), values, WeightKind::JacobiPlancherel { alpha: p.alpha(), beta: p.beta() })
}

/// f(r) = (1/2π) ∫_0^∞ F(λ) φ_λ(r) |c(λ)|^{-2} dλ.
pub fn jacobi_inverse(
    big_f: &SpectralSamples,
    p: &JacobiParams,
    r_grid: &Arc<RadialGrid>,
) -> Result<SampledRadialFunction> {
    let pts: Vec<(f64, f64)> = big_f
        .lambdas()
        .iter()
        .zip(big_f.grid().weights())
        .zip(big_f.values())
        .filter(|(_, v)| **v != 0.0)
        .map(|((&l, &w), &v)| (l, w * v * plancherel_density(p, l) / TWO_PI))
        .collect();
    let ls: Vec<f64> = pts.iter().map(|q| q.0).collect();
    let table = JacobiPhi::new(p).table(&ls, r_grid.nodes());
    let mut values = vec![0.0; r_grid.len()];
    for (i, (_, wv)) in pts.iter().enumerate() {
        for (v, phi) in values.iter_mut().zip(table.row(i)) {
            *v += wv * phi;
        }
    }
    SampledRadialFunction::new(Arc::clone(r_grid), values)
}

pub fn forward(f: &SampledRadialFunction, pair: PairKind, lambdas: &Arc<RadialGrid>) -> Result<SpectralSamples> {
    match pair {
        PairKind::Hankel { alpha } => hankel_forward(f, alpha, lambdas),
        PairKind::Jacobi(p) => jacobi_forward(f, &p, lambdas),
    }
}

pub fn inverse(big_f: &SpectralSamples, pair: PairKind, r_grid: &Arc<RadialGrid>) -> Result<SampledRadialFunction> {
    match pair {
        PairKind::Hankel { alpha } => hankel_inverse(big_f, alpha, r_grid),
        PairKind::Jacobi(p) => jacobi_inverse(big_f, &p, r_grid),
    }
}

/// Both sides of the Plancherel identity and the round-trip error.
#[derive(Debug, Clone)]
pub struct TransformPairReport {
    pub forward: SpectralSamples,
    pub roundtrip_l2_rel_error: f64,
    /// ∫ |f|² (radial measure)
    pub plancherel_lhs: f64,
    /// ∫ |F|² (spectral measure)
    pub plancherel_rhs: f64,
    pub warnings: Vec<Warning>,
}

impl TransformPairReport {
    pub fn plancherel_rel_error(&self) -> f64 {
        if self.plancherel_lhs == 0.0 && self.plancherel_rhs == 0.0 {
            return 0.0;
        }
        (self.plancherel_lhs - self.plancherel_rhs).abs() / self.plancherel_lhs.abs().max(self.plancherel_rhs.abs())
    }
}

/// Weighted L² norm squared of a profile.
pub fn radial_norm_sq(f: &SampledRadialFunction, pair: PairKind) -> f64 {
    f.nodes()
        .iter()
        .zip(f.grid().weights())
        .zip(f.values())
        .map(|((&r, &w), &v)| if v == 0.0 { 0.0 } else { w * v * v * pair.radial_weight(r) })
        .sum()
}

/// ∫ |F|² dν over the window.
pub fn spectral_norm_sq(big_f: &SpectralSamples) -> f64 {
    let kind = big_f.weight_kind();
    big_f
        .lambdas()
        .iter()
        .zip(big_f.grid().weights())
        .zip(big_f.values())
        .map(|((&l, &w), &v)| if v == 0.0 { 0.0 } else { w * v * v * spectral_density(kind, l) })
        .sum()
}

/// Forward, inverse on f's own grid, and both Plancherel sides.
pub fn plancherel_check(
    f: &SampledRadialFunction,
    pair: PairKind,
    lambdas: &Arc<RadialGrid>,
) -> Result<TransformPairReport> {
    let fwd = forward(f, pair, lambdas)?;
    let back = inverse(&fwd, pair, f.grid())?;
    let lhs = radial_norm_sq(f, pair);
    let rhs = spectral_norm_sq(&fwd);
    let diff_sq: f64 = f
        .nodes()
        .iter()
        .zip(f.grid().weights())
        .zip(f.values().iter().zip(back.values()))
        .map(|((&r, &w), (a, b))| {
            let d = a - b;
            if d == 0.0 {
                0.0
            } else {
                w * d * d * pair.radial_weight(r)
            }
        })
        .sum();
    let rt = if lhs == 0.0 { diff_sq.sqrt() } else { (diff_sq / lhs).sqrt() };
    let mut warnings = Vec::new();
    if let Some(w) = spectral_tail_warning(&fwd) {
        warnings.push(w);
    }
    Ok(TransformPairReport {
        forward: fwd,
        roundtrip_l2_rel_error: rt,
        plancherel_lhs: lhs,
        plancherel_rhs: rhs,
        warnings,
    })
}

/// Flags a λ-window whose last panel still carries visible spectral mass.
pub fn spectral_tail_warning(big_f: &SpectralSamples) -> Option<Warning> {
    let kind = big_f.weight_kind();
    let terms: Vec<f64> =
        big_f.lambdas().iter().zip(big_f.values()).map(|(&l, &v)| (v * v * spectral_density(kind, l)).abs()).collect();
    let peak = terms.iter().cloned().fold(0.0, f64::max);
    if peak == 0.0 {
        return None;
    }
    let tail = *terms.last().unwrap() / peak;
    (tail > 1e-14).then(|| Warning::Truncation { relative_tail: tail, at: *big_f.lambdas().last().unwrap() })
}

/// Flags a radial profile not yet negligible at the grid end.
pub fn radial_tail_warning(f: &SampledRadialFunction) -> Option<Warning> {
    let peak = f.max_abs();
    if peak == 0.0 {
        return None;
    }
    let tail = f.values().last().unwrap().abs() / peak;
    (tail > 1e-14).then(|| Warning::Truncation { relative_tail: tail, at: *f.nodes().last().unwrap() })
}

/// ‖L^m f‖₂ computed spectrally, in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerNorm {
    pub log_norm: f64,
    /// `exp(log_norm)`, infinite when it overflows.
    pub norm: f64,
    pub overflow: bool,
}

/// log-sum-exp accumulation of ∫ (λ²+shift²)^{2m} |F|² dν.
pub fn spectral_power_norm(big_f: &SpectralSamples, shift: f64, m: u32, weight: WeightKind) -> PowerNorm {
    let terms = big_f.lambdas().iter().zip(big_f.grid().weights()).zip(big_f.values()).filter(|(_, v)| **v != 0.0).map(
        |((&l, &w), &v)| {
            let dens = spectral_density(weight, l) * w;
            let mult = if m == 0 { 0.0 } else { 2.0 * m as f64 * (l * l + shift * shift).ln() };
            if dens <= 0.0 {
                f64::NEG_INFINITY
            } else {
                mult + 2.0 * v.abs().ln() + dens.ln()
            }
        },
    );
    let log_sq = log_sum_exp(terms);
    let log_norm = 0.5 * log_sq;
    let overflow = log_norm > f64::MAX.ln();
    PowerNorm { log_norm, norm: if overflow { f64::INFINITY } else { log_norm.exp() }, overflow }
}

pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let mx = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    mx + v.iter().map(|t| (t - mx).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests;
