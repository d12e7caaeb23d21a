use std::io::{self, Write};
use std::sync::Arc;

use super::carleman::{carleman_verdict_log, CarlemanReport, CarlemanVerdict};
use super::{classify_theta, ThetaClass, ThetaClassification, ThetaSpec, DEFAULT_T_MAX};
use crate::error::{Error, Result};
use crate::numerics::{RadialGrid, SampledRadialFunction, SpectralSamples, WeightKind};
use crate::transforms::{spectral_density, spectral_power_norm};

/// Highest power of the Laplacian tracked by the audits.
pub const AUDIT_M_MAX: u32 = 40;

// drop below the peak of the top integrand that ends the envelope window
const WINDOW_DROP: f64 = 60.0;
const WINDOW_LIMIT: f64 = 1e15;

/// One (x, λ) sample of |P_λ f(x)| against the envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub x: f64,
    pub lambda: f64,
    /// f̃(λ); the Dunkl audit stores P_λf(x) itself.
    pub transform: f64,
    /// Φ_λ(x); 1 in the Dunkl audit.
    pub kernel: f64,
    /// |P_λ f(x)|.
    pub d: f64,
    /// d · e^{λθ(λ)}.
    pub constant: f64,
}

/// ‖L^m F_x‖₂ under the imposed envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRow {
    pub m: u32,
    pub log_norm: f64,
    pub term: f64,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub theta: String,
    pub vanish_radius: f64,
    pub shift: f64,
    pub classification: ThetaClassification,
    pub rows: Vec<AuditRow>,
    /// sup of d(λ) e^{λθ(λ)} over the sampled window.
    pub best_constant: f64,
    /// Upper end of the λ-window used for the envelope norms; `None` when
    /// the envelope integrals do not converge before 1e15.
    pub envelope_window: Option<f64>,
    pub power_rows: Vec<PowerRow>,
    /// `None` for vanishing input.
    pub carleman: Option<CarlemanReport>,
    /// θ divergent and the envelope forces diverging Carleman sums.
    pub obstruction: bool,
}

impl AuditReport {
    pub fn verdict(&self) -> Option<CarlemanVerdict> {
        self.carleman.as_ref().map(|c| c.verdict)
    }

    pub fn write_lambda_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,lambda,transform,kernel,d,constant")?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.x, r.lambda, r.transform, r.kernel, r.d, r.constant
            )?;
        }
        Ok(())
    }

    pub fn write_power_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "m,log_norm,term,partial_sum")?;
        for r in &self.power_rows {
            writeln!(out, "{},{:.17e},{:.17e},{:.17e}", r.m, r.log_norm, r.term, r.partial_sum)?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("theta: {}\n", self.theta));
        s.push_str(&format!(
            "theta classification: {} (p = {:.4}, q = {:.4})\n",
            self.classification.verdict, self.classification.p, self.classification.q
        ));
        s.push_str(&format!("vanishing radius: {}\nshift: {}\n", self.vanish_radius, self.shift));
        s.push_str(&format!("best envelope constant over window: {:.6e}\n", self.best_constant));
        match self.envelope_window {
            Some(w) => s.push_str(&format!("envelope lambda window: [0, {w:.6e}]\n")),
            None => s.push_str("envelope integrals diverge on the tested window\n"),
        }
        match &self.carleman {
            Some(c) => {
                s.push_str(&format!(
                    "carleman: {} after {} terms, partial sum {:.6e}, tail exponent {:.4}, shift robust {}\n",
                    c.verdict,
                    c.terms.len(),
                    c.total(),
                    c.tail_exponent,
                    c.shift_robust
                ));
            }
            None => s.push_str("carleman: not applicable (zero input)\n"),
        }
        s.push_str(&format!("obstruction: {}\n", self.obstruction));
        s
    }
}

fn log_integrand(theta: &ThetaSpec, weight: WeightKind, shift: f64, m: u32, l: f64) -> f64 {
    2.0 * m as f64 * (l * l + shift * shift).ln() - 2.0 * l * theta.eval(l) + spectral_density(weight, l).ln()
}

/// Where ∫(λ²+δ²)^{2m} e^{-2λθ(λ)} w dλ has lost all but e^{-60} of its
/// peak integrand, scanning λ = 2^{k/8}.
pub fn envelope_window(theta: &ThetaSpec, weight: WeightKind, shift: f64, m: u32) -> Option<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut k = 0;
    loop {
        let l = 2f64.powf(k as f64 / 8.0);
        if l > WINDOW_LIMIT {
            return None;
        }
        let g = log_integrand(theta, weight, shift, m, l);
        if g > best {
            best = g;
        } else if g < best - WINDOW_DROP && l > 4.0 {
            return Some(l);
        }
        k += 1;
    }
}

/// Gauss panels on [0, λ_hi]: geometric toward 0, unit width to 64,
/// ratio 1.05 beyond; `refine` splits every panel.
pub fn envelope_grid(lambda_hi: f64, refine: usize) -> Result<Arc<RadialGrid>> {
    let refine = refine.max(1);
    let mut breaks = vec![0.0];
    breaks.extend((1..=12).rev().map(|k| 0.25f64.powi(k)));
    let step = lambda_hi.min(64.0) / 64.0;
    let coarse: Vec<f64> = {
        let mut v: Vec<f64> = (1..=64).map(|k| k as f64 * step).collect();
        let mut x = 64.0 * step;
        while x < lambda_hi {
            x = (x * 1.05).min(lambda_hi);
            v.push(x);
        }
        v
    };
    let mut prev = 0.0;
    for b in coarse {
        for s in 1..=refine {
            let x = prev + (b - prev) * s as f64 / refine as f64;
            if x > *breaks.last().unwrap() {
                breaks.push(x);
            }
        }
        prev = b;
    }
    Ok(RadialGrid::composite(&breaks, 16)?.into_shared())
}

/// log ‖L^m F‖₂ for F = C e^{-λθ(λ)}, m = 1..=m_max.
pub fn envelope_power_norms(
    theta: &ThetaSpec,
    constant: f64,
    weight: WeightKind,
    shift: f64,
    m_max: u32,
    refine: usize,
) -> Result<(Option<f64>, Vec<f64>)> {
    let Some(hi) = envelope_window(theta, weight, shift, m_max) else {
        return Ok((None, vec![f64::INFINITY; m_max as usize]));
    };
    let grid = envelope_grid(hi, refine)?;
    let f = SpectralSamples::from_fn(grid, weight, |l| constant * (-l * theta.eval(l)).exp())?;
    let logs = (1..=m_max).map(|m| spectral_power_norm(&f, shift, m, weight).log_norm).collect();
    Ok((Some(hi), logs))
}

/// Rejects profiles that do not vanish on [0, l).
pub(crate) fn check_vanishing(f: &SampledRadialFunction, l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("vanishing radius must be positive, got {l}")));
    }
    if let Some((a, _)) = f.support_hint() {
        if a < l && f.max_abs() > 0.0 {
            return Err(Error::IllPosed(format!("support hint starts at {a}, inside [0, {l})")));
        }
    }
    if let Some((r, _)) = f.nodes().iter().zip(f.values()).find(|(r, v)| **r < l && **v != 0.0) {
        return Err(Error::IllPosed(format!("profile is nonzero at r = {r} < {l}")));
    }
    Ok(())
}

/// Sample points inside the vanishing ball: the given ones, or 0, l/3, 2l/3.
pub(crate) fn sample_points(l: f64, given: Option<&[f64]>) -> Result<Vec<f64>> {
    let xs = given.map_or_else(|| vec![0.0, l / 3.0, 2.0 * l / 3.0], <[f64]>::to_vec);
    if xs.is_empty() || xs.iter().any(|&x| !(x >= 0.0 && x < l)) {
        return Err(Error::Domain(format!("sample points must lie in [0, {l})")));
    }
    Ok(xs)
}

/// d e^{λθ(λ)} without 0·∞.
pub(crate) fn envelope_ratio(d: f64, lambda: f64, theta: &ThetaSpec) -> f64 {
    if d == 0.0 {
        0.0
    } else {
        (d.ln() + lambda.abs() * theta.eval(lambda)).exp()
    }
}

/// Classifies θ, imposes C e^{-λθ(λ)} with the measured C, and runs the
/// Carleman test on the resulting power norms.
pub(crate) fn assemble(
    theta: &ThetaSpec,
    vanish_radius: f64,
    weight: WeightKind,
    shift: f64,
    rows: Vec<AuditRow>,
    m_max: u32,
) -> Result<AuditReport> {
    let classification = classify_theta(theta, DEFAULT_T_MAX)?;
    let best_constant = rows.iter().map(|r| r.constant).fold(0.0, f64::max);
    let mut report = AuditReport {
        theta: theta.name(),
        vanish_radius,
        shift,
        classification,
        rows,
        best_constant,
        envelope_window: None,
        power_rows: Vec::new(),
        carleman: None,
        obstruction: false,
    };
    if best_constant == 0.0 {
        return Ok(report);
    }
    let c = if best_constant.is_finite() { best_constant } else { 1.0 };
    let (window, logs) = envelope_power_norms(theta, c, weight, shift, m_max, 1)?;
    let carleman = carleman_verdict_log(&logs);
    report.power_rows = (0..logs.len())
        .map(|i| PowerRow {
            m: i as u32 + 1,
            log_norm: logs[i],
            term: carleman.terms[i],
            partial_sum: carleman.partial_sums[i],
        })
        .collect();
    report.envelope_window = window;
    report.obstruction =
        report.classification.verdict == ThetaClass::Divergent && carleman.verdict == CarlemanVerdict::Diverging;
    report.carleman = Some(carleman);
    Ok(report)
}
