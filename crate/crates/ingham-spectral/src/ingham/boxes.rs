use std::f64::consts::LN_2;
use std::sync::Arc;

use super::{classify_theta, ThetaClass, ThetaSpec, DEFAULT_T_MAX};
use crate::error::{Error, Result};
use crate::numerics::{RadialGrid, SampledRadialFunction, SpectralSamples, WeightKind};
use crate::transforms::{hankel_constant, hankel_inverse};

/// Factor c in a_k = c·θ(2^k)·log 2.
pub const DEFAULT_CALIBRATION: f64 = 0.5;

/// Boxes this wide are convolved in closed form before iterating.
const EXACT_BOXES: usize = 6;

/// Half-widths a_1 ≥ a_2 ≥ … of the normalized boxes (2a)^{-1}·1_{[-a,a]}.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxProduct {
    lengths: Vec<f64>,
    total_support: f64,
}

impl BoxProduct {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Domain("box product needs at least one box".into()));
        }
        if lengths.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Invariant("box lengths must be positive".into()));
        }
        if lengths.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Invariant("box lengths must be nonincreasing".into()));
        }
        let total_support = lengths.iter().sum();
        Ok(Self { lengths, total_support })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Σ a_k; the convolution lives on [-Σa_k, Σa_k].
    pub fn total_support(&self) -> f64 {
        self.total_support
    }

    /// f̂(ξ) = Π sin(a_k ξ)/(a_k ξ).
    pub fn fourier(&self, xi: f64) -> f64 {
        self.lengths.iter().map(|&a| sinc(a * xi)).product()
    }

    /// log |f̂(ξ)| (−∞ on zeros).
    pub fn log_abs_fourier(&self, xi: f64) -> f64 {
        self.lengths.iter().map(|&a| sinc(a * xi).abs().ln()).sum()
    }

    /// [`envelope_constant`] on the sampled ξ, with C raised to the sup of
    /// |f̂(ξ)|e^{|ξ|θ(|ξ|)} over [min ξ, max ξ]. Peaks of a scan at step 1/16
    /// near the top are refined by golden section.
    pub fn envelope(&self, theta: &ThetaSpec, xis: &[f64]) -> EnvelopeReport {
        let mut rep = envelope_constant(xis.iter().map(|&x| (x, self.log_abs_fourier(x))), theta);
        let (lo, hi) = xis.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        if !(hi > lo) {
            return rep;
        }
        let g = |x: f64| self.log_abs_fourier(x) + x.abs() * theta.eval(x);
        let n = ((hi - lo) * 16.0).ceil() as usize;
        let h = (hi - lo) / n as f64;
        let scan: Vec<f64> = (0..=n).map(|i| g(lo + h * i as f64)).collect();
        let top = scan.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut best = rep.log_constant.max(top);
        for i in 0..=n {
            let left = if i == 0 { f64::NEG_INFINITY } else { scan[i - 1] };
            let right = if i == n { f64::NEG_INFINITY } else { scan[i + 1] };
            if scan[i] >= left && scan[i] >= right && scan[i] > top - 0.1 {
                let a = lo + h * i.saturating_sub(1) as f64;
                let b = (lo + h * (i + 1) as f64).min(hi);
                best = best.max(golden_max(&g, a, b));
            }
        }
        rep.log_constant = best;
        rep.constant = best.exp();
        rep
    }

    /// θ_N(ξ) = ξ^{-1} Σ log max(1, a_k|ξ|), so that |f̂(ξ)| ≤ e^{-|ξ|θ_N(|ξ|)}.
    pub fn achieved_theta(&self, xi: f64) -> f64 {
        let x = xi.abs();
        if x == 0.0 {
            return 0.0;
        }
        self.lengths.iter().map(|&a| (a * x).max(1.0).ln()).sum::<f64>() / x
    }

    /// f̂ on a λ-grid, tagged with `weight` for later inversion.
    pub fn spectral_samples(&self, grid: &Arc<RadialGrid>, weight: WeightKind) -> Result<SpectralSamples> {
        SpectralSamples::from_fn(Arc::clone(grid), weight, |x| self.fourier(x))
    }

    /// The N-fold convolution on a uniform half-grid with `n_half` cells
    /// across [0, Σa_k] plus 5% padding: the widest boxes in closed form, the
    /// rest by exact averaging of the local cubic (a ≥ h) or quartic (a < h)
    /// interpolant.
    pub fn sample(&self, n_half: usize) -> Result<SampledRadialFunction> {
        if n_half < 16 {
            return Err(Error::Domain("need at least 16 cells".into()));
        }
        let s = self.total_support;
        let h = s / n_half as f64;
        let cells = n_half + n_half.div_ceil(20);
        let mut xs: Vec<f64> = (0..=cells).map(|j| j as f64 * h).collect();
        xs[n_half] = s;
        let k0 = self.lengths.len().min(EXACT_BOXES);
        let head = &self.lengths[..k0];
        let mut v: Vec<f64> = xs.iter().map(|&x| uniform_sum_density(head, x)).collect();
        let mut support: f64 = head.iter().sum();
        for &a in &self.lengths[k0..] {
            v = average(&v, h, a);
            support += a;
            for (x, val) in xs.iter().zip(v.iter_mut()) {
                if *x > support {
                    *val = 0.0;
                }
            }
        }
        let grid = RadialGrid::from_nodes(xs)?.into_shared();
        SampledRadialFunction::new(grid, v)?.with_support(0.0, s)
    }
}

/// max of a unimodal g on [a, b], endpoints included.
fn golden_max(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let edges = g(a).max(g(b));
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    edges.max(gc).max(gd)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Density of Σ U[-a_k, a_k]:
/// ((n-1)! Π 2a_k)^{-1} Σ_ε (Π ε_k) (x + Σ ε_k a_k)_+^{n-1}.
fn uniform_sum_density(a: &[f64], x: f64) -> f64 {
    let n = a.len();
    if x.abs() > a.iter().sum::<f64>() {
        return 0.0;
    }
    let denom: f64 = a.iter().map(|ak| 2.0 * ak).product::<f64>() * (1..n).map(|k| k as f64).product::<f64>();
    let mut acc = 0.0;
    for mask in 0u32..(1 << n) {
        let mut shift = x;
        let mut sign = 1.0;
        for (k, ak) in a.iter().enumerate() {
            if mask & (1 << k) != 0 {
                shift -= ak;
                sign = -sign;
            } else {
                shift += ak;
            }
        }
        let term = if shift > 0.0 {
            shift.powi(n as i32 - 1)
        } else if shift == 0.0 && n == 1 {
            0.5
        } else {
            0.0
        };
        acc += sign * term;
    }
    acc / denom
}

/// (2a)^{-1} ∫_{x-a}^{x+a} f for an even f sampled at jh, j ≥ 0, and zero
/// beyond the grid.
fn average(v: &[f64], h: f64, a: f64) -> Vec<f64> {
    let n = v.len() as isize;
    let at = |j: isize| -> f64 {
        let j = j.abs();
        if j < n {
            v[j as usize]
        } else {
            0.0
        }
    };
    if a < h {
        let (c2, c4) = (a * a / (6.0 * h * h), a.powi(4) / (120.0 * h.powi(4)));
        return (0..n)
            .map(|i| {
                let (m2, m1, z, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
                let d2 = (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / 12.0;
                let d4 = m2 - 4.0 * m1 + 6.0 * z - 4.0 * p1 + p2;
                z + c2 * d2 + c4 * d4
            })
            .collect();
    }
    // cumulative integral over cells, with the grid mirrored onto [-L, L]
    let steps = (a / h).floor() as isize;
    let frac = a / h - steps as f64;
    let lo = -(n + steps + 4);
    let hi = n + steps + 4;
    let len = (hi - lo + 1) as usize;
    let mut cum = vec![0.0; len];
    for j in lo..hi {
        let cell = h / 24.0 * (-at(j - 1) + 13.0 * at(j) + 13.0 * at(j + 1) - at(j + 2));
        cum[(j - lo + 1) as usize] = cum[(j - lo) as usize] + cell;
    }
    let partial = |j: isize, t: f64| -> f64 {
        let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
        let wm = -(t4 / 4.0 - t3 + t2) / 6.0;
        let w0 = (t4 / 4.0 - 2.0 * t3 / 3.0 - t2 / 2.0 + 2.0 * t) / 2.0;
        let w1 = -(t4 / 4.0 - t3 / 3.0 - t2) / 2.0;
        let w2 = (t4 / 4.0 - t2 / 2.0) / 6.0;
        h * (wm * at(j - 1) + w0 * at(j) + w1 * at(j + 1) + w2 * at(j + 2))
    };
    let big_f = |j: isize, t: f64| cum[(j - lo) as usize] + partial(j, t);
    (0..n).map(|i| (big_f(i + steps, frac) - big_f(i - steps - 1, 1.0 - frac)) / (2.0 * a)).collect()
}

/// A box product with its sampled profile.
#[derive(Debug, Clone)]
pub struct Construction {
    pub boxes: BoxProduct,
    pub profile: SampledRadialFunction,
    /// Outermost node where the sampled profile is nonzero.
    pub measured_support: f64,
    pub calibration: f64,
}

/// [`construct_box_product_with`] at the default calibration and 8000 cells.
pub fn construct_box_product(theta: &ThetaSpec, n: usize, support_budget: f64) -> Result<Construction> {
    construct_box_product_with(theta, n, support_budget, DEFAULT_CALIBRATION, 8000)
}

/// a_k = c·θ(2^k)·log 2 for k = 1..n; the dyadic sum tracks ∫θ(t)/t dt.
pub fn construct_box_product_with(
    theta: &ThetaSpec,
    n: usize,
    support_budget: f64,
    calibration: f64,
    n_half: usize,
) -> Result<Construction> {
    if n == 0 {
        return Err(Error::Domain("need N >= 1 boxes".into()));
    }
    if !(calibration > 0.0) {
        return Err(Error::Domain(format!("calibration must be positive, got {calibration}")));
    }
    let class = classify_theta(theta, DEFAULT_T_MAX)?;
    if class.verdict != ThetaClass::Convergent {
        return Err(Error::IllPosed(format!("theta {} is {}, not convergent", theta.name(), class.verdict)));
    }
    let lengths: Vec<f64> = (1..=n).map(|k| calibration * theta.eval(2f64.powi(k as i32)) * LN_2).collect();
    if lengths.iter().any(|a| *a <= 0.0) {
        return Err(Error::IllPosed(format!("theta {} vanishes at 2^k; no box lengths", theta.name())));
    }
    let boxes = BoxProduct::new(lengths)?;
    if boxes.total_support() > support_budget {
        return Err(Error::BudgetInfeasible { needed: boxes.total_support(), budget: support_budget });
    }
    let profile = boxes.sample(n_half)?;
    let measured_support =
        profile.nodes().iter().zip(profile.values()).filter(|(_, v)| **v != 0.0).map(|(r, _)| *r).fold(0.0, f64::max);
    Ok(Construction { boxes, profile, measured_support, calibration })
}

/// One row of an envelope trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeRow {
    pub xi: f64,
    pub value_abs: f64,
    /// e^{-ξθ(ξ)}
    pub envelope: f64,
}

/// Smallest C with value ≤ C·e^{-ξθ(ξ)} on the sampled ξ.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport {
    pub constant: f64,
    pub log_constant: f64,
    pub rows: Vec<EnvelopeRow>,
}

/// Measures C from (ξ, log|value|) pairs; logs keep tiny values exact.
pub fn envelope_constant(samples: impl IntoIterator<Item = (f64, f64)>, theta: &ThetaSpec) -> EnvelopeReport {
    let mut log_c = f64::NEG_INFINITY;
    let rows = samples
        .into_iter()
        .map(|(xi, log_abs)| {
            let decay = xi.abs() * theta.eval(xi);
            log_c = log_c.max(log_abs + decay);
            EnvelopeRow { xi, value_abs: log_abs.exp(), envelope: (-decay).exp() }
        })
        .collect();
    EnvelopeReport { constant: log_c.exp(), log_constant: log_c, rows }
}

/// Tail mass fraction that [`transfer_via_paley_wiener`] must reach by
/// three quarters of the grid.
pub const TRANSFER_TAIL_LIMIT: f64 = 1e-6;

/// Numerical witness of compact support.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportReport {
    /// ∫|g|² dμ_α over the grid.
    pub total_mass: f64,
    /// Smallest node beyond which at most 1e-4 of the mass remains.
    pub r99_99: f64,
    /// (r, fraction of mass beyond r).
    pub tail_curve: Vec<(f64, f64)>,
}

impl SupportReport {
    /// Tail curve of ∫|g|² w dr on g's own grid.
    pub fn measure(g: &SampledRadialFunction, weight: impl Fn(f64) -> f64) -> Self {
        let dens: Vec<f64> = g
            .nodes()
            .iter()
            .zip(g.grid().weights())
            .zip(g.values())
            .map(|((&r, &w), &v)| if v == 0.0 { 0.0 } else { w * v * v * weight(r) })
            .collect();
        let total: f64 = dens.iter().sum();
        let mut beyond = total;
        let mut tail_curve = Vec::with_capacity(dens.len());
        for (&r, d) in g.nodes().iter().zip(&dens) {
            tail_curve.push((r, if total > 0.0 { (beyond / total).max(0.0) } else { 0.0 }));
            beyond -= d;
        }
        let r99_99 = tail_curve.iter().find(|p| p.1 <= 1e-4).map_or(g.grid().span().1, |p| p.0);
        Self { total_mass: total, r99_99, tail_curve }
    }

    /// Fraction of mass beyond r (the first tabulated node ≥ r).
    pub fn tail_beyond(&self, r: f64) -> f64 {
        let k = self.tail_curve.partition_point(|p| p.0 < r);
        self.tail_curve.get(k).map_or(0.0, |p| p.1)
    }
}

#[derive(Debug, Clone)]
pub struct Transfer {
    pub profile: SampledRadialFunction,
    pub support: SupportReport,
}

/// g = H_α^{-1} f̂ on `r_grid`, with a tail-mass report. The grid should
/// extend well past the expected support radius; a tail above
/// [`TRANSFER_TAIL_LIMIT`] at three quarters of it means the λ-window was
/// too short to resolve g.
pub fn transfer_via_paley_wiener(fhat: &SpectralSamples, alpha: f64, r_grid: &Arc<RadialGrid>) -> Result<Transfer> {
    let g = hankel_inverse(fhat, alpha, r_grid)?;
    let c = hankel_constant(alpha);
    let support = SupportReport::measure(&g, |r| c * r.powf(2.0 * alpha + 1.0));
    let probe = support.tail_beyond(0.75 * r_grid.span().1);
    if probe > TRANSFER_TAIL_LIMIT {
        return Err(Error::WindowTooSmall { tail: probe, limit: TRANSFER_TAIL_LIMIT });
    }
    Ok(Transfer { profile: g, support })
}
