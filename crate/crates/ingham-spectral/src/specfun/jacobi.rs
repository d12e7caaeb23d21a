//! Jacobi functions φ_λ^(α,β), the Harish-Chandra c-function and friends.
//!
//! φ_λ(r) = ₂F₁((ϱ+iλ)/2, (ϱ-iλ)/2; α+1; -sinh²r). Summing that series
//! directly loses about λ·sinh r / ln 10 digits, so evaluation picks a path
//! by region:
//!
//! | region                                   | path                                  |
//! |------------------------------------------|---------------------------------------|
//! | α = β = -1/2                             | cos λr                                |
//! | sinh r ≤ 1/2 and λ sinh r ≤ 4            | the series above                      |
//! | λ ≥ 1/2, cosh⁻²r ≤ 0.3, λ cosh⁻²r ≤ 24   | 2 Re[c(λ) Φ_λ(r)] (expansion at ∞)    |
//! | otherwise, α > -1/2                      | Laplace-type integral over [0, r]     |
//! | otherwise, α ≤ -1/2                      | contiguous relation in α+1            |
//!
//! The integral representation used for α > -1/2 is
//!
//! φ_λ(t) = C_α (sinh 2t)^{-2α} (cosh t)^{α-β}
//!          ∫_0^t cos(λs) (cosh 2t - cosh 2s)^{α-1/2}
//!                ₂F₁(α+β, α-β; α+1/2; (cosh t - cosh s)/(2 cosh t)) ds
//!
//! with C_α = 2^{α+3/2} Γ(α+1) / (√π Γ(α+1/2)). The s-kernel does not
//! depend on λ, which is what makes [`JacobiPhi::table`] cheap.

use num_complex::Complex64;

use super::gamma::{ln_gamma, log_gamma, pochhammer};
use crate::error::{domain, Error, Result};
use crate::numerics::gauss::{gauss_jacobi, gauss_legendre, Rule};
use crate::symmetric_space::KTypeIndex;

const PANEL_ORDER: usize = 16;
// λ·(panel width) budget for the oscillatory integral
const PANEL_PHASE: f64 = 8.0;

/// (α, β) with ϱ = α + β + 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
    rho: f64,
}

impl JacobiParams {
    /// Parameters in the Plancherel regime α > -1, |β| ≤ α + 1.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return domain("Jacobi parameters must be finite");
        }
        if alpha <= -1.0 {
            return Err(Error::Invariant(format!("alpha = {alpha} must exceed -1")));
        }
        if beta.abs() > alpha + 1.0 + 1e-12 {
            return Err(Error::Invariant(format!("|beta| = {} exceeds alpha + 1 = {}", beta.abs(), alpha + 1.0)));
        }
        Ok(Self::unchecked(alpha, beta))
    }

    pub(crate) fn unchecked(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, rho: alpha + beta + 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// α = β = -1/2, where φ_λ(r) = cos λr.
    pub fn is_cosine(&self) -> bool {
        self.alpha == -0.5 && self.beta == -0.5
    }

    /// First-order coefficient of the Jacobi operator at r > 0.
    pub fn drift(&self, r: f64) -> f64 {
        (2.0 * self.alpha + 1.0) / r.tanh() + (2.0 * self.beta + 1.0) * r.tanh()
    }
}

pub(crate) fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

pub(crate) fn ln_cosh(x: f64) -> f64 {
    let x = x.abs();
    x - std::f64::consts::LN_2 + (-2.0 * x).exp().ln_1p()
}

fn ln_sinhc(d: f64) -> f64 {
    if d < 1e-8 {
        d * d / 6.0
    } else if d > 20.0 {
        ln_sinh(d) - d.ln()
    } else {
        (d.sinh() / d).ln()
    }
}

/// w̃(r) = (2 sinh r)^{2α+1} (2 cosh r)^{2β+1}.
pub fn jacobi_weight(p: &JacobiParams, r: f64) -> f64 {
    let ea = 2.0 * p.alpha + 1.0;
    let eb = 2.0 * p.beta + 1.0;
    if r == 0.0 {
        return if ea > 0.0 {
            0.0
        } else if ea == 0.0 {
            2f64.powf(eb)
        } else {
            f64::INFINITY
        };
    }
    let r = r.abs();
    let ls = if ea == 0.0 { 0.0 } else { ea * (std::f64::consts::LN_2 + ln_sinh(r)) };
    let lc = if eb == 0.0 { 0.0 } else { eb * (std::f64::consts::LN_2 + ln_cosh(r)) };
    (ls + lc).exp()
}

/// c(λ) = 2^{ϱ-iλ} Γ(α+1) Γ(iλ) / (Γ((iλ+ϱ)/2) Γ((iλ+α-β+1)/2)), λ ≠ 0.
pub fn c_function(p: &JacobiParams, lambda: f64) -> Result<Complex64> {
    if lambda == 0.0 {
        return domain("c-function has a pole at lambda = 0");
    }
    Ok(ln_c(p, lambda)?.exp())
}

fn ln_c(p: &JacobiParams, lambda: f64) -> Result<Complex64> {
    let il = Complex64::new(0.0, lambda);
    let ln2 = std::f64::consts::LN_2;
    Ok((Complex64::new(p.rho, -lambda)) * ln2 + ln_gamma(p.alpha + 1.0)? + log_gamma(il)?
        - log_gamma((il + p.rho) * 0.5)?
        - log_gamma((il + p.alpha - p.beta + 1.0) * 0.5)?)
}

/// |c(λ)|^{-2}; `limiting` marks the continuous extension used at λ = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CInvSq {
    pub value: f64,
    pub limiting: bool,
}

pub fn c_function_inv_sq(p: &JacobiParams, lambda: f64) -> CInvSq {
    if lambda != 0.0 {
        if let Ok(l) = ln_c(p, lambda.abs()) {
            return CInvSq { value: (-2.0 * l.re).exp(), limiting: false };
        }
    }
    // Γ(iλ) ~ 1/(iλ) is cancelled only by a pole of a denominator factor
    let a = p.alpha - p.beta + 1.0;
    let value = if p.rho.abs() < 1e-14 {
        let c0 = (ln_gamma(p.alpha + 1.0).unwrap() - ln_gamma(0.5 * a).unwrap()).exp() * 0.5;
        1.0 / (c0 * c0)
    } else if a.abs() < 1e-14 {
        let c0 = (p.rho * std::f64::consts::LN_2 + ln_gamma(p.alpha + 1.0).unwrap() - ln_gamma(0.5 * p.rho).unwrap())
            .exp()
            * 0.5;
        1.0 / (c0 * c0)
    } else {
        0.0
    };
    CInvSq { value, limiting: true }
}

/// Plancherel density with the λ = 0 value filled in by continuity.
pub fn plancherel_density(p: &JacobiParams, lambda: f64) -> f64 {
    c_function_inv_sq(p, lambda).value
}

/// Q_δ(iλ+ρ) = ((α+β+1+iλ)/2)_{(p+q)/2} ((α-β+1+iλ)/2)_{(p-q)/2}.
pub fn kostant_q(params: &JacobiParams, k: KTypeIndex, lambda: f64) -> Complex64 {
    let il = Complex64::new(0.0, lambda);
    let n1 = ((k.p() as i64 + k.q() as i64) / 2) as u32;
    let n2 = ((k.p() as i64 - k.q() as i64) / 2) as u32;
    pochhammer((il + params.alpha + params.beta + 1.0) * 0.5, n1)
        * pochhammer((il + params.alpha - params.beta + 1.0) * 0.5, n2)
}

/// φ_λ^(α,β)(r).
pub fn jacobi_phi(p: &JacobiParams, lambda: f64, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return domain(format!("jacobi_phi needs r >= 0, got {r}"));
    }
    if !lambda.is_finite() {
        return domain("jacobi_phi needs finite lambda");
    }
    Ok(JacobiPhi::new(p).eval(lambda, r))
}

/// φ_λ(r) ≈ Σ w cos(λ s) + λ² Σ w₂ cos(λ s₂), valid for |λ| ≤ the build limit.
#[derive(Debug, Clone, Default)]
pub struct CosineRule {
    s: Vec<f64>,
    w: Vec<f64>,
    s2: Vec<f64>,
    w2: Vec<f64>,
}

impl CosineRule {
    pub fn eval(&self, lambda: f64) -> f64 {
        let a: f64 = self.s.iter().zip(&self.w).map(|(s, w)| w * (lambda * s).cos()).sum();
        if self.s2.is_empty() {
            return a;
        }
        let b: f64 = self.s2.iter().zip(&self.w2).map(|(s, w)| w * (lambda * s).cos()).sum();
        a + lambda * lambda * b
    }

    pub fn len(&self) -> usize {
        self.s.len() + self.s2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn extend_scaled(&mut self, other: &CosineRule, scale: f64) {
        self.s.extend_from_slice(&other.s);
        self.w.extend(other.w.iter().map(|w| w * scale));
        self.s2.extend_from_slice(&other.s2);
        self.w2.extend(other.w2.iter().map(|w| w * scale));
    }
}

/// φ values on a (λ, r) lattice, row-major in λ.
#[derive(Debug, Clone)]
pub struct PhiTable {
    pub lambdas: Vec<f64>,
    pub rs: Vec<f64>,
    data: Vec<f64>,
}

impl PhiTable {
    pub fn get(&self, i_lambda: usize, j_r: usize) -> f64 {
        self.data[i_lambda * self.rs.len() + j_r]
    }

    pub fn row(&self, i_lambda: usize) -> &[f64] {
        let n = self.rs.len();
        &self.data[i_lambda * n..(i_lambda + 1) * n]
    }
}

/// Reusable evaluator holding the quadrature rules for one parameter pair.
#[derive(Debug, Clone)]
pub struct JacobiPhi {
    p: JacobiParams,
    ln_const: f64,
    gl: Rule,
    gj: Option<Rule>,
    lowered: Option<Box<(JacobiPhi, JacobiPhi)>>,
}

#[derive(Clone, Copy, PartialEq)]
enum Path {
    Cosine,
    Series,
    Expansion,
    Integral,
}

impl JacobiPhi {
    pub fn new(p: &JacobiParams) -> Self {
        let gl = gauss_legendre(PANEL_ORDER);
        if p.alpha > -0.5 {
            let a = p.alpha;
            let ln_const = (a + 1.5) * std::f64::consts::LN_2 + ln_gamma(a + 1.0).unwrap()
                - 0.5 * std::f64::consts::PI.ln()
                - ln_gamma(a + 0.5).unwrap();
            let gj = gauss_jacobi(PANEL_ORDER, a - 0.5, 0.0);
            Self { p: *p, ln_const, gl, gj: Some(gj), lowered: None }
        } else if p.is_cosine() {
            Self { p: *p, ln_const: 0.0, gl, gj: None, lowered: None }
        } else {
            let e1 = JacobiPhi::new(&JacobiParams::unchecked(p.alpha + 1.0, p.beta - 1.0));
            let e2 = JacobiPhi::new(&JacobiParams::unchecked(p.alpha + 2.0, p.beta - 2.0));
            Self { p: *p, ln_const: 0.0, gl, gj: None, lowered: Some(Box::new((e1, e2))) }
        }
    }

    pub fn params(&self) -> &JacobiParams {
        &self.p
    }

    fn path(&self, lambda: f64, r: f64) -> Path {
        if self.p.is_cosine() {
            return Path::Cosine;
        }
        let sh = r.sinh();
        if sh <= 0.5 && lambda * sh <= 4.0 {
            return Path::Series;
        }
        let z = 1.0 / r.cosh().powi(2);
        if lambda >= 0.5 && z <= 0.3 && lambda * z <= 24.0 {
            return Path::Expansion;
        }
        Path::Integral
    }

    /// φ_λ(r) for r ≥ 0; even in λ.
    pub fn eval(&self, lambda: f64, r: f64) -> f64 {
        let lambda = lambda.abs();
        if r == 0.0 {
            return 1.0;
        }
        match self.path(lambda, r) {
            Path::Cosine => (lambda * r).cos(),
            Path::Series => self.series(lambda, r),
            Path::Expansion => {
                let c = ln_c(&self.p, lambda).unwrap().exp();
                self.expansion(lambda, r, c)
            }
            Path::Integral => self.cosine_rule(r, lambda).eval(lambda),
        }
    }

    /// Values on every (λ, r) pair; kernels are built once per r.
    pub fn table(&self, lambdas: &[f64], rs: &[f64]) -> PhiTable {
        let nl = lambdas.len();
        let nr = rs.len();
        let mut data = vec![0.0; nl * nr];
        let abs_l: Vec<f64> = lambdas.iter().map(|l| l.abs()).collect();
        let mut cs: Vec<Option<Complex64>> = vec![None; nl];
        for (j, &r) in rs.iter().enumerate() {
            let paths: Vec<Path> =
                abs_l.iter().map(|&l| if r == 0.0 { Path::Series } else { self.path(l, r) }).collect();
            let lmax = abs_l
                .iter()
                .zip(&paths)
                .filter(|(_, p)| **p == Path::Integral)
                .map(|(l, _)| *l)
                .fold(f64::NAN, f64::max);
            let rule = if lmax.is_nan() { None } else { Some(self.cosine_rule(r, lmax)) };
            for i in 0..nl {
                let l = abs_l[i];
                data[i * nr + j] = if r == 0.0 {
                    1.0
                } else {
                    match paths[i] {
                        Path::Cosine => (l * r).cos(),
                        Path::Series => self.series(l, r),
                        Path::Expansion => {
                            let c = *cs[i].get_or_insert_with(|| ln_c(&self.p, l).unwrap().exp());
                            self.expansion(l, r, c)
                        }
                        Path::Integral => rule.as_ref().unwrap().eval(l),
                    }
                };
            }
        }
        PhiTable { lambdas: lambdas.to_vec(), rs: rs.to_vec(), data }
    }

    fn series(&self, lambda: f64, r: f64) -> f64 {
        // terms are real: (a+k)(b+k) = (ϱ/2+k)² + λ²/4 for conjugate a, b
        let z = -r.sinh().powi(2);
        let (h, l4, c) = (0.5 * self.p.rho, 0.25 * lambda * lambda, self.p.alpha + 1.0);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 0..500 {
            let kf = k as f64;
            term *= ((h + kf).powi(2) + l4) / ((c + kf) * (kf + 1.0)) * z;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    fn expansion(&self, lambda: f64, r: f64, c: Complex64) -> f64 {
        let p = &self.p;
        let z = 1.0 / r.cosh().powi(2);
        let a = Complex64::new(0.5 * p.rho, -0.5 * lambda);
        let b = Complex64::new(0.5 * (p.alpha - p.beta + 1.0), -0.5 * lambda);
        let cc = Complex64::new(1.0, -lambda);
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 0..2000 {
            let kf = k as f64;
            term *= (a + kf) * (b + kf) / ((cc + kf) * (kf + 1.0)) * z;
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        let lc = std::f64::consts::LN_2 + ln_cosh(r);
        let pre = (Complex64::new(-p.rho, lambda) * lc).exp();
        2.0 * (c * pre * sum).re
    }

    /// Cosine-sum representation of r ↦ φ_λ(r) good for |λ| ≤ lambda_max.
    pub fn cosine_rule(&self, t: f64, lambda_max: f64) -> CosineRule {
        if let Some(pair) = &self.lowered {
            return self.contiguous_rule(pair, t, lambda_max);
        }
        if self.p.is_cosine() {
            return CosineRule { s: vec![t], w: vec![1.0], ..Default::default() };
        }
        let a = self.p.alpha;
        let b = self.p.beta;
        let mu = a - 0.5;
        let ln_pref = self.ln_const - 2.0 * a * ln_sinh(2.0 * t) + (a - b) * ln_cosh(t);
        let panels =
            ((lambda_max * t / PANEL_PHASE).ceil()).max((2.0 * mu.abs() * t / PANEL_PHASE).ceil()).max(1.0) as usize;
        let h = t / panels as f64;
        let (ka, kb, kc) = (a + b, a - b, a + 0.5);
        let lnc_t = ln_cosh(t);
        let kernel = |s: f64| -> f64 {
            let y = (ln_sinh(0.5 * (t + s)) + ln_sinh(0.5 * (t - s)) - lnc_t).exp();
            hyp2f1_real(ka, kb, kc, y)
        };
        let mut rule = CosineRule::default();
        rule.s.reserve(panels * PANEL_ORDER);
        rule.w.reserve(panels * PANEL_ORDER);
        for k in 0..panels - 1 {
            let lo = k as f64 * h;
            for (x, w) in self.gl.nodes.iter().zip(&self.gl.weights) {
                let s = lo + 0.5 * h * (x + 1.0);
                let ln_w = ln_pref + mu * (std::f64::consts::LN_2 + ln_sinh(t + s) + ln_sinh(t - s));
                rule.s.push(s);
                rule.w.push(0.5 * h * w * ln_w.exp() * kernel(s));
            }
        }
        // endpoint panel: (t - s)^μ carried by the Gauss–Jacobi weight
        let gj = self.gj.as_ref().unwrap();
        let scale = (0.5 * h).powf(mu + 1.0);
        for (x, w) in gj.nodes.iter().zip(&gj.weights) {
            let d = 0.5 * h * (1.0 - x);
            let s = t - d;
            let ln_w = ln_pref + mu * (std::f64::consts::LN_2 + ln_sinh(t + s) + ln_sinhc(d));
            rule.s.push(s);
            rule.w.push(scale * w * ln_w.exp() * kernel(s));
        }
        rule
    }

    fn contiguous_rule(&self, pair: &(JacobiPhi, JacobiPhi), t: f64, lambda_max: f64) -> CosineRule {
        // F(c) from F(c+1), F(c+2) at fixed a + b = ϱ, with c = α + 1
        let c = self.p.alpha + 1.0;
        let rho = self.p.rho;
        let z = -t.sinh().powi(2);
        let zm1 = -t.cosh().powi(2);
        let a_coef = -(c - (2.0 * c + 1.0 - rho) * z) / (c * zm1);
        let b0 = -(c + 1.0 - 0.5 * rho).powi(2) * z / ((c + 1.0) * c * zm1);
        let b1 = -z / (4.0 * (c + 1.0) * c * zm1);
        let r1 = pair.0.cosine_rule(t, lambda_max);
        let r2 = pair.1.cosine_rule(t, lambda_max);
        debug_assert!(r1.s2.is_empty() && r2.s2.is_empty());
        let mut out = CosineRule::default();
        out.extend_scaled(&r1, a_coef);
        out.extend_scaled(&r2, b0);
        out.s2 = r2.s.clone();
        out.w2 = r2.w.iter().map(|w| w * b1).collect();
        out
    }
}

/// ₂F₁(a, b; c; y) by its power series, 0 ≤ y < 1 moderate.
pub(crate) fn hyp2f1_real(a: f64, b: f64, c: f64, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..2000 {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * y;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}
