use std::fmt;
use std::sync::Arc;

use super::DunklSetting;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// Tolerance of the finite-difference Δ_κ annihilation gate.
pub const HARMONIC_GATE: f64 = 1e-6;

type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Poly {
    Constant(f64),
    Linear(usize, f64),
    Cross(usize, usize, f64),
    /// Σ c_i x_i²
    Diagonal(Vec<f64>),
    Custom(Evaluator),
}

/// A homogeneous polynomial annihilated by Δ_κ, evaluated on all of R^n;
/// its sphere values are S(x') = S(x)/|x|^m.
#[derive(Clone)]
pub struct HHarmonic {
    id: String,
    degree: u32,
    poly: Poly,
}

impl fmt::Debug for HHarmonic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HHarmonic").field("id", &self.id).field("degree", &self.degree).finish()
    }
}

impl PartialEq for HHarmonic {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.degree == other.degree
    }
}

impl HHarmonic {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.poly {
            Poly::Constant(c) => *c,
            Poly::Linear(j, c) => c * x[*j],
            Poly::Cross(i, j, c) => c * x[*i] * x[*j],
            Poly::Diagonal(c) => c.iter().zip(x).map(|(c, x)| c * x * x).sum(),
            Poly::Custom(f) => f(x),
        }
    }

    /// A user-supplied harmonic of the given degree, admitted only if the
    /// finite-difference Dunkl Laplacian annihilates it.
    pub fn custom(
        setting: &DunklSetting,
        id: impl Into<String>,
        degree: u32,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let h = Self { id: id.into(), degree, poly: Poly::Custom(Arc::new(f)) };
        let res = laplacian_residual(setting, &h);
        if !(res <= HARMONIC_GATE) {
            return Err(Error::Invariant(format!("'{}' is not annihilated by the Dunkl Laplacian: {res:e}", h.id)));
        }
        Ok(h)
    }
}

/// T_i f(x) = ∂_i f(x) + κ_i (f(x) - f(σ_i x)) / x_i by central differences.
pub fn dunkl_operator_fd(setting: &DunklSetting, f: &dyn Fn(&[f64]) -> f64, i: usize, x: &[f64], h: f64) -> f64 {
    let mut p = x.to_vec();
    p[i] = x[i] + h;
    let fp = f(&p);
    p[i] = x[i] - h;
    let fm = f(&p);
    p[i] = -x[i];
    let fs = f(&p);
    (fp - fm) / (2.0 * h) + setting.kappa()[i] * (f(x) - fs) / x[i]
}

/// Σ_i T_i² f(x).
pub fn dunkl_laplacian_fd(setting: &DunklSetting, f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> f64 {
    (0..setting.n())
        .map(|i| {
            let inner = |y: &[f64]| dunkl_operator_fd(setting, f, i, y, h);
            dunkl_operator_fd(setting, &inner, i, x, h)
        })
        .sum()
}

/// Points on the unit sphere off every coordinate hyperplane.
pub(crate) fn probe_points(n: usize) -> Vec<Vec<f64>> {
    (0..6)
        .map(|k| {
            let v: Vec<f64> = (0..n)
                .map(|i| {
                    let s = if (i + k) % 2 == 0 { 1.0 } else { -1.0 };
                    s * (0.35 + 0.13 * ((i * 7 + k * 3) % 5) as f64)
                })
                .collect();
            let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            v.into_iter().map(|c| c / r).collect()
        })
        .collect()
}

/// max |Δ_κ S| / max |S| over the probe points.
pub fn laplacian_residual(setting: &DunklSetting, s: &HHarmonic) -> f64 {
    let f = |x: &[f64]| s.eval(x);
    let pts = probe_points(setting.n());
    let scale = pts.iter().map(|x| s.eval(x).abs()).fold(0.0, f64::max).max(1e-300);
    pts.iter().map(|x| dunkl_laplacian_fd(setting, &f, x, 1e-3).abs()).fold(0.0, f64::max) / scale
}

/// ∫_{S^{n-1}} x^{2b} h_κ² dσ = 2 Π Γ(b_i+κ_i+½) / Γ(|b|+γ+n/2), in logs.
pub(crate) fn ln_sphere_moment(setting: &DunklSetting, half_exponents: &[u32]) -> f64 {
    let mut acc = std::f64::consts::LN_2;
    let mut total = 0.0;
    for (b, k) in half_exponents.iter().zip(setting.kappa()) {
        acc += ln_gamma(*b as f64 + k + 0.5).expect("positive argument");
        total += *b as f64;
    }
    acc - ln_gamma(total + setting.gamma() + setting.n() as f64 / 2.0).expect("positive argument")
}

/// (x^{2a}, x^{2b})_κ with a_κ ∫ h_κ² dσ = 1.
fn moment(setting: &DunklSetting, half_exponents: &[u32]) -> f64 {
    (ln_sphere_moment(setting, half_exponents) - setting.a_kappa_inv().ln()).exp()
}

fn unit(n: usize, i: usize, k: u32) -> Vec<u32> {
    let mut e = vec![0; n];
    e[i] = k;
    e
}

/// (Σa_i x_i², Σb_j x_j²)_κ.
fn diagonal_inner(setting: &DunklSetting, a: &[f64], b: &[f64]) -> f64 {
    let n = setting.n();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if a[i] == 0.0 || b[j] == 0.0 {
                continue;
            }
            let mut e = vec![0; n];
            e[i] += 2;
            e[j] += 2;
            // x_i² x_j² = x^{2·(e/2)}
            let half: Vec<u32> = e.iter().map(|v| v / 2).collect();
            s += a[i] * b[j] * moment(setting, &half);
        }
    }
    s
}

/// Orthonormal built-in h-harmonics of degree 0, 1 or 2 for Z_2^d.
pub fn builtin_basis(setting: &DunklSetting, degree: u32) -> Result<Vec<HHarmonic>> {
    let n = setting.n();
    match degree {
        0 => Ok(vec![HHarmonic { id: "1".into(), degree: 0, poly: Poly::Constant(1.0) }]),
        1 => Ok((0..n)
            .map(|j| {
                let norm = moment(setting, &unit(n, j, 1)).sqrt();
                HHarmonic { id: format!("x{}", j + 1), degree: 1, poly: Poly::Linear(j, 1.0 / norm) }
            })
            .collect()),
        2 => {
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let mut e = vec![0; n];
                    e[i] = 1;
                    e[j] = 1;
                    let norm = moment(setting, &e).sqrt();
                    out.push(HHarmonic {
                        id: format!("x{}x{}", i + 1, j + 1),
                        degree: 2,
                        poly: Poly::Cross(i, j, 1.0 / norm),
                    });
                }
            }
            // x_i² - (1+2κ_i)|x|²/(n+2γ), i < n, orthonormalized
            let denom = n as f64 + 2.0 * setting.gamma();
            let mut done: Vec<Vec<f64>> = Vec::new();
            for i in 0..n.saturating_sub(1) {
                let mut c = vec![-(1.0 + 2.0 * setting.kappa()[i]) / denom; n];
                c[i] += 1.0;
                for q in &done {
                    let proj = diagonal_inner(setting, &c, q);
                    for (ci, qi) in c.iter_mut().zip(q) {
                        *ci -= proj * qi;
                    }
                }
                let norm = diagonal_inner(setting, &c, &c).sqrt();
                c.iter_mut().for_each(|v| *v /= norm);
                done.push(c.clone());
                out.push(HHarmonic { id: format!("q{}", i + 1), degree: 2, poly: Poly::Diagonal(c) });
            }
            Ok(out)
        }
        _ => Err(Error::Domain(format!("built-in h-harmonics cover degrees 0 to 2, got {degree}"))),
    }
}

/// Looks up a built-in harmonic by id ("1", "x2", "x1x3", "q1", ...).
pub fn builtin_harmonic(setting: &DunklSetting, id: &str) -> Result<HHarmonic> {
    (0..=2)
        .flat_map(|m| builtin_basis(setting, m).unwrap_or_default())
        .find(|h| h.id == id)
        .ok_or_else(|| Error::Domain(format!("no built-in h-harmonic '{id}' in dimension {}", setting.n())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dunkl::{make_setting, RootConfig};
    use crate::numerics::RadialGrid;

    fn settings() -> Vec<DunklSetting> {
        vec![
            make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap(),
            make_setting(3, RootConfig::Z2Power(3), &[0.0]).unwrap(),
            make_setting(3, RootConfig::Z2Power(2), &[1.5, 0.25]).unwrap(),
            make_setting(1, RootConfig::Z2Power(1), &[0.8]).unwrap(),
        ]
    }

    #[test]
    fn dunkl_operator_on_coordinates() {
        for s in settings() {
            for x in probe_points(s.n()) {
                for i in 0..s.n() {
                    for j in 0..s.n() {
                        let f = |y: &[f64]| y[j];
                        let v = dunkl_operator_fd(&s, &f, i, &x, 1e-3);
                        let expect = if i == j { 1.0 + 2.0 * s.kappa()[i] } else { 0.0 };
                        assert!((v - expect).abs() < 1e-9, "T_{i} x_{j} = {v}");
                        let twice = |y: &[f64]| dunkl_operator_fd(&s, &f, i, y, 1e-3);
                        assert!(dunkl_operator_fd(&s, &twice, i, &x, 1e-3).abs() < 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn builtin_bases_are_harmonic_and_orthonormal() {
        for s in settings() {
            for m in 0..=2 {
                let basis = builtin_basis(&s, m).unwrap();
                let expect = match m {
                    0 => 1,
                    1 => s.n(),
                    _ => s.n() * (s.n() + 1) / 2 - 1,
                };
                assert_eq!(basis.len(), expect);
                for h in &basis {
                    assert!(laplacian_residual(&s, h) <= HARMONIC_GATE, "{} in n = {}", h.id(), s.n());
                }
                // Gram matrix by angular quadrature in n = 2
                if s.n() == 2 {
                    let g = RadialGrid::graded(std::f64::consts::FRAC_PI_4, 8, 16, 30).unwrap();
                    let inner = |a: &HHarmonic, b: &HHarmonic| {
                        let f = |t: f64| {
                            let x = [t.cos(), t.sin()];
                            let w = x[0].abs().powf(2.0 * s.kappa()[0]) * x[1].abs().powf(2.0 * s.kappa()[1]);
                            a.eval(&x) * b.eval(&x) * w
                        };
                        // eight graded pieces of [0, 2π]
                        let q = std::f64::consts::FRAC_PI_4;
                        (0..8)
                            .map(|k| {
                                let lo = k as f64 * q;
                                if k % 2 == 0 {
                                    g.integrate_fn(|u| f(lo + u))
                                } else {
                                    g.integrate_fn(|u| f(lo + q - u))
                                }
                            })
                            .sum::<f64>()
                            / s.a_kappa_inv()
                    };
                    for a in &basis {
                        for b in &basis {
                            let v = inner(a, b);
                            let e = if a.id() == b.id() { 1.0 } else { 0.0 };
                            assert!((v - e).abs() < 1e-9, "({}, {}) = {v}", a.id(), b.id());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn custom_harmonics_are_gated() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        // x1 x2 is harmonic for every κ; x1² is not
        assert!(HHarmonic::custom(&s, "xy", 2, |x| x[0] * x[1]).is_ok());
        assert!(matches!(HHarmonic::custom(&s, "xx", 2, |x| x[0] * x[0]), Err(Error::Invariant(_))));
        // degree 3: x1 x2 (x1² - c x2²) with c = (3 + 2κ1) / (3 + 2κ2)
        let c = (3.0 + 2.0 * 0.3) / (3.0 + 2.0 * 0.7);
        let h = HHarmonic::custom(&s, "cubic", 3, move |x| x[0] * x[1] * (x[0] * x[0] - c * x[1] * x[1]));
        assert!(h.is_ok(), "{h:?}");
    }

    #[test]
    fn lookup_by_id() {
        let s = make_setting(3, RootConfig::Z2Power(3), &[0.5]).unwrap();
        assert_eq!(builtin_harmonic(&s, "x1x3").unwrap().degree(), 2);
        assert_eq!(builtin_harmonic(&s, "x2").unwrap().degree(), 1);
        assert!(builtin_harmonic(&s, "x4").is_err());
    }
}
