//! Dunkl analysis for the reflection groups Z_2^d acting on R^n by sign
//! changes of the first d coordinates.
//!
//! A function is handled as a sum of components f_m(|x|) S(x') with S an
//! h-harmonic of degree m. The Dunkl transform of such a component is
//! (-i)^m λ^m b_m(λ) S(ω) with b_m the Hankel transform of f_m r^{-m} at
//! order λ_κ+m. Constants are fixed so that the radial Gaussian is its own
//! transform.

mod audit;
mod harmonics;

pub use audit::{
    dunkl_sharpness_witness, uncertainty_audit_thm13, DunklAuditOptions, DunklWitness, DunklWitnessOptions,
};
pub use harmonics::{
    builtin_basis, builtin_harmonic, dunkl_laplacian_fd, dunkl_operator_fd, laplacian_residual, HHarmonic,
    HARMONIC_GATE,
};

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result, Warning};
use crate::numerics::{eigen_residual, OpKind, RadialGrid, SampledRadialFunction, SpectralSamples, WeightKind};
use crate::specfun::{bessel_psi, ln_gamma, psi_unchecked};
use crate::transforms::{
    hankel_forward, hankel_inverse, radial_norm_sq, spectral_norm_sq, spectral_tail_warning, PairKind,
};

/// Z_2^d: reflections in the first d coordinate hyperplanes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootConfig {
    Z2Power(usize),
}

impl FromStr for RootConfig {
    type Err = Error;

    /// Accepts "Z2" and "Z2^d".
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let unsupported = || Error::UnsupportedRoots(format!("'{s}' (only Z2^d is available)"));
        let rest = t.strip_prefix("Z2").or_else(|| t.strip_prefix("z2")).ok_or_else(unsupported)?;
        if rest.is_empty() {
            return Ok(RootConfig::Z2Power(1));
        }
        let d = rest.strip_prefix('^').ok_or_else(unsupported)?;
        d.parse().map(RootConfig::Z2Power).map_err(|_| unsupported())
    }
}

impl fmt::Display for RootConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootConfig::Z2Power(d) => write!(f, "Z2^{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DunklSetting {
    n: usize,
    root: RootConfig,
    /// κ per coordinate; zero past the first d.
    kappa: Vec<f64>,
    gamma: f64,
    lambda_kappa: f64,
    a_kappa_inv: f64,
}

/// κ may be given once per root or as a single value for all of them.
pub fn make_setting(n: usize, root: RootConfig, kappa_values: &[f64]) -> Result<DunklSetting> {
    let RootConfig::Z2Power(d) = root;
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if d > n {
        return Err(Error::UnsupportedRoots(format!("Z2^{d} does not act on R^{n}")));
    }
    let per_root: Vec<f64> = match kappa_values.len() {
        l if l == d => kappa_values.to_vec(),
        1 => vec![kappa_values[0]; d],
        0 if d == 0 => Vec::new(),
        l => return Err(Error::Domain(format!("{l} multiplicities for {d} positive roots"))),
    };
    if let Some(k) = per_root.iter().find(|k| !(**k >= 0.0 && k.is_finite())) {
        return Err(Error::Domain(format!("multiplicity {k} must be finite and nonnegative")));
    }
    let mut kappa = per_root;
    kappa.resize(n, 0.0);
    let gamma: f64 = kappa.iter().sum();
    let lambda_kappa = gamma + (n as f64 - 2.0) / 2.0;
    // 2 Π Γ(κ_i+½) / Γ(γ+n/2)
    let mut ln_a = std::f64::consts::LN_2 - ln_gamma(gamma + n as f64 / 2.0)?;
    for k in &kappa {
        ln_a += ln_gamma(k + 0.5)?;
    }
    Ok(DunklSetting { n, root, kappa, gamma, lambda_kappa, a_kappa_inv: ln_a.exp() })
}

impl DunklSetting {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> RootConfig {
        self.root
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn lambda_kappa(&self) -> f64 {
        self.lambda_kappa
    }

    /// ∫_{S^{n-1}} h_κ² dσ.
    pub fn a_kappa_inv(&self) -> f64 {
        self.a_kappa_inv
    }

    /// Π |x_i|^{2κ_i}.
    pub fn h_kappa_sq(&self, x: &[f64]) -> f64 {
        self.kappa.iter().zip(x).filter(|(k, _)| **k != 0.0).map(|(k, x)| x.abs().powf(2.0 * k)).product()
    }

    /// Order λ_κ+m of the Hankel transform carrying degree-m components.
    pub fn order(&self, m: u32) -> f64 {
        self.lambda_kappa + m as f64
    }
}

/// φ_{κ,λ}(x) = a_κ^{-1} ψ_{λ_κ}(λ|x|) / Γ(λ_κ+1).
pub fn phi_kappa(setting: &DunklSetting, lambda: f64, x_norm: f64) -> Result<f64> {
    if !(x_norm >= 0.0) {
        return Err(Error::Domain(format!("|x| = {x_norm} must be nonnegative")));
    }
    let psi = bessel_psi(setting.lambda_kappa, lambda * x_norm)?;
    Ok(setting.a_kappa_inv * psi * (-ln_gamma(setting.lambda_kappa + 1.0)?).exp())
}

/// f_m(|x|) S(x'), with S an h-harmonic of degree m.
#[derive(Debug, Clone)]
pub struct HarmonicComponent {
    pub harmonic: HHarmonic,
    pub profile: SampledRadialFunction,
}

impl HarmonicComponent {
    pub fn new(harmonic: HHarmonic, profile: SampledRadialFunction) -> Self {
        Self { harmonic, profile }
    }

    pub fn degree(&self) -> u32 {
        self.harmonic.degree()
    }

    pub fn harmonic_id(&self) -> &str {
        self.harmonic.id()
    }

    /// f_m(|x|) S(x/|x|).
    pub fn eval(&self, x: &[f64], f_m: f64) -> f64 {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r == 0.0 {
            return if self.degree() == 0 { f_m * self.harmonic.eval(x) } else { 0.0 };
        }
        f_m * self.harmonic.eval(x) / r.powi(self.degree() as i32)
    }
}

/// Rows m, harmonic_id, node, value.
pub fn write_components_csv<W: Write>(components: &[HarmonicComponent], out: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["m", "harmonic_id", "node", "value"])?;
    for c in components {
        for (r, v) in c.profile.nodes().iter().zip(c.profile.values()) {
            w.write_record([
                c.degree().to_string(),
                c.harmonic_id().to_string(),
                format!("{r:.17e}"),
                format!("{v:.17e}"),
            ])?;
        }
    }
    w.flush()
}

/// g = f_m r^{-m}, refusing profiles that are not O(r^m) at the origin.
fn reduced_profile(comp: &HarmonicComponent) -> Result<SampledRadialFunction> {
    let m = comp.degree();
    let f = &comp.profile;
    if m == 0 {
        return Ok(f.clone());
    }
    let singular =
        |why: String| Err(Error::SingularProfile(format!("degree {m} component '{}': {why}", comp.harmonic_id())));
    let vanishes_near_zero = f.support_hint().is_some_and(|(a, _)| a > 0.0);
    if !vanishes_near_zero {
        let pts: Vec<(f64, f64)> = f.nodes().iter().zip(f.values()).map(|(&r, &v)| (r, v)).collect();
        if pts.iter().any(|&(r, v)| r == 0.0 && v != 0.0) {
            return singular("nonzero value at r = 0".into());
        }
        let near: Vec<(f64, f64)> = pts.iter().copied().filter(|&(r, _)| r > 0.0).take(2).collect();
        if let [(r1, v1), (r2, v2)] = near[..] {
            if v1 != 0.0 && v2 != 0.0 {
                let slope = (v2 / v1).abs().ln() / (r2 / r1).ln();
                if slope < m as f64 - 0.5 {
                    return singular(format!("decays like r^{slope:.2} at the origin"));
                }
            }
        }
    }
    let values = f
        .nodes()
        .iter()
        .zip(f.values())
        .map(|(&r, &v)| if r == 0.0 || v == 0.0 { 0.0 } else { v / r.powi(m as i32) })
        .collect();
    let g = SampledRadialFunction::new(Arc::clone(f.grid()), values)?;
    match f.support_hint() {
        Some((a, b)) => g.with_support(a, b),
        None => Ok(g),
    }
}

/// b_m(λ) = H^{(λ_κ+m)}(f_m r^{-m})(λ).
pub fn component_transform(
    setting: &DunklSetting,
    comp: &HarmonicComponent,
    lambdas: &Arc<RadialGrid>,
) -> Result<SpectralSamples> {
    let g = reduced_profile(comp)?;
    hankel_forward(&g, setting.order(comp.degree()), lambdas)
}

/// A component together with its b_m.
#[derive(Debug, Clone)]
pub struct TransformedComponent {
    pub component: HarmonicComponent,
    pub transform: SpectralSamples,
}

pub fn transform_components(
    setting: &DunklSetting,
    components: &[HarmonicComponent],
    lambdas: &Arc<RadialGrid>,
) -> Result<Vec<TransformedComponent>> {
    components
        .iter()
        .map(|c| {
            Ok(TransformedComponent { component: c.clone(), transform: component_transform(setting, c, lambdas)? })
        })
        .collect()
}

/// Γ(λ_κ+1) / (2^m Γ(λ_κ+m+1)), which makes ∫ P_λf dμ_{λ_κ}(λ) = f.
pub fn projection_factor(setting: &DunklSetting, m: u32) -> f64 {
    let lk = setting.lambda_kappa;
    (ln_gamma(lk + 1.0).expect("order above -1")
        - m as f64 * std::f64::consts::LN_2
        - ln_gamma(lk + m as f64 + 1.0).expect("order above -1"))
    .exp()
}

/// λ^{2m} b r^m ψ_{λ_κ+m}(λr) times [`projection_factor`].
fn projection_kernel(setting: &DunklSetting, m: u32, lambda: f64, b: f64, r: f64) -> f64 {
    if b == 0.0 {
        return 0.0;
    }
    let scale = (lambda * r).powi(m as i32) * lambda.powi(m as i32);
    b * scale * projection_factor(setting, m) * psi_unchecked(setting.order(m), (lambda * r).abs())
}

/// The degree-m piece of f ∗_κ φ_{κ,λ}; the full projection at x is
/// profile(|x|) S(x').
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentProjection {
    pub degree: u32,
    pub harmonic_id: String,
    /// b_m(λ).
    pub coefficient: f64,
    pub profile: SampledRadialFunction,
    pub residual: f64,
    pub warning: Option<Warning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DunklProjection {
    pub lambda: f64,
    /// -λ²
    pub eigenvalue: f64,
    pub components: Vec<ComponentProjection>,
}

impl DunklProjection {
    /// Rows m, harmonic_id, node, value.
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "harmonic_id", "node", "value"])?;
        for c in &self.components {
            for (r, v) in c.profile.nodes().iter().zip(c.profile.values()) {
                w.write_record([
                    c.degree.to_string(),
                    c.harmonic_id.clone(),
                    format!("{r:.17e}"),
                    format!("{v:.17e}"),
                ])?;
            }
        }
        w.flush()
    }

    pub fn max_residual(&self) -> f64 {
        self.components.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}

pub fn dunkl_project(
    setting: &DunklSetting,
    components: &[TransformedComponent],
    lambda: f64,
    r_grid: &Arc<RadialGrid>,
) -> Result<DunklProjection> {
    let eigenvalue = -lambda * lambda;
    let mut out = Vec::with_capacity(components.len());
    for tc in components {
        let m = tc.component.degree();
        let b = tc.transform.interpolate(lambda)?;
        let profile =
            SampledRadialFunction::from_fn(Arc::clone(r_grid), |r| projection_kernel(setting, m, lambda, b, r))?;
        let check =
            eigen_residual(&profile, OpKind::DunklRadial { lambda_kappa: setting.lambda_kappa, m }, eigenvalue)?;
        out.push(ComponentProjection {
            degree: m,
            harmonic_id: tc.component.harmonic_id().to_string(),
            coefficient: b,
            profile,
            residual: check.residual,
            warning: check.warning,
        });
    }
    Ok(DunklProjection { lambda, eigenvalue, components: out })
}

/// f ∗_κ φ_{κ,λ}(x) from the b_m(λ).
fn projection_value(
    setting: &DunklSetting,
    components: &[TransformedComponent],
    b: &[f64],
    lambda: f64,
    x: &[f64],
) -> f64 {
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    components
        .iter()
        .zip(b)
        .map(|(tc, &b)| {
            let m = tc.component.degree();
            if b == 0.0 || (m > 0 && r == 0.0) {
                return 0.0;
            }
            // S(x) = |x|^m S(x') absorbs the r^m of the kernel
            let s = tc.component.harmonic.eval(x);
            b * lambda.powi(2 * m as i32)
                * projection_factor(setting, m)
                * psi_unchecked(setting.order(m), lambda * r)
                * s
        })
        .sum()
}

/// λ ↦ f ∗_κ φ_{κ,λ}(x) on `lambdas`, carrying the order-λ_κ Hankel
/// measure. b_m is read off directly on its own grid and interpolated
/// elsewhere.
pub fn projection_samples(
    setting: &DunklSetting,
    components: &[TransformedComponent],
    x: &[f64],
    lambdas: &Arc<RadialGrid>,
) -> Result<SpectralSamples> {
    if x.len() != setting.n {
        return Err(Error::Domain(format!("point has {} coordinates in dimension {}", x.len(), setting.n)));
    }
    let same: Vec<bool> = components
        .iter()
        .map(|c| Arc::ptr_eq(c.transform.grid(), lambdas) || c.transform.lambdas() == lambdas.nodes())
        .collect();
    let mut values = Vec::with_capacity(lambdas.len());
    let mut b = vec![0.0; components.len()];
    for (k, &l) in lambdas.nodes().iter().enumerate() {
        for (j, tc) in components.iter().enumerate() {
            b[j] = if same[j] { tc.transform.values()[k] } else { tc.transform.interpolate(l)? };
        }
        values.push(projection_value(setting, components, &b, l, x));
    }
    SpectralSamples::new(Arc::clone(lambdas), values, WeightKind::HankelMeasure { alpha: setting.lambda_kappa })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DunklMean {
    pub x: Vec<f64>,
    /// F_x(r) = f ∗_κ μ_r(x).
    pub profile: SampledRadialFunction,
    pub spectral: SpectralSamples,
    pub warnings: Vec<Warning>,
}

/// F_x(r) = ∫ f ∗_κ φ_{κ,λ}(x) ψ_{λ_κ}(λr) dμ_{λ_κ}(λ).
pub fn dunkl_spherical_mean(
    setting: &DunklSetting,
    components: &[TransformedComponent],
    x: &[f64],
    r_grid: &Arc<RadialGrid>,
) -> Result<DunklMean> {
    // the components' own λ-grid; zero input has none and uses r_grid
    let lambdas = components.first().map_or(r_grid, |c| c.transform.grid());
    let spectral = projection_samples(setting, components, x, lambdas)?;
    let profile = hankel_inverse(&spectral, setting.lambda_kappa, r_grid)?;
    let warnings = spectral_tail_warning(&spectral).into_iter().collect();
    Ok(DunklMean { x: x.to_vec(), profile, spectral, warnings })
}

/// Σ_m ∫|b_m|² dμ_{λ_κ+m} against Σ_m ∫|f_m r^{-m}|² dμ_{λ_κ+m}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentPlancherel {
    pub spectral: f64,
    pub radial: f64,
}

impl ComponentPlancherel {
    pub fn rel_error(&self) -> f64 {
        let scale = self.radial.abs().max(self.spectral.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.spectral - self.radial).abs() / scale
        }
    }
}

pub fn component_plancherel(
    setting: &DunklSetting,
    components: &[TransformedComponent],
) -> Result<ComponentPlancherel> {
    let mut spectral = 0.0;
    let mut radial = 0.0;
    for tc in components {
        let alpha = setting.order(tc.component.degree());
        spectral += spectral_norm_sq(&tc.transform);
        radial += radial_norm_sq(&reduced_profile(&tc.component)?, PairKind::Hankel { alpha });
    }
    Ok(ComponentPlancherel { spectral, radial })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::numerics::profiles::gaussian;
    use crate::numerics::{make_grid, ode_residual};
    use crate::specfun::gamma;

    fn gauss_grid() -> Arc<RadialGrid> {
        RadialGrid::uniform_panels(0.0, 12.0, 48, 16).unwrap().into_shared()
    }

    fn lambdas() -> Arc<RadialGrid> {
        make_grid(12.0, 48, 16).unwrap().into_shared()
    }

    fn gaussian_component(s: &DunklSetting, id: &str) -> HarmonicComponent {
        let h = builtin_harmonic(s, id).unwrap();
        let m = h.degree() as i32;
        let f = SampledRadialFunction::from_fn(gauss_grid(), |r| r.powi(m) * gaussian(r)).unwrap();
        HarmonicComponent::new(h, f)
    }

    #[test]
    fn setting_arithmetic() {
        let s = make_setting(3, RootConfig::Z2Power(3), &[0.0]).unwrap();
        assert_eq!((s.gamma(), s.lambda_kappa()), (0.0, 0.5));
        // |S²| = 4π
        assert!((s.a_kappa_inv() - 4.0 * std::f64::consts::PI).abs() < 1e-13);
        let s = make_setting(1, "Z2".parse().unwrap(), &[0.7]).unwrap();
        assert_eq!(s.lambda_kappa(), 0.7 - 0.5);
        let s = make_setting(4, RootConfig::Z2Power(2), &[0.5, 1.0]).unwrap();
        assert_eq!(s.kappa(), &[0.5, 1.0, 0.0, 0.0]);
        assert_eq!(s.lambda_kappa(), 1.5 + 1.0);
    }

    #[test]
    fn unsupported_configurations() {
        assert!(matches!("A2".parse::<RootConfig>(), Err(Error::UnsupportedRoots(_))));
        assert!(matches!("Z2^x".parse::<RootConfig>(), Err(Error::UnsupportedRoots(_))));
        assert_eq!("Z2^3".parse::<RootConfig>().unwrap(), RootConfig::Z2Power(3));
        assert!(matches!(make_setting(2, RootConfig::Z2Power(3), &[1.0]), Err(Error::UnsupportedRoots(_))));
        assert!(make_setting(2, RootConfig::Z2Power(2), &[-0.1]).is_err());
        assert!(make_setting(3, RootConfig::Z2Power(2), &[0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn sphere_normalization_matches_angular_quadrature() {
        let q = std::f64::consts::FRAC_PI_2;
        let g = RadialGrid::graded(q / 2.0, 8, 16, 40).unwrap();
        for (k1, k2) in [(0.0, 0.0), (0.3, 0.7), (1.5, 0.25), (0.05, 2.0)] {
            let s = make_setting(2, RootConfig::Z2Power(2), &[k1, k2]).unwrap();
            let f = |t: f64| t.cos().abs().powf(2.0 * k1) * t.sin().abs().powf(2.0 * k2);
            // four quadrants, each split at π/4 and graded toward both ends
            let quadrant = g.integrate_fn(f) + g.integrate_fn(|u| f(q - u));
            let total = 4.0 * quadrant;
            assert!((s.a_kappa_inv() - total).abs() < 1e-10 * total, "{} vs {total}", s.a_kappa_inv());
        }
    }

    #[test]
    fn phi_kappa_origin_and_eigenfunction() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let lk = s.lambda_kappa();
        let origin = s.a_kappa_inv() / gamma(lk + 1.0).unwrap();
        assert!((phi_kappa(&s, 2.0, 0.0).unwrap() - origin).abs() < 1e-15 * origin);
        for l in [0.5, 2.0, 7.0] {
            for r in [0.4, 1.3, 3.0] {
                let phi = |x: f64| phi_kappa(&s, l, x).unwrap();
                assert_eq!(phi_kappa(&s, -l, r).unwrap(), phi(r));
                let res = ode_residual(phi, r, 1e-3, (2.0 * lk + 1.0) / r, l * l);
                assert!(res < 1e-4, "lambda {l} r {r}: {res}");
            }
        }
    }

    #[test]
    fn gaussian_fixed_points_at_shifted_orders() {
        for s in [
            make_setting(2, RootConfig::Z2Power(2), &[0.0]).unwrap(),
            make_setting(3, RootConfig::Z2Power(3), &[0.0]).unwrap(),
            make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap(),
        ] {
            let ls = lambdas();
            for id in ["1", "x1", "x1x2", "q1"] {
                let b = component_transform(&s, &gaussian_component(&s, id), &ls).unwrap();
                for (l, v) in b.lambdas().iter().zip(b.values()) {
                    assert!((v - gaussian(*l)).abs() < 1e-8, "{id} at {l}: {v}");
                }
            }
            let zero =
                HarmonicComponent::new(builtin_harmonic(&s, "x2").unwrap(), SampledRadialFunction::zero(gauss_grid()));
            assert!(component_transform(&s, &zero, &ls).unwrap().values().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn singular_profiles_are_refused() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let h = builtin_harmonic(&s, "x1").unwrap();
        let f = SampledRadialFunction::from_fn(gauss_grid(), gaussian).unwrap();
        let c = HarmonicComponent::new(h.clone(), f);
        assert!(matches!(component_transform(&s, &c, &lambdas()), Err(Error::SingularProfile(_))));
        // a profile vanishing near the origin passes whatever its shape
        let g = SampledRadialFunction::from_fn(gauss_grid(), |r| if r > 1.0 { gaussian(r) } else { 0.0 })
            .unwrap()
            .with_support(1.0, 12.0)
            .unwrap();
        assert!(component_transform(&s, &HarmonicComponent::new(h, g), &lambdas()).is_ok());
    }

    #[test]
    fn radial_projection_is_phi_kappa() {
        let s = make_setting(3, RootConfig::Z2Power(2), &[1.5, 0.25]).unwrap();
        let tc = transform_components(&s, &[gaussian_component(&s, "1")], &lambdas()).unwrap();
        let rg = RadialGrid::uniform_panels(0.0, 6.0, 12, 16).unwrap().into_shared();
        let l = tc[0].transform.lambdas()[100];
        let b = tc[0].transform.values()[100];
        let p = dunkl_project(&s, &tc, l, &rg).unwrap();
        let scale = gamma(s.lambda_kappa() + 1.0).unwrap() / s.a_kappa_inv();
        for (r, v) in rg.nodes().iter().zip(p.components[0].profile.values()) {
            let expect = b * scale * phi_kappa(&s, l, *r).unwrap();
            assert!((v - expect).abs() < 1e-10 * b.abs(), "{v} vs {expect}");
        }
    }

    #[test]
    fn projections_are_eigenprofiles() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let comps: Vec<_> = ["1", "x2", "x1x2", "q1"].iter().map(|id| gaussian_component(&s, id)).collect();
        let tc = transform_components(&s, &comps, &lambdas()).unwrap();
        let rg = RadialGrid::trapezoid(0.0, 8.0, 1601).unwrap().into_shared();
        for l in [0.5, 1.7, 4.0] {
            let p = dunkl_project(&s, &tc, l, &rg).unwrap();
            assert_eq!(p.eigenvalue, -l * l);
            assert!(p.max_residual() <= 1e-4, "lambda {l}: {}", p.max_residual());
        }
        assert!(matches!(dunkl_project(&s, &tc, 20.0, &rg), Err(Error::OutOfWindow { .. })));
        let none = dunkl_project(&s, &[], 1.0, &rg).unwrap();
        assert!(none.components.is_empty());
        let zero = transform_components(
            &s,
            &[HarmonicComponent::new(builtin_harmonic(&s, "1").unwrap(), SampledRadialFunction::zero(gauss_grid()))],
            &lambdas(),
        )
        .unwrap();
        assert!(dunkl_project(&s, &zero, 1.0, &rg).unwrap().components[0].profile.max_abs() == 0.0);
    }

    #[test]
    fn spherical_mean_at_origin_reproduces_gaussian() {
        let s = make_setting(3, RootConfig::Z2Power(3), &[0.5]).unwrap();
        let tc = transform_components(&s, &[gaussian_component(&s, "1")], &lambdas()).unwrap();
        let rg = RadialGrid::uniform_panels(0.0, 5.0, 10, 16).unwrap().into_shared();
        let mean = dunkl_spherical_mean(&s, &tc, &[0.0, 0.0, 0.0], &rg).unwrap();
        for (r, v) in rg.nodes().iter().zip(mean.profile.values()) {
            assert!((v - gaussian(*r)).abs() <= 1e-3, "{r}: {v}");
        }
        let empty = dunkl_spherical_mean(&s, &[], &[0.1, 0.2, 0.3], &rg).unwrap();
        assert_eq!(empty.profile.max_abs(), 0.0);
    }

    #[test]
    fn spherical_mean_transforms_back_to_projection() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let comps: Vec<_> = ["1", "x1", "x1x2"].iter().map(|id| gaussian_component(&s, id)).collect();
        let tc = transform_components(&s, &comps, &lambdas()).unwrap();
        let x = [0.6, -0.8];
        let rg = RadialGrid::uniform_panels(0.0, 14.0, 56, 16).unwrap().into_shared();
        let mean = dunkl_spherical_mean(&s, &tc, &x, &rg).unwrap();
        let check = make_grid(8.0, 16, 8).unwrap().into_shared();
        let back = hankel_forward(&mean.profile, s.lambda_kappa(), &check).unwrap();
        let direct = projection_samples(&s, &tc, &x, &check).unwrap();
        let peak = direct.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for ((l, v), d) in check.nodes().iter().zip(back.values()).zip(direct.values()) {
            assert!((v - d).abs() <= 1e-3 * peak, "{l}: {v} vs {d}");
        }
    }

    #[test]
    fn resolution_of_identity() {
        // ∫ P_λf(x) dμ_{λ_κ}(λ) = F_x(0) = f(x)
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let comps: Vec<_> = ["1", "x2", "x1x2", "q1"].iter().map(|id| gaussian_component(&s, id)).collect();
        let tc = transform_components(&s, &comps, &lambdas()).unwrap();
        let origin = RadialGrid::from_nodes(vec![0.0, 1.0]).unwrap().into_shared();
        for x in [[0.3, 0.4], [-1.2, 0.5], [0.0, 2.0]] {
            let mean = dunkl_spherical_mean(&s, &tc, &x, &origin).unwrap();
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let f: f64 = comps.iter().map(|c| c.eval(&x, r.powi(c.degree() as i32) * gaussian(r))).sum();
            assert!((mean.profile.values()[0] - f).abs() < 1e-8, "{x:?}: {} vs {f}", mean.profile.values()[0]);
        }
    }

    #[test]
    fn componentwise_plancherel() {
        let s = make_setting(3, RootConfig::Z2Power(2), &[1.5, 0.25]).unwrap();
        let g = gauss_grid();
        let comps = vec![
            HarmonicComponent::new(
                builtin_harmonic(&s, "1").unwrap(),
                SampledRadialFunction::from_fn(Arc::clone(&g), |r| (1.0 + r * r) * (-r * r).exp()).unwrap(),
            ),
            HarmonicComponent::new(
                builtin_harmonic(&s, "x3").unwrap(),
                SampledRadialFunction::from_fn(Arc::clone(&g), |r| r * (-0.7 * r * r).exp()).unwrap(),
            ),
            HarmonicComponent::new(
                builtin_harmonic(&s, "q2").unwrap(),
                SampledRadialFunction::from_fn(g, |r| r * r * (1.0 - r) * (-r * r).exp()).unwrap(),
            ),
        ];
        let tc = transform_components(&s, &comps, &make_grid(16.0, 64, 16).unwrap().into_shared()).unwrap();
        let p = component_plancherel(&s, &tc).unwrap();
        assert!(p.radial > 0.0);
        assert!(p.rel_error() <= 1e-4, "{p:?}");
    }

    #[test]
    fn components_csv_layout() {
        let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
        let g = RadialGrid::from_nodes(vec![0.0, 1.0]).unwrap().into_shared();
        let c = HarmonicComponent::new(
            builtin_harmonic(&s, "x1").unwrap(),
            SampledRadialFunction::new(g, vec![0.0, 0.25]).unwrap(),
        );
        let mut buf = Vec::new();
        write_components_csv(&[c], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "m,harmonic_id,node,value");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,x1,1.0"));
    }

    proptest! {
        #[test]
        fn lambda_kappa_identity(n in 1usize..6, k in proptest::collection::vec(0.0f64..4.0, 1..6)) {
            let d = k.len().min(n);
            let s = make_setting(n, RootConfig::Z2Power(d), &k[..d]).unwrap();
            let gamma: f64 = k[..d].iter().sum();
            prop_assert_eq!(s.lambda_kappa(), gamma + (n as f64 - 2.0) / 2.0);
            prop_assert!(s.lambda_kappa() > -1.0);
        }

        #[test]
        fn h_kappa_sq_homogeneous(t in 0.1f64..5.0, a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
            let s = make_setting(3, RootConfig::Z2Power(3), &[0.3, 1.1, 0.6]).unwrap();
            let x = [a, b, c];
            let tx = [t * a, t * b, t * c];
            let lhs = s.h_kappa_sq(&tx);
            let rhs = t.powf(2.0 * s.gamma()) * s.h_kappa_sq(&x);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1e-300));
        }

        #[test]
        fn phi_kappa_even(l in 0.0f64..40.0, r in 0.0f64..5.0) {
            let s = make_setting(2, RootConfig::Z2Power(2), &[0.3, 0.7]).unwrap();
            prop_assert_eq!(phi_kappa(&s, l, r).unwrap(), phi_kappa(&s, -l, r).unwrap());
        }
    }
}
