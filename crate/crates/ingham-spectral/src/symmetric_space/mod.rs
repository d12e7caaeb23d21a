//! Rank-one noncompact symmetric spaces G/K, seen through the Jacobi
//! parameters of their root multiplicities.
//!
//! Only K-biinvariant data is carried end to end: a radial profile f(a_r),
//! its spherical transform f̃(λ), and the spectral pieces f̃(λ)Φ_λ built
//! from it.

mod audit;

pub use audit::{sharpness_witness, uncertainty_audit_thm11, AuditOptions, SharpnessWitness, WitnessOptions};

use std::io::{self, Write};
use std::sync::Arc;

use crate::error::{Error, Result, Warning};
use crate::numerics::{eigen_residual, OpKind, RadialGrid, SampledRadialFunction, SpectralSamples};
use crate::specfun::{jacobi_phi, kostant_q, pochhammer_real, ComplexScalar, JacobiParams, JacobiPhi};
use crate::transforms::{jacobi_forward, jacobi_inverse, spectral_tail_warning};

/// K-type label (p, q) with p ≥ |q| and p ≡ q (mod 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KTypeIndex {
    p: u32,
    q: i32,
}

impl KTypeIndex {
    pub fn new(p: u32, q: i32) -> Result<Self> {
        if (q.unsigned_abs()) > p || (p as i64 - q as i64) % 2 != 0 {
            return Err(Error::Invariant(format!("K-type ({p}, {q}) needs p >= |q| and p = q mod 2")));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> i32 {
        self.q
    }
}

/// G/K of real rank one with root multiplicities m_γ, m_2γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneSpace {
    m_gamma: u32,
    m_2gamma: u32,
    params: JacobiParams,
    rho: f64,
}

/// α = (m_γ+m_2γ-1)/2, β = (m_2γ-1)/2, ρ = (m_γ+2m_2γ)/2 = α+β+1.
pub fn space_from_multiplicities(m_gamma: u32, m_2gamma: u32) -> Result<RankOneSpace> {
    if m_gamma == 0 {
        return Err(Error::Invariant("m_gamma must be at least 1".into()));
    }
    let (a, b) = (m_gamma as f64, m_2gamma as f64);
    let params = JacobiParams::new((a + b - 1.0) / 2.0, (b - 1.0) / 2.0)?;
    let rho = (a + 2.0 * b) / 2.0;
    if (params.rho() - rho).abs() > 1e-15 {
        return Err(Error::Invariant(format!("rho {rho} disagrees with alpha + beta + 1 = {}", params.rho())));
    }
    Ok(RankOneSpace { m_gamma, m_2gamma, params, rho })
}

impl RankOneSpace {
    pub fn m_gamma(&self) -> u32 {
        self.m_gamma
    }

    pub fn m_2gamma(&self) -> u32 {
        self.m_2gamma
    }

    pub fn params(&self) -> &JacobiParams {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha()
    }

    pub fn beta(&self) -> f64 {
        self.params.beta()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Radial part of the Laplace–Beltrami operator.
    pub fn operator(&self) -> OpKind {
        OpKind::Jacobi(self.params)
    }

    /// Eigenvalue -(λ²+ρ²) of Φ_λ.
    pub fn eigenvalue(&self, lambda: f64) -> f64 {
        -(lambda * lambda + self.rho * self.rho)
    }
}

/// Φ_λ(a_r) = φ_λ^(α,β)(r).
pub fn spherical_fn(space: &RankOneSpace, lambda: f64, r: f64) -> Result<f64> {
    jacobi_phi(&space.params, lambda, r)
}

/// Φ_{λ,δ}(a_r) = Q_δ(iλ+ρ) (α+1)_p^{-1} sinh^p r cosh^q r φ_λ^(α+p,β+q)(r).
///
/// Complex because Q_δ(iλ+ρ) is.
pub fn spherical_fn_delta(space: &RankOneSpace, k: KTypeIndex, lambda: f64, r: f64) -> Result<ComplexScalar> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r = {r} must be nonnegative")));
    }
    let p = k.p() as f64;
    let q = k.q() as f64;
    let shifted = JacobiParams::new(space.alpha() + p, space.beta() + q)?;
    let q_delta = kostant_q(&space.params, k, lambda);
    let radial = r.sinh().powi(k.p() as i32) * r.cosh().powi(k.q()) / pochhammer_real(space.alpha() + 1.0, k.p());
    Ok(q_delta * radial * jacobi_phi(&shifted, lambda, r)?)
}

/// The spherical transform of a K-biinvariant profile: the Jacobi transform
/// at the space's parameters.
pub fn spherical_transform(
    space: &RankOneSpace,
    f: &SampledRadialFunction,
    lambdas: &Arc<RadialGrid>,
) -> Result<SpectralSamples> {
    jacobi_forward(f, &space.params, lambdas)
}

/// P_λf along a_r, with its eigenvalue and finite-difference residual.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionField {
    pub lambda: f64,
    pub profile: SampledRadialFunction,
    /// -(λ²+ρ²)
    pub eigenvalue: f64,
    /// Relative residual of the radial Laplacian against the eigenvalue.
    pub residual: f64,
    pub warning: Option<Warning>,
}

impl ProjectionField {
    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        self.profile.write_csv(out)
    }
}

/// P_λf(a_r) = f̃(λ) Φ_λ(a_r), with f̃ interpolated linearly in λ.
pub fn project(
    space: &RankOneSpace,
    f_tilde: &SpectralSamples,
    lambda: f64,
    r_grid: &Arc<RadialGrid>,
) -> Result<ProjectionField> {
    let coeff = f_tilde.interpolate(lambda)?;
    let eigenvalue = space.eigenvalue(lambda);
    let profile = if coeff == 0.0 {
        SampledRadialFunction::zero(Arc::clone(r_grid))
    } else {
        let phi = JacobiPhi::new(&space.params);
        SampledRadialFunction::from_fn(Arc::clone(r_grid), |r| coeff * phi.eval(lambda, r))?
    };
    let check = eigen_residual(&profile, space.operator(), eigenvalue)?;
    Ok(ProjectionField { lambda, profile, eigenvalue, residual: check.residual, warning: check.warning })
}

/// Radial profile of the spherical mean around a point at distance x_r.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalMean {
    pub x_r: f64,
    /// F_x(r).
    pub profile: SampledRadialFunction,
    /// f̃(λ) Φ_λ(x_r), the spectral data of F_x.
    pub spectral: SpectralSamples,
    pub warnings: Vec<Warning>,
}

/// F_x(r) = (1/2π) ∫₀^∞ f̃(λ) Φ_λ(x_r) Φ_λ(r) |c(λ)|^{-2} dλ.
pub fn spherical_mean_profile(
    space: &RankOneSpace,
    f_tilde: &SpectralSamples,
    x_r: f64,
    r_grid: &Arc<RadialGrid>,
) -> Result<SphericalMean> {
    if !(x_r >= 0.0) {
        return Err(Error::Domain(format!("x_r = {x_r} must be nonnegative")));
    }
    let phi = JacobiPhi::new(&space.params);
    let values = f_tilde
        .lambdas()
        .iter()
        .zip(f_tilde.values())
        .map(|(&l, &v)| if v == 0.0 { 0.0 } else { v * phi.eval(l, x_r) });
    let spectral = SpectralSamples::new(Arc::clone(f_tilde.grid()), values.collect(), f_tilde.weight_kind())?;
    let profile = jacobi_inverse(&spectral, &space.params, r_grid)?;
    let warnings = spectral_tail_warning(&spectral).into_iter().collect();
    Ok(SphericalMean { x_r, profile, spectral, warnings })
}
