use std::sync::Arc;

use super::{projection_samples, transform_components, DunklSetting, HarmonicComponent};
use crate::error::{Error, Result};
use crate::ingham::{
    assemble_audit, check_vanishing, construct_box_product, envelope_ratio, sample_points, transfer_via_paley_wiener,
    AuditReport, AuditRow, BoxProduct, EnvelopeReport, SupportReport, ThetaSpec, AUDIT_M_MAX,
};
use crate::numerics::{make_grid, RadialGrid, SampledRadialFunction, WeightKind};
use crate::specfun::bessel_psi;

#[derive(Debug, Clone, PartialEq)]
pub struct DunklAuditOptions {
    /// Points inside the vanishing ball; default |x| = 0, l/3, 2l/3 along
    /// the diagonal (1, …, 1)/√n.
    pub x_points: Option<Vec<Vec<f64>>>,
    pub m_max: u32,
    /// The a in Δ_{λ_κ,a}.
    pub shift: f64,
}

impl Default for DunklAuditOptions {
    fn default() -> Self {
        Self { x_points: None, m_max: AUDIT_M_MAX, shift: 1.0 }
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn audit_points(setting: &DunklSetting, l: f64, given: Option<&[Vec<f64>]>) -> Result<Vec<Vec<f64>>> {
    let n = setting.n();
    match given {
        None => {
            let u = 1.0 / (n as f64).sqrt();
            Ok(sample_points(l, None)?.into_iter().map(|r| vec![r * u; n]).collect())
        }
        Some(pts) => {
            if let Some(p) = pts.iter().find(|p| p.len() != n) {
                return Err(Error::Domain(format!("point {p:?} is not in R^{n}")));
            }
            let radii: Vec<f64> = pts.iter().map(|p| norm(p)).collect();
            sample_points(l, Some(&radii))?;
            Ok(pts.to_vec())
        }
    }
}

/// The Dunkl counterpart of the rank-one audit: d(λ) = |f ∗_κ φ_{κ,λ}(x)|,
/// F_x the Dunkl spherical mean, norms of Δ_{λ_κ,a}^m F_x on the Bessel side.
pub fn uncertainty_audit_thm13(
    setting: &DunklSetting,
    components: &[HarmonicComponent],
    vanish_radius: f64,
    theta: &ThetaSpec,
    lambdas: &Arc<RadialGrid>,
    opts: &DunklAuditOptions,
) -> Result<AuditReport> {
    for c in components {
        check_vanishing(&c.profile, vanish_radius)?;
    }
    if !(opts.shift > 0.0) {
        return Err(Error::Domain(format!("shift a = {} must be positive", opts.shift)));
    }
    let xs = audit_points(setting, vanish_radius, opts.x_points.as_deref())?;
    let tc = transform_components(setting, components, lambdas)?;
    let nonzero_input = components.iter().any(|c| c.profile.max_abs() > 0.0);
    if nonzero_input && tc.iter().all(|t| t.transform.values().iter().all(|v| *v == 0.0)) {
        return Err(Error::IllPosed("Dunkl transform vanishes across the whole window".into()));
    }
    let mut rows = Vec::with_capacity(xs.len() * lambdas.len());
    for x in &xs {
        let p = projection_samples(setting, &tc, x, lambdas)?;
        for (&l, &v) in p.lambdas().iter().zip(p.values()) {
            let d = v.abs();
            rows.push(AuditRow {
                x: norm(x),
                lambda: l,
                transform: v,
                kernel: 1.0,
                d,
                constant: envelope_ratio(d, l, theta),
            });
        }
    }
    let weight = WeightKind::HankelMeasure { alpha: setting.lambda_kappa() };
    assemble_audit(theta, vanish_radius, weight, opts.shift, rows, opts.m_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DunklWitnessOptions {
    pub n_boxes: usize,
    pub support_budget: f64,
    pub lambda_max: f64,
    pub panels: usize,
    pub xi_max: f64,
    /// Radii |x|; the witness is radial.
    pub x_points: Vec<f64>,
}

impl Default for DunklWitnessOptions {
    fn default() -> Self {
        Self {
            n_boxes: 64,
            support_budget: 1.0,
            lambda_max: 1000.0,
            panels: 400,
            xi_max: 1000.0,
            x_points: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

/// A radial f near the origin with F_κf = Π sinc(a_k λ), obtained by
/// inverting the order-λ_κ Hankel transform.
#[derive(Debug, Clone)]
pub struct DunklWitness {
    pub boxes: BoxProduct,
    pub envelope: EnvelopeReport,
    pub profile: SampledRadialFunction,
    pub support: SupportReport,
    pub rows: Vec<AuditRow>,
    pub projection_constant: f64,
}

pub fn dunkl_sharpness_witness(
    setting: &DunklSetting,
    theta: &ThetaSpec,
    opts: &DunklWitnessOptions,
) -> Result<DunklWitness> {
    let boxes = construct_box_product(theta, opts.n_boxes, opts.support_budget)?.boxes;
    let s = boxes.total_support();
    let lk = setting.lambda_kappa();
    let lambdas = make_grid(opts.lambda_max, opts.panels, 16)?.into_shared();
    let fhat = boxes.spectral_samples(&lambdas, WeightKind::HankelMeasure { alpha: lk })?;
    let r_grid = RadialGrid::uniform_panels(0.0, 3.0 * s, 60, 16)?.into_shared();
    let transfer = transfer_via_paley_wiener(&fhat, lk, &r_grid)?;

    let xis: Vec<f64> = (1..=opts.xi_max.floor() as usize).map(|i| i as f64).collect();
    let envelope = boxes.envelope(theta, &xis);
    let mut rows = Vec::with_capacity(xis.len() * opts.x_points.len());
    for &x in &opts.x_points {
        for &l in &xis {
            let transform = boxes.fourier(l);
            let kernel = bessel_psi(lk, l * x)?;
            let d = (transform * kernel).abs();
            rows.push(AuditRow { x, lambda: l, transform, kernel, d, constant: envelope_ratio(d, l, theta) });
        }
    }
    let projection_constant = rows.iter().map(|r| r.constant).fold(0.0, f64::max);
    Ok(DunklWitness {
        boxes,
        envelope,
        profile: transfer.profile,
        support: transfer.support,
        rows,
        projection_constant,
    })
}
