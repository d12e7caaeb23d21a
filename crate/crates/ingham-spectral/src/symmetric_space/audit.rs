use std::sync::Arc;

use super::{spherical_transform, RankOneSpace};
use crate::error::{Error, Result};
use crate::ingham::{
    assemble_audit, check_vanishing, construct_box_product, envelope_ratio, sample_points, AuditReport, AuditRow,
    BoxProduct, EnvelopeReport, SupportReport, ThetaSpec, AUDIT_M_MAX,
};
use crate::numerics::{make_grid, RadialGrid, SampledRadialFunction, WeightKind};
use crate::specfun::{jacobi_weight, JacobiPhi};
use crate::transforms::jacobi_inverse;

#[derive(Debug, Clone, PartialEq)]
pub struct AuditOptions {
    /// Points x_r inside the vanishing ball; default 0, l/3, 2l/3.
    pub x_points: Option<Vec<f64>>,
    pub m_max: u32,
    /// Shift in (λ² + shift²); default ρ.
    pub shift: Option<f64>,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { x_points: None, m_max: AUDIT_M_MAX, shift: None }
    }
}

/// Tests the envelope |P_λf(x)| ≤ C e^{-λθ(λ)} for f vanishing on [0, l):
/// measures C over the window, then imposes the envelope on the spectral
/// data of F_x and follows the Carleman sums of ‖Δ^m F_x‖₂^{-1/2m}.
pub fn uncertainty_audit_thm11(
    space: &RankOneSpace,
    f: &SampledRadialFunction,
    vanish_radius: f64,
    theta: &ThetaSpec,
    lambdas: &Arc<RadialGrid>,
    opts: &AuditOptions,
) -> Result<AuditReport> {
    check_vanishing(f, vanish_radius)?;
    let xs = sample_points(vanish_radius, opts.x_points.as_deref())?;
    let ft = spherical_transform(space, f, lambdas)?;
    if f.max_abs() > 0.0 && ft.values().iter().all(|v| *v == 0.0) {
        return Err(Error::IllPosed("spherical transform vanishes across the whole window".into()));
    }
    let phi = JacobiPhi::new(space.params());
    let mut rows = Vec::with_capacity(xs.len() * ft.lambdas().len());
    for &x in &xs {
        for (&l, &v) in ft.lambdas().iter().zip(ft.values()) {
            let kernel = phi.eval(l, x);
            let d = (v * kernel).abs();
            rows.push(AuditRow { x, lambda: l, transform: v, kernel, d, constant: envelope_ratio(d, l, theta) });
        }
    }
    let weight = WeightKind::JacobiPlancherel { alpha: space.alpha(), beta: space.beta() };
    assemble_audit(theta, vanish_radius, weight, opts.shift.unwrap_or(space.rho()), rows, opts.m_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOptions {
    pub n_boxes: usize,
    pub support_budget: f64,
    /// Spectral cutoff for the inverse transform.
    pub lambda_max: f64,
    pub panels: usize,
    /// Envelope checked on λ ∈ [1, xi_max] in unit steps.
    pub xi_max: f64,
    pub x_points: Vec<f64>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            n_boxes: 64,
            support_budget: 1.0,
            lambda_max: 200.0,
            panels: 100,
            xi_max: 1000.0,
            x_points: vec![0.0, 0.5, 1.0, 2.0],
        }
    }
}

/// A compactly supported K-biinvariant f with f̃ = Π sinc(a_k λ), and the
/// measured constant C′ in |P_λf(x)| ≤ C′ e^{-λθ(λ)}.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpnessWitness {
    pub boxes: BoxProduct,
    /// |f̃(λ)| against e^{-λθ(λ)}.
    pub envelope: EnvelopeReport,
    pub profile: SampledRadialFunction,
    pub support: SupportReport,
    pub rows: Vec<AuditRow>,
    /// C′.
    pub projection_constant: f64,
}

pub fn sharpness_witness(space: &RankOneSpace, theta: &ThetaSpec, opts: &WitnessOptions) -> Result<SharpnessWitness> {
    let boxes = construct_box_product(theta, opts.n_boxes, opts.support_budget)?.boxes;
    let s = boxes.total_support();
    let weight = WeightKind::JacobiPlancherel { alpha: space.alpha(), beta: space.beta() };
    let lambdas = make_grid(opts.lambda_max, opts.panels, 16)?.into_shared();
    let ft = boxes.spectral_samples(&lambdas, weight)?;
    let r_grid = RadialGrid::uniform_panels(0.0, 3.0 * s, 30, 16)?.into_shared();
    let profile = jacobi_inverse(&ft, space.params(), &r_grid)?;
    let support = SupportReport::measure(&profile, |r| jacobi_weight(space.params(), r));

    let xis: Vec<f64> = (1..=opts.xi_max.floor() as usize).map(|i| i as f64).collect();
    let envelope = boxes.envelope(theta, &xis);
    let phi = JacobiPhi::new(space.params());
    let mut rows = Vec::with_capacity(xis.len() * opts.x_points.len());
    for &x in &opts.x_points {
        for &l in &xis {
            let transform = boxes.fourier(l);
            let kernel = phi.eval(l, x);
            let d = (transform * kernel).abs();
            rows.push(AuditRow { x, lambda: l, transform, kernel, d, constant: envelope_ratio(d, l, theta) });
        }
    }
    let projection_constant = rows.iter().map(|r| r.constant).fold(0.0, f64::max);
    Ok(SharpnessWitness { boxes, envelope, profile, support, rows, projection_constant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingham::{CarlemanVerdict, ThetaClass};
    use crate::numerics::profiles::poly_bump;
    use crate::symmetric_space::space_from_multiplicities;

    fn bump() -> SampledRadialFunction {
        let g = RadialGrid::uniform_panels(0.0, 3.0, 48, 16).unwrap().into_shared();
        SampledRadialFunction::from_fn(g, |r| poly_bump(r, 1.0, 2.0, 12)).unwrap().with_support(1.0, 2.0).unwrap()
    }

    fn window() -> Arc<RadialGrid> {
        make_grid(32.0, 16, 16).unwrap().into_shared()
    }

    #[test]
    fn zero_input_gives_zero_diagnostics() {
        let s = space_from_multiplicities(2, 0).unwrap();
        let f = SampledRadialFunction::zero(Arc::clone(bump().grid()));
        let th = ThetaSpec::builtin("inv-log").unwrap();
        let r = uncertainty_audit_thm11(&s, &f, 1.0, &th, &window(), &AuditOptions::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.d == 0.0 && row.constant == 0.0));
        assert_eq!(r.best_constant, 0.0);
        assert!(r.verdict().is_none() && !r.obstruction);
    }

    #[test]
    fn convergent_theta_asserts_nothing() {
        let s = space_from_multiplicities(2, 0).unwrap();
        let th = ThetaSpec::builtin("inv-sqrt").unwrap();
        let r = uncertainty_audit_thm11(&s, &bump(), 1.0, &th, &window(), &AuditOptions::default()).unwrap();
        assert_eq!(r.classification.verdict, ThetaClass::Convergent);
        assert!(!r.obstruction);
        assert!(r.best_constant > 0.0 && r.best_constant.is_finite());
    }

    #[test]
    fn divergent_theta_drives_carleman_sums() {
        let s = space_from_multiplicities(2, 0).unwrap();
        let th = ThetaSpec::builtin("inv-log").unwrap();
        let r = uncertainty_audit_thm11(&s, &bump(), 1.0, &th, &window(), &AuditOptions::default()).unwrap();
        assert_eq!(r.classification.verdict, ThetaClass::Divergent);
        assert_eq!(r.verdict(), Some(CarlemanVerdict::Diverging));
        assert!(r.obstruction);
        assert_eq!(r.power_rows.len(), 40);
        assert!(r.power_rows.windows(2).all(|w| w[1].partial_sum > w[0].partial_sum));
        // d(λ) at the origin is |f̃(λ)|
        let at0: Vec<_> = r.rows.iter().filter(|row| row.x == 0.0).collect();
        assert!(at0.iter().all(|row| row.kernel == 1.0 && row.d == row.transform.abs()));
    }

    #[test]
    fn precondition_and_ill_posed_input() {
        let s = space_from_multiplicities(2, 0).unwrap();
        let th = ThetaSpec::builtin("inv-log").unwrap();
        let opts = AuditOptions::default();
        assert!(matches!(uncertainty_audit_thm11(&s, &bump(), 1.5, &th, &window(), &opts), Err(Error::IllPosed(_))));
        // the smallest subnormal underflows in the transform: nonzero f, f̃ ≡ 0
        let g = RadialGrid::uniform_panels(0.0, 3.0, 8, 4).unwrap().into_shared();
        let f = SampledRadialFunction::from_fn(g, |r| if r > 1.0 { f64::from_bits(1) } else { 0.0 }).unwrap();
        assert!(matches!(uncertainty_audit_thm11(&s, &f, 1.0, &th, &window(), &opts), Err(Error::IllPosed(_))));
    }

    #[test]
    fn witness_has_finite_constant_and_compact_profile() {
        let s = space_from_multiplicities(2, 0).unwrap();
        let th = ThetaSpec::builtin("inv-sqrt").unwrap();
        let w = sharpness_witness(&s, &th, &WitnessOptions::default()).unwrap();
        assert!(w.envelope.constant.is_finite() && w.envelope.constant > 0.0);
        assert!(w.projection_constant.is_finite() && w.projection_constant > 0.0);
        // |Φ_λ(x)| ≤ 1 keeps C′ below the transform's own constant
        assert!(w.projection_constant <= w.envelope.constant * (1.0 + 1e-12));
        assert!(w.support.tail_beyond(1.5 * w.boxes.total_support()) <= 1e-6);
    }
}
