use proptest::prelude::*;

use super::*;
use crate::numerics::profiles::{gaussian, poly_bump};
use crate::numerics::{apply_operator_fd, make_grid, OpKind};

fn radial_grid() -> Arc<RadialGrid> {
    RadialGrid::graded(12.0, 96, 16, 14).unwrap().into_shared()
}

fn bump_grid() -> Arc<RadialGrid> {
    RadialGrid::uniform_panels(0.0, 3.0, 48, 16).unwrap().into_shared()
}

fn bump() -> SampledRadialFunction {
    SampledRadialFunction::from_fn(bump_grid(), |r| poly_bump(r, 1.0, 2.0, 12)).unwrap()
}

fn lambda_grid(lmax: f64, panels: usize) -> Arc<RadialGrid> {
    make_grid(lmax, panels, 16).unwrap().into_shared()
}

fn gaussian_profile() -> SampledRadialFunction {
    SampledRadialFunction::from_fn(radial_grid(), gaussian).unwrap()
}

#[test]
fn gaussian_is_a_hankel_fixed_point() {
    let ls = RadialGrid::from_nodes((0..=160).map(|i| i as f64 * 0.05).collect()).unwrap().into_shared();
    let f = gaussian_profile();
    for alpha in [-0.4, 0.0, 0.5, 1.5, 3.0] {
        let h = hankel_forward(&f, alpha, &ls).unwrap();
        let err = h.lambdas().iter().zip(h.values()).map(|(&l, v)| (v - gaussian(l)).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "alpha = {alpha}: {err:e}");
    }
}

#[test]
fn zero_maps_to_zero() {
    let z = SampledRadialFunction::zero(radial_grid());
    let ls = lambda_grid(8.0, 4);
    assert!(hankel_forward(&z, 0.5, &ls).unwrap().values().iter().all(|v| *v == 0.0));
    let p = JacobiParams::new(0.5, -0.5).unwrap();
    let fz = jacobi_forward(&z, &p, &ls).unwrap();
    assert!(fz.values().iter().all(|v| *v == 0.0));
    assert!(jacobi_inverse(&fz, &p, &bump_grid()).unwrap().values().iter().all(|v| *v == 0.0));
    let rep = plancherel_check(&z, PairKind::Hankel { alpha: 0.0 }, &ls).unwrap();
    assert_eq!((rep.plancherel_lhs, rep.plancherel_rhs), (0.0, 0.0));
}

#[test]
fn hankel_round_trip_and_inverse_fixed_point() {
    let f = gaussian_profile();
    // graded in λ too: the measure behaves like λ^{2α+1} at the origin
    let ls = RadialGrid::graded(12.0, 48, 16, 14).unwrap().into_shared();
    for alpha in [-0.4, 0.5, 3.0] {
        let h = hankel_forward(&f, alpha, &ls).unwrap();
        let back = hankel_inverse(&h, alpha, f.grid()).unwrap();
        let pair = PairKind::Hankel { alpha };
        let num: f64 = f
            .nodes()
            .iter()
            .zip(f.grid().weights())
            .zip(f.values().iter().zip(back.values()))
            .map(|((&r, &w), (a, b))| w * (a - b).powi(2) * pair.radial_weight(r))
            .sum();
        let rel = (num / radial_norm_sq(&f, pair)).sqrt();
        assert!(rel <= 1e-6, "alpha = {alpha}: {rel:e}");
        let g = SpectralSamples::from_fn(ls.clone(), WeightKind::HankelMeasure { alpha }, gaussian).unwrap();
        let inv = hankel_inverse(&g, alpha, f.grid()).unwrap();
        let err = inv.nodes().iter().zip(inv.values()).map(|(&r, v)| (v - gaussian(r)).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "alpha = {alpha}: {err:e}");
    }
}

#[test]
fn hankel_is_even_in_lambda() {
    let f = gaussian_profile();
    let pos = RadialGrid::from_nodes(vec![0.5, 1.0, 3.0]).unwrap().into_shared();
    let h = hankel_forward(&f, 0.7, &pos).unwrap();
    for (l, v) in h.lambdas().iter().zip(h.values()) {
        let direct: f64 = f
            .nodes()
            .iter()
            .zip(f.grid().weights())
            .zip(f.values())
            .map(|((&r, &w), &fv)| w * fv * hankel_density(0.7, r) * crate::specfun::bessel_psi(0.7, -l * r).unwrap())
            .sum();
        assert!((direct - v).abs() < 1e-15);
    }
}

#[test]
fn cosine_case_matches_direct_cosine_quadrature() {
    let f = bump();
    let p = JacobiParams::new(-0.5, -0.5).unwrap();
    let ls = lambda_grid(40.0, 10);
    let ft = jacobi_forward(&f, &p, &ls).unwrap();
    // oracle: plain trapezoid cosine transform on a much finer uniform grid
    let n = 40_000;
    let h = 1.0 / n as f64;
    for (&l, &v) in ft.lambdas().iter().zip(ft.values()) {
        let mut s = 0.0;
        for i in 0..=n {
            let r = 1.0 + i as f64 * h;
            s += poly_bump(r, 1.0, 2.0, 12) * (l * r).cos();
        }
        s *= h;
        assert!((s - v).abs() < 1e-9, "lambda = {l}");
    }
}

#[test]
fn jacobi_transform_bounded_by_weighted_mass() {
    let f = bump();
    let p = JacobiParams::new(0.5, -0.5).unwrap();
    let ft = jacobi_forward(&f, &p, &lambda_grid(30.0, 10)).unwrap();
    let mass: f64 = crate::numerics::integrate(&f, |r| jacobi_weight(&p, r));
    assert!(ft.values().iter().all(|v| v.abs() <= mass * (1.0 + 1e-12)));
}

#[test]
fn jacobi_round_trip_and_plancherel() {
    let ls = lambda_grid(64.0, 32);
    for (a, b) in [(-0.5, -0.5), (0.5, -0.5), (2.5, 1.0)] {
        let p = JacobiParams::new(a, b).unwrap();
        let rep = plancherel_check(&bump(), PairKind::Jacobi(p), &ls).unwrap();
        assert!(rep.roundtrip_l2_rel_error <= 1e-4, "({a},{b}): {:e}", rep.roundtrip_l2_rel_error);
        assert!(rep.plancherel_rel_error() <= 1e-4, "({a},{b}): {:e}", rep.plancherel_rel_error());
    }
}

#[test]
fn plancherel_gaussian_hankel_zero() {
    let rep = plancherel_check(&gaussian_profile(), PairKind::Hankel { alpha: 0.0 }, &lambda_grid(12.0, 24)).unwrap();
    // closed form: ∫ e^{-r²} r dr = 1/2 on both sides
    assert!((rep.plancherel_lhs - 0.5).abs() < 1e-12);
    assert!(rep.plancherel_rel_error() < 1e-8);
}

#[test]
fn power_norm_basics() {
    let f = bump();
    let p = JacobiParams::new(0.5, -0.5).unwrap();
    let ls = lambda_grid(64.0, 32);
    let ft = jacobi_forward(&f, &p, &ls).unwrap();
    let w = ft.weight_kind();
    let n0 = spectral_power_norm(&ft, p.rho(), 0, w);
    assert!((n0.norm - spectral_norm_sq(&ft).sqrt()).abs() < 1e-14 * n0.norm);
    let big_l: f64 = 64.0;
    for m in 1..6 {
        let nm = spectral_power_norm(&ft, p.rho(), m, w);
        assert!(nm.norm <= (big_l * big_l + 1.0).powi(m as i32) * n0.norm * (1.0 + 1e-12));
    }
}

fn exp_tail(panels: usize) -> SpectralSamples {
    SpectralSamples::from_fn(lambda_grid(200.0, panels), WeightKind::HankelMeasure { alpha: 0.5 }, |l| (-l).exp())
        .unwrap()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn power_norm_of_exponential_tail_matches_closed_form() {
    // c ∫ (λ²+1)^{2m} λ² e^{-2λ} dλ = c Σ_k C(2m,k) Γ(2k+3) / 2^{2k+3}, c = √(2/π)
    let f = exp_tail(100);
    let c = (2.0 / std::f64::consts::PI).sqrt();
    for m in 0..=20u32 {
        let exact: f64 = c
            * (0..=2 * m)
                .map(|k| {
                    binomial(2 * m, k)
                        * (ln_gamma(2.0 * k as f64 + 3.0).unwrap() - (2.0 * k as f64 + 3.0) * std::f64::consts::LN_2)
                            .exp()
                })
                .sum::<f64>();
        let got = spectral_power_norm(&f, 1.0, m, WeightKind::HankelMeasure { alpha: 0.5 });
        let rel = (2.0 * got.log_norm - exact.ln()).abs();
        assert!(rel < 1e-6, "m = {m}: {rel:e}");
        assert!(!got.overflow);
    }
}

#[test]
fn power_norm_overflow_is_flagged() {
    let f = exp_tail(100);
    let huge = spectral_power_norm(&f, 1.0, 400, WeightKind::HankelMeasure { alpha: 0.5 });
    assert!(huge.overflow && huge.norm.is_infinite() && huge.log_norm.is_finite());
}

#[test]
fn power_norms_log_convex_and_monotone() {
    let f = SpectralSamples::from_fn(
        make_grid(60.0, 30, 16).unwrap().into_shared(),
        WeightKind::HankelMeasure { alpha: 1.0 },
        |l| {
            if l >= 1.0 {
                (-0.3 * l).exp()
            } else {
                0.0
            }
        },
    )
    .unwrap();
    let logs: Vec<f64> = (0..30).map(|m| spectral_power_norm(&f, 1.0, m, f.weight_kind()).log_norm).collect();
    for m in 1..29 {
        assert!(2.0 * logs[m] <= logs[m - 1] + logs[m + 1] + 1e-9);
        assert!(logs[m] >= logs[m - 1]);
    }
}

#[test]
fn diagonalization_hankel() {
    let (alpha, a) = (0.5, 0.8);
    let g = RadialGrid::trapezoid(0.0, 12.0, 6001).unwrap().into_shared();
    let f = SampledRadialFunction::from_fn(g.clone(), gaussian).unwrap();
    let lf = apply_operator_fd(&f, OpKind::Bessel { alpha, a }).unwrap();
    let ls = RadialGrid::from_nodes(vec![0.5, 1.0, 2.0, 3.0]).unwrap().into_shared();
    let h = hankel_forward(&f, alpha, &ls).unwrap();
    let hl = hankel_forward(&lf, alpha, &ls).unwrap();
    for ((l, v), w) in ls.nodes().iter().zip(h.values()).zip(hl.values()) {
        let expect = -(l * l + a * a) * v;
        assert!((w - expect).abs() < 1e-6 * expect.abs().max(1e-3), "lambda = {l}");
    }
}

#[test]
fn diagonalization_jacobi() {
    let p = JacobiParams::new(1.0, 0.0).unwrap();
    let g = RadialGrid::trapezoid(0.5, 2.5, 4001).unwrap().into_shared();
    let f = SampledRadialFunction::from_fn(g, |r| poly_bump(r, 1.0, 2.0, 12)).unwrap();
    let lf = apply_operator_fd(&f, OpKind::Jacobi(p)).unwrap();
    let ls = RadialGrid::from_nodes(vec![0.5, 2.0, 5.0, 9.0]).unwrap().into_shared();
    let a = jacobi_forward(&f, &p, &ls).unwrap();
    let b = jacobi_forward(&lf, &p, &ls).unwrap();
    let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs())) * 10.0;
    for ((l, v), w) in ls.nodes().iter().zip(a.values()).zip(b.values()) {
        let expect = -(l * l + p.rho() * p.rho()) * v;
        assert!((w - expect).abs() < 1e-5 * scale, "lambda = {l}: {w} vs {expect}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hankel_linear(c1 in -3.0f64..3.0, c2 in -3.0f64..3.0, alpha in -0.9f64..4.0) {
        let g = make_grid(10.0, 20, 12).unwrap().into_shared();
        let f1 = SampledRadialFunction::from_fn(g.clone(), gaussian).unwrap();
        let f2 = SampledRadialFunction::from_fn(g.clone(), |r| poly_bump(r, 1.0, 3.0, 6)).unwrap();
        let mix = SampledRadialFunction::from_fn(g, |r| c1 * gaussian(r) + c2 * poly_bump(r, 1.0, 3.0, 6)).unwrap();
        let ls = lambda_grid(5.0, 2);
        let (h1, h2, hm) = (hankel_forward(&f1, alpha, &ls).unwrap(), hankel_forward(&f2, alpha, &ls).unwrap(), hankel_forward(&mix, alpha, &ls).unwrap());
        for i in 0..ls.len() {
            let e = c1 * h1.values()[i] + c2 * h2.values()[i];
            prop_assert!((hm.values()[i] - e).abs() <= 1e-12 * (1.0 + e.abs()));
        }
    }

    #[test]
    fn power_norm_monotone_in_m_above_one(decay in 0.05f64..2.0, shift in 1.0f64..3.0) {
        let f = SpectralSamples::from_fn(make_grid(40.0, 10, 16).unwrap().into_shared(), WeightKind::Custom, |l| if l >= 1.0 { (-decay * l).exp() } else { 0.0 }).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for m in 0..12 {
            let v = spectral_power_norm(&f, shift, m, WeightKind::Custom).log_norm;
            prop_assert!(v >= prev);
            prev = v;
        }
    }
}
