//! Dormand–Prince 5(4) with standard step control.

use std::sync::Arc;

use super::grid::{RadialGrid, SampledRadialFunction};
use crate::error::{Error, Result};
use crate::specfun::JacobiParams;

/// Accepted step points and states.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub r: Vec<f64>,
    pub y: Vec<Vec<f64>>,
}

impl OdeSolution {
    pub fn last(&self) -> &[f64] {
        self.y.last().expect("solution has at least the initial point")
    }

    /// One component on the step points (trapezoid weights).
    pub fn to_sampled(&self, component: usize) -> Result<SampledRadialFunction> {
        let grid = Arc::new(RadialGrid::from_nodes(self.r.clone())?);
        SampledRadialFunction::new(grid, self.y.iter().map(|y| y[component]).collect())
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

/// Integrates y' = rhs(r, y) over `r_span`; each step's error is held below
/// tol · h / span (mixed absolute/relative), hence also below tol.
pub fn ode_solve_ivp<F>(mut rhs: F, r_span: (f64, f64), y0: &[f64], tol: f64) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let (r0, r1) = r_span;
    if !(r1 >= r0) || !(tol > 0.0) {
        return Err(Error::Domain(format!("bad span ({r0}, {r1}) or tol {tol}")));
    }
    let n = y0.len();
    let mut sol = OdeSolution { r: vec![r0], y: vec![y0.to_vec()] };
    if r1 == r0 {
        return Ok(sol);
    }
    let mut r = r0;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut h = (r1 - r0) * tol.powf(0.2).min(0.01);
    rhs(r, &y, &mut k[0]);
    while r < r1 {
        if r + h > r1 {
            h = r1 - r;
        }
        if h <= 1e-14 * r.abs().max(1.0) {
            return Err(Error::StepUnderflow { r });
        }
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            rhs(r + C[s] * h, &tmp, &mut k[s]);
            if s == 6 {
                y_new.copy_from_slice(&tmp);
            }
        }
        // error per unit step, so the accumulated error stays near tol
        let tol_h = tol * (h / (r1 - r0)).min(1.0);
        let mut err = 0.0;
        for i in 0..n {
            let e: f64 = (0..7).map(|s| E[s] * k[s][i]).sum::<f64>() * h;
            let sc = tol_h * (1.0 + y[i].abs().max(y_new[i].abs()));
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if err <= 1.0 {
            r += h;
            y.copy_from_slice(&y_new);
            // first-same-as-last
            let last = k[6].clone();
            k[0] = last;
            sol.r.push(r);
            sol.y.push(y.clone());
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= fac;
    }
    Ok(sol)
}

/// Launch point for the Jacobi equation, past the coth singularity.
pub const JACOBI_LAUNCH: f64 = 1e-4;

/// φ_λ(r) by integrating φ'' + ((2α+1)coth r + (2β+1)tanh r)φ' + (λ²+ϱ²)φ = 0
/// from a two-term Taylor launch at r₀ = 1e-4.
pub fn jacobi_ivp(p: &JacobiParams, lambda: f64, r: f64, tol: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r = {r} must be nonnegative")));
    }
    let mu = lambda * lambda + p.rho() * p.rho();
    let a1 = 2.0 * (p.alpha() + 1.0);
    let taylor = |x: f64| 1.0 - mu * x * x / (2.0 * a1);
    if r <= JACOBI_LAUNCH {
        return Ok(taylor(r));
    }
    let r0 = JACOBI_LAUNCH;
    let y0 = [taylor(r0), -mu * r0 / a1];
    let sol = ode_solve_ivp(
        |x, y, dy| {
            dy[0] = y[1];
            dy[1] = -p.drift(x) * y[1] - mu * y[0];
        },
        (r0, r),
        &y0,
        tol,
    )?;
    Ok(sol.last()[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_run(lambda: f64, tol: f64) -> f64 {
        let sol = ode_solve_ivp(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -lambda * lambda * y[0];
            },
            (0.0, 5.0),
            &[1.0, 0.0],
            tol,
        )
        .unwrap();
        sol.last()[0]
    }

    #[test]
    fn harmonic_oscillator() {
        let l = 2.3;
        let v = cos_run(l, 1e-10);
        assert!((v - (l * 5.0).cos()).abs() < 1e-8);
    }

    #[test]
    fn loose_and_tight_runs_agree() {
        let a = cos_run(1.7, 1e-3);
        let b = cos_run(1.7, 1e-10);
        assert!((a - b).abs() <= 1e-3, "{}", (a - b).abs());
    }

    #[test]
    fn self_convergence() {
        let exact = (1.3f64 * 5.0).cos();
        let mut prev = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8] {
            let e = (cos_run(1.3, tol) - exact).abs();
            assert!(e <= 0.5 * prev, "tol = {tol}: {e} vs {prev}");
            prev = e;
        }
    }

    #[test]
    fn jacobi_oracle_matches_closed_form() {
        // (1/2, -1/2): sin(λr) / (λ sinh r)
        let p = JacobiParams::new(0.5, -0.5).unwrap();
        let v = jacobi_ivp(&p, 1.0, 2.0, 1e-12).unwrap();
        let exact = 2f64.sin() / 2f64.sinh();
        assert!((v - exact).abs() < 1e-7, "{v} vs {exact}");
    }

    #[test]
    fn solution_samples() {
        let sol = ode_solve_ivp(|_, y, dy| dy[0] = -y[0], (0.0, 1.0), &[1.0], 1e-8).unwrap();
        let f = sol.to_sampled(0).unwrap();
        assert!(f.nodes().windows(2).all(|w| w[1] > w[0]));
        assert!((sol.last()[0] - (-1f64).exp()).abs() < 1e-7);
    }

    #[test]
    fn rejects_backward_span() {
        assert!(ode_solve_ivp(|_, _, _| {}, (1.0, 0.0), &[1.0], 1e-6).is_err());
    }
}
