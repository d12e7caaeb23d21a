//! Finite-difference application of the radial operators.

use std::sync::Arc;

use super::grid::SampledRadialFunction;
use crate::error::{Result, Warning};
use crate::specfun::JacobiParams;

const STENCIL: usize = 5;

/// Radial operators understood by [`apply_operator_fd`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpKind {
    /// Δ_{α,a} f = f'' + (2α+1)/r f' - a² f.
    Bessel { alpha: f64, a: f64 },
    /// 𝓛_{α,β} f = f'' + ((2α+1)coth r + (2β+1)tanh r) f'.
    Jacobi(JacobiParams),
    /// Radial part of the Dunkl Laplacian on degree-m components:
    /// u'' + (2λ_κ+1)/r u' - m(m+2λ_κ)/r² u.
    DunklRadial { lambda_kappa: f64, m: u32 },
}

impl OpKind {
    fn coefficients(&self, r: f64) -> (f64, f64) {
        match *self {
            OpKind::Bessel { alpha, a } => ((2.0 * alpha + 1.0) / r, -a * a),
            OpKind::Jacobi(p) => (p.drift(r), 0.0),
            OpKind::DunklRadial { lambda_kappa, m } => {
                let m = m as f64;
                ((2.0 * lambda_kappa + 1.0) / r, -m * (m + 2.0 * lambda_kappa) / (r * r))
            }
        }
    }

    /// Operator value at r = 0 for an even profile, from f''(0) and f(0).
    fn at_origin(&self, f2: f64, f0: f64) -> f64 {
        match *self {
            OpKind::Bessel { alpha, a } => (2.0 * alpha + 2.0) * f2 - a * a * f0,
            OpKind::Jacobi(p) => (2.0 * p.alpha() + 2.0) * f2,
            OpKind::DunklRadial { lambda_kappa, m } => {
                if m == 0 {
                    (2.0 * lambda_kappa + 2.0) * f2
                } else {
                    0.0
                }
            }
        }
    }
}

/// Fornberg weights for derivatives 0..=m at x0 from the given nodes.
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn stencil_start(i: usize, n: usize) -> usize {
    let half = STENCIL / 2;
    if i < half {
        0
    } else if i + half >= n {
        n - STENCIL
    } else {
        i - half
    }
}

/// Applies `op` at every node: centered five-point stencils, one-sided near the ends.
pub fn apply_operator_fd(f: &SampledRadialFunction, op: OpKind) -> Result<SampledRadialFunction> {
    let xs = f.nodes();
    let ys = f.values();
    let n = xs.len();
    if n < STENCIL {
        return Err(crate::Error::Domain(format!("need at least {STENCIL} nodes, got {n}")));
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        let s = stencil_start(i, n);
        let w = fornberg_weights(xs[i], &xs[s..s + STENCIL], 2);
        let d1: f64 = (0..STENCIL).map(|k| w[1][k] * ys[s + k]).sum();
        let d2: f64 = (0..STENCIL).map(|k| w[2][k] * ys[s + k]).sum();
        out[i] = if xs[i] < 1e-12 {
            op.at_origin(d2, ys[i])
        } else {
            let (a1, a0) = op.coefficients(xs[i]);
            d2 + a1 * d1 + a0 * ys[i]
        };
    }
    SampledRadialFunction::new(Arc::clone(f.grid()), out)
}

/// Outcome of an eigenfunction check.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheck {
    /// max |L f - e f| / max |e f| over interior nodes.
    pub residual: f64,
    pub warning: Option<Warning>,
}

/// Relative residual of L f = eigenvalue · f, skipping two nodes at each end.
pub fn eigen_residual(f: &SampledRadialFunction, op: OpKind, eigenvalue: f64) -> Result<EigenCheck> {
    let lf = apply_operator_fd(f, op)?;
    let n = f.values().len();
    let (lo, hi) = if n > 8 { (2, n - 2) } else { (0, n) };
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in lo..hi {
        let v = f.values()[i];
        num = num.max((lf.values()[i] - eigenvalue * v).abs());
        den = den.max(if eigenvalue != 0.0 { (eigenvalue * v).abs() } else { v.abs() });
    }
    let residual = if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    };
    let warning = (residual > 1e-4).then_some(Warning::GridTooCoarse { residual });
    Ok(EigenCheck { residual, warning })
}

/// Pointwise residual of f'' + drift·f' + μ f = 0 from a uniform local
/// five-point stencil of spacing h, normalized by |f''| + |drift f'| + |μ f|.
pub fn ode_residual(f: impl Fn(f64) -> f64, r: f64, h: f64, drift: f64, mu: f64) -> f64 {
    let v: Vec<f64> = (-2..=2).map(|k| f(r + k as f64 * h)).collect();
    let d1 = (v[0] - 8.0 * v[1] + 8.0 * v[3] - v[4]) / (12.0 * h);
    let d2 = (-v[0] + 16.0 * v[1] - 30.0 * v[2] + 16.0 * v[3] - v[4]) / (12.0 * h * h);
    let scale = d2.abs() + (drift * d1).abs() + (mu * v[2]).abs();
    if scale == 0.0 {
        return 0.0;
    }
    (d2 + drift * d1 + mu * v[2]).abs() / scale
}
