//! Gauss rules on [-1, 1].

use nalgebra::{DMatrix, SymmetricEigen};

use crate::specfun::ln_gamma;

/// Nodes ascending with matching weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi for the weight (1-x)^a (1+x)^b, a, b > -1, by Golub–Welsch.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1 && a > -1.0 && b > -1.0, "invalid Gauss-Jacobi request");
    let mut m = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let diag = if k == 0 { (b - a) / (ab + 2.0) } else { (b * b - a * a) / (s * (s + 2.0)) };
        m[(k, k)] = diag;
        if k + 1 < n {
            let j = kf + 1.0;
            let s = 2.0 * j + ab;
            // (j + a + b)/(s - 1) is 0/0 at j = 1 when a + b = -1; it equals 1 there
            let ratio = if k == 0 { 1.0 } else { (j + ab) / (s - 1.0) };
            let off = (4.0 * j * (j + a) * (j + b) * ratio / (s * s * (s + 1.0))).sqrt();
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0).unwrap() + ln_gamma(b + 1.0).unwrap()
        - ln_gamma(ab + 2.0).unwrap())
    .exp();
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    Rule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_polynomial_exactness() {
        for n in [1, 2, 5, 16, 33] {
            let r = gauss_legendre(n);
            for k in 0..(2 * n) {
                let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn legendre_nodes_ascending() {
        let r = gauss_legendre(20);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn jacobi_moments() {
        // ∫(1-x)^a x^k dx on [-1,1] against a fine reference with b = 0
        let (a, n) = (-0.3, 12);
        let r = gauss_jacobi(n, a, 0.0);
        // ∫_{-1}^{1} (1-x)^a dx = 2^{a+1}/(a+1)
        let m0: f64 = r.weights.iter().sum();
        assert!((m0 - 2f64.powf(a + 1.0) / (a + 1.0)).abs() < 1e-13);
        // ∫ (1-x)^a (1-x) dx = 2^{a+2}/(a+2)
        let m1: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (1.0 - x)).sum();
        assert!((m1 - 2f64.powf(a + 2.0) / (a + 2.0)).abs() < 1e-13);
        // exact up to degree 2n-1: ∫(1-x)^{a+k} = 2^{a+k+1}/(a+k+1)
        for k in 0..(2 * n) {
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * (1.0 - x).powi(k as i32)).sum();
            let exact = 2f64.powf(a + k as f64 + 1.0) / (a + k as f64 + 1.0);
            assert!((q - exact).abs() < 1e-11 * exact, "k = {k}");
        }
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let g = gauss_jacobi(9, 0.0, 0.0);
        let l = gauss_legendre(9);
        for i in 0..9 {
            assert!((g.nodes[i] - l.nodes[i]).abs() < 1e-13);
            assert!((g.weights[i] - l.weights[i]).abs() < 1e-13);
        }
    }
}
