//! Log-gamma (real and complex) and Pochhammer symbols.

use num_complex::Complex64;

use crate::error::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

const SHIFT: f64 = 15.0;

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn stirling_real(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    let mut p = inv;
    for c in STIRLING {
        acc += c * p;
        p *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + acc
}

fn stirling_complex(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for c in STIRLING {
        acc += p * c;
        p *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + acc
}

/// ln|Γ(x)| for real x off the poles.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite {x}")));
    }
    if is_pole(x) {
        return Err(Error::Pole(x));
    }
    if x < 0.5 {
        // reflection
        let s = (std::f64::consts::PI * x).sin().abs();
        return Ok(std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x)?);
    }
    let mut x = x;
    let mut prod = 1.0;
    while x < SHIFT {
        prod *= x;
        x += 1.0;
    }
    Ok(stirling_real(x) - prod.ln())
}

/// Sign of Γ(x) for real x off the poles.
pub fn gamma_sign(x: f64) -> f64 {
    if x > 0.0 {
        return 1.0;
    }
    // Γ alternates sign between consecutive negative integers
    if (x.floor() as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Γ(x) for real x off the poles.
pub fn gamma(x: f64) -> Result<f64> {
    Ok(gamma_sign(x) * ln_gamma(x)?.exp())
}

/// Principal-branch log Γ(z).
///
/// On the negative real axis the imaginary part is iπ times the number of
/// negative factors met by the upward recurrence.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite {z}")));
    }
    if z.im == 0.0 && is_pole(z.re) {
        return Err(Error::Pole(z.re));
    }
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while w.re < SHIFT {
        acc += w.ln();
        w += 1.0;
    }
    Ok(stirling_complex(w) - acc)
}

/// Rising factorial (z)_m.
pub fn pochhammer(z: Complex64, m: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..m {
        acc *= z + k as f64;
    }
    acc
}

/// Real rising factorial (x)_m.
pub fn pochhammer_real(x: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, k| acc * (x + k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_trivial_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        let v = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((v.re - 24f64.ln()).abs() < 1e-14 && v.im.abs() < 1e-15);
        let h = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((h.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert_eq!(log_gamma(c(x, 0.0)), Err(Error::Pole(x)));
            assert!(ln_gamma(x).is_err());
        }
        assert!(log_gamma(c(-1.0, 1e-3)).is_ok());
    }

    #[test]
    fn real_matches_factorials() {
        let mut f = 1.0f64;
        for n in 1..30 {
            f *= n as f64;
            let lg = ln_gamma(n as f64 + 1.0).unwrap();
            assert!((lg - f.ln()).abs() <= 1e-13 * f.ln().max(1.0), "n = {n}");
        }
    }

    #[test]
    fn real_reflection_and_sign() {
        // Γ(-1/2) = -2√π
        let g = gamma(-0.5).unwrap();
        assert!((g + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // Γ(-3/2) = 4√π/3
        let g = gamma(-1.5).unwrap();
        assert!((g - 4.0 * std::f64::consts::PI.sqrt() / 3.0).abs() < 1e-13);
        assert!((gamma(1e-8).unwrap() * 1e-8 - 1.0).abs() < 1e-7);
    }

    #[test]
    fn complex_against_modulus_identity() {
        // |Γ(iy)|² = π / (y sinh πy)
        for y in [0.1, 1.0, 3.0, 10.0, 40.0] {
            let lg = log_gamma(c(0.0, y)).unwrap();
            let expect = 0.5 * (std::f64::consts::PI / (y * (std::f64::consts::PI * y).sinh())).ln();
            assert!((lg.re - expect).abs() < 1e-12 * expect.abs().max(1.0), "y = {y}");
        }
        // |Γ(1/2 + iy)|² = π / cosh πy
        for y in [0.5, 2.0, 20.0] {
            let lg = log_gamma(c(0.5, y)).unwrap();
            let expect = 0.5 * (std::f64::consts::PI / (std::f64::consts::PI * y).cosh()).ln();
            assert!((lg.re - expect).abs() < 1e-12 * expect.abs().max(1.0));
        }
    }

    #[test]
    fn complex_conjugate_symmetry() {
        let z = c(0.3, 2.7);
        let a = log_gamma(z).unwrap();
        let b = log_gamma(z.conj()).unwrap();
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn pochhammer_trivial() {
        assert_eq!(pochhammer(c(3.3, -1.0), 0), c(1.0, 0.0));
        assert_eq!(pochhammer(c(2.0, 0.0), 3), c(24.0, 0.0));
        assert_eq!(pochhammer(c(0.5, 0.0), 2), c(0.75, 0.0));
        assert_eq!(pochhammer_real(0.5, 2), 0.75);
    }

    #[test]
    fn pochhammer_is_gamma_ratio() {
        let z = c(1.25, 0.75);
        for m in 0..12 {
            let lhs = pochhammer(z, m);
            let rhs = (log_gamma(z + m as f64).unwrap() - log_gamma(z).unwrap()).exp();
            assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm());
        }
    }
}
