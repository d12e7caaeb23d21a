//! Standard test profiles.

/// (1 - u²)^k on [a, b] with u the affine map onto [-1, 1]; zero outside.
pub fn poly_bump(r: f64, a: f64, b: f64, k: i32) -> f64 {
    if r <= a || r >= b {
        return 0.0;
    }
    let u = (2.0 * r - a - b) / (b - a);
    (1.0 - u * u).powi(k)
}

/// e^{-x²/2}.
pub fn gaussian(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}
