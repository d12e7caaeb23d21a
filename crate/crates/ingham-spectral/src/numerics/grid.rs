use std::io::{self, Write};
use std::sync::Arc;

use super::gauss::gauss_legendre;
use crate::error::{Error, Result};

/// Quadrature family behind a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    GaussLegendre { order: usize },
    Trapezoid,
}

/// Nodes on [lo, hi] with positive weights. Also used for λ-windows.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scheme: Scheme,
    lo: f64,
    hi: f64,
}

impl RadialGrid {
    /// Composite Gauss–Legendre on the given panel breakpoints.
    pub fn composite(breaks: &[f64], order: usize) -> Result<Self> {
        if order == 0 || breaks.len() < 2 {
            return Err(Error::Domain("composite grid needs order >= 1 and two breakpoints".into()));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks[0] < 0.0 {
            return Err(Error::Domain("breakpoints must be nonnegative and strictly increasing".into()));
        }
        let rule = gauss_legendre(order);
        let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                nodes.push(a + half * (x + 1.0));
                weights.push(half * wt);
            }
        }
        Ok(Self { nodes, weights, scheme: Scheme::GaussLegendre { order }, lo: breaks[0], hi: *breaks.last().unwrap() })
    }

    /// Uniform panels on [lo, hi].
    pub fn uniform_panels(lo: f64, hi: f64, panels: usize, order: usize) -> Result<Self> {
        if !(hi > lo) || panels == 0 {
            return Err(Error::Domain(format!("bad interval [{lo}, {hi}] or zero panels")));
        }
        let breaks: Vec<f64> = (0..=panels).map(|k| lo + (hi - lo) * k as f64 / panels as f64).collect();
        Self::composite(&breaks, order)
    }

    /// Uniform panels on [0, r_max] with the first panel split geometrically
    /// (ratio 1/4, `levels` times) to absorb r^s endpoint behaviour.
    pub fn graded(r_max: f64, panels: usize, order: usize, levels: usize) -> Result<Self> {
        if !(r_max > 0.0) || panels == 0 {
            return Err(Error::Domain("graded grid needs r_max > 0 and panels > 0".into()));
        }
        let h = r_max / panels as f64;
        let mut breaks = vec![0.0];
        for k in (1..=levels).rev() {
            breaks.push(h * 0.25f64.powi(k as i32));
        }
        breaks.extend((1..=panels).map(|k| h * k as f64));
        Self::composite(&breaks, order)
    }

    /// Trapezoid weights on given ascending nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes[0] < 0.0 {
            return Err(Error::Domain("trapezoid grid needs >= 2 strictly increasing nodes".into()));
        }
        let n = nodes.len();
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = nodes[i + 1] - nodes[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        let (lo, hi) = (nodes[0], nodes[n - 1]);
        Ok(Self { nodes, weights, scheme: Scheme::Trapezoid, lo, hi })
    }

    /// Uniform trapezoid grid with n ≥ 2 nodes.
    pub fn trapezoid(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::Domain("trapezoid grid needs n >= 2 and hi > lo".into()));
        }
        Self::from_nodes((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Interval covered by the quadrature.
    pub fn span(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Σ wᵢ g(xᵢ).
    pub fn integrate_fn(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}

/// Composite Gauss–Legendre grid on [0, r_max].
pub fn make_grid(r_max: f64, panels: usize, order: usize) -> Result<RadialGrid> {
    RadialGrid::uniform_panels(0.0, r_max, panels, order)
}

/// A profile sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    support_hint: Option<(f64, f64)>,
}

impl SampledRadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sampled values must be finite".into()));
        }
        Ok(Self { grid, values, support_hint: None })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n], support_hint: None }
    }

    /// Attach a support interval; rejected when values outside it are not negligible.
    pub fn with_support(mut self, a: f64, b: f64) -> Result<Self> {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let bad = self.grid.nodes().iter().zip(&self.values).any(|(&r, v)| (r < a || r > b) && v.abs() > 1e-14 * peak);
        if bad {
            return Err(Error::Invariant(format!("values outside the support hint [{a}, {b}]")));
        }
        self.support_hint = Some((a, b));
        Ok(self)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_hint(&self) -> Option<(f64, f64)> {
        self.support_hint
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Nodes, weights and values as CSV.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "node,weight,value")?;
        for ((r, w), v) in self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.values) {
            writeln!(out, "{r:.17e},{w:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

/// Σ wᵢ f(rᵢ) extra(rᵢ).
pub fn integrate(f: &SampledRadialFunction, extra_weight: impl Fn(f64) -> f64) -> f64 {
    f.grid
        .nodes()
        .iter()
        .zip(f.grid.weights())
        .zip(&f.values)
        .map(|((&r, &w), &v)| if v == 0.0 { 0.0 } else { w * v * extra_weight(r) })
        .sum()
}

/// Which Plancherel weight a spectral sample set carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// λ^{2α+1} / (2^α Γ(α+1)).
    HankelMeasure {
        alpha: f64,
    },
    /// |c(λ)|^{-2} / (2π).
    JacobiPlancherel {
        alpha: f64,
        beta: f64,
    },
    Custom,
}

/// Transform values on a λ-window (stored on the half-line; evenness implied).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSamples {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    weight_kind: WeightKind,
}

impl SpectralSamples {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, weight_kind: WeightKind) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for {} lambda nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("spectral values must be finite".into()));
        }
        Ok(Self { grid, values, weight_kind })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, weight_kind: WeightKind, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&l| f(l)).collect();
        Self::new(grid, values, weight_kind)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn lambdas(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weight_kind(&self) -> WeightKind {
        self.weight_kind
    }

    /// Window covered by the λ quadrature.
    pub fn window(&self) -> (f64, f64) {
        self.grid.span()
    }

    /// Linear interpolation in λ; even extension for negative arguments.
    pub fn interpolate(&self, lambda: f64) -> Result<f64> {
        let l = lambda.abs();
        let xs = self.grid.nodes();
        let (lo, hi) = self.window();
        if l < lo - 1e-12 || l > hi + 1e-12 {
            return Err(Error::OutOfWindow { lambda, lo, hi });
        }
        // Gauss nodes stop short of the window ends: hold the end values
        if l <= xs[0] {
            return Ok(self.values[0]);
        }
        if l >= xs[xs.len() - 1] {
            return Ok(self.values[xs.len() - 1]);
        }
        let k = xs.partition_point(|&x| x <= l);
        let (x0, x1) = (xs[k - 1], xs[k]);
        let t = (l - x0) / (x1 - x0);
        Ok(self.values[k - 1] * (1.0 - t) + self.values[k] * t)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "lambda,weight,value")?;
        for ((l, w), v) in self.grid.nodes().iter().zip(self.grid.weights()).zip(&self.values) {
            writeln!(out, "{l:.17e},{w:.17e},{v:.17e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_order_two_cubic() {
        let g = make_grid(1.0, 1, 2).unwrap();
        assert!((g.integrate_fn(|r| r.powi(3)) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn gaussian_moment_to_one() {
        let g = make_grid(10.0, 50, 8).unwrap();
        let v = g.integrate_fn(|r| (-r * r / 2.0).exp() * r);
        assert!((v - (1.0 - (-50.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn midpoint_constants() {
        let g = make_grid(1.0, 1, 1).unwrap();
        assert_eq!(g.len(), 1);
        assert!((g.integrate_fn(|_| 3.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn integrate_with_weight() {
        let g = make_grid(1.0, 4, 6).unwrap().into_shared();
        let z = SampledRadialFunction::zero(g.clone());
        assert_eq!(integrate(&z, |r| r), 0.0);
        let one = SampledRadialFunction::from_fn(g, |_| 1.0).unwrap();
        assert!((integrate(&one, |r| r.powf(2.0 * 0.0 + 1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn graded_grid_resolves_endpoint_power() {
        // ∫_0^1 r^{0.2} dr = 1/1.2
        let plain = make_grid(1.0, 10, 16).unwrap();
        let graded = RadialGrid::graded(1.0, 10, 16, 12).unwrap();
        let e_plain = (plain.integrate_fn(|r| r.powf(0.2)) - 1.0 / 1.2).abs();
        let e_graded = (graded.integrate_fn(|r| r.powf(0.2)) - 1.0 / 1.2).abs();
        assert!(e_graded < 1e-11, "{e_graded}");
        assert!(e_plain > 100.0 * e_graded);
    }

    #[test]
    fn trapezoid_exact_on_linear() {
        let g = RadialGrid::trapezoid(0.0, 2.0, 7).unwrap();
        assert!((g.integrate_fn(|r| 3.0 * r + 1.0) - 8.0).abs() < 1e-14);
        assert_eq!(g.scheme(), Scheme::Trapezoid);
    }

    #[test]
    fn support_hint_validated() {
        let g = make_grid(3.0, 6, 4).unwrap().into_shared();
        let f = SampledRadialFunction::from_fn(g, |r| if (1.0..=2.0).contains(&r) { 1.0 } else { 0.0 }).unwrap();
        assert!(f.clone().with_support(1.0, 2.0).is_ok());
        assert!(f.with_support(1.5, 2.0).is_err());
    }

    #[test]
    fn interpolation_and_window() {
        let g = RadialGrid::from_nodes(vec![0.0, 1.0, 2.0]).unwrap().into_shared();
        let s = SpectralSamples::new(g, vec![0.0, 2.0, 6.0], WeightKind::Custom).unwrap();
        assert_eq!(s.interpolate(1.5).unwrap(), 4.0);
        assert_eq!(s.interpolate(-0.5).unwrap(), 1.0);
        assert!(matches!(s.interpolate(2.5), Err(Error::OutOfWindow { .. })));
    }
}
