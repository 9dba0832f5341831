//! Composite Gauss-Legendre rules on an interval.

use std::f64::consts::PI;

/// Points per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights of the given order on `[-1, 1]`.
///
/// Newton iteration on the Legendre recurrence, seeded with the Tricomi
/// approximation of the roots. Adequate for the small orders used per panel.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "quadrature order must be positive");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A fixed set of nodes with weights on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Composite rule with `panels` equal panels of [`PANEL_ORDER`] points on `[a, b]`.
    pub fn composite(a: f64, b: f64, panels: usize) -> Self {
        let (gx, gw) = gauss_legendre(PANEL_ORDER);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let lo = a + h * p as f64;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(lo + 0.5 * h * (x + 1.0));
                weights.push(0.5 * h * w);
            }
        }
        QuadratureRule { nodes, weights }
    }

    /// Composite rule on `[a, b]` with at least `min_nodes` points.
    pub fn with_min_nodes(a: f64, b: f64, min_nodes: usize) -> Self {
        Self::composite(a, b, min_nodes.div_ceil(PANEL_ORDER).max(1))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Integrates `f` over `[a, b]`, doubling the panel count until two
/// successive estimates differ by less than `rel_tol` relative.
pub fn adaptive_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let mut panels = 1;
    let mut prev = QuadratureRule::composite(a, b, panels).integrate(&f);
    loop {
        panels *= 2;
        let next = QuadratureRule::composite(a, b, panels).integrate(&f);
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if (next - prev).abs() <= rel_tol * scale || panels >= 1 << 16 {
            return next;
        }
        prev = next;
    }
}
