//! Jacobi polynomials and the L2-normalized zonal spherical functions of a
//! rank-one space.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::quadrature::QuadratureRule;

/// Default constant of the admissible window `c/n <= theta <= pi - c/n`
/// for the large-degree expansion.
pub const DEFAULT_WINDOW: f64 = 1.0;

/// Minimum quadrature nodes per degree when tabulating zonal functions.
pub const NODES_PER_DEGREE: usize = 10;

/// Coefficients of `P_n = (a_n x + b_n) P_{n-1} - c_n P_{n-2}` for n >= 2.
#[derive(Debug, Clone)]
struct Recurrence {
    sigma: f64,
    tau: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl Recurrence {
    fn new(sigma: f64, tau: f64, max_degree: usize) -> Self {
        let ab = sigma + tau;
        let len = max_degree + 1;
        let (mut a, mut b, mut c) = (vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        for n in 2..len {
            let nf = n as f64;
            let two_n_ab = 2.0 * nf + ab;
            let denom = 2.0 * nf * (nf + ab) * (two_n_ab - 2.0);
            a[n] = (two_n_ab - 1.0) * two_n_ab * (two_n_ab - 2.0) / denom;
            b[n] = (two_n_ab - 1.0) * (sigma * sigma - tau * tau) / denom;
            c[n] = 2.0 * (nf + sigma - 1.0) * (nf + tau - 1.0) * two_n_ab / denom;
        }
        Recurrence { sigma, tau, a, b, c }
    }

    /// Fills `out[n] = P_n(x)` for `n < out.len()`.
    fn fill(&self, x: f64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        out[1] = 0.5 * (self.sigma - self.tau) + 0.5 * (self.sigma + self.tau + 2.0) * x;
        for n in 2..out.len() {
            out[n] = (self.a[n] * x + self.b[n]) * out[n - 1] - self.c[n] * out[n - 2];
        }
    }
}

fn check_parameters(sigma: f64, tau: f64) -> Result<()> {
    if sigma <= -1.0 || tau <= -1.0 || sigma.is_nan() || tau.is_nan() {
        return Err(Error::domain(format!(
            "Jacobi parameters must exceed -1, got ({sigma}, {tau})"
        )));
    }
    Ok(())
}

/// `P_n^{(sigma, tau)}(x)` by the three-term recurrence in the degree.
pub fn jacobi_eval(sigma: f64, tau: f64, n: usize, x: f64) -> Result<f64> {
    check_parameters(sigma, tau)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} outside [-1, 1]")));
    }
    let mut out = vec![0.0; n + 1];
    Recurrence::new(sigma, tau, n).fill(x, &mut out);
    Ok(out[n])
}

/// `P_n^{(sigma, tau)}(1) = binom(n + sigma, n)`.
pub fn jacobi_at_one(sigma: f64, n: usize) -> f64 {
    (1..=n).map(|k| (k as f64 + sigma) / k as f64).product()
}

/// Leading part of the large-degree expansion of `P_n(cos theta)`, valid for
/// `c/n <= theta <= pi - c/n`.
pub fn asymptotic_main_term(space: &SpaceParams, n: usize, theta: f64) -> Result<f64> {
    asymptotic_main_term_with(space, n, theta, DEFAULT_WINDOW)
}

/// As [`asymptotic_main_term`] with an explicit window constant.
pub fn asymptotic_main_term_with(
    space: &SpaceParams,
    n: usize,
    theta: f64,
    window: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("the expansion needs degree n >= 1"));
    }
    let lo = window / n as f64;
    if !(theta >= lo && theta <= PI - lo) {
        return Err(Error::domain(format!(
            "theta = {theta} outside the window [{lo}, {}]",
            PI - lo
        )));
    }
    let (sigma, tau) = (space.sigma_f64(), space.tau_f64());
    Ok(envelope(sigma, tau, n, theta) * main_cosine(sigma, tau, n, theta))
}

/// `(pi n)^{-1/2} sin(theta/2)^{-sigma-1/2} cos(theta/2)^{-tau-1/2}`.
pub fn envelope(sigma: f64, tau: f64, n: usize, theta: f64) -> f64 {
    (PI * n as f64).powf(-0.5)
        * (0.5 * theta).sin().powf(-sigma - 0.5)
        * (0.5 * theta).cos().powf(-tau - 0.5)
}

fn main_cosine(sigma: f64, tau: f64, n: usize, theta: f64) -> f64 {
    ((n as f64 + 0.5 * (sigma + tau + 1.0)) * theta - 0.5 * (sigma + 0.5) * PI).cos()
}

/// Normalization data of the zonal functions `Z~_n`, n < `max_degree`,
/// without the tabulated values. Enough to evaluate `Z~_n` anywhere.
#[derive(Debug, Clone)]
pub struct ZonalBasis {
    pub space: SpaceParams,
    pub max_degree: usize,
    /// L2(X) norm of the unnormalized zonal polynomial of degree n.
    pub l2norms: Vec<f64>,
    /// `c_n = 1 / (l2norms[n] sqrt(pi n))`, with `c_0 = 1`.
    pub lead_coeffs: Vec<f64>,
    pub quadrature_nodes: usize,
    recurrence: Recurrence,
}

impl ZonalBasis {
    /// `Z~_n(theta)` for every `n < max_degree`, written into `out`.
    pub fn eval_into(&self, theta: f64, out: &mut [f64]) {
        let n = out.len().min(self.max_degree);
        self.recurrence.fill(theta.cos(), &mut out[..n]);
        for (v, norm) in out[..n].iter_mut().zip(&self.l2norms) {
            *v /= norm;
        }
    }

    /// `Z~_n(theta)` for every `n < max_degree`.
    pub fn eval(&self, theta: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.max_degree];
        self.eval_into(theta, &mut out);
        out
    }
}

/// Zonal functions tabulated on a composite Gauss-Legendre grid over `[0, pi]`.
#[derive(Debug, Clone)]
pub struct ZonalTable {
    pub basis: ZonalBasis,
    pub theta_nodes: Vec<f64>,
    /// Raw quadrature weights; the density is applied separately.
    pub weights: Vec<f64>,
    /// Row-major, entry `(n, i)` at `n * nodes + i`.
    values: Vec<f64>,
}

impl ZonalTable {
    pub fn space(&self) -> &SpaceParams {
        &self.basis.space
    }

    pub fn max_degree(&self) -> usize {
        self.basis.max_degree
    }

    pub fn node_count(&self) -> usize {
        self.theta_nodes.len()
    }

    pub fn l2norms(&self) -> &[f64] {
        &self.basis.l2norms
    }

    pub fn lead_coeffs(&self) -> &[f64] {
        &self.basis.lead_coeffs
    }

    /// `Z~_n` on every node.
    pub fn row(&self, n: usize) -> &[f64] {
        let m = self.node_count();
        &self.values[n * m..(n + 1) * m]
    }

    pub fn value(&self, n: usize, i: usize) -> f64 {
        self.values[n * self.node_count() + i]
    }

    /// Quadrature weight times density at node `i`.
    pub fn measure_weight(&self, i: usize) -> f64 {
        self.weights[i] * self.basis.space.density_unchecked(self.theta_nodes[i])
    }

    pub fn measure_weights(&self) -> Vec<f64> {
        (0..self.node_count()).map(|i| self.measure_weight(i)).collect()
    }

    /// Writes `nodes.csv`, `values.csv` and `norms.csv` into `dir`.
    pub fn write_csv_bundle(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("nodes.csv"))?;
        w.write_record(["theta", "weight"])?;
        for (t, wt) in self.theta_nodes.iter().zip(&self.weights) {
            w.write_record([fmt_f64(*t), fmt_f64(*wt)])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("values.csv"))?;
        w.write_record(["n", "i", "value"])?;
        for n in 0..self.max_degree() {
            for (i, v) in self.row(n).iter().enumerate() {
                w.write_record([n.to_string(), i.to_string(), fmt_f64(*v)])?;
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("norms.csv"))?;
        w.write_record(["n", "l2norm", "c_n"])?;
        for n in 0..self.max_degree() {
            w.write_record([
                n.to_string(),
                fmt_f64(self.basis.l2norms[n]),
                fmt_f64(self.basis.lead_coeffs[n]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip representation, so CSV output is reproducible.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

fn check_resolution(max_degree: usize, nodes: usize) -> Result<()> {
    if max_degree == 0 {
        return Err(Error::domain("max degree must be positive"));
    }
    if nodes < NODES_PER_DEGREE * max_degree {
        return Err(Error::precondition(format!(
            "{nodes} quadrature nodes cannot resolve degree {max_degree}; need at least {}",
            NODES_PER_DEGREE * max_degree
        )));
    }
    Ok(())
}

const CHUNK: usize = 256;

/// Recurrence for the degree-n zonal polynomial, in the variable `cos theta`.
///
/// For `s = 2` the eigenfunction with eigenvalue `2n(2n + d - 1)` is
/// `P_{2n}^{(sigma, sigma)}(cos(theta/2))`, a positive multiple of
/// `P_n^{(sigma, -1/2)}(cos theta)`.
fn zonal_recurrence(space: &SpaceParams, max_degree: usize) -> Recurrence {
    let tau = if space.s == 2 { -0.5 } else { space.tau_f64() };
    Recurrence::new(space.sigma_f64(), tau, max_degree)
}

/// Computes only the normalization of `Z~_n`, n < `max_degree`. Memory is
/// `O(max_degree)`, so this is the route for large degrees.
pub fn build_zonal_basis(space: &SpaceParams, max_degree: usize, nodes: usize) -> Result<ZonalBasis> {
    check_resolution(max_degree, nodes)?;
    let rule = QuadratureRule::with_min_nodes(0.0, PI, nodes);
    let rec = zonal_recurrence(space, max_degree);
    let idx: Vec<usize> = (0..rule.len()).collect();
    // Partial sums per chunk, combined in chunk order for reproducibility.
    let partials: Vec<Vec<f64>> = idx
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; max_degree];
            let mut p = vec![0.0; max_degree];
            for &i in chunk {
                let theta = rule.nodes[i];
                let w = rule.weights[i] * space.density_unchecked(theta);
                rec.fill(theta.cos(), &mut p);
                for (a, v) in acc.iter_mut().zip(&p) {
                    *a += w * v * v;
                }
            }
            acc
        })
        .collect();
    let mut sq = vec![0.0; max_degree];
    for part in &partials {
        for (a, v) in sq.iter_mut().zip(part) {
            *a += v;
        }
    }
    Ok(finish_basis(space, max_degree, rule.len(), rec, sq))
}

fn finish_basis(
    space: &SpaceParams,
    max_degree: usize,
    quadrature_nodes: usize,
    recurrence: Recurrence,
    sq_norms: Vec<f64>,
) -> ZonalBasis {
    let l2norms: Vec<f64> = sq_norms.into_iter().map(f64::sqrt).collect();
    let lead_coeffs = l2norms
        .iter()
        .enumerate()
        .map(|(n, norm)| if n == 0 { 1.0 } else { 1.0 / (norm * (PI * n as f64).sqrt()) })
        .collect();
    ZonalBasis {
        space: space.clone(),
        max_degree,
        l2norms,
        lead_coeffs,
        quadrature_nodes,
        recurrence,
    }
}

/// Tabulates `Z~_n` for `n < max_degree` on at least `nodes` quadrature nodes.
pub fn build_zonal_table(space: &SpaceParams, max_degree: usize, nodes: usize) -> Result<ZonalTable> {
    check_resolution(max_degree, nodes)?;
    let rule = QuadratureRule::with_min_nodes(0.0, PI, nodes);
    let m = rule.len();
    let rec = zonal_recurrence(space, max_degree);

    // Column i holds the zonal polynomials of every degree at theta_i.
    let columns: Vec<Vec<f64>> = rule
        .nodes
        .par_iter()
        .map(|&theta| {
            let mut p = vec![0.0; max_degree];
            rec.fill(theta.cos(), &mut p);
            p
        })
        .collect();
    let mut values = vec![0.0; max_degree * m];
    let mut sq = vec![0.0; max_degree];
    for (i, col) in columns.iter().enumerate() {
        let w = rule.weights[i] * space.density_unchecked(rule.nodes[i]);
        for (n, v) in col.iter().enumerate() {
            values[n * m + i] = *v;
            sq[n] += w * v * v;
        }
    }
    let basis = finish_basis(space, max_degree, m, rec, sq);
    for (n, norm) in basis.l2norms.iter().enumerate() {
        for v in &mut values[n * m..(n + 1) * m] {
            *v /= norm;
        }
    }
    Ok(ZonalTable { basis, theta_nodes: rule.nodes, weights: rule.weights, values })
}
