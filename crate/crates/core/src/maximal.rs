//! Maximal functions `sup_t |exp(-i t psi) f|` on the space, their weighted
//! `L^p` norms, and the sixth-moment machinery on the torus `T x T`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::{fmt_f64, ZonalTable};
use crate::numtheory::spectral_weight;
use crate::spectral::{propagate, sobolev_norm, PhaseFunction, SphericalSeries};

/// Largest `N^3` accepted by the counting mode of [`strichartz_l6_torus`].
pub const COUNTING_MODE_MAX_TRIPLES: u64 = 150_000_000;

/// Exponent of an `L^p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl FromStr for LpExponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") {
            return Ok(LpExponent::Infinity);
        }
        let p: f64 = s.parse().map_err(|_| Error::domain(format!("cannot parse p = '{s}'")))?;
        if p.is_nan() || p < 1.0 || p.is_infinite() {
            return Err(Error::domain(format!("need p >= 1, got {s}")));
        }
        Ok(LpExponent::Finite(p))
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => f.write_str("inf"),
        }
    }
}

/// `sup_{t in tgrid} |sum a_n exp(-i t psi(lambda_n)) Z~_n(theta_i)|` per node.
pub fn maximal_function(
    f: &SphericalSeries,
    psi: &PhaseFunction,
    table: &ZonalTable,
    tgrid: &[f64],
) -> Result<Vec<f64>> {
    if tgrid.is_empty() {
        return Err(Error::domain("empty time grid"));
    }
    if f.space.family != table.space().family || f.space.d != table.space().d {
        return Err(Error::precondition("series and zonal table live on different spaces"));
    }
    if f.len() > table.max_degree() {
        return Err(Error::precondition("zonal table is too small for the series"));
    }
    let m = table.node_count();
    tgrid
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let g = propagate(f, psi, t)?;
            let mut out = vec![Complex64::new(0.0, 0.0); m];
            for (n, a) in g.coeffs.iter().enumerate() {
                for (o, z) in out.iter_mut().zip(table.row(n)) {
                    *o += a * z;
                }
            }
            Ok(out.into_iter().map(|z| z.norm()).collect())
        })
        .try_reduce(|| vec![0.0; m], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect()))
}

/// `(sum_i w_i A(theta_i) v_i^p)^(1/p)` against the table's measure weights;
/// `p = inf` is the plain maximum over nodes.
pub fn lp_norm_on_space(values: &[f64], table: &ZonalTable, p: LpExponent) -> Result<f64> {
    if values.len() != table.node_count() {
        return Err(Error::precondition(format!(
            "{} values for {} nodes",
            values.len(),
            table.node_count()
        )));
    }
    Ok(match p {
        LpExponent::Infinity => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        LpExponent::Finite(p) => values
            .iter()
            .enumerate()
            .map(|(i, v)| table.measure_weight(i) * v.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    })
}

/// One `L^p` norm in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpEntry {
    pub p: String,
    pub value: f64,
}

/// One Sobolev norm in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevEntry {
    pub alpha: f64,
    pub value: f64,
}

/// Result of a maximal-function scan. The `inf` norm ignores the density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalReport {
    pub space: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub phase: String,
    pub theta: Vec<f64>,
    pub sup: Vec<f64>,
    pub lp_norms: Vec<LpEntry>,
    pub t_grid_size: usize,
    pub theta_nodes: usize,
    pub sobolev_norms: Vec<SobolevEntry>,
}

impl MaximalReport {
    pub fn build(
        f: &SphericalSeries,
        psi: &PhaseFunction,
        table: &ZonalTable,
        tgrid: &[f64],
        p_norms: &[LpExponent],
        alphas: &[f64],
    ) -> Result<Self> {
        let sup = maximal_function(f, psi, table, tgrid)?;
        let lp_norms = p_norms
            .iter()
            .map(|&p| Ok(LpEntry { p: p.to_string(), value: lp_norm_on_space(&sup, table, p)? }))
            .collect::<Result<_>>()?;
        let sobolev_norms = alphas
            .iter()
            .map(|&alpha| Ok(SobolevEntry { alpha, value: sobolev_norm(f, alpha)? }))
            .collect::<Result<_>>()?;
        Ok(MaximalReport {
            space: f.space.id(),
            n: f.len(),
            phase: psi.id(),
            theta: table.theta_nodes.clone(),
            sup,
            lp_norms,
            t_grid_size: tgrid.len(),
            theta_nodes: table.node_count(),
            sobolev_norms,
        })
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Writes `theta,sup`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["theta", "sup"])?;
        for (t, s) in self.theta.iter().zip(&self.sup) {
            w.write_record([fmt_f64(*t), fmt_f64(*s)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// How [`strichartz_l6_torus`] computes the norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L6Mode {
    /// Uniform product grid, exact for the trigonometric polynomial `|F|^6`.
    Quadrature,
    /// `sum_{u,v} |sum_{n1+n2+n3=u, w1+w2+w3=v} a a a|^2`.
    Counting,
}

impl FromStr for L6Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quadrature" => Ok(L6Mode::Quadrature),
            "counting" => Ok(L6Mode::Counting),
            other => Err(Error::domain(format!("unknown L6 mode '{other}'; expected quadrature or counting"))),
        }
    }
}

fn weights(n: usize, s: u64, ell: u64) -> Vec<u64> {
    (0..n as u64).map(|k| spectral_weight(s, ell, k)).collect()
}

/// Values of `F(t, .) = sum a_n exp(-i t w_n) exp(i n theta)` on `m` uniform
/// angles. Frequencies are folded modulo `m`, so the values are exact for
/// any `m`.
struct CircleEvaluator {
    m: usize,
    fft: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl CircleEvaluator {
    fn new(m: usize) -> Self {
        // exp(+i n theta_j) = inverse DFT convention.
        let fft = FftPlanner::new().plan_fft_inverse(m);
        CircleEvaluator { m, fft }
    }

    fn eval(&self, a: &[Complex64], w: &[u64], t: f64, buf: &mut Vec<Complex64>, scratch: &mut Vec<Complex64>) {
        buf.clear();
        buf.resize(self.m, Complex64::new(0.0, 0.0));
        for (n, (an, wn)) in a.iter().zip(w).enumerate() {
            let phase = (t * *wn as f64).rem_euclid(2.0 * PI);
            buf[n % self.m] += an * Complex64::from_polar(1.0, -phase);
        }
        scratch.resize(self.fft.get_inplace_scratch_len(), Complex64::new(0.0, 0.0));
        self.fft.process_with_scratch(buf, scratch);
    }
}

/// `||sum a_n exp(-i t s n (s n + ell)) exp(i n theta)||_{L6(T x T)}` with
/// normalized measure.
pub fn strichartz_l6_torus(a: &[Complex64], s: u64, ell: u64, mode: L6Mode) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::domain("empty coefficient list"));
    }
    if s == 0 {
        return Err(Error::domain("s must be positive"));
    }
    match mode {
        L6Mode::Counting => l6_counting(a, s, ell),
        L6Mode::Quadrature => l6_quadrature(a, s, ell),
    }
}

fn l6_counting(a: &[Complex64], s: u64, ell: u64) -> Result<f64> {
    let n = a.len();
    let triples = (n as u64).saturating_pow(3);
    if triples > COUNTING_MODE_MAX_TRIPLES {
        return Err(Error::resource(format!(
            "counting mode enumerates N^3 = {triples} triples (limit {COUNTING_MODE_MAX_TRIPLES}); \
             use quadrature mode or a smaller N"
        )));
    }
    let w = weights(n, s, ell);
    let v_max = 3 * w[n - 1] as usize;
    let top = n - 1;
    let per_u: Vec<f64> = (0..=3 * top)
        .into_par_iter()
        .map_init(
            || (vec![Complex64::new(0.0, 0.0); v_max + 1], Vec::<usize>::new()),
            |(buf, touched), u| {
                for n1 in u.saturating_sub(2 * top)..=u.min(top) {
                    let rest = u - n1;
                    let p1 = a[n1];
                    for n2 in rest.saturating_sub(top)..=rest.min(top) {
                        let n3 = rest - n2;
                        let v = (w[n1] + w[n2] + w[n3]) as usize;
                        if buf[v] == Complex64::new(0.0, 0.0) {
                            touched.push(v);
                        }
                        buf[v] += p1 * a[n2] * a[n3];
                    }
                }
                touched.sort_unstable();
                touched.dedup();
                let mut sum = 0.0;
                for &v in touched.iter() {
                    sum += buf[v].norm_sqr();
                    buf[v] = Complex64::new(0.0, 0.0);
                }
                touched.clear();
                sum
            },
        )
        .collect();
    Ok(per_u.iter().sum::<f64>().powf(1.0 / 6.0))
}

/// Grid sizes for the exact product rule: the `t` axis must exceed the
/// largest `t`-frequency `3 w_max` of `|F|^6` and the angle axis `3(N - 1)`.
pub fn l6_quadrature_grid(n: usize, s: u64, ell: u64) -> (usize, usize) {
    let w_max = spectral_weight(s, ell, n as u64 - 1) as usize;
    let t_nodes = (64 * n * n).max(3 * w_max + 1);
    let theta_nodes = (8 * n).max(3 * (n - 1) + 1).next_power_of_two();
    (t_nodes, theta_nodes)
}

fn l6_quadrature(a: &[Complex64], s: u64, ell: u64) -> Result<f64> {
    let n = a.len();
    let (mt, mth) = l6_quadrature_grid(n, s, ell);
    let w = weights(n, s, ell);
    let ev = CircleEvaluator::new(mth);
    let per_t: Vec<f64> = (0..mt)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(buf, scratch), k| {
                let t = 2.0 * PI * k as f64 / mt as f64;
                ev.eval(a, &w, t, buf, scratch);
                buf.iter().map(|z| z.norm_sqr().powi(3)).sum::<f64>()
            },
        )
        .collect();
    let total: f64 = per_t.iter().sum();
    Ok((total / (mt * mth) as f64).powf(1.0 / 6.0))
}

/// `(mean_j sup_{t in tgrid} |F(t, theta_j)|^6)^(1/6)` over `theta_nodes`
/// uniform angles, `F` as in [`strichartz_l6_torus`].
pub fn circle_maximal_l6(a: &[Complex64], s: u64, ell: u64, theta_nodes: usize, tgrid: &[f64]) -> Result<f64> {
    if a.is_empty() || tgrid.is_empty() || theta_nodes == 0 {
        return Err(Error::domain("need coefficients, times and angles"));
    }
    if s == 0 {
        return Err(Error::domain("s must be positive"));
    }
    let w = weights(a.len(), s, ell);
    let ev = CircleEvaluator::new(theta_nodes);
    let sup = tgrid
        .par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(buf, scratch), &t| {
                ev.eval(a, &w, t, buf, scratch);
                buf.iter().map(|z| z.norm()).collect::<Vec<f64>>()
            },
        )
        .reduce(
            || vec![0.0; theta_nodes],
            |x, y| x.iter().zip(&y).map(|(p, q)| p.max(*q)).collect(),
        );
    let mean = sup.iter().map(|v| v.powi(6)).sum::<f64>() / theta_nodes as f64;
    Ok(mean.powf(1.0 / 6.0))
}
