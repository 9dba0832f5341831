//! Radial spectral data: series in the zonal basis, Sobolev norms, the
//! dispersive propagators `exp(-i t psi(sqrt(-Laplacian)))` and the
//! comparisons between phases that differ by a bounded amount.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::jacobi::{fmt_f64, ZonalBasis, ZonalTable};

/// Piecewise-linear phase through sampled points, increasing in `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomPhase {
    pub label: String,
    r: Vec<f64>,
    psi: Vec<f64>,
}

impl CustomPhase {
    pub fn new(label: impl Into<String>, r: Vec<f64>, psi: Vec<f64>) -> Result<Self> {
        if r.len() < 2 || r.len() != psi.len() {
            return Err(Error::domain("a custom phase needs at least two (r, psi) samples"));
        }
        if r.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("custom phase abscissae must be strictly increasing"));
        }
        if r.iter().chain(&psi).any(|x| !x.is_finite()) || r[0] < 0.0 {
            return Err(Error::domain("custom phase samples must be finite with r >= 0"));
        }
        Ok(CustomPhase { label: label.into(), r, psi })
    }

    /// Reads a headed CSV with columns `r,psi`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let (mut r, mut psi) = (Vec::new(), Vec::new());
        for rec in rd.deserialize() {
            let (a, b): (f64, f64) = rec?;
            r.push(a);
            psi.push(b);
        }
        Self::new(path.display().to_string(), r, psi)
    }

    fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = (self.r[0], *self.r.last().unwrap());
        if x < lo || x > hi {
            return Err(Error::domain(format!(
                "r = {x} outside the custom phase table [{lo}, {hi}]"
            )));
        }
        let k = self.r.partition_point(|&v| v <= x).clamp(1, self.r.len() - 1);
        let (x0, x1) = (self.r[k - 1], self.r[k]);
        let w = (x - x0) / (x1 - x0);
        Ok(self.psi[k - 1] * (1.0 - w) + self.psi[k] * w)
    }
}

/// Dispersive symbol `psi` on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseFunction {
    Schrodinger,
    FractionalPower(f64),
    Boussinesq,
    Beam,
    Custom(CustomPhase),
}

impl PhaseFunction {
    /// The four closed-form phases.
    pub fn catalog() -> [PhaseFunction; 4] {
        [
            PhaseFunction::Schrodinger,
            PhaseFunction::FractionalPower(1.5),
            PhaseFunction::Boussinesq,
            PhaseFunction::Beam,
        ]
    }

    /// Parses `schrodinger`, `fractional:a`, `boussinesq`, `beam` or
    /// `custom:path` (a CSV with columns `r,psi`).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let lower = text.to_ascii_lowercase();
        match lower.as_str() {
            "schrodinger" => return Ok(PhaseFunction::Schrodinger),
            "boussinesq" => return Ok(PhaseFunction::Boussinesq),
            "beam" => return Ok(PhaseFunction::Beam),
            _ => {}
        }
        if let Some(a) = lower.strip_prefix("fractional:") {
            let a: f64 = a
                .parse()
                .map_err(|_| Error::domain(format!("cannot parse fractional exponent '{a}'")))?;
            if !(a > 1.0 && a.is_finite()) {
                return Err(Error::domain(format!("fractional exponent must exceed 1, got {a}")));
            }
            return Ok(PhaseFunction::FractionalPower(a));
        }
        if lower.starts_with("custom:") {
            return Ok(PhaseFunction::Custom(CustomPhase::from_csv(Path::new(&text[7..]))?));
        }
        Err(Error::domain(format!(
            "unknown phase '{text}'; expected schrodinger, fractional:a, boussinesq, beam or custom:path"
        )))
    }

    /// `psi(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::domain(format!("phase argument must be >= 0, got {r}")));
        }
        Ok(match self {
            PhaseFunction::Schrodinger => r * r,
            PhaseFunction::FractionalPower(a) => r.powf(*a),
            PhaseFunction::Boussinesq => r * (1.0 + r * r).sqrt(),
            PhaseFunction::Beam => (1.0 + r.powi(4)).sqrt(),
            PhaseFunction::Custom(c) => c.eval(r)?,
        })
    }

    /// `psi(r) - r^2`, evaluated without cancellation for the closed forms.
    pub fn excess(&self, r: f64) -> Result<f64> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::domain(format!("phase argument must be >= 0, got {r}")));
        }
        Ok(match self {
            PhaseFunction::Schrodinger => 0.0,
            PhaseFunction::FractionalPower(a) => r.powf(*a) - r * r,
            PhaseFunction::Boussinesq => r / ((1.0 + r * r).sqrt() + r),
            PhaseFunction::Beam => 1.0 / ((1.0 + r.powi(4)).sqrt() + r * r),
            PhaseFunction::Custom(c) => c.eval(r)? - r * r,
        })
    }

    /// `psi(lambda_n)` on `space`.
    pub fn at_degree(&self, space: &SpaceParams, n: u64) -> Result<f64> {
        let lam_sq = space.eigenvalue_sq(n);
        match self {
            PhaseFunction::Schrodinger => Ok(lam_sq),
            _ => self.eval(lam_sq.sqrt()),
        }
    }

    /// Stable identifier, e.g. `fractional:1.5`.
    pub fn id(&self) -> String {
        match self {
            PhaseFunction::Schrodinger => "schrodinger".into(),
            PhaseFunction::FractionalPower(a) => format!("fractional:{a}"),
            PhaseFunction::Boussinesq => "boussinesq".into(),
            PhaseFunction::Beam => "beam".into(),
            PhaseFunction::Custom(c) => format!("custom:{}", c.label),
        }
    }
}

impl fmt::Display for PhaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// `exp(-i t psi)` split as `exp(-i t lambda^2) exp(-i t (psi - lambda^2))`.
/// The first factor reduces the integer `lambda^2` modulo the period.
fn multiplier(psi: &PhaseFunction, space: &SpaceParams, n: u64, t: f64) -> Result<Complex64> {
    let lam_sq = space.eigenvalue_sq_int(n);
    let base = reduced_product(t, lam_sq as f64);
    let extra = match psi {
        PhaseFunction::Schrodinger => 0.0,
        _ => reduced_product(t, psi.excess((lam_sq as f64).sqrt())?),
    };
    Ok(Complex64::from_polar(1.0, -(base + extra)))
}

/// `t * x` reduced to `[-pi, pi]` with an exact product and a three-part
/// split of `2 pi`, so the absolute error stays near one ulp of `pi`.
fn reduced_product(t: f64, x: f64) -> f64 {
    const TWO_PI_HI: f64 = std::f64::consts::TAU;
    const TWO_PI_MID: f64 = 2.4492935982947064e-16;
    const TWO_PI_LO: f64 = -5.989539619436679e-33;
    let p = t * x;
    let e = t.mul_add(x, -p);
    let k = (p / TWO_PI_HI).round();
    let r = (-k).mul_add(TWO_PI_HI, p);
    let r = (-k).mul_add(TWO_PI_MID, r);
    (-k).mul_add(TWO_PI_LO, r) + e
}

/// Finite radial expansion `sum_n a_n Z~_n` on one space.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalSeries {
    pub space: SpaceParams,
    pub coeffs: Vec<Complex64>,
}

impl SphericalSeries {
    pub fn new(space: SpaceParams, coeffs: Vec<Complex64>) -> Self {
        SphericalSeries { space, coeffs }
    }

    pub fn zeros(space: SpaceParams, len: usize) -> Self {
        SphericalSeries { space, coeffs: vec![Complex64::new(0.0, 0.0); len] }
    }

    pub fn from_real(space: SpaceParams, coeffs: &[f64]) -> Self {
        SphericalSeries { space, coeffs: coeffs.iter().map(|&a| Complex64::new(a, 0.0)).collect() }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `||f||_{L2}`, the l2 norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficientwise sum; the shorter series is padded with zeros.
    pub fn add(&self, other: &SphericalSeries) -> Result<SphericalSeries> {
        same_space(&self.space, &other.space)?;
        let len = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|n| self.coeffs.get(n).copied().unwrap_or(zero) + other.coeffs.get(n).copied().unwrap_or(zero))
            .collect();
        Ok(SphericalSeries { space: self.space.clone(), coeffs })
    }

    /// Writes `n,re,im`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["n", "re", "im"])?;
        for (n, a) in self.coeffs.iter().enumerate() {
            w.write_record([n.to_string(), fmt_f64(a.re), fmt_f64(a.im)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `n,re,im`; missing degrees are zero.
    pub fn read_csv(space: SpaceParams, path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let mut coeffs: Vec<Complex64> = Vec::new();
        for rec in rd.deserialize() {
            let (n, re, im): (usize, f64, f64) = rec?;
            if coeffs.len() <= n {
                coeffs.resize(n + 1, Complex64::new(0.0, 0.0));
            }
            coeffs[n] = Complex64::new(re, im);
        }
        Ok(SphericalSeries { space, coeffs })
    }
}

fn same_space(a: &SpaceParams, b: &SpaceParams) -> Result<()> {
    if a.family != b.family || a.d != b.d {
        return Err(Error::precondition(format!(
            "space mismatch: {} vs {}",
            a.id(),
            b.id()
        )));
    }
    Ok(())
}

/// `(sum (1 + lambda_n^2)^alpha |a_n|^2)^(1/2)`.
pub fn sobolev_norm(f: &SphericalSeries, alpha: f64) -> Result<f64> {
    if alpha < 0.0 || alpha.is_nan() {
        return Err(Error::domain(format!("Sobolev index must be >= 0, got {alpha}")));
    }
    Ok(f.coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| (1.0 + f.space.eigenvalue_sq(n as u64)).powf(alpha) * a.norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `a_n -> exp(-i t psi(lambda_n)) a_n`.
pub fn propagate(f: &SphericalSeries, psi: &PhaseFunction, t: f64) -> Result<SphericalSeries> {
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| Ok(a * multiplier(psi, &f.space, n as u64, t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(SphericalSeries { space: f.space.clone(), coeffs })
}

/// Schrodinger propagation to the rational time `t = 2 pi k / q`, with the
/// phases `k lambda_n^2 mod q` computed exactly in integers.
pub fn propagate_rational(f: &SphericalSeries, k: u64, q: u64) -> Result<SphericalSeries> {
    if q == 0 {
        return Err(Error::domain("time denominator must be positive"));
    }
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let r = (k as u128 * f.space.eigenvalue_sq_int(n as u64) as u128 % q as u128) as f64;
            a * Complex64::from_polar(1.0, -2.0 * PI * r / q as f64)
        })
        .collect();
    Ok(SphericalSeries { space: f.space.clone(), coeffs })
}

fn check_table(f: &SphericalSeries, space: &SpaceParams, max_degree: usize) -> Result<()> {
    same_space(&f.space, space)?;
    if f.len() > max_degree {
        return Err(Error::precondition(format!(
            "series has {} terms but the zonal data stops at degree {}",
            f.len(),
            max_degree
        )));
    }
    Ok(())
}

/// `sum a_n Z~_n(theta_i)` at the requested node indices.
pub fn evaluate(f: &SphericalSeries, table: &ZonalTable, indices: &[usize]) -> Result<Vec<Complex64>> {
    check_table(f, table.space(), table.max_degree())?;
    if let Some(&i) = indices.iter().find(|&&i| i >= table.node_count()) {
        return Err(Error::domain(format!("node index {i} out of range")));
    }
    Ok(indices
        .iter()
        .map(|&i| f.coeffs.iter().enumerate().map(|(n, a)| a * table.value(n, i)).sum())
        .collect())
}

/// [`evaluate`] on every node of the table.
pub fn evaluate_all(f: &SphericalSeries, table: &ZonalTable) -> Result<Vec<Complex64>> {
    check_table(f, table.space(), table.max_degree())?;
    let mut out = vec![Complex64::new(0.0, 0.0); table.node_count()];
    for (n, a) in f.coeffs.iter().enumerate() {
        for (o, z) in out.iter_mut().zip(table.row(n)) {
            *o += a * z;
        }
    }
    Ok(out)
}

/// `sum a_n Z~_n(theta)` at an arbitrary angle.
pub fn evaluate_at(f: &SphericalSeries, basis: &ZonalBasis, theta: f64) -> Result<Complex64> {
    check_table(f, &basis.space, basis.max_degree)?;
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
    }
    let mut z = vec![0.0; f.len()];
    basis.eval_into(theta, &mut z);
    Ok(f.coeffs.iter().zip(&z).map(|(a, v)| a * v).sum())
}

/// One piece of the dyadic decomposition. `m = None` is the constant term;
/// `m = Some(k)` covers degrees `2^k ..= 2^(k+1) - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicBlock {
    pub m: Option<u32>,
    pub lo: usize,
    pub hi: usize,
    /// Full-length series, zero outside `lo..=hi`.
    pub series: SphericalSeries,
}

/// Splits `f` into the constant term and dyadic blocks.
pub fn dyadic_decompose(f: &SphericalSeries) -> Vec<DyadicBlock> {
    let mut ranges = Vec::new();
    if !f.is_empty() {
        ranges.push((None, 0, 0));
    }
    let mut m = 0u32;
    while (1usize << m) < f.len() {
        let lo = 1usize << m;
        ranges.push((Some(m), lo, ((lo << 1) - 1).min(f.len() - 1)));
        m += 1;
    }
    ranges
        .into_iter()
        .map(|(m, lo, hi)| {
            let mut series = SphericalSeries::zeros(f.space.clone(), f.len());
            series.coeffs[lo..=hi].copy_from_slice(&f.coeffs[lo..=hi]);
            DyadicBlock { m, lo, hi, series }
        })
        .collect()
}

/// `||f||_{H^beta1} n0^(beta2 - beta1) / ||f||_{H^beta2}` for `f` supported
/// on degrees `>= n0`.
pub fn sobolev_compare_check(f: &SphericalSeries, n0: usize, beta1: f64, beta2: f64) -> Result<f64> {
    if !(0.0 <= beta1 && beta1 <= beta2) {
        return Err(Error::domain(format!("need 0 <= beta1 <= beta2, got {beta1}, {beta2}")));
    }
    if n0 == 0 {
        return Err(Error::domain("support threshold must be positive"));
    }
    if f.coeffs.iter().take(n0).any(|a| *a != Complex64::new(0.0, 0.0)) {
        return Err(Error::precondition(format!("series has coefficients below degree {n0}")));
    }
    let hi = sobolev_norm(f, beta2)?;
    if hi == 0.0 {
        return Err(Error::precondition("zero series"));
    }
    Ok(sobolev_norm(f, beta1)? * (n0 as f64).powf(beta2 - beta1) / hi)
}

/// `sup |psi1(r) - psi2(r)|` over `samples` log-spaced points of `(r0, r_max]`
/// (the right endpoint included).
pub fn comparable_oscillation_bound(
    psi1: &PhaseFunction,
    psi2: &PhaseFunction,
    r0: f64,
    r_max: f64,
    samples: usize,
) -> Result<f64> {
    if !(r0 > 0.0 && r_max > r0) || samples == 0 {
        return Err(Error::domain("need 0 < R < rMax and at least one sample"));
    }
    let ratio = (r_max / r0).ln();
    let mut sup: f64 = 0.0;
    for k in 1..=samples {
        let r = r0 * (ratio * k as f64 / samples as f64).exp();
        let r = if k == samples { r_max } else { r };
        sup = sup.max((psi1.excess(r)? - psi2.excess(r)?).abs());
    }
    Ok(sup)
}

/// `n` equally spaced times in `[0, 2 pi)`.
pub fn uniform_t_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `max(1024, 8 lambda_{N-1}^2)`, the default number of sampled times.
pub fn default_t_grid_len(space: &SpaceParams, n: usize) -> usize {
    let top = space.eigenvalue_sq(n.saturating_sub(1) as u64);
    (8.0 * top).max(1024.0) as usize
}

/// `max_{t, i} |sum a_n (exp(-i t psi1) - exp(-i t psi2))(lambda_n) Z~_n(theta_i)|`.
pub fn transfer_residual(
    f: &SphericalSeries,
    psi1: &PhaseFunction,
    psi2: &PhaseFunction,
    table: &ZonalTable,
    tgrid: &[f64],
) -> Result<f64> {
    check_table(f, table.space(), table.max_degree())?;
    let support: Vec<usize> = (0..f.len()).filter(|&n| f.coeffs[n] != Complex64::new(0.0, 0.0)).collect();
    let per_t = tgrid
        .par_iter()
        .map(|&t| -> Result<f64> {
            let mut out = vec![Complex64::new(0.0, 0.0); table.node_count()];
            for &n in &support {
                let lam = f.space.eigenvalue_sq(n as u64).sqrt();
                let gap = t * (psi1.excess(lam)? - psi2.excess(lam)?);
                // exp(-i t psi1) - exp(-i t psi2) = exp(-i t psi2) (exp(-i gap) - 1)
                let diff = multiplier(psi2, &f.space, n as u64, t)?
                    * Complex64::new(0.0, -2.0 * (0.5 * gap).sin())
                    * Complex64::from_polar(1.0, -0.5 * gap);
                let b = f.coeffs[n] * diff;
                for (o, z) in out.iter_mut().zip(table.row(n)) {
                    *o += b * z;
                }
            }
            Ok(out.iter().map(|z| z.norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_t.into_iter().fold(0.0, f64::max))
}
