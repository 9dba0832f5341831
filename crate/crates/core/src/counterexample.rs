//! The divergent Schrodinger family `f_N = sum_{n<N} Z~_n / c_n`: its
//! oscillatory-sum model, the Gauss-sum collapse at rational times
//! `t = 2 pi / q`, and the scan that measures `sup_t |u(theta, t)|` on `E_N`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Family, SpaceParams};
use crate::jacobi::{build_zonal_basis, fmt_f64, ZonalBasis, NODES_PER_DEGREE};
use crate::maximal::SobolevEntry;
use crate::numtheory::{build_en, gauss_sum_direct, gcd};
use crate::spectral::{sobolev_norm, SphericalSeries};

/// `f_N` with coefficients `a_n = 1 / c_n` (`c_0 = 1`).
pub fn build_fn(basis: &ZonalBasis, n: usize) -> Result<SphericalSeries> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    if basis.max_degree < n {
        return Err(Error::precondition(format!(
            "zonal data stops at degree {} but f_N needs {n}",
            basis.max_degree
        )));
    }
    let coeffs = basis.lead_coeffs[..n].iter().map(|c| Complex64::new(1.0 / c, 0.0)).collect();
    Ok(SphericalSeries::new(basis.space.clone(), coeffs))
}

/// `kappa(theta) = (sigma + tau + 1) theta / 2 - (sigma + 1/2) pi / 2`.
pub fn kappa(space: &SpaceParams, theta: f64) -> f64 {
    0.5 * space.ell().to_f64() * theta - 0.5 * (space.sigma_f64() + 0.5) * PI
}

/// `(sin(theta/2))^(-sigma-1/2) (cos(theta/2))^(-tau-1/2)`.
pub fn prefactor(space: &SpaceParams, theta: f64) -> f64 {
    (0.5 * theta).sin().powf(-space.sigma_f64() - 0.5) * (0.5 * theta).cos().powf(-space.tau_f64() - 0.5)
}

/// `prefactor(theta) ln N / sin(theta)`, the scale of the gap between
/// `|u(theta, 2 pi / q)|` and `prefactor(theta) |S(2 pi / q, theta)|`.
pub fn decomposition_envelope(space: &SpaceParams, theta: f64, n: usize) -> f64 {
    prefactor(space, theta) * (n as f64).ln() / theta.sin()
}

/// `S(t, theta) = sum_{n<N} exp(-i t n (n + ell)) cos(n theta + kappa(theta))`.
pub fn oscillatory_sum_s(space: &SpaceParams, n: usize, t: f64, theta: f64) -> Complex64 {
    let ell = space.ell().to_f64();
    let k = kappa(space, theta);
    (0..n)
        .map(|m| {
            let m = m as f64;
            Complex64::from_polar((m * theta + k).cos(), -t * m * (m + ell))
        })
        .sum()
}

fn ell_u64(space: &SpaceParams) -> Result<u64> {
    u64::try_from(space.ell_int()).map_err(|_| Error::domain("eigenvalue shift must be non-negative"))
}

/// `S_+(2 pi / q, theta) = sum_{n<N} exp(-2 pi i n (n + ell) / q) exp(i n theta)`,
/// with the quadratic phase reduced modulo `q` in integers.
pub fn oscillatory_sum_plus(space: &SpaceParams, n: usize, q: u64, theta: f64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::domain("q must be positive"));
    }
    let ell = ell_u64(space)?;
    Ok((0..n as u64)
        .map(|m| {
            let r = (m * (m + ell)) % q;
            Complex64::from_polar(1.0, m as f64 * theta - 2.0 * PI * r as f64 / q as f64)
        })
        .sum())
}

fn check_pq(q: u64, p: u64) -> Result<()> {
    if q.is_multiple_of(2) {
        return Err(Error::domain(format!("q = {q} must be odd")));
    }
    if !p.is_multiple_of(2) {
        return Err(Error::domain(format!("p = {p} must be even")));
    }
    if gcd(p, q) != 1 {
        return Err(Error::domain(format!("p = {p} and q = {q} must be coprime")));
    }
    Ok(())
}

/// `sum_{j < floor(N/q)} exp(i j q xi)`.
pub fn geometric_factor(n: usize, q: u64, xi: f64) -> Complex64 {
    let blocks = n as u64 / q;
    (0..blocks).map(|j| Complex64::from_polar(1.0, (j * q) as f64 * xi)).sum()
}

/// Main term `(sum_{j < floor(N/q)} exp(i j q xi)) * G(q, ell, p)` of
/// `S_+(2 pi / q, 2 pi p / q + xi)`.
pub fn gauss_block_prediction(space: &SpaceParams, n: usize, q: u64, p: u64, xi: f64) -> Result<Complex64> {
    check_pq(q, p)?;
    if xi.abs() > PI / (8.0 * n as f64) {
        return Err(Error::domain(format!("|xi| = {} exceeds pi / 8N", xi.abs())));
    }
    let g = gauss_sum_direct(q, space.ell_int(), p as i64)?;
    Ok(geometric_factor(n, q, xi) * g)
}

/// Smallest `|cos((sigma + 1/2) pi / 2 - j q xi)|` over `j < floor(N/q)`, and
/// whether all those cosines share one sign.
pub fn cosine_coherence(space: &SpaceParams, n: usize, q: u64, xi: f64) -> (f64, bool) {
    let base = 0.5 * (space.sigma_f64() + 0.5) * PI;
    let vals: Vec<f64> = (0..n as u64 / q).map(|j| (base - (j * q) as f64 * xi).cos()).collect();
    let min = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let same = vals.iter().all(|v| *v > 0.0) || vals.iter().all(|v| *v < 0.0);
    (min, same)
}

/// `|u(theta, 2 pi / q)|` for the Schrodinger evolution of `f`, with phases
/// `lambda_n^2 mod q` in integers.
pub fn propagated_modulus(f: &SphericalSeries, basis: &ZonalBasis, q: u64, theta: f64, z: &mut Vec<f64>) -> f64 {
    z.resize(f.len(), 0.0);
    basis.eval_into(theta, z);
    f.coeffs
        .iter()
        .zip(z.iter())
        .enumerate()
        .map(|(n, (a, v))| {
            let r = f.space.eigenvalue_sq_int(n as u64) % q;
            a * Complex64::from_polar(*v, -2.0 * PI * r as f64 / q as f64)
        })
        .sum::<Complex64>()
        .norm()
}

/// Settings of [`divergence_scan`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceConfig {
    pub n_list: Vec<usize>,
    pub epsilon: f64,
    /// Sample angles per interval; 1 means the midpoint.
    pub samples_per_interval: usize,
    pub alphas: Vec<f64>,
    /// Quadrature nodes per degree for the normalization of `Z~_n`.
    pub nodes_per_degree: usize,
}

impl Default for DivergenceConfig {
    fn default() -> Self {
        DivergenceConfig {
            n_list: vec![256, 512, 1024, 2048, 4096],
            epsilon: 0.1,
            samples_per_interval: 1,
            alphas: vec![0.0, 0.25, 0.5],
            nodes_per_degree: NODES_PER_DEGREE,
        }
    }
}

/// One evaluated point of the scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    #[serde(rename = "N")]
    pub n: usize,
    pub q: u64,
    pub p: u64,
    pub theta: f64,
    pub supval: f64,
}

/// Per-`N` summary; `best` is `None` when `E_N` is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceEntry {
    #[serde(rename = "N")]
    pub n: usize,
    pub intervals: usize,
    pub best: Option<ScanSample>,
    /// `2 pi / q` at the witness.
    pub t: Option<f64>,
    pub sobolev_norms: Vec<SobolevEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub space: String,
    pub n_list: Vec<usize>,
    pub epsilon: f64,
    pub samples_per_interval: usize,
    pub entries: Vec<DivergenceEntry>,
    /// Least-squares slope of `log sup` against `log N`; `None` with fewer
    /// than two data points.
    pub slope: Option<f64>,
    #[serde(skip)]
    pub samples: Vec<ScanSample>,
}

impl DivergenceReport {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Writes `N,q,p,theta,supval` for every evaluated point.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["N", "q", "p", "theta", "supval"])?;
        for s in &self.samples {
            w.write_record([s.n.to_string(), s.q.to_string(), s.p.to_string(), fmt_f64(s.theta), fmt_f64(s.supval)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Checks that the family supports the rational-time construction.
pub fn check_divergence_scope(space: &SpaceParams) -> Result<()> {
    if space.family == Family::RealProjective || space.s != 1 {
        return Err(Error::domain(
            "the divergence construction needs s = 1; real projective space (s = 2) is not covered",
        ));
    }
    Ok(())
}

/// Scans `|u(theta, 2 pi / q)|` for `f_N` at the sample angles of every
/// interval of `E_N` and fits the growth exponent of the per-`N` maximum.
pub fn divergence_scan(space: &SpaceParams, config: &DivergenceConfig) -> Result<DivergenceReport> {
    check_divergence_scope(space)?;
    if config.samples_per_interval == 0 {
        return Err(Error::domain("need at least one sample per interval"));
    }
    let mut entries = Vec::new();
    let mut samples = Vec::new();
    for &n in &config.n_list {
        let set = build_en(n as u64, config.epsilon)?;
        let basis = build_zonal_basis(space, n, config.nodes_per_degree.max(NODES_PER_DEGREE) * n)?;
        let f = build_fn(&basis, n)?;
        let sobolev_norms = config
            .alphas
            .iter()
            .map(|&alpha| Ok(SobolevEntry { alpha, value: sobolev_norm(&f, alpha)? }))
            .collect::<Result<Vec<_>>>()?;
        let per_interval: Vec<Vec<ScanSample>> = set
            .intervals
            .par_iter()
            .map_init(Vec::new, |z, iv| {
                iv.samples(n as u64, config.samples_per_interval)
                    .into_iter()
                    .map(|theta| ScanSample {
                        n,
                        q: iv.q,
                        p: iv.p,
                        theta,
                        supval: propagated_modulus(&f, &basis, iv.q, theta, z),
                    })
                    .collect()
            })
            .collect();
        let mut rows: Vec<ScanSample> = per_interval.into_iter().flatten().collect();
        rows.sort_by(|a, b| (a.q, a.p).cmp(&(b.q, b.p)).then(a.theta.total_cmp(&b.theta)));
        // Ties resolve to the smallest (q, p).
        let best = rows.iter().fold(None::<ScanSample>, |acc, s| match acc {
            Some(b) if b.supval >= s.supval => Some(b),
            _ => Some(*s),
        });
        entries.push(DivergenceEntry {
            n,
            intervals: set.len(),
            t: best.map(|b| 2.0 * PI / b.q as f64),
            best,
            sobolev_norms,
        });
        samples.extend(rows);
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = entries
        .iter()
        .filter_map(|e| e.best.map(|b| ((e.n as f64).ln(), b.supval.ln())))
        .unzip();
    Ok(DivergenceReport {
        space: space.id(),
        n_list: config.n_list.clone(),
        epsilon: config.epsilon,
        samples_per_interval: config.samples_per_interval,
        entries,
        slope: fit_slope(&xs, &ys),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_space;
    use crate::numtheory::inverse_mod;
    use crate::spectral::{evaluate_at, propagate, PhaseFunction};

    #[test]
    fn f1_is_constant_one() {
        let space = make_space(Family::Sphere, 2).unwrap();
        let basis = build_zonal_basis(&space, 4, 40).unwrap();
        let f = build_fn(&basis, 1).unwrap();
        for theta in [0.1, 1.0, 3.0] {
            assert!((evaluate_at(&f, &basis, theta).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert!(build_fn(&basis, 5).is_err());
    }

    #[test]
    fn coefficients_invert_lead_coefficients() {
        let space = make_space(Family::ComplexProjective, 4).unwrap();
        let basis = build_zonal_basis(&space, 64, 640).unwrap();
        let f = build_fn(&basis, 64).unwrap();
        for (a, c) in f.coeffs.iter().zip(&basis.lead_coeffs) {
            assert!((a.re * c - 1.0).abs() < 1e-14 && a.im == 0.0);
        }
    }

    #[test]
    fn kappa_examples() {
        let cay = make_space(Family::CayleyPlane, 16).unwrap();
        assert!((kappa(&cay, 0.0) + 7.5 * PI / 2.0).abs() < 1e-14);
        assert!((kappa(&cay, PI) - 7.0 * PI / 4.0).abs() < 1e-13);
        let slope = (kappa(&cay, 1.3) - kappa(&cay, 0.3)) / 1.0;
        assert!((slope - 5.5).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_sum_small_cases() {
        let space = make_space(Family::Sphere, 2).unwrap();
        let theta = 0.7;
        let s1 = oscillatory_sum_s(&space, 1, 0.4, theta);
        assert!((s1 - Complex64::new(kappa(&space, theta).cos(), 0.0)).norm() < 1e-15);
        // On S^2, kappa(pi/2) = 0 and cos(n pi/2) vanishes for odd n: take
        // the single odd mode through N = 2 minus the n = 0 term.
        let s2 = oscillatory_sum_s(&space, 2, 0.0, PI / 2.0) - oscillatory_sum_s(&space, 1, 0.0, PI / 2.0);
        assert!(s2.norm() < 1e-15);
    }

    #[test]
    fn plus_sum_splits_the_cosine_sum() {
        let space = make_space(Family::QuaternionicProjective, 8).unwrap();
        let (n, q, theta) = (50, 9, 1.1);
        let t = 2.0 * PI / q as f64;
        let plus = oscillatory_sum_plus(&space, n, q, theta).unwrap();
        let minus = oscillatory_sum_plus(&space, n, q, -theta).unwrap();
        let k = kappa(&space, theta);
        let recombined = 0.5 * (plus * Complex64::from_polar(1.0, k) + minus * Complex64::from_polar(1.0, -k));
        assert!((recombined - oscillatory_sum_s(&space, n, t, theta)).norm() < 1e-9);
    }

    #[test]
    fn prediction_single_block_is_the_gauss_sum() {
        let space = make_space(Family::Sphere, 2).unwrap();
        let (q, p) = (7, 2);
        let pred = gauss_block_prediction(&space, 7, q, p, 0.0).unwrap();
        let g = gauss_sum_direct(q, space.ell_int(), p as i64).unwrap();
        assert!((pred - g).norm() < 1e-12);
        assert!(gauss_block_prediction(&space, 7, 8, 2, 0.0).is_err());
        assert!(gauss_block_prediction(&space, 7, 7, 3, 0.0).is_err());
        assert!(gauss_block_prediction(&space, 7, 7, 14, 0.0).is_err());
        assert!(gauss_block_prediction(&space, 7, 7, 2, 1.0).is_err());
    }

    #[test]
    fn geometric_factor_small_angle_bound() {
        for (n, q) in [(1000usize, 33u64), (4096, 65)] {
            let blocks = (n as u64 / q) as f64;
            let xi = PI / (8.0 * q as f64 * blocks);
            let g = geometric_factor(n, q, xi);
            assert!(g.norm() >= (PI / 16.0).cos() * blocks);
        }
    }

    #[test]
    fn coherence_on_even_dimensions() {
        for (fam, d) in [(Family::Sphere, 2), (Family::ComplexProjective, 6), (Family::CayleyPlane, 16)] {
            let space = make_space(fam, d).unwrap();
            let n = 2048;
            let q = 51;
            let xi = PI / (8.0 * n as f64);
            let (min, same) = cosine_coherence(&space, n, q, xi);
            assert!(same && min >= (3.0 * PI / 8.0).cos() - 1e-12);
        }
    }

    #[test]
    fn rational_modulus_matches_generic_propagation() {
        let space = make_space(Family::ComplexProjective, 4).unwrap();
        let basis = build_zonal_basis(&space, 40, 400).unwrap();
        let f = build_fn(&basis, 40).unwrap();
        let q = 11;
        let g = propagate(&f, &PhaseFunction::Schrodinger, 2.0 * PI / q as f64).unwrap();
        let theta = 1.234;
        let direct = evaluate_at(&g, &basis, theta).unwrap().norm();
        let mut z = Vec::new();
        assert!((propagated_modulus(&f, &basis, q, theta, &mut z) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn gauss_sum_modulus_via_inverse_of_four() {
        // Completing the square: G(q, ell, p) = exp(2 pi i r c^2 / q) G(q, 0, 0).
        let q = 15u64;
        let r = inverse_mod(4, q).unwrap() as i64;
        let base = gauss_sum_direct(q, 0, 0).unwrap();
        for (ell, p) in [(3i64, 2i64), (5, 4), (1, 0)] {
            let c = ell - p;
            let expected = base * Complex64::from_polar(1.0, 2.0 * PI * (r * c * c).rem_euclid(q as i64) as f64 / q as f64);
            assert!((gauss_sum_direct(q, ell, p).unwrap() - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn scan_small_and_scope() {
        let rp = make_space(Family::RealProjective, 3).unwrap();
        assert!(divergence_scan(&rp, &DivergenceConfig::default()).is_err());
        let space = make_space(Family::Sphere, 2).unwrap();
        let cfg = DivergenceConfig { n_list: vec![64, 128], ..Default::default() };
        let report = divergence_scan(&space, &cfg).unwrap();
        assert_eq!(report.entries.len(), 2);
        for e in &report.entries {
            let b = e.best.unwrap();
            assert!((e.t.unwrap() - 2.0 * PI / b.q as f64).abs() < 1e-15);
            let max = report.samples.iter().filter(|s| s.n == e.n).map(|s| s.supval).fold(0.0, f64::max);
            assert_eq!(max, b.supval);
        }
        let more = DivergenceConfig { samples_per_interval: 3, ..cfg };
        let report3 = divergence_scan(&space, &more).unwrap();
        // Three samples include the midpoint, so the maximum cannot drop.
        for (a, b) in report.entries.iter().zip(&report3.entries) {
            let (x, y) = (a.best.unwrap().supval, b.best.unwrap().supval);
            assert!(y >= x * (1.0 - 1e-12));
        }
        let json = serde_json::to_value(&report).unwrap();
        assert!(json["entries"][0]["N"] == 64);
    }

    #[test]
    fn slope_fit() {
        let x: Vec<f64> = (1..6).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.75 * v + 2.0).collect();
        assert!((fit_slope(&x, &y).unwrap() - 0.75).abs() < 1e-14);
        assert!(fit_slope(&[1.0], &[2.0]).is_none());
    }
}
