//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so every line is printed even when an earlier
//! criterion fails. The exit status is non-zero if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rankone::counterexample::{divergence_scan, fit_slope, DivergenceConfig};
use rankone::geometry::{
    make_space, rank2_eigen_lower, rank2_norm_sq, spectral_tail_sum, Family, RootData2, SpaceParams,
    TailSource,
};
use rankone::jacobi::build_zonal_table;
use rankone::maximal::{circle_maximal_l6, strichartz_l6_torus, L6Mode};
use rankone::numtheory::{
    build_en, gauss_sum_direct, gauss_sum_phase_ratio, odd_totient_sum, zeta_odd_mobius, Sieve,
    StrichartzTable,
};
use rankone::spectral::{
    comparable_oscillation_bound, propagate, sobolev_compare_check, sobolev_norm, transfer_residual,
    uniform_t_grid, PhaseFunction, SphericalSeries,
};

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn all_spaces() -> Vec<SpaceParams> {
    [
        (Family::Sphere, 2),
        (Family::Sphere, 3),
        (Family::RealProjective, 2),
        (Family::ComplexProjective, 4),
        (Family::QuaternionicProjective, 8),
        (Family::CayleyPlane, 16),
    ]
    .into_iter()
    .map(|(f, d)| make_space(f, d).unwrap())
    .collect()
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst_mod: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    let mut checked = 0usize;
    for q in (1..=99u64).step_by(2) {
        let ps: Vec<i64> = (1..=q).map(|k| 2 * k as i64).filter(|&p| gcd(p as u64, q) == 1).collect();
        for ell in 1..=12i64 {
            let sums: Vec<Complex64> = ps.iter().map(|&p| gauss_sum_direct(q, ell, p).unwrap()).collect();
            for g in &sums {
                worst_mod = worst_mod.max((g.norm() - (q as f64).sqrt()).abs());
            }
            for (i, &p1) in ps.iter().enumerate() {
                for (j, &p2) in ps.iter().enumerate() {
                    let predicted = gauss_sum_phase_ratio(q, ell, p1, p2).unwrap();
                    worst_ratio = worst_ratio.max((sums[i] / sums[j] - predicted).norm());
                    checked += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_mod <= 1e-9 && worst_ratio <= 1e-9 && elapsed < Duration::from_secs(5);
    Outcome::new(
        pass,
        format!(
            "Gauss sums: max ||G|-sqrt q| = {worst_mod:.2e}, max ratio error = {worst_ratio:.2e} over {checked} pairs, {elapsed:.2?}"
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (family, d) in [(Family::Sphere, 2), (Family::ComplexProjective, 4)] {
        let space = make_space(family, d).unwrap();
        let start = Instant::now();
        let report = divergence_scan(&space, &DivergenceConfig::default()).unwrap();
        let slope = report.slope.unwrap_or(f64::NAN);
        pass &= slope >= 0.70;
        parts.push(format!("{} slope {slope:.3} ({:.1?})", space.id(), start.elapsed()));
    }
    Outcome::new(pass, format!("divergence over N=256..4096: {}", parts.join(", ")))
}

fn zeta_pair() -> (f64, f64) {
    let partial = zeta_odd_mobius(1_000_000);
    let sieve = Sieve::new(10_000_000);
    let euler: f64 = sieve
        .primes()
        .iter()
        .skip(1)
        .map(|&p| 1.0 - 1.0 / (p as f64 * p as f64))
        .product();
    (partial, euler)
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let (partial, euler) = zeta_pair();
    let zeta = partial;
    let bound = PI * zeta / 256.0;
    let mut pass = (partial - euler).abs() <= 1e-4;
    let mut parts = Vec::new();
    for n in [10_000u64, 100_000] {
        let set = build_en(n, 0.1).unwrap();
        let measure = set.union_measure();
        pass &= measure >= bound;
        parts.push(format!("|E_{n}| = {measure:.5}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    Outcome::new(
        pass,
        format!(
            "zeta partial {partial:.6} vs Euler {euler:.6}; {} >= pi zeta/256 = {bound:.5}; {elapsed:.2?}",
            parts.join(", ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let n = 1_000_000u64;
    let zeta = zeta_odd_mobius(n);
    let sum = odd_totient_sum(n) as f64;
    let rel = (sum / (zeta * (n as f64).powi(2) / 4.0) - 1.0).abs();
    let elapsed = start.elapsed();
    Outcome::new(
        rel <= 0.01 && elapsed < Duration::from_secs(10),
        format!("odd totient sum at 1e6: relative deviation {rel:.2e}, {elapsed:.2?}"),
    )
}

fn criterion_5() -> Outcome {
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for n in 1..=64u64 {
        for s in [1u64, 2] {
            let base = StrichartzTable::build(n, s, 0).unwrap();
            for ell in 1..=12u64 {
                let shifted = StrichartzTable::build(n, s, ell).unwrap();
                let shift = (s * ell) as i64;
                if shifted.entries.len() != base.entries.len() || shifted.total() != base.total() {
                    mismatches += 1;
                }
                for &(u, v, count) in &shifted.entries {
                    let (u, v) = (u as i64, v as i64);
                    if base.get(u, v - shift * u) != count {
                        mismatches += 1;
                    }
                    compared += 1;
                }
                for &(u, v, count) in &base.entries {
                    let (u, v) = (u as i64, v as i64);
                    if shifted.get(u, v + shift * u) != count {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_rel: f64 = 0.0;
    for n in 1..=16usize {
        for (s, ell) in [(1u64, 0u64), (1, 1), (1, 5), (2, 3), (2, 12)] {
            let a = random_coeffs(&mut rng, n);
            let quad = strichartz_l6_torus(&a, s, ell, L6Mode::Quadrature).unwrap();
            let count = strichartz_l6_torus(&a, s, ell, L6Mode::Counting).unwrap();
            worst_rel = worst_rel.max((quad - count).abs() / count);
        }
    }
    Outcome::new(
        mismatches == 0 && worst_rel <= 1e-6,
        format!(
            "shift identity: {mismatches} mismatches over {compared} entries; L6 quadrature vs counting max rel diff {worst_rel:.2e}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spaces = all_spaces();
    let mut worst_norm: f64 = 0.0;
    let mut worst_group: f64 = 0.0;
    for k in 0..100 {
        let space = spaces[k % spaces.len()].clone();
        let n = rng.random_range(1..=64usize);
        let f = SphericalSeries::new(space, random_coeffs(&mut rng, n));
        let norm = f.l2_norm();
        // Times on a 2^-10 grid, so t1 + t2 is exact and only the propagator is tested.
        let dyadic = |k: u32| k as f64 / 1024.0;
        let (t1, t2) = (dyadic(rng.random_range(0..6434)), dyadic(rng.random_range(0..6434)));
        for psi in PhaseFunction::catalog() {
            let a = propagate(&f, &psi, t1).unwrap();
            worst_norm = worst_norm.max((a.l2_norm() - norm).abs() / norm);
            let ab = propagate(&a, &psi, t2).unwrap();
            let direct = propagate(&f, &psi, t1 + t2).unwrap();
            let diff = ab.coeffs.iter().zip(&direct.coeffs).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            worst_group = worst_group.max(diff / norm);
        }
    }
    Outcome::new(
        worst_norm <= 1e-12 && worst_group <= 1e-12,
        format!("propagator: max rel norm drift {worst_norm:.2e}, max rel group-law defect {worst_group:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..100_000 {
        // Explicit basis v1, v2 of the plane at an obtuse angle, and a vector v.
        let a = rng.random_range(0.2..3.0);
        let b = rng.random_range(0.2..3.0);
        let phi = rng.random_range(0.5 * PI..0.95 * PI);
        let v1 = [a, 0.0];
        let v2 = [b * phi.cos(), b * phi.sin()];
        let v = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
        let root = RootData2::new(dot(v1, v1), dot(v2, v2), dot(v1, v2), 0.0, 0.0).unwrap();
        let xi1 = dot(v, v1) / dot(v1, v1);
        let xi2 = dot(v, v2) / dot(v2, v2);
        // Direct solve of G c = (<v,v1>, <v,v2>) and <v,v> = c^T G c.
        let (g11, g22, g12) = (root.g11, root.g22, root.g12);
        let (r1, r2) = (xi1 * g11, xi2 * g22);
        let det = g11 * g22 - g12 * g12;
        let c1 = (g22 * r1 - g12 * r2) / det;
        let c2 = (g11 * r2 - g12 * r1) / det;
        let solved = c1 * r1 + c2 * r2;
        let closed = rank2_norm_sq(&root, xi1, xi2).unwrap();
        let truth = dot(v, v);
        let scale = truth.max(1e-300);
        worst_rel = worst_rel.max((closed - solved).abs() / scale).max((closed - truth).abs() / scale);
    }
    let mut violations = 0usize;
    for _ in 0..10_000 {
        let g11: f64 = rng.random_range(0.2..4.0);
        let g22 = rng.random_range(0.2..4.0);
        let g12 = -rng.random_range(0.0..0.95) * (g11 * g22).sqrt();
        let root = RootData2::new(g11, g22, g12, rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)).unwrap();
        let (n1, n2) = (rng.random_range(0..=50u64), rng.random_range(0..=50u64));
        let lower = rank2_eigen_lower(&root, n1, n2).unwrap();
        let full = rank2_norm_sq(&root, n1 as f64, n2 as f64).unwrap();
        if lower > full * (1.0 + 1e-12) {
            violations += 1;
        }
    }
    Outcome::new(
        worst_rel <= 1e-10 && violations == 0,
        format!("rank-2 norm: max rel error {worst_rel:.2e} over 1e5 pairs; lower-bound violations {violations}/1e4"),
    )
}

/// Recorded constant for the Sobolev comparison statistic.
const SOBOLEV_COMPARE_CONSTANT: f64 = 1.0;

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut parts = Vec::new();
    let mut pass = true;
    for space in all_spaces() {
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let n0 = rng.random_range(8..=512usize);
            let len = n0 + rng.random_range(1..=n0);
            let mut coeffs = random_coeffs(&mut rng, len);
            coeffs[..n0].fill(Complex64::new(0.0, 0.0));
            let f = SphericalSeries::new(space.clone(), coeffs);
            let beta1 = rng.random_range(0.0..3.0);
            let beta2 = beta1 + rng.random_range(0.0..3.0);
            worst = worst.max(sobolev_compare_check(&f, n0, beta1, beta2).unwrap());
        }
        pass &= worst <= SOBOLEV_COMPARE_CONSTANT * (1.0 + 1e-12);
        parts.push(format!("{} {worst:.4}", space.id()));
    }
    Outcome::new(
        pass,
        format!("Sobolev comparison max ratio <= {SOBOLEV_COMPARE_CONSTANT}: {}", parts.join(", ")),
    )
}

fn criterion_9() -> Outcome {
    let schr = PhaseFunction::Schrodinger;
    let gap_b = comparable_oscillation_bound(&PhaseFunction::Boussinesq, &schr, 1.0, 1e6, 100_000).unwrap();
    let gap_e = comparable_oscillation_bound(&PhaseFunction::Beam, &schr, 1.0, 1e6, 100_000).unwrap();
    let mut pass = gap_b <= 0.5 + 1e-9 && gap_e <= 0.5 + 1e-9;
    let eps = 0.2;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut slopes = Vec::new();
    for (family, d) in [(Family::Sphere, 2), (Family::ComplexProjective, 4)] {
        let space = make_space(family, d).unwrap();
        let alpha2 = d as f64 / 2.0 + eps;
        for psi in [PhaseFunction::Boussinesq, PhaseFunction::Beam] {
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            for m in 2..=8u32 {
                let n = 1usize << (m + 1);
                let table = build_zonal_table(&space, n, 10 * n).unwrap();
                let mut coeffs = random_coeffs(&mut rng, n);
                coeffs[..1 << m].fill(Complex64::new(0.0, 0.0));
                let f = SphericalSeries::new(space.clone(), coeffs);
                let r = transfer_residual(&f, &psi, &schr, &table, &uniform_t_grid(512)).unwrap();
                xs.push(m as f64);
                ys.push((r / sobolev_norm(&f, alpha2).unwrap()).log2());
            }
            let slope = fit_slope(&xs, &ys).unwrap();
            pass &= slope <= -eps / 2.0;
            slopes.push(format!("{}/{} {slope:.3}", space.id(), psi.id()));
        }
    }
    Outcome::new(
        pass,
        format!(
            "phase gaps {gap_b:.6} (Boussinesq), {gap_e:.6} (beam); transfer slopes <= {}: {}",
            -eps / 2.0,
            slopes.join(", ")
        ),
    )
}

/// Increments `S(2K) - S(K)` of a tail sum for `K = 64, 128, ..., 2048`.
fn doubling_increments(source: TailSource<'_>, alpha: f64) -> Vec<f64> {
    let ks: Vec<u64> = (6..=12).map(|e| 1u64 << e).collect();
    let sums: Vec<f64> = ks.iter().map(|&k| spectral_tail_sum(source, alpha, k).unwrap()).collect();
    sums.windows(2).map(|w| w[1] - w[0]).collect()
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

/// Recorded bound for the circle maximal ratio over sampled families.
const CIRCLE_RATIO_CONSTANT: f64 = 2.0;

fn criterion_10() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    let mut rank1_ok = true;
    for space in all_spaces() {
        let inc = doubling_increments(TailSource::Rank1(&space), 0.55);
        rank1_ok &= strictly_decreasing(&inc);
    }
    pass &= rank1_ok;
    parts.push(format!("rank-1 alpha=0.55 Cauchy: {}", if rank1_ok { "yes" } else { "no" }));

    let b2 = RootData2::new(1.0, 2.0, -1.0, 0.5, 1.0).unwrap();
    let roots = [("A2", RootData2::a2()), ("B2", b2)];
    for (name, root) in &roots {
        let inc = doubling_increments(TailSource::Rank2(root), 0.55);
        let ok = strictly_decreasing(&inc);
        pass &= ok;
        parts.push(format!(
            "rank-2 {name} alpha=0.55 Cauchy: {} (increments {:.1} .. {:.1})",
            if ok { "yes" } else { "no" },
            inc[0],
            inc[inc.len() - 1]
        ));
    }
    for (name, root) in &roots {
        let inc = doubling_increments(TailSource::Rank2(root), 0.45);
        let floor = inc.iter().cloned().fold(f64::INFINITY, f64::min);
        let ok = floor > 0.0 && floor >= inc[0];
        pass &= ok;
        parts.push(format!("rank-2 {name} alpha=0.45 min increment {floor:.1}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ratios = Vec::new();
    for (n, samples) in [(16usize, 6usize), (32, 6), (64, 4), (128, 3), (256, 1)] {
        let tgrid = uniform_t_grid((2 * n * (n + 1)).max(1024));
        let mut families: Vec<Vec<Complex64>> = (0..samples).map(|_| random_coeffs(&mut rng, n)).collect();
        families.push(vec![Complex64::new(1.0, 0.0); n]);
        let mut worst: f64 = 0.0;
        for mut a in families {
            let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            a.iter_mut().for_each(|z| *z /= norm);
            let value = circle_maximal_l6(&a, 1, 1, 4 * n, &tgrid).unwrap();
            worst = worst.max(value / (n as f64).powf(1.0 / 3.0 + 0.05));
        }
        ratios.push((n, worst));
    }
    let circle_ok = ratios.iter().all(|&(_, r)| r <= CIRCLE_RATIO_CONSTANT);
    pass &= circle_ok;
    parts.push(format!(
        "circle maximal / N^(1/3+0.05) <= {CIRCLE_RATIO_CONSTANT}: {}",
        ratios.iter().map(|(n, r)| format!("N={n} {r:.3}")).collect::<Vec<_>>().join(" ")
    ));

    Outcome::new(pass, parts.join("; "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("gauss-sum oracle", criterion_1),
        ("counterexample divergence", criterion_2),
        ("congruence set measure", criterion_3),
        ("odd totient asymptotic", criterion_4),
        ("strichartz counting", criterion_5),
        ("propagator unitarity", criterion_6),
        ("rank-2 identity and bound", criterion_7),
        ("sobolev comparison", criterion_8),
        ("comparable oscillation", criterion_9),
        ("tail sums and circle maximal", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = run();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("[{}] {tag} {name}: {}", k + 1, outcome.detail);
        if !outcome.pass {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
