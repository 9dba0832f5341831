//! One function per subcommand. Each returns the files it wrote plus the grid
//! sizes and tolerances that go into the manifest.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use rankone::counterexample::{divergence_scan, fit_slope, DivergenceConfig};
use rankone::jacobi::{build_zonal_table, NODES_PER_DEGREE};
use rankone::maximal::{strichartz_l6_torus, L6Mode, LpExponent, MaximalReport};
use rankone::numtheory::{
    build_en, divisor_count, gauss_sum_direct, gauss_sum_phase_ratio, mobius_table, r2_table,
    totient_table, zeta_odd_mobius, StrichartzTable,
};
use rankone::spectral::{
    comparable_oscillation_bound, default_t_grid_len, evaluate_all, propagate, sobolev_norm,
    transfer_residual, uniform_t_grid,
};
use rankone::{make_space, Family, PhaseFunction, SpaceParams, SphericalSeries};

use crate::config::{Format, Resolved};
use crate::error::CliError;
use crate::output::{write_json, Table};

/// Tolerance for the quadrature/counting L6 agreement.
const L6_AGREEMENT_TOL: f64 = 1e-6;
/// Samples per phase pair in the oscillation-gap report.
const GAP_SAMPLES: usize = 10_000;

#[derive(Default)]
pub struct RunRecord {
    pub space: Option<SpaceParams>,
    pub outputs: Vec<String>,
    pub grids: Map<String, Value>,
    pub tolerances: Map<String, Value>,
}

pub fn space_of(cfg: &Resolved) -> Result<SpaceParams, CliError> {
    let family: Family = cfg.space.parse()?;
    Ok(make_space(family, cfg.dim)?)
}

fn theta_nodes(cfg: &Resolved, n: usize) -> usize {
    cfg.theta_nodes.unwrap_or(NODES_PER_DEGREE * n)
}

fn random_coeffs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// Coefficients from `--input`, else `N` seeded random ones.
fn initial_series(cfg: &Resolved, space: &SpaceParams) -> Result<SphericalSeries, CliError> {
    let f = match &cfg.input {
        Some(path) => SphericalSeries::read_csv(space.clone(), path)?,
        None => SphericalSeries::new(
            space.clone(),
            random_coeffs(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.n),
        ),
    };
    if f.is_empty() {
        return Err(CliError::Usage("empty coefficient list".into()));
    }
    Ok(f)
}

fn num(x: f64) -> Value {
    json!(x)
}

pub fn propagate_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    let space = space_of(cfg)?;
    let psi = PhaseFunction::parse(&cfg.phase)?;
    let f = initial_series(cfg, &space)?;
    let n = f.len();
    let table = build_zonal_table(&space, n, theta_nodes(cfg, n))?;
    let dir = &cfg.out_dir;
    let mut rec = RunRecord { space: Some(space.clone()), ..Default::default() };

    let mut values = Table::new(&["t", "theta", "re", "im"]);
    for (k, &t) in cfg.times.iter().enumerate() {
        let g = propagate(&f, &psi, t)?;
        let name = format!("series_t{k}.csv");
        g.write_csv(&dir.join(&name))?;
        rec.outputs.push(name);
        for (theta, z) in table.theta_nodes.iter().zip(evaluate_all(&g, &table)?) {
            values.push(vec![num(t), num(*theta), num(z.re), num(z.im)]);
        }
    }
    rec.outputs.push(values.write(dir, "values", cfg.format)?);

    let lam_max = space.eigenvalue_sq((n - 1) as u64).sqrt().max(2.0);
    let phases = [PhaseFunction::Schrodinger, PhaseFunction::Boussinesq, PhaseFunction::Beam];
    let mut gaps = Table::new(&["phase_a", "phase_b", "r_min", "r_max", "sup_gap"]);
    for i in 0..phases.len() {
        for j in i + 1..phases.len() {
            let gap = comparable_oscillation_bound(&phases[i], &phases[j], 1.0, lam_max, GAP_SAMPLES)?;
            gaps.push(vec![json!(phases[i].id()), json!(phases[j].id()), num(1.0), num(lam_max), num(gap)]);
        }
    }
    rec.outputs.push(gaps.write(dir, "phase_gaps", cfg.format)?);
    rec.grids.insert("theta_nodes".into(), json!(table.node_count()));
    rec.grids.insert("gap_samples".into(), json!(GAP_SAMPLES));
    Ok(rec)
}

pub fn maximal_scan_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    let space = space_of(cfg)?;
    let psi = PhaseFunction::parse(&cfg.phase)?;
    let f = initial_series(cfg, &space)?;
    let n = f.len();
    let table = build_zonal_table(&space, n, theta_nodes(cfg, n))?;
    let tgrid = uniform_t_grid(cfg.t_grid.unwrap_or_else(|| default_t_grid_len(&space, n)));
    let p_norms = cfg
        .p_norms
        .iter()
        .map(|p| p.parse::<LpExponent>())
        .collect::<Result<Vec<_>, _>>()?;
    let report = MaximalReport::build(&f, &psi, &table, &tgrid, &p_norms, &cfg.alpha)?;
    let name = match cfg.format {
        Format::Json => "maximal.json",
        Format::Csv => "maximal.csv",
    };
    let path = cfg.out_dir.join(name);
    match cfg.format {
        Format::Json => report.write_json(&path)?,
        Format::Csv => report.write_csv(&path)?,
    }
    let mut rec = RunRecord { space: Some(space), outputs: vec![name.into()], ..Default::default() };
    rec.grids.insert("t_grid".into(), json!(tgrid.len()));
    rec.grids.insert("theta_nodes".into(), json!(table.node_count()));
    Ok(rec)
}

pub fn counterexample_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    let space = space_of(cfg)?;
    let config = DivergenceConfig {
        n_list: cfg.n_list.clone(),
        epsilon: cfg.epsilon,
        samples_per_interval: cfg.samples_per_interval,
        alphas: cfg.alpha.clone(),
        nodes_per_degree: NODES_PER_DEGREE,
    };
    let report = divergence_scan(&space, &config)?;
    let mut rec = RunRecord { space: Some(space), ..Default::default() };
    report.write_json(&cfg.out_dir.join("divergence.json"))?;
    rec.outputs.push("divergence.json".into());
    if cfg.format == Format::Csv {
        report.write_csv(&cfg.out_dir.join("divergence.csv"))?;
        rec.outputs.push("divergence.csv".into());
    }
    rec.grids.insert("nodes_per_degree".into(), json!(NODES_PER_DEGREE));
    rec.grids.insert("samples_per_interval".into(), json!(cfg.samples_per_interval));
    Ok(rec)
}

pub fn strichartz_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    let n = cfg.n as u64;
    let table = StrichartzTable::build(n, cfg.s, cfg.ell)?;
    let mut rec = RunRecord::default();
    let dir = &cfg.out_dir;
    match cfg.format {
        Format::Csv => {
            table.write_csv(&dir.join("strichartz.csv"))?;
            rec.outputs.push("strichartz.csv".into());
        }
        Format::Json => {
            let mut t = Table::new(&["u", "v", "count"]);
            for &(u, v, c) in &table.entries {
                t.push(vec![json!(u), json!(v), json!(c)]);
            }
            rec.outputs.push(t.write(dir, "strichartz", Format::Json)?);
        }
    }

    let base = StrichartzTable::build(n, cfg.s, 0)?;
    let shift = (cfg.s * cfg.ell) as i64;
    let shift_identity = base.entries.len() == table.entries.len()
        && table
            .entries
            .iter()
            .all(|&(u, v, c)| base.get(u as i64, v as i64 - shift * u as i64) == c);
    let mut summary = json!({
        "N": n,
        "s": cfg.s,
        "ell": cfg.ell,
        "max_count": table.max_count(),
        "total": table.total(),
        "shift_identity": shift_identity,
    });
    if cfg.check_modes {
        let a = random_coeffs(&mut ChaCha8Rng::seed_from_u64(cfg.seed), cfg.n);
        let quad = strichartz_l6_torus(&a, cfg.s, cfg.ell, L6Mode::Quadrature)?;
        let count = strichartz_l6_torus(&a, cfg.s, cfg.ell, L6Mode::Counting)?;
        let rel = (quad - count).abs() / count;
        summary["l6_quadrature"] = num(quad);
        summary["l6_counting"] = num(count);
        summary["l6_relative_difference"] = num(rel);
        summary["modes_agree"] = json!(rel <= L6_AGREEMENT_TOL);
        rec.tolerances.insert("l6_agreement".into(), num(L6_AGREEMENT_TOL));
    }
    write_json(dir, "strichartz_summary.json", &summary)?;
    rec.outputs.push("strichartz_summary.json".into());
    Ok(rec)
}

pub fn nt_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    if cfg.limit == 0 {
        return Err(CliError::Usage("--limit must be positive".into()));
    }
    let space = space_of(cfg)?;
    let dir = &cfg.out_dir;
    let mut rec = RunRecord { space: Some(space.clone()), ..Default::default() };
    let limit = cfg.limit as usize;

    let mu = mobius_table(limit);
    let phi = totient_table(limit);
    let r2 = r2_table(limit);
    let mut arith = Table::new(&["n", "mu", "phi", "d", "r2"]);
    for k in 1..=limit {
        arith.push(vec![json!(k), json!(mu[k]), json!(phi[k]), json!(divisor_count(k as u64)), json!(r2[k])]);
    }
    rec.outputs.push(arith.write(dir, "arithmetic", cfg.format)?);

    let set = build_en(cfg.n as u64, cfg.epsilon)?;
    let mut cong = Table::new(&["p", "q", "lo", "hi"]);
    for iv in &set.intervals {
        cong.push(vec![json!(iv.p), json!(iv.q), num(iv.lo), num(iv.hi)]);
    }
    rec.outputs.push(cong.write(dir, "congruence", cfg.format)?);

    let ell = space.ell_int();
    let mut gauss = Table::new(&["q", "ell", "p", "re", "im", "modulus_error", "ratio_error"]);
    let (mut worst_mod, mut worst_ratio) = (0.0f64, 0.0f64);
    for q in (3..=cfg.q_max).step_by(2) {
        let ps: Vec<i64> = (1..=q as i64).map(|k| 2 * k).filter(|&p| gcd(p as u64, q) == 1).collect();
        let reference = gauss_sum_direct(q, ell, ps[0])?;
        for &p in &ps {
            let g = gauss_sum_direct(q, ell, p)?;
            let modulus_error = (g.norm() - (q as f64).sqrt()).abs();
            let ratio_error = (g / reference - gauss_sum_phase_ratio(q, ell, p, ps[0])?).norm();
            worst_mod = worst_mod.max(modulus_error);
            worst_ratio = worst_ratio.max(ratio_error);
            gauss.push(vec![json!(q), json!(ell), json!(p), num(g.re), num(g.im), num(modulus_error), num(ratio_error)]);
        }
    }
    rec.outputs.push(gauss.write(dir, "gauss", cfg.format)?);

    let zeta = zeta_odd_mobius(1_000_000);
    let summary = json!({
        "zeta_odd": zeta,
        "E_N": {
            "N": cfg.n,
            "epsilon": cfg.epsilon,
            "intervals": set.len(),
            "measure": set.union_measure(),
            "lower_bound": PI * zeta / 256.0,
        },
        "gauss": { "q_max": cfg.q_max, "max_modulus_error": worst_mod, "max_ratio_error": worst_ratio },
    });
    write_json(dir, "nt_summary.json", &summary)?;
    rec.outputs.push("nt_summary.json".into());
    rec.grids.insert("zeta_cutoff".into(), json!(1_000_000));
    Ok(rec)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn transfer_cmd(cfg: &Resolved) -> Result<RunRecord, CliError> {
    let space = space_of(cfg)?;
    let psi = PhaseFunction::parse(&cfg.phase)?;
    if psi == PhaseFunction::Schrodinger {
        return Err(CliError::Usage(
            "transfer compares a phase against schrodinger; pick another --phase".into(),
        ));
    }
    if cfg.m_min > cfg.m_max || cfg.m_max > 14 {
        return Err(CliError::Usage("need m-min <= m-max <= 14".into()));
    }
    if cfg.gap.is_nan() || cfg.gap <= 0.0 {
        return Err(CliError::Usage("--gap must be positive".into()));
    }
    let alpha2 = space.d as f64 / 2.0 + cfg.gap;
    let tgrid = uniform_t_grid(cfg.t_grid.unwrap_or(512));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Table::new(&["m", "residual", "sobolev", "log2_ratio"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for m in cfg.m_min..=cfg.m_max {
        let n = 1usize << (m + 1);
        let table = build_zonal_table(&space, n, theta_nodes(cfg, n).max(NODES_PER_DEGREE * n))?;
        let mut coeffs = random_coeffs(&mut rng, n);
        coeffs[..1 << m].fill(Complex64::new(0.0, 0.0));
        let f = SphericalSeries::new(space.clone(), coeffs);
        let residual = transfer_residual(&f, &psi, &PhaseFunction::Schrodinger, &table, &tgrid)?;
        let h = sobolev_norm(&f, alpha2)?;
        let y = (residual / h).log2();
        xs.push(m as f64);
        ys.push(y);
        rows.push(vec![json!(m), num(residual), num(h), num(y)]);
    }
    let dir = &cfg.out_dir;
    let mut rec = RunRecord { space: Some(space), ..Default::default() };
    rec.outputs.push(rows.write(dir, "transfer", cfg.format)?);
    let slope = fit_slope(&xs, &ys);
    let summary = json!({
        "phase": psi.id(),
        "alpha2": alpha2,
        "gap": cfg.gap,
        "slope": slope,
        "threshold": -cfg.gap / 2.0,
        "pass": slope.map(|s| s <= -cfg.gap / 2.0),
    });
    write_json(dir, "transfer_summary.json", &summary)?;
    rec.outputs.push("transfer_summary.json".into());
    rec.grids.insert("t_grid".into(), json!(tgrid.len()));
    Ok(rec)
}
