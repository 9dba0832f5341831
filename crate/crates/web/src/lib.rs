//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export has a plain Rust counterpart returning `Result<_, String>` so
//! the logic can be tested natively; the exported wrappers only convert
//! errors into JavaScript exceptions.

use std::f64::consts::PI;

use serde::Serialize;
use wasm_bindgen::prelude::*;

use rankone::counterexample::{build_fn, propagated_modulus};
use rankone::jacobi::{build_zonal_basis, NODES_PER_DEGREE};
use rankone::numtheory::{build_en, gauss_sum_direct};
use rankone::spectral::{evaluate_at, propagate};
use rankone::{make_space, Family, PhaseFunction, SpaceParams};

/// Largest N the page may request for the profile and the scan.
pub const MAX_N: usize = 2048;

fn space(family: &str, dim: u32) -> Result<SpaceParams, String> {
    let family: Family = family.parse().map_err(|e: rankone::Error| e.to_string())?;
    make_space(family, dim).map_err(|e| e.to_string())
}

fn check_n(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_N {
        return Err(format!("N must lie in 1..={MAX_N}"));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct GaussRow {
    pub p: i64,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

/// `G(q, ell, p)` for every even `p` in `2..=2q`.
pub fn gauss_table(q: u32, ell: i32) -> Result<Vec<GaussRow>, String> {
    let q = q as u64;
    (1..=q as i64)
        .map(|k| {
            let p = 2 * k;
            let g = gauss_sum_direct(q, ell as i64, p).map_err(|e| e.to_string())?;
            Ok(GaussRow { p, re: g.re, im: g.im, modulus: g.norm() })
        })
        .collect()
}

/// `|u(theta, t)|` for the propagated `f_N` at `points` equally spaced angles
/// in `(0, pi)`.
pub fn profile(family: &str, dim: u32, n: usize, phase: &str, t: f64, points: usize) -> Result<Vec<f64>, String> {
    check_n(n)?;
    if points == 0 || points > 4096 {
        return Err("points must lie in 1..=4096".into());
    }
    let sp = space(family, dim)?;
    let psi = PhaseFunction::parse(phase).map_err(|e| e.to_string())?;
    let basis = build_zonal_basis(&sp, n, NODES_PER_DEGREE * n).map_err(|e| e.to_string())?;
    let f = build_fn(&basis, n).map_err(|e| e.to_string())?;
    let g = propagate(&f, &psi, t).map_err(|e| e.to_string())?;
    (1..=points)
        .map(|i| {
            let theta = PI * i as f64 / (points + 1) as f64;
            evaluate_at(&g, &basis, theta).map(|z| z.norm()).map_err(|e| e.to_string())
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct ScanRow {
    pub q: u64,
    pub p: u64,
    pub theta: f64,
    pub value: f64,
}

/// `|u(theta, 2 pi / q)|` for `f_N` at the midpoint of every interval of `E_N`.
pub fn divergence_rows(family: &str, dim: u32, n: usize, epsilon: f64) -> Result<Vec<ScanRow>, String> {
    check_n(n)?;
    let sp = space(family, dim)?;
    rankone::counterexample::check_divergence_scope(&sp).map_err(|e| e.to_string())?;
    let set = build_en(n as u64, epsilon).map_err(|e| e.to_string())?;
    let basis = build_zonal_basis(&sp, n, NODES_PER_DEGREE * n).map_err(|e| e.to_string())?;
    let f = build_fn(&basis, n).map_err(|e| e.to_string())?;
    let mut z = Vec::new();
    Ok(set
        .intervals
        .iter()
        .map(|iv| {
            let theta = iv.midpoint(n as u64);
            ScanRow { q: iv.q, p: iv.p, theta, value: propagated_modulus(&f, &basis, iv.q, theta, &mut z) }
        })
        .collect())
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsValue> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsValue::from_str(&e))
}

/// JSON array of `{p, re, im, modulus}`.
#[wasm_bindgen(js_name = gaussSums)]
pub fn gauss_sums_js(q: u32, ell: i32) -> Result<String, JsValue> {
    to_js(gauss_table(q, ell))
}

/// JSON array of `|u(theta, t)|` values.
#[wasm_bindgen(js_name = propagatedProfile)]
pub fn propagated_profile_js(family: &str, dim: u32, n: usize, phase: &str, t: f64, points: usize) -> Result<String, JsValue> {
    to_js(profile(family, dim, n, phase, t, points))
}

/// JSON array of `{q, p, theta, value}`.
#[wasm_bindgen(js_name = divergenceScan)]
pub fn divergence_scan_js(family: &str, dim: u32, n: usize, epsilon: f64) -> Result<String, JsValue> {
    to_js(divergence_rows(family, dim, n, epsilon))
}
