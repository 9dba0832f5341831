use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest `(N+1)^3` for which the full `(u, v)` table is stored.
pub const MAX_STORED_TRIPLES: u64 = 5_000_000;
/// Largest `(N+1)^3` accepted by the streaming maximum.
pub const MAX_STREAMED_TRIPLES: u64 = 2_000_000_000;

/// `s n (s n + ell)`.
pub(crate) fn spectral_weight(s: u64, ell: u64, n: u64) -> u64 {
    s * n * (s * n + ell)
}

fn check_args(n_max: u64, s: u64, limit: u64) -> Result<()> {
    if s == 0 {
        return Err(Error::domain("s must be positive"));
    }
    let triples = (n_max + 1).saturating_pow(3);
    if triples > limit {
        return Err(Error::resource(format!(
            "N = {n_max} needs {triples} triples, above the limit of {limit}; use a smaller N"
        )));
    }
    Ok(())
}

/// Visits every `u` in `0..=3 n_max` with the counts of
/// `v = sum_j s n_j (s n_j + ell)` over triples in `[0, n_max]^3` with
/// `n_1 + n_2 + n_3 = u`. `visit` receives `(u, [(v, count)])` sorted by `v`.
pub(crate) fn count_by_u<T: Send>(
    n_max: u64,
    s: u64,
    ell: u64,
    visit: impl Fn(u64, &[(u64, u64)]) -> T + Sync,
) -> Vec<T> {
    let weights: Vec<u64> = (0..=n_max).map(|n| spectral_weight(s, ell, n)).collect();
    let v_max = 3 * weights[n_max as usize] as usize;
    (0..=3 * n_max)
        .into_par_iter()
        .map_init(
            || (vec![0u64; v_max + 1], Vec::<usize>::new()),
            |(buf, touched), u| {
                let lo1 = u.saturating_sub(2 * n_max);
                for n1 in lo1..=u.min(n_max) {
                    let rest = u - n1;
                    let lo2 = rest.saturating_sub(n_max);
                    for n2 in lo2..=rest.min(n_max) {
                        let n3 = rest - n2;
                        let v = (weights[n1 as usize] + weights[n2 as usize] + weights[n3 as usize]) as usize;
                        if buf[v] == 0 {
                            touched.push(v);
                        }
                        buf[v] += 1;
                    }
                }
                touched.sort_unstable();
                let counts: Vec<(u64, u64)> = touched.iter().map(|&v| (v as u64, buf[v])).collect();
                for &v in touched.iter() {
                    buf[v] = 0;
                }
                touched.clear();
                visit(u, &counts)
            },
        )
        .collect()
}

/// All nonzero `r_{u,v}` for one `(N, s, ell)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrichartzTable {
    pub n: u64,
    pub s: u64,
    pub ell: u64,
    /// `(u, v, count)` sorted by `(u, v)`.
    pub entries: Vec<(u64, u64, u64)>,
}

impl StrichartzTable {
    /// Brute-force count over `[0, N]^3`.
    pub fn build(n: u64, s: u64, ell: u64) -> Result<Self> {
        check_args(n, s, MAX_STORED_TRIPLES)?;
        let groups = count_by_u(n, s, ell, |u, counts| {
            counts.iter().map(|&(v, c)| (u, v, c)).collect::<Vec<_>>()
        });
        Ok(StrichartzTable { n, s, ell, entries: groups.into_iter().flatten().collect() })
    }

    /// `r_{u,v}`; zero when absent, including negative `v`.
    pub fn get(&self, u: i64, v: i64) -> u64 {
        if u < 0 || v < 0 {
            return 0;
        }
        let key = (u as u64, v as u64);
        self.entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&key))
            .map(|i| self.entries[i].2)
            .unwrap_or(0)
    }

    pub fn max_count(&self) -> u64 {
        self.entries.iter().map(|e| e.2).max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.2).sum()
    }

    /// Writes `u,v,count`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["u", "v", "count"])?;
        for (u, v, c) in &self.entries {
            w.write_record([u.to_string(), v.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

type Cache = Mutex<HashMap<(u64, u64, u64), Arc<StrichartzTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Memoized table for `(N, s, ell)`.
pub fn strichartz_table(n: u64, s: u64, ell: u64) -> Result<Arc<StrichartzTable>> {
    let key = (n, s, ell);
    if let Some(t) = cache().lock().expect("cache poisoned").get(&key) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(StrichartzTable::build(n, s, ell)?);
    cache().lock().expect("cache poisoned").insert(key, Arc::clone(&table));
    Ok(table)
}

/// `r^{(ell)}_{u,v}`: ordered triples in `[0, N]^3` with `sum n_j = u` and
/// `sum s n_j (s n_j + ell) = v`.
pub fn strichartz_count(n: u64, s: u64, ell: u64, u: i64, v: i64) -> Result<u64> {
    Ok(strichartz_table(n, s, ell)?.get(u, v))
}

/// `max_{u,v} r_{u,v}` without storing the table.
pub fn strichartz_max_count(n: u64, s: u64, ell: u64) -> Result<u64> {
    check_args(n, s, MAX_STREAMED_TRIPLES)?;
    let maxima = count_by_u(n, s, ell, |_, counts| counts.iter().map(|c| c.1).max().unwrap_or(0));
    Ok(maxima.into_iter().max().unwrap_or(0))
}
