use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{gcd, isqrt};
use crate::error::{Error, Result};
use crate::jacobi::fmt_f64;

/// `(2 pi p / q + pi / 16N, 2 pi p / q + pi / 8N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalInterval {
    pub p: u64,
    pub q: u64,
    pub lo: f64,
    pub hi: f64,
}

impl RationalInterval {
    pub fn center(&self) -> f64 {
        2.0 * PI * self.p as f64 / self.q as f64
    }

    /// `2 pi p / q + 3 pi / 32N`, equidistant from both endpoints.
    pub fn midpoint(&self, n: u64) -> f64 {
        self.center() + 3.0 * PI / (32.0 * n as f64)
    }

    /// `k` equally spaced interior points; `k = 1` gives the midpoint.
    pub fn samples(&self, n: u64, k: usize) -> Vec<f64> {
        let len = PI / (16.0 * n as f64);
        let lo = self.center() + len;
        (0..k).map(|j| lo + len * (j as f64 + 0.5) / k as f64).collect()
    }
}

/// The union of the intervals attached to admissible `p / q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongruenceSet {
    pub n: u64,
    pub epsilon: f64,
    /// Sorted by position.
    pub intervals: Vec<RationalInterval>,
}

impl CongruenceSet {
    /// Length of every interval, `pi / 16N`.
    pub fn interval_length(&self) -> f64 {
        PI / (16.0 * self.n as f64)
    }

    /// Exact measure: count times `pi / 16N`.
    pub fn measure(&self) -> f64 {
        self.intervals.len() as f64 * self.interval_length()
    }

    /// Measure of the union from the endpoints, merging any overlaps.
    pub fn union_measure(&self) -> f64 {
        let mut total = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for iv in &self.intervals {
            cur = match cur {
                Some((a, b)) if iv.lo <= b => Some((a, b.max(iv.hi))),
                Some((a, b)) => {
                    total += b - a;
                    Some((iv.lo, iv.hi))
                }
                None => Some((iv.lo, iv.hi)),
            };
        }
        if let Some((a, b)) = cur {
            total += b - a;
        }
        total
    }

    /// True when consecutive intervals do not overlap.
    pub fn is_disjoint(&self) -> bool {
        self.intervals.windows(2).all(|w| w[0].hi <= w[1].lo)
    }

    pub fn midpoints(&self) -> Vec<f64> {
        self.intervals.iter().map(|iv| iv.midpoint(self.n)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Writes `p,q,lo,hi`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["p", "q", "lo", "hi"])?;
        for iv in &self.intervals {
            w.write_record([iv.p.to_string(), iv.q.to_string(), fmt_f64(iv.lo), fmt_f64(iv.hi)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Enumerates odd `q` with `sqrt(N) <= q <= 2 sqrt(N)` and `p = 2p'` with
/// `gcd(p', q) = 1` and `2 eps < 2 pi p / q < pi - 2 eps`.
///
/// Coprimality makes every `p / q` reduced, so distinct pairs are distinct
/// rationals and no further deduplication is needed.
pub fn build_en(n: u64, epsilon: f64) -> Result<CongruenceSet> {
    if n == 0 {
        return Err(Error::domain("N must be positive"));
    }
    if !(epsilon > 0.0 && epsilon < PI / 20.0) {
        return Err(Error::domain(format!("epsilon = {epsilon} must lie in (0, pi/20)")));
    }
    let root = isqrt(n);
    let q_min = if root * root == n { root } else { root + 1 };
    let q_max = isqrt(4 * n);
    let len = PI / (16.0 * n as f64);
    let mut intervals = Vec::new();
    let mut q = q_min | 1;
    while q <= q_max {
        // 2 eps < 2 pi p / q  <=>  p > eps q / pi, and similarly above.
        let lo_ratio = epsilon / PI;
        let hi_ratio = 0.5 - epsilon / PI;
        let mut p = 2;
        while (p as f64) < hi_ratio * q as f64 {
            let ratio = p as f64 / q as f64;
            if ratio > lo_ratio && ratio < hi_ratio && gcd(p / 2, q) == 1 {
                let c = 2.0 * PI * ratio;
                intervals.push(RationalInterval { p, q, lo: c + len, hi: c + 2.0 * len });
            }
            p += 2;
        }
        q += 2;
    }
    intervals.sort_by(|a, b| (a.p * b.q).cmp(&(b.p * a.q)));
    Ok(CongruenceSet { n, epsilon, intervals })
}
