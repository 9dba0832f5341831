//! Arithmetic functions, lattice-point counts, quadratic Gauss sums, the
//! congruence set carrying the divergence, and the triple counts behind the
//! L6 Strichartz estimate on the torus.

mod congruence;
mod gauss;
mod strichartz;

pub use congruence::{build_en, CongruenceSet, RationalInterval};
pub use gauss::{gauss_sum_direct, gauss_sum_phase_ratio, inverse_mod};
pub use strichartz::{
    strichartz_count, strichartz_max_count, strichartz_table, StrichartzTable, MAX_STORED_TRIPLES,
    MAX_STREAMED_TRIPLES,
};
pub(crate) use strichartz::spectral_weight;

use std::sync::OnceLock;

/// Size of the shared smallest-prime-factor sieve.
pub const SIEVE_LIMIT: usize = 10_000_000;

/// Smallest-prime-factor table for `0..=limit`.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl Sieve {
    /// Linear sieve.
    pub fn new(limit: usize) -> Self {
        let mut spf = vec![0u32; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > limit {
                    break;
                }
                spf[ip] = p;
            }
        }
        Sieve { spf, primes }
    }

    pub fn limit(&self) -> usize {
        self.spf.len() - 1
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Prime factorization as `(prime, exponent)` pairs in increasing order.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1, "factorize needs n >= 1");
        let mut out: Vec<(u64, u32)> = Vec::new();
        let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        };
        if n as usize > self.limit() {
            for &p in &self.primes {
                let p = p as u64;
                if p * p > n {
                    break;
                }
                while n.is_multiple_of(p) {
                    push(p, &mut out);
                    n /= p;
                }
            }
            if n as usize > self.limit() {
                // What remains is a prime larger than the table.
                assert!(
                    (self.limit() as u64).saturating_mul(self.limit() as u64) >= n,
                    "n exceeds the square of the sieve limit"
                );
                push(n, &mut out);
                return out;
            }
        }
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            push(p, &mut out);
            n /= p;
        }
        out
    }
}

/// The shared sieve up to [`SIEVE_LIMIT`], built on first use.
pub fn sieve() -> &'static Sieve {
    static SIEVE: OnceLock<Sieve> = OnceLock::new();
    SIEVE.get_or_init(|| Sieve::new(SIEVE_LIMIT))
}

/// Moebius function.
pub fn mobius(n: u64) -> i8 {
    let f = sieve().factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    sieve()
        .factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// Number of positive divisors.
pub fn divisor_count(n: u64) -> u64 {
    sieve().factorize(n).into_iter().map(|(_, e)| e as u64 + 1).product()
}

/// All positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in sieve().factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for j in 0..len {
                out.push(out[j] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `sum_{m | n} mu(m)`, which is 1 for n = 1 and 0 otherwise.
pub fn mobius_identity_check(n: u64) -> i64 {
    divisors(n).into_iter().map(|m| mobius(m) as i64).sum()
}

/// Moebius values `mu(0..=limit)` (index 0 unused, set to 0).
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    mu[0] = 0;
    let mut composite = vec![false; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Totient values `phi(0..=limit)` (index 0 set to 0).
pub fn totient_table(limit: usize) -> Vec<u64> {
    let mut phi: Vec<u64> = (0..=limit as u64).collect();
    for i in 2..=limit {
        if phi[i] == i as u64 {
            let mut j = i;
            while j <= limit {
                phi[j] -= phi[j] / i as u64;
                j += i;
            }
        }
    }
    phi
}

/// Number of `(n1, n2)` in Z^2 with `n1^2 + n2^2 = n`.
pub fn r2(n: u64) -> u64 {
    let mut count = 0;
    let mut a = 0u64;
    while a * a <= n {
        let rest = n - a * a;
        let b = isqrt(rest);
        if b * b == rest {
            count += if a == 0 { 1 } else { 2 } * if b == 0 { 1 } else { 2 };
        }
        a += 1;
    }
    count
}

/// `r2(0..=limit)` by enumerating the lattice points of the disc.
pub fn r2_table(limit: usize) -> Vec<u32> {
    let mut out = vec![0u32; limit + 1];
    let r = isqrt(limit as u64) as i64;
    for a in -r..=r {
        let a2 = (a * a) as usize;
        let mut b = 0i64;
        while a2 + (b * b) as usize <= limit {
            out[a2 + (b * b) as usize] += if b == 0 { 1 } else { 2 };
            b += 1;
        }
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut x = ((n as f64).sqrt() as u64).min(u32::MAX as u64);
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|y| y <= n) {
        x += 1;
    }
    x
}

/// Partial sum of `mu(m) / m^2` over odd `m <= cutoff`.
pub fn zeta_odd_mobius(cutoff: u64) -> f64 {
    let mu = mobius_table(cutoff as usize);
    // Smallest terms first.
    (1..=cutoff as usize)
        .rev()
        .filter(|m| m % 2 == 1 && mu[*m] != 0)
        .map(|m| mu[m] as f64 / (m as f64 * m as f64))
        .sum()
}

/// `sum_{j <= n, j odd} phi(j)`.
pub fn odd_totient_sum(n: u64) -> u64 {
    let phi = totient_table(n as usize);
    phi.iter().skip(1).step_by(2).sum()
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
