use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

fn check_odd(q: u64) -> Result<()> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(Error::domain(format!("modulus q = {q} must be odd")));
    }
    Ok(())
}

fn unit(k: i128, q: u64) -> Complex64 {
    let k = k.rem_euclid(q as i128);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / q as f64)
}

/// `sum_{n=0}^{q-1} exp(-2 pi i (n^2 + n (ell - p)) / q)`, with exponents
/// reduced mod q in integer arithmetic.
pub fn gauss_sum_direct(q: u64, ell: i64, p: i64) -> Result<Complex64> {
    check_odd(q)?;
    let shift = (ell - p) as i128;
    let qi = q as i128;
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 0..qi {
        acc += unit(-(n * n + n * shift), q);
    }
    Ok(acc)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inverse_mod(a: i64, m: u64) -> Option<u64> {
    let m = m as i128;
    let (mut r0, mut r1) = (a as i128 % m, m);
    let (mut s0, mut s1) = (1i128, 0i128);
    if r0 < 0 {
        r0 += m;
    }
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1 || m == 1).then(|| s0.rem_euclid(m) as u64)
}

/// Predicted `G(q, ell, p1) / G(q, ell, p2)` from completing the square:
/// `exp(2 pi i r ((ell - p1)^2 - (ell - p2)^2) / q)` with `4 r = 1 mod q`.
pub fn gauss_sum_phase_ratio(q: u64, ell: i64, p1: i64, p2: i64) -> Result<Complex64> {
    check_odd(q)?;
    for p in [p1, p2] {
        if p % 2 != 0 {
            return Err(Error::domain(format!("p = {p} must be even")));
        }
        if super::gcd(p.unsigned_abs(), q) != 1 {
            return Err(Error::domain(format!("p = {p} must be coprime to q = {q}")));
        }
    }
    let r = inverse_mod(4, q).expect("4 is invertible modulo an odd q") as i128;
    let (c1, c2) = ((ell - p1) as i128, (ell - p2) as i128);
    Ok(unit(r * (c1 * c1 - c2 * c2), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_modulus() {
        let g = gauss_sum_direct(1, 3, 0).unwrap();
        assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn even_modulus_rejected() {
        assert!(gauss_sum_direct(4, 1, 0).is_err());
        assert!(gauss_sum_phase_ratio(6, 1, 2, 4).is_err());
        assert!(gauss_sum_phase_ratio(5, 1, 3, 4).is_err());
    }

    #[test]
    fn five_term_sum() {
        // q = 5, ell = 2, p = 0: exponents n^2 + 2n mod 5 = 0, 3, 3, 0, 4.
        let g = gauss_sum_direct(5, 2, 0).unwrap();
        let w = |k: f64| Complex64::from_polar(1.0, -2.0 * PI * k / 5.0);
        let expected = w(0.0) + w(3.0) + w(3.0) + w(0.0) + w(4.0);
        assert!((g - expected).norm() < 1e-14);
        assert!((g.norm() - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inverse_of_four() {
        assert_eq!(inverse_mod(4, 3), Some(1));
        assert_eq!(inverse_mod(4, 5), Some(4));
        assert_eq!(inverse_mod(4, 8), None);
        for q in (3..200u64).step_by(2) {
            assert_eq!(4 * inverse_mod(4, q).unwrap() % q, 1);
        }
    }

    #[test]
    fn equal_p_gives_unit_ratio() {
        let z = gauss_sum_phase_ratio(7, 3, 4, 4).unwrap();
        assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
