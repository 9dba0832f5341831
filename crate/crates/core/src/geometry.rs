//! The five families of compact rank-one symmetric spaces, their radial
//! density and Laplace-Beltrami spectrum, plus the rank-two eigenvalue
//! bounds used by the spectral tail sums.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;

/// Exact rational number with positive denominator, serialized as `[num, den]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Rational { num: sign * num / g, den: sign * den / g }
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_integer(self) -> Option<i64> {
        (self.den == 1).then_some(self.num)
    }
}

impl std::ops::Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        Rational::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
}

impl From<[i64; 2]> for Rational {
    fn from(v: [i64; 2]) -> Self {
        Rational::new(v[0], v[1])
    }
}

impl From<Rational> for [i64; 2] {
    fn from(r: Rational) -> Self {
        [r.num, r.den]
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionicProjective,
    CayleyPlane,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Sphere,
        Family::RealProjective,
        Family::ComplexProjective,
        Family::QuaternionicProjective,
        Family::CayleyPlane,
    ];

    /// Short name accepted on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            Family::Sphere => "sphere",
            Family::RealProjective => "real-projective",
            Family::ComplexProjective => "complex-projective",
            Family::QuaternionicProjective => "quaternionic-projective",
            Family::CayleyPlane => "cayley",
        }
    }

    /// Admissible real dimensions, as a human-readable rule.
    pub fn dimension_rule(self) -> &'static str {
        match self {
            Family::Sphere => "d = 1, 2, 3, ...",
            Family::RealProjective => "d = 2, 3, 4, ...",
            Family::ComplexProjective => "d = 4, 6, 8, ...",
            Family::QuaternionicProjective => "d = 8, 12, 16, ...",
            Family::CayleyPlane => "d = 16",
        }
    }

    pub fn admits(self, d: u32) -> bool {
        match self {
            Family::Sphere => d >= 1,
            Family::RealProjective => d >= 2,
            Family::ComplexProjective => d >= 4 && d.is_multiple_of(2),
            Family::QuaternionicProjective => d >= 8 && d.is_multiple_of(4),
            Family::CayleyPlane => d == 16,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" | "s" => Ok(Family::Sphere),
            "real-projective" | "rp" => Ok(Family::RealProjective),
            "complex-projective" | "cp" => Ok(Family::ComplexProjective),
            "quaternionic-projective" | "hp" => Ok(Family::QuaternionicProjective),
            "cayley" | "cayley-plane" | "op" => Ok(Family::CayleyPlane),
            other => Err(Error::domain(format!(
                "unknown space family `{other}`; expected one of sphere, real-projective, \
                 complex-projective, quaternionic-projective, cayley"
            ))),
        }
    }
}

/// One compact rank-one symmetric space, normalized to total measure 1 and
/// diameter pi.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub family: Family,
    pub d: u32,
    #[serde(rename = "M1")]
    pub m1: u32,
    #[serde(rename = "M2")]
    pub m2: u32,
    pub sigma: Rational,
    pub tau: Rational,
    pub s: u32,
    #[serde(rename = "normConst")]
    pub norm_const: f64,
}

/// Builds the parameters of the space `family` in real dimension `d`.
pub fn make_space(family: Family, d: u32) -> Result<SpaceParams> {
    if !family.admits(d) {
        return Err(Error::domain(format!(
            "{family} is not defined in dimension {d}; admissible: {}",
            family.dimension_rule()
        )));
    }
    let di = d as i64;
    let half_d_minus_2 = Rational::new(di - 2, 2);
    let (m1, m2, sigma, tau, s) = match family {
        Family::Sphere => (0, d - 1, half_d_minus_2, half_d_minus_2, 1),
        Family::RealProjective => (d - 1, 0, half_d_minus_2, half_d_minus_2, 2),
        Family::ComplexProjective => (d - 2, 1, half_d_minus_2, Rational::integer(0), 1),
        Family::QuaternionicProjective => (d - 4, 3, half_d_minus_2, Rational::integer(1), 1),
        Family::CayleyPlane => (8, 7, Rational::integer(7), Rational::integer(3), 1),
    };
    let mass = adaptive_integrate(
        |t| unnormalized_density(m1, m2, t),
        0.0,
        std::f64::consts::PI,
        1e-12,
    );
    Ok(SpaceParams { family, d, m1, m2, sigma, tau, s, norm_const: 1.0 / mass })
}

fn unnormalized_density(m1: u32, m2: u32, theta: f64) -> f64 {
    (0.5 * theta).sin().powi(m1 as i32) * theta.sin().powi(m2 as i32)
}

impl SpaceParams {
    /// `sigma + tau + 1`, the shift in the eigenvalue formula.
    pub fn ell(&self) -> Rational {
        self.sigma + self.tau + Rational::integer(1)
    }

    /// `sigma + tau + 1` as an integer. Every family in the classification
    /// has an integral shift.
    pub fn ell_int(&self) -> i64 {
        self.ell().as_integer().expect("integral eigenvalue shift")
    }

    pub fn sigma_f64(&self) -> f64 {
        self.sigma.to_f64()
    }

    pub fn tau_f64(&self) -> f64 {
        self.tau.to_f64()
    }

    /// Short identifier such as `sphere-2`.
    pub fn id(&self) -> String {
        format!("{}-{}", self.family.slug(), self.d)
    }

    /// Radial surface-measure density `C sin(theta/2)^M1 sin(theta)^M2`.
    pub fn density(&self, theta: f64) -> Result<f64> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::domain(format!("theta = {theta} outside [0, pi]")));
        }
        Ok(self.density_unchecked(theta))
    }

    pub(crate) fn density_unchecked(&self, theta: f64) -> f64 {
        self.norm_const * unnormalized_density(self.m1, self.m2, theta)
    }

    /// `lambda_n^2 = s n (s n + sigma + tau + 1)` as an exact integer.
    pub fn eigenvalue_sq_int(&self, n: u64) -> u64 {
        let sn = self.s as u64 * n;
        sn * (sn + self.ell_int() as u64)
    }

    /// `lambda_n^2 = s n (s n + sigma + tau + 1)`.
    pub fn eigenvalue_sq(&self, n: u64) -> f64 {
        self.eigenvalue_sq_int(n) as f64
    }
}

/// Gram data of the two simple restricted roots of a rank-two space, with the
/// pairings of each root against the half-sum of positive roots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootData2 {
    pub g11: f64,
    pub g22: f64,
    pub g12: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl RootData2 {
    pub fn new(g11: f64, g22: f64, g12: f64, rho1: f64, rho2: f64) -> Result<Self> {
        let r = RootData2 { g11, g22, g12, rho1, rho2 };
        r.validate()?;
        Ok(r)
    }

    /// The Gram data of A2 with unit roots, as a convenient default.
    pub fn a2() -> Self {
        RootData2 { g11: 1.0, g22: 1.0, g12: -0.5, rho1: 0.5, rho2: 0.5 }
    }

    pub fn determinant(&self) -> f64 {
        self.g11 * self.g22 - self.g12 * self.g12
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g11 > 0.0 && self.g22 > 0.0) {
            return Err(Error::domain("diagonal Gram entries must be positive"));
        }
        if self.determinant() <= 0.0 {
            return Err(Error::domain("degenerate Gram matrix (determinant <= 0)"));
        }
        if self.g12 > 0.0 {
            return Err(Error::domain("simple roots must pair non-positively (g12 <= 0)"));
        }
        if self.rho1 < 0.0 || self.rho2 < 0.0 {
            return Err(Error::domain("rho pairings must be non-negative"));
        }
        Ok(())
    }
}

/// `<v, v>` recovered from the normalized projections
/// `xi_j = <v, v_j> / <v_j, v_j>` onto a basis with Gram data `root`.
pub fn rank2_norm_sq(root: &RootData2, xi1: f64, xi2: f64) -> Result<f64> {
    if root.determinant() <= 0.0 {
        return Err(Error::domain("degenerate Gram matrix (determinant <= 0)"));
    }
    let RootData2 { g11, g22, g12, .. } = *root;
    let num = xi1 * xi1 * g11 * g11 * g22 + xi2 * xi2 * g22 * g22 * g11
        - 2.0 * xi1 * xi2 * g11 * g12 * g22;
    Ok(num / root.determinant())
}

/// Lower bound for the rank-two eigenvalue obtained by dropping the
/// (non-negative) cross term of [`rank2_norm_sq`].
pub fn rank2_eigen_lower(root: &RootData2, n1: u64, n2: u64) -> Result<f64> {
    root.validate()?;
    let RootData2 { g11, g22, .. } = *root;
    let (n1, n2) = (n1 as f64, n2 as f64);
    let det = root.determinant();
    Ok(n1 * n1 * g11 * g11 * g22 / det + n2 * n2 * g22 * g22 * g11 / det)
}

/// Spectrum feeding [`spectral_tail_sum`].
#[derive(Debug, Clone, Copy)]
pub enum TailSource<'a> {
    Rank1(&'a SpaceParams),
    Rank2(&'a RootData2),
}

/// Partial sum of `(1 + lambda^2)^(-alpha)` over all spectral parameters up
/// to `cutoff` (per coordinate in rank two).
pub fn spectral_tail_sum(source: TailSource<'_>, alpha: f64, cutoff: u64) -> Result<f64> {
    if alpha <= 0.0 || alpha.is_nan() {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    match source {
        TailSource::Rank1(space) => Ok((0..=cutoff)
            .map(|n| (1.0 + space.eigenvalue_sq(n)).powf(-alpha))
            .sum()),
        TailSource::Rank2(root) => {
            root.validate()?;
            let mut total = 0.0;
            for n1 in 0..=cutoff {
                let mut row = 0.0;
                for n2 in 0..=cutoff {
                    let (x1, x2) = (n1 as f64, n2 as f64);
                    let lam = rank2_norm_sq(root, x1, x2)? + 2.0 * (x1 * root.rho1 + x2 * root.rho2);
                    row += (1.0 + lam).powf(-alpha);
                }
                total += row;
            }
            Ok(total)
        }
    }
}
