use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::lattice::Torus;
use crate::error::{Error, Result};

/// Tolerance for the divisor invariant `Σ nᵢzᵢ = 0` before snapping.
pub const DIVISOR_TOLERANCE: f64 = 1e-8;

/// Points closer than this (modulo the lattice) count as lying on a divisor.
pub const ON_DIVISOR_RADIUS: f64 = 1e-12;

/// A principal divisor `Σ nᵢ(zᵢ)` with `Σ nᵢ = 0` and `Σ nᵢzᵢ = 0` in ℂ.
///
/// Representatives need not lie in the fundamental parallelogram: the second
/// condition fixes them, e.g. `(p) + (−p) − 2(0)`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EllDivisor {
    points: Vec<(Complex, i64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    z: [f64; 2],
    n: i64,
}

impl EllDivisor {
    /// Validates the invariants to [`DIVISOR_TOLERANCE`] and then moves one
    /// point by the residual so that `Σ nᵢzᵢ` vanishes up to rounding.
    pub fn new(points: Vec<(Complex, i64)>) -> Result<Self> {
        for (i, (z, n)) in points.iter().enumerate() {
            if *n == 0 {
                return Err(Error::InvalidDivisor("zero multiplicity".into()));
            }
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::InvalidDivisor(format!("non-finite point {z}")));
            }
            if points[..i].iter().any(|(w, _)| w == z) {
                return Err(Error::InvalidDivisor(format!("repeated point {z}")));
            }
        }
        let degree: i64 = points.iter().map(|(_, n)| n).sum();
        if degree != 0 {
            return Err(Error::InvalidDivisor(format!("degree {degree} ≠ 0")));
        }
        let residual: Complex = points.iter().map(|(z, n)| z * *n as f64).sum();
        if residual.norm() > DIVISOR_TOLERANCE {
            return Err(Error::InvalidDivisor(format!("Σ n·z = {residual} ≠ 0")));
        }
        let mut points = points;
        if let Some((z, n)) = points.iter_mut().min_by_key(|(_, n)| n.abs()) {
            *z -= residual / *n as f64;
        }
        Ok(EllDivisor { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[(Complex, i64)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Multiplicity at `z` modulo the lattice.
    pub fn order_at(&self, torus: &Torus, z: Complex) -> i64 {
        self.points
            .iter()
            .filter(|(w, _)| torus.distance(z, *w) <= ON_DIVISOR_RADIUS)
            .map(|(_, n)| n)
            .sum()
    }

    pub fn neg(&self) -> EllDivisor {
        EllDivisor {
            points: self.points.iter().map(|(z, n)| (*z, -n)).collect(),
        }
    }

    /// Sum of divisors; coincident points are merged, cancelled ones dropped.
    pub fn add(&self, other: &EllDivisor) -> EllDivisor {
        let mut points = self.points.clone();
        for (z, n) in &other.points {
            match points.iter_mut().find(|(w, _)| w == z) {
                Some((_, m)) => *m += n,
                None => points.push((*z, *n)),
            }
        }
        points.retain(|(_, n)| *n != 0);
        EllDivisor { points }
    }

    /// Whether some point of `self` is congruent to a point of `other`.
    pub fn overlaps(&self, other: &EllDivisor, torus: &Torus) -> bool {
        self.points.iter().any(|(z, _)| {
            other
                .points
                .iter()
                .any(|(w, _)| torus.distance(*z, *w) <= ON_DIVISOR_RADIUS)
        })
    }
}

impl Serialize for EllDivisor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr: Vec<PointRepr> = self
            .points
            .iter()
            .map(|(z, n)| PointRepr {
                z: [z.re, z.im],
                n: *n,
            })
            .collect();
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for EllDivisor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = Vec::<PointRepr>::deserialize(d)?;
        EllDivisor::new(
            repr.into_iter()
                .map(|p| (Complex::new(p.z[0], p.z[1]), p.n))
                .collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// `f(z) = scale · ∏ σ(z − zᵢ)^{nᵢ}` on a torus.
#[derive(Clone, Debug, PartialEq)]
pub struct EllipticFunction {
    divisor: EllDivisor,
    torus: Torus,
    scale: Complex,
}

impl EllipticFunction {
    pub fn new(divisor: EllDivisor, torus: Torus) -> Self {
        Self::with_scale(divisor, torus, Complex::new(1.0, 0.0)).expect("unit scale")
    }

    pub fn with_scale(divisor: EllDivisor, torus: Torus, scale: Complex) -> Result<Self> {
        if scale.norm() == 0.0 || !scale.norm().is_finite() {
            return Err(Error::InvalidDivisor(format!(
                "scale must be finite and nonzero, got {scale}"
            )));
        }
        Ok(EllipticFunction {
            divisor,
            torus,
            scale,
        })
    }

    /// The constant function `c`.
    pub fn constant(torus: Torus, c: Complex) -> Result<Self> {
        Self::with_scale(EllDivisor::empty(), torus, c)
    }

    pub fn divisor(&self) -> &EllDivisor {
        &self.divisor
    }

    pub fn torus(&self) -> &Torus {
        &self.torus
    }

    pub fn scale(&self) -> Complex {
        self.scale
    }

    fn check_off_divisor(&self, z: Complex) -> Result<()> {
        let hit = self
            .divisor
            .points
            .iter()
            .any(|(w, _)| self.torus.distance(z, *w) <= ON_DIVISOR_RADIUS);
        if hit {
            Err(Error::OnDivisor)
        } else {
            Ok(())
        }
    }

    pub fn eval(&self, z: Complex) -> Result<Complex> {
        self.check_off_divisor(z)?;
        Ok(self.divisor.points.iter().fold(self.scale, |acc, (w, n)| {
            acc * self.torus.sigma(z - w).powi(*n as i32)
        }))
    }

    /// `log|f(z)|`.
    pub fn log_abs(&self, z: Complex) -> Result<f64> {
        self.check_off_divisor(z)?;
        Ok(self.scale.norm().ln()
            + self
                .divisor
                .points
                .iter()
                .map(|(w, n)| *n as f64 * self.torus.ln_abs_sigma(z - w))
                .sum::<f64>())
    }

    /// The `dz`-coefficient of `df/f`, `Σ nᵢ ζ(z − zᵢ)`.
    pub fn dlog(&self, z: Complex) -> Result<Complex> {
        self.check_off_divisor(z)?;
        self.divisor
            .points
            .iter()
            .try_fold(Complex::new(0.0, 0.0), |acc, (w, n)| {
                Ok(acc + *n as f64 * self.torus.zeta_w(z - w).map_err(|_| Error::OnDivisor)?)
            })
    }

    pub fn mul(&self, other: &EllipticFunction) -> Result<EllipticFunction> {
        if self.torus != other.torus {
            return Err(Error::InvalidTorus(
                "functions live on different tori".into(),
            ));
        }
        Self::with_scale(
            self.divisor.add(&other.divisor),
            self.torus.clone(),
            self.scale * other.scale,
        )
    }

    pub fn inv(&self) -> EllipticFunction {
        EllipticFunction {
            divisor: self.divisor.neg(),
            torus: self.torus.clone(),
            scale: 1.0 / self.scale,
        }
    }

    pub fn neg(&self) -> EllipticFunction {
        EllipticFunction {
            divisor: self.divisor.clone(),
            torus: self.torus.clone(),
            scale: -self.scale,
        }
    }
}

/// `log|f(z)|`.
pub fn ell_log_abs(f: &EllipticFunction, z: Complex) -> Result<f64> {
    f.log_abs(z)
}

/// The `dz`-coefficient of `df/f`; `dlog|f| = ½(ell_dlog·dz + conj(ell_dlog)·dz̄)`.
pub fn ell_dlog(f: &EllipticFunction, z: Complex) -> Result<Complex> {
    f.dlog(z)
}

/// `F(z₁, z₂) = f(z₁)·g(z₂)` on `E₁ × E₂`; a missing factor is the constant 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitFunction {
    pub first: Option<EllipticFunction>,
    pub second: Option<EllipticFunction>,
}

impl SplitFunction {
    pub fn from_first(f: EllipticFunction) -> Self {
        SplitFunction {
            first: Some(f),
            second: None,
        }
    }

    pub fn from_second(g: EllipticFunction) -> Self {
        SplitFunction {
            first: None,
            second: Some(g),
        }
    }

    pub fn log_abs(&self, z1: Complex, z2: Complex) -> Result<f64> {
        let a = self.first.as_ref().map_or(Ok(0.0), |f| f.log_abs(z1))?;
        let b = self.second.as_ref().map_or(Ok(0.0), |g| g.log_abs(z2))?;
        Ok(a + b)
    }

    /// `(dz₁, dz₂)` coefficients of `dF/F`.
    pub fn dlog(&self, z1: Complex, z2: Complex) -> Result<(Complex, Complex)> {
        let zero = Complex::new(0.0, 0.0);
        let a = self.first.as_ref().map_or(Ok(zero), |f| f.dlog(z1))?;
        let b = self.second.as_ref().map_or(Ok(zero), |g| g.dlog(z2))?;
        Ok((a, b))
    }
}
