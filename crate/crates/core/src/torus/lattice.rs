use std::f64::consts::PI;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default lattice truncation.
pub const DEFAULT_R: usize = 60;

const I: Complex = Complex::new(0.0, 1.0);

/// The complex torus `ℂ/(ℤ + τℤ)` with a lattice truncation `R`.
///
/// σ is evaluated as `(1/π)·e^{η₁z²/2}·sin(πz)·∏_{n=1}^{R}(1 − sin²(πz)/sin²(πnτ))`,
/// which is the Weierstrass product summed exactly along each horizontal row
/// `ℤ + nτ` and truncated at `|n| ≤ R`.
#[derive(Clone, Debug, PartialEq)]
pub struct Torus {
    tau: Complex,
    lattice_truncation: usize,
    /// `1/sin²(πnτ)` for `n = 1..=R`.
    inv_sin_sq: Vec<Complex>,
    eta1: Complex,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusRepr {
    tau: [f64; 2],
    #[serde(rename = "R", default = "default_r")]
    r: usize,
}

fn default_r() -> usize {
    DEFAULT_R
}

impl Torus {
    pub fn new(tau: Complex, lattice_truncation: usize) -> Result<Self> {
        if !tau.re.is_finite() || !tau.im.is_finite() || tau.im <= 0.0 {
            return Err(Error::InvalidTorus(format!(
                "Im(tau) must be positive, got {tau}"
            )));
        }
        if lattice_truncation < 1 {
            return Err(Error::InvalidTorus(
                "lattice truncation must be at least 1".into(),
            ));
        }
        let inv_sin_sq: Vec<Complex> = (1..=lattice_truncation)
            .map(|n| {
                // 1/sin(w) = −2i·e^{iw}/(1 − e^{2iw}); stable for Im w > 0
                let q = (I * PI * n as f64 * tau).exp();
                let inv = -2.0 * I * q / (1.0 - q * q);
                inv * inv
            })
            .collect();
        let eta1 = PI * PI / 3.0 + 2.0 * PI * PI * inv_sin_sq.iter().sum::<Complex>();
        Ok(Torus {
            tau,
            lattice_truncation,
            inv_sin_sq,
            eta1,
        })
    }

    pub fn with_default_truncation(tau: Complex) -> Result<Self> {
        Self::new(tau, DEFAULT_R)
    }

    pub fn tau(&self) -> Complex {
        self.tau
    }

    pub fn lattice_truncation(&self) -> usize {
        self.lattice_truncation
    }

    /// Area of the fundamental parallelogram, `Im τ`.
    pub fn area(&self) -> f64 {
        self.tau.im
    }

    /// `(s, t)` with `z = s + tτ`.
    pub fn to_real_coords(&self, z: Complex) -> (f64, f64) {
        let t = z.im / self.tau.im;
        (z.re - t * self.tau.re, t)
    }

    pub fn from_real_coords(&self, s: f64, t: f64) -> Complex {
        Complex::new(s, 0.0) + t * self.tau
    }

    /// Representative of `z` modulo the lattice closest to 0.
    pub fn reduce(&self, z: Complex) -> Complex {
        let (s, t) = self.to_real_coords(z);
        let mut best = self.from_real_coords(s - s.round(), t - t.round());
        for ds in [-1.0, 0.0, 1.0] {
            for dt in [-1.0, 0.0, 1.0] {
                let c = best + ds + dt * self.tau;
                if c.norm() < best.norm() {
                    best = c;
                }
            }
        }
        best
    }

    /// Distance from `z` to the nearest translate of `w`.
    pub fn distance(&self, z: Complex, w: Complex) -> f64 {
        self.reduce(z - w).norm()
    }

    pub fn is_lattice_point(&self, z: Complex) -> bool {
        self.reduce(z).norm() <= 1e-13 * (1.0 + z.norm())
    }

    /// Factors of the row product at `z`: `(sin πz, cos πz, [1 − sin²(πz)/sin²(πnτ)])`,
    /// stopping once the factors are 1 to machine precision.
    fn row_terms(&self, z: Complex) -> (Complex, Complex, Vec<(Complex, Complex)>) {
        let s = (PI * z).sin();
        let c = (PI * z).cos();
        let s2 = s * s;
        let mut terms = Vec::new();
        for inv in &self.inv_sin_sq {
            let r = s2 * inv;
            if r.norm() < 1e-18 {
                break;
            }
            terms.push((*inv, 1.0 - r));
        }
        (s, c, terms)
    }

    /// Weierstrass σ(z).
    pub fn sigma(&self, z: Complex) -> Complex {
        let (s, _, terms) = self.row_terms(z);
        let prod: Complex = terms.iter().map(|(_, f)| *f).product();
        (self.eta1 * z * z / 2.0).exp() * s / PI * prod
    }

    /// `ln|σ(z)|`, computed without forming σ; `−∞` on the lattice.
    pub fn ln_abs_sigma(&self, z: Complex) -> f64 {
        let (s, _, terms) = self.row_terms(z);
        let gauss = (self.eta1 * z * z / 2.0).re;
        gauss + s.norm().ln() - PI.ln() + terms.iter().map(|(_, f)| f.norm().ln()).sum::<f64>()
    }

    /// Weierstrass ζ(z) = σ'(z)/σ(z).
    pub fn zeta_w(&self, z: Complex) -> Result<Complex> {
        if self.is_lattice_point(z) {
            return Err(Error::LatticePoint);
        }
        let (s, c, terms) = self.row_terms(z);
        let mut out = self.eta1 * z + PI * c / s;
        for (inv, f) in terms {
            out -= 2.0 * PI * s * c * inv / f;
        }
        Ok(out)
    }

    /// `(η₁, η₂) = (2ζ(1/2), 2ζ(τ/2))`.
    pub fn quasi_periods(&self) -> (Complex, Complex) {
        let eta2 = 2.0
            * self
                .zeta_w(self.tau / 2.0)
                .expect("half period is not a lattice point");
        (self.eta1, eta2)
    }
}

impl Serialize for Torus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TorusRepr {
            tau: [self.tau.re, self.tau.im],
            r: self.lattice_truncation,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Torus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TorusRepr::deserialize(d)?;
        Torus::new(Complex::new(repr.tau[0], repr.tau[1]), repr.r).map_err(serde::de::Error::custom)
    }
}
