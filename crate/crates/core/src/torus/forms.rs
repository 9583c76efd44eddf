use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

/// Generator indices of the exterior algebra on `dz₁, dz̄₁, dz₂, dz̄₂`.
pub const DZ1: usize = 0;
pub const DZB1: usize = 1;
pub const DZ2: usize = 2;
pub const DZB2: usize = 3;

const ZERO: Complex = Complex::new(0.0, 0.0);
const HOLOMORPHIC_MASK: u8 = 0b0101;

/// A form value at one point: a complex combination of the 16 monomials
/// `dz_I`, indexed by bitmask over the generators in the order above.
/// Forms on a single torus use only `dz₁, dz̄₁`, written `dz, dz̄`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Form {
    coeffs: [Complex; 16],
}

/// `(sign, mask)` of `dz_a ∧ dz_b`, or `None` if they share a generator.
fn monomial_wedge(a: u8, b: u8) -> Option<(f64, u8)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    for i in 0..4 {
        if a & (1 << i) != 0 {
            swaps += (b & ((1 << i) - 1)).count_ones();
        }
    }
    Some((if swaps % 2 == 0 { 1.0 } else { -1.0 }, a | b))
}

impl Form {
    pub fn zero() -> Self {
        Form { coeffs: [ZERO; 16] }
    }

    pub fn scalar(c: Complex) -> Self {
        let mut f = Self::zero();
        f.coeffs[0] = c;
        f
    }

    pub fn real(x: f64) -> Self {
        Self::scalar(Complex::new(x, 0.0))
    }

    /// `c · dz_k` for a generator index `k`.
    pub fn generator(k: usize, c: Complex) -> Self {
        let mut f = Self::zero();
        f.coeffs[1 << k] = c;
        f
    }

    /// `a·dz + b·dz̄` on a single torus.
    pub fn one_form(a: Complex, b: Complex) -> Self {
        Self::generator(DZ1, a) + Self::generator(DZB1, b)
    }

    /// `½(c·dz_k + c̄·dz̄_k)`, the real part of `c·dz_k` for `k ∈ {1, 2}`.
    pub fn real_part_of(k: usize, c: Complex) -> Self {
        let (h, a) = if k == 1 { (DZ1, DZB1) } else { (DZ2, DZB2) };
        Self::generator(h, c * 0.5) + Self::generator(a, c.conj() * 0.5)
    }

    pub fn coeff(&self, mask: u8) -> Complex {
        self.coeffs[mask as usize]
    }

    pub fn set_coeff(&mut self, mask: u8, c: Complex) {
        self.coeffs[mask as usize] = c;
    }

    /// Coefficient of `dz ∧ dz̄` (single torus).
    pub fn top2(&self) -> Complex {
        self.coeffs[0b0011]
    }

    /// Coefficient of `dz₁ ∧ dz̄₁ ∧ dz₂ ∧ dz̄₂`.
    pub fn top4(&self) -> Complex {
        self.coeffs[0b1111]
    }

    pub fn scale(&self, c: Complex) -> Form {
        let mut out = *self;
        for x in out.coeffs.iter_mut() {
            *x *= c;
        }
        out
    }

    pub fn scale_real(&self, x: f64) -> Form {
        self.scale(Complex::new(x, 0.0))
    }

    pub fn wedge(&self, other: &Form) -> Form {
        let mut out = Form::zero();
        for a in 0..16u8 {
            let ca = self.coeffs[a as usize];
            if ca == ZERO {
                continue;
            }
            for b in 0..16u8 {
                let cb = other.coeffs[b as usize];
                if cb == ZERO {
                    continue;
                }
                if let Some((sign, m)) = monomial_wedge(a, b) {
                    out.coeffs[m as usize] += ca * cb * sign;
                }
            }
        }
        out
    }

    /// Complex conjugation, which swaps `dz_k ↔ dz̄_k`.
    pub fn conj(&self) -> Form {
        let mut out = Form::zero();
        for m in 0..16u8 {
            let c = self.coeffs[m as usize];
            if c == ZERO {
                continue;
            }
            let mut term = Form::scalar(c.conj());
            for k in 0..4 {
                if m & (1 << k) != 0 {
                    term = term.wedge(&Form::generator(k ^ 1, Complex::new(1.0, 0.0)));
                }
            }
            out = out + term;
        }
        out
    }

    /// `π_p(ω) = (ω + (−1)^p ω̄)/2`.
    pub fn pi_p(&self, p: i32) -> Form {
        let sign = if p.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        (*self + self.conj().scale_real(sign)).scale_real(0.5)
    }

    /// Keeps only monomials of the given total degree.
    pub fn degree_part(&self, d: u32) -> Form {
        let mut out = Form::zero();
        for m in 0..16u8 {
            if m.count_ones() == d {
                out.coeffs[m as usize] = self.coeffs[m as usize];
            }
        }
        out
    }

    /// Hodge type `(p, q)` of a monomial.
    pub fn hodge_type(mask: u8) -> (u32, u32) {
        (
            (mask & HOLOMORPHIC_MASK).count_ones(),
            (mask & !HOLOMORPHIC_MASK & 0xf).count_ones(),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary part among the coefficients.
    pub fn max_imag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

impl Default for Form {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for Form {
    type Output = Form;
    fn add(mut self, rhs: Form) -> Form {
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        self + (-rhs)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale_real(-1.0)
    }
}

impl Mul<f64> for Form {
    type Output = Form;
    fn mul(self, rhs: f64) -> Form {
        self.scale_real(rhs)
    }
}

/// A constant-coefficient 1-form `a·dz + b·dz̄` on a torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicForm {
    #[serde(with = "complex_pair")]
    pub a: Complex,
    #[serde(with = "complex_pair")]
    pub b: Complex,
}

impl HarmonicForm {
    pub fn new(a: Complex, b: Complex) -> Self {
        HarmonicForm { a, b }
    }

    /// Real forms satisfy `b = ā`.
    pub fn is_real(&self) -> bool {
        (self.b - self.a.conj()).norm() <= 1e-15 * (1.0 + self.a.norm())
    }

    pub fn to_form(&self) -> Form {
        Form::one_form(self.a, self.b)
    }

    /// The labelled real basis `dz + dz̄`, `i(dz − dz̄)`.
    pub fn real_basis() -> [(&'static str, HarmonicForm); 2] {
        let one = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        [
            ("dz+dzbar", HarmonicForm::new(one, one)),
            ("i(dz-dzbar)", HarmonicForm::new(i, i.conj())),
        ]
    }

    pub fn add(&self, other: &HarmonicForm) -> HarmonicForm {
        HarmonicForm::new(self.a + other.a, self.b + other.b)
    }
}

/// Serde helper: a complex number as `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64 as Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}
