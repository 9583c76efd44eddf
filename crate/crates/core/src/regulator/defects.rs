use std::f64::consts::PI;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::cochain::PointData;
use super::pairing::{log_current_density, CycleWithFunctions};
use crate::error::{Error, Result};
use crate::torus::{
    integrate_top_form, quad_integrate_product, EllipticFunction, Form, QuadratureGrid, Torus, DZ1,
    DZ2, DZB1, DZB2, PRODUCT_TOP_FACTOR,
};

const I: Complex = Complex::new(0.0, 1.0);

/// One Fourier mode `c · e^{2πi(js + kt)}` in the real coordinates `z = s + tτ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    #[serde(with = "crate::torus::complex_pair")]
    pub c: Complex,
    pub j: i32,
    pub k: i32,
}

/// A trigonometric polynomial on a torus, a smooth periodic test function.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPoly {
    pub terms: Vec<TrigTerm>,
}

/// `(φ, ∂φ, ∂̄φ, ∂∂̄φ)` at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub value: Complex,
    pub dz: Complex,
    pub dzbar: Complex,
    pub dzdzbar: Complex,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigPoly { terms }
    }

    pub fn constant(c: Complex) -> Self {
        TrigPoly::new(vec![TrigTerm { c, j: 0, k: 0 }])
    }

    pub fn jet(&self, torus: &Torus, z: Complex) -> Jet {
        let (s, t) = torus.to_real_coords(z);
        let tau = torus.tau();
        let mut out = Jet::default();
        for term in &self.terms {
            let (j, k) = (term.j as f64, term.k as f64);
            let e = term.c * (2.0 * PI * I * (j * s + k * t)).exp();
            // ∂_z = ½((1 + iτᵣ/τᵢ)∂_s − (i/τᵢ)∂_t), ∂_z̄ its conjugate operator
            let ds = 2.0 * PI * I * j;
            let dt = 2.0 * PI * I * k;
            let d = 0.5 * ((1.0 + I * tau.re / tau.im) * ds - I / tau.im * dt);
            let db = 0.5 * ((1.0 - I * tau.re / tau.im) * ds + I / tau.im * dt);
            out.value += e;
            out.dz += d * e;
            out.dzbar += db * e;
            out.dzdzbar += d * db * e;
        }
        out
    }
}

/// `η = a₁(z₁)a₂(z₂)·dz₁ + b₁(z₁)b₂(z₂)·dz₂`, a smooth `(1,0)`-form on `E₁ × E₂`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitEta {
    #[serde(default)]
    pub dz1: (TrigPoly, TrigPoly),
    #[serde(default)]
    pub dz2: (TrigPoly, TrigPoly),
}

/// `∂̄∂η` from the jets of `(a₁, b₁)` at `z₁` and `(a₂, b₂)` at `z₂`.
fn ddbar_eta(first: &[Jet; 2], second: &[Jet; 2]) -> Form {
    let [a1, b1] = first;
    let [a2, b2] = second;
    // ∂η = c·dz₁∧dz₂ with c = ∂₁b − ∂₂a
    let dbar1_c = b1.dzdzbar * b2.value - a1.dzbar * a2.dz;
    let dbar2_c = b1.dz * b2.dzbar - a1.value * a2.dzdzbar;
    let dz12 = Form::generator(DZ1, Complex::new(1.0, 0.0))
        .wedge(&Form::generator(DZ2, Complex::new(1.0, 0.0)));
    Form::generator(DZB1, dbar1_c).wedge(&dz12) + Form::generator(DZB2, dbar2_c).wedge(&dz12)
}

/// Both sides of the `∂∂̄` residue identity for `m = 2` on `E₁ × E₂`.
///
/// `lhs = ∫ (log|f₁| dlog|f₂| − log|f₂| dlog|f₁|) ∧ (∂̄∂η + ∂∂̄η̄)` and `rhs` sums
/// `(−1)^{m−ℓ} ν_D(f_ℓ) ∫_D dlog|f_other| ∧ (−2πi)(η − η̄)` over the divisor
/// components `D`. `rhs_literal` is the same sum with `η + η̄`, kept for reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdbarDefect {
    pub lhs: f64,
    pub lhs_error: f64,
    pub rhs: f64,
    pub rhs_error: f64,
    pub rhs_literal: f64,
    pub defect: f64,
    pub within_error: bool,
}

enum Side {
    First,
    Second,
}

/// Identifies `(f₁, f₂)` as pulled back from opposite factors.
fn split_pair(cycle: &CycleWithFunctions) -> Result<[(Side, &EllipticFunction); 2]> {
    let CycleWithFunctions::Surface { functions, .. } = cycle else {
        return Err(Error::DegreeMismatch(
            "the ∂∂̄ check runs on a product of two tori".into(),
        ));
    };
    if functions.len() != 2 {
        return Err(Error::UnsupportedArity(functions.len()));
    }
    let side = |i: usize| match (&functions[i].first, &functions[i].second) {
        (Some(f), None) => Ok((Side::First, f)),
        (None, Some(g)) => Ok((Side::Second, g)),
        _ => Err(Error::DegreeMismatch(
            "the ∂∂̄ check needs each function pulled back from a single factor".into(),
        )),
    };
    let (a, b) = (side(0)?, side(1)?);
    if matches!(
        (&a.0, &b.0),
        (Side::First, Side::First) | (Side::Second, Side::Second)
    ) {
        return Err(Error::DegreeMismatch(
            "the two functions must come from different factors".into(),
        ));
    }
    Ok([a, b])
}

pub fn ddbar_defect(
    cycle: &CycleWithFunctions,
    eta: &SplitEta,
    grid: &QuadratureGrid,
) -> Result<DdbarDefect> {
    let pair = split_pair(cycle)?;
    let CycleWithFunctions::Surface {
        torus: pt,
        functions,
        coefficient,
    } = cycle
    else {
        unreachable!("split_pair accepts only product carriers")
    };
    let c = *coefficient as f64;
    let zero = Complex::new(0.0, 0.0);
    let first_fns: Vec<Option<&EllipticFunction>> =
        functions.iter().map(|f| f.first.as_ref()).collect();
    let second_fns: Vec<Option<&EllipticFunction>> =
        functions.iter().map(|f| f.second.as_ref()).collect();
    let sing = |fs: &[Option<&EllipticFunction>]| -> Vec<Complex> {
        fs.iter()
            .flatten()
            .flat_map(|f| f.divisor().points().iter().map(|p| p.0))
            .collect()
    };
    let (s1, s2) = (sing(&first_fns), sing(&second_fns));
    let eval =
        |torus: &Torus, fns: &[Option<&EllipticFunction>], polys: [&TrigPoly; 2], z: Complex| {
            let data = fns
                .iter()
                .map(|f| match f {
                    Some(f) => Ok((f.log_abs(z)?, f.dlog(z)?)),
                    None => Ok((0.0, zero)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((data, [polys[0].jet(torus, z), polys[1].jet(torus, z)]))
        };
    let lhs = quad_integrate_product(
        pt,
        grid,
        (&s1, &s2),
        |z| eval(&pt.first, &first_fns, [&eta.dz1.0, &eta.dz2.0], z),
        |z| eval(&pt.second, &second_fns, [&eta.dz1.1, &eta.dz2.1], z),
        |(fa, ja), (fb, jb)| {
            let data = PointData {
                logs: fa.iter().zip(fb).map(|(x, y)| x.0 + y.0).collect(),
                dlogs: fa
                    .iter()
                    .zip(fb)
                    .map(|(x, y)| Form::generator(DZ1, x.1) + Form::generator(DZ2, y.1))
                    .collect(),
            };
            let x = ddbar_eta(ja, jb);
            let omega = x + x.conj();
            log_current_density(&data).wedge(&omega).top4() * PRODUCT_TOP_FACTOR
        },
    )?;

    // boundary side: D = {p} × E₂ for p ∈ div(f on E₁), D = E₁ × {q} for q ∈ div(g on E₂)
    let mut rhs = zero;
    let mut rhs_literal = zero;
    let mut rhs_error = 0.0;
    for (l, (side, f)) in pair.iter().enumerate() {
        let (_, other) = &pair[1 - l];
        let sign = if (2 - (l + 1)) % 2 == 0 { 1.0 } else { -1.0 };
        let (torus_d, point_torus, restrict_poly, along_poly) = match side {
            Side::First => (&pt.second, &pt.first, &eta.dz2.0, &eta.dz2.1),
            Side::Second => (&pt.first, &pt.second, &eta.dz1.1, &eta.dz1.0),
        };
        let sing_other: Vec<Complex> = other.divisor().points().iter().map(|p| p.0).collect();
        for (p, nu) in f.divisor().points() {
            let frozen = restrict_poly.jet(point_torus, *p).value;
            let integrate = |literal: bool| {
                integrate_top_form(torus_d, grid, &sing_other, |z| {
                    let h = frozen * along_poly.jet(torus_d, z).value;
                    let eta_d = if literal {
                        Form::one_form(h, h.conj())
                    } else {
                        Form::one_form(h, -h.conj()).scale(Complex::new(0.0, -2.0 * PI))
                    };
                    Ok(Form::real_part_of(1, other.dlog(z)?).wedge(&eta_d))
                })
            };
            let weight = sign * *nu as f64;
            let r = integrate(false)?;
            rhs += r.value * weight;
            rhs_error += r.error_estimate * weight.abs();
            rhs_literal += integrate(true)?.value * weight;
        }
    }
    let lhs_v = c * lhs.value.re;
    let rhs_v = c * rhs.re;
    let (lhs_error, rhs_error) = (c.abs() * lhs.error_estimate, c.abs() * rhs_error);
    let defect = (lhs_v - rhs_v).abs();
    Ok(DdbarDefect {
        lhs: lhs_v,
        lhs_error,
        rhs: rhs_v,
        rhs_error,
        rhs_literal: c * rhs_literal.re,
        defect,
        within_error: defect <= lhs_error + rhs_error,
    })
}

/// `c · Σ_D [ν_D(f₂)·log|f₁(D)| − ν_D(f₁)·log|f₂(D)|]` for two functions on a
/// curve with disjoint divisors; Weil reciprocity makes it vanish. Functions with
/// equal divisors give exactly 0.
pub fn descent_defect(
    f1: &EllipticFunction,
    f2: &EllipticFunction,
    coefficient: i64,
) -> Result<f64> {
    if f1.torus() != f2.torus() {
        return Err(Error::InvalidTorus(
            "functions live on different tori".into(),
        ));
    }
    if f1.divisor().add(&f2.divisor().neg()).is_empty() {
        // f₂ = c·f₁: the terms cancel pairwise and the constant enters with Σν = 0
        return Ok(0.0);
    }
    if f1.divisor().overlaps(f2.divisor(), f1.torus()) {
        return Err(Error::OverlappingDivisors);
    }
    let mut total = 0.0;
    for (d, n) in f2.divisor().points() {
        total += *n as f64 * f1.log_abs(*d)?;
    }
    for (d, n) in f1.divisor().points() {
        total -= *n as f64 * f2.log_abs(*d)?;
    }
    Ok(coefficient as f64 * total)
}
