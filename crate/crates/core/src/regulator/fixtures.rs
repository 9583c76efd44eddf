use num_complex::Complex64 as Complex;

use super::defects::{SplitEta, TrigPoly, TrigTerm};
use super::pairing::CycleWithFunctions;
use crate::error::{Error, Result};
use crate::torus::{
    EllDivisor, EllipticFunction, ProductTorus, SplitFunction, Torus, DEFAULT_R, DIVISOR_TOLERANCE,
};

/// `f = ∏σ(z−aᵢ)/σ(z)^k` together with `1 − f = C·∏σ(z−rᵢ)/σ(z)^k`, where the
/// `rᵢ` are the roots of `f = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinbergFixture {
    pub zeros: Vec<Complex>,
    pub roots: Vec<Complex>,
    pub scale: Complex,
    pub f: EllipticFunction,
    pub one_minus_f: EllipticFunction,
}

fn symmetric(torus: &Torus, a: Complex, scale: Complex) -> Result<EllipticFunction> {
    let div = EllDivisor::new(vec![(a, 1), (-a, 1), (Complex::new(0.0, 0.0), -2)])?;
    EllipticFunction::with_scale(div, torus.clone(), scale)
}

fn zeros_over_pole(torus: &Torus, zeros: &[Complex], scale: Complex) -> Result<EllipticFunction> {
    let mut points: Vec<(Complex, i64)> = zeros.iter().map(|z| (*z, 1)).collect();
    points.push((Complex::new(0.0, 0.0), -(zeros.len() as i64)));
    EllipticFunction::with_scale(EllDivisor::new(points)?, torus.clone(), scale)
}

/// Builds the pair `(f, 1 − f)` from the zeros of `f`, whose poles sit at 0.
///
/// The roots of `f = 1` come from a sweep for local minima of `|f − 1|` refined
/// by Newton's method; their representatives are shifted by a lattice vector so
/// that they sum to 0, and `C` is fitted at one point and checked at others.
pub fn steinberg_fixture(torus: &Torus, zeros: &[Complex]) -> Result<SteinbergFixture> {
    let k = zeros.len();
    if !(2..=3).contains(&k) {
        return Err(Error::InvalidDivisor(format!(
            "expected 2 or 3 zeros, got {k}"
        )));
    }
    let f = zeros_over_pole(torus, zeros, Complex::new(1.0, 0.0))?;
    let n = 96;
    let at = |i: usize, j: usize| {
        torus.from_real_coords(
            (i % n) as f64 / n as f64 + 0.5 / n as f64,
            (j % n) as f64 / n as f64 + 0.5 / n as f64,
        )
    };
    let mut gap = vec![f64::INFINITY; n * n];
    for j in 0..n {
        for i in 0..n {
            if let Ok(v) = f.eval(at(i, j)) {
                gap[j * n + i] = (v - 1.0).norm();
            }
        }
    }
    let mut roots: Vec<Complex> = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let g = gap[j * n + i];
            let is_min = (0..9).filter(|&d| d != 4).all(|d| {
                let (ii, jj) = ((i + n + d % 3 - 1) % n, (j + n + d / 3 - 1) % n);
                g <= gap[jj * n + ii]
            });
            if !is_min || !g.is_finite() {
                continue;
            }
            let mut z = at(i, j);
            for _ in 0..80 {
                let (Ok(v), Ok(dl)) = (f.eval(z), f.dlog(z)) else {
                    break;
                };
                let step = (v - 1.0) / (v * dl);
                z -= step;
                if step.norm() < 1e-15 {
                    break;
                }
            }
            let z = torus.reduce(z);
            let converged = f.eval(z).is_ok_and(|v| (v - 1.0).norm() < 1e-11);
            if converged && roots.iter().all(|r| torus.distance(*r, z) > 1e-8) {
                roots.push(z);
            }
        }
    }
    if roots.len() != k {
        return Err(Error::InvalidDivisor(format!(
            "found {} roots of f = 1, expected {k}",
            roots.len()
        )));
    }
    // Σ rᵢ is a lattice point; absorb it into the last representative
    let sum: Complex = roots.iter().sum();
    let (s, t) = torus.to_real_coords(sum);
    let lattice = torus.from_real_coords(s.round(), t.round());
    if (sum - lattice).norm() > DIVISOR_TOLERANCE {
        return Err(Error::InvalidDivisor(format!(
            "roots of f = 1 sum to {sum}, not a lattice point"
        )));
    }
    roots[k - 1] -= lattice;
    let shape = zeros_over_pole(torus, &roots, Complex::new(1.0, 0.0))?;
    let probe = |x: f64, y: f64| torus.from_real_coords(x, y);
    let z0 = probe(0.13, 0.37);
    let scale = (1.0 - f.eval(z0)?) / shape.eval(z0)?;
    let one_minus_f = zeros_over_pole(torus, &roots, scale)?;
    for z in [probe(0.61, 0.19), probe(0.41, 0.83), probe(0.92, 0.58)] {
        let fz = f.eval(z)?;
        let residual = (fz + one_minus_f.eval(z)? - 1.0).norm();
        if residual > DIVISOR_TOLERANCE * (1.0 + fz.norm()) {
            return Err(Error::InvalidDivisor(format!(
                "f + (1 − f) − 1 = {residual:e} at {z}"
            )));
        }
    }
    Ok(SteinbergFixture {
        zeros: zeros.to_vec(),
        roots,
        scale,
        f,
        one_minus_f,
    })
}

impl SteinbergFixture {
    /// The zeros used by the acceptance runs: `a + b + c = 0`, so `f` is not even.
    pub fn standard_zeros() -> Vec<Complex> {
        vec![
            Complex::new(0.2, 0.1),
            Complex::new(0.1, 0.35),
            Complex::new(-0.3, -0.45),
        ]
    }

    /// The cycle `(E, f, 1 − f)` with coefficient 1.
    pub fn cycle(&self) -> Result<CycleWithFunctions> {
        CycleWithFunctions::curve(
            self.f.torus().clone(),
            vec![self.f.clone(), self.one_minus_f.clone()],
            1,
        )
    }
}

/// Six pairs `(f, g)` with disjoint divisors on one torus, used to measure the
/// `r_B / r_log∘J` constant.
pub fn j_panel(torus: &Torus) -> Result<Vec<CycleWithFunctions>> {
    let c = |re, im| Complex::new(re, im);
    let four = |a: Complex, b: Complex, d: Complex| -> Result<EllipticFunction> {
        let div = EllDivisor::new(vec![(a, 1), (b, 1), (d, -1), (a + b - d, -1)])?;
        Ok(EllipticFunction::new(div, torus.clone()))
    };
    let pairs = vec![
        (
            symmetric(torus, c(0.3, 0.2), c(1.0, 0.0))?,
            four(c(0.15, 0.35), c(0.6, 0.7), c(0.4, 0.5))?,
        ),
        (
            symmetric(torus, c(0.25, 0.1), c(1.0, 0.0))?,
            four(c(0.1, 0.4), c(0.3, 0.3), c(0.45, 0.15))?,
        ),
        (
            four(c(0.2, 0.6), c(0.55, 0.1), c(0.7, 0.45))?,
            symmetric(torus, c(0.4, 0.25), c(2.0, 0.0))?,
        ),
        (
            symmetric(torus, c(0.45, 0.05), c(1.0, 0.0))?,
            four(c(0.1, 0.2), c(0.7, 0.85), c(0.3, 0.6))?,
        ),
        (
            four(c(0.35, 0.65), c(0.6, 0.3), c(0.15, 0.15))?,
            four(c(0.8, 0.55), c(0.25, 0.4), c(0.5, 0.75))?,
        ),
        (
            symmetric(torus, c(0.2, 0.45), c(-1.0, 0.0))?,
            four(c(0.65, 0.2), c(0.05, 0.3), c(0.3, 0.6))?,
        ),
    ];
    pairs
        .into_iter()
        .map(|(f, g)| CycleWithFunctions::curve(torus.clone(), vec![f, g], 1))
        .collect()
}

/// Three `(f(z₁), g(z₂), η)` triples on products of tori: `η` with both
/// components, `η` along `dz₁` only, and `η` along `dz₂` only on `E_i × E_{½+i}`.
pub fn ddbar_fixtures() -> Result<Vec<(CycleWithFunctions, SplitEta)>> {
    let c = |re, im| Complex::new(re, im);
    let square = Torus::new(c(0.0, 1.0), DEFAULT_R)?;
    let skew = Torus::new(c(0.5, 1.0), DEFAULT_R)?;
    let mode = |cc: Complex, j, k| {
        TrigPoly::new(vec![
            TrigTerm { c: cc, j, k },
            TrigTerm {
                c: c(0.5, 0.0),
                j: 0,
                k: 0,
            },
        ])
    };
    let four = |t: &Torus, a: Complex, b: Complex, d: Complex| -> Result<EllipticFunction> {
        let div = EllDivisor::new(vec![(a, 1), (b, 1), (d, -1), (a + b - d, -1)])?;
        Ok(EllipticFunction::new(div, t.clone()))
    };
    let surface = |t1: &Torus, t2: &Torus, f, g| {
        CycleWithFunctions::surface(
            ProductTorus::new(t1.clone(), t2.clone()),
            vec![SplitFunction::from_first(f), SplitFunction::from_second(g)],
            1,
        )
    };
    let one = TrigPoly::default();
    Ok(vec![
        (
            surface(
                &square,
                &square,
                symmetric(&square, c(0.3, 0.2), c(1.0, 0.0))?,
                symmetric(&square, c(0.15, 0.35), c(1.0, 0.0))?,
            )?,
            SplitEta {
                dz1: (mode(c(1.0, 0.0), 1, 0), mode(c(0.0, 1.0), 0, 1)),
                dz2: (mode(c(0.7, 0.0), 0, -1), mode(c(1.0, 0.3), 1, 1)),
            },
        ),
        (
            surface(
                &square,
                &square,
                four(&square, c(0.1, 0.4), c(0.3, 0.3), c(0.45, 0.15))?,
                symmetric(&square, c(0.25, 0.1), c(2.0, 0.0))?,
            )?,
            SplitEta {
                dz1: (mode(c(0.8, -0.2), 1, 1), mode(c(1.0, 0.0), -1, 0)),
                dz2: (one.clone(), one.clone()),
            },
        ),
        (
            surface(
                &square,
                &skew,
                symmetric(&square, c(0.35, 0.15), c(1.0, 0.0))?,
                four(&skew, c(0.2, 0.5), c(0.6, 0.3), c(0.7, 0.6))?,
            )?,
            SplitEta {
                dz1: (one.clone(), one),
                dz2: (mode(c(0.0, 1.0), 0, 1), mode(c(0.6, 0.4), 1, -1)),
            },
        ),
    ])
}
