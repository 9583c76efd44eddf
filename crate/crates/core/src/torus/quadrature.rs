use num_complex::Complex64 as Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::forms::Form;
use super::lattice::Torus;
use crate::error::{Error, Result};

/// Midpoint grid with `N` points per real dimension; cells whose centre lies
/// within `mask_radius` of a listed singular point are skipped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureGrid {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "delta")]
    mask_radius: f64,
}

impl QuadratureGrid {
    /// `N` must be even and at least 8 so that the `N/2` comparison grid exists.
    pub fn new(n: usize, mask_radius: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "N must be even and ≥ 8, got {n}"
            )));
        }
        if !(mask_radius > 0.0 && mask_radius.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "mask radius must be positive, got {mask_radius}"
            )));
        }
        Ok(QuadratureGrid { n, mask_radius })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask_radius(&self) -> f64 {
        self.mask_radius
    }

    /// Whether the mask radius is below the advised `1/N`.
    pub fn mask_is_subcell(&self) -> bool {
        self.mask_radius < 1.0 / self.n as f64
    }

    fn coarse(&self) -> QuadratureGrid {
        QuadratureGrid {
            n: self.n / 2,
            mask_radius: self.mask_radius,
        }
    }
}

/// A quadrature value and the estimate `|value(N) − value(N/2)|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    #[serde(with = "super::forms::complex_pair")]
    pub value: Complex,
    pub error_estimate: f64,
}

/// `E₁ × E₂`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductTorus {
    pub first: Torus,
    pub second: Torus,
}

impl ProductTorus {
    pub fn new(first: Torus, second: Torus) -> Self {
        ProductTorus { first, second }
    }

    pub fn volume(&self) -> f64 {
        self.first.area() * self.second.area()
    }
}

/// Cell centres `z = s + tτ`, row-major in `t`, with the mask applied.
fn cell_centres(torus: &Torus, n: usize, delta: f64, singular: &[Complex]) -> Vec<Option<Complex>> {
    let h = 1.0 / n as f64;
    (0..n * n)
        .map(|k| {
            let (j, i) = (k / n, k % n);
            let z = torus.from_real_coords((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
            let masked = singular.iter().any(|p| torus.distance(z, *p) < delta);
            (!masked).then_some(z)
        })
        .collect()
}

/// Pairwise sum in a fixed tree order.
fn pairwise_sum(xs: &[Complex]) -> Complex {
    match xs.len() {
        0 => Complex::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn integrate_once<F>(
    torus: &Torus,
    n: usize,
    delta: f64,
    singular: &[Complex],
    f: &F,
) -> Result<Complex>
where
    F: Fn(Complex) -> Result<Complex> + Sync,
{
    let cells = cell_centres(torus, n, delta, singular);
    let rows: Vec<Complex> = cells
        .par_chunks(n)
        .map(|row| {
            row.iter()
                .flatten()
                .try_fold(Complex::new(0.0, 0.0), |acc, z| Ok(acc + f(*z)?))
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&rows) * (torus.area() / (n * n) as f64))
}

/// `∫_E f dA` with `dA = Im τ · ds dt`, so that `∫_E 1 = Im τ`.
pub fn quad_integrate<F>(
    torus: &Torus,
    grid: &QuadratureGrid,
    singular: &[Complex],
    f: F,
) -> Result<QuadResult>
where
    F: Fn(Complex) -> Result<Complex> + Sync,
{
    let fine = integrate_once(torus, grid.n, grid.mask_radius, singular, &f)?;
    let coarse = integrate_once(torus, grid.coarse().n, grid.mask_radius, singular, &f)?;
    Ok(QuadResult {
        value: fine,
        error_estimate: (fine - coarse).norm(),
    })
}

/// `∫_E ω` for a 2-form `ω = c·dz∧dz̄`, using `dz∧dz̄ = −2i dA`.
pub fn integrate_top_form<F>(
    torus: &Torus,
    grid: &QuadratureGrid,
    singular: &[Complex],
    omega: F,
) -> Result<QuadResult>
where
    F: Fn(Complex) -> Result<Form> + Sync,
{
    let minus_2i = Complex::new(0.0, -2.0);
    quad_integrate(torus, grid, singular, |z| Ok(omega(z)?.top2() * minus_2i))
}

fn integrate_product_once<A, B, FA, FB, C>(
    pt: &ProductTorus,
    n: usize,
    delta: f64,
    singular: (&[Complex], &[Complex]),
    eval_first: &FA,
    eval_second: &FB,
    combine: &C,
) -> Result<Complex>
where
    A: Send + Sync,
    B: Send + Sync,
    FA: Fn(Complex) -> Result<A> + Sync,
    FB: Fn(Complex) -> Result<B> + Sync,
    C: Fn(&A, &B) -> Complex + Sync,
{
    let first: Vec<Option<A>> = evaluate_cells(&pt.first, n, delta, singular.0, eval_first)?;
    let second: Vec<Option<B>> = evaluate_cells(&pt.second, n, delta, singular.1, eval_second)?;
    let partial: Vec<Complex> = first
        .par_iter()
        .map(|a| match a {
            None => Complex::new(0.0, 0.0),
            Some(a) => second
                .iter()
                .flatten()
                .fold(Complex::new(0.0, 0.0), |acc, b| acc + combine(a, b)),
        })
        .collect();
    Ok(pairwise_sum(&partial) * (pt.volume() / (n as f64).powi(4)))
}

fn evaluate_cells<B, FB>(
    torus: &Torus,
    n: usize,
    delta: f64,
    sing: &[Complex],
    f: &FB,
) -> Result<Vec<Option<B>>>
where
    B: Send,
    FB: Fn(Complex) -> Result<B> + Sync,
{
    cell_centres(torus, n, delta, sing)
        .into_par_iter()
        .map(|z| z.map(f).transpose())
        .collect()
}

/// `∫_{E₁×E₂} combine(a(z₁), b(z₂)) dA₁ dA₂` for an integrand assembled from
/// per-factor data; each factor is evaluated once per cell.
pub fn quad_integrate_product<A, B, FA, FB, C>(
    pt: &ProductTorus,
    grid: &QuadratureGrid,
    singular: (&[Complex], &[Complex]),
    eval_first: FA,
    eval_second: FB,
    combine: C,
) -> Result<QuadResult>
where
    A: Send + Sync,
    B: Send + Sync,
    FA: Fn(Complex) -> Result<A> + Sync,
    FB: Fn(Complex) -> Result<B> + Sync,
    C: Fn(&A, &B) -> Complex + Sync,
{
    let run = |n| {
        integrate_product_once(
            pt,
            n,
            grid.mask_radius,
            singular,
            &eval_first,
            &eval_second,
            &combine,
        )
    };
    let fine = run(grid.n)?;
    let coarse = run(grid.coarse().n)?;
    Ok(QuadResult {
        value: fine,
        error_estimate: (fine - coarse).norm(),
    })
}

/// `(−2i)²`: `dz₁∧dz̄₁∧dz₂∧dz̄₂ = −4 dA₁ dA₂`.
pub const PRODUCT_TOP_FACTOR: f64 = -4.0;

/// One row of a convergence study.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Runs `integral` on grids `N ∈ ns` with `δ` halved whenever `N` doubles
/// (`δ = δ₀·N₀/N`), recording the real part of each value.
pub fn convergence_study<F>(ns: &[usize], delta0: f64, integral: F) -> Result<Vec<ConvergenceRow>>
where
    F: Fn(&QuadratureGrid) -> Result<QuadResult>,
{
    let n0 = *ns
        .first()
        .ok_or_else(|| Error::InvalidGrid("empty N schedule".into()))?;
    ns.iter()
        .map(|&n| {
            let delta = delta0 * n0 as f64 / n as f64;
            let grid = QuadratureGrid::new(n, delta)?;
            let r = integral(&grid)?;
            Ok(ConvergenceRow {
                n,
                delta,
                value: r.value.re,
                error_estimate: r.error_estimate,
            })
        })
        .collect()
}
