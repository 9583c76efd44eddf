//! Numerical analysis on complex tori: Weierstrass σ and ζ, elliptic functions
//! presented by divisors, constant-coefficient forms and masked midpoint
//! quadrature on `E` and `E₁ × E₂`.

mod forms;
mod function;
mod lattice;
mod quadrature;

pub use forms::{complex_pair, Form, HarmonicForm, DZ1, DZ2, DZB1, DZB2};
pub use function::{
    ell_dlog, ell_log_abs, EllDivisor, EllipticFunction, SplitFunction, DIVISOR_TOLERANCE,
    ON_DIVISOR_RADIUS,
};
pub use lattice::{Torus, DEFAULT_R};
pub use num_complex::Complex64 as Complex;
pub use quadrature::{
    convergence_study, integrate_top_form, quad_integrate, quad_integrate_product, ConvergenceRow,
    ProductTorus, QuadResult, QuadratureGrid, PRODUCT_TOP_FACTOR,
};
