//! Milnor K-theory symbol calculus with valuation boundary maps, and numerical
//! log-current / cup-product regulators on complex tori.
//!
//! The crate is split bottom-up:
//!
//! - [`exact`]: rationals, factored rational functions on the projective line,
//!   places, valuations and p-adic residues.
//! - [`milnor`]: formal sums of Milnor symbols, the rewriting normalizer and the
//!   κ-algebra `A(Π)`.
//! - [`tame`]: `d_π`, `∂_π`, `∂⁰_π`, `∂_ν`, Gersten chains and reciprocity.
//! - [`torus`]: Weierstrass σ/ζ, divisor-presented elliptic functions,
//!   constant-coefficient forms and masked midpoint quadrature.
//! - [`regulator`]: the log-current regulator, the cup-product regulator, the
//!   `J` operator and the numerical defect checks.

pub mod error;
pub mod exact;
pub mod milnor;
pub mod regulator;
pub mod tame;
pub mod torus;

pub use error::{Error, Result};
pub use exact::{FactoredRational, Place, Rat, ResidueClass};
pub use milnor::{FieldTag, KappaPiElement, MilnorElement, MilnorSymbol, SymbolEntry, ZeroTest};
pub use tame::{GerstenChain, UniformizerChoice};
pub use torus::{
    Complex, EllDivisor, EllipticFunction, Form, HarmonicForm, ProductTorus, QuadratureGrid,
    SplitFunction, Torus,
};
