//! Exact arithmetic over ℚ and ℚ(t).

mod factored;
mod padic;
mod place;
mod poly;
mod rat;

pub use factored::FactoredRational;
pub use padic::{
    factor_integer, factor_rat, is_prime, padic_residue, padic_valuation, ResidueClass,
    TRIAL_DIVISION_LIMIT,
};
pub use place::Place;
pub use poly::DensePoly;
pub use rat::Rat;
