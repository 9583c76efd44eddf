//! Valuation boundary maps on Milnor K-theory: `d_π`, `∂_π = ∂⁰_π + ∂_ν Π`,
//! Gersten chains over ℚ(t) and the reciprocity product.

mod boundary;
mod gersten;

pub use boundary::{
    boundary_pi, boundary_pi_symbol, d_pi, del0, del_nu, del_nu_symbol, k1_value, padic_tame,
    residue_closed_form, tame_symbol_oracle, UniformizerChoice,
};
pub use gersten::{gersten_boundary, weil_reciprocity_defect, GerstenChain};
