//! Milnor K-theory of ℚ, ℚ(t) and 𝔽_p as formal sums of symbols in rewriting
//! normal form, and the κ-algebra `A(Π)` used to package boundary maps.

mod element;
mod entry;
mod kappa;

pub use element::{MilnorElement, MilnorSymbol, RawTerm, ZeroTest};
pub use entry::{FieldTag, SymbolEntry};
pub use kappa::KappaPiElement;
