use std::fmt;

use serde::{Deserialize, Serialize};

use super::element::{MilnorElement, MilnorSymbol};
use super::entry::{FieldTag, SymbolEntry};
use crate::error::{Error, Result};

/// `plain + pi_part·Π` in `A(Π)_m = A_m ⊕ A_{m−1}Π`, where `A = K^M_*(k)`,
/// `Π² = ℓ(−1)Π`, and `Π·s = (−1)^{deg s} s·Π` for homogeneous `s`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KappaPiElement {
    plain: MilnorElement,
    pi_part: MilnorElement,
}

/// A letter of a word in `A(Π)`.
#[derive(Clone, Debug)]
enum Letter {
    Sym(MilnorSymbol),
    Pi,
}

impl KappaPiElement {
    /// Homogeneous element of degree `plain.degree()`; `pi_part` must have
    /// degree one less (any degree is accepted when it is zero).
    pub fn new(plain: MilnorElement, pi_part: MilnorElement) -> Result<Self> {
        if plain.field() != pi_part.field() {
            return Err(Error::MixedFields(format!(
                "{} vs {}",
                plain.field(),
                pi_part.field()
            )));
        }
        let consistent = pi_part.is_empty() || pi_part.degree() + 1 == plain.degree();
        if !consistent {
            return Err(Error::DegreeMismatch(format!(
                "plain degree {} with Π-coefficient degree {}",
                plain.degree(),
                pi_part.degree()
            )));
        }
        let pi_degree = plain.degree().saturating_sub(1);
        let pi_part = if pi_part.is_empty() {
            MilnorElement::zero(plain.field(), pi_degree)
        } else {
            pi_part
        };
        Ok(KappaPiElement { plain, pi_part })
    }

    /// The unit `1 + 0·Π`.
    pub fn one(field: FieldTag) -> Self {
        KappaPiElement {
            plain: MilnorElement::integer(field, 1),
            pi_part: MilnorElement::zero(field, 0),
        }
    }

    /// `ℓ(u) + i·Π`.
    pub fn ell_plus_pi(unit: SymbolEntry, i: i64) -> Result<Self> {
        let field = unit.field();
        Self::new(MilnorElement::ell(unit)?, MilnorElement::integer(field, i))
    }

    pub fn plain(&self) -> &MilnorElement {
        &self.plain
    }

    pub fn pi_part(&self) -> &MilnorElement {
        &self.pi_part
    }

    pub fn field(&self) -> FieldTag {
        self.plain.field()
    }

    pub fn degree(&self) -> usize {
        self.plain.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.plain.is_empty() && self.pi_part.is_empty()
    }

    pub fn add(&self, other: &KappaPiElement) -> Result<KappaPiElement> {
        Self::new(
            self.plain.add(&other.plain)?,
            add_allow_zero(&self.pi_part, &other.pi_part)?,
        )
    }

    pub fn scale(&self, n: i64) -> KappaPiElement {
        KappaPiElement {
            plain: self.plain.scale(n),
            pi_part: self.pi_part.scale(n),
        }
    }

    /// Product in `A(Π)`. Each pair of monomials is written as a word and
    /// rewritten until it has the shape `s` or `s·Π`.
    pub fn mul(&self, other: &KappaPiElement) -> Result<KappaPiElement> {
        if self.field() != other.field() {
            return Err(Error::MixedFields(format!(
                "{} vs {}",
                self.field(),
                other.field()
            )));
        }
        let field = self.field();
        let degree = self.degree() + other.degree();
        let mut plain_raw = Vec::new();
        let mut pi_raw = Vec::new();
        for (s, c, s_pi) in self.monomials() {
            for (t, d, t_pi) in other.monomials() {
                let mut word = vec![Letter::Sym(s.clone())];
                if s_pi {
                    word.push(Letter::Pi);
                }
                word.push(Letter::Sym(t.clone()));
                if t_pi {
                    word.push(Letter::Pi);
                }
                let (sign, sym, has_pi) = rewrite_word(word, field);
                let target = if has_pi { &mut pi_raw } else { &mut plain_raw };
                target.push((sign * c * d, sym.entries().to_vec()));
            }
        }
        Self::new(
            MilnorElement::normalize(field, degree, plain_raw)?,
            MilnorElement::normalize(field, degree.saturating_sub(1), pi_raw)?,
        )
    }

    fn monomials(&self) -> impl Iterator<Item = (&MilnorSymbol, i64, bool)> {
        self.plain
            .terms()
            .map(|(s, c)| (s, c, false))
            .chain(self.pi_part.terms().map(|(s, c)| (s, c, true)))
    }
}

fn add_allow_zero(a: &MilnorElement, b: &MilnorElement) -> Result<MilnorElement> {
    if a.is_empty() {
        return Ok(b.clone());
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    a.add(b)
}

/// Applies, to fixpoint:
/// `Π·s → (−1)^{deg s} s·Π`, `s·t → st`, `Π·Π → ℓ(−1)·Π`.
/// Returns `(sign, s, ends_with_Π)`.
fn rewrite_word(mut word: Vec<Letter>, field: FieldTag) -> (i64, MilnorSymbol, bool) {
    let mut sign = 1i64;
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < word.len() {
            match (&word[i], &word[i + 1]) {
                (Letter::Pi, Letter::Sym(s)) => {
                    if s.degree() % 2 == 1 {
                        sign = -sign;
                    }
                    word.swap(i, i + 1);
                    changed = true;
                }
                (Letter::Sym(a), Letter::Sym(b)) => {
                    let merged = a.concat(b);
                    word.splice(i..i + 2, [Letter::Sym(merged)]);
                    changed = true;
                }
                (Letter::Pi, Letter::Pi) => {
                    let eps = MilnorSymbol::new(vec![SymbolEntry::minus_one(field)]);
                    word.splice(i..i + 2, [Letter::Sym(eps), Letter::Pi]);
                    changed = true;
                }
                (Letter::Sym(_), Letter::Pi) => i += 1,
            }
        }
        if !changed {
            break;
        }
    }
    match word.as_slice() {
        [Letter::Sym(s)] => (sign, s.clone(), false),
        [Letter::Sym(s), Letter::Pi] => (sign, s.clone(), true),
        [Letter::Pi] => (sign, MilnorSymbol::unit(), true),
        other => unreachable!("word not in normal shape: {other:?}"),
    }
}

impl fmt::Display for KappaPiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})Π", self.plain, self.pi_part)
    }
}

impl fmt::Debug for KappaPiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
