use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{padic_residue, padic_valuation, FactoredRational, Place, Rat};
use crate::milnor::{FieldTag, KappaPiElement, MilnorElement, MilnorSymbol, SymbolEntry};

/// The uniformizer `π = unit_multiplier · π_can` at a place of ℙ¹, where
/// `π_can` is `t − a` at a finite place and `1/t` at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformizerChoice {
    place: Place,
    #[serde(default = "FactoredRational::one")]
    unit_multiplier: FactoredRational,
}

impl UniformizerChoice {
    pub fn canonical(place: Place) -> Self {
        UniformizerChoice {
            place,
            unit_multiplier: FactoredRational::one(),
        }
    }

    /// Fails unless `unit_multiplier` has valuation 0 at `place`.
    pub fn new(place: Place, unit_multiplier: FactoredRational) -> Result<Self> {
        let v = unit_multiplier.valuation(&place);
        if v != 0 {
            return Err(Error::InvalidUniformizer(format!(
                "multiplier {unit_multiplier} has valuation {v} at {place}"
            )));
        }
        Ok(UniformizerChoice {
            place,
            unit_multiplier,
        })
    }

    pub fn place(&self) -> &Place {
        &self.place
    }

    pub fn unit_multiplier(&self) -> &FactoredRational {
        &self.unit_multiplier
    }

    /// `(ν(f), residue of f·π^{−ν(f)})`.
    fn split(&self, f: &FactoredRational) -> (i64, Rat) {
        let i = f.valuation(&self.place);
        let u = self.unit_multiplier.residue_value(&self.place);
        let residue = &f.residue_value(&self.place) * &u.pow(-i);
        (i, residue)
    }
}

/// `d_π(f) = ℓ(ū) + iΠ` where `f = u·π^i`.
pub fn d_pi(f: &FactoredRational, u: &UniformizerChoice) -> Result<KappaPiElement> {
    let (i, residue) = u.split(f);
    KappaPiElement::ell_plus_pi(SymbolEntry::Rat(residue), i)
}

/// Extends `d` multiplicatively over symbols and additively over terms.
fn extend_boundary(
    x: &MilnorElement,
    residue_field: FieldTag,
    d: impl Fn(&SymbolEntry) -> Result<KappaPiElement>,
) -> Result<KappaPiElement> {
    extend_over_terms(x.terms(), x.degree(), residue_field, d)
}

fn extend_over_terms<'a>(
    terms: impl Iterator<Item = (&'a MilnorSymbol, i64)>,
    m: usize,
    residue_field: FieldTag,
    d: impl Fn(&SymbolEntry) -> Result<KappaPiElement>,
) -> Result<KappaPiElement> {
    let mut acc = KappaPiElement::new(
        MilnorElement::zero(residue_field, m),
        MilnorElement::zero(residue_field, m.saturating_sub(1)),
    )?;
    for (sym, coef) in terms {
        let mut prod = KappaPiElement::one(residue_field);
        for e in sym.entries() {
            prod = prod.mul(&d(e)?)?;
        }
        acc = acc.add(&prod.scale(coef))?;
    }
    Ok(acc)
}

fn function_entry(e: &SymbolEntry) -> Result<&FactoredRational> {
    match e {
        SymbolEntry::Fn(f) => Ok(f),
        other => Err(Error::MixedFields(format!(
            "{} vs {}",
            other.field(),
            FieldTag::Function
        ))),
    }
}

/// `∂_π(x)` for `x ∈ K^M_m(ℚ(t))`, valued in `K^M_*(ℚ)(Π)`.
pub fn boundary_pi(x: &MilnorElement, u: &UniformizerChoice) -> Result<KappaPiElement> {
    if x.field() != FieldTag::Function {
        return Err(Error::MixedFields(format!(
            "{} vs {}",
            x.field(),
            FieldTag::Function
        )));
    }
    extend_boundary(x, FieldTag::Rational, |e| d_pi(function_entry(e)?, u))
}

/// `∂_π` of a single symbol taken entry by entry, before any rewriting over ℚ(t).
///
/// The class agrees with `boundary_pi` of the normalized symbol, but the
/// representative keeps the residues `ū_j` of the given entries, so the
/// closed-form terms appear verbatim.
pub fn boundary_pi_symbol(sym: &MilnorSymbol, u: &UniformizerChoice) -> Result<KappaPiElement> {
    for e in sym.entries() {
        function_entry(e)?;
    }
    extend_over_terms(
        std::iter::once((sym, 1)),
        sym.entries().len(),
        FieldTag::Rational,
        |e| d_pi(function_entry(e)?, u),
    )
}

/// The Π-coefficient of [`boundary_pi_symbol`].
pub fn del_nu_symbol(sym: &MilnorSymbol, u: &UniformizerChoice) -> Result<MilnorElement> {
    Ok(boundary_pi_symbol(sym, u)?.pi_part().clone())
}

/// The plain part `∂⁰_π(x)`; depends on the choice of `π`.
pub fn del0(x: &MilnorElement, u: &UniformizerChoice) -> Result<MilnorElement> {
    Ok(boundary_pi(x, u)?.plain().clone())
}

/// The residue map `∂_ν(x)`, the Π-coefficient of `∂_π(x)`.
pub fn del_nu(x: &MilnorElement, u: &UniformizerChoice) -> Result<MilnorElement> {
    Ok(boundary_pi(x, u)?.pi_part().clone())
}

/// `∂_ν` for the p-adic valuation on ℚ, valued in `K^M_*(𝔽_p)`.
pub fn padic_tame(x: &MilnorElement, p: u64) -> Result<MilnorElement> {
    if x.field() != FieldTag::Rational {
        return Err(Error::MixedFields(format!(
            "{} vs {}",
            x.field(),
            FieldTag::Rational
        )));
    }
    let residue_field = FieldTag::ModP(p);
    let d = |e: &SymbolEntry| match e {
        SymbolEntry::Rat(r) => KappaPiElement::ell_plus_pi(
            SymbolEntry::ModP(padic_residue(r, p)?),
            padic_valuation(r, p)?,
        ),
        other => Err(Error::MixedFields(format!(
            "{} vs {}",
            other.field(),
            FieldTag::Rational
        ))),
    };
    Ok(extend_boundary(x, residue_field, d)?.pi_part().clone())
}

/// The displayed terms of the closed-form residue of `{u₁π^{k₁}, …, u_mπ^{k_m}}`:
/// `Σ_j k_j(−1)^{m−j} ℓ(ū₁)⋯ℓ̂(ū_j)⋯ℓ(ū_m) + (∏k_j)ℓ(−1)^{m−1}`.
/// Terms between these two, all divisible by `ℓ(−1)`, are omitted.
pub fn residue_closed_form(sym: &MilnorSymbol, u: &UniformizerChoice) -> Result<MilnorElement> {
    let split = sym
        .entries()
        .iter()
        .map(|e| Ok(u.split(function_entry(e)?)))
        .collect::<Result<Vec<_>>>()?;
    let m = split.len();
    if m == 0 {
        return Ok(MilnorElement::zero(FieldTag::Rational, 0));
    }
    if m == 1 {
        return Ok(MilnorElement::integer(FieldTag::Rational, split[0].0));
    }
    let mut raw: Vec<(i64, Vec<SymbolEntry>)> = Vec::with_capacity(m + 1);
    for (j, (k, _)) in split.iter().enumerate() {
        // 1-based index j+1, so the sign is (−1)^{m−j−1}
        let sign = if (m - j - 1) % 2 == 0 { 1 } else { -1 };
        let rest = split
            .iter()
            .enumerate()
            .filter(|(l, _)| *l != j)
            .map(|(_, (_, a))| SymbolEntry::Rat(a.clone()))
            .collect();
        raw.push((sign * k, rest));
    }
    let prod_k: i64 = split.iter().map(|(k, _)| k).product();
    raw.push((prod_k, vec![SymbolEntry::Rat(Rat::minus_one()); m - 1]));
    MilnorElement::normalize(FieldTag::Rational, m - 1, raw)
}

/// The classical tame symbol `(−1)^{ν(f)ν(g)} · (f^{ν(g)}/g^{ν(f)})(place)` as an
/// element of `K₁(ℚ)`, with the canonical uniformizer.
pub fn tame_symbol_oracle(
    f: &FactoredRational,
    g: &FactoredRational,
    place: &Place,
) -> Result<MilnorElement> {
    let a = f.valuation(place);
    let b = g.valuation(place);
    let unit = f.pow(b).mul(&g.pow(-a));
    let mut value = unit.residue_value(place);
    if (a * b) % 2 != 0 {
        value = -value;
    }
    MilnorElement::ell(SymbolEntry::Rat(value))
}

/// Reads an element of `K₁(ℚ)` back as the rational `∏ xᵢ^{cᵢ}`.
pub fn k1_value(x: &MilnorElement) -> Result<Rat> {
    if x.field() != FieldTag::Rational || x.degree() != 1 {
        return Err(Error::DegreeMismatch(format!(
            "expected K_1(Q), got degree {} over {}",
            x.degree(),
            x.field()
        )));
    }
    let mut out = Rat::one();
    for (sym, c) in x.terms() {
        match &sym.entries()[0] {
            SymbolEntry::Rat(r) => out = &out * &r.pow(c),
            _ => unreachable!("field checked"),
        }
    }
    Ok(out)
}
