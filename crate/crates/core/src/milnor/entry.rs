use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{factor_rat, FactoredRational, Rat, ResidueClass};

/// The field a Milnor symbol lives over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    /// ℚ
    Rational,
    /// ℚ(t)
    Function,
    /// 𝔽_p
    ModP(u64),
}

impl fmt::Display for FieldTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "Q"),
            FieldTag::Function => write!(f, "Q(t)"),
            FieldTag::ModP(p) => write!(f, "F_{p}"),
        }
    }
}

/// One slot `a` of a symbol `{…, a, …}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolEntry {
    #[serde(rename = "q")]
    Rat(Rat),
    #[serde(rename = "fn")]
    Fn(FactoredRational),
    #[serde(rename = "modp")]
    ModP(ResidueClass),
}

impl SymbolEntry {
    pub fn field(&self) -> FieldTag {
        match self {
            SymbolEntry::Rat(_) => FieldTag::Rational,
            SymbolEntry::Fn(_) => FieldTag::Function,
            SymbolEntry::ModP(r) => FieldTag::ModP(r.modulus()),
        }
    }

    pub fn rat(x: impl Into<Rat>) -> Self {
        SymbolEntry::Rat(x.into())
    }

    /// The entry `−1` of the given field.
    pub fn minus_one(field: FieldTag) -> Self {
        match field {
            FieldTag::Rational => SymbolEntry::Rat(Rat::minus_one()),
            FieldTag::Function => {
                SymbolEntry::Fn(FactoredRational::constant_fn(Rat::minus_one()).expect("nonzero"))
            }
            FieldTag::ModP(p) => SymbolEntry::ModP(ResidueClass::new(-1, p).expect("prime")),
        }
    }

    /// Embeds a rational constant into `field` (reducing mod p when needed).
    pub fn constant(field: FieldTag, c: &Rat) -> Result<Self> {
        match field {
            FieldTag::Rational => Ok(SymbolEntry::Rat(c.clone())),
            FieldTag::Function => Ok(SymbolEntry::Fn(FactoredRational::constant_fn(c.clone())?)),
            FieldTag::ModP(p) => {
                let v = c
                    .mod_p(p)
                    .filter(|v| *v != 0)
                    .ok_or_else(|| Error::NonInvertibleEntry(format!("{c} mod {p}")))?;
                Ok(SymbolEntry::ModP(ResidueClass::new(v as i64, p)?))
            }
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            SymbolEntry::Rat(r) => r.is_one(),
            SymbolEntry::Fn(f) => f.is_one(),
            SymbolEntry::ModP(r) => r.is_one(),
        }
    }

    pub fn is_minus_one(&self) -> bool {
        match self {
            SymbolEntry::Rat(r) => r.is_minus_one(),
            SymbolEntry::Fn(f) => f.is_constant() && f.constant().is_minus_one(),
            SymbolEntry::ModP(r) => r.is_minus_one(),
        }
    }

    pub(crate) fn check_invertible(&self) -> Result<()> {
        match self {
            SymbolEntry::Rat(r) if r.is_zero() => Err(Error::NonInvertibleEntry("0".into())),
            _ => Ok(()),
        }
    }

    /// Exact test of `self + other ∈ {0, 1}`, i.e. whether the pair is killed
    /// by `{a, 1−a} = 0` or `{a, −a} = 0`.
    pub(crate) fn steinberg_pair(&self, other: &SymbolEntry) -> bool {
        match (self, other) {
            (SymbolEntry::Rat(a), SymbolEntry::Rat(b)) => {
                let s = a + b;
                s.is_zero() || s.is_one()
            }
            (SymbolEntry::Fn(f), SymbolEntry::Fn(g)) => {
                if f.is_constant() != g.is_constant() {
                    return false;
                }
                if f.is_constant() {
                    let s = f.constant() + g.constant();
                    return s.is_zero() || s.is_one();
                }
                f.sums_to(g, &Rat::zero()) || f.sums_to(g, &Rat::one())
            }
            (SymbolEntry::ModP(a), SymbolEntry::ModP(b)) => {
                let s = (a.value() + b.value()) % a.modulus();
                s <= 1
            }
            _ => false,
        }
    }

    /// Multiplicative expansion into atoms: `−1`, primes, and monic linear
    /// factors `t − a` (function field only). `ModP` entries are returned as is.
    pub(crate) fn expand(&self) -> Result<Vec<(SymbolEntry, i64)>> {
        match self {
            SymbolEntry::Rat(r) => Ok(rat_atoms(r)?
                .into_iter()
                .map(|(c, e)| (SymbolEntry::Rat(c), e))
                .collect()),
            SymbolEntry::Fn(f) => {
                let mut out: Vec<(SymbolEntry, i64)> = rat_atoms(f.constant())?
                    .into_iter()
                    .map(|(c, e)| {
                        (
                            SymbolEntry::Fn(FactoredRational::constant_fn(c).expect("nonzero")),
                            e,
                        )
                    })
                    .collect();
                out.extend(
                    f.factors()
                        .iter()
                        .map(|(r, e)| (SymbolEntry::Fn(FactoredRational::linear(r.clone())), *e)),
                );
                Ok(out)
            }
            SymbolEntry::ModP(_) => Ok(vec![(self.clone(), 1)]),
        }
    }

    /// For a linear atom `t − a`, returns `a`.
    pub(crate) fn linear_root(&self) -> Option<&Rat> {
        match self {
            SymbolEntry::Fn(f) if f.constant().is_one() && f.factors().len() == 1 => {
                let (r, e) = &f.factors()[0];
                (*e == 1).then_some(r)
            }
            _ => None,
        }
    }
}

/// `x = (−1)^s ∏ p^e` as atoms `(−1, 1)` and `(p, e)`.
fn rat_atoms(x: &Rat) -> Result<Vec<(Rat, i64)>> {
    if x.is_zero() {
        return Err(Error::NonInvertibleEntry("0".into()));
    }
    let (negative, primes) = factor_rat(x)?;
    let mut out = Vec::with_capacity(primes.len() + 1);
    if negative {
        out.push((Rat::minus_one(), 1));
    }
    out.extend(primes.into_iter().map(|(p, e)| (Rat::from(p as i64), e)));
    Ok(out)
}

impl fmt::Display for SymbolEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolEntry::Rat(r) => write!(f, "{r}"),
            SymbolEntry::Fn(g) => write!(f, "{g}"),
            SymbolEntry::ModP(r) => write!(f, "{r}"),
        }
    }
}

impl fmt::Debug for SymbolEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
