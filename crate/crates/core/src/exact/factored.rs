use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DensePoly, Place, Rat};
use crate::error::{Error, Result};

/// A rational function on ℙ¹ over ℚ with rational zeros and poles:
/// `constant · ∏ (t − root)^exponent`.
///
/// Roots are strictly increasing and exponents are nonzero, so structural
/// equality is equality of functions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "FactoredRepr", into = "RawFactored")]
pub struct FactoredRational {
    constant: Rat,
    factors: Vec<(Rat, i64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactored {
    c: Rat,
    #[serde(default)]
    factors: Vec<(Rat, i64)>,
}

/// Accepts either the object form or the textual shorthand (`"1-t"`).
#[derive(Deserialize)]
#[serde(untagged)]
enum FactoredRepr {
    Object(RawFactored),
    Text(String),
}

impl TryFrom<FactoredRepr> for FactoredRational {
    type Error = Error;
    fn try_from(repr: FactoredRepr) -> Result<Self> {
        match repr {
            FactoredRepr::Object(raw) => FactoredRational::new(raw.c, raw.factors),
            FactoredRepr::Text(s) => s.parse(),
        }
    }
}

impl From<FactoredRational> for RawFactored {
    fn from(f: FactoredRational) -> Self {
        RawFactored {
            c: f.constant,
            factors: f.factors,
        }
    }
}

impl FactoredRational {
    /// Builds the normal form: duplicate roots merged, zero exponents dropped, roots sorted.
    pub fn new(constant: Rat, factors: impl IntoIterator<Item = (Rat, i64)>) -> Result<Self> {
        if constant.is_zero() {
            return Err(Error::ZeroConstant);
        }
        let mut merged: BTreeMap<Rat, i64> = BTreeMap::new();
        for (root, e) in factors {
            *merged.entry(root).or_insert(0) += e;
        }
        Ok(FactoredRational {
            constant,
            factors: merged.into_iter().filter(|(_, e)| *e != 0).collect(),
        })
    }

    pub fn constant_fn(c: Rat) -> Result<Self> {
        Self::new(c, [])
    }

    pub fn one() -> Self {
        FactoredRational {
            constant: Rat::one(),
            factors: Vec::new(),
        }
    }

    /// The coordinate function `t`.
    pub fn t() -> Self {
        Self::linear(Rat::zero())
    }

    /// `t − root`
    pub fn linear(root: Rat) -> Self {
        FactoredRational {
            constant: Rat::one(),
            factors: vec![(root, 1)],
        }
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn factors(&self) -> &[(Rat, i64)] {
        &self.factors
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant.is_one()
    }

    pub fn mul(&self, other: &FactoredRational) -> FactoredRational {
        let factors = self.factors.iter().chain(&other.factors).cloned();
        FactoredRational::new(&self.constant * &other.constant, factors)
            .expect("product of nonzero constants is nonzero")
    }

    pub fn pow(&self, e: i64) -> FactoredRational {
        if e == 0 {
            return FactoredRational::one();
        }
        FactoredRational {
            constant: self.constant.pow(e),
            factors: self
                .factors
                .iter()
                .map(|(r, k)| (r.clone(), k * e))
                .collect(),
        }
    }

    pub fn inv(&self) -> FactoredRational {
        self.pow(-1)
    }

    pub fn neg(&self) -> FactoredRational {
        FactoredRational {
            constant: -&self.constant,
            factors: self.factors.clone(),
        }
    }

    /// Order of vanishing at `place`.
    pub fn valuation(&self, place: &Place) -> i64 {
        match place {
            Place::Finite(a) => self
                .factors
                .iter()
                .find(|(r, _)| r == a)
                .map_or(0, |(_, e)| *e),
            Place::Infinity => -self.factors.iter().map(|(_, e)| e).sum::<i64>(),
        }
    }

    /// Value of `f · π^{-ν(f)}` at `place`, for the canonical uniformizer
    /// (`t − a` at a finite place, `1/t` at infinity).
    pub fn residue_value(&self, place: &Place) -> Rat {
        match place {
            Place::Finite(a) => self
                .factors
                .iter()
                .filter(|(r, _)| r != a)
                .fold(self.constant.clone(), |acc, (r, e)| &acc * &(a - r).pow(*e)),
            // f·t^{ν} = c·∏(1 − r/t)^e → c
            Place::Infinity => self.constant.clone(),
        }
    }

    pub fn evaluate(&self, x: &Rat) -> Result<Rat> {
        if self.factors.iter().any(|(r, _)| r == x) {
            return Err(Error::AtZeroOrPole(x.to_string()));
        }
        Ok(self
            .factors
            .iter()
            .fold(self.constant.clone(), |acc, (r, e)| &acc * &(x - r).pow(*e)))
    }

    /// Finite places in the support of the divisor.
    pub fn finite_support(&self) -> impl Iterator<Item = Place> + '_ {
        self.factors.iter().map(|(r, _)| Place::Finite(r.clone()))
    }

    /// Numerator and denominator as dense polynomials.
    pub fn to_dense(&self) -> (DensePoly, DensePoly) {
        let mut num = DensePoly::constant(self.constant.clone());
        let mut den = DensePoly::one();
        for (r, e) in &self.factors {
            let lin = DensePoly::linear(r).pow(e.unsigned_abs() as u32);
            if *e > 0 {
                num = num.mul(&lin);
            } else {
                den = den.mul(&lin);
            }
        }
        (num, den)
    }

    /// Exact test of `self + other = target` as rational functions.
    pub fn sums_to(&self, other: &FactoredRational, target: &Rat) -> bool {
        let (n1, d1) = self.to_dense();
        let (n2, d2) = other.to_dense();
        let lhs = n1.mul(&d2).add(&n2.mul(&d1));
        let rhs = d1.mul(&d2).mul(&DensePoly::constant(target.clone()));
        lhs.sub(&rhs).is_zero()
    }
}

impl fmt::Display for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (r, e) in &self.factors {
            if r.is_zero() {
                write!(f, "*t")?;
            } else if r.is_negative() {
                write!(f, "*(t+{})", r.abs())?;
            } else {
                write!(f, "*(t-{r})")?;
            }
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FactoredRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `t`, `1-t`, `t+3/2`, or `*`-separated products such as
/// `5*(t-2)^3*(t-1)^-1`.
impl FromStr for FactoredRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' { '-' } else { c })
            .collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty function".into()));
        }
        if let Some(f) = parse_linear(&compact) {
            return Ok(f);
        }
        let mut acc = FactoredRational::one();
        for part in split_top_level(&compact) {
            acc = acc.mul(&parse_factor(part)?);
        }
        Ok(acc)
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_factor(part: &str) -> Result<FactoredRational> {
    let bad = || Error::Parse(format!("bad factor {part:?}"));
    let (base, exp) = match part.rfind('^') {
        Some(i) if part[..i].ends_with(')') || &part[..i] == "t" => {
            let e = part[i + 1..].trim_matches(|c| c == '(' || c == ')');
            (&part[..i], e.parse::<i64>().map_err(|_| bad())?)
        }
        _ => (part, 1),
    };
    let inner = base
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .unwrap_or(base);
    if let Some(f) = parse_linear(inner) {
        return Ok(f.pow(exp));
    }
    let c: Rat = inner.parse().map_err(|_| bad())?;
    FactoredRational::constant_fn(c).map(|f| f.pow(exp))
}

/// `t`, `-t`, `t-a`, `t+a`, `a-t`
fn parse_linear(s: &str) -> Option<FactoredRational> {
    if s == "t" {
        return Some(FactoredRational::t());
    }
    if s == "-t" {
        return Some(FactoredRational::t().neg());
    }
    if let Some(rest) = s.strip_prefix("t-") {
        return rest.parse::<Rat>().ok().map(FactoredRational::linear);
    }
    if let Some(rest) = s.strip_prefix("t+") {
        return rest
            .parse::<Rat>()
            .ok()
            .map(|a| FactoredRational::linear(-a));
    }
    if let Some(a) = s.strip_suffix("-t") {
        return a
            .parse::<Rat>()
            .ok()
            .map(|a| FactoredRational::linear(a).neg());
    }
    None
}
