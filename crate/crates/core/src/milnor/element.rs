use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::entry::{FieldTag, SymbolEntry};
use crate::error::{Error, Result};
use crate::exact::{FactoredRational, ResidueClass};

/// An ordered product `ℓ(a₁)⋯ℓ(a_n)`; the empty symbol generates `K₀ = ℤ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MilnorSymbol {
    entries: Vec<SymbolEntry>,
}

impl MilnorSymbol {
    pub fn new(entries: Vec<SymbolEntry>) -> Self {
        MilnorSymbol { entries }
    }

    pub fn unit() -> Self {
        MilnorSymbol {
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[SymbolEntry] {
        &self.entries
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn contains_minus_one(&self) -> bool {
        self.entries.iter().any(SymbolEntry::is_minus_one)
    }

    pub fn concat(&self, other: &MilnorSymbol) -> MilnorSymbol {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().cloned());
        MilnorSymbol { entries }
    }
}

impl fmt::Display for MilnorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for MilnorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Outcome of a zero test. The rewriting system is sound but not complete in
/// degree ≥ 2, so a nonempty normal form does not prove nonvanishing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroTest {
    Zero,
    UnknownNonzero,
}

/// A homogeneous element of `K^M_n(F)` stored in rewriting normal form.
///
/// Normal-form symbols consist of atoms only: `−1`, primes, and (over ℚ(t))
/// monic linear factors `t − a`, sorted, with at most one linear factor, no
/// repeated atom other than `−1`, and coefficients reduced mod 2 whenever the
/// symbol contains `−1`. Over 𝔽_p the normal form is a single `ℓ(x)` in degree 1
/// and zero in degree ≥ 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MilnorElement {
    field: FieldTag,
    degree: usize,
    terms: BTreeMap<MilnorSymbol, i64>,
}

/// One `coef · {entries}` term of a formal sum, as read from JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub coef: i64,
    pub entries: Vec<SymbolEntry>,
}

impl MilnorElement {
    pub fn zero(field: FieldTag, degree: usize) -> Self {
        MilnorElement {
            field,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// `n` in `K₀ = ℤ`.
    pub fn integer(field: FieldTag, n: i64) -> Self {
        let mut terms = BTreeMap::new();
        if n != 0 {
            terms.insert(MilnorSymbol::unit(), n);
        }
        MilnorElement {
            field,
            degree: 0,
            terms,
        }
    }

    /// Normal form of the single symbol `{entries}`; `entries` must be nonempty.
    pub fn symbol(entries: Vec<SymbolEntry>) -> Result<Self> {
        let field = entries
            .first()
            .map(SymbolEntry::field)
            .ok_or_else(|| Error::DegreeMismatch("empty symbol needs a field".into()))?;
        let degree = entries.len();
        Self::normalize(field, degree, [(1, entries)])
    }

    /// `ℓ(a)`.
    pub fn ell(entry: SymbolEntry) -> Result<Self> {
        Self::symbol(vec![entry])
    }

    /// Rewrites a formal integer combination of symbols to normal form.
    pub fn normalize(
        field: FieldTag,
        degree: usize,
        raw: impl IntoIterator<Item = (i64, Vec<SymbolEntry>)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<MilnorSymbol, i64> = BTreeMap::new();
        for (coef, entries) in raw {
            if entries.len() != degree {
                return Err(Error::DegreeMismatch(format!(
                    "symbol of degree {} in element of degree {degree}",
                    entries.len()
                )));
            }
            for e in &entries {
                if e.field() != field {
                    return Err(Error::MixedFields(format!("{} vs {field}", e.field())));
                }
                e.check_invertible()?;
            }
            if coef == 0 {
                continue;
            }
            match field {
                FieldTag::ModP(_) => reduce_mod_p(coef, &entries, &mut acc),
                _ => reduce_raw(coef, entries, &mut acc)?,
            }
        }
        Ok(Self::finish(field, degree, acc))
    }

    /// Builds from JSON terms. `field`/`degree` are needed only when `terms` is empty.
    pub fn from_raw_terms(
        terms: &[RawTerm],
        field: Option<FieldTag>,
        degree: Option<usize>,
    ) -> Result<Self> {
        let field = field
            .or_else(|| {
                terms
                    .iter()
                    .flat_map(|t| t.entries.first())
                    .map(SymbolEntry::field)
                    .next()
            })
            .unwrap_or(FieldTag::Rational);
        let degree = degree
            .or_else(|| terms.first().map(|t| t.entries.len()))
            .unwrap_or(0);
        Self::normalize(
            field,
            degree,
            terms.iter().map(|t| (t.coef, t.entries.clone())),
        )
    }

    pub fn to_raw_terms(&self) -> Vec<RawTerm> {
        self.terms
            .iter()
            .map(|(s, c)| RawTerm {
                coef: *c,
                entries: s.entries().to_vec(),
            })
            .collect()
    }

    fn finish(field: FieldTag, degree: usize, mut acc: BTreeMap<MilnorSymbol, i64>) -> Self {
        if let FieldTag::ModP(p) = field {
            acc = collapse_mod_p(p, degree, acc);
        }
        for (s, c) in acc.iter_mut() {
            if s.contains_minus_one() {
                *c = c.rem_euclid(2);
            }
        }
        acc.retain(|_, c| *c != 0);
        MilnorElement {
            field,
            degree,
            terms: acc,
        }
    }

    pub fn field(&self) -> FieldTag {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MilnorSymbol, i64)> {
        self.terms.iter().map(|(s, c)| (s, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> ZeroTest {
        if self.terms.is_empty() {
            ZeroTest::Zero
        } else {
            ZeroTest::UnknownNonzero
        }
    }

    /// The integer of a degree-0 element.
    pub fn as_integer(&self) -> Option<i64> {
        (self.degree == 0).then(|| self.terms.values().sum())
    }

    fn check_compatible(&self, other: &MilnorElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields(format!(
                "{} vs {}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MilnorElement) -> Result<MilnorElement> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(format!(
                "{} vs {}",
                self.degree, other.degree
            )));
        }
        let raw = self
            .terms()
            .chain(other.terms())
            .map(|(s, c)| (c, s.entries().to_vec()));
        Self::normalize(self.field, self.degree, raw)
    }

    pub fn neg(&self) -> MilnorElement {
        self.scale(-1)
    }

    pub fn sub(&self, other: &MilnorElement) -> Result<MilnorElement> {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: i64) -> MilnorElement {
        let raw = self.terms().map(|(s, c)| (n * c, s.entries().to_vec()));
        Self::normalize(self.field, self.degree, raw).expect("normal-form terms stay valid")
    }

    /// Product in `K^M_*(F)`: concatenate symbols, multiply coefficients.
    pub fn mul(&self, other: &MilnorElement) -> Result<MilnorElement> {
        self.check_compatible(other)?;
        let raw: Vec<_> = self
            .terms()
            .flat_map(|(s, c)| {
                other
                    .terms()
                    .map(move |(t, d)| (c * d, s.concat(t).entries().to_vec()))
            })
            .collect();
        Self::normalize(self.field, self.degree + other.degree, raw)
    }

    /// Whether every term contains a `−1` entry.
    pub fn all_terms_contain_minus_one(&self) -> bool {
        self.terms.keys().all(MilnorSymbol::contains_minus_one)
    }
}

impl fmt::Display for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if self.degree == 0 {
                write!(f, "{c}")?;
            } else if *c == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{c}·{s}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MilnorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} deg {}] {}", self.field, self.degree, self)
    }
}

impl Serialize for MilnorElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MilnorElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<RawTerm>::deserialize(d)?;
        MilnorElement::from_raw_terms(&terms, None, None).map_err(serde::de::Error::custom)
    }
}

/// First pass over a raw symbol: relations on the entries as given, then
/// multilinear expansion into atoms.
fn reduce_raw(
    coef: i64,
    entries: Vec<SymbolEntry>,
    acc: &mut BTreeMap<MilnorSymbol, i64>,
) -> Result<()> {
    if entries.iter().any(SymbolEntry::is_one) || has_steinberg_pair(&entries) {
        return Ok(());
    }
    let expansions = entries
        .iter()
        .map(SymbolEntry::expand)
        .collect::<Result<Vec<_>>>()?;
    let mut work = Vec::with_capacity(entries.len());
    expand_product(&expansions, 0, coef, &mut work, acc);
    Ok(())
}

fn has_steinberg_pair(entries: &[SymbolEntry]) -> bool {
    entries.len() >= 2
        && entries
            .iter()
            .enumerate()
            .any(|(i, a)| entries[i + 1..].iter().any(|b| a.steinberg_pair(b)))
}

fn expand_product(
    expansions: &[Vec<(SymbolEntry, i64)>],
    slot: usize,
    coef: i64,
    work: &mut Vec<SymbolEntry>,
    acc: &mut BTreeMap<MilnorSymbol, i64>,
) {
    if slot == expansions.len() {
        reduce_atoms(work.clone(), coef, acc);
        return;
    }
    for (atom, mult) in &expansions[slot] {
        work.push(atom.clone());
        expand_product(expansions, slot + 1, coef * mult, work, acc);
        work.pop();
    }
}

/// Rewrites a symbol whose entries are all atoms and accumulates the result.
fn reduce_atoms(mut atoms: Vec<SymbolEntry>, mut coef: i64, acc: &mut BTreeMap<MilnorSymbol, i64>) {
    // antisymmetry: bubble sort, one sign flip per swap of distinct entries
    let n = atoms.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            if atoms[j] > atoms[j + 1] {
                atoms.swap(j, j + 1);
                coef = -coef;
            }
        }
    }
    // {a, a} = {−1, a}
    if let Some(i) =
        (0..n.saturating_sub(1)).find(|&i| atoms[i] == atoms[i + 1] && !atoms[i].is_minus_one())
    {
        atoms[i] = SymbolEntry::minus_one(atoms[i].field());
        return reduce_atoms(atoms, coef, acc);
    }
    if has_steinberg_pair(&atoms) {
        return;
    }
    // {t−a, t−b} = {t−a, a−b} + {b−a, t−b}, from the Steinberg relation
    // {(t−a)/(b−a), (t−b)/(a−b)} = 0 and {c, −c} = 0
    if let Some(i) = (0..n.saturating_sub(1))
        .find(|&i| atoms[i].linear_root().is_some() && atoms[i + 1].linear_root().is_some())
    {
        let a = atoms[i].linear_root().expect("checked").clone();
        let b = atoms[i + 1].linear_root().expect("checked").clone();
        let left = SymbolEntry::Fn(FactoredRational::constant_fn(&a - &b).expect("distinct roots"));
        let right =
            SymbolEntry::Fn(FactoredRational::constant_fn(&b - &a).expect("distinct roots"));
        for (slot, constant) in [(i + 1, left), (i, right)] {
            for (atom, mult) in constant.expand().expect("small constant") {
                let mut next = atoms.clone();
                next[slot] = atom;
                reduce_atoms(next, coef * mult, acc);
            }
        }
        return;
    }
    *acc.entry(MilnorSymbol::new(atoms)).or_insert(0) += coef;
}

fn reduce_mod_p(coef: i64, entries: &[SymbolEntry], acc: &mut BTreeMap<MilnorSymbol, i64>) {
    // K_n(𝔽_p) = 0 for n ≥ 2; degree 0 and 1 are handled in `collapse_mod_p`.
    if entries.len() >= 2 {
        return;
    }
    *acc.entry(MilnorSymbol::new(entries.to_vec())).or_insert(0) += coef;
}

fn collapse_mod_p(
    p: u64,
    degree: usize,
    acc: BTreeMap<MilnorSymbol, i64>,
) -> BTreeMap<MilnorSymbol, i64> {
    match degree {
        0 => acc,
        1 => {
            // K₁(𝔽_p) = 𝔽_p^×: Σ cᵢ ℓ(xᵢ) = ℓ(∏ xᵢ^cᵢ)
            let one = ResidueClass::new(1, p).expect("prime");
            let x = acc.iter().fold(one, |x, (s, c)| match &s.entries()[0] {
                SymbolEntry::ModP(r) => x.mul(&r.pow(*c)),
                _ => unreachable!("field checked"),
            });
            let mut out = BTreeMap::new();
            if !x.is_one() {
                out.insert(MilnorSymbol::new(vec![SymbolEntry::ModP(x)]), 1);
            }
            out
        }
        _ => BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rat;

    fn q(n: i64) -> SymbolEntry {
        SymbolEntry::rat(n)
    }

    fn func(s: &str) -> SymbolEntry {
        SymbolEntry::Fn(s.parse().unwrap())
    }

    #[test]
    fn steinberg_over_function_field() {
        let x = MilnorElement::symbol(vec![func("t"), func("1-t")]).unwrap();
        assert_eq!(x.is_zero(), ZeroTest::Zero);
        // same relation after expansion: {t, −1} + {t, t−1}
        let y = MilnorElement::normalize(
            FieldTag::Function,
            2,
            [
                (1, vec![func("t"), func("-1")]),
                (1, vec![func("t"), func("t-1")]),
            ],
        )
        .unwrap();
        assert_eq!(y.is_zero(), ZeroTest::Zero);
    }

    #[test]
    fn r3_and_multilinearity() {
        assert_eq!(
            MilnorElement::symbol(vec![q(2), q(-2)]).unwrap().is_zero(),
            ZeroTest::Zero
        );
        assert_eq!(
            MilnorElement::symbol(vec![q(5), q(-5)]).unwrap().is_zero(),
            ZeroTest::Zero
        );
        let four_three = MilnorElement::symbol(vec![q(4), q(3)]).unwrap();
        let two_three = MilnorElement::symbol(vec![q(2), q(3)]).unwrap();
        assert_eq!(four_three, two_three.scale(2));
        assert_eq!(two_three.is_zero(), ZeroTest::UnknownNonzero);
    }

    #[test]
    fn minus_one_is_two_torsion() {
        let x = MilnorElement::normalize(FieldTag::Rational, 2, [(3, vec![q(-1), q(5)])]).unwrap();
        assert_eq!(x, MilnorElement::symbol(vec![q(-1), q(5)]).unwrap());
        let mm = MilnorElement::symbol(vec![q(-1), q(-1)]).unwrap();
        assert_eq!(mm.is_zero(), ZeroTest::UnknownNonzero);
        assert_eq!(mm.scale(2).is_zero(), ZeroTest::Zero);
    }

    #[test]
    fn add_and_scale() {
        let a = MilnorElement::symbol(vec![q(2), q(3)]).unwrap();
        let b = MilnorElement::symbol(vec![q(3), q(2)]).unwrap();
        assert_eq!(a.add(&a.scale(-1)).unwrap().is_zero(), ZeroTest::Zero);
        assert_eq!(a.add(&b).unwrap().is_zero(), ZeroTest::Zero);
        let c = MilnorElement::ell(q(2)).unwrap();
        assert!(matches!(a.add(&c), Err(Error::DegreeMismatch(_))));
        let d = MilnorElement::symbol(vec![func("t"), func("2")]).unwrap();
        assert!(matches!(a.add(&d), Err(Error::MixedFields(_))));
    }

    #[test]
    fn ring_product() {
        let l2 = MilnorElement::ell(q(2)).unwrap();
        let l3 = MilnorElement::ell(q(3)).unwrap();
        assert_eq!(
            l2.mul(&l3).unwrap(),
            MilnorElement::symbol(vec![q(2), q(3)]).unwrap()
        );
        assert_eq!(
            l3.mul(&l3).unwrap(),
            MilnorElement::symbol(vec![q(-1), q(3)]).unwrap()
        );
        let lt = MilnorElement::ell(func("t")).unwrap();
        let lomt = MilnorElement::ell(func("1-t")).unwrap();
        assert_eq!(lt.mul(&lomt).unwrap().is_zero(), ZeroTest::Zero);
    }

    #[test]
    fn entry_one_and_errors() {
        assert_eq!(
            MilnorElement::symbol(vec![q(1), q(7)]).unwrap().is_zero(),
            ZeroTest::Zero
        );
        assert!(matches!(
            MilnorElement::symbol(vec![q(2), func("t")]),
            Err(Error::MixedFields(_))
        ));
        assert!(matches!(
            MilnorElement::symbol(vec![SymbolEntry::Rat(Rat::zero())]),
            Err(Error::NonInvertibleEntry(_))
        ));
    }

    #[test]
    fn k1_of_q_is_faithful() {
        let a = MilnorElement::ell(q(12)).unwrap();
        let b = MilnorElement::ell(q(3))
            .unwrap()
            .add(&MilnorElement::ell(q(4)).unwrap())
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(MilnorElement::ell(q(1)).unwrap().is_zero(), ZeroTest::Zero);
    }

    #[test]
    fn finite_field() {
        let p = 7;
        let e = |v| SymbolEntry::ModP(ResidueClass::new(v, p).unwrap());
        let x = MilnorElement::normalize(FieldTag::ModP(p), 1, [(1, vec![e(3)]), (1, vec![e(5)])])
            .unwrap();
        assert_eq!(
            x,
            MilnorElement::ell(e(1))
                .unwrap()
                .add(&MilnorElement::ell(e(15 % 7)).unwrap())
                .unwrap()
        );
        assert_eq!(
            MilnorElement::symbol(vec![e(3), e(5)]).unwrap().is_zero(),
            ZeroTest::Zero
        );
    }

    #[test]
    fn json_round_trip() {
        let x = MilnorElement::symbol(vec![q(2), q(3)]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"[{"coef":1,"entries":[{"q":"2"},{"q":"3"}]}]"#);
        let back: MilnorElement = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
    }
}
