use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::boundary::{del_nu, k1_value, UniformizerChoice};
use crate::error::{Error, Result};
use crate::exact::{FactoredRational, Place, Rat};
use crate::milnor::{FieldTag, MilnorElement, SymbolEntry};

/// A finitely supported family `Place ↦ K^M_{m−1}(ℚ)` with no zero values.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GerstenChain {
    support: BTreeMap<Place, MilnorElement>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainEntry {
    place: Place,
    element: MilnorElement,
}

impl GerstenChain {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a chain, dropping zero values and checking degrees agree.
    pub fn from_entries(entries: impl IntoIterator<Item = (Place, MilnorElement)>) -> Result<Self> {
        let mut chain = GerstenChain::new();
        for (place, x) in entries {
            chain.insert_add(place, x)?;
        }
        Ok(chain)
    }

    fn insert_add(&mut self, place: Place, x: MilnorElement) -> Result<()> {
        if let Some(d) = self.degree() {
            if d != x.degree() {
                return Err(Error::DegreeMismatch(format!(
                    "chain degree {d} vs {}",
                    x.degree()
                )));
            }
        }
        let sum = match self.support.remove(&place) {
            Some(prev) => prev.add(&x)?,
            None => x,
        };
        if !sum.is_empty() {
            self.support.insert(place, sum);
        }
        Ok(())
    }

    pub fn get(&self, place: &Place) -> Option<&MilnorElement> {
        self.support.get(place)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Place, &MilnorElement)> {
        self.support.iter()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Common degree of the stored elements, if any are stored.
    pub fn degree(&self) -> Option<usize> {
        self.support.values().next().map(MilnorElement::degree)
    }

    /// Pointwise sum.
    pub fn add(&self, other: &GerstenChain) -> Result<GerstenChain> {
        let mut out = self.clone();
        for (place, x) in &other.support {
            out.insert_add(place.clone(), x.clone())?;
        }
        Ok(out)
    }
}

impl Serialize for GerstenChain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<ChainEntry> = self
            .support
            .iter()
            .map(|(place, element)| ChainEntry {
                place: place.clone(),
                element: element.clone(),
            })
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GerstenChain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<ChainEntry>::deserialize(d)?;
        GerstenChain::from_entries(entries.into_iter().map(|e| (e.place, e.element)))
            .map_err(serde::de::Error::custom)
    }
}

/// Places where some entry of `x` has a zero or pole, plus infinity.
fn candidate_places(x: &MilnorElement) -> BTreeSet<Place> {
    let mut places = BTreeSet::from([Place::Infinity]);
    for (sym, _) in x.terms() {
        for e in sym.entries() {
            if let SymbolEntry::Fn(f) = e {
                places.extend(f.finite_support());
            }
        }
    }
    places
}

/// `x ↦ (∂_ν x)_P` over all places `P` of ℙ¹ with rational coordinate.
pub fn gersten_boundary(x: &MilnorElement) -> Result<GerstenChain> {
    let images = candidate_places(x)
        .into_iter()
        .map(|p| {
            let image = del_nu(x, &UniformizerChoice::canonical(p.clone()))?;
            Ok((p, image))
        })
        .collect::<Result<Vec<_>>>()?;
    GerstenChain::from_entries(images)
}

/// `∏_P ∂_ν({f, g})_P` read back in `ℚ^×`. Weil reciprocity says this is 1.
pub fn weil_reciprocity_defect(f: &FactoredRational, g: &FactoredRational) -> Result<Rat> {
    let x = MilnorElement::symbol(vec![SymbolEntry::Fn(f.clone()), SymbolEntry::Fn(g.clone())])?;
    let chain = gersten_boundary(&x)?;
    let mut product = Rat::one();
    for (_, v) in chain.iter() {
        debug_assert_eq!(v.field(), FieldTag::Rational);
        product = &product * &k1_value(v)?;
    }
    Ok(product)
}
