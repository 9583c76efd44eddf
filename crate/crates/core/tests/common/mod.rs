//! Seeded generators shared by the property tests and the acceptance suite.
#![allow(dead_code)]

use kreg_core::exact::{FactoredRational, Place, Rat};
use kreg_core::milnor::{FieldTag, SymbolEntry};
use kreg_core::torus::{Complex, EllDivisor, EllipticFunction, Torus};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut TestRng) -> Rat {
    loop {
        let n = rng.gen_range(-12i64..=12);
        if n != 0 {
            return Rat::new(n, rng.gen_range(1i64..=6));
        }
    }
}

/// A root in `[−5, 5]` on a half-integer grid.
pub fn root(rng: &mut TestRng) -> Rat {
    Rat::new(rng.gen_range(-10i64..=10), 2)
}

pub fn nonzero_exponent(rng: &mut TestRng) -> i64 {
    loop {
        let e = rng.gen_range(-3i64..=3);
        if e != 0 {
            return e;
        }
    }
}

/// `c·∏(t − r)^e` with up to `max_factors` factors, roots in `[−5, 5]`.
pub fn factored(rng: &mut TestRng, max_factors: usize) -> FactoredRational {
    let k = rng.gen_range(0..=max_factors);
    let factors: Vec<(Rat, i64)> = (0..k).map(|_| (root(rng), nonzero_exponent(rng))).collect();
    FactoredRational::new(small_rat(rng), factors).expect("nonzero constant")
}

/// A nonconstant factored function.
pub fn nonconstant(rng: &mut TestRng) -> FactoredRational {
    loop {
        let f = factored(rng, 3);
        if !f.is_constant() {
            return f;
        }
    }
}

pub fn rat_entry(rng: &mut TestRng) -> SymbolEntry {
    SymbolEntry::Rat(small_rat(rng))
}

pub fn fn_entry(rng: &mut TestRng) -> SymbolEntry {
    SymbolEntry::Fn(factored(rng, 2))
}

pub fn entry(rng: &mut TestRng, field: FieldTag) -> SymbolEntry {
    match field {
        FieldTag::Function => fn_entry(rng),
        _ => rat_entry(rng),
    }
}

pub fn entries(rng: &mut TestRng, field: FieldTag, m: usize) -> Vec<SymbolEntry> {
    (0..m).map(|_| entry(rng, field)).collect()
}

fn sums_to(a: &SymbolEntry, b: &SymbolEntry, target: i64) -> bool {
    match (a, b) {
        (SymbolEntry::Rat(x), SymbolEntry::Rat(y)) => x.clone() + y.clone() == Rat::from(target),
        (SymbolEntry::Fn(x), SymbolEntry::Fn(y)) => x.sums_to(y, &Rat::from(target)),
        _ => false,
    }
}

/// Whether the raw entries already exhibit a relation (an entry 1, or two entries
/// summing to 0 or 1) that the normalizer applies before expanding.
pub fn has_raw_relation(entries: &[SymbolEntry]) -> bool {
    entries.iter().any(SymbolEntry::is_one)
        || entries.iter().enumerate().any(|(i, a)| {
            entries[i + 1..]
                .iter()
                .any(|b| sums_to(a, b, 0) || sums_to(a, b, 1))
        })
}

/// Multiplies two entries of the same field.
pub fn entry_mul(a: &SymbolEntry, b: &SymbolEntry) -> SymbolEntry {
    match (a, b) {
        (SymbolEntry::Rat(x), SymbolEntry::Rat(y)) => SymbolEntry::Rat(x.clone() * y.clone()),
        (SymbolEntry::Fn(x), SymbolEntry::Fn(y)) => SymbolEntry::Fn(x.mul(y)),
        _ => panic!("entries from different fields"),
    }
}

/// A random place: a root of one of the functions, a fresh point, or ∞.
pub fn place_for(rng: &mut TestRng, functions: &[&FactoredRational]) -> Place {
    let roots: Vec<Place> = functions.iter().flat_map(|f| f.finite_support()).collect();
    match rng.gen_range(0..4) {
        0 => Place::Infinity,
        1 => Place::finite(root(rng)),
        _ if !roots.is_empty() => roots[rng.gen_range(0..roots.len())].clone(),
        _ => Place::finite(root(rng)),
    }
}

/// A unit at `place`: nonzero constant times factors away from it (and of total
/// degree 0 when the place is ∞).
pub fn unit_at(rng: &mut TestRng, place: &Place) -> FactoredRational {
    let k = rng.gen_range(0..=2);
    let mut factors = Vec::new();
    for _ in 0..k {
        let r = loop {
            let r = root(rng);
            if Place::finite(r.clone()) != *place {
                break r;
            }
        };
        factors.push((r, nonzero_exponent(rng)));
    }
    if *place == Place::Infinity {
        let total: i64 = factors.iter().map(|(_, e)| e).sum();
        if total != 0 {
            let r = loop {
                let r = root(rng);
                if factors.iter().all(|(s, _)| *s != r) {
                    break r;
                }
            };
            factors.push((r, -total));
        }
    }
    FactoredRational::new(small_rat(rng), factors).expect("nonzero constant")
}

pub fn cplx(rng: &mut TestRng, lo: f64, hi: f64) -> Complex {
    Complex::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi))
}

/// A random point of the fundamental parallelogram.
pub fn torus_point(rng: &mut TestRng, torus: &Torus) -> Complex {
    torus.from_real_coords(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))
}

/// `σ(z−a₁)σ(z−a₂)/(σ(z−b₁)σ(z−b₂))` with `b₂ = a₁ + a₂ − b₁`, its points
/// pairwise at least `sep` apart on the torus and away from `avoid`.
pub fn four_point_function(
    rng: &mut TestRng,
    torus: &Torus,
    avoid: &[Complex],
    sep: f64,
) -> EllipticFunction {
    loop {
        let a1 = torus_point(rng, torus);
        let a2 = torus_point(rng, torus);
        let b1 = torus_point(rng, torus);
        let b2 = a1 + a2 - b1;
        let pts = [a1, a2, b1, b2];
        let spread = pts.iter().enumerate().all(|(i, p)| {
            pts[i + 1..]
                .iter()
                .chain(avoid)
                .all(|q| torus.distance(*p, *q) > sep)
        });
        if spread {
            let div = EllDivisor::new(vec![(a1, 1), (a2, 1), (b1, -1), (b2, -1)])
                .expect("balanced divisor");
            return EllipticFunction::new(div, torus.clone());
        }
    }
}

pub fn divisor_points(f: &EllipticFunction) -> Vec<Complex> {
    f.divisor().points().iter().map(|p| p.0).collect()
}

/// A random point at least `sep` from every listed point.
pub fn point_away(rng: &mut TestRng, torus: &Torus, avoid: &[Complex], sep: f64) -> Complex {
    loop {
        let z = torus_point(rng, torus);
        if avoid.iter().all(|p| torus.distance(z, *p) > sep) {
            return z;
        }
    }
}

pub fn taus() -> Vec<Torus> {
    [
        Complex::new(0.0, 1.0),
        Complex::new(0.5, 1.0),
        Complex::new(0.3, 1.2),
    ]
    .into_iter()
    .map(|t| Torus::new(t, 60).expect("valid torus"))
    .collect()
}
