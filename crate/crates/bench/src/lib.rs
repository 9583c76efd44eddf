//! Inputs shared by the criterion benchmarks.

use kreg_core::milnor::{MilnorElement, RawTerm};
use kreg_core::regulator::{steinberg_fixture, CycleWithFunctions, SteinbergFixture};
use kreg_core::{Complex, Form, HarmonicForm, Torus};

/// A degree-3 element over ℚ(t) with several terms that expand multilinearly.
pub fn symbol_terms() -> Vec<RawTerm> {
    let json = r#"[
        {"coef": 2, "entries": [{"fn": "6*t^2*(t-1)"}, {"fn": "1-t"}, {"fn": "1/5*(t+3)"}]},
        {"coef": -1, "entries": [{"fn": "t"}, {"fn": "(t-1/2)^3"}, {"fn": "-4*t^-1"}]},
        {"coef": 3, "entries": [{"fn": "(t-2)*(t+2)"}, {"fn": "t-2"}, {"fn": "9/7"}]}
    ]"#;
    serde_json::from_str(json).expect("fixture terms parse")
}

pub fn normalize(terms: &[RawTerm]) -> MilnorElement {
    MilnorElement::from_raw_terms(terms, None, None).expect("fixture normalizes")
}

pub fn skew_torus() -> Torus {
    Torus::new(Complex::new(0.3, 1.2), 60).expect("valid torus")
}

/// Points spread over the fundamental parallelogram, away from the lattice.
pub fn sample_points(torus: &Torus, n: usize) -> Vec<Complex> {
    (0..n)
        .map(|k| {
            let s = (k as f64 * 0.618_033_988_75 + 0.11).fract();
            let t = (k as f64 * 0.414_213_562_37 + 0.23).fract();
            torus.from_real_coords(s, t)
        })
        .collect()
}

/// The Steinberg cycle `(E, f, 1 − f)` on the square torus with one test form.
pub fn steinberg_cycle() -> (CycleWithFunctions, Form) {
    let torus = Torus::new(Complex::new(0.0, 1.0), 60).expect("valid torus");
    let fx = steinberg_fixture(&torus, &SteinbergFixture::standard_zeros()).expect("fixture");
    let w = HarmonicForm::real_basis()[0].1.to_form();
    (fx.cycle().expect("cycle"), w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(normalize(&symbol_terms()).degree(), 3);
        let t = skew_torus();
        assert!(sample_points(&t, 64).iter().all(|z| !t.is_lattice_point(*z)));
        assert_eq!(steinberg_cycle().0.arity(), 2);
    }
}
