use std::f64::consts::PI;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::cochain::{xi_from_data, PointData};
use crate::error::{Error, Result};
use crate::torus::{
    integrate_top_form, quad_integrate_product, EllipticFunction, Form, HarmonicForm, ProductTorus,
    QuadResult, QuadratureGrid, SplitFunction, Torus, DZ1, DZ2, PRODUCT_TOP_FACTOR,
};

/// Exact values of the functions at one point of a 0-dimensional carrier,
/// with the value `w(x)` of the test function there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSample {
    #[serde(with = "complex_list")]
    pub values: Vec<Complex>,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

mod complex_list {
    use num_complex::Complex64 as Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex>, D::Error> {
        Ok(Vec::<[f64; 2]>::deserialize(d)?
            .into_iter()
            .map(|[re, im]| Complex::new(re, im))
            .collect())
    }
}

/// `c · (Z, f₁, …, f_m)`: a carrier with functions on it and an integer coefficient.
#[derive(Clone, Debug, PartialEq)]
pub enum CycleWithFunctions {
    Curve {
        torus: Torus,
        functions: Vec<EllipticFunction>,
        coefficient: i64,
    },
    Surface {
        torus: ProductTorus,
        functions: Vec<SplitFunction>,
        coefficient: i64,
    },
    Points {
        samples: Vec<PointSample>,
        arity: usize,
        coefficient: i64,
    },
}

impl CycleWithFunctions {
    pub fn curve(torus: Torus, functions: Vec<EllipticFunction>, coefficient: i64) -> Result<Self> {
        if functions.iter().any(|f| f.torus() != &torus) {
            return Err(Error::InvalidTorus(
                "function defined on a different torus".into(),
            ));
        }
        check_arity(functions.len())?;
        Ok(CycleWithFunctions::Curve {
            torus,
            functions,
            coefficient,
        })
    }

    pub fn surface(
        torus: ProductTorus,
        functions: Vec<SplitFunction>,
        coefficient: i64,
    ) -> Result<Self> {
        for f in &functions {
            let ok = f.first.as_ref().is_none_or(|g| g.torus() == &torus.first)
                && f.second
                    .as_ref()
                    .is_none_or(|g| g.torus() == &torus.second);
            if !ok {
                return Err(Error::InvalidTorus(
                    "function factor defined on a different torus".into(),
                ));
            }
        }
        check_arity(functions.len())?;
        Ok(CycleWithFunctions::Surface {
            torus,
            functions,
            coefficient,
        })
    }

    pub fn points(samples: Vec<PointSample>, coefficient: i64) -> Result<Self> {
        let arity = samples.first().map_or(1, |s| s.values.len());
        if samples.iter().any(|s| s.values.len() != arity) {
            return Err(Error::Parse(
                "point samples carry different numbers of values".into(),
            ));
        }
        if samples
            .iter()
            .flat_map(|s| &s.values)
            .any(|v| v.norm() == 0.0)
        {
            return Err(Error::OnDivisor);
        }
        check_arity(arity)?;
        Ok(CycleWithFunctions::Points {
            samples,
            arity,
            coefficient,
        })
    }

    pub fn arity(&self) -> usize {
        match self {
            CycleWithFunctions::Curve { functions, .. } => functions.len(),
            CycleWithFunctions::Surface { functions, .. } => functions.len(),
            CycleWithFunctions::Points { arity, .. } => *arity,
        }
    }

    /// Complex dimension of the carrier.
    pub fn dimension(&self) -> u32 {
        match self {
            CycleWithFunctions::Curve { .. } => 1,
            CycleWithFunctions::Surface { .. } => 2,
            CycleWithFunctions::Points { .. } => 0,
        }
    }

    pub fn coefficient(&self) -> i64 {
        match self {
            CycleWithFunctions::Curve { coefficient, .. }
            | CycleWithFunctions::Surface { coefficient, .. }
            | CycleWithFunctions::Points { coefficient, .. } => *coefficient,
        }
    }

    /// Degree a test form must have to pair with `m − 1`-forms on the carrier.
    pub fn test_form_degree(&self) -> Result<u32> {
        let top = 2 * self.dimension();
        let m = self.arity() as u32;
        top.checked_sub(m - 1).ok_or_else(|| {
            Error::DegreeMismatch(format!(
                "{m} functions give a {}-form, above the real dimension {top} of the carrier",
                m - 1
            ))
        })
    }

    /// The labelled real test forms used when none are given: the harmonic
    /// basis on a curve, the constant 1 on points.
    pub fn default_test_forms(&self) -> Result<Vec<(String, Form)>> {
        let d = self.test_form_degree()?;
        match (self, d) {
            (CycleWithFunctions::Curve { .. }, 1) => Ok(HarmonicForm::real_basis()
                .into_iter()
                .map(|(l, w)| (l.to_string(), w.to_form()))
                .collect()),
            (CycleWithFunctions::Points { .. }, 0) => Ok(vec![("1".to_string(), Form::real(1.0))]),
            _ => Err(Error::DegreeMismatch(format!(
                "no default test forms of degree {d} on this carrier; pass them explicitly"
            ))),
        }
    }

    fn check_test_form(&self, w: &Form) -> Result<()> {
        let d = self.test_form_degree()?;
        if (w.degree_part(d) - *w).max_abs() > 0.0 {
            return Err(Error::DegreeMismatch(format!(
                "test form must be homogeneous of degree {d}"
            )));
        }
        if let CycleWithFunctions::Curve { .. } = self {
            let off_curve =
                (0..16u8).any(|m| m & 0b1100 != 0 && w.coeff(m) != Complex::new(0.0, 0.0));
            if off_curve {
                return Err(Error::DegreeMismatch(
                    "test form on a curve may only use dz, dz̄".into(),
                ));
            }
        }
        Ok(())
    }
}

fn check_arity(m: usize) -> Result<()> {
    if (1..=4).contains(&m) {
        Ok(())
    } else {
        Err(Error::UnsupportedArity(m))
    }
}

/// `Σ_ℓ (−1)^{ℓ−1} log|f_ℓ| ⋀_{j≠ℓ} dlog|f_j|`, the density of the log current.
pub fn log_current_density(data: &PointData) -> Form {
    let m = data.logs.len();
    let real_dlogs: Vec<Form> = data.dlogs.iter().map(|f| f.pi_p(0)).collect();
    (0..m).fold(Form::zero(), |acc, l| {
        let wedge = (0..m)
            .filter(|&j| j != l)
            .fold(Form::real(1.0), |w, j| w.wedge(&real_dlogs[j]));
        let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
        acc + wedge.scale_real(sign * data.logs[l])
    })
}

/// Per-factor data `(log|f|, df/f)` of each split function's factor.
type FactorData = Vec<(f64, Complex)>;

fn factor_data(factors: &[Option<&EllipticFunction>], z: Complex) -> Result<FactorData> {
    factors
        .iter()
        .map(|f| match f {
            Some(f) => Ok((f.log_abs(z)?, f.dlog(z)?)),
            None => Ok((0.0, Complex::new(0.0, 0.0))),
        })
        .collect()
}

fn combine_factors(a: &FactorData, b: &FactorData) -> PointData {
    PointData {
        logs: a.iter().zip(b).map(|(x, y)| x.0 + y.0).collect(),
        dlogs: a
            .iter()
            .zip(b)
            .map(|(x, y)| Form::generator(DZ1, x.1) + Form::generator(DZ2, y.1))
            .collect(),
    }
}

fn singular_points<'a>(functions: impl Iterator<Item = &'a EllipticFunction>) -> Vec<Complex> {
    functions
        .flat_map(|f| f.divisor().points().iter().map(|(z, _)| *z))
        .collect()
}

/// `c · ∫_Z density(z) ∧ w` for a pointwise density built from the function data.
fn integrate_density<D>(
    cycle: &CycleWithFunctions,
    w: &Form,
    grid: &QuadratureGrid,
    density: D,
) -> Result<QuadResult>
where
    D: Fn(&PointData) -> Result<Form> + Sync,
{
    cycle.check_test_form(w)?;
    let c = cycle.coefficient() as f64;
    let raw = match cycle {
        CycleWithFunctions::Curve {
            torus, functions, ..
        } => {
            let sing = singular_points(functions.iter());
            integrate_top_form(torus, grid, &sing, |z| {
                Ok(density(&PointData::on_curve(functions, z)?)?.wedge(w))
            })?
        }
        CycleWithFunctions::Surface {
            torus, functions, ..
        } => {
            let firsts: Vec<Option<&EllipticFunction>> =
                functions.iter().map(|f| f.first.as_ref()).collect();
            let seconds: Vec<Option<&EllipticFunction>> =
                functions.iter().map(|f| f.second.as_ref()).collect();
            let s1 = singular_points(firsts.iter().flatten().copied());
            let s2 = singular_points(seconds.iter().flatten().copied());
            let result = quad_integrate_product(
                torus,
                grid,
                (&s1, &s2),
                |z| factor_data(&firsts, z),
                |z| factor_data(&seconds, z),
                |a, b| match density(&combine_factors(a, b)) {
                    Ok(form) => form.wedge(w).top4() * PRODUCT_TOP_FACTOR,
                    Err(_) => Complex::new(f64::NAN, f64::NAN),
                },
            )?;
            if !result.value.re.is_finite() {
                return Err(Error::OnDivisor);
            }
            result
        }
        CycleWithFunctions::Points { samples, .. } => {
            let mut total = Complex::new(0.0, 0.0);
            for s in samples {
                let data = PointData {
                    logs: s.values.iter().map(|v| v.norm().ln()).collect(),
                    dlogs: vec![Form::zero(); s.values.len()],
                };
                total += density(&data)?.wedge(w).coeff(0) * s.weight;
            }
            QuadResult {
                value: total,
                error_estimate: 0.0,
            }
        }
    };
    Ok(QuadResult {
        value: raw.value * c,
        error_estimate: raw.error_estimate * c.abs(),
    })
}

/// The log-current pairing `c · ∫_Z Σ_ℓ (−1)^{ℓ−1} log|f_ℓ| ⋀_{j≠ℓ} dlog|f_j| ∧ w`.
pub fn r_log(cycle: &CycleWithFunctions, w: &Form, grid: &QuadratureGrid) -> Result<QuadResult> {
    integrate_density(cycle, w, grid, |d| Ok(log_current_density(d)))
}

/// `(2πi)^{−dim Z}`.
pub fn beilinson_normalization(cycle: &CycleWithFunctions) -> Complex {
    (Complex::new(0.0, 2.0 * PI)).powi(-(cycle.dimension() as i32))
}

/// The cup-product pairing `c · (2πi)^{−dim Z} ∫_Z ξ(f₁,…,f_m) ∧ w`.
pub fn r_beilinson(
    cycle: &CycleWithFunctions,
    w: &Form,
    grid: &QuadratureGrid,
) -> Result<QuadResult> {
    let raw = integrate_density(cycle, w, grid, xi_from_data)?;
    let norm = beilinson_normalization(cycle);
    Ok(QuadResult {
        value: raw.value * norm,
        error_estimate: raw.error_estimate * norm.norm(),
    })
}

/// `J` on harmonic 1-forms: `a·dz + b·dz̄ ↦ i·a·dz − i·b·dz̄`.
pub fn j_operator(w: &HarmonicForm) -> HarmonicForm {
    let i = Complex::new(0.0, 1.0);
    HarmonicForm::new(i * w.a, -i * w.b)
}

/// `J` on constant forms: multiplies type `(p, q)` by `i` if `p > q`, by `−i` if
/// `p < q` and leaves it alone if `p = q`.
pub fn j_form(w: &Form) -> Form {
    let mut out = Form::zero();
    for m in 0..16u8 {
        let (p, q) = Form::hodge_type(m);
        let factor = match p.cmp(&q) {
            std::cmp::Ordering::Greater => Complex::new(0.0, 1.0),
            std::cmp::Ordering::Less => Complex::new(0.0, -1.0),
            std::cmp::Ordering::Equal => Complex::new(1.0, 0.0),
        };
        out.set_coeff(m, w.coeff(m) * factor);
    }
    out
}

/// One labelled pairing value; the real part is the regulator value and the
/// imaginary part is a consistency residue that should be near 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub label: String,
    pub value: f64,
    pub imag_residue: f64,
    pub error_estimate: f64,
}

impl PairingEntry {
    fn from_result(label: &str, r: &QuadResult) -> Self {
        PairingEntry {
            label: label.to_string(),
            value: r.value.re,
            imag_residue: r.value.im,
            error_estimate: r.error_estimate,
        }
    }
}

/// Which regulator a [`RegulatorValue`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegulatorKind {
    Log,
    Beilinson,
}

/// Pairings of one regulator against a list of labelled test forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegulatorValue {
    pub kind: RegulatorKind,
    pub entries: Vec<PairingEntry>,
}

/// Evaluates `r_log` or `r_B` against each labelled test form.
pub fn regulator_pairings(
    kind: RegulatorKind,
    cycle: &CycleWithFunctions,
    forms: &[(String, Form)],
    grid: &QuadratureGrid,
) -> Result<RegulatorValue> {
    let entries = forms
        .iter()
        .map(|(label, w)| {
            let r = match kind {
                RegulatorKind::Log => r_log(cycle, w, grid)?,
                RegulatorKind::Beilinson => r_beilinson(cycle, w, grid)?,
            };
            Ok(PairingEntry::from_result(label, &r))
        })
        .collect::<Result<_>>()?;
    Ok(RegulatorValue { kind, entries })
}

/// `r_B(w)`, `r_log(Jw)` and their ratio for one test form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JComparisonEntry {
    pub label: String,
    #[serde(with = "crate::torus::complex_pair")]
    pub r_beilinson: Complex,
    #[serde(with = "crate::torus::complex_pair")]
    pub r_log_j: Complex,
    #[serde(with = "crate::torus::complex_pair")]
    pub ratio: Complex,
    pub ratio_error: f64,
}

/// Compares `r_B(w)` with `r_log(Jw)` for each labelled test form.
pub fn compare_j(
    cycle: &CycleWithFunctions,
    forms: &[(String, Form)],
    grid: &QuadratureGrid,
) -> Result<Vec<JComparisonEntry>> {
    forms
        .iter()
        .map(|(label, w)| {
            let b = r_beilinson(cycle, w, grid)?;
            let l = r_log(cycle, &j_form(w), grid)?;
            if l.value.norm() == 0.0 {
                return Err(Error::DegreeMismatch(format!(
                    "r_log(Jw) vanishes for {label}; ratio undefined"
                )));
            }
            let ratio = b.value / l.value;
            let rel = b.error_estimate / b.value.norm().max(f64::MIN_POSITIVE)
                + l.error_estimate / l.value.norm();
            Ok(JComparisonEntry {
                label: label.clone(),
                r_beilinson: b.value,
                r_log_j: l.value,
                ratio,
                ratio_error: ratio.norm() * rel,
            })
        })
        .collect()
}

/// The measured constant of a panel of comparisons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JSummary {
    #[serde(with = "crate::torus::complex_pair")]
    pub measured_constant: Complex,
    /// `max |ratioᵢ − mean| / |mean|`.
    pub relative_spread: f64,
    /// Largest individual ratio error relative to `|mean|`.
    pub relative_error: f64,
    #[serde(with = "crate::torus::complex_pair")]
    pub candidate_constant: Complex,
}

/// Mean ratio of a panel and its spread, next to the candidate `(2πi)^{−dim Z}`.
pub fn summarize_j(entries: &[JComparisonEntry], dimension: u32) -> Result<JSummary> {
    if entries.is_empty() {
        return Err(Error::Parse("empty comparison panel".into()));
    }
    let mean = entries.iter().map(|e| e.ratio).sum::<Complex>() / entries.len() as f64;
    let spread = entries
        .iter()
        .map(|e| (e.ratio - mean).norm())
        .fold(0.0, f64::max)
        / mean.norm();
    let err = entries.iter().map(|e| e.ratio_error).fold(0.0, f64::max) / mean.norm();
    Ok(JSummary {
        measured_constant: mean,
        relative_spread: spread,
        relative_error: err,
        candidate_constant: Complex::new(0.0, 2.0 * PI).powi(-(dimension as i32)),
    })
}
