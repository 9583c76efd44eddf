//! Job files and the task payload schemas.

use std::collections::BTreeMap;

use kreg_core::exact::{FactoredRational, Place};
use kreg_core::milnor::{FieldTag, RawTerm};
use kreg_core::regulator::{CycleWithFunctions, PointSample, SplitEta};
use kreg_core::torus::{DZ1, DZ2, DZB1, DZB2};
use kreg_core::{
    Complex, EllDivisor, EllipticFunction, Form, ProductTorus, QuadratureGrid, SplitFunction,
    Torus,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Normalize,
    Tame,
    Gersten,
    Reciprocity,
    Rlog,
    Rbeilinson,
    CompareJ,
    Ddbar,
    Descent,
    Converge,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Normalize => "normalize",
            Task::Tame => "tame",
            Task::Gersten => "gersten",
            Task::Reciprocity => "reciprocity",
            Task::Rlog => "rlog",
            Task::Rbeilinson => "rbeilinson",
            Task::CompareJ => "compare-j",
            Task::Ddbar => "ddbar",
            Task::Descent => "descent",
            Task::Converge => "converge",
        }
    }

    /// Tasks that integrate on a grid, and the grid they use when none is given.
    pub fn default_grid(self) -> Option<(usize, f64)> {
        match self {
            Task::Rlog | Task::Rbeilinson | Task::CompareJ => Some((256, 2e-3)),
            Task::Ddbar => Some((48, 5e-3)),
            _ => None,
        }
    }
}

/// The payload is kept as the raw bytes it was read from so that reports
/// echo it verbatim.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    pub task: Task,
    pub payload: Box<RawValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<QuadratureGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl JobFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(CliError::schema)
    }
}

/// Parses a payload after replacing the lattice truncation `R` of every torus
/// object (any object carrying a `tau` key) when an override is given.
pub fn payload<T: DeserializeOwned>(raw: &RawValue, lattice_r: Option<usize>) -> Result<T, CliError> {
    let mut v: Value = serde_json::from_str(raw.get()).map_err(CliError::schema)?;
    if let Some(r) = lattice_r {
        set_lattice_r(&mut v, r);
    }
    serde_json::from_value(v).map_err(CliError::schema)
}

fn set_lattice_r(v: &mut Value, r: usize) {
    match v {
        Value::Object(map) => {
            if map.contains_key("tau") {
                map.insert("R".into(), Value::from(r));
            }
            map.values_mut().for_each(|x| set_lattice_r(x, r));
        }
        Value::Array(xs) => xs.iter_mut().for_each(|x| set_lattice_r(x, r)),
        _ => {}
    }
}

/// Every `R` found next to a `tau`, after overrides.
pub fn lattice_truncations(raw: &RawValue, lattice_r: Option<usize>) -> Vec<usize> {
    fn walk(v: &Value, out: &mut Vec<usize>) {
        match v {
            Value::Object(map) => {
                if map.contains_key("tau") {
                    let r = map.get("R").and_then(Value::as_u64);
                    out.push(r.map_or(kreg_core::torus::DEFAULT_R, |r| r as usize));
                }
                map.values().for_each(|x| walk(x, out));
            }
            Value::Array(xs) => xs.iter().for_each(|x| walk(x, out)),
            _ => {}
        }
    }
    if let Some(r) = lattice_r {
        return vec![r];
    }
    let mut out = Vec::new();
    if let Ok(v) = serde_json::from_str::<Value>(raw.get()) {
        walk(&v, &mut out);
    }
    out.sort_unstable();
    out.dedup();
    out
}

// ---- exact tasks ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizePayload {
    pub element: Vec<RawTerm>,
    pub field: Option<FieldTag>,
    pub degree: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TamePayload {
    pub element: Vec<RawTerm>,
    pub place: Option<Place>,
    /// Unit multiplier `u` of the uniformizer `u·π_canonical`.
    pub unit: Option<FactoredRational>,
    pub prime: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GerstenPayload {
    pub element: Vec<RawTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReciprocityPayload {
    pub f: FactoredRational,
    pub g: FactoredRational,
}

// ---- analytic objects ----

/// `scale · ∏σ(z − zᵢ)^{nᵢ}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionInput {
    pub divisor: EllDivisor,
    pub scale: Option<[f64; 2]>,
}

impl FunctionInput {
    pub fn build(&self, torus: &Torus) -> kreg_core::Result<EllipticFunction> {
        let [re, im] = self.scale.unwrap_or([1.0, 0.0]);
        EllipticFunction::with_scale(self.divisor.clone(), torus.clone(), Complex::new(re, im))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitFunctionInput {
    pub first: Option<FunctionInput>,
    pub second: Option<FunctionInput>,
}

fn unit_coefficient() -> i64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CycleInput {
    Curve {
        torus: Torus,
        functions: Vec<FunctionInput>,
        #[serde(default = "unit_coefficient")]
        coefficient: i64,
    },
    Surface {
        tori: [Torus; 2],
        functions: Vec<SplitFunctionInput>,
        #[serde(default = "unit_coefficient")]
        coefficient: i64,
    },
    Points {
        samples: Vec<PointSample>,
        #[serde(default = "unit_coefficient")]
        coefficient: i64,
    },
}

impl CycleInput {
    pub fn build(&self) -> kreg_core::Result<CycleWithFunctions> {
        match self {
            CycleInput::Curve {
                torus,
                functions,
                coefficient,
            } => {
                let fs = functions
                    .iter()
                    .map(|f| f.build(torus))
                    .collect::<kreg_core::Result<_>>()?;
                CycleWithFunctions::curve(torus.clone(), fs, *coefficient)
            }
            CycleInput::Surface {
                tori: [e1, e2],
                functions,
                coefficient,
            } => {
                let fs = functions
                    .iter()
                    .map(|f| {
                        Ok(SplitFunction {
                            first: f.first.as_ref().map(|g| g.build(e1)).transpose()?,
                            second: f.second.as_ref().map(|g| g.build(e2)).transpose()?,
                        })
                    })
                    .collect::<kreg_core::Result<_>>()?;
                CycleWithFunctions::surface(ProductTorus::new(e1.clone(), e2.clone()), fs, *coefficient)
            }
            CycleInput::Points {
                samples,
                coefficient,
            } => CycleWithFunctions::points(samples.clone(), *coefficient),
        }
    }
}

/// A labelled constant test form: either `a·dz + b·dz̄` on a curve, or a map
/// from monomials such as `"1"`, `"dz1^dzb2"` to complex coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormInput {
    pub label: String,
    pub a: Option<[f64; 2]>,
    pub b: Option<[f64; 2]>,
    #[serde(default)]
    pub terms: BTreeMap<String, [f64; 2]>,
}

fn generator(name: &str) -> Option<usize> {
    match name {
        "dz" | "dz1" => Some(DZ1),
        "dzb" | "dzb1" => Some(DZB1),
        "dz2" => Some(DZ2),
        "dzb2" => Some(DZB2),
        _ => None,
    }
}

impl FormInput {
    pub fn build(&self) -> Result<(String, Form), CliError> {
        let c = |[re, im]: [f64; 2]| Complex::new(re, im);
        let zero = [0.0, 0.0];
        let mut form = Form::one_form(c(self.a.unwrap_or(zero)), c(self.b.unwrap_or(zero)));
        for (monomial, coeff) in &self.terms {
            let mut term = Form::scalar(c(*coeff));
            if monomial != "1" {
                for name in monomial.split('^') {
                    let k = generator(name.trim()).ok_or_else(|| {
                        CliError::Schema(format!("unknown generator {name:?} in form {:?}", self.label))
                    })?;
                    term = term.wedge(&Form::generator(k, Complex::new(1.0, 0.0)));
                }
            }
            form = form + term;
        }
        Ok((self.label.clone(), form))
    }
}

pub fn build_forms(
    cycle: &CycleWithFunctions,
    forms: &Option<Vec<FormInput>>,
) -> Result<Vec<(String, Form)>, CliError> {
    match forms {
        Some(fs) => fs.iter().map(FormInput::build).collect(),
        None => Ok(cycle.default_test_forms()?),
    }
}

// ---- analytic tasks ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegulatorPayload {
    pub cycle: CycleInput,
    /// Name of the cycle in the report rows.
    pub input: Option<String>,
    pub forms: Option<Vec<FormInput>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledCycle {
    pub input: Option<String>,
    pub cycle: CycleInput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareJPayload {
    pub cycles: Option<Vec<LabelledCycle>>,
    /// Built-in panel of six curve cycles on this torus.
    pub panel: Option<Torus>,
    pub forms: Option<Vec<FormInput>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DdbarPayload {
    pub cycle: Option<CycleInput>,
    pub eta: Option<SplitEta>,
    /// Index into the built-in fixtures.
    pub fixture: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentPayload {
    pub torus: Torus,
    pub f: FunctionInput,
    pub g: FunctionInput,
    #[serde(default = "unit_coefficient")]
    pub coefficient: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceTest {
    Steinberg,
    LogSigma,
}

fn default_delta0() -> f64 {
    8e-3
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergePayload {
    pub test: ConvergenceTest,
    pub tau: [f64; 2],
    #[serde(rename = "R")]
    pub r: Option<usize>,
    #[serde(rename = "Ns")]
    pub ns: Vec<usize>,
    #[serde(default = "default_delta0")]
    pub delta0: f64,
    /// Zeros of `f` for the Steinberg test.
    pub zeros: Option<Vec<[f64; 2]>>,
    /// Centre of `log|σ(z − w₀)|` for the log-σ test.
    pub w0: Option<[f64; 2]>,
}
