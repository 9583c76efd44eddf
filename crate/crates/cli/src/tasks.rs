//! One function per task; each returns the `result` object of the report and,
//! for tabular tasks, the CSV sidecar.

use kreg_core::milnor::MilnorElement;
use kreg_core::regulator::{
    compare_j, ddbar_defect, ddbar_fixtures, descent_defect, j_panel, r_log, regulator_pairings,
    steinberg_fixture, summarize_j, CycleWithFunctions, RegulatorKind, SteinbergFixture,
};
use kreg_core::tame::{boundary_pi, gersten_boundary, padic_tame, weil_reciprocity_defect};
use kreg_core::torus::{convergence_study, quad_integrate, ConvergenceRow};
use kreg_core::{Complex, QuadratureGrid, Torus, UniformizerChoice, ZeroTest};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::job::{
    build_forms, payload, CompareJPayload, ConvergePayload, ConvergenceTest, DdbarPayload,
    DescentPayload, GerstenPayload, JobFile, NormalizePayload, ReciprocityPayload,
    RegulatorPayload, TamePayload, Task,
};

/// Fixed column layouts of the CSV sidecars.
pub const REGULATOR_COLUMNS: [&str; 7] = [
    "input", "form_label", "value", "imag_residue", "error_estimate", "N", "delta",
];
pub const COMPARE_J_COLUMNS: [&str; 9] = [
    "input", "form_label", "r_beilinson_re", "r_beilinson_im", "r_log_j_re", "r_log_j_im",
    "ratio_re", "ratio_im", "ratio_error",
];
pub const CONVERGE_COLUMNS: [&str; 6] = ["test", "form", "N", "delta", "value", "error_estimate"];

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct TaskOutput {
    pub result: Value,
    pub table: Option<Table>,
}

pub struct Context {
    pub grid: Option<QuadratureGrid>,
    pub lattice_r: Option<usize>,
}

impl Context {
    fn grid(&self) -> Result<QuadratureGrid, CliError> {
        self.grid
            .ok_or_else(|| CliError::internal("integration task started without a grid"))
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(CliError::internal)
}

fn exact(result: Value) -> Result<TaskOutput, CliError> {
    Ok(TaskOutput {
        result,
        table: None,
    })
}

pub fn run(job: &JobFile, ctx: &Context) -> Result<TaskOutput, CliError> {
    let raw = job.payload.as_ref();
    let r = ctx.lattice_r;
    match job.task {
        Task::Normalize => normalize(payload(raw, r)?),
        Task::Tame => tame(payload(raw, r)?),
        Task::Gersten => gersten(payload(raw, r)?),
        Task::Reciprocity => reciprocity(payload(raw, r)?),
        Task::Rlog => regulator(RegulatorKind::Log, payload(raw, r)?, ctx),
        Task::Rbeilinson => regulator(RegulatorKind::Beilinson, payload(raw, r)?, ctx),
        Task::CompareJ => compare(payload(raw, r)?, ctx),
        Task::Ddbar => ddbar(payload(raw, r)?, ctx),
        Task::Descent => descent(payload(raw, r)?),
        Task::Converge => converge(payload(raw, r)?),
    }
}

fn element_value(x: &MilnorElement) -> Result<Value, CliError> {
    Ok(json!({
        "field": x.field(),
        "degree": x.degree(),
        "terms": to_value(x)?,
        "display": x.to_string(),
    }))
}

fn normalize(p: NormalizePayload) -> Result<TaskOutput, CliError> {
    let x = MilnorElement::from_raw_terms(&p.element, p.field, p.degree)?;
    let verdict = match x.is_zero() {
        ZeroTest::Zero => "zero",
        ZeroTest::UnknownNonzero => "unknown_nonzero",
    };
    exact(json!({ "result": verdict, "normal_form": element_value(&x)? }))
}

fn tame(p: TamePayload) -> Result<TaskOutput, CliError> {
    let x = MilnorElement::from_raw_terms(&p.element, None, None)?;
    match (p.place, p.prime) {
        (Some(place), None) => {
            let u = match p.unit {
                Some(unit) => UniformizerChoice::new(place.clone(), unit)?,
                None => UniformizerChoice::canonical(place.clone()),
            };
            let k = boundary_pi(&x, &u)?;
            exact(json!({
                "place": place,
                "uniformizer_unit": u.unit_multiplier(),
                "del0": element_value(k.plain())?,
                "del_nu": element_value(k.pi_part())?,
            }))
        }
        (None, Some(prime)) => {
            if p.unit.is_some() {
                return Err(CliError::schema("a unit multiplier applies only to a place of Q(t)"));
            }
            let residue = padic_tame(&x, prime)?;
            exact(json!({ "prime": prime, "del_nu": element_value(&residue)? }))
        }
        _ => Err(CliError::schema("give exactly one of place or prime")),
    }
}

fn gersten(p: GerstenPayload) -> Result<TaskOutput, CliError> {
    let x = MilnorElement::from_raw_terms(&p.element, None, None)?;
    let chain = gersten_boundary(&x)?;
    let display: Vec<Value> = chain
        .iter()
        .map(|(place, e)| json!({ "place": place, "display": e.to_string() }))
        .collect();
    exact(json!({ "chain": to_value(&chain)?, "display": display }))
}

fn reciprocity(p: ReciprocityPayload) -> Result<TaskOutput, CliError> {
    let defect = weil_reciprocity_defect(&p.f, &p.g)?;
    exact(json!({ "defect": defect.to_string() }))
}

fn regulator(
    kind: RegulatorKind,
    p: RegulatorPayload,
    ctx: &Context,
) -> Result<TaskOutput, CliError> {
    let grid = ctx.grid()?;
    let cycle = p.cycle.build()?;
    let forms = build_forms(&cycle, &p.forms)?;
    let input = p.input.unwrap_or_else(|| "cycle".into());
    let value = regulator_pairings(kind, &cycle, &forms, &grid)?;
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for e in &value.entries {
        entries.push(json!({
            "input": input,
            "form_label": e.label,
            "value": e.value,
            "imag_residue": e.imag_residue,
            "error_estimate": e.error_estimate,
            "grid": { "N": grid.n(), "delta": grid.mask_radius() },
        }));
        rows.push(vec![
            input.clone(),
            e.label.clone(),
            e.value.to_string(),
            e.imag_residue.to_string(),
            e.error_estimate.to_string(),
            grid.n().to_string(),
            grid.mask_radius().to_string(),
        ]);
    }
    Ok(TaskOutput {
        result: json!({ "kind": value.kind, "entries": entries }),
        table: Some(Table {
            header: REGULATOR_COLUMNS.to_vec(),
            rows,
        }),
    })
}

fn compare(p: CompareJPayload, ctx: &Context) -> Result<TaskOutput, CliError> {
    let grid = ctx.grid()?;
    let cycles: Vec<(String, CycleWithFunctions)> = match (p.cycles, p.panel) {
        (Some(cs), None) => cs
            .into_iter()
            .enumerate()
            .map(|(i, c)| Ok((c.input.unwrap_or_else(|| format!("cycle[{i}]")), c.cycle.build()?)))
            .collect::<Result<_, CliError>>()?,
        (None, Some(torus)) => j_panel(&torus)?
            .into_iter()
            .enumerate()
            .map(|(i, c)| (format!("panel[{i}]"), c))
            .collect(),
        _ => return Err(CliError::schema("give exactly one of cycles or panel")),
    };
    let dimension = cycles.first().map_or(1, |(_, c)| c.dimension());
    if cycles.iter().any(|(_, c)| c.dimension() != dimension) {
        return Err(kreg_core::Error::DegreeMismatch(
            "all cycles of a comparison panel must have the same dimension".into(),
        )
        .into());
    }
    let mut all = Vec::new();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for (input, cycle) in &cycles {
        let forms = build_forms(cycle, &p.forms)?;
        for e in compare_j(cycle, &forms, &grid)? {
            let mut v = to_value(&e)?;
            v["input"] = json!(input);
            entries.push(v);
            rows.push(vec![
                input.clone(),
                e.label.clone(),
                e.r_beilinson.re.to_string(),
                e.r_beilinson.im.to_string(),
                e.r_log_j.re.to_string(),
                e.r_log_j.im.to_string(),
                e.ratio.re.to_string(),
                e.ratio.im.to_string(),
                e.ratio_error.to_string(),
            ]);
            all.push(e);
        }
    }
    let summary = summarize_j(&all, dimension)?;
    Ok(TaskOutput {
        result: json!({ "entries": entries, "summary": to_value(&summary)? }),
        table: Some(Table {
            header: COMPARE_J_COLUMNS.to_vec(),
            rows,
        }),
    })
}

fn ddbar(p: DdbarPayload, ctx: &Context) -> Result<TaskOutput, CliError> {
    let grid = ctx.grid()?;
    let (cycle, eta) = match (p.fixture, p.cycle, p.eta) {
        (Some(i), None, None) => {
            let mut fixtures = ddbar_fixtures()?;
            if i >= fixtures.len() {
                return Err(CliError::schema(format!(
                    "fixture index {i} out of range (0..{})",
                    fixtures.len()
                )));
            }
            fixtures.swap_remove(i)
        }
        (None, Some(cycle), Some(eta)) => (cycle.build()?, eta),
        _ => return Err(CliError::schema("give either fixture, or both cycle and eta")),
    };
    let d = ddbar_defect(&cycle, &eta, &grid)?;
    exact(to_value(&d)?)
}

fn descent(p: DescentPayload) -> Result<TaskOutput, CliError> {
    let f = p.f.build(&p.torus)?;
    let g = p.g.build(&p.torus)?;
    let defect = descent_defect(&f, &g, p.coefficient)?;
    exact(json!({ "defect": defect }))
}

fn converge(p: ConvergePayload) -> Result<TaskOutput, CliError> {
    let c = |[re, im]: [f64; 2]| Complex::new(re, im);
    let torus = Torus::new(c(p.tau), p.r.unwrap_or(kreg_core::torus::DEFAULT_R))?;
    let mut rows: Vec<(String, ConvergenceRow)> = Vec::new();
    let mut extra = json!({});
    match p.test {
        ConvergenceTest::Steinberg => {
            let zeros = match &p.zeros {
                Some(zs) => zs.iter().map(|z| c(*z)).collect(),
                None => SteinbergFixture::standard_zeros(),
            };
            let fx = steinberg_fixture(&torus, &zeros)?;
            let cycle = fx.cycle()?;
            for (label, w) in cycle.default_test_forms()? {
                for row in convergence_study(&p.ns, p.delta0, |g| r_log(&cycle, &w, g))? {
                    rows.push((label.clone(), row));
                }
            }
            let pair = |z: &Complex| [z.re, z.im];
            extra = json!({
                "zeros": fx.zeros.iter().map(pair).collect::<Vec<_>>(),
                "roots": fx.roots.iter().map(pair).collect::<Vec<_>>(),
                "scale": pair(&fx.scale),
            });
        }
        ConvergenceTest::LogSigma => {
            let w0 = c(p.w0.unwrap_or([0.3, 0.2]));
            let integral = |g: &QuadratureGrid| {
                quad_integrate(&torus, g, &[w0], |z| {
                    Ok(Complex::new(torus.ln_abs_sigma(z - w0), 0.0))
                })
            };
            for row in convergence_study(&p.ns, p.delta0, integral)? {
                rows.push(("1".into(), row));
            }
            extra = json!({ "w0": [w0.re, w0.im] });
        }
    }
    let test = serde_json::to_value(p.test)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default();
    let table = Table {
        header: CONVERGE_COLUMNS.to_vec(),
        rows: rows
            .iter()
            .map(|(form, r)| {
                vec![
                    test.clone(),
                    form.clone(),
                    r.n.to_string(),
                    r.delta.to_string(),
                    r.value.to_string(),
                    r.error_estimate.to_string(),
                ]
            })
            .collect(),
    };
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|(form, r)| {
            json!({ "form": form, "N": r.n, "delta": r.delta, "value": r.value, "error_estimate": r.error_estimate })
        })
        .collect();
    Ok(TaskOutput {
        result: json!({ "test": test, "rows": json_rows, "setup": extra }),
        table: Some(table),
    })
}
