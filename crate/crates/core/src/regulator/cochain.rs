use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{EllipticFunction, Form, SplitFunction, DZ1, DZ2};

/// `π_p(ω) = (ω + (−1)^p ω̄)/2`, the projection onto `(2πi)^p ℝ`-valued forms.
pub fn pi_p(omega: &Form, p: i32) -> Form {
    omega.pi_p(p)
}

/// `π_p(df_{i₁}/f_{i₁} ∧ ⋯)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiFactor {
    pub p: i32,
    pub indices: Vec<usize>,
}

/// `coef · log|f_j| · π_{p₁}(…) ∧ π_{p₂}(…) ∧ ⋯`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct STerm {
    pub coef: f64,
    pub log_index: usize,
    pub factors: Vec<PiFactor>,
}

/// A cochain `(f, s)` of the cone complex of weight `p`, kept structurally:
/// `f` is the wedge `df_{i₁}/f_{i₁} ∧ ⋯` over `f_part` (absent means 0) and `s`
/// is a sum of [`STerm`]s. Values come from pointwise `log|f_i|` and `df_i/f_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeligneCochain {
    pub weight: i32,
    pub f_part: Option<Vec<usize>>,
    pub s_part: Vec<STerm>,
}

/// Pointwise data of a list of functions: `log|f_i|` and `df_i/f_i` as forms.
#[derive(Clone, Debug, PartialEq)]
pub struct PointData {
    pub logs: Vec<f64>,
    pub dlogs: Vec<Form>,
}

impl PointData {
    pub fn on_curve(functions: &[EllipticFunction], z: Complex) -> Result<Self> {
        let logs = functions
            .iter()
            .map(|f| f.log_abs(z))
            .collect::<Result<_>>()?;
        let dlogs = functions
            .iter()
            .map(|f| Ok(Form::generator(DZ1, f.dlog(z)?)))
            .collect::<Result<_>>()?;
        Ok(PointData { logs, dlogs })
    }

    pub fn on_surface(functions: &[SplitFunction], z1: Complex, z2: Complex) -> Result<Self> {
        let logs = functions
            .iter()
            .map(|f| f.log_abs(z1, z2))
            .collect::<Result<_>>()?;
        let dlogs = functions
            .iter()
            .map(|f| {
                let (a, b) = f.dlog(z1, z2)?;
                Ok(Form::generator(DZ1, a) + Form::generator(DZ2, b))
            })
            .collect::<Result<_>>()?;
        Ok(PointData { logs, dlogs })
    }

    fn wedge_dlogs(&self, indices: &[usize]) -> Form {
        indices
            .iter()
            .fold(Form::real(1.0), |acc, &i| acc.wedge(&self.dlogs[i]))
    }
}

impl DeligneCochain {
    /// `(df_i/f_i, log|f_i|)` of weight 1.
    pub fn singleton(i: usize) -> Self {
        DeligneCochain {
            weight: 1,
            f_part: Some(vec![i]),
            s_part: vec![STerm {
                coef: 1.0,
                log_index: i,
                factors: Vec::new(),
            }],
        }
    }

    /// `(0, log|f_i|)` of the given weight.
    pub fn s_only(weight: i32, i: usize) -> Self {
        DeligneCochain {
            weight,
            f_part: None,
            s_part: vec![STerm {
                coef: 1.0,
                log_index: i,
                factors: Vec::new(),
            }],
        }
    }

    fn f_degree(&self) -> usize {
        self.f_part.as_ref().map_or(0, Vec::len)
    }

    /// The product `f_p ∧ f_q`, `(−1)^{deg f_p} π_p(f_p) ∧ s_q + s_p ∧ π_q(f_q)`;
    /// `s_p · s_q` contributes nothing.
    pub fn cup(&self, other: &DeligneCochain) -> DeligneCochain {
        let f_part = match (&self.f_part, &other.f_part) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        let mut s_part = Vec::new();
        if let Some(fp) = &self.f_part {
            let sign = if self.f_degree().is_multiple_of(2) { 1.0 } else { -1.0 };
            for t in &other.s_part {
                let mut factors = vec![PiFactor {
                    p: self.weight,
                    indices: fp.clone(),
                }];
                factors.extend(t.factors.iter().cloned());
                s_part.push(STerm {
                    coef: sign * t.coef,
                    log_index: t.log_index,
                    factors,
                });
            }
        }
        if let Some(fq) = &other.f_part {
            for t in &self.s_part {
                let mut factors = t.factors.clone();
                factors.push(PiFactor {
                    p: other.weight,
                    indices: fq.clone(),
                });
                s_part.push(STerm {
                    coef: t.coef,
                    log_index: t.log_index,
                    factors,
                });
            }
        }
        DeligneCochain {
            weight: self.weight + other.weight,
            f_part,
            s_part,
        }
    }

    /// `c₀ ∪ c₁ ∪ ⋯ ∪ c_{m−1}` of the singleton cochains, left to right.
    pub fn iterated_singletons(m: usize) -> Option<DeligneCochain> {
        (0..m)
            .map(DeligneCochain::singleton)
            .reduce(|acc, c| acc.cup(&c))
    }

    pub fn eval_f(&self, data: &PointData) -> Form {
        self.f_part
            .as_ref()
            .map_or(Form::zero(), |idx| data.wedge_dlogs(idx))
    }

    pub fn eval_s(&self, data: &PointData) -> Form {
        self.s_part.iter().fold(Form::zero(), |acc, t| {
            let wedge = t.factors.iter().fold(Form::real(1.0), |w, fac| {
                w.wedge(&data.wedge_dlogs(&fac.indices).pi_p(fac.p))
            });
            acc + wedge.scale_real(t.coef * data.logs[t.log_index])
        })
    }

    /// Whether `s` is `ℝ(p−1)`-valued at this point, i.e. `π_{p−1}(s) = s`.
    pub fn s_has_real_structure(&self, data: &PointData, tol: f64) -> bool {
        let s = self.eval_s(data);
        (s.pi_p(self.weight - 1) - s).max_abs() <= tol * (1.0 + s.max_abs())
    }
}

/// The closed ξ-formula for `m ≤ 4` functions at one point:
///
/// - `ξ(f₁) = log|f₁|`
/// - `ξ(f₁,f₂) = log|f₁|π₁(F₂) − log|f₂|π₁(F₁)`
/// - `ξ(f₁,f₂,f₃) = log|f₁|π₁(F₂)∧π₁(F₃) − log|f₂|π₁(F₁)∧π₁(F₃) + log|f₃|π₂(F₁∧F₂)`
/// - `ξ(f₁,…,f₄) = log|f₁|π₁(F₂)∧π₁(F₃)∧π₁(F₄) − log|f₂|π₁(F₁)∧π₁(F₃)∧π₁(F₄)
///   + log|f₃|π₂(F₁∧F₂)∧π₁(F₄) − log|f₄|π₃(F₁∧F₂∧F₃)`
///
/// with `F_i = df_i/f_i`.
pub fn xi_from_data(data: &PointData) -> Result<Form> {
    let l = &data.logs;
    let f = &data.dlogs;
    let p1 = |i: usize| f[i].pi_p(1);
    Ok(match l.len() {
        1 => Form::real(l[0]),
        2 => p1(1).scale_real(l[0]) - p1(0).scale_real(l[1]),
        3 => {
            p1(1).wedge(&p1(2)).scale_real(l[0]) - p1(0).wedge(&p1(2)).scale_real(l[1])
                + f[0].wedge(&f[1]).pi_p(2).scale_real(l[2])
        }
        4 => {
            p1(1).wedge(&p1(2)).wedge(&p1(3)).scale_real(l[0])
                - p1(0).wedge(&p1(2)).wedge(&p1(3)).scale_real(l[1])
                + f[0].wedge(&f[1]).pi_p(2).wedge(&p1(3)).scale_real(l[2])
                - f[0].wedge(&f[1]).wedge(&f[2]).pi_p(3).scale_real(l[3])
        }
        m => return Err(Error::UnsupportedArity(m)),
    })
}

fn check_arity(m: usize) -> Result<()> {
    if (1..=4).contains(&m) {
        Ok(())
    } else {
        Err(Error::UnsupportedArity(m))
    }
}

/// `ξ(f₁,…,f_m)(z)` on a curve.
pub fn xi_form(functions: &[EllipticFunction], z: Complex) -> Result<Form> {
    check_arity(functions.len())?;
    xi_from_data(&PointData::on_curve(functions, z)?)
}

/// `ξ(f₁,…,f_m)(z₁, z₂)` on a product of curves.
pub fn xi_form_split(functions: &[SplitFunction], z1: Complex, z2: Complex) -> Result<Form> {
    check_arity(functions.len())?;
    xi_from_data(&PointData::on_surface(functions, z1, z2)?)
}
