use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::logsys::{LogEquation, LogRoot, LogSystem, SignedForm};
use super::{admissible_deltas, classify, feasible_orthants, linear_data, Condition, Mode, Options, SignVec};
use crate::algebra::{Affine, FamilyAlgebra};
use crate::diagram::NodePermutation;
use crate::error::EinsteinError;
use crate::linalg::rat::{fmt_rat, pow_i, simplest_between};
use crate::linalg::Rat;

/// A value of the unknown constant for which a metric exists.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    /// Validated by the exact pipeline.
    Exact(Rat),
    /// Irrational root; not revalidated.
    Approx(f64),
    /// Solutions fill an open subset of this interval (`None` = unbounded).
    Continuum { lo: Option<Rat>, hi: Option<Rat> },
}

impl ParamValue {
    /// Representative point, used for ordering.
    fn approx(&self) -> f64 {
        match self {
            ParamValue::Exact(r) => crate::linalg::rat::to_f64(r),
            ParamValue::Approx(x) => *x,
            ParamValue::Continuum { lo, hi } => match (lo, hi) {
                (Some(l), _) => crate::linalg::rat::to_f64(l),
                (None, Some(h)) => crate::linalg::rat::to_f64(h) - 1.0,
                (None, None) => 0.0,
            },
        }
    }
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Exact(r) => f.write_str(&fmt_rat(r)),
            ParamValue::Approx(x) => write!(f, "≈{x:.15}"),
            ParamValue::Continuum { lo, hi } => {
                let lo = lo.as_ref().map_or("-inf".to_string(), fmt_rat);
                let hi = hi.as_ref().map_or("inf".to_string(), fmt_rat);
                write!(f, "within ({lo}, {hi})")
            }
        }
    }
}

impl Serialize for ParamValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSolution {
    pub param: String,
    pub values: Vec<ParamValue>,
    /// Values at which (P) is solvable but only in orthants that violate (L).
    pub sign_blocked: Vec<ParamValue>,
    /// First condition that fails along the whole line, when `values` is empty.
    pub failure: Option<Condition>,
    pub notes: Vec<String>,
}

impl ParamSolution {
    pub fn exact_values(&self) -> Vec<Rat> {
        self.values.iter().filter_map(|v| if let ParamValue::Exact(r) = v { Some(r.clone()) } else { None }).collect()
    }
}

fn split(a: &Affine, param: &str) -> (Rat, Rat) {
    (a.constant.clone(), a.terms.get(param).cloned().unwrap_or_else(Rat::zero))
}

/// Values of the single parameter `param` for which a diagonal (or σ-diagonal) metric with
/// `Ric = ½k·id` exists. The parameter joins the unknowns of (P); every rational answer is
/// substituted back and rerun through the exact pipeline.
pub fn parameter_solve(
    family: &FamilyAlgebra,
    param: &str,
    sigma: Option<&NodePermutation>,
    k: &Rat,
    opts: &Options,
) -> Result<ParamSolution, EinsteinError> {
    let params = family.params();
    if params.len() != 1 || !params.contains(param) {
        return Err(EinsteinError::Invalid(format!("expected exactly the parameter `{param}`, found {params:?}")));
    }
    let d = family.diagram();
    let m = d.m();
    let mut notes = Vec::new();
    let none = |failure: Condition, notes: Vec<String>| ParamSolution {
        param: param.to_string(),
        values: Vec::new(),
        sign_blocked: Vec::new(),
        failure: Some(failure),
        notes,
    };
    let c: Vec<(Rat, Rat)> = family.coeffs().iter().map(|a| split(a, param)).collect();
    let ct: Vec<(Rat, Rat)> = match sigma {
        None => c.clone(),
        Some(s) => {
            let action = d.sigma_arrow_action(s)?;
            let mut out = vec![(Rat::zero(), Rat::zero()); m];
            for r in 0..m {
                let (u, v) = c[r].clone();
                out[action.perm[r]] = if action.sign[r] < 0 { (-u, -v) } else { (u, v) };
            }
            out
        }
    };
    let lin = linear_data(d, sigma, k)?;
    let Some(set) = lin.set.clone() else {
        notes.push("condition K fails for every value".into());
        return Ok(none(Condition::K, notes));
    };
    if !set.identically_zero_coordinates().is_empty() {
        notes.push("condition H fails for every value".into());
        return Ok(none(Condition::H, notes));
    }
    let orthants = feasible_orthants(&set, opts.orthant_cap)?;
    // cells of the parameter line on which every constant keeps its sign
    let mut cuts: Vec<Rat> = c.iter().filter(|(_, v)| !v.is_zero()).map(|(u, v)| -u / v).collect();
    cuts.sort();
    cuts.dedup();
    let mut cells: Vec<(Option<Rat>, Option<Rat>)> = Vec::new();
    if cuts.is_empty() {
        cells.push((None, None));
    } else {
        cells.push((None, Some(cuts[0].clone())));
        for w in cuts.windows(2) {
            cells.push((Some(w[0].clone()), Some(w[1].clone())));
        }
        cells.push((Some(cuts.last().unwrap().clone()), None));
    }
    let dim = set.dim();
    let mut found: Vec<ParamValue> = Vec::new();
    let mut blocked: Vec<ParamValue> = Vec::new();
    for (lo, hi) in &cells {
        let sample = match (lo, hi) {
            (None, None) => Rat::zero(),
            (Some(l), None) => l.floor() + Rat::one(),
            (None, Some(h)) => h.ceil() - Rat::one(),
            (Some(l), Some(h)) => simplest_between(l, h),
        };
        let at = |(u, v): &(Rat, Rat)| u + v * &sample;
        let shift = match sigma {
            None => SignVec::zeros(m),
            Some(_) => {
                SignVec::new(c.iter().zip(&ct).map(|(x, y)| at(x).is_negative() ^ at(y).is_negative()).collect())
            }
        };
        for (orthant, _) in &orthants {
            let signs_ok = !admissible_deltas(d, &orthant.add(&shift), sigma, opts.kernel_cap)?.is_empty();
            let out = if signs_ok { &mut found } else { &mut blocked };
            let mut sys = LogSystem::new(dim + 1);
            for j in 0..m {
                let (c0, mut coef) = set.coordinate(j);
                coef.push(Rat::zero());
                sys.forms.push(SignedForm { c0, coef, negative: orthant.get(j) });
            }
            let mut c_form = vec![None; m];
            for (j, (u, v)) in c.iter().enumerate() {
                if !v.is_zero() {
                    let mut coef = vec![Rat::zero(); dim];
                    coef.push(v.clone());
                    c_form[j] = Some(sys.forms.len());
                    sys.forms.push(SignedForm { c0: u.clone(), coef, negative: at(&c[j]).is_negative() });
                }
            }
            for a in &lin.alphas {
                let mut exps = a.clone();
                exps.resize(sys.forms.len(), 0);
                let mut rhs = Rat::one();
                for (j, &e) in a.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match c_form[j] {
                        Some(f) => exps[f] -= 2 * e,
                        None => rhs *= pow_i(&(&c[j].0 * &c[j].0), e),
                    }
                }
                sys.eqs.push(LogEquation { exps, rhs });
            }
            if k.is_zero() && dim > 0 {
                let (_, mut coef) = set.coordinate(0);
                coef.push(Rat::zero());
                sys.linear.push((coef, if orthant.get(0) { -Rat::one() } else { Rat::one() }));
            }
            let sol = sys.solve(&opts.solve);
            if signs_ok && sol.is_empty() && !sol.exhaustive {
                notes.push(format!("orthant {orthant}: numeric search found no root"));
            }
            let moves = |v: &[f64]| v[dim].abs() > 1e-6 * v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if (sol.free_dim > 0 && sol.directions.iter().any(|v| !v[dim].is_zero()))
                || (!sol.roots.is_empty() && sol.tangents.iter().any(|v| moves(v)))
            {
                out.push(ParamValue::Continuum { lo: lo.clone(), hi: hi.clone() });
                continue;
            }
            for root in &sol.roots {
                match root {
                    LogRoot::Exact(y) => out.push(ParamValue::Exact(y[dim].clone())),
                    LogRoot::Approx(y) => out.push(ParamValue::Approx(y[dim])),
                }
            }
        }
    }
    // validate and deduplicate
    let sign_blocked = dedup(blocked);
    let mut exact: Vec<Rat> = Vec::new();
    let mut approx: Vec<f64> = Vec::new();
    let mut ranges: Vec<ParamValue> = Vec::new();
    for v in found {
        match v {
            ParamValue::Exact(r) => {
                if exact.contains(&r) {
                    continue;
                }
                let values: BTreeMap<String, Rat> = [(param.to_string(), r.clone())].into();
                let ok = match family.substitute(&values) {
                    Ok(alg) => {
                        let mode = sigma.map_or(Mode::Diagonal, |s| Mode::Sigma(s.clone()));
                        classify(&alg, mode, k, opts)?.is_found()
                    }
                    Err(e) => {
                        notes.push(format!("{param} = {}: {e}", fmt_rat(&r)));
                        false
                    }
                };
                if ok {
                    exact.push(r);
                } else {
                    notes.push(format!("{param} = {} rejected by the exact pipeline", fmt_rat(&r)));
                }
            }
            ParamValue::Approx(x) => {
                if !approx.iter().any(|y| (x - y).abs() < 1e-9 * (1.0 + x.abs())) {
                    approx.push(x);
                }
            }
            r @ ParamValue::Continuum { .. } => {
                if !ranges.contains(&r) {
                    ranges.push(r);
                }
            }
        }
    }
    exact.sort();
    approx.sort_by(f64::total_cmp);
    let mut values: Vec<ParamValue> = exact.into_iter().map(ParamValue::Exact).collect();
    values.extend(approx.into_iter().map(ParamValue::Approx));
    values.extend(ranges);
    let failure = match (values.is_empty(), sign_blocked.is_empty()) {
        (false, _) => None,
        (true, false) => Some(Condition::L),
        (true, true) => Some(Condition::P),
    };
    Ok(ParamSolution { param: param.to_string(), values, sign_blocked, failure, notes })
}

fn dedup(values: Vec<ParamValue>) -> Vec<ParamValue> {
    let mut out: Vec<ParamValue> = Vec::new();
    for v in values {
        let dup = out.iter().any(|w| match (&v, w) {
            (ParamValue::Approx(x), ParamValue::Approx(y)) => (x - y).abs() < 1e-9 * (1.0 + x.abs()),
            _ => &v == w,
        });
        if !dup {
            out.push(v);
        }
    }
    out.sort_by(|a, b| a.approx().total_cmp(&b.approx()));
    out
}
