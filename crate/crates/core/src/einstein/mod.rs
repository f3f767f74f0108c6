//! Diagonal and σ-diagonal metrics with `Ric = ½k·id` on nice nilpotent Lie algebras.

mod logsys;
mod param;
mod recover;
mod ricci;
mod signature;

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use logsys::{LogEquation, LogRoot, LogSolution, LogSystem, SignedForm, SolveOptions};
pub use param::{parameter_solve, ParamSolution, ParamValue};
pub use recover::{
    recover_metric, sign_condition, DiagonalMetric, Metric, MetricFamily, Recovered, SigmaMetric, Values,
};
pub use ricci::{metric_for, oracle_residual, oracle_ricci_operator, ricci_diagonal, ricci_sigma, x_diagonal, x_sigma};
pub use signature::{halved_signatures, sigma_signature, sigma_signature_from_signs, sorted_signatures, SignVec};

use crate::algebra::NiceLieAlgebra;
use crate::diagram::{NiceDiagram, NodePermutation};
use crate::error::EinsteinError;
use crate::linalg::rat::{fmt_rat, logsign, pow_i, primitive_integer, to_f64};
use crate::linalg::{
    f2_solve_all, kernel_basis, solve_affine, strict_feasible, AffineSet, MatF2, MatQ, Rat, StrictIneq, VecQ,
    DEFAULT_KERNEL_CAP,
};

/// Default bound on the oracle residual of a floating-point certificate.
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_ORTHANT_CAP: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", content = "sigma", rename_all = "lowercase")]
pub enum Mode {
    Diagonal,
    Sigma(NodePermutation),
}

impl Mode {
    pub fn sigma(&self) -> Option<&NodePermutation> {
        match self {
            Mode::Diagonal => None,
            Mode::Sigma(s) => Some(s),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Diagonal => f.write_str("diagonal"),
            Mode::Sigma(s) => write!(f, "sigma{s}"),
        }
    }
}

/// The four conditions, in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    K,
    H,
    L,
    P,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Condition::K => "K",
            Condition::H => "H",
            Condition::L => "L",
            Condition::P => "P",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub solve: SolveOptions,
    pub tol: f64,
    pub orthant_cap: usize,
    pub kernel_cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            tol: DEFAULT_TOL,
            orthant_cap: DEFAULT_ORTHANT_CAP,
            kernel_cap: DEFAULT_KERNEL_CAP,
        }
    }
}

/// One sign pattern of `X` that passes every condition, with a verified metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EinsteinCertificate {
    pub x: Values,
    #[serde(serialize_with = "ser_rat")]
    pub k: Rat,
    /// `logsign X`.
    pub orthant: SignVec,
    /// Every admissible `δ` for this orthant.
    pub deltas: Vec<SignVec>,
    /// Metric for `deltas[0]`.
    pub metric: Metric,
    pub family: MetricFamily,
    /// Dimension of the solution set of `X` in this orthant after normalization.
    pub x_free_dim: usize,
    /// Largest entry of `|Ric − ½k·id|` from the Koszul oracle.
    pub residual: f64,
    pub exact: bool,
}

impl EinsteinCertificate {
    /// The metric with the same `|g|` and sign pattern `delta`, which must be listed in `deltas`.
    pub fn metric_with(&self, delta: &SignVec) -> Option<Metric> {
        if !self.deltas.contains(delta) {
            return None;
        }
        let g = self.metric.g().with_signs(delta);
        Some(match &self.metric {
            Metric::Diagonal(_) => Metric::Diagonal(DiagonalMetric { g }),
            Metric::Sigma(m) => Metric::Sigma(SigmaMetric { sigma: m.sigma.clone(), g }),
        })
    }
}

fn ser_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

/// Admissible sign patterns of the metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignatureReport {
    pub full: Vec<SignVec>,
    /// `None` when the set is not closed under complement (`k ≠ 0`).
    pub half: Option<Vec<SignVec>>,
    pub signatures: Vec<(SignVec, (usize, usize))>,
}

impl SignatureReport {
    /// Full set grouped by `(p, q)`, largest `p` first.
    pub fn by_signature(&self) -> Vec<((usize, usize), Vec<SignVec>)> {
        let mut map: BTreeMap<std::cmp::Reverse<(usize, usize)>, Vec<SignVec>> = BTreeMap::new();
        for (d, pq) in &self.signatures {
            map.entry(std::cmp::Reverse(*pq)).or_default().push(d.clone());
        }
        map.into_iter()
            .map(|(k, mut v)| {
                v.sort();
                (k.0, v)
            })
            .collect()
    }

    pub fn set(&self, p: usize, q: usize) -> Vec<SignVec> {
        self.by_signature().into_iter().find(|(pq, _)| *pq == (p, q)).map(|(_, v)| v).unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Outcome {
    Found { certificates: Vec<EinsteinCertificate>, report: SignatureReport },
    Failed { condition: Condition, detail: String, numeric: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub mode: Mode,
    #[serde(serialize_with = "ser_rat")]
    pub k: Rat,
    pub outcome: Outcome,
    pub notes: Vec<String>,
}

impl Classification {
    pub fn is_found(&self) -> bool {
        matches!(self.outcome, Outcome::Found { .. })
    }

    pub fn failed_at(&self) -> Option<Condition> {
        match &self.outcome {
            Outcome::Failed { condition, .. } => Some(*condition),
            Outcome::Found { .. } => None,
        }
    }

    pub fn report(&self) -> Option<&SignatureReport> {
        match &self.outcome {
            Outcome::Found { report, .. } => Some(report),
            Outcome::Failed { .. } => None,
        }
    }

    pub fn certificates(&self) -> &[EinsteinCertificate] {
        match &self.outcome {
            Outcome::Found { certificates, .. } => certificates,
            Outcome::Failed { .. } => &[],
        }
    }

    pub fn half(&self) -> Option<&[SignVec]> {
        self.report().and_then(|r| r.half.as_deref())
    }
}

/// Linear part of the problem: the set of admissible `X` and the exponent vectors of (P).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearData {
    /// `None` when (K) has no solution.
    pub set: Option<AffineSet>,
    /// Integer basis of `ker ᵀM` (σ-invariant part in σ mode).
    pub alphas: Vec<Vec<i64>>,
}

/// `ᵀM` stacked with `X_r = X_{σr}` in σ mode.
fn k_system(d: &NiceDiagram, sigma: Option<&NodePermutation>, k: &Rat) -> Result<(MatQ, VecQ), EinsteinError> {
    let rm = d.root_matrix();
    let m = d.m();
    let mut rows: Vec<VecQ> = rm.q.transpose().rows_vec();
    let mut rhs = vec![k.clone(); d.n()];
    if let Some(s) = sigma {
        let action = d.sigma_arrow_action(s)?;
        for r in 0..m {
            let p = action.perm[r];
            if r < p {
                let mut row = vec![Rat::zero(); m];
                row[r] = Rat::one();
                row[p] = -Rat::one();
                rows.push(row);
                rhs.push(Rat::zero());
            }
        }
    }
    Ok((MatQ::from_rows_with_cols(rows, m), rhs))
}

trait RowsVec {
    fn rows_vec(&self) -> Vec<VecQ>;
}

impl RowsVec for MatQ {
    fn rows_vec(&self) -> Vec<VecQ> {
        (0..self.rows()).map(|r| self.row(r).to_vec()).collect()
    }
}

pub fn linear_data(d: &NiceDiagram, sigma: Option<&NodePermutation>, k: &Rat) -> Result<LinearData, EinsteinError> {
    let (a, b) = k_system(d, sigma, k)?;
    let alphas = kernel_basis(&a)
        .iter()
        .map(|v| primitive_integer(v).iter().map(|x| x.to_i64().expect("small exponent")).collect())
        .collect();
    Ok(LinearData { set: solve_affine(&a, &b), alphas })
}

/// `Σ_j α_ij (log|X_j| − 2 log|c_j|)` for each exponent vector.
pub fn condition_p_residual(x: &[f64], c: &[Rat], alphas: &[Vec<i64>]) -> Vec<f64> {
    alphas
        .iter()
        .map(|a| {
            a.iter().zip(x).zip(c).map(|((&e, xi), ci)| e as f64 * (xi.abs().ln() - 2.0 * to_f64(ci).abs().ln())).sum()
        })
        .collect()
}

/// Exact form of (P): `∏ |X_j|^{α_ij} = ∏ |c_j|^{2α_ij}`.
pub fn condition_p_holds(x: &[Rat], c: &[Rat], alphas: &[Vec<i64>]) -> bool {
    alphas.iter().all(|a| {
        let (l, r) = a
            .iter()
            .zip(x)
            .zip(c)
            .filter(|((e, _), _)| **e != 0)
            .fold((Rat::one(), Rat::one()), |(l, r), ((&e, xi), ci)| {
                (l * pow_i(&xi.abs(), e), r * pow_i(&(ci * ci), e))
            });
        l == r
    })
}

/// Sign patterns of `X` realised on the open set, each with a witness; lexicographic order.
pub fn feasible_orthants(set: &AffineSet, cap: usize) -> Result<Vec<(SignVec, VecQ)>, EinsteinError> {
    let m = set.ambient_dim();
    let mut out = Vec::new();
    let mut prefix: Vec<bool> = Vec::with_capacity(m);
    fn ineq(set: &AffineSet, j: usize, neg: bool) -> StrictIneq {
        let (c0, coef) = set.coordinate(j);
        if neg {
            StrictIneq::new(coef.into_iter().map(|x| -x).collect(), -c0)
        } else {
            StrictIneq::new(coef, c0)
        }
    }
    fn rec(
        set: &AffineSet,
        prefix: &mut Vec<bool>,
        ineqs: &mut Vec<StrictIneq>,
        out: &mut Vec<(SignVec, VecQ)>,
        cap: usize,
    ) -> Result<(), EinsteinError> {
        let j = prefix.len();
        if j == set.ambient_dim() {
            let params = strict_feasible(ineqs, set.dim()).expect("checked on the way down");
            if out.len() >= cap {
                return Err(EinsteinError::OrthantCap { cap });
            }
            out.push((SignVec::new(prefix.clone()), set.point(&params)));
            return Ok(());
        }
        for neg in [false, true] {
            ineqs.push(ineq(set, j, neg));
            if strict_feasible(ineqs, set.dim()).is_some() {
                prefix.push(neg);
                rec(set, prefix, ineqs, out, cap)?;
                prefix.pop();
            }
            ineqs.pop();
        }
        Ok(())
    }
    rec(set, &mut prefix, &mut Vec::new(), &mut out, cap)?;
    Ok(out)
}

/// All `δ` with `M₂δ = e` (σ-invariant ones in σ mode).
pub fn admissible_deltas(
    d: &NiceDiagram,
    e: &SignVec,
    sigma: Option<&NodePermutation>,
    cap: usize,
) -> Result<Vec<SignVec>, EinsteinError> {
    let m2 = d.root_matrix().f2;
    match sigma {
        None => Ok(f2_solve_all(&m2, e.bits(), cap)?.into_iter().map(SignVec::new).collect()),
        Some(s) => {
            let orbits = s.orbits();
            let rows: Vec<Vec<bool>> = (0..m2.rows())
                .map(|r| orbits.iter().map(|o| o.iter().fold(false, |acc, &i| acc ^ m2.get(r, i - 1))).collect())
                .collect();
            let mb = MatF2::from_rows(&rows, orbits.len());
            let sols = f2_solve_all(&mb, e.bits(), cap)?;
            Ok(sols
                .into_iter()
                .map(|u| {
                    let mut bits = vec![false; d.n()];
                    for (o, &b) in orbits.iter().zip(&u) {
                        for &i in o {
                            bits[i - 1] = b;
                        }
                    }
                    SignVec::new(bits)
                })
                .collect())
        }
    }
}

/// (P) on one orthant as a log system in the parameters of `set`.
fn p_system(set: &AffineSet, orthant: &SignVec, alphas: &[Vec<i64>], c: &[Rat], k: &Rat) -> LogSystem {
    let d = set.dim();
    let mut sys = LogSystem::new(d);
    for j in 0..set.ambient_dim() {
        let (c0, coef) = set.coordinate(j);
        sys.forms.push(SignedForm { c0, coef, negative: orthant.get(j) });
    }
    for a in alphas {
        let rhs =
            a.iter().zip(c).fold(Rat::one(), |acc, (&e, ci)| if e == 0 { acc } else { acc * pow_i(&(ci * ci), e) });
        sys.eqs.push(LogEquation { exps: a.clone(), rhs });
    }
    if k.is_zero() && d > 0 {
        // scale so that X_1 = ±1
        let (_, coef) = set.coordinate(0);
        let v = if orthant.get(0) { -Rat::one() } else { Rat::one() };
        sys.linear.push((coef, v));
    }
    sys
}

fn x_at(set: &AffineSet, root: &LogRoot) -> Values {
    match root {
        LogRoot::Exact(t) => Values::Exact(set.point(t)),
        LogRoot::Approx(t) => Values::Approx(set.point_f64(t)),
    }
}

/// Oracle check of a recovered metric.
fn verify(a: &NiceLieAlgebra, metric: &Metric, k: &Rat) -> Result<f64, EinsteinError> {
    Ok(match metric.g() {
        Values::Exact(g) => oracle_residual(a, g, metric.sigma(), k)?,
        Values::Approx(g) => oracle_residual(a, g, metric.sigma(), &to_f64(k))?,
    })
}

fn flat_abelian(a: &NiceLieAlgebra, mode: Mode, k: &Rat, opts: &Options) -> Result<Classification, EinsteinError> {
    if !k.is_zero() {
        return Ok(Classification {
            mode,
            k: k.clone(),
            outcome: Outcome::Failed {
                condition: Condition::K,
                detail: "abelian algebras are flat".into(),
                numeric: false,
            },
            notes: Vec::new(),
        });
    }
    let sigma = mode.sigma().cloned();
    let deltas = admissible_deltas(a.diagram(), &SignVec::zeros(0), sigma.as_ref(), opts.kernel_cap)?;
    let recovered = recover_metric(a, &Values::Exact(Vec::new()), &deltas[0], sigma.as_ref())?;
    let cert = EinsteinCertificate {
        x: Values::Exact(Vec::new()),
        k: k.clone(),
        orthant: SignVec::zeros(0),
        deltas: deltas.clone(),
        metric: recovered.metric,
        family: recovered.family,
        x_free_dim: 0,
        residual: 0.0,
        exact: true,
    };
    let report = build_report(&deltas, sigma.as_ref(), true, &cert)?;
    Ok(Classification {
        mode,
        k: k.clone(),
        outcome: Outcome::Found { certificates: vec![cert], report },
        notes: Vec::new(),
    })
}

fn build_report(
    full: &[SignVec],
    sigma: Option<&NodePermutation>,
    halve: bool,
    cert: &EinsteinCertificate,
) -> Result<SignatureReport, EinsteinError> {
    let full = sorted_signatures(full);
    let half = if halve { Some(halved_signatures(&full)?) } else { None };
    let n = cert.metric.g().len();
    let mut signatures = Vec::with_capacity(full.len());
    for d in &full {
        let pq = match sigma {
            None => (n - d.count(), d.count()),
            Some(s) => {
                let pq = sigma_signature_from_signs(s, d);
                // cross-check with the Gram matrix of a representative
                let g: Vec<f64> = cert
                    .metric
                    .g()
                    .approx()
                    .iter()
                    .zip(d.bits())
                    .map(|(x, &b)| if b { -x.abs() } else { x.abs() })
                    .collect();
                let checked = sigma_signature(s, &g)?;
                debug_assert_eq!(pq, checked);
                checked
            }
        };
        signatures.push((d.clone(), pq));
    }
    Ok(SignatureReport { full, half, signatures })
}

/// Diagonal metrics with `Ric = ½k·id`.
pub fn diagonal_einstein(a: &NiceLieAlgebra, k: &Rat) -> Result<Classification, EinsteinError> {
    classify(a, Mode::Diagonal, k, &Options::default())
}

/// σ-diagonal metrics with `Ric = ½k·id`.
pub fn sigma_einstein(a: &NiceLieAlgebra, sigma: &NodePermutation, k: &Rat) -> Result<Classification, EinsteinError> {
    classify(a, Mode::Sigma(sigma.clone()), k, &Options::default())
}

pub fn classify(a: &NiceLieAlgebra, mode: Mode, k: &Rat, opts: &Options) -> Result<Classification, EinsteinError> {
    let sigma = mode.sigma().cloned();
    if let Some(s) = &sigma {
        if !s.is_involution() || s.is_identity() {
            return Err(crate::error::DiagramError::NotInvolution(s.to_string()).into());
        }
        if s.n() != a.n() {
            return Err(crate::error::DiagramError::BadPermutation(format!(
                "{s} acts on {} nodes, algebra has {}",
                s.n(),
                a.n()
            ))
            .into());
        }
        a.diagram().sigma_arrow_action(s)?;
    }
    if a.m() == 0 {
        return flat_abelian(a, mode, k, opts);
    }
    let fail = |condition: Condition, detail: String, numeric: bool, notes: Vec<String>| Classification {
        mode: mode.clone(),
        k: k.clone(),
        outcome: Outcome::Failed { condition, detail, numeric },
        notes,
    };
    let lin = linear_data(a.diagram(), sigma.as_ref(), k)?;
    let Some(set) = lin.set else {
        return Ok(fail(Condition::K, "ᵀM X = [k] has no solution".into(), false, Vec::new()));
    };
    let zeros = set.identically_zero_coordinates();
    if !zeros.is_empty() {
        let names: Vec<String> = zeros.iter().map(|&j| a.diagram().index_set()[j].to_string()).collect();
        return Ok(fail(Condition::H, format!("X vanishes identically at {}", names.join(", ")), false, Vec::new()));
    }
    let orthants = feasible_orthants(&set, opts.orthant_cap)?;
    let (ct_signs, c_signs): (Vec<bool>, Vec<bool>) = match &sigma {
        Some(s) => (a.tilde_c(s)?.iter().map(logsign).collect(), a.c().iter().map(logsign).collect()),
        None => (vec![false; a.m()], vec![false; a.m()]),
    };
    let shift = SignVec::new(c_signs.iter().zip(&ct_signs).map(|(x, y)| x ^ y).collect());
    let mut notes = Vec::new();
    let mut certificates = Vec::new();
    let mut full = Vec::new();
    let mut l_failing = Vec::new();
    let mut numeric_miss = false;
    for (orthant, _) in &orthants {
        let e = orthant.add(&shift);
        let deltas = admissible_deltas(a.diagram(), &e, sigma.as_ref(), opts.kernel_cap)?;
        if deltas.is_empty() {
            l_failing.push(orthant.clone());
            continue;
        }
        let sol = p_system(&set, orthant, &lin.alphas, a.c(), k).solve(&opts.solve);
        if sol.is_empty() {
            if !sol.exhaustive {
                numeric_miss = true;
                notes.push(format!("orthant {orthant}: no root of (P) found by numeric search"));
            }
            continue;
        }
        let root = &sol.roots[0];
        let x = x_at(&set, root);
        let rec = recover_metric(a, &x, &deltas[0], sigma.as_ref())?;
        let residual = verify(a, &rec.metric, k)?;
        let exact = rec.metric.g().is_exact();
        if (exact && residual != 0.0) || residual > opts.tol {
            return Err(EinsteinError::Numeric(format!("orthant {orthant}: oracle residual {residual:.3e}")));
        }
        full.extend(deltas.iter().cloned());
        certificates.push(EinsteinCertificate {
            x,
            k: k.clone(),
            orthant: orthant.clone(),
            deltas,
            metric: rec.metric,
            family: rec.family,
            x_free_dim: sol.free_dim,
            residual,
            exact,
        });
    }
    if let Some(first) = certificates.first() {
        let report = build_report(&full, sigma.as_ref(), k.is_zero(), first)?;
        return Ok(Classification { mode, k: k.clone(), outcome: Outcome::Found { certificates, report }, notes });
    }
    // decide between (L) and (P): does (P) have a solution on some orthant at all?
    let mut p_somewhere = false;
    for orthant in &l_failing {
        let sol = p_system(&set, orthant, &lin.alphas, a.c(), k).solve(&opts.solve);
        if !sol.is_empty() {
            p_somewhere = true;
            break;
        }
        numeric_miss |= !sol.exhaustive;
    }
    if p_somewhere {
        Ok(fail(Condition::L, "logsign X is not in the image of M₂ wherever (P) holds".into(), false, notes))
    } else {
        let detail = format!("no solution of (P) in any of the {} feasible orthants", orthants.len());
        Ok(fail(Condition::P, detail, numeric_miss, notes))
    }
}

/// Surjectivity of `M₂` together with (K) and (H) for `k ≠ 0`.
pub fn sufficient_condition(a: &NiceLieAlgebra, k: &Rat) -> Result<bool, EinsteinError> {
    if k.is_zero() {
        return Err(EinsteinError::Invalid("the sufficient condition concerns k ≠ 0".into()));
    }
    if a.m() == 0 || !a.root_matrix().f2.is_surjective() {
        return Ok(false);
    }
    let lin = linear_data(a.diagram(), None, k)?;
    Ok(lin.set.is_some_and(|s| s.identically_zero_coordinates().is_empty()))
}
