use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::signature::SignVec;
use crate::algebra::NiceLieAlgebra;
use crate::diagram::NodePermutation;
use crate::error::EinsteinError;
use crate::linalg::rat::{exact_root, fmt_rat, logsign, logsign_f64, pow_i, to_f64};
use crate::linalg::{kernel_basis, multiplicative_solve, MatQ, MultiplicativeSolution, Rat, VecQ};

/// Exact or floating-point vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    Exact(VecQ),
    Approx(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Exact(v) => v.len(),
            Values::Approx(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Values::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&[Rat]> {
        match self {
            Values::Exact(v) => Some(v),
            Values::Approx(_) => None,
        }
    }

    pub fn approx(&self) -> Vec<f64> {
        match self {
            Values::Exact(v) => v.iter().map(to_f64).collect(),
            Values::Approx(v) => v.clone(),
        }
    }

    pub fn logsign(&self) -> SignVec {
        match self {
            Values::Exact(v) => SignVec::new(v.iter().map(logsign).collect()),
            Values::Approx(v) => SignVec::new(v.iter().map(|x| logsign_f64(*x)).collect()),
        }
    }

    pub fn has_zero(&self) -> bool {
        match self {
            Values::Exact(v) => v.iter().any(Zero::is_zero),
            Values::Approx(v) => v.contains(&0.0),
        }
    }

    pub fn negated(&self) -> Values {
        match self {
            Values::Exact(v) => Values::Exact(v.iter().map(|x| -x).collect()),
            Values::Approx(v) => Values::Approx(v.iter().map(|x| -x).collect()),
        }
    }

    /// Entrywise `|v_i|` with the sign pattern `delta`.
    pub fn with_signs(&self, delta: &SignVec) -> Values {
        match self {
            Values::Exact(v) => {
                Values::Exact(v.iter().zip(delta.bits()).map(|(x, &d)| if d { -x.abs() } else { x.abs() }).collect())
            }
            Values::Approx(v) => {
                Values::Approx(v.iter().zip(delta.bits()).map(|(x, &d)| if d { -x.abs() } else { x.abs() }).collect())
            }
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        match self {
            Values::Exact(v) => v.iter().map(fmt_rat).collect(),
            Values::Approx(v) => v.iter().map(|x| format!("{x:.12e}")).collect(),
        }
    }
}

impl std::fmt::Display for Values {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = self.to_strings().join(", ");
        if self.is_exact() {
            write!(f, "[{s}]")
        } else {
            write!(f, "≈[{s}]")
        }
    }
}

impl Serialize for Values {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Values::Exact(_) => self.to_strings().serialize(s),
            Values::Approx(v) => v.serialize(s),
        }
    }
}

/// `Σ g_i e^i ⊗ e^i` with every `g_i ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalMetric {
    pub g: Values,
}

impl DiagonalMetric {
    pub fn new(g: Values) -> Result<Self, EinsteinError> {
        if g.has_zero() {
            return Err(EinsteinError::ZeroMetricEntry);
        }
        Ok(Self { g })
    }

    pub fn delta(&self) -> SignVec {
        self.g.logsign()
    }
}

/// `Σ g_i e^i ⊗ e^{σ(i)}` with `g` constant on σ-orbits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaMetric {
    pub sigma: NodePermutation,
    pub g: Values,
}

impl SigmaMetric {
    pub fn new(sigma: NodePermutation, g: Values) -> Result<Self, EinsteinError> {
        if g.has_zero() {
            return Err(EinsteinError::ZeroMetricEntry);
        }
        let ok = match &g {
            Values::Exact(v) => (1..=v.len()).all(|i| v[i - 1] == v[sigma.apply(i) - 1]),
            Values::Approx(v) => (1..=v.len()).all(|i| v[i - 1] == v[sigma.apply(i) - 1]),
        };
        if !ok || !sigma.is_involution() || sigma.n() != g.len() {
            return Err(EinsteinError::Invalid(format!("metric is not {sigma}-invariant")));
        }
        Ok(Self { sigma, g })
    }

    pub fn delta(&self) -> SignVec {
        self.g.logsign()
    }

    pub fn signature(&self) -> Result<(usize, usize), EinsteinError> {
        super::signature::sigma_signature(&self.sigma, &self.g.approx())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Metric {
    Diagonal(DiagonalMetric),
    Sigma(SigmaMetric),
}

impl Metric {
    pub fn g(&self) -> &Values {
        match self {
            Metric::Diagonal(m) => &m.g,
            Metric::Sigma(m) => &m.g,
        }
    }

    pub fn sigma(&self) -> Option<&NodePermutation> {
        match self {
            Metric::Diagonal(_) => None,
            Metric::Sigma(m) => Some(&m.sigma),
        }
    }

    pub fn signature(&self) -> Result<(usize, usize), EinsteinError> {
        match self {
            Metric::Diagonal(m) => {
                let q = m.delta().count();
                Ok((m.g.len() - q, q))
            }
            Metric::Sigma(m) => m.signature(),
        }
    }
}

/// Metrics with the same `X`: `|g_j| = |b_j| ∏_f (|g_f| / |b_f|)^{e_jf}` over the free nodes `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricFamily {
    pub free: Vec<usize>,
    #[serde(with = "crate::record::rat_mat_serde")]
    pub exponents: Vec<VecQ>,
}

impl MetricFamily {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Member through `base` taking the values `at` on the free nodes; signs must match `base`.
    pub fn evaluate(&self, base: &[Rat], at: &[Rat]) -> Option<VecQ> {
        assert_eq!(at.len(), self.free.len());
        let ratios: Vec<Rat> = self
            .free
            .iter()
            .zip(at)
            .map(|(&f, v)| {
                (v.is_positive() == base[f - 1].is_positive() && !v.is_zero()).then(|| (v / &base[f - 1]).abs())
            })
            .collect::<Option<_>>()?;
        base.iter()
            .zip(&self.exponents)
            .map(|(b, e)| {
                e.iter().zip(&ratios).try_fold(b.clone(), |acc, (ex, r)| {
                    if ex.is_zero() {
                        return Some(acc);
                    }
                    let p = pow_i(r, ex.numer().to_i64()?);
                    Some(acc * exact_root(&p, ex.denom().to_u32()?)?)
                })
            })
            .collect()
    }

    /// Human-readable relations, e.g. `|g4| = |g1|·|g2|` (relative to the base point).
    pub fn relations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (j, e) in self.exponents.iter().enumerate() {
            if self.free.contains(&(j + 1)) {
                continue;
            }
            let terms: Vec<String> = self
                .free
                .iter()
                .zip(e)
                .filter(|(_, x)| !x.is_zero())
                .map(|(f, x)| if x.is_one() { format!("g{f}") } else { format!("g{f}^{}", fmt_rat(x)) })
                .collect();
            let rhs = if terms.is_empty() { "const".to_string() } else { terms.join("·") };
            out.push(format!("g{} ∝ {rhs}", j + 1));
        }
        out
    }
}

/// A recovered metric with its gauge family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovered {
    pub metric: Metric,
    pub family: MetricFamily,
}

/// `B`: node `j` ↦ orbit index; identity in the diagonal case.
fn orbit_map(n: usize, sigma: Option<&NodePermutation>) -> (Vec<usize>, Vec<usize>) {
    match sigma {
        None => ((0..n).collect(), (1..=n).collect()),
        Some(s) => {
            let orbits = s.orbits();
            let mut map = vec![0; n];
            for (o, orb) in orbits.iter().enumerate() {
                for &i in orb {
                    map[i - 1] = o;
                }
            }
            (map, orbits.iter().map(|o| o[0]).collect())
        }
    }
}

/// Exponent matrix of `∏_j g_j^{M_Ij}` in orbit variables.
fn reduced_root_matrix(a: &NiceLieAlgebra, map: &[usize], orbits: usize) -> Vec<Vec<i64>> {
    a.root_matrix()
        .ints
        .iter()
        .map(|row| {
            let mut out = vec![0i64; orbits];
            for (j, e) in row.iter().enumerate() {
                out[map[j]] += e;
            }
            out
        })
        .collect()
}

/// Kernel of `mat` with free columns taken as early as possible.
fn early_free_kernel(mat: &[Vec<i64>], cols: usize) -> (Vec<usize>, Vec<VecQ>) {
    let rev: Vec<VecQ> =
        mat.iter().map(|r| r.iter().rev().map(|&x| Rat::from_integer(BigInt::from(x))).collect()).collect();
    let q = MatQ::from_rows_with_cols(rev, cols);
    let (_, pivots) = q.rref();
    let free_rev: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut pairs: Vec<(usize, VecQ)> =
        free_rev.iter().zip(kernel_basis(&q)).map(|(&f, v)| (cols - 1 - f, v.into_iter().rev().collect())).collect();
    pairs.sort_by_key(|p| p.0);
    pairs.into_iter().unzip()
}

/// Expected `logsign` of `X` for a metric with signs `delta`.
pub fn sign_condition(
    a: &NiceLieAlgebra,
    delta: &SignVec,
    sigma: Option<&NodePermutation>,
) -> Result<SignVec, EinsteinError> {
    let m2 = a.root_matrix().f2;
    let mut e = SignVec::new(m2.mul_vec(delta.bits()));
    if let Some(s) = sigma {
        let ct = a.tilde_c(s)?;
        let cc = SignVec::new(a.c().iter().zip(&ct).map(|(c, t)| logsign(c) ^ logsign(t)).collect());
        e = e.add(&cc);
    }
    Ok(e)
}

/// Solves `X_I = ∏ g_j^{M_Ij} c_I²` (or `c_I c̃_I`) for `g` with signs `delta`.
pub fn recover_metric(
    a: &NiceLieAlgebra,
    x: &Values,
    delta: &SignVec,
    sigma: Option<&NodePermutation>,
) -> Result<Recovered, EinsteinError> {
    let n = a.n();
    let m = a.m();
    if x.len() != m || delta.len() != n || x.has_zero() {
        return Err(EinsteinError::Invalid(
            "X and delta must have lengths m and n, X off the coordinate hyperplanes".into(),
        ));
    }
    if let Some(s) = sigma {
        if !delta.is_invariant(s) {
            return Err(EinsteinError::InconsistentSigns);
        }
    }
    if sign_condition(a, delta, sigma)? != x.logsign() {
        return Err(EinsteinError::InconsistentSigns);
    }
    let weights: VecQ = match sigma {
        None => a.c().iter().map(|c| c * c).collect(),
        Some(s) => a.c().iter().zip(a.tilde_c(s)?).map(|(c, t)| c * t).collect(),
    };
    let (map, reps) = orbit_map(n, sigma);
    let mat = reduced_root_matrix(a, &map, reps.len());
    let (free_cols, kernel) = early_free_kernel(&mat, reps.len());
    let family = MetricFamily {
        free: free_cols.iter().map(|&o| reps[o]).collect(),
        exponents: (0..n).map(|j| kernel.iter().map(|v| v[map[j]].clone()).collect()).collect(),
    };
    let magnitudes: Values = match x {
        Values::Exact(xv) => {
            let r: VecQ = xv.iter().zip(&weights).map(|(xi, w)| (xi / w).abs()).collect();
            let mz: Vec<Vec<BigInt>> = mat.iter().map(|row| row.iter().map(|&e| BigInt::from(e)).collect()).collect();
            if m == 0 {
                Values::Exact(vec![Rat::one(); reps.len()])
            } else {
                match multiplicative_solve(&mz, &r) {
                    MultiplicativeSolution::Exact(h) => Values::Exact(h),
                    MultiplicativeSolution::Real(lh) => Values::Approx(lh.iter().map(|v| v.exp()).collect()),
                    MultiplicativeSolution::Inconsistent => {
                        return Err(EinsteinError::Invalid(
                            "|X| is not in the image of the root matrix (condition P fails)".into(),
                        ))
                    }
                }
            }
        }
        Values::Approx(xv) => {
            let lr: Vec<f64> = xv.iter().zip(&weights).map(|(xi, w)| (xi / to_f64(w)).abs().ln()).collect();
            Values::Approx(log_least_squares(&mat, &lr)?.iter().map(|v| v.exp()).collect())
        }
    };
    let g_nodes = match &magnitudes {
        Values::Exact(h) => Values::Exact((0..n).map(|j| h[map[j]].clone()).collect()),
        Values::Approx(h) => Values::Approx((0..n).map(|j| h[map[j]]).collect()),
    }
    .with_signs(delta);
    let metric = match sigma {
        None => Metric::Diagonal(DiagonalMetric::new(g_nodes)?),
        Some(s) => Metric::Sigma(SigmaMetric::new(s.clone(), g_nodes)?),
    };
    Ok(Recovered { metric, family })
}

fn log_least_squares(mat: &[Vec<i64>], rhs: &[f64]) -> Result<Vec<f64>, EinsteinError> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, Vec::len);
    if rows == 0 {
        return Ok(vec![0.0; cols]);
    }
    let a = DMatrix::from_fn(rows, cols, |i, j| mat[i][j] as f64);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let y = svd.solve(&b, 1e-12).map_err(|e| EinsteinError::Numeric(e.to_string()))?;
    let res = (&a * &y - &b).amax();
    if res > 1e-8 {
        return Err(EinsteinError::Numeric(format!("log system residual {res:.3e}")));
    }
    Ok(y.iter().copied().collect())
}
