//! Systems `∏_j |L_j(y)|^{a_ij} = C_i` over a region where every affine form `L_j` has a fixed sign.
//!
//! The solver first removes what it can exactly: forms proportional to each other are merged, equations
//! that become constant are decided, and equations with one or two surviving forms are turned into
//! linear constraints when the required root is rational. A single remaining variable is handled by
//! exact univariate root isolation; anything larger goes to a damped least-squares search.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::rat::{exact_root, pow_i, rational_approx, to_f64};
use crate::linalg::{solve_affine, strict_feasible, MatQ, Poly, Rat, RealRoot, StrictIneq, VecQ};

/// Affine form `c0 + coef·y` with a prescribed strict sign.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedForm {
    pub c0: Rat,
    pub coef: VecQ,
    pub negative: bool,
}

impl SignedForm {
    fn eval(&self, y: &[Rat]) -> Rat {
        self.coef.iter().zip(y).fold(self.c0.clone(), |acc, (a, x)| acc + a * x)
    }

    fn eval_f64(&self, y: &[f64]) -> f64 {
        self.coef.iter().zip(y).fold(to_f64(&self.c0), |acc, (a, x)| acc + to_f64(a) * x)
    }
}

/// `∏_j |L_j|^{exps_j} = rhs`, `rhs > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEquation {
    pub exps: Vec<i64>,
    pub rhs: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogSystem {
    pub dim: usize,
    pub forms: Vec<SignedForm>,
    pub eqs: Vec<LogEquation>,
    /// Linear side conditions `coef·y = value`.
    pub linear: Vec<(VecQ, Rat)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LogRoot {
    Exact(VecQ),
    Approx(Vec<f64>),
}

impl LogRoot {
    pub fn approx(&self) -> Vec<f64> {
        match self {
            LogRoot::Exact(v) => v.iter().map(to_f64).collect(),
            LogRoot::Approx(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogSolution {
    pub roots: Vec<LogRoot>,
    /// Dimension of the solution set around the reported witness when no equation survived reduction.
    pub free_dim: usize,
    /// Directions spanning that solution set, in the original variables.
    pub directions: Vec<VecQ>,
    /// `false` when the roots came from the numeric search, so an empty list is not a proof.
    pub exhaustive: bool,
    /// Numerical null directions of the Jacobian at numeric roots, in the original variables.
    /// Nonempty means the roots lie on a positive-dimensional solution set.
    pub tangents: Vec<Vec<f64>>,
}

impl LogSolution {
    fn none() -> Self {
        Self { roots: Vec::new(), free_dim: 0, directions: Vec::new(), exhaustive: true, tangents: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_den: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { starts: 32, seed: 0x5eed, tol: 1e-12, max_den: 1_000_000 }
    }
}

/// Current parametrization `y = origin + Σ s_k dirs_k`.
#[derive(Debug, Clone)]
struct Chart {
    origin: VecQ,
    dirs: Vec<VecQ>,
}

impl Chart {
    fn dim(&self) -> usize {
        self.dirs.len()
    }

    fn point(&self, s: &[Rat]) -> VecQ {
        let mut y = self.origin.clone();
        for (t, d) in s.iter().zip(&self.dirs) {
            for (yi, di) in y.iter_mut().zip(d) {
                *yi += t * di;
            }
        }
        y
    }

    fn point_f64(&self, s: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.origin.iter().map(to_f64).collect();
        for (t, d) in s.iter().zip(&self.dirs) {
            for (yi, di) in y.iter_mut().zip(d) {
                *yi += t * to_f64(di);
            }
        }
        y
    }

    fn direction_f64(&self, t: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.origin.len()];
        for (tk, d) in t.iter().zip(&self.dirs) {
            for (yi, di) in y.iter_mut().zip(d) {
                *yi += tk * to_f64(di);
            }
        }
        y
    }

    /// `(u, v)` with `L(origin + Σ s_k dirs_k) = u + v·s`.
    fn pull(&self, c0: &Rat, coef: &[Rat]) -> (Rat, VecQ) {
        let dot = |a: &[Rat], b: &[Rat]| a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y);
        (c0 + dot(coef, &self.origin), self.dirs.iter().map(|d| dot(coef, d)).collect())
    }

    /// Restricts to `u + v·s = 0`; `None` when that leaves nothing.
    fn restrict(&self, u: &Rat, v: &[Rat]) -> Option<Chart> {
        let m = MatQ::from_rows_with_cols(vec![v.to_vec()], v.len());
        let set = solve_affine(&m, &[-u.clone()])?;
        let origin = self.point(&set.particular);
        let dirs = set
            .basis
            .iter()
            .map(|b| {
                let mut d = vec![Rat::zero(); self.origin.len()];
                for (t, dk) in b.iter().zip(&self.dirs) {
                    for (x, y) in d.iter_mut().zip(dk) {
                        *x += t * y;
                    }
                }
                d
            })
            .collect();
        Some(Chart { origin, dirs })
    }
}

/// Class of mutually proportional forms in chart coordinates, with its sign on the region.
#[derive(Debug, Clone, PartialEq)]
struct Class {
    u: Rat,
    v: VecQ,
    negative: bool,
    exp: i64,
}

#[derive(Debug, Clone)]
struct Reduced {
    classes: Vec<Class>,
    rhs: Rat,
}

enum Step {
    Infeasible,
    Restrict(Rat, VecQ),
    Keep(Reduced),
    Drop,
}

impl LogSystem {
    pub fn new(dim: usize) -> Self {
        Self { dim, forms: Vec::new(), eqs: Vec::new(), linear: Vec::new() }
    }

    /// Exact membership test: linear conditions, strict signs and every equation.
    pub fn holds_exactly(&self, y: &[Rat]) -> bool {
        let lin = self.linear.iter().all(|(c, v)| &c.iter().zip(y).fold(Rat::zero(), |a, (p, q)| a + p * q) == v);
        let signs = self.forms.iter().all(|f| {
            let x = f.eval(y);
            if f.negative {
                x.is_negative()
            } else {
                x.is_positive()
            }
        });
        lin && signs
            && self.eqs.iter().all(|e| {
                let lhs = e.exps.iter().zip(&self.forms).fold(Rat::one(), |acc, (&a, f)| {
                    if a == 0 {
                        acc
                    } else {
                        acc * pow_i(&f.eval(y).abs(), a)
                    }
                });
                lhs == e.rhs
            })
    }

    /// Largest `|Σ a_j ln|L_j| − ln C|` at a floating point.
    pub fn log_residual(&self, y: &[f64]) -> f64 {
        self.eqs
            .iter()
            .map(|e| {
                let s: f64 = e
                    .exps
                    .iter()
                    .zip(&self.forms)
                    .filter(|(a, _)| **a != 0)
                    .map(|(&a, f)| a as f64 * f.eval_f64(y).abs().ln())
                    .sum();
                (s - to_f64(&e.rhs).ln()).abs()
            })
            .fold(0.0, f64::max)
    }

    fn region(&self, chart: &Chart) -> Vec<StrictIneq> {
        self.forms
            .iter()
            .map(|f| {
                let (u, v) = chart.pull(&f.c0, &f.coef);
                if f.negative {
                    StrictIneq::new(v.into_iter().map(|x| -x).collect(), -u)
                } else {
                    StrictIneq::new(v, u)
                }
            })
            .collect()
    }

    fn reduce(&self, chart: &Chart, e: &LogEquation) -> Step {
        let mut rhs = e.rhs.clone();
        let mut classes: Vec<Class> = Vec::new();
        for (&a, f) in e.exps.iter().zip(&self.forms) {
            if a == 0 {
                continue;
            }
            let (u, v) = chart.pull(&f.c0, &f.coef);
            let Some(p) = v.iter().position(|x| !x.is_zero()) else {
                if u.is_zero() {
                    return Step::Infeasible;
                }
                rhs /= pow_i(&u.abs(), a);
                continue;
            };
            let mu = v[p].clone();
            let ku = &u / &mu;
            let kv: VecQ = v.iter().map(|x| x / &mu).collect();
            rhs /= pow_i(&mu.abs(), a);
            let negative = f.negative ^ mu.is_negative();
            match classes.iter_mut().find(|c| c.u == ku && c.v == kv) {
                Some(c) => c.exp += a,
                None => classes.push(Class { u: ku, v: kv, negative, exp: a }),
            }
        }
        classes.retain(|c| c.exp != 0);
        match classes.len() {
            0 => {
                if rhs.is_one() {
                    Step::Drop
                } else {
                    Step::Infeasible
                }
            }
            1 => {
                let c = &classes[0];
                let target = if c.exp > 0 { rhs.clone() } else { rhs.recip() };
                match exact_root(&target, c.exp.unsigned_abs() as u32) {
                    Some(r) => {
                        let r = if c.negative { -r } else { r };
                        Step::Restrict(&c.u - r, c.v.clone())
                    }
                    None => Step::Keep(Reduced { classes, rhs }),
                }
            }
            2 if classes[0].exp == -classes[1].exp => {
                let (a, b, target) = if classes[0].exp > 0 {
                    (&classes[0], &classes[1], rhs.clone())
                } else {
                    (&classes[1], &classes[0], rhs.recip())
                };
                match exact_root(&target, a.exp.unsigned_abs() as u32) {
                    Some(r) => {
                        // K_a = ± r K_b, sign fixed by the region
                        let r = if a.negative ^ b.negative { -r } else { r };
                        let v: VecQ = a.v.iter().zip(&b.v).map(|(x, y)| x - &r * y).collect();
                        Step::Restrict(&a.u - &r * &b.u, v)
                    }
                    None => Step::Keep(Reduced { classes, rhs }),
                }
            }
            _ => Step::Keep(Reduced { classes, rhs }),
        }
    }

    pub fn solve(&self, opts: &SolveOptions) -> LogSolution {
        let start = if self.linear.is_empty() {
            Some(Chart {
                origin: vec![Rat::zero(); self.dim],
                dirs: (0..self.dim).map(|k| unit(self.dim, k)).collect(),
            })
        } else {
            let rows: Vec<VecQ> = self.linear.iter().map(|(c, _)| c.clone()).collect();
            let rhs: VecQ = self.linear.iter().map(|(_, v)| v.clone()).collect();
            solve_affine(&MatQ::from_rows_with_cols(rows, self.dim), &rhs)
                .map(|s| Chart { origin: s.particular, dirs: s.basis })
        };
        let Some(mut chart) = start else {
            return LogSolution::none();
        };
        'outer: loop {
            let region = self.region(&chart);
            let Some(witness) = strict_feasible(&region, chart.dim()) else {
                return LogSolution::none();
            };
            let mut kept = Vec::new();
            for e in &self.eqs {
                match self.reduce(&chart, e) {
                    Step::Infeasible => return LogSolution::none(),
                    Step::Drop => {}
                    Step::Keep(r) => kept.push(r),
                    Step::Restrict(u, v) => match chart.restrict(&u, &v) {
                        Some(c) => {
                            chart = c;
                            continue 'outer;
                        }
                        None => return LogSolution::none(),
                    },
                }
            }
            if kept.is_empty() {
                return LogSolution {
                    roots: vec![LogRoot::Exact(chart.point(&witness))],
                    free_dim: chart.dim(),
                    directions: chart.dirs.clone(),
                    exhaustive: true,
                    tangents: Vec::new(),
                };
            }
            if chart.dim() == 1 {
                return self.univariate(&chart, &region, &kept);
            }
            return self.search(&chart, &witness, &kept, opts);
        }
    }

    fn univariate(&self, chart: &Chart, region: &[StrictIneq], kept: &[Reduced]) -> LogSolution {
        let mut g = Poly::zero();
        for r in kept {
            let mut plus = Poly::constant(Rat::one());
            let mut minus = Poly::constant(r.rhs.clone());
            for c in &r.classes {
                let f = Poly::linear(c.v[0].clone(), c.u.clone());
                let f = if c.negative { f.scale(&-Rat::one()) } else { f };
                if c.exp > 0 {
                    plus = plus.mul(&f.pow(c.exp as u32));
                } else {
                    minus = minus.mul(&f.pow((-c.exp) as u32));
                }
            }
            g = g.gcd(&plus.sub(&minus));
        }
        if g.is_zero() {
            unreachable!("reduced equations are never identically satisfied");
        }
        let mut lo: Option<Rat> = None;
        let mut hi: Option<Rat> = None;
        for q in region {
            let (a, b) = (&q.coef[0], &q.constant);
            if a.is_zero() {
                continue;
            }
            let bound = -b / a;
            if a.is_positive() {
                if lo.as_ref().is_none_or(|l| &bound > l) {
                    lo = Some(bound);
                }
            } else if hi.as_ref().is_none_or(|h| &bound < h) {
                hi = Some(bound);
            }
        }
        let roots = g
            .real_roots()
            .into_iter()
            .filter(|r| r.within(lo.as_ref(), hi.as_ref()))
            .map(|r| match r {
                RealRoot::Rational(s) => LogRoot::Exact(chart.point(&[s])),
                RealRoot::Algebraic(mut a) => {
                    let w = Rat::new(1.into(), num_bigint::BigInt::from(1) << 80);
                    a.refine(&w);
                    LogRoot::Approx(chart.point_f64(&[(to_f64(&a.lo) + to_f64(&a.hi)) / 2.0]))
                }
            })
            .collect();
        LogSolution { roots, free_dim: 0, directions: Vec::new(), exhaustive: true, tangents: Vec::new() }
    }

    fn search(&self, chart: &Chart, witness: &[Rat], kept: &[Reduced], opts: &SolveOptions) -> LogSolution {
        let d = chart.dim();
        let forms: Vec<(f64, Vec<f64>, bool)> = self
            .forms
            .iter()
            .map(|f| {
                let (u, v) = chart.pull(&f.c0, &f.coef);
                (to_f64(&u), v.iter().map(to_f64).collect(), f.negative)
            })
            .collect();
        let inside = |s: &[f64]| {
            forms.iter().all(|(u, v, neg)| {
                let x = u + v.iter().zip(s).map(|(a, b)| a * b).sum::<f64>();
                if *neg {
                    x < 0.0
                } else {
                    x > 0.0
                }
            })
        };
        // per equation: (u, v, exponent) of each class, and ln of the right-hand side
        type Classes = Vec<(f64, Vec<f64>, f64)>;
        let eqs: Vec<(Classes, f64)> = kept
            .iter()
            .map(|r| {
                (
                    r.classes.iter().map(|c| (to_f64(&c.u), c.v.iter().map(to_f64).collect(), c.exp as f64)).collect(),
                    to_f64(&r.rhs).ln(),
                )
            })
            .collect();
        let residual = |s: &[f64]| -> (DVector<f64>, DMatrix<f64>) {
            let mut f = DVector::zeros(eqs.len());
            let mut j = DMatrix::zeros(eqs.len(), d);
            for (i, (cls, lnc)) in eqs.iter().enumerate() {
                let mut acc = -lnc;
                for (u, v, a) in cls {
                    let x = u + v.iter().zip(s).map(|(p, q)| p * q).sum::<f64>();
                    acc += a * x.abs().ln();
                    for k in 0..d {
                        j[(i, k)] += a * v[k] / x;
                    }
                }
                f[i] = acc;
            }
            (f, j)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let w0: Vec<f64> = witness.iter().map(to_f64).collect();
        let mut found: Vec<Vec<f64>> = Vec::new();
        let mut roots = Vec::new();
        let mut tangents: Vec<Vec<f64>> = Vec::new();
        for _ in 0..opts.starts {
            let s0 = hit_and_run(&w0, &forms, &mut rng, 8);
            let Some(s) = levenberg_marquardt(&s0, &residual, &inside, opts.tol) else {
                continue;
            };
            if found.iter().any(|t| t.iter().zip(&s).all(|(a, b)| (a - b).abs() < 1e-7 * (1.0 + a.abs()))) {
                continue;
            }
            found.push(s.clone());
            if tangents.is_empty() {
                tangents = null_directions(&residual(&s).1).into_iter().map(|t| chart.direction_f64(&t)).collect();
            }
            let exact: Option<VecQ> = s.iter().map(|x| rational_approx(*x, opts.max_den)).collect();
            match exact.map(|q| chart.point(&q)).filter(|y| self.holds_exactly(y)) {
                Some(y) => roots.push(LogRoot::Exact(y)),
                None => roots.push(LogRoot::Approx(chart.point_f64(&s))),
            }
        }
        roots.sort_by_key(|r| !matches!(r, LogRoot::Exact(_)));
        LogSolution { roots, free_dim: 0, directions: Vec::new(), exhaustive: false, tangents }
    }
}

fn unit(n: usize, k: usize) -> VecQ {
    (0..n).map(|i| if i == k { Rat::one() } else { Rat::zero() }).collect()
}

/// A few hit-and-run moves inside the open polyhedron, starting from `w`.
fn hit_and_run(w: &[f64], forms: &[(f64, Vec<f64>, bool)], rng: &mut ChaCha8Rng, steps: usize) -> Vec<f64> {
    let mut s = w.to_vec();
    let scale = 1.0 + s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    for _ in 0..steps {
        let dir: Vec<f64> = (0..s.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut lo, mut hi) = (-10.0 * scale, 10.0 * scale);
        for (u, v, neg) in forms {
            let x = u + v.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>();
            let dx: f64 = v.iter().zip(&dir).map(|(a, b)| a * b).sum();
            if dx.abs() < 1e-300 {
                continue;
            }
            // keep sign of x + t dx
            let t = -x / dx;
            let grows = (dx > 0.0) != *neg;
            if grows {
                lo = lo.max(t);
            } else {
                hi = hi.min(t);
            }
        }
        if lo < hi {
            let t = lo + (hi - lo) * rng.gen_range(0.05..0.95);
            for (si, di) in s.iter_mut().zip(&dir) {
                *si += t * di;
            }
        }
    }
    s
}

/// Right singular vectors of `j` with singular value below `1e-8 · σ_max`, plus the
/// directions lost when there are fewer equations than unknowns.
fn null_directions(j: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let (r, d) = j.shape();
    let mut square = DMatrix::zeros(d.max(r), d);
    square.view_mut((0, 0), (r, d)).copy_from(j);
    let svd = square.svd(false, true);
    let Some(vt) = svd.v_t else {
        return Vec::new();
    };
    let top = svd.singular_values.iter().fold(0.0f64, |a, &x| a.max(x));
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &x)| x <= 1e-8 * top.max(1.0))
        .map(|(i, _)| vt.row(i).iter().copied().collect())
        .collect()
}

fn levenberg_marquardt(
    s0: &[f64],
    residual: &impl Fn(&[f64]) -> (DVector<f64>, DMatrix<f64>),
    inside: &impl Fn(&[f64]) -> bool,
    tol: f64,
) -> Option<Vec<f64>> {
    let d = s0.len();
    let mut s = s0.to_vec();
    let (mut f, mut j) = residual(&s);
    let mut mu = 1e-3;
    for _ in 0..500 {
        if f.amax() < tol {
            return Some(s);
        }
        let jt = j.transpose();
        let a = &jt * &j + DMatrix::identity(d, d) * mu;
        let g = &jt * &f;
        let Some(step) = a.lu().solve(&(-g)) else {
            mu *= 10.0;
            continue;
        };
        let cand: Vec<f64> = s.iter().zip(step.iter()).map(|(x, dx)| x + dx).collect();
        if inside(&cand) {
            let (f2, j2) = residual(&cand);
            if f2.norm() < f.norm() {
                s = cand;
                f = f2;
                j = j2;
                mu = (mu / 3.0).max(1e-15);
                continue;
            }
        }
        mu *= 4.0;
        if mu > 1e14 {
            break;
        }
    }
    (f.amax() < tol).then_some(s)
}
