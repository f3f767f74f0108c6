//! Brute-force curvature of left-invariant metrics on a Lie algebra given by structure constants.

#![allow(clippy::needless_range_loop)]

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_traits::{Num, Signed, Zero};

use crate::error::CurvatureError;
use crate::linalg::rat::{to_f64, Rat};
use crate::linalg::MatQ;

/// Field used by the oracle: exact rationals or `f64`.
pub trait Scalar: Num + Clone + Debug + std::ops::Neg<Output = Self> {
    fn from_rat(r: &Rat) -> Self;
    fn to_f64(&self) -> f64;
    /// Pivot size for elimination; exact types only need "nonzero".
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Scalar for Rat {
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        to_f64(self)
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0 + to_f64(&self.abs()).min(1.0)
        }
    }
}

impl Scalar for f64 {
    fn from_rat(r: &Rat) -> Self {
        to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

fn half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}

/// `[e_a, e_b] = Σ_k C^k_{ab} e_k`, 0-based, dense.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants<T> {
    n: usize,
    c: Vec<T>,
}

impl<T: Scalar> StructureConstants<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, c: vec![T::zero(); n * n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize, k: usize) -> &T {
        &self.c[(a * self.n + b) * self.n + k]
    }

    pub fn set(&mut self, a: usize, b: usize, k: usize, v: T) {
        let n = self.n;
        self.c[(a * n + b) * n + k] = v;
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StructureConstants<U> {
        StructureConstants { n: self.n, c: self.c.iter().map(f).collect() }
    }

    /// Bracket of arbitrary vectors.
    pub fn bracket(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.n;
        let mut out = vec![T::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if y[b].is_zero() {
                    continue;
                }
                let w = x[a].clone() * y[b].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.get(a, b, k);
                    if !c.is_zero() {
                        *o = o.clone() + w.clone() * c.clone();
                    }
                }
            }
        }
        out
    }
}

impl StructureConstants<Rat> {
    pub fn to_f64(&self) -> StructureConstants<f64> {
        self.map(to_f64)
    }
}

/// Symmetric nondegenerate Gram matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralMetric<T> {
    n: usize,
    gram: Vec<T>,
}

impl<T: Scalar> GeneralMetric<T> {
    pub fn new(n: usize, gram: Vec<T>) -> Result<Self, CurvatureError> {
        if gram.len() != n * n {
            return Err(CurvatureError::DimensionMismatch { got: gram.len(), n: n * n });
        }
        Ok(Self { n, gram })
    }

    pub fn diagonal(g: &[T]) -> Self {
        let n = g.len();
        let mut gram = vec![T::zero(); n * n];
        for (i, x) in g.iter().enumerate() {
            gram[i * n + i] = x.clone();
        }
        Self { n, gram }
    }

    /// `Σ g_i e^i ⊗ e^{σ(i)}` for a 0-based involution `sigma`.
    pub fn sigma_diagonal(g: &[T], sigma: &[usize]) -> Self {
        let n = g.len();
        let mut gram = vec![T::zero(); n * n];
        for (i, x) in g.iter().enumerate() {
            gram[i * n + sigma[i]] = x.clone();
        }
        Self { n, gram }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> &T {
        &self.gram[a * self.n + b]
    }

    pub fn inner(&self, x: &[T], y: &[T]) -> T {
        let mut acc = T::zero();
        for a in 0..self.n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..self.n {
                let g = self.get(a, b);
                if !g.is_zero() && !y[b].is_zero() {
                    acc = acc + x[a].clone() * g.clone() * y[b].clone();
                }
            }
        }
        acc
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.get(a, b) == self.get(b, a)))
    }

    pub fn inverse(&self) -> Result<Vec<T>, CurvatureError> {
        invert(self.n, &self.gram).ok_or(CurvatureError::Degenerate)
    }

    pub fn scale(&self, t: &T) -> Self {
        Self { n: self.n, gram: self.gram.iter().map(|x| x.clone() * t.clone()).collect() }
    }

    pub fn to_f64(&self) -> GeneralMetric<f64> {
        GeneralMetric { n: self.n, gram: self.gram.iter().map(Scalar::to_f64).collect() }
    }

    pub fn gram(&self) -> &[T] {
        &self.gram
    }
}

/// Gauss–Jordan with largest-magnitude pivoting.
fn invert<T: Scalar>(n: usize, m: &[T]) -> Option<Vec<T>> {
    let w = 2 * n;
    let mut a: Vec<T> = vec![T::zero(); n * w];
    for r in 0..n {
        for c in 0..n {
            a[r * w + c] = m[r * n + c].clone();
        }
        a[r * w + n + r] = T::one();
    }
    for col in 0..n {
        let p = (col..n).filter(|&r| !a[r * w + col].is_zero()).max_by(|&x, &y| {
            a[x * w + col].magnitude().partial_cmp(&a[y * w + col].magnitude()).unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[p * w + col].magnitude() == 0.0 {
            return None;
        }
        if p != col {
            for c in 0..w {
                a.swap(p * w + c, col * w + c);
            }
        }
        let inv = T::one() / a[col * w + col].clone();
        for c in 0..w {
            a[col * w + c] = a[col * w + c].clone() * inv.clone();
        }
        for r in 0..n {
            if r == col || a[r * w + col].is_zero() {
                continue;
            }
            let f = a[r * w + col].clone();
            for c in 0..w {
                let v = a[col * w + c].clone() * f.clone();
                a[r * w + c] = a[r * w + c].clone() - v;
            }
        }
    }
    Some((0..n).flat_map(|r| a[r * w + n..r * w + w].to_vec()).collect())
}

/// `∇_{e_a} e_b = Σ_c Γ^c_{ab} e_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection<T> {
    n: usize,
    gamma: Vec<T>,
}

impl<T: Scalar> Connection<T> {
    pub fn get(&self, a: usize, b: usize, c: usize) -> &T {
        &self.gamma[(a * self.n + b) * self.n + c]
    }
}

pub fn levi_civita<T: Scalar>(
    sc: &StructureConstants<T>,
    g: &GeneralMetric<T>,
) -> Result<Connection<T>, CurvatureError> {
    let n = sc.n();
    if g.n() != n {
        return Err(CurvatureError::DimensionMismatch { got: g.n(), n });
    }
    let ginv = g.inverse()?;
    // lb[a][b][z] = <[e_a, e_b], e_z>
    let mut lb = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                let c = sc.get(a, b, k);
                if c.is_zero() {
                    continue;
                }
                for z in 0..n {
                    let gk = g.get(k, z);
                    if !gk.is_zero() {
                        let idx = (a * n + b) * n + z;
                        lb[idx] = lb[idx].clone() + c.clone() * gk.clone();
                    }
                }
            }
        }
    }
    let at = |a: usize, b: usize, z: usize| lb[(a * n + b) * n + z].clone();
    let h = half::<T>();
    let mut gamma = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            // <∇_a b, z> = ½(<[a,b],z> - <[b,z],a> + <[z,a],b>)
            let low: Vec<T> = (0..n).map(|z| h.clone() * (at(a, b, z) - at(b, z, a) + at(z, a, b))).collect();
            for c in 0..n {
                let mut acc = T::zero();
                for (z, l) in low.iter().enumerate() {
                    let gi = &ginv[c * n + z];
                    if !gi.is_zero() && !l.is_zero() {
                        acc = acc + gi.clone() * l.clone();
                    }
                }
                gamma[(a * n + b) * n + c] = acc;
            }
        }
    }
    Ok(Connection { n, gamma })
}

/// Torsion `∇_a b - ∇_b a - [a,b]` and metric compatibility `<∇_a b, c> + <b, ∇_a c>` residuals.
pub fn connection_residuals<T: Scalar>(
    sc: &StructureConstants<T>,
    g: &GeneralMetric<T>,
    conn: &Connection<T>,
) -> (Vec<T>, Vec<T>) {
    let n = sc.n();
    let mut torsion = Vec::new();
    let mut compat = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                torsion.push(conn.get(a, b, c).clone() - conn.get(b, a, c).clone() - sc.get(a, b, c).clone());
                let mut s = T::zero();
                for d in 0..n {
                    s = s
                        + conn.get(a, b, d).clone() * g.get(d, c).clone()
                        + g.get(b, d).clone() * conn.get(a, c, d).clone();
                }
                compat.push(s);
            }
        }
    }
    (torsion, compat)
}

/// `R(e_a, e_b) e_c = Σ_d R^d_{abc} e_d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor<T> {
    n: usize,
    r: Vec<T>,
    lowered: Vec<T>,
}

impl<T: Scalar> RiemannTensor<T> {
    fn idx(&self, a: usize, b: usize, c: usize, d: usize) -> usize {
        ((a * self.n + b) * self.n + c) * self.n + d
    }

    /// `R^d_{abc}`.
    pub fn get(&self, d: usize, a: usize, b: usize, c: usize) -> &T {
        &self.r[self.idx(a, b, c, d)]
    }

    /// `R_{abcd} = <R(e_a, e_b) e_c, e_d>`.
    pub fn lowered(&self, a: usize, b: usize, c: usize, d: usize) -> &T {
        &self.lowered[self.idx(a, b, c, d)]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub fn riemann<T: Scalar>(
    sc: &StructureConstants<T>,
    g: &GeneralMetric<T>,
) -> Result<RiemannTensor<T>, CurvatureError> {
    let n = sc.n();
    let conn = levi_civita(sc, g)?;
    let mut r = vec![T::zero(); n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut acc = T::zero();
                    for e in 0..n {
                        let x = conn.get(b, c, e);
                        if !x.is_zero() {
                            acc = acc + x.clone() * conn.get(a, e, d).clone();
                        }
                        let y = conn.get(a, c, e);
                        if !y.is_zero() {
                            acc = acc - y.clone() * conn.get(b, e, d).clone();
                        }
                        let z = sc.get(a, b, e);
                        if !z.is_zero() {
                            acc = acc - z.clone() * conn.get(e, c, d).clone();
                        }
                    }
                    r[((a * n + b) * n + c) * n + d] = acc;
                }
            }
        }
    }
    let mut lowered = vec![T::zero(); n * n * n * n];
    for base in 0..n * n * n {
        for d in 0..n {
            let mut acc = T::zero();
            for e in 0..n {
                let x = &r[base * n + e];
                if !x.is_zero() {
                    acc = acc + x.clone() * g.get(e, d).clone();
                }
            }
            lowered[base * n + d] = acc;
        }
    }
    Ok(RiemannTensor { n, r, lowered })
}

/// Ricci tensor `Ric(b, c) = tr(x ↦ R(x, e_b) e_c)` and Ricci operator `g⁻¹ Ric`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ricci<T> {
    pub n: usize,
    pub tensor: Vec<T>,
    pub operator: Vec<T>,
}

impl<T: Scalar> Ricci<T> {
    pub fn operator_diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.operator[i * self.n + i].clone()).collect()
    }

    pub fn operator_is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.operator[i * self.n + j].is_zero()))
    }

    pub fn scalar(&self) -> T {
        self.operator_diagonal().into_iter().fold(T::zero(), |a, x| a + x)
    }
}

pub fn ricci<T: Scalar>(sc: &StructureConstants<T>, g: &GeneralMetric<T>) -> Result<Ricci<T>, CurvatureError> {
    let rt = riemann(sc, g)?;
    Ok(ricci_from(&rt, g))
}

fn ricci_from<T: Scalar>(rt: &RiemannTensor<T>, g: &GeneralMetric<T>) -> Ricci<T> {
    let n = rt.n();
    let mut tensor = vec![T::zero(); n * n];
    for b in 0..n {
        for c in 0..n {
            let mut acc = T::zero();
            for a in 0..n {
                acc = acc + rt.get(a, a, b, c).clone();
            }
            tensor[b * n + c] = acc;
        }
    }
    let ginv = g.inverse().expect("metric already inverted once");
    let mut operator = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = T::zero();
            for k in 0..n {
                acc = acc + ginv[i * n + k].clone() * tensor[k * n + j].clone();
            }
            operator[i * n + j] = acc;
        }
    }
    Ricci { n, tensor, operator }
}

pub fn scalar_curvature<T: Scalar>(sc: &StructureConstants<T>, g: &GeneralMetric<T>) -> Result<T, CurvatureError> {
    Ok(ricci(sc, g)?.scalar())
}

/// `½ Σ R_{abcd} R^{abcd}` from lowered components and an inverse Gram matrix.
fn contract<T: Scalar>(m: usize, low: &dyn Fn(usize, usize, usize, usize) -> T, hinv: &[T]) -> T {
    let idx = |a: usize, b: usize, c: usize, d: usize| ((a * m + b) * m + c) * m + d;
    let mut t: Vec<T> = (0..m * m * m * m).map(|x| low(x / (m * m * m), x / (m * m) % m, x / m % m, x % m)).collect();
    let full = t.clone();
    for slot in 0..4 {
        let mut next = vec![T::zero(); t.len()];
        for x in 0..t.len() {
            let mut ix = [x / (m * m * m), x / (m * m) % m, x / m % m, x % m];
            let target = ix[slot];
            let mut acc = T::zero();
            for e in 0..m {
                let h = &hinv[target * m + e];
                if h.is_zero() {
                    continue;
                }
                ix[slot] = e;
                let v = &t[idx(ix[0], ix[1], ix[2], ix[3])];
                if !v.is_zero() {
                    acc = acc + h.clone() * v.clone();
                }
            }
            next[x] = acc;
        }
        t = next;
    }
    let total = full.iter().zip(&t).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    half::<T>() * total
}

/// `g(R, R)`, normalized as a sum over pairs `a < b` of the full contraction.
pub fn riemann_norm<T: Scalar>(sc: &StructureConstants<T>, g: &GeneralMetric<T>) -> Result<T, CurvatureError> {
    let rt = riemann(sc, g)?;
    let ginv = g.inverse()?;
    Ok(contract(sc.n(), &|a, b, c, d| rt.lowered(a, b, c, d).clone(), &ginv))
}

/// Basis of the derived algebra from the row space of all brackets.
pub fn derived_basis<T: Scalar>(sc: &StructureConstants<T>) -> Vec<Vec<T>> {
    let n = sc.n();
    let mut rows: Vec<Vec<T>> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let v: Vec<T> = (0..n).map(|k| sc.get(a, b, k).clone()).collect();
            if v.iter().any(|x| !x.is_zero()) {
                rows.push(v);
            }
        }
    }
    // row-reduce
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for mut v in rows {
        for (bv, &p) in basis.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for k in 0..n {
                    v[k] = v[k].clone() - f.clone() * bv[k].clone();
                }
            }
        }
        let Some(p) = (0..n).find(|&k| v[k].magnitude() > 1e-12) else { continue };
        let inv = T::one() / v[p].clone();
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for bv in basis.iter_mut() {
            if !bv[p].is_zero() {
                let f = bv[p].clone();
                for k in 0..n {
                    bv[k] = bv[k].clone() - f.clone() * v[k].clone();
                }
            }
        }
        basis.push(v);
        pivots.push(p);
    }
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    order.into_iter().map(|i| basis[i].clone()).collect()
}

/// `g(R′, R′)` for the curvature restricted to the derived algebra with its induced metric.
pub fn projected_norm<T: Scalar>(sc: &StructureConstants<T>, g: &GeneralMetric<T>) -> Result<T, CurvatureError> {
    let rt = riemann(sc, g)?;
    let f = derived_basis(sc);
    let m = f.len();
    if m == 0 {
        return Ok(T::zero());
    }
    let h: Vec<T> = (0..m * m).map(|x| g.inner(&f[x / m], &f[x % m])).collect();
    let hinv = invert(m, &h).ok_or(CurvatureError::DegenerateDerived)?;
    let low = |a: usize, b: usize, c: usize, d: usize| {
        let mut acc = T::zero();
        for (p, fa) in f[a].iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (q, fb) in f[b].iter().enumerate() {
                if fb.is_zero() {
                    continue;
                }
                for (r, fc) in f[c].iter().enumerate() {
                    if fc.is_zero() {
                        continue;
                    }
                    for (s, fd) in f[d].iter().enumerate() {
                        if fd.is_zero() {
                            continue;
                        }
                        acc = acc + fa.clone() * fb.clone() * fc.clone() * fd.clone() * rt.lowered(p, q, r, s).clone();
                    }
                }
            }
        }
        acc
    };
    Ok(contract(m, &low, &hinv))
}

/// First basis triple `(a, b, c)` (1-based) violating `<[a,b],c> + <b,[a,c]> = 0`, if any.
pub fn ad_invariance_check<T: Scalar>(
    sc: &StructureConstants<T>,
    g: &GeneralMetric<T>,
) -> Option<(usize, usize, usize)> {
    let n = sc.n();
    let unit = |i: usize| -> Vec<T> { (0..n).map(|k| if k == i { T::one() } else { T::zero() }).collect() };
    for a in 0..n {
        for b in 0..n {
            let ab = sc.bracket(&unit(a), &unit(b));
            for c in 0..n {
                let ac = sc.bracket(&unit(a), &unit(c));
                let v = g.inner(&ab, &unit(c)) + g.inner(&unit(b), &ac);
                if v.magnitude() > 1e-12 {
                    return Some((a + 1, b + 1, c + 1));
                }
            }
        }
    }
    None
}

/// Inertia `(positive, negative, zero)` of a symmetric matrix from its eigenvalues.
pub fn inertia(n: usize, gram: &[f64]) -> (usize, usize, usize) {
    let m = DMatrix::from_row_slice(n, n, gram);
    let eig = m.symmetric_eigen();
    let scale = gram.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
    let tol = 1e-10 * scale;
    let p = eig.eigenvalues.iter().filter(|&&x| x > tol).count();
    let q = eig.eigenvalues.iter().filter(|&&x| x < -tol).count();
    (p, q, n - p - q)
}

/// Exact Gram determinant sign check helper for rational metrics.
pub fn is_nondegenerate(g: &GeneralMetric<Rat>) -> bool {
    let rows: Vec<Vec<Rat>> = (0..g.n()).map(|a| (0..g.n()).map(|b| g.get(a, b).clone()).collect()).collect();
    g.n() == 0 || MatQ::from_rows(rows).rank() == g.n()
}
