//! Smith normal form over the integers and multiplicative systems `∏_j g_j^{M_ij} = r_i`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::{exact_root, ln_abs, pow_i, Rat};

pub type MatZ = Vec<Vec<BigInt>>;

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal with `S_ii | S_(i+1)(i+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub u: MatZ,
    pub s: MatZ,
    pub v: MatZ,
    pub rank: usize,
}

impl Smith {
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.s[i][i].clone()).collect()
    }
}

pub fn to_matz(rows: &[Vec<i64>]) -> MatZ {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity_z(n: usize) -> MatZ {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mul_z(a: &MatZ, b: &MatZ) -> MatZ {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|c| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][c])).collect()
        })
        .collect()
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det_z(m: &MatZ) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn smith_normal_form(m: &MatZ) -> Smith {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.clone();
    let mut u = identity_z(rows);
    let mut v = identity_z(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let Some((pr, pc)) = smallest_nonzero(&a, t) else { break };
        a.swap(t, pr);
        u.swap(t, pr);
        swap_cols(&mut a, t, pc);
        swap_cols(&mut v, t, pc);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_sub(&mut a, i, t, &q);
                row_sub(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, j, t, &q);
                col_sub(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // pivot row and column are clear; enforce divisibility on the block
                let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
                match bad {
                    None => break,
                    Some(i) => {
                        row_add(&mut a, t, i);
                        row_add(&mut u, t, i);
                        continue;
                    }
                }
            }
            // move the smallest nonzero entry of the pivot row/column to the pivot
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.1 == t {
                a.swap(t, best.0);
                u.swap(t, best.0);
            } else {
                swap_cols(&mut a, t, best.1);
                swap_cols(&mut v, t, best.1);
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
        t += 1;
    }
    Smith { u, s: a, v, rank: t }
}

fn smallest_nonzero(a: &MatZ, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn swap_cols(a: &mut MatZ, x: usize, y: usize) {
    if x != y {
        for row in a.iter_mut() {
            row.swap(x, y);
        }
    }
}

// row_i -= q * row_t
fn row_sub(a: &mut MatZ, i: usize, t: usize, q: &BigInt) {
    let src = a[t].clone();
    for (x, s) in a[i].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

fn row_add(a: &mut MatZ, t: usize, i: usize) {
    let src = a[i].clone();
    for (x, s) in a[t].iter_mut().zip(&src) {
        *x += s;
    }
}

// col_j -= q * col_t
fn col_sub(a: &mut MatZ, j: usize, t: usize, q: &BigInt) {
    for row in a.iter_mut() {
        let d = q * &row[t];
        row[j] -= d;
    }
}

/// Solution of `∏_j g_j^{M_ij} = r_i` for positive `g`, with `r_i > 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplicativeSolution {
    /// Rational base point (free gauge parameters set to 1).
    Exact(Vec<Rat>),
    /// A real solution exists but needs irrational roots; `log g` given in floating point.
    Real(Vec<f64>),
    Inconsistent,
}

/// Integer gauge directions: `v` with `M v = 0`, so `g ↦ g · exp(t v)` preserves every product.
pub fn gauge_basis(smith: &Smith) -> Vec<Vec<BigInt>> {
    let cols = smith.v.len();
    (smith.rank..cols).map(|l| (0..cols).map(|j| smith.v[j][l].clone()).collect()).collect()
}

pub fn multiplicative_solve(m: &MatZ, r: &[Rat]) -> MultiplicativeSolution {
    assert_eq!(m.len(), r.len());
    assert!(r.iter().all(Signed::is_positive), "right-hand side must be positive");
    let cols = m.first().map_or(0, Vec::len);
    let smith = smith_normal_form(m);
    let z: Vec<Rat> = smith
        .u
        .iter()
        .map(|urow| {
            urow.iter()
                .zip(r)
                .fold(Rat::one(), |acc, (e, ri)| acc * pow_i(ri, e.to_i64().expect("unimodular entry overflow")))
        })
        .collect();
    if z[smith.rank..].iter().any(|zi| !zi.is_one()) {
        return MultiplicativeSolution::Inconsistent;
    }
    let mut h: Vec<Option<Rat>> = vec![Some(Rat::one()); cols];
    let mut log_h = vec![0.0; cols];
    for i in 0..smith.rank {
        let d = smith.s[i][i].to_u32().expect("invariant factor overflow");
        h[i] = exact_root(&z[i], d);
        log_h[i] = ln_abs(&z[i]) / f64::from(d);
    }
    if h.iter().all(Option::is_some) {
        let h: Vec<Rat> = h.into_iter().map(Option::unwrap).collect();
        let g = (0..cols)
            .map(|j| {
                (0..cols).fold(Rat::one(), |acc, l| {
                    acc * pow_i(&h[l], smith.v[j][l].to_i64().expect("unimodular entry overflow"))
                })
            })
            .collect();
        MultiplicativeSolution::Exact(g)
    } else {
        let g = (0..cols).map(|j| (0..cols).map(|l| smith.v[j][l].to_f64().unwrap() * log_h[l]).sum()).collect();
        MultiplicativeSolution::Real(g)
    }
}
