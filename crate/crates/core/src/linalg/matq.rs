use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rat::{fmt_rat, rat, Rat, VecQ};

/// Dense row-major matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatQ {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl MatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<VecQ>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n_rows = rows.len();
        let mut entries = Vec::with_capacity(n_rows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r);
        }
        Self { rows: n_rows, cols, entries }
    }

    /// Builds a matrix with explicit shape; handles the zero-row case where
    /// `from_rows` cannot infer the column count.
    pub fn from_rows_with_cols(rows: Vec<VecQ>, cols: usize) -> Self {
        if rows.is_empty() {
            return Self::zeros(0, cols);
        }
        Self::from_rows(rows)
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> VecQ {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.cols, other.rows);
        let mut out = MatQ::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> VecQ {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r).iter().zip(v).filter(|(a, _)| !a.is_zero()).fold(Rat::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (MatQ, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead >= m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| !m[(r, c)].is_zero()) else { continue };
            m.swap_rows(p, lead);
            let inv = m[(lead, c)].recip();
            for k in c..m.cols {
                let v = &m[(lead, k)] * &inv;
                m[(lead, k)] = v;
            }
            for r in 0..m.rows {
                if r != lead && !m[(r, c)].is_zero() {
                    let f = m[(r, c)].clone();
                    for k in c..m.cols {
                        let v = &m[(lead, k)] * &f;
                        m[(r, k)] -= v;
                    }
                }
            }
            pivots.push(c);
            lead += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Rows selected by index, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> MatQ {
        MatQ::from_rows_with_cols(idx.iter().map(|&r| self.row(r).to_vec()).collect(), self.cols)
    }

    /// Exact inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<MatQ> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = MatQ::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = Rat::one();
        }
        let (red, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut inv = MatQ::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv[(r, c)] = red[(r, n + c)].clone();
            }
        }
        Some(inv)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for MatQ {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for MatQ {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.entries[r * self.cols + c]
    }
}

impl fmt::Display for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..self.rows).map(|r| self.row(r).iter().map(fmt_rat).collect()).collect();
        let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// `particular + span(basis)`: the solution set of a consistent linear system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineSet {
    #[serde(with = "crate::record::rat_vec_serde")]
    pub particular: VecQ,
    #[serde(with = "crate::record::rat_mat_serde")]
    pub basis: Vec<VecQ>,
}

impl AffineSet {
    pub fn ambient_dim(&self) -> usize {
        self.particular.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The point `particular + Σ t_i basis_i`.
    pub fn point(&self, params: &[Rat]) -> VecQ {
        assert_eq!(params.len(), self.basis.len());
        let mut x = self.particular.clone();
        for (t, b) in params.iter().zip(&self.basis) {
            if t.is_zero() {
                continue;
            }
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += t * bi;
            }
        }
        x
    }

    pub fn point_f64(&self, params: &[f64]) -> Vec<f64> {
        let mut x: Vec<f64> = self.particular.iter().map(super::rat::to_f64).collect();
        for (t, b) in params.iter().zip(&self.basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += t * super::rat::to_f64(bi);
            }
        }
        x
    }

    /// Coordinates that vanish on the whole set.
    pub fn identically_zero_coordinates(&self) -> Vec<usize> {
        (0..self.ambient_dim())
            .filter(|&j| self.particular[j].is_zero() && self.basis.iter().all(|b| b[j].is_zero()))
            .collect()
    }

    /// Row `j` of the parametrization as `(constant, coefficients)`.
    pub fn coordinate(&self, j: usize) -> (Rat, VecQ) {
        (self.particular[j].clone(), self.basis.iter().map(|b| b[j].clone()).collect())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.particular.iter().all(Zero::is_zero)
    }
}

/// A ℚ-basis of `{v : M v = 0}`, one vector per free column of the RREF
/// (free column set to 1, other free columns 0). Empty iff `M` is injective.
pub fn kernel_basis(m: &MatQ) -> Vec<VecQ> {
    let (red, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); m.cols()];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -red[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Full solution set of `M x = b`, or `None` when inconsistent.
pub fn solve_affine(m: &MatQ, b: &[Rat]) -> Option<AffineSet> {
    assert_eq!(b.len(), m.rows(), "right-hand side length must equal row count");
    let mut aug = MatQ::zeros(m.rows(), m.cols() + 1);
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            aug[(r, c)] = m[(r, c)].clone();
        }
        aug[(r, m.cols())] = b[r].clone();
    }
    let (red, pivots) = aug.rref();
    if pivots.last() == Some(&m.cols()) {
        return None;
    }
    let mut particular = vec![Rat::zero(); m.cols()];
    for (r, &p) in pivots.iter().enumerate() {
        particular[p] = red[(r, m.cols())].clone();
    }
    Some(AffineSet { particular, basis: kernel_basis(m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::rat_vec;

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(kernel_basis(&MatQ::identity(3)).is_empty());
    }

    #[test]
    fn homogeneous_system_has_zero_particular() {
        let m = MatQ::from_ints(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let s = solve_affine(&m, &rat_vec(&[0, 0])).unwrap();
        assert!(s.is_homogeneous());
        assert_eq!(s.dim(), 2);
        for b in &s.basis {
            assert!(m.mul_vec(b).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn inconsistent_system() {
        let m = MatQ::from_ints(&[vec![1, 1], vec![1, 1]]);
        assert!(solve_affine(&m, &rat_vec(&[1, 2])).is_none());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = MatQ::from_ints(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), MatQ::identity(2));
        assert!(MatQ::from_ints(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }
}
