//! Linear algebra over the two-element field.

#![allow(clippy::needless_range_loop)]

use thiserror::Error;

/// Vector over 𝔽₂; `true` is 1.
pub type VecF2 = Vec<bool>;

pub const DEFAULT_KERNEL_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("F2 kernel has 2^{dim} elements, above the cap of {cap}")]
pub struct KernelTooLarge {
    pub dim: usize,
    pub cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, bits: vec![false; rows * cols] }
    }

    pub fn from_rows(rows: &[VecF2], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols);
            for (c, &b) in row.iter().enumerate() {
                m.set(r, c, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[bool]) -> VecF2 {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|r| self.row(r).iter().zip(v).filter(|(a, b)| **a && **b).count() % 2 == 1).collect()
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        for c in 0..self.cols {
            let v = self.get(dst, c) ^ self.get(src, c);
            self.set(dst, c, v);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.bits.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (MatF2, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..m.cols {
            if lead >= m.rows {
                break;
            }
            let Some(p) = (lead..m.rows).find(|&r| m.get(r, c)) else { continue };
            m.swap_rows(p, lead);
            for r in 0..m.rows {
                if r != lead && m.get(r, c) {
                    m.xor_row_into(lead, r);
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

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Basis of the kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<VecF2> {
        let (red, pivots) = self.rref();
        (0..self.cols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = vec![false; self.cols];
                v[f] = true;
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = red.get(r, f);
                }
                v
            })
            .collect()
    }

    /// One solution of `M x = e`, or `None` if `e` is outside the image.
    pub fn solve_one(&self, e: &[bool]) -> Option<VecF2> {
        assert_eq!(e.len(), self.rows, "right-hand side length must equal row count");
        let mut aug = MatF2::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, e[r]);
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![false; self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = red.get(r, self.cols);
        }
        Some(x)
    }

    pub fn in_image(&self, e: &[bool]) -> bool {
        self.solve_one(e).is_some()
    }
}

/// All solutions of `M δ = e`, sorted; empty when `e ∉ im M`.
pub fn f2_solve_all(m: &MatF2, e: &[bool], cap: usize) -> Result<Vec<VecF2>, KernelTooLarge> {
    let kernel = m.kernel();
    let dim = kernel.len();
    if dim >= usize::BITS as usize || (1usize << dim) > cap {
        return Err(KernelTooLarge { dim, cap });
    }
    let Some(x0) = m.solve_one(e) else { return Ok(Vec::new()) };
    let mut out = Vec::with_capacity(1 << dim);
    for mask in 0u64..(1u64 << dim) {
        let mut x = x0.clone();
        for (b, kv) in kernel.iter().enumerate() {
            if mask >> b & 1 == 1 {
                for (xi, ki) in x.iter_mut().zip(kv) {
                    *xi ^= ki;
                }
            }
        }
        out.push(x);
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> VecF2 {
        s.chars().map(|c| c == '1').collect()
    }

    #[test]
    fn solve_all_matches_brute_force() {
        let m = MatF2::from_rows(&[bits("1101"), bits("0110"), bits("1011")], 4);
        for mask in 0..8u8 {
            let e: VecF2 = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let got = f2_solve_all(&m, &e, DEFAULT_KERNEL_CAP).unwrap();
            let mut brute: Vec<VecF2> = (0..16u8)
                .map(|x| (0..4).map(|i| x >> i & 1 == 1).collect::<VecF2>())
                .filter(|x| m.mul_vec(x) == e)
                .collect();
            brute.sort();
            assert_eq!(got, brute);
        }
    }

    #[test]
    fn homogeneous_gives_kernel() {
        let m = MatF2::from_rows(&[bits("110")], 3);
        let sols = f2_solve_all(&m, &[false], DEFAULT_KERNEL_CAP).unwrap();
        assert_eq!(sols.len(), 4);
        assert!(sols.iter().all(|s| m.mul_vec(s) == vec![false]));
    }

    #[test]
    fn cap_is_enforced() {
        let m = MatF2::zeros(1, 5);
        assert_eq!(f2_solve_all(&m, &[false], 16), Err(KernelTooLarge { dim: 5, cap: 16 }));
    }
}
