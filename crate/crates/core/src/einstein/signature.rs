use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::curvature::inertia;
use crate::diagram::{node_list, NodePermutation};
use crate::error::EinsteinError;
use crate::linalg::VecF2;

/// Sign pattern: entry `true` stands for a negative value, `(-1)^d = sign`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVec {
    bits: VecF2,
}

impl SignVec {
    pub fn new(bits: VecF2) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    /// From a 1-based list of negative positions.
    pub fn from_negatives(n: usize, neg: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in neg {
            bits[i - 1] = true;
        }
        Self { bits }
    }

    /// Parses the compressed index list, `0` standing for 10; `""`, `"-"` or `"∅"` is empty.
    pub fn parse(s: &str, n: usize) -> Option<Self> {
        let s = s.trim();
        if s.is_empty() || s == "-" || s == "∅" {
            return Some(Self::zeros(n));
        }
        let nodes: Vec<usize> = if s.contains(',') {
            s.split(',').map(|t| t.trim().parse().ok()).collect::<Option<_>>()?
        } else {
            s.chars().map(|ch| ch.to_digit(10).map(|d| if d == 0 { 10 } else { d as usize })).collect::<Option<_>>()?
        };
        if nodes.iter().any(|&i| i == 0 || i > n) {
            return None;
        }
        Some(Self::from_negatives(n, &nodes))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// 1-based negative positions.
    pub fn negatives(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect()
    }

    pub fn complement(&self) -> Self {
        Self { bits: self.bits.iter().map(|b| !b).collect() }
    }

    pub fn add(&self, o: &SignVec) -> Self {
        Self { bits: self.bits.iter().zip(&o.bits).map(|(a, b)| a ^ b).collect() }
    }

    pub fn is_invariant(&self, sigma: &NodePermutation) -> bool {
        (1..=self.len()).all(|i| self.bits[i - 1] == self.bits[sigma.apply(i) - 1])
    }
}

impl Ord for SignVec {
    /// By number of negative entries, then lexicographically on the index lists.
    fn cmp(&self, o: &Self) -> Ordering {
        self.count()
            .cmp(&o.count())
            .then_with(|| self.negatives().cmp(&o.negatives()))
            .then_with(|| self.len().cmp(&o.len()))
    }
}

impl PartialOrd for SignVec {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for SignVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count() == 0 {
            return f.write_str("∅");
        }
        f.write_str(&node_list(&self.negatives()))
    }
}

impl Serialize for SignVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sorted, deduplicated copy.
pub fn sorted_signatures(s: &[SignVec]) -> Vec<SignVec> {
    let mut v = s.to_vec();
    v.sort();
    v.dedup();
    v
}

/// One representative of each pair `{δ, δ + [1]}`, the first in the order.
pub fn halved_signatures(s: &[SignVec]) -> Result<Vec<SignVec>, EinsteinError> {
    let all = sorted_signatures(s);
    let set: std::collections::BTreeSet<&SignVec> = all.iter().collect();
    if all.iter().any(|d| !set.contains(&d.complement())) {
        return Err(EinsteinError::NotComplementClosed);
    }
    let mut kept: Vec<SignVec> = Vec::new();
    let mut dropped = std::collections::BTreeSet::new();
    for d in all.iter() {
        if dropped.contains(d) {
            continue;
        }
        dropped.insert(d.complement());
        kept.push(d.clone());
    }
    Ok(kept)
}

/// `(p, q)` of `Σ g_i e^i ⊗ e^{σ(i)}` from the signs alone: 2-cycles are hyperbolic.
pub fn sigma_signature_from_signs(sigma: &NodePermutation, delta: &SignVec) -> (usize, usize) {
    let mut p = 0;
    let mut q = 0;
    for i in 1..=sigma.n() {
        let j = sigma.apply(i);
        if j == i {
            if delta.get(i - 1) {
                q += 1;
            } else {
                p += 1;
            }
        } else if i < j {
            p += 1;
            q += 1;
        }
    }
    (p, q)
}

/// `(p, q)` of a σ-diagonal metric, cross-checked against the eigenvalues of its Gram matrix.
pub fn sigma_signature(sigma: &NodePermutation, g: &[f64]) -> Result<(usize, usize), EinsteinError> {
    let n = sigma.n();
    if g.len() != n || g.contains(&0.0) {
        return Err(EinsteinError::ZeroMetricEntry);
    }
    let delta = SignVec::new(g.iter().map(|x| *x < 0.0).collect());
    let pq = sigma_signature_from_signs(sigma, &delta);
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        gram[i * n + sigma.apply(i + 1) - 1] = g[i];
    }
    let (p, q, z) = inertia(n, &gram);
    if z != 0 || (p, q) != pq {
        return Err(EinsteinError::Numeric(format!("inertia ({p},{q},{z}) disagrees with sign count {pq:?}")));
    }
    Ok(pq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(s: &str, n: usize) -> SignVec {
        SignVec::parse(s, n).unwrap()
    }

    #[test]
    fn order_is_length_then_lex() {
        let mut v = [sv("13", 6), sv("4", 6), sv("146", 6), sv("12", 6), sv("5", 6)];
        v.sort();
        let s: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert_eq!(s, ["4", "5", "12", "13", "146"]);
    }

    #[test]
    fn node_ten_prints_as_zero() {
        let d = sv("160", 10);
        assert_eq!(d.negatives(), vec![1, 6, 10]);
        assert_eq!(d.to_string(), "160");
        assert!(sv("169", 10) < d);
    }

    #[test]
    fn halving_keeps_first_of_each_pair() {
        let s = vec![SignVec::zeros(3), SignVec::zeros(3).complement()];
        assert_eq!(halved_signatures(&s).unwrap(), vec![SignVec::zeros(3)]);
        assert!(matches!(halved_signatures(&[sv("1", 3)]), Err(EinsteinError::NotComplementClosed)));
    }

    #[test]
    fn hyperbolic_pairs_count_once_each_way() {
        let s = NodePermutation::parse("(23)(45)", 7).unwrap();
        assert_eq!(sigma_signature_from_signs(&s, &sv("1", 7)), (4, 3));
        assert_eq!(sigma_signature(&s, &[-1.0, 1.0, 1.0, 2.0, 2.0, 1.0, 1.0]).unwrap(), (4, 3));
        assert_eq!(sigma_signature(&s, &[1.0; 7]).unwrap(), (5, 2));
    }
}
