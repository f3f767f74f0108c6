//! Nice nilpotent Lie algebras given by structure constants on a nice diagram.
//!
//! Convention: `de^k = Σ c_{ijk} e^{ij}` and `de^k(x, y) = -e^k([x, y])`, so
//! `[e_i, e_j] = -c_{ijk} e_k` for `i < j`.

pub mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::curvature::StructureConstants;
use crate::diagram::{IndexEntry, NiceDiagram, NodePermutation, RootMatrix};
use crate::error::{AlgebraError, DiagramError, ParseError};
use crate::linalg::rat::{fmt_rat, Rat, VecQ};
use crate::linalg::{kernel_basis, MatF2, MatQ};

pub use parse::{format_structure, parse_structure, Affine, ParsedStructure, ParsedTerm};

/// Coefficient of `e^{abc}` (a<b<c) in `d(de^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JacobiResidual {
    pub k: usize,
    pub triple: (usize, usize, usize),
    #[serde(serialize_with = "ser_rat")]
    pub value: Rat,
}

fn ser_rat<S: serde::Serializer>(x: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(x))
}

impl fmt::Display for JacobiResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b, c) = self.triple;
        write!(f, "d(de^{}) has {} e^{{{a}{b}{c}}}", self.k, fmt_rat(&self.value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceLieAlgebra {
    name: Option<String>,
    diagram: NiceDiagram,
    c: Vec<Rat>,
}

impl NiceLieAlgebra {
    /// `c[r]` is the constant on the `r`-th index entry. Checks nonvanishing and Jacobi.
    pub fn new(diagram: NiceDiagram, c: Vec<Rat>) -> Result<Self, AlgebraError> {
        assert_eq!(c.len(), diagram.m(), "one constant per index entry");
        if let Some(r) = c.iter().position(Zero::is_zero) {
            return Err(AlgebraError::ZeroCoefficient(diagram.index_set()[r].to_string()));
        }
        let a = Self { name: None, diagram, c };
        let res = a.jacobi_check();
        if let Some(first) = res.first() {
            return Err(AlgebraError::Jacobi(first.to_string()));
        }
        Ok(a)
    }

    /// Parses a structure string with rational coefficients only.
    pub fn parse(s: &str) -> Result<Self, AlgebraError> {
        let fam = FamilyAlgebra::parse(s)?;
        fam.substitute(&BTreeMap::new())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.diagram.n()
    }

    pub fn m(&self) -> usize {
        self.diagram.m()
    }

    pub fn diagram(&self) -> &NiceDiagram {
        &self.diagram
    }

    pub fn c(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_abelian(&self) -> bool {
        self.m() == 0
    }

    pub fn root_matrix(&self) -> RootMatrix {
        self.diagram.root_matrix()
    }

    /// `[e_i, e_j]` as `(k, coefficient)`, or `None` when it vanishes.
    pub fn bracket(&self, i: usize, j: usize) -> Option<(usize, Rat)> {
        if i == j {
            return None;
        }
        let (a, b) = (i.min(j), i.max(j));
        self.diagram.index_set().iter().position(|e| e.i == a && e.j == b).map(|r| {
            let v = -self.c[r].clone();
            (self.diagram.index_set()[r].k, if i < j { v } else { -v })
        })
    }

    /// Dense bracket table in the curvature module's format.
    pub fn structure_constants(&self) -> StructureConstants<Rat> {
        let n = self.n();
        let mut sc = StructureConstants::zeros(n);
        for (e, c) in self.diagram.index_set().iter().zip(&self.c) {
            sc.set(e.i - 1, e.j - 1, e.k - 1, -c.clone());
            sc.set(e.j - 1, e.i - 1, e.k - 1, c.clone());
        }
        sc
    }

    pub fn structure_string(&self) -> String {
        let terms: Vec<(usize, usize, usize, Affine)> = self
            .diagram
            .index_set()
            .iter()
            .zip(&self.c)
            .map(|(e, c)| (e.i, e.j, e.k, Affine::rational(c.clone())))
            .collect();
        format_structure(self.n(), &terms)
    }

    /// Nonzero coefficients of `d(de^k)` for every `k`; empty iff `d² = 0`.
    pub fn jacobi_check(&self) -> Vec<JacobiResidual> {
        let n = self.n();
        let mut de: Vec<BTreeMap<(usize, usize), Rat>> = vec![BTreeMap::new(); n + 1];
        for (e, c) in self.diagram.index_set().iter().zip(&self.c) {
            de[e.k].insert((e.i, e.j), c.clone());
        }
        let mut out = Vec::new();
        for k in 1..=n {
            let mut three: BTreeMap<(usize, usize, usize), Rat> = BTreeMap::new();
            for (&(i, j), c) in &de[k] {
                // d(e^i ∧ e^j) = de^i ∧ e^j - e^i ∧ de^j
                for (&(a, b), ci) in &de[i] {
                    add_wedge(&mut three, [a, b, j], c * ci);
                }
                for (&(a, b), cj) in &de[j] {
                    add_wedge(&mut three, [i, a, b], -(c * cj));
                }
            }
            for (triple, value) in three {
                if !value.is_zero() {
                    out.push(JacobiResidual { k, triple, value });
                }
            }
        }
        out
    }

    /// `c̃ = σ̃(c)` indexed like `c`.
    pub fn tilde_c(&self, sigma: &NodePermutation) -> Result<Vec<Rat>, DiagramError> {
        let action = self.diagram.sigma_arrow_action(sigma)?;
        let mut out = vec![Rat::zero(); self.m()];
        for (r, c) in self.c.iter().enumerate() {
            out[action.perm[r]] = if action.sign[r] < 0 { -c.clone() } else { c.clone() };
        }
        Ok(out)
    }

    /// Basis of `ker M`, the diagonal derivations.
    pub fn diagonal_derivations(&self) -> Vec<VecQ> {
        if self.m() == 0 {
            return kernel_basis(&MatQ::zeros(0, self.n()));
        }
        kernel_basis(&self.root_matrix().q)
    }

    /// A diagonal derivation with nonzero trace, if any.
    pub fn nonzero_trace_derivation(&self) -> Option<VecQ> {
        self.diagonal_derivations().into_iter().find(|v| !v.iter().fold(Rat::zero(), |a, x| a + x).is_zero())
    }

    pub fn fundamental_domain(&self) -> FundamentalDomain {
        let rm = self.root_matrix();
        let mut f2_rows: Vec<Vec<bool>> = Vec::new();
        let mut q_rows: Vec<VecQ> = Vec::new();
        let mut one = Vec::new();
        for r in 0..self.m() {
            let mut trial = f2_rows.clone();
            trial.push(rm.f2.row(r).to_vec());
            if MatF2::from_rows(&trial, self.n()).rank() == trial.len() {
                f2_rows = trial;
                q_rows.push(rm.q.row(r).to_vec());
                one.push(r);
            }
        }
        let mut sign = Vec::new();
        let mut free = Vec::new();
        for r in 0..self.m() {
            if one.contains(&r) {
                continue;
            }
            let mut trial = q_rows.clone();
            trial.push(rm.q.row(r).to_vec());
            if MatQ::from_rows(trial.clone()).rank() == trial.len() {
                q_rows = trial;
                sign.push(r);
            } else {
                free.push(r);
            }
        }
        let entries = |v: &[usize]| v.iter().map(|&r| self.diagram.index_set()[r]).collect();
        FundamentalDomain {
            normalized_one: entries(&one),
            normalized_sign: entries(&sign),
            free: entries(&free),
            rank_f2: one.len(),
            rank_q: one.len() + sign.len(),
        }
    }

    fn bracket_vec(&self, x: &[Rat], y: &[Rat]) -> VecQ {
        let mut out = vec![Rat::zero(); self.n()];
        for (e, c) in self.diagram.index_set().iter().zip(&self.c) {
            // [x, y] picks up (x_i y_j - x_j y_i)·(-c) on e_k
            let w = &x[e.i - 1] * &y[e.j - 1] - &x[e.j - 1] * &y[e.i - 1];
            if !w.is_zero() {
                out[e.k - 1] -= w * c;
            }
        }
        out
    }

    /// Involutivity of the ±1 eigendistributions of the split `plus ⊕ complement`.
    pub fn eigendistribution_involutive(&self, plus: &[usize]) -> Result<(bool, bool), AlgebraError> {
        let plus: BTreeSet<usize> = plus.iter().copied().collect();
        if plus.iter().any(|&i| i == 0 || i > self.n()) {
            return Err(AlgebraError::BadSplit(self.n()));
        }
        let closed = |inside: &dyn Fn(usize) -> bool| {
            self.diagram.index_set().iter().all(|e| !(inside(e.i) && inside(e.j)) || inside(e.k))
        };
        Ok((closed(&|i| plus.contains(&i)), closed(&|i| !plus.contains(&i))))
    }

    /// Involutivity of the ±1 eigenspaces of `σ` acting on the algebra.
    pub fn sigma_eigenspace_involutivity(&self, sigma: &NodePermutation) -> Result<(bool, bool), DiagramError> {
        if !self.diagram.is_automorphism(sigma) {
            return Err(DiagramError::NotAutomorphism(sigma.to_string()));
        }
        if !sigma.is_involution() {
            return Err(DiagramError::NotInvolution(sigma.to_string()));
        }
        let n = self.n();
        let basis = |plus: bool| -> Vec<VecQ> {
            (1..=n)
                .filter(|&i| if plus { i <= sigma.apply(i) } else { i < sigma.apply(i) })
                .map(|i| {
                    let mut v = vec![Rat::zero(); n];
                    v[i - 1] += Rat::one();
                    let s = sigma.apply(i);
                    if plus {
                        v[s - 1] += Rat::one();
                    } else {
                        v[s - 1] -= Rat::one();
                    }
                    v
                })
                .collect()
        };
        let member = |v: &[Rat], plus: bool| {
            (1..=n).all(|i| {
                let (a, b) = (&v[i - 1], &v[sigma.apply(i) - 1]);
                if plus {
                    a == b
                } else {
                    *a == -b.clone()
                }
            })
        };
        let check = |plus: bool| {
            let b = basis(plus);
            b.iter().enumerate().all(|(x, u)| b[x + 1..].iter().all(|w| member(&self.bracket_vec(u, w), plus)))
        };
        Ok((check(true), check(false)))
    }
}

impl fmt::Display for NiceLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            write!(f, "{name} ")?;
        }
        write!(f, "{}", self.structure_string())
    }
}

fn add_wedge(three: &mut BTreeMap<(usize, usize, usize), Rat>, mut idx: [usize; 3], value: Rat) {
    if idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2] {
        return;
    }
    let mut sign = 1;
    for a in 0..3 {
        for b in 0..2 - a {
            if idx[b] > idx[b + 1] {
                idx.swap(b, b + 1);
                sign = -sign;
            }
        }
    }
    let e = three.entry((idx[0], idx[1], idx[2])).or_insert_with(Rat::zero);
    if sign > 0 {
        *e += value;
    } else {
        *e -= value;
    }
}

/// Normal form of the structure constants up to diagonal rescaling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalDomain {
    pub normalized_one: Vec<IndexEntry>,
    pub normalized_sign: Vec<IndexEntry>,
    pub free: Vec<IndexEntry>,
    pub rank_f2: usize,
    pub rank_q: usize,
}

/// Algebra whose constants may be affine in named parameters, e.g. `(lambda-1)e^{12}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyAlgebra {
    n: usize,
    diagram: NiceDiagram,
    coeffs: Vec<Affine>,
}

impl FamilyAlgebra {
    pub fn parse(s: &str) -> Result<Self, AlgebraError> {
        let parsed = parse_structure(s)?;
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &parsed.terms {
            if let Some(&k) = seen.get(&(t.i, t.j)) {
                if k != t.k {
                    return Err(AlgebraError::NotNiceBasis { i: t.i, j: t.j });
                }
            }
            seen.insert((t.i, t.j), t.k);
        }
        let entries: Vec<IndexEntry> = parsed.terms.iter().map(|t| IndexEntry::new(t.i, t.j, t.k)).collect();
        let diagram = NiceDiagram::from_entries(parsed.n, &entries)?;
        let mut coeffs = vec![Affine::default(); diagram.m()];
        for t in parsed.terms {
            let r = diagram.position(&IndexEntry::new(t.i, t.j, t.k)).expect("entry present");
            coeffs[r] = t.coef;
        }
        Ok(Self { n: parsed.n, diagram, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagram(&self) -> &NiceDiagram {
        &self.diagram
    }

    pub fn coeffs(&self) -> &[Affine] {
        &self.coeffs
    }

    pub fn params(&self) -> BTreeSet<String> {
        self.coeffs.iter().flat_map(|c| c.params().cloned()).collect()
    }

    /// Fixes the given parameters; every parameter must be bound.
    pub fn substitute(&self, values: &BTreeMap<String, Rat>) -> Result<NiceLieAlgebra, AlgebraError> {
        let c: Vec<Rat> = self.coeffs.iter().map(|a| a.eval(values)).collect::<Result<_, ParseError>>()?;
        NiceLieAlgebra::new(self.diagram.clone(), c)
    }

    /// Fixes some parameters and keeps the others symbolic.
    pub fn partial(&self, values: &BTreeMap<String, Rat>) -> FamilyAlgebra {
        Self {
            n: self.n,
            diagram: self.diagram.clone(),
            coeffs: self.coeffs.iter().map(|a| a.partial(values)).collect(),
        }
    }

    pub fn structure_string(&self) -> String {
        let terms: Vec<(usize, usize, usize, Affine)> =
            self.diagram.index_set().iter().zip(&self.coeffs).map(|(e, c)| (e.i, e.j, e.k, c.clone())).collect();
        format_structure(self.n, &terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::{rat, ratio};

    fn alg(s: &str) -> NiceLieAlgebra {
        NiceLieAlgebra::parse(s).unwrap()
    }

    #[test]
    fn heisenberg_bracket() {
        let h = alg("(0,0,e^{12})");
        assert_eq!(h.bracket(1, 2), Some((3, rat(-1))));
        assert_eq!(h.bracket(2, 1), Some((3, rat(1))));
        assert_eq!(h.bracket(1, 3), None);
    }

    #[test]
    fn print_parse_roundtrip() {
        for s in [
            "(0,0,0,e^{12},e^{13},e^{25}+e^{34})",
            "(0,0,-e^{12},e^{13},e^{14}+e^{23},e^{15}+e^{24},e^{25}+e^{34})",
            "(0,0,0,0,0,0,0,0,e^{12}+e^{34}+e^{56}+e^{78},e^{15}+e^{26}+e^{37}+e^{48})",
            "(0,0,0,-1/2e^{12},1/2e^{13},e^{23},e^{16}+e^{25}+e^{34})",
        ] {
            let a = alg(s);
            assert_eq!(a.structure_string(), s);
            assert_eq!(alg(&a.structure_string()), a);
        }
    }

    #[test]
    fn family_roundtrip() {
        let s = "(0,0,0,(lambda-1)e^{12},lambda e^{13},e^{23},e^{16}+e^{25}+e^{34})";
        let f = FamilyAlgebra::parse(s).unwrap();
        assert_eq!(f.params(), BTreeSet::from(["lambda".to_string()]));
        assert_eq!(FamilyAlgebra::parse(&f.structure_string()).unwrap(), f);
        let a = f.substitute(&BTreeMap::from([("lambda".to_string(), ratio(1, 2))])).unwrap();
        assert_eq!(a.c(), &[ratio(-1, 2), ratio(1, 2), rat(1), rat(1), rat(1), rat(1)]);
        assert!(matches!(NiceLieAlgebra::parse(s), Err(AlgebraError::Parse(ParseError::UnboundParameter(_)))));
        assert!(matches!(
            f.substitute(&BTreeMap::from([("lambda".to_string(), rat(1))])),
            Err(AlgebraError::ZeroCoefficient(_))
        ));
    }

    #[test]
    fn jacobi_detects_flipped_sign() {
        assert!(alg("(0,0,0,e^{12},e^{13},e^{25}+e^{34})").jacobi_check().is_empty());
        let err = NiceLieAlgebra::parse("(0,0,0,e^{12},e^{13},-e^{25}+e^{34})").unwrap_err();
        assert!(matches!(err, AlgebraError::Jacobi(_)));
    }

    #[test]
    fn abelian_facts() {
        let a = alg("(0,0,0)");
        assert!(a.jacobi_check().is_empty());
        assert_eq!(a.diagonal_derivations().len(), 3);
        assert_eq!(a.eigendistribution_involutive(&[1]).unwrap(), (true, true));
    }

    #[test]
    fn not_nice_basis() {
        assert!(NiceLieAlgebra::parse("(0,0,e^{12},e^{12})").is_err());
    }
}
