use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use nice_einstein::algebra::NiceLieAlgebra;
use nice_einstein::catalog;
use nice_einstein::curvature::{
    connection_residuals, inertia, levi_civita, ricci, riemann, GeneralMetric, StructureConstants,
};
use nice_einstein::diagram::{validate_nice, NodePermutation};
use nice_einstein::einstein::{
    classify, metric_for, oracle_ricci_operator, ricci_diagonal, ricci_sigma, sigma_signature_from_signs,
    sign_condition, Mode, Options,
};
use nice_einstein::linalg::smith::{det_z, mul_z, smith_normal_form};
use nice_einstein::linalg::{
    f2_solve_all, kernel_basis, parse_rat, rat, ratio, solve_affine, strict_sign_feasible, MatF2, MatQ, Rat,
};

/// Every catalogue algebra at its first sample parameter values.
fn algebras() -> &'static [(String, NiceLieAlgebra)] {
    static CELL: OnceLock<Vec<(String, NiceLieAlgebra)>> = OnceLock::new();
    CELL.get_or_init(|| {
        catalog::builtin()
            .into_iter()
            .map(|e| {
                let values: BTreeMap<String, Rat> =
                    e.params.iter().map(|p| (p.name.clone(), parse_rat(&p.samples[0]).unwrap())).collect();
                let a = e.family().unwrap().substitute(&values).unwrap();
                (e.name, a)
            })
            .collect()
    })
}

fn small_rat() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| ratio(p, q))
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    (1i64..=6, 1i64..=4, any::<bool>()).prop_map(|(p, q, neg)| ratio(if neg { -p } else { p }, q))
}

fn metric_entries() -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(nonzero_rat(), 10)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = MatQ> {
    prop::collection::vec(small_rat(), rows * cols)
        .prop_map(move |v| MatQ::from_rows(v.chunks(cols).map(<[Rat]>::to_vec).collect()))
}

fn neg(v: &[Rat]) -> Vec<Rat> {
    v.iter().map(|x| -x.clone()).collect()
}

// ---- exact linear algebra ----

proptest! {
    #[test]
    fn solve_affine_solutions_are_exact(m in matrix(3, 5), b in prop::collection::vec(small_rat(), 3)) {
        if let Some(set) = solve_affine(&m, &b) {
            prop_assert_eq!(m.mul_vec(&set.particular), b);
            for v in &set.basis {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }
    }

    #[test]
    fn rank_nullity(m in matrix(4, 6)) {
        let ker = kernel_basis(&m);
        prop_assert_eq!(ker.len() + m.rank(), m.cols());
        for v in &ker {
            prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn f2_solutions_are_complete(bits in prop::collection::vec(any::<bool>(), 20), e in prop::collection::vec(any::<bool>(), 4)) {
        let rows: Vec<Vec<bool>> = bits.chunks(5).map(<[bool]>::to_vec).collect();
        let m = MatF2::from_rows(&rows, 5);
        let all = f2_solve_all(&m, &e, 1 << 10).unwrap();
        for d in &all {
            prop_assert_eq!(&m.mul_vec(d), &e);
        }
        let brute = (0u32..32).filter(|mask| {
            let d: Vec<bool> = (0..5).map(|j| mask >> j & 1 == 1).collect();
            m.mul_vec(&d) == e
        }).count();
        prop_assert_eq!(all.len(), brute);
        prop_assert!(all.is_empty() || all.len() == 1 << m.kernel().len());
    }

    #[test]
    fn smith_form_is_a_unimodular_diagonalization(entries in prop::collection::vec(-5i64..=5, 12)) {
        let m: Vec<Vec<BigInt>> = entries.chunks(4).map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let s = smith_normal_form(&m);
        prop_assert_eq!(mul_z(&mul_z(&s.u, &m), &s.v), s.s.clone());
        prop_assert!(det_z(&s.u).abs().is_one());
        prop_assert!(det_z(&s.v).abs().is_one());
        for (i, row) in s.s.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                prop_assert!(i == j || x.is_zero());
            }
        }
        let f = s.invariant_factors();
        for w in f.windows(2) {
            prop_assert!(w[1].is_multiple_of(&w[0]));
        }
    }

    #[test]
    fn sign_feasibility_witness_has_the_claimed_signs(m in matrix(2, 4), eps in prop::collection::vec(any::<bool>(), 4)) {
        let set = solve_affine(&m, &[rat(0), rat(0)]).unwrap();
        if let Some((params, point)) = strict_sign_feasible(&set, &eps) {
            prop_assert_eq!(set.point(&params), point.clone());
            prop_assert!(m.mul_vec(&point).iter().all(Zero::is_zero));
            for (x, &e) in point.iter().zip(&eps) {
                let ok = if e { x.is_negative() } else { x.is_positive() };
                prop_assert!(ok);
            }
        }
    }
}

// ---- diagrams and algebras ----

#[test]
fn catalog_diagrams_are_nice() {
    for (name, a) in algebras() {
        assert!(validate_nice(&a.diagram().raw()).is_valid(), "{name}");
        for row in &a.root_matrix().ints {
            assert_eq!(row.iter().sum::<i64>(), -1, "{name}");
            assert_eq!(row.iter().filter(|&&x| x == 1).count(), 1, "{name}");
            assert_eq!(row.iter().filter(|&&x| x == -1).count(), 2, "{name}");
        }
    }
}

#[test]
fn automorphisms_form_a_group() {
    for (name, a) in algebras() {
        let auts = a.diagram().automorphisms().unwrap();
        for s in &auts {
            assert!(auts.contains(&s.inverse()), "{name}: inverse of {s}");
            for t in &auts {
                assert!(auts.contains(&s.compose(t)), "{name}: {s}∘{t}");
            }
        }
    }
}

#[test]
fn involution_acts_on_arrows_as_an_involution() {
    for (name, a) in algebras() {
        let d = a.diagram();
        for (s, _) in d.involutions().unwrap() {
            let act = d.sigma_arrow_action(&s).unwrap();
            for (i, &p) in act.perm.iter().enumerate() {
                assert_eq!(act.perm[p], i, "{name} {s}");
                assert_eq!(act.sign[i] * act.sign[p], 1, "{name} {s}");
            }
        }
    }
}

#[test]
fn print_parse_roundtrip_on_catalog() {
    for (name, a) in algebras() {
        assert_eq!(&NiceLieAlgebra::parse(&a.structure_string()).unwrap(), a, "{name}");
    }
}

/// Jacobi identity by expanding all basis triples.
fn jacobi_brute(sc: &StructureConstants<Rat>) -> bool {
    let n = sc.n();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for t in 0..n {
                    let mut s = rat(0);
                    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
                        for m in 0..n {
                            s += sc.get(y, z, m) * sc.get(x, m, t);
                        }
                    }
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_check_agrees_with_expansion(idx in 0usize..64, flip in 0usize..64) {
        let (name, a) = &algebras()[idx % algebras().len()];
        let mut c = a.c().to_vec();
        let r = flip % c.len();
        c[r] = -c[r].clone();
        let mut sc = StructureConstants::<Rat>::zeros(a.n());
        for (e, v) in a.diagram().index_set().iter().zip(&c) {
            // [e_i, e_j] = -c e_k
            sc.set(e.i - 1, e.j - 1, e.k - 1, -v.clone());
            sc.set(e.j - 1, e.i - 1, e.k - 1, v.clone());
        }
        let accepted = NiceLieAlgebra::new(a.diagram().clone(), c).is_ok();
        prop_assert_eq!(accepted, jacobi_brute(&sc), "{}", name);
    }
}

#[test]
fn diagonal_derivations_preserve_brackets() {
    for (name, a) in algebras() {
        for v in a.diagonal_derivations() {
            for e in a.diagram().index_set() {
                assert_eq!(v[e.k - 1], v[e.i - 1].clone() + v[e.j - 1].clone(), "{name}");
            }
        }
    }
}

#[test]
fn tilde_c_twice_is_the_identity() {
    for (name, a) in algebras() {
        for (s, _) in a.diagram().involutions().unwrap() {
            let t = a.tilde_c(&s).unwrap();
            let b = NiceLieAlgebra::new(a.diagram().clone(), t).unwrap();
            assert_eq!(b.tilde_c(&s).unwrap(), a.c(), "{name} {s}");
        }
    }
}

// ---- Ricci formulas against the Koszul oracle ----

fn operator(a: &NiceLieAlgebra, g: &[Rat], s: Option<&NodePermutation>) -> Vec<Rat> {
    oracle_ricci_operator(a, g, s).unwrap()
}

fn diag(op: &[Rat], n: usize) -> Vec<Rat> {
    (0..n).map(|i| op[i * n + i].clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn diagonal_formula_equals_koszul(idx in 0usize..1000, g in metric_entries()) {
        let (name, a) = &algebras()[idx % algebras().len()];
        let g = &g[..a.n()];
        let op = operator(a, g, None);
        prop_assert_eq!(ricci_diagonal(a, g), diag(&op, a.n()), "{}", name);
        prop_assert!((0..a.n()).all(|i| (0..a.n()).all(|j| i == j || op[i * a.n() + j].is_zero())));
    }

    #[test]
    fn sigma_formula_equals_koszul(idx in 0usize..1000, pick in 0usize..16, g in metric_entries()) {
        let (name, a) = &algebras()[idx % algebras().len()];
        let inv = a.diagram().involutions().unwrap();
        prop_assume!(!inv.is_empty());
        let s = &inv[pick % inv.len()].0;
        // σ-diagonal metrics need g_i = g_σ(i).
        let g: Vec<Rat> = (1..=a.n()).map(|i| g[i.min(s.apply(i)) - 1].clone()).collect();
        let op = operator(a, &g, Some(s));
        prop_assert_eq!(ricci_sigma(a, s, &g).unwrap(), diag(&op, a.n()), "{} {}", name, s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn negating_the_metric_negates_ricci(idx in 0usize..1000, g in metric_entries()) {
        let (_, a) = &algebras()[idx % algebras().len()];
        let g = &g[..a.n()];
        prop_assert_eq!(operator(a, &neg(g), None), neg(&operator(a, g, None)));
    }

    #[test]
    fn scaling_the_metric_scales_ricci(idx in 0usize..1000, g in metric_entries(), t in (1i64..=5, 1i64..=5)) {
        let (_, a) = &algebras()[idx % algebras().len()];
        let g = &g[..a.n()];
        let t = ratio(t.0, t.1);
        let scaled: Vec<Rat> = g.iter().map(|x| x * &t).collect();
        let expect: Vec<Rat> = operator(a, g, None).iter().map(|x| x / &t).collect();
        prop_assert_eq!(operator(a, &scaled, None), expect);
    }

    #[test]
    fn kernel_gauge_leaves_x_and_ricci_unchanged(idx in 0usize..1000, g in metric_entries(), pick in 0usize..8, t in prop::sample::select(vec![ratio(2, 1), ratio(1, 3), ratio(3, 2)])) {
        let (_, a) = &algebras()[idx % algebras().len()];
        let g = &g[..a.n()];
        let ker = a.diagonal_derivations();
        prop_assume!(!ker.is_empty());
        let v = &ker[pick % ker.len()];
        let den = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let moved: Vec<Rat> = g.iter().zip(v).map(|(gi, vi)| {
            let e = (vi * Rat::from_integer(den.clone())).to_integer();
            let e: i32 = e.try_into().unwrap();
            gi * t.pow(e)
        }).collect();
        prop_assert_eq!(nice_einstein::einstein::x_diagonal(a, &moved), nice_einstein::einstein::x_diagonal(a, g));
        prop_assert_eq!(operator(a, &moved, None), operator(a, g, None));
    }
}

// ---- Einstein pipeline invariants on catalogue algebras ----

fn k0_classifications() -> Vec<(String, NiceLieAlgebra, Option<NodePermutation>)> {
    let mut out = Vec::new();
    for (name, a) in algebras() {
        if a.n() > 8 {
            continue;
        }
        out.push((name.clone(), a.clone(), None));
        for (s, _) in a.diagram().involutions().unwrap() {
            out.push((name.clone(), a.clone(), Some(s)));
        }
    }
    out
}

#[test]
fn p_is_vacuous_without_cokernel() {
    for (name, a) in algebras() {
        if !kernel_basis(&a.root_matrix().q.transpose()).is_empty() {
            continue;
        }
        let c = classify(a, Mode::Diagonal, &rat(0), &Options::default()).unwrap();
        assert_ne!(c.failed_at(), Some(nice_einstein::einstein::Condition::P), "{name}");
    }
}

#[test]
fn sign_patterns_satisfy_the_sign_condition() {
    for (name, a, s) in k0_classifications() {
        let mode = s.clone().map_or(Mode::Diagonal, Mode::Sigma);
        let c = classify(&a, mode, &rat(0), &Options::default()).unwrap();
        let m2 = &a.root_matrix().f2;
        for cert in c.certificates() {
            let target = cert.x.logsign();
            for d in &cert.deltas {
                match &s {
                    None => {
                        // independent F2 product, row by row
                        let got: Vec<bool> = (0..m2.rows())
                            .map(|r| (0..m2.cols()).fold(false, |acc, j| acc ^ (m2.get(r, j) & d.get(j))))
                            .collect();
                        assert_eq!(got, target.bits(), "{name}");
                    }
                    Some(s) => {
                        assert!(d.is_invariant(s), "{name} {s}: {d}");
                        assert_eq!(sign_condition(&a, d, Some(s)).unwrap(), target, "{name} {s}");
                        let m = cert.metric_with(d).unwrap();
                        let g = m.g().approx();
                        let gm = metric_for(&g, Some(s));
                        let (p, q, z) = inertia(a.n(), gm.gram());
                        assert_eq!(z, 0);
                        assert_eq!(sigma_signature_from_signs(s, d), (p, q), "{name} {s}: {d}");
                    }
                }
            }
        }
    }
}

#[test]
fn certificates_pass_the_oracle_after_negation() {
    for (name, a, s) in k0_classifications() {
        let mode = s.clone().map_or(Mode::Diagonal, Mode::Sigma);
        let c = classify(&a, mode, &rat(0), &Options::default()).unwrap();
        for cert in c.certificates() {
            if let Some(g) = cert.metric.g().as_exact() {
                assert!(operator(&a, g, s.as_ref()).iter().all(Zero::is_zero), "{name}");
                assert!(operator(&a, &neg(g), s.as_ref()).iter().all(Zero::is_zero), "{name}");
            }
        }
    }
}

// ---- curvature identities ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_identities(idx in 0usize..1000, g in metric_entries()) {
        let (_, a) = &algebras()[idx % algebras().len()];
        prop_assume!(a.n() <= 8);
        let n = a.n();
        let sc = a.structure_constants();
        let gm = GeneralMetric::diagonal(&g[..n]);
        let conn = levi_civita(&sc, &gm).unwrap();
        let (t, c) = connection_residuals(&sc, &gm, &conn);
        prop_assert!(t.iter().chain(&c).all(Zero::is_zero));
        let r = riemann(&sc, &gm).unwrap();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let b = r.get(w, x, y, z) + r.get(w, y, z, x) + r.get(w, z, x, y);
                        prop_assert!(b.is_zero(), "Bianchi");
                        let l = r.lowered(x, y, z, w);
                        prop_assert_eq!(l, r.lowered(z, w, x, y));
                        prop_assert_eq!(l, &-r.lowered(y, x, z, w).clone());
                        prop_assert_eq!(l, &-r.lowered(x, y, w, z).clone());
                    }
                }
            }
        }
        let ric = ricci(&sc, &gm).unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert_eq!(&ric.tensor[x * n + y], &ric.tensor[y * n + x]);
                prop_assert!(x == y || ric.tensor[x * n + y].is_zero());
            }
        }
    }

    #[test]
    fn ricci_is_frame_independent(idx in 0usize..1000, g in metric_entries(), p in prop::collection::vec(small_rat(), 64)) {
        let (_, a) = &algebras()[idx % algebras().len()];
        prop_assume!(a.n() <= 7);
        let n = a.n();
        // unipotent upper-triangular change of basis f_a = Σ_b P_ba e_b
        let mut pm = MatQ::identity(n);
        for col in 0..n {
            for row in 0..col {
                pm[(row, col)] = p[row * 8 + col].clone();
            }
        }
        let pinv = pm.inverse().unwrap();
        let sc = a.structure_constants();
        let mut sc2 = StructureConstants::<Rat>::zeros(n);
        for x in 0..n {
            for y in 0..n {
                for k in 0..n {
                    let mut acc = rat(0);
                    for c in 0..n {
                        for d in 0..n {
                            let w = &pm[(c, x)] * &pm[(d, y)];
                            if w.is_zero() {
                                continue;
                            }
                            for e in 0..n {
                                acc += &w * sc.get(c, d, e) * &pinv[(k, e)];
                            }
                        }
                    }
                    sc2.set(x, y, k, acc);
                }
            }
        }
        let gm = GeneralMetric::diagonal(&g[..n]);
        let mut gram2 = vec![rat(0); n * n];
        for x in 0..n {
            for y in 0..n {
                gram2[x * n + y] = (0..n).fold(rat(0), |s, b| s + &pm[(b, x)] * gm.get(b, b) * &pm[(b, y)]);
            }
        }
        let ric = ricci(&sc, &gm).unwrap();
        let ric2 = ricci(&sc2, &GeneralMetric::new(n, gram2).unwrap()).unwrap();
        for x in 0..n {
            for y in 0..n {
                let mut want = rat(0);
                for b in 0..n {
                    for c in 0..n {
                        want += &pm[(b, x)] * &ric.tensor[b * n + c] * &pm[(c, y)];
                    }
                }
                prop_assert_eq!(&ric2.tensor[x * n + y], &want);
            }
        }
    }
}
