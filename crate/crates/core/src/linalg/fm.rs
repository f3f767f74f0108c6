//! Exact feasibility of strict linear inequality systems by Fourier–Motzkin elimination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matq::AffineSet;
use super::rat::{primitive_integer, simplest_between, Rat, VecQ};

/// `coef · u + constant > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictIneq {
    pub coef: VecQ,
    pub constant: Rat,
}

impl StrictIneq {
    pub fn new(coef: VecQ, constant: Rat) -> Self {
        Self { coef, constant }
    }

    pub fn holds_at(&self, u: &[Rat]) -> bool {
        let v: Rat = self.coef.iter().zip(u).fold(self.constant.clone(), |acc, (a, x)| acc + a * x);
        v.is_positive()
    }

    /// Scale by a positive rational so the coefficients are a primitive integer vector.
    fn normalized(&self) -> Self {
        if self.coef.iter().all(Zero::is_zero) {
            let c = if self.constant.is_positive() {
                Rat::one()
            } else if self.constant.is_zero() {
                Rat::zero()
            } else {
                -Rat::one()
            };
            return Self { coef: self.coef.clone(), constant: c };
        }
        let mut full = self.coef.clone();
        full.push(self.constant.clone());
        // scale factor s > 0 such that s*coef is primitive integer
        let prim = primitive_integer(&self.coef);
        let (i, p) = prim.iter().enumerate().find(|(_, p)| !p.is_zero()).unwrap();
        let s = Rat::from_integer(p.clone()) / &self.coef[i];
        Self { coef: prim.into_iter().map(Rat::from_integer).collect(), constant: &self.constant * s }
    }
}

/// Bounds on the eliminated variable at one stage: `x > lower_i(u')`, `x < upper_j(u')`.
#[derive(Debug, Clone)]
struct Stage {
    // each entry is (coefficients over remaining vars, constant), meaning x ⋚ coef·u' + constant
    lower: Vec<(VecQ, Rat)>,
    upper: Vec<(VecQ, Rat)>,
}

fn eval(coef: &[Rat], constant: &Rat, u: &[Rat]) -> Rat {
    coef.iter().zip(u).fold(constant.clone(), |acc, (a, x)| acc + a * x)
}

fn dedupe(ineqs: Vec<StrictIneq>) -> Result<Vec<StrictIneq>, ()> {
    let mut best: BTreeMap<Vec<BigInt>, Rat> = BTreeMap::new();
    for q in ineqs {
        let q = q.normalized();
        if q.coef.iter().all(Zero::is_zero) {
            if !q.constant.is_positive() {
                return Err(());
            }
            continue;
        }
        let key: Vec<BigInt> = q.coef.iter().map(|c| c.to_integer()).collect();
        best.entry(key)
            .and_modify(|c| {
                if q.constant < *c {
                    *c = q.constant.clone()
                }
            })
            .or_insert(q.constant);
    }
    Ok(best
        .into_iter()
        .map(|(k, c)| StrictIneq { coef: k.into_iter().map(Rat::from_integer).collect(), constant: c })
        .collect())
}

/// Decides whether `{u ∈ ℚ^dim : all inequalities hold}` is nonempty and returns a witness.
pub fn strict_feasible(ineqs: &[StrictIneq], dim: usize) -> Option<VecQ> {
    let mut current = dedupe(ineqs.to_vec()).ok()?;
    let mut stages = Vec::with_capacity(dim);
    for var in (0..dim).rev() {
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        let mut rest = Vec::new();
        for q in current {
            let a = q.coef[var].clone();
            let mut others = q.coef[..var].to_vec();
            if a.is_zero() {
                rest.push(StrictIneq { coef: others, constant: q.constant });
                continue;
            }
            // a x + others·u + b > 0  ⇒  x ⋚ -(others·u + b)/a
            let scale = -a.recip();
            for o in others.iter_mut() {
                *o = &*o * &scale;
            }
            let bound = (others, &q.constant * &scale);
            if a.is_positive() {
                lower.push(bound);
            } else {
                upper.push(bound);
            }
        }
        for (lc, lk) in &lower {
            for (uc, uk) in &upper {
                let coef: VecQ = uc.iter().zip(lc).map(|(u, l)| u - l).collect();
                rest.push(StrictIneq { coef, constant: uk - lk });
            }
        }
        current = dedupe(rest).ok()?;
        stages.push(Stage { lower, upper });
    }
    // all variables eliminated; remaining constraints were constant and passed
    let mut u: VecQ = Vec::with_capacity(dim);
    for (var, stage) in (0..dim).zip(stages.iter().rev()) {
        debug_assert_eq!(u.len(), var);
        let lo = stage.lower.iter().map(|(c, k)| eval(c, k, &u)).max();
        let hi = stage.upper.iter().map(|(c, k)| eval(c, k, &u)).min();
        let x = match (lo, hi) {
            (None, None) => Rat::zero(),
            (Some(l), None) => l.floor() + Rat::one(),
            (None, Some(h)) => h.ceil() - Rat::one(),
            (Some(l), Some(h)) => {
                if l >= h {
                    return None;
                }
                simplest_between(&l, &h)
            }
        };
        u.push(x);
    }
    ineqs.iter().all(|q| q.holds_at(&u)).then_some(u)
}

/// Point of the affine set in the open orthant `eps` (`true` = negative coordinate),
/// with its parameters. The witness is rechecked exactly.
pub fn strict_sign_feasible(set: &AffineSet, eps: &[bool]) -> Option<(VecQ, VecQ)> {
    assert_eq!(eps.len(), set.ambient_dim(), "sign vector length must match ambient dimension");
    let ineqs: Vec<StrictIneq> = (0..set.ambient_dim())
        .map(|j| {
            let (c0, coef) = set.coordinate(j);
            if eps[j] {
                StrictIneq::new(coef.into_iter().map(|x| -x).collect(), -c0)
            } else {
                StrictIneq::new(coef, c0)
            }
        })
        .collect();
    let params = strict_feasible(&ineqs, set.dim())?;
    let x = set.point(&params);
    let ok = x.iter().zip(eps).all(|(xi, &neg)| if neg { xi.is_negative() } else { xi.is_positive() });
    ok.then_some((params, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::{rat, rat_vec};

    #[test]
    fn triangle_is_feasible() {
        // x > 0, y > 0, x + y < 1
        let ineqs = vec![
            StrictIneq::new(rat_vec(&[1, 0]), rat(0)),
            StrictIneq::new(rat_vec(&[0, 1]), rat(0)),
            StrictIneq::new(rat_vec(&[-1, -1]), rat(1)),
        ];
        let w = strict_feasible(&ineqs, 2).unwrap();
        assert!(ineqs.iter().all(|q| q.holds_at(&w)));
    }

    #[test]
    fn open_segment_touching_is_infeasible() {
        // x > 0 and x < 0
        let ineqs = vec![StrictIneq::new(rat_vec(&[1]), rat(0)), StrictIneq::new(rat_vec(&[-1]), rat(0))];
        assert!(strict_feasible(&ineqs, 1).is_none());
    }

    #[test]
    fn zero_set_is_never_strict() {
        let set = AffineSet { particular: rat_vec(&[0, 0]), basis: vec![] };
        assert!(strict_sign_feasible(&set, &[false, false]).is_none());
    }

    #[test]
    fn line_orthants() {
        // X = (x, -x)
        let set = AffineSet { particular: rat_vec(&[0, 0]), basis: vec![rat_vec(&[1, -1])] };
        assert!(strict_sign_feasible(&set, &[false, true]).is_some());
        assert!(strict_sign_feasible(&set, &[true, false]).is_some());
        assert!(strict_sign_feasible(&set, &[false, false]).is_none());
    }
}
