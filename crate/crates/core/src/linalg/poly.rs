//! Univariate polynomials over ℚ with exact real root isolation.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::rat::{fmt_rat, primitive_integer, to_f64, Rat};

/// Coefficients from the constant term upwards; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// `a·x + b`
    pub fn linear(a: Rat, b: Rat) -> Self {
        Self::new(vec![b, a])
    }

    pub fn x() -> Self {
        Self::linear(Rat::one(), Rat::zero())
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = Rat::zero();
        Poly::new((0..n).map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, s: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: u32) -> Poly {
        (0..e).fold(Poly::constant(Rat::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer(BigInt::from(i))).collect())
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.coeffs.len() - 1;
        let lead_inv = d.leading().recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let f = &r[i + dd] * &lead_inv;
            if !f.is_zero() {
                for (j, c) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &f * c;
                }
            }
            q[i] = f;
        }
        (Poly::new(q), Poly::new(r))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(&self.leading().recip())
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Polynomial with integer coprime coefficients, same roots.
    pub fn primitive(&self) -> Vec<BigInt> {
        primitive_integer(&self.coeffs)
    }

    fn sign_at(&self, x: &Rat) -> i32 {
        let v = self.eval(x);
        if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        }
    }

    /// Root bound: every real root has `|x| < bound`.
    pub fn cauchy_bound(&self) -> Rat {
        let lead = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lead)
            .max()
            .unwrap_or_else(Rat::zero);
        m + Rat::one()
    }

    /// All distinct real roots, sorted.
    pub fn real_roots(&self) -> Vec<RealRoot> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let p = self.square_free();
        let sturm = Sturm::new(&p);
        let b = p.cauchy_bound();
        let mut out = Vec::new();
        isolate(&sturm, -b.clone(), b, &mut out);
        out.into_iter().map(|(lo, hi)| refine_rational(&p, lo, hi)).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_rat(c),
                1 => format!("{}x", fmt_rat(c)),
                _ => format!("{}x^{i}", fmt_rat(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

struct Sturm {
    seq: Vec<Poly>,
}

impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut seq = vec![p.clone(), p.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rat::one()));
        }
        Self { seq }
    }

    fn variations(&self, x: &Rat) -> usize {
        let signs: Vec<i32> = self.seq.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct roots in `(a, b]`.
    fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.variations(a) - self.variations(b)
    }
}

fn isolate(sturm: &Sturm, lo: Rat, hi: Rat, out: &mut Vec<(Rat, Rat)>) {
    let n = sturm.count(&lo, &hi);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((lo, hi));
        return;
    }
    let two = Rat::from_integer(BigInt::from(2));
    let mid = (&lo + &hi) / two;
    isolate(sturm, lo, mid.clone(), out);
    isolate(sturm, mid, hi, out);
}

/// Unique root of a square-free polynomial in `(lo, hi]`; detects rational roots exactly.
fn refine_rational(p: &Poly, lo: Rat, hi: Rat) -> RealRoot {
    if p.sign_at(&hi) == 0 {
        return RealRoot::Rational(hi);
    }
    let prim = p.primitive();
    let lead = prim.last().unwrap().abs();
    let constant = prim[0].abs();
    if constant.is_zero() && lo.is_negative() && hi.is_positive() {
        return RealRoot::Rational(Rat::zero());
    }
    // a rational root a/b has b | lead
    if let Some(divs) = divisors(&lead) {
        for q in divs {
            let qr = Rat::from_integer(q.clone());
            let from = (&lo * &qr).floor().to_integer();
            let to = (&hi * &qr).ceil().to_integer();
            if &to - &from > BigInt::from(4096) {
                // narrow the interval first
                return bisect_then_retry(p, lo, hi);
            }
            let mut a = from;
            while a <= to {
                let cand = Rat::new(a.clone(), q.clone());
                if cand > lo && cand <= hi && p.sign_at(&cand) == 0 {
                    return RealRoot::Rational(cand);
                }
                a += 1;
            }
        }
        return RealRoot::Algebraic(AlgebraicRoot { poly: p.clone(), lo, hi });
    }
    RealRoot::Algebraic(AlgebraicRoot { poly: p.clone(), lo, hi })
}

fn bisect_then_retry(p: &Poly, mut lo: Rat, mut hi: Rat) -> RealRoot {
    let two = Rat::from_integer(BigInt::from(2));
    for _ in 0..64 {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(&mid);
        if s == 0 {
            return RealRoot::Rational(mid);
        }
        if s == p.sign_at(&hi) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    refine_rational(p, lo, hi)
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.to_u64()?;
    if n > 1 << 40 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Irrational real root of `poly`, isolated in `(lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicRoot {
    pub poly: Poly,
    pub lo: Rat,
    pub hi: Rat,
}

impl AlgebraicRoot {
    /// Shrinks the interval to width below `width`.
    pub fn refine(&mut self, width: &Rat) {
        let two = Rat::from_integer(BigInt::from(2));
        let shi = self.poly.sign_at(&self.hi);
        while &(&self.hi - &self.lo) >= width {
            let mid = (&self.lo + &self.hi) / &two;
            if self.poly.sign_at(&mid) == shi {
                self.hi = mid;
            } else {
                self.lo = mid;
            }
        }
    }

    pub fn approx(&self) -> f64 {
        let mut r = self.clone();
        let w = (&self.hi - &self.lo) * Rat::new(BigInt::one(), BigInt::from(1u64) << 60);
        r.refine(&w);
        (to_f64(&r.lo) + to_f64(&r.hi)) / 2.0
    }

    /// Exact comparison with a rational, which can never equal the root.
    pub fn cmp_rat(&self, x: &Rat) -> Ordering {
        if x <= &self.lo {
            return Ordering::Greater;
        }
        if x >= &self.hi {
            return Ordering::Less;
        }
        // sign change between x and hi means the root is above x
        if self.poly.sign_at(x) == self.poly.sign_at(&self.hi) {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RealRoot {
    Rational(Rat),
    Algebraic(AlgebraicRoot),
}

impl RealRoot {
    pub fn approx(&self) -> f64 {
        match self {
            RealRoot::Rational(r) => to_f64(r),
            RealRoot::Algebraic(a) => a.approx(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        match self {
            RealRoot::Rational(r) => Some(r),
            RealRoot::Algebraic(_) => None,
        }
    }

    /// Ordering of the root relative to a rational.
    pub fn cmp_rat(&self, x: &Rat) -> Ordering {
        match self {
            RealRoot::Rational(r) => r.cmp(x),
            RealRoot::Algebraic(a) => a.cmp_rat(x),
        }
    }

    /// Strictly inside `(lo, hi)`, where `None` means unbounded.
    pub fn within(&self, lo: Option<&Rat>, hi: Option<&Rat>) -> bool {
        lo.is_none_or(|l| self.cmp_rat(l) == Ordering::Greater) && hi.is_none_or(|h| self.cmp_rat(h) == Ordering::Less)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat::{rat, ratio};

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| rat(x)).collect())
    }

    #[test]
    fn gcd_and_square_free() {
        // (x-1)^2 (x+2)
        let a = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]));
        assert_eq!(a.square_free(), p(&[-1, 1]).mul(&p(&[2, 1])));
        assert_eq!(a.gcd(&p(&[-1, 1])), p(&[-1, 1]));
    }

    #[test]
    fn isolates_rational_and_irrational_roots() {
        // 64 x^2 - 1
        let roots = p(&[-1, 0, 64]).real_roots();
        assert_eq!(roots, vec![RealRoot::Rational(ratio(-1, 8)), RealRoot::Rational(ratio(1, 8))]);
        // x^2 - 2
        let roots = p(&[-2, 0, 1]).real_roots();
        assert_eq!(roots.len(), 2);
        assert!((roots[1].approx() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(roots[1].cmp_rat(&ratio(141, 100)), Ordering::Greater);
        assert_eq!(roots[1].cmp_rat(&ratio(142, 100)), Ordering::Less);
        assert!(p(&[1, 0, 1]).real_roots().is_empty());
    }

    #[test]
    fn quartic_from_family() {
        // 16 λ²(λ-1)² - 1 = (4λ²-4λ-1)(4λ²-4λ+1)
        let l = Poly::x();
        let q = l.mul(&l.sub(&Poly::constant(rat(1)))).pow(2).scale(&rat(16)).sub(&Poly::constant(rat(1)));
        let roots = q.real_roots();
        let rational: Vec<_> = roots.iter().filter_map(RealRoot::as_rational).cloned().collect();
        assert_eq!(rational, vec![ratio(1, 2)]);
        assert_eq!(roots.len(), 3);
    }
}
