//! Helpers around arbitrary-precision rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number; always normalized (positive denominator, reduced).
pub type Rat = BigRational;

/// Dense vector of rationals.
pub type VecQ = Vec<Rat>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_vec(values: &[i64]) -> VecQ {
    values.iter().map(|&v| rat(v)).collect()
}

/// Parses `"3"`, `"-3/2"`, `"+7"`. Whitespace is not accepted.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rat::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

/// `true` for negative values: `(-1)^logsign(x) = sign(x)`.
pub fn logsign(x: &Rat) -> bool {
    x.is_negative()
}

pub fn logsign_f64(x: f64) -> bool {
    x < 0.0
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| ln_abs(x).exp() * if x.is_negative() { -1.0 } else { 1.0 })
}

/// Natural log of |x| for nonzero x, robust for large numerators/denominators.
pub fn ln_abs(x: &Rat) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

fn ln_bigint(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = &x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Integer power with possibly negative exponent; `x` must be nonzero when `e < 0`.
pub fn pow_i(x: &Rat, e: i64) -> Rat {
    let base = if e < 0 { x.recip() } else { x.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// Exact `k`-th root of a positive rational, when it is rational.
pub fn exact_root(x: &Rat, k: u32) -> Option<Rat> {
    if k == 0 || !x.is_positive() {
        return None;
    }
    if k == 1 {
        return Some(x.clone());
    }
    let n = x.numer().nth_root(k);
    let d = x.denom().nth_root(k);
    let cand = Rat::new(n, d);
    (num_traits::pow(cand.clone(), k as usize) == *x).then_some(cand)
}

/// Best rational approximation with denominator at most `max_den`, via continued fractions.
pub fn rational_approx(x: f64, max_den: u64) -> Option<Rat> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as u128;
        let p2 = ai.checked_mul(p1)?.checked_add(p0)?;
        let q2 = ai.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-13 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = Rat::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -r } else { r })
}

/// The rational with smallest denominator (then smallest magnitude) in the open interval `(lo, hi)`.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo < hi, "empty interval");
    if lo.is_negative() && hi.is_positive() {
        return Rat::zero();
    }
    if !lo.is_positive() && !hi.is_positive() {
        // mirror (lo, hi) with hi <= 0
        return -simplest_between(&-hi, &-lo);
    }
    simplest_positive(lo, hi)
}

// 0 <= lo < hi
fn simplest_positive(lo: &Rat, hi: &Rat) -> Rat {
    let fl = lo.floor();
    let candidate = &fl + Rat::one();
    if &candidate < hi {
        return candidate;
    }
    // lo and hi share the integer part (or hi is exactly fl + 1)
    let int = fl.clone();
    let lo_f = lo - &int;
    let hi_f = hi - &int;
    if lo_f.is_zero() {
        // (0, hi_f): simplest is 1/q with q minimal such that 1/q < hi_f
        let q = (hi_f.recip()).floor() + Rat::one();
        return int + q.recip();
    }
    // invert: (1/hi_f, 1/lo_f)
    let inner = simplest_positive(&hi_f.recip(), &lo_f.recip());
    int + inner.recip()
}

pub fn fmt_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(fmt_rat).collect();
    format!("({})", parts.join(","))
}

/// Clears denominators and divides by the content, keeping orientation.
/// Returns the zero vector unchanged.
pub fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn bigint_to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("integer out of i64 range")
}

pub fn sign_of(x: &Rat) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_fractions() {
        assert_eq!(parse_rat("-3/2"), Some(ratio(-3, 2)));
        assert_eq!(parse_rat("+4/2"), Some(rat(2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&ratio(1, 16), 4), Some(ratio(1, 2)));
        assert_eq!(exact_root(&rat(2), 2), None);
        assert_eq!(exact_root(&rat(-4), 2), None);
    }

    #[test]
    fn approximations() {
        assert_eq!(rational_approx(0.125, 1_000_000), Some(ratio(1, 8)));
        assert_eq!(rational_approx(-2.0 / 3.0, 1_000_000), Some(ratio(-2, 3)));
        assert_eq!(rational_approx(0.0, 10), Some(rat(0)));
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&rat(-5), &rat(3)), rat(0));
        assert_eq!(simplest_between(&ratio(1, 3), &ratio(1, 2)), ratio(2, 5));
        assert_eq!(simplest_between(&rat(2), &rat(7)), rat(3));
        assert_eq!(simplest_between(&rat(-7), &rat(-2)), rat(-3));
        assert_eq!(simplest_between(&rat(0), &ratio(1, 10)), ratio(1, 11));
        let s = simplest_between(&ratio(31, 100), &ratio(32, 100));
        assert!(s > ratio(31, 100) && s < ratio(32, 100));
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![ratio(1, 2), ratio(-3, 4), rat(0)];
        assert_eq!(primitive_integer(&v), vec![BigInt::from(2), BigInt::from(-3), BigInt::from(0)]);
    }
}
