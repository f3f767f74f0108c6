use crate::algebra::NiceLieAlgebra;
use crate::curvature::{ricci, GeneralMetric, Scalar};
use crate::diagram::NodePermutation;
use crate::error::{CurvatureError, EinsteinError};
use crate::linalg::rat;

fn half<T: Scalar>() -> T {
    T::one() / (T::one() + T::one())
}

/// `∏_j g_j^{M_Ij}` for each row of the root matrix.
fn monomials<T: Scalar>(a: &NiceLieAlgebra, g: &[T]) -> Vec<T> {
    a.root_matrix()
        .ints
        .iter()
        .map(|row| {
            row.iter().zip(g).fold(T::one(), |acc, (&e, gj)| match e {
                0 => acc,
                e if e > 0 => (0..e).fold(acc, |x, _| x * gj.clone()),
                e => (0..-e).fold(acc, |x, _| x / gj.clone()),
            })
        })
        .collect()
}

/// `½ ᵀM X`.
fn half_transpose<T: Scalar>(a: &NiceLieAlgebra, x: &[T]) -> Vec<T> {
    let rm = a.root_matrix();
    let h = half::<T>();
    (0..a.n())
        .map(|j| {
            let s = rm.ints.iter().zip(x).fold(T::zero(), |acc, (row, xi)| match row[j] {
                0 => acc,
                e if e > 0 => acc + xi.clone() * T::from_rat(&rat(e)),
                e => acc - xi.clone() * T::from_rat(&rat(-e)),
            });
            s * h.clone()
        })
        .collect()
}

/// `X_I = ∏ g_j^{M_Ij} c_I²`.
pub fn x_diagonal<T: Scalar>(a: &NiceLieAlgebra, g: &[T]) -> Vec<T> {
    monomials(a, g)
        .into_iter()
        .zip(a.c())
        .map(|(p, c)| {
            let c = T::from_rat(c);
            p * c.clone() * c
        })
        .collect()
}

/// `X_I = ∏ g_j^{M_Ij} c_I c̃_I`.
pub fn x_sigma<T: Scalar>(a: &NiceLieAlgebra, sigma: &NodePermutation, g: &[T]) -> Result<Vec<T>, EinsteinError> {
    let ct = a.tilde_c(sigma)?;
    Ok(monomials(a, g).into_iter().zip(a.c()).zip(&ct).map(|((p, c), t)| p * T::from_rat(c) * T::from_rat(t)).collect())
}

/// Diagonal entries of the Ricci operator of a diagonal metric, through the root matrix.
pub fn ricci_diagonal<T: Scalar>(a: &NiceLieAlgebra, g: &[T]) -> Vec<T> {
    assert_eq!(g.len(), a.n(), "metric length must equal dimension");
    half_transpose(a, &x_diagonal(a, g))
}

/// Diagonal entries of the Ricci operator of `Σ g_i e^i ⊗ e^{σ(i)}`.
pub fn ricci_sigma<T: Scalar>(a: &NiceLieAlgebra, sigma: &NodePermutation, g: &[T]) -> Result<Vec<T>, EinsteinError> {
    assert_eq!(g.len(), a.n(), "metric length must equal dimension");
    Ok(half_transpose(a, &x_sigma(a, sigma, g)?))
}

pub fn metric_for<T: Scalar>(g: &[T], sigma: Option<&NodePermutation>) -> GeneralMetric<T> {
    match sigma {
        None => GeneralMetric::diagonal(g),
        Some(s) => {
            let images: Vec<usize> = (1..=g.len()).map(|i| s.apply(i) - 1).collect();
            GeneralMetric::sigma_diagonal(g, &images)
        }
    }
}

/// Full Koszul Ricci operator of the metric, as a dense row-major matrix.
pub fn oracle_ricci_operator<T: Scalar>(
    a: &NiceLieAlgebra,
    g: &[T],
    sigma: Option<&NodePermutation>,
) -> Result<Vec<T>, CurvatureError> {
    let sc = a.structure_constants().map(T::from_rat);
    Ok(ricci(&sc, &metric_for(g, sigma))?.operator)
}

/// Largest entry of `|Ric − ½k·id|` from the Koszul oracle.
pub fn oracle_residual<T: Scalar>(
    a: &NiceLieAlgebra,
    g: &[T],
    sigma: Option<&NodePermutation>,
    k: &T,
) -> Result<f64, CurvatureError> {
    let n = a.n();
    let op = oracle_ricci_operator(a, g, sigma)?;
    let target = k.clone() * half::<T>();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let mut v = op[i * n + j].clone();
            if i == j {
                v = v - target.clone();
            }
            if !v.is_zero() {
                worst = worst.max(v.to_f64().abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    Ok(worst)
}
