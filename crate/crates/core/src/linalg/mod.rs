//! Exact linear algebra over ℚ and 𝔽₂.

pub mod f2;
pub mod fm;
pub mod matq;
pub mod poly;
pub mod rat;
pub mod smith;

pub use f2::{f2_solve_all, KernelTooLarge, MatF2, VecF2, DEFAULT_KERNEL_CAP};
pub use fm::{strict_feasible, strict_sign_feasible, StrictIneq};
pub use matq::{kernel_basis, solve_affine, AffineSet, MatQ};
pub use poly::{Poly, RealRoot};
pub use rat::{fmt_rat, fmt_vec, parse_rat, rat, ratio, Rat, VecQ};
pub use smith::{multiplicative_solve, smith_normal_form, MultiplicativeSolution, Smith};
