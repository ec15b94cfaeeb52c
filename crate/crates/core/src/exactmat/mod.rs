//! Exact arithmetic over the Gaussian rationals `ℚ(i)`.
//!
//! Everything here is exact: ranks, kernels, projectors and PSD decisions carry
//! no rounding. The pseudoinverse is never formed; [`solve_on_range`] applies it.

mod matrix;
mod psd;
mod scalar;
mod solve;
pub(crate) mod subspace;

pub use matrix::{basis_vector, inner, kron_vec, vec_add, vec_is_zero, vec_scale, vec_sub, ExactMatrix, ExactVector};
pub use psd::{psd_check, LdlFactorization, PsdVerdict};
pub use scalar::{rational_from_f64, rational_string, rational_string_vec, rational_to_f64, weighted_vectors, GaussianRational};
pub use solve::{inverse, orth_projector, solve_on_range, solve_on_range_many};
pub use subspace::{range, rank, rank_and_kernel, rref_in_place, subspace_intersection, Subspace};

pub use num_rational::BigRational;

/// Shorthand for a rational `n/d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
