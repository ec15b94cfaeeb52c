//! Symbolic range matrices, minor ideals, Gröbner bases over ℚ and
//! Schmidt-number certificates.

mod certify;
mod edge;
mod error;
mod groebner;
mod identity;
mod poly;
mod rules;
mod symbolic;

pub use certify::{
    certify_sn_lower, combine_bounds, sn_upper_from_decomposition, verify_certificate, BoundKind,
    DecompositionEvidence, DecompositionTerm, Evidence, LowerOptions, LowerOutcome, NullstellensatzEvidence,
    SNCertificate, SchmidtNumberVerdict, VerifyReport, MONOMIAL_ORDER,
};
pub use edge::{edge_state_check, grid_product_candidates, CandidateResult, EdgeReport, EdgeVerdict};
pub use error::AlgError;
pub use groebner::{buchberger, buchberger_with, groebner_defect, interreduce, normal_form, s_polynomial, GbOptions, GroebnerBasis};
pub use identity::{
    combine, corrected_cofactors, evaluate_identity, g_generators, printed_cofactors, rho4x5_identity_check,
    IdentityReport, G_VARIABLES,
};
pub use poly::{Monomial, PolyDisplay, Polynomial};
pub use rules::{
    interaction_blocks, local_blocks, local_support, rules_symmetric, separability_rules, separable_by_rules, LocalBlock, Rule,
    SeparabilityVerdict,
};
pub use symbolic::{minor_ideal, range_coordinate_matrix, MinorIdeal, SymbolicRangeMatrix};
