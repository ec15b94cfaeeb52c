//! Bipartite states on `ℂ^m ⊗ ℂ^n`, grid-graph states and the fixed families.
//!
//! The computational basis vector `|i⟩_A ⊗ |j⟩_B` has index `i·n + j`.

mod families;
mod grid;
mod state;

pub use families::{
    d_minimality_check, family_omega, family_pt_terms, family_terms, maximally_mixed, rho_3x3, rho_3x3_graph,
    rho_3x3_pt_terms, rho_3x3_terms, rho_4x5, rho_4x5_pipeline, rho_family, site_name, terms_matrix,
    tiles_complement, tiles_upb, DMinimality, FamilySpec, NamedTerm, Rho4x5, ADMIXTURE_WEIGHT,
};
pub use grid::{grid_to_state, DashedEdge, GridGraph, SolidEdge};
pub use state::{
    ket, matricize, product_basis_vector, schmidt_rank, swap_vector, BipartiteOperator, BipartiteState, Side,
};
