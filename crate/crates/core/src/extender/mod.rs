//! Local extensions: block form, Schur complements, the PPT coupling system,
//! explicit constructions, decomposition lifting and extremality tests.

mod blocks;
mod construct;
mod extremal;
mod lift;
mod peel;
mod pipeline;
mod space;

pub use blocks::{assemble_extension, schur_complement, split_blocks, BlockLayout, ExtensionBlocks, SchurSide};
pub use construct::{coupling_range_dim, direct_sum_extension, flat_extension, product_pair_extension, slocc_extension};
pub use extremal::{extremality_check_ppt, extremality_check_psd, PptExtremality, PptVerdict, PsdExtremality};
pub use lift::{lift_decomposition, lift_weighted, sn_bounds_from_projection, Lift, LiftedTerm, ProjectionBound};
pub use peel::{witness_schur_peel, WitnessPeel};
pub use pipeline::{EdgeTerm, ExtensionStep, Pipeline};
pub use space::{
    choi_matrix, choi_vector, coupling_rank, extension_count_bound, is_admissible_coupling, is_trivial_coupling,
    ppt_extension_space, ppt_extension_space_on, ppt_extension_space_with, slocc_couplings, slocc_span,
    ExtensionSpace, SolveRoute,
};
