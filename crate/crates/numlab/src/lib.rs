//! Floating-point laboratory: random Hermitian matrices, a Jacobi
//! eigensolver, Gauss–Newton sampling of fixed-birank PPT states and
//! numerical extension counts.

mod error;
mod extension;
mod gauss_newton;
mod hermitian;
mod state;
mod survey;

pub use error::NumError;
pub use extension::{numeric_extension_dimension, ExtensionOptions, NumericExtension, SpectralGap};
pub use gauss_newton::{gauss_newton_birank, start_point, GnOptions};
pub use hermitian::{eig_hermitian, hermiticity_residual, random_hermitian, symmetrize, CMatrix, Eigen, C64};
pub use state::{partial_transpose_a, partial_transpose_b, FloatState};
pub use survey::{render_table, sample_seed, unextendibility_survey, SurveyCase, SurveyOptions, SurveyReport};
