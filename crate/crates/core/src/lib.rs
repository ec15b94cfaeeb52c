//! Local extensions of bipartite quantum states with exact certificates.
//!
//! * [`exactmat`]: exact Gaussian-rational linear algebra.
//! * [`qstates`]: bipartite states, partial transposes, grid states and the
//!   canonical state families.
//! * [`extender`]: the local-extension engine.

pub mod error;
pub mod exactmat;
pub mod extender;
pub mod qstates;

pub use error::Error;
