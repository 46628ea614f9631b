//! Cuspidal Steinberg homology of `Gamma_0(N)` and `Gamma_0(N)^+-`, and the
//! image of the connecting map attached to a real quadratic field.
//!
//! The pipeline: [`voronoi`] builds the Voronoi chain complex for the group
//! and its cuspidal homology over `Z`; [`unital`] lists matrices of the group
//! whose eigenvalues are units of the field; [`modsym`] turns each such
//! matrix into a homology class; [`psi`] accumulates those classes and
//! reports the cokernel; [`ane`] computes the unit-residue groups that
//! predict it; [`table`] drives batches and formats the results.

pub mod ane;
pub mod error;
pub mod exactalg;
pub mod matrix2;
pub mod modsym;
pub mod projline;
pub mod psi;
pub mod quadfield;
pub mod table;
pub mod unital;
pub mod voronoi;

pub use error::{Error, Result};
pub use exactalg::{FgAbGroup, IntMatrix};
pub use voronoi::GammaFlavor;
