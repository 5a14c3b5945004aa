//! Learning a union of low dimensional simplices from data on the unit
//! sphere.
//!
//! The pipeline: map raw points onto the sphere ([`geometry`]), learn basis
//! vertices whose hull hugs the data ([`learn`]), read off which hull facets
//! the data activates ([`simplices`]), then put the structure to work:
//! classification, density fitting, sampling and pose lifting ([`apps`]).
//! The constrained solver underneath everything lives in [`solver`];
//! [`model`] holds the shared types and the on-disk format.

pub mod apps;
pub mod error;
pub mod geometry;
pub mod io;
pub mod learn;
pub mod model;
pub mod simplices;
pub mod solver;
pub mod special;
pub mod synth;

pub use error::{Error, Result};
pub use model::{
    BasisSet, CoefficientVector, DataSet, DirichletParams, Simplex, SimplicialModel,
    DEFAULT_ACTIVATION_THRESHOLD,
};
pub use solver::{project_onto_model, project_onto_simplex, solve_simplex_ls, SolverConfig};
