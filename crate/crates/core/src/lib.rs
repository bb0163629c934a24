//! Universally optimal approximate cross-over designs for total effects
//! under the full treatment-by-carry-over interaction model.

pub mod constructions;
pub mod design;
pub mod error;
pub mod evaluation;
pub mod info;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod perm;
pub mod scalar;
pub mod symmetry;

pub use constructions::{build_reduced_design, Method, ReducedDesign, StartingDesign, Triplet};
pub use design::{ApproximateDesign, DesignRef, ExactDesign, TreatmentSequence};
pub use error::{Error, Result};
pub use evaluation::{evaluate, EfficiencyReport};
pub use optimizer::{solve, MaximinSolution, SolverSettings};
pub use perm::Permutation;
pub use scalar::{Rational, Scalar};
pub use symmetry::{CoefficientTable, EquivalenceClass, GammaPoint};
