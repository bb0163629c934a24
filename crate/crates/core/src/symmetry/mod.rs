//! Label symmetry: equivalence classes, orbit matrices, coefficient tables,
//! symmetrisation and automorphism analysis.

mod automorphism;
mod balance;
mod classes;
mod coefficients;
mod orbits;
mod symmetrize;

pub use automorphism::{automorphism_group, automorphisms, AutomorphismReport, MAX_AUTOMORPHISM_T};
pub use balance::{check_strong_balance, StrongBalanceReport};
pub use classes::{canonicalize, class_count, enumerate_classes, stirling2, EquivalenceClass};
pub use coefficients::{
    all_tables, all_tables_exact, coefficients, coefficients_in, CoefficientCache, CoefficientTable, GammaPoint,
};
pub use orbits::{orbit_basis, orbit_of, OrbitBasis, ORBIT_COUNT};
pub use symmetrize::{
    class_images, image_count, is_symmetric, symmetric_design, symmetric_design_from_class, symmetric_exact_design,
    symmetrize, MAX_CLASS_IMAGES,
};
