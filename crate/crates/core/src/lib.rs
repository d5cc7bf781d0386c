//! Numerical workbench for generally deformed oscillator (GDO) algebras.
//!
//! The crate builds finite-dimensional matrix representations of GDO and
//! q-GDO algebras from a structure function, constructs ladder-operator
//! coherent and squeezed states on them, realizes the algebras inside an
//! ordinary Fock space through intensity-dependent multiphoton couplings,
//! handles the isospectral oscillator system (two vacua, intertwiners), and
//! assembles the Pegg–Barnett hermitian phase operator from cyclic
//! representations at `q` a root of unity.
//!
//! Every construction comes with a checker that returns a [`CheckReport`]
//! of named residuals, so each operator identity can be verified
//! numerically.

pub mod error;
pub mod isos;
pub mod multiphoton;
pub mod numerics;
pub mod phase;
pub mod report;
pub mod repspace;
pub mod states;
pub mod structure;

pub use error::{Error, Result};
pub use numerics::ComplexMatrix;
pub use report::{CheckEntry, CheckReport, Expectation};
pub use repspace::{RepKind, Representation};
pub use states::StateVector;
pub use structure::{ArgKind, Family, StructureFunction, StructureSpec};

pub use num_complex::Complex64;
