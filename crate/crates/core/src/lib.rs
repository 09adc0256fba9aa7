//! Entropic geometry of exponential families on finite-dimensional
//! C*-algebras: spectral calculus, relative entropy, maximum-entropy
//! inference, the face lattice of the mean-value set and closures of
//! exponential families.

pub mod algebra;
pub mod entropy;
pub mod error;
pub mod expfam;
pub mod families;
pub mod io;
pub mod lattice;
pub mod maxent;
pub mod spectral;
pub mod topology;
pub mod verify;

pub use algebra::{AlgebraSpec, HermElem, NormKind, State};
pub use entropy::{ExtReal, Omega};
pub use error::{Error, Result};
pub use expfam::ExpFamilySpec;
pub use spectral::{Compression, Projection};
