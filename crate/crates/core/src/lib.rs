//! Exact Fourier-Jacobi expansions of Jacobi theta functions, eta products
//! and Eisenstein series, the orbit operators built from theta functions with
//! rational characteristics, and a verifier and search for theta relations.

pub mod applications;
pub mod arith;
pub mod cyclotomic;
pub mod eisenstein;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod rational;
pub mod relations;
pub mod series;
pub mod spaces;
pub mod thetas;

pub use cyclotomic::CycNum;
pub use error::{Error, Result};
pub use rational::Rat;
pub use series::{FJSeries, FormMeta, Precision, SupportBound};
