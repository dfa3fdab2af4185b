//! X1-Jacobi exceptional orthogonal polynomials, constructed directly from
//! their second-order eigenvalue equation, together with the Sturm-Liouville
//! machinery needed to check self-adjointness and classify the endpoints.

pub mod classify;
pub mod eigensolve;
pub mod error;
pub mod laws;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod poly;
pub mod quadrature;
pub mod registry;
pub mod scalar;
pub mod slform;

pub use error::{Error, Result};
pub use params::{validate, Case, ParameterSet};
pub use poly::Polynomial;
pub use scalar::{Rational, Real, Scalar};
