//! Laplacian spectra of compact metric graphs with standard (Kirchhoff) and
//! Dirichlet vertex conditions, computed from the secular determinant
//! `det(S_e(k) - S_v)` and its multivariate polynomial form.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod scattering;
pub mod secular;
pub mod spectral;

pub type Real = f64;
pub type Complex = num_complex::Complex64;
pub type Rational = num_rational::BigRational;
pub type EndpointMatrix = nalgebra::DMatrix<Complex>;
/// `P_G` with exact rational coefficients.
pub type SecularPolynomial = poly::MultiPoly<Rational>;

pub use error::{Error, Result};
pub use graph::{parse_graph, serialize_graph, Condition, Edge, MetricGraph, Vertex};
pub use secular::{secular_eval, secular_polynomial, SecularFunction};

/// Fixed 17-significant-digit rendering used by every text export.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}
