//! Vertex and edge scattering matrices in native endpoint order.

use crate::error::Result;
use crate::graph::{Condition, MetricGraph};
use crate::scalar::Scalar;
use crate::{Complex, EndpointMatrix};
use nalgebra::DMatrix;

/// `-I_d + (2/d) J_d` for a standard vertex of degree `d`.
///
/// The all-ones coefficient is `2/d`: it is the only choice that makes the
/// block unitary and involutive for every degree.
pub fn standard_vertex_block<T: Scalar>(d: usize) -> DMatrix<T> {
    assert!(d >= 1, "vertex degree must be positive");
    let off = T::from_ratio(2, d as i64);
    let diag = off.clone() - T::one();
    DMatrix::from_fn(d, d, |i, j| if i == j { diag.clone() } else { off.clone() })
}

/// The 1x1 Dirichlet reflection `[-1]`.
pub fn dirichlet_vertex_block<T: Scalar>() -> DMatrix<T> {
    DMatrix::from_element(1, 1, -T::one())
}

/// `S_v` of a valid graph, assembled over any scalar type.
pub fn vertex_scattering_in<T: Scalar>(g: &MetricGraph) -> Result<DMatrix<T>> {
    g.ensure_valid()?;
    let n = g.num_endpoints();
    let mut s = DMatrix::from_element(n, n, T::zero());
    for v in g.vertices() {
        let block = match v.condition {
            Condition::Standard => standard_vertex_block::<T>(v.degree()),
            Condition::Dirichlet => dirichlet_vertex_block::<T>(),
        };
        for (bi, &i) in v.endpoints.iter().enumerate() {
            for (bj, &j) in v.endpoints.iter().enumerate() {
                s[(i, j)] = block[(bi, bj)].clone();
            }
        }
    }
    Ok(s)
}

pub fn vertex_scattering(g: &MetricGraph) -> Result<EndpointMatrix> {
    vertex_scattering_in::<Complex>(g)
}

/// `E(z)`: block diagonal with `[[0, z_n], [z_n, 0]]` per edge.
pub fn generalized_edge_matrix<T: Scalar>(z: &[T]) -> DMatrix<T> {
    let n = 2 * z.len();
    let mut e = DMatrix::from_element(n, n, T::zero());
    for (i, zi) in z.iter().enumerate() {
        e[(2 * i, 2 * i + 1)] = zi.clone();
        e[(2 * i + 1, 2 * i)] = zi.clone();
    }
    e
}

/// `e^{i k l_n}` for every edge.
pub fn edge_phases(g: &MetricGraph, k: Complex) -> Vec<Complex> {
    g.edges()
        .iter()
        .map(|e| (Complex::i() * k * e.length).exp())
        .collect()
}

/// `S_e(k)`, computed as `E(e^{i k l})`.
pub fn edge_matrix(g: &MetricGraph, k: Complex) -> EndpointMatrix {
    generalized_edge_matrix(&edge_phases(g, k))
}
