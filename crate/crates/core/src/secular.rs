//! The secular function `p(k) = det(S_e(k) - S_v)` and the secular
//! polynomial `P_G(z) = det(E(z) - S_v)`.

use crate::error::{Error, Result};
use crate::graph::MetricGraph;
use crate::poly::{cofactor_determinant, MultiPoly};
use crate::scalar::Scalar;
use crate::scattering::{edge_phases, generalized_edge_matrix, vertex_scattering_in};
use crate::{Complex, EndpointMatrix, Rational, SecularPolynomial};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default cap on the number of edges for symbolic expansion.
pub const DEFAULT_POLY_EDGE_LIMIT: usize = 12;

/// Numeric evaluator of the secular function for one graph, with `S_v`
/// assembled once.
#[derive(Debug, Clone)]
pub struct SecularFunction {
    sv: EndpointMatrix,
    lengths: Vec<f64>,
    total_length: f64,
    /// Unimodular factor making `p(k) e^{-ikL}` real on the real axis.
    real_phase: Complex,
}

impl SecularFunction {
    pub fn new(g: &MetricGraph) -> Result<Self> {
        let sv = vertex_scattering_in::<Complex>(g)?;
        let det_sv = sv.clone().lu().determinant().re.signum();
        let sign = if g.num_edges() % 2 == 0 { det_sv } else { -det_sv };
        let real_phase = if sign > 0.0 { Complex::new(1.0, 0.0) } else { Complex::i() };
        Ok(SecularFunction {
            sv,
            lengths: g.lengths(),
            total_length: g.total_length(),
            real_phase,
        })
    }

    pub fn vertex_matrix(&self) -> &EndpointMatrix {
        &self.sv
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    pub fn dimension(&self) -> usize {
        self.sv.nrows()
    }

    pub fn phases(&self, k: Complex) -> Vec<Complex> {
        self.lengths
            .iter()
            .map(|&l| (Complex::i() * k * l).exp())
            .collect()
    }

    /// `S_e(k) - S_v`.
    pub fn matrix(&self, k: Complex) -> EndpointMatrix {
        generalized_edge_matrix(&self.phases(k)) - &self.sv
    }

    /// `S_e(k) S_v`, unitary for real `k`.
    pub fn unitary(&self, k: f64) -> EndpointMatrix {
        generalized_edge_matrix(&self.phases(Complex::new(k, 0.0))) * &self.sv
    }

    pub fn eval(&self, k: Complex) -> Complex {
        self.matrix(k).lu().determinant()
    }

    /// Real-valued form `p(k) e^{-ikL} w` on the real axis; it has the same
    /// zeros as `p`, with the same orders.
    pub fn real_form(&self, k: f64) -> f64 {
        let p = self.eval(Complex::new(k, 0.0));
        let rot = (Complex::i() * (-k * self.total_length)).exp();
        (p * rot * self.real_phase).re
    }

    /// `dp/dk` by a central difference along the imaginary direction.
    pub fn derivative(&self, k: f64) -> Complex {
        let delta = 1e-4 / self.total_length;
        let up = self.eval(Complex::new(k, delta));
        let down = self.eval(Complex::new(k, -delta));
        (up - down) / Complex::new(0.0, 2.0 * delta)
    }
}

/// `p(k) = det(S_e(k) - S_v)` by LU with partial pivoting.
pub fn secular_eval(g: &MetricGraph, k: Complex) -> Result<Complex> {
    Ok(SecularFunction::new(g)?.eval(k))
}

pub fn secular_polynomial(g: &MetricGraph) -> Result<SecularPolynomial> {
    secular_polynomial_with_limit(g, DEFAULT_POLY_EDGE_LIMIT)
}

/// Exact expansion of `det(E(z) - S_v)` over the rationals.
pub fn secular_polynomial_with_limit(g: &MetricGraph, max_edges: usize) -> Result<SecularPolynomial> {
    g.ensure_valid()?;
    let n = g.num_edges();
    if n > max_edges {
        return Err(Error::SizeLimit {
            what: "edge count",
            actual: n,
            limit: max_edges,
        });
    }
    let sv = vertex_scattering_in::<Rational>(g)?;
    let vars: Vec<MultiPoly<Rational>> = (0..n).map(|i| MultiPoly::variable(n, i)).collect();
    let dim = 2 * n;
    let entries: Vec<Vec<MultiPoly<Rational>>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mut p = MultiPoly::constant(n, -sv[(i, j)].clone());
                    if i / 2 == j / 2 && i != j {
                        p = &p + &vars[i / 2];
                    }
                    p
                })
                .collect()
        })
        .collect();
    Ok(cofactor_determinant(&entries, n))
}

/// Evaluate `P` at any scalar point; with rational `z` the result is exact.
pub fn poly_eval<U: Scalar>(p: &SecularPolynomial, z: &[U]) -> U {
    p.eval(z)
}

pub fn poly_gradient<U: Scalar>(p: &SecularPolynomial, z: &[U]) -> Vec<U> {
    p.gradient(z)
}

/// `z_n = e^{i phi_n}`.
pub fn torus_point(phi: &[f64]) -> Vec<Complex> {
    phi.iter().map(|&t| Complex::from_polar(1.0, t)).collect()
}

/// `P(e^{i k l})`, the secular function reconstructed from the polynomial.
pub fn poly_on_curve(p: &SecularPolynomial, g: &MetricGraph, k: Complex) -> Complex {
    p.eval(&edge_phases(g, k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    pub phi: Vec<f64>,
    pub value: Complex,
    pub gradient: Vec<Complex>,
}

impl TorusPoint {
    pub fn gradient_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Grid points of the real torus near the zero set of `P`.
///
/// A point qualifies when `|P|` there is no larger than at any axis
/// neighbour (periodic) and below `10 * spacing * max |grad P|` over the grid.
pub fn sample_zero_slice(p: &SecularPolynomial, resolution: usize) -> Result<Vec<TorusPoint>> {
    let n = p.num_vars();
    if n == 0 || n > 3 {
        return Err(Error::SizeLimit {
            what: "variables for torus sampling",
            actual: n,
            limit: 3,
        });
    }
    if resolution == 0 {
        return Err(Error::InvalidInput("resolution must be positive".into()));
    }
    let total = resolution
        .checked_pow(n as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or(Error::SizeLimit {
            what: "torus grid points",
            actual: usize::MAX,
            limit: 50_000_000,
        })?;
    let spacing = 2.0 * PI / resolution as f64;
    let index_to_phi = |mut idx: usize| -> Vec<f64> {
        let mut phi = vec![0.0; n];
        for d in (0..n).rev() {
            phi[d] = (idx % resolution) as f64 * spacing;
            idx /= resolution;
        }
        phi
    };
    let grads: Vec<SecularPolynomial> = (0..n).map(|i| p.derivative(i)).collect();
    let samples: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let z = torus_point(&index_to_phi(idx));
            let v = p.eval(&z).norm();
            let gn = grads.iter().map(|d| d.eval(&z).norm_sqr()).sum::<f64>().sqrt();
            (v, gn)
        })
        .collect();
    let max_grad = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    let threshold = 10.0 * spacing * max_grad;
    let stride = |d: usize| resolution.pow((n - 1 - d) as u32);
    let mut out = Vec::new();
    for idx in 0..total {
        let v = samples[idx].0;
        if !(v < threshold) && v != 0.0 {
            continue;
        }
        let is_min = (0..n).all(|d| {
            let s = stride(d);
            let coord = (idx / s) % resolution;
            let base = idx - coord * s;
            let up = base + ((coord + 1) % resolution) * s;
            let down = base + ((coord + resolution - 1) % resolution) * s;
            v <= samples[up].0 && v <= samples[down].0
        });
        if is_min {
            let phi = index_to_phi(idx);
            let z = torus_point(&phi);
            out.push(TorusPoint {
                value: p.eval(&z),
                gradient: p.gradient(&z),
                phi,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub num: i64,
    pub den: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u8>,
    pub coefficient: CoefficientRecord,
}

/// Canonical term list, sorted lexicographically by exponents.
pub fn polynomial_records(p: &SecularPolynomial) -> Result<Vec<TermRecord>> {
    p.terms()
        .map(|(e, c)| {
            let num = c.numer().to_i64();
            let den = c.denom().to_i64();
            match (num, den) {
                (Some(num), Some(den)) => Ok(TermRecord {
                    exponents: e.clone(),
                    coefficient: CoefficientRecord { num, den },
                }),
                _ => Err(Error::SizeLimit {
                    what: "coefficient bits",
                    actual: c.numer().bits().max(c.denom().bits()) as usize,
                    limit: 63,
                }),
            }
        })
        .collect()
}

pub fn export_polynomial(p: &SecularPolynomial) -> Result<String> {
    Ok(serde_json::to_string(&polynomial_records(p)?).expect("records serialize"))
}

pub fn import_polynomial(num_vars: usize, text: &str) -> Result<SecularPolynomial> {
    let records: Vec<TermRecord> = serde_json::from_str(text).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut terms = Vec::with_capacity(records.len());
    for r in records {
        if r.exponents.len() != num_vars || r.coefficient.den == 0 {
            return Err(Error::InvalidInput("malformed polynomial term".into()));
        }
        let c = Rational::from_ratio(r.coefficient.num, r.coefficient.den);
        if !c.is_zero() {
            terms.push((r.exponents, c));
        }
    }
    Ok(MultiPoly::from_terms(num_vars, terms))
}
