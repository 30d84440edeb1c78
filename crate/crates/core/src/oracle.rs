//! Independent reference spectra: a second-order finite-difference
//! discretization of the graph Laplacian and closed forms for simple graphs.
//!
//! Each edge carries a uniform mesh whose nodes at `t = 0` and `t = l` are
//! the vertex unknowns (shared by all edges at a vertex, removed at Dirichlet
//! vertices). The discrete problem is `K u = lambda M u` with
//! interior rows `(-u_{i-1} + 2 u_i - u_{i+1}) / h` and mass `h`, and vertex
//! rows `sum_j (u_V - u_{1,j}) / h_j` with mass `sum_j h_j / 2`. Both matrices
//! are symmetric, `M` is diagonal, and eigenvalues converge at order `h^2`.
//!
//! Eigenvalues are isolated by bisection on the Sturm count, the number of
//! negative eigenvalues of `K - sigma M`, which is obtained by eliminating
//! every edge chain and adding the inertia of the small vertex Schur
//! complement.

use crate::error::{Error, Result};
use crate::graph::{Condition, MetricGraph};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteLaplacian {
    pub h: f64,
    /// Number of cells on each edge.
    pub cells: Vec<usize>,
    /// Row of each vertex unknown; `None` for Dirichlet vertices.
    pub vertex_row: Vec<Option<usize>>,
    /// Vertex index at `t = 0` and `t = l` of each edge.
    ends: Vec<(usize, usize)>,
    lengths: Vec<f64>,
    free_vertices: usize,
}

struct ChainResult {
    negatives: usize,
    /// `(T^{-1})_{11}` (equal to `(T^{-1})_{cc}`) and `(T^{-1})_{1c}`.
    inv_end: f64,
    inv_corner: f64,
    last_pivot: f64,
    prev_pivot: f64,
}

/// Inertia and corner entries of the inverse of the symmetric Toeplitz
/// tridiagonal matrix with diagonal `alpha`, off-diagonal `beta`, size `c`.
fn eliminate_chain(alpha: f64, beta: f64, c: usize) -> ChainResult {
    let tiny = 1e-14 * alpha.abs().max(beta.abs());
    let mut negatives = 0;
    let mut delta = alpha;
    let mut prev = alpha;
    let mut corner = 1.0;
    for i in 0..c {
        if i > 0 {
            prev = delta;
            delta = alpha - beta * beta / delta;
        }
        if delta.abs() < tiny {
            delta = tiny;
        }
        if delta < 0.0 {
            negatives += 1;
        }
        if i + 1 < c {
            corner *= -beta / delta;
        }
    }
    ChainResult {
        negatives,
        inv_end: 1.0 / delta,
        inv_corner: corner / delta,
        last_pivot: delta,
        prev_pivot: prev,
    }
}

impl DiscreteLaplacian {
    pub fn new(g: &MetricGraph, h: f64) -> Result<Self> {
        g.ensure_valid()?;
        let min_len = g.edges().iter().map(|e| e.length).fold(f64::INFINITY, f64::min);
        if !(h > 0.0) || h > min_len / 8.0 {
            return Err(Error::InvalidInput(format!(
                "mesh step {h} too coarse: needs 0 < h <= {}",
                min_len / 8.0
            )));
        }
        let lengths = g.lengths();
        let cells: Vec<usize> = lengths.iter().map(|l| ((l / h).round() as usize).max(8)).collect();
        let mut vertex_row = Vec::with_capacity(g.num_vertices());
        let mut next = 0;
        for v in g.vertices() {
            if v.condition == Condition::Dirichlet {
                vertex_row.push(None);
            } else {
                vertex_row.push(Some(next));
                next += 1;
            }
        }
        let ends = (0..g.num_edges())
            .map(|n| {
                (
                    g.vertex_of(2 * n).expect("valid graph"),
                    g.vertex_of(2 * n + 1).expect("valid graph"),
                )
            })
            .collect();
        Ok(DiscreteLaplacian {
            h,
            cells,
            vertex_row,
            ends,
            lengths,
            free_vertices: next,
        })
    }

    pub fn dimension(&self) -> usize {
        self.free_vertices + self.cells.iter().map(|c| c - 1).sum::<usize>()
    }

    fn cell_size(&self, n: usize) -> f64 {
        self.lengths[n] / self.cells[n] as f64
    }

    /// Number of eigenvalues strictly below `sigma`.
    ///
    /// A chain whose last pivot is smaller than the one before it is near a
    /// pole of the Schur complement; its last interior node then stays in the
    /// reduced system so the complement remains well conditioned.
    pub fn sturm_count(&self, sigma: f64) -> usize {
        let per_edge: Vec<(ChainResult, Option<ChainResult>, f64)> = (0..self.cells.len())
            .into_par_iter()
            .map(|n| {
                let hn = self.cell_size(n);
                let alpha = 2.0 / hn - sigma * hn;
                let beta = -1.0 / hn;
                let c = self.cells[n] - 1;
                let full = eliminate_chain(alpha, beta, c);
                let split = (full.last_pivot.abs() < full.prev_pivot.abs()).then(|| eliminate_chain(alpha, beta, c - 1));
                (full, split, hn)
            })
            .collect();
        let extra = per_edge.iter().filter(|e| e.1.is_some()).count();
        let dim = self.free_vertices + extra;
        let mut schur = DMatrix::<f64>::zeros(dim, dim);
        let mut negatives = 0;
        let mut next = self.free_vertices;
        for (n, (full, split, hn)) in per_edge.iter().enumerate() {
            let hn = *hn;
            let b2 = 1.0 / (hn * hn);
            let (u, w) = self.ends[n];
            let own = 1.0 / hn - sigma * 0.5 * hn;
            let ru = self.vertex_row[u];
            let mut rw = self.vertex_row[w];
            let chain = match split {
                None => full,
                Some(part) => {
                    // node `c` joins the system: it couples to `w` directly
                    // and to `u` through the shortened chain
                    let r = next;
                    next += 1;
                    schur[(r, r)] += 2.0 / hn - sigma * hn;
                    if let Some(j) = rw {
                        schur[(r, j)] -= 1.0 / hn;
                        schur[(j, r)] -= 1.0 / hn;
                        schur[(j, j)] += own;
                    }
                    rw = Some(r);
                    part
                }
            };
            negatives += chain.negatives;
            if let Some(i) = ru {
                schur[(i, i)] += own - b2 * chain.inv_end;
            }
            if let Some(j) = rw {
                let base = if split.is_some() { 0.0 } else { own };
                schur[(j, j)] += base - b2 * chain.inv_end;
            }
            if let (Some(i), Some(j)) = (ru, rw) {
                schur[(i, j)] -= b2 * chain.inv_corner;
                schur[(j, i)] -= b2 * chain.inv_corner;
            }
        }
        if dim > 0 {
            let eig = SymmetricEigen::new(schur);
            negatives += eig.eigenvalues.iter().filter(|&&x| x < 0.0).count();
        }
        negatives
    }

    /// The `j`-th eigenvalue (0-based) by bisection on the Sturm count.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let total: f64 = self.lengths.iter().sum();
        let mut lo = -1.0;
        let mut hi = ((j as f64 + 2.0) * PI / total).powi(2) + 1.0;
        while self.sturm_count(hi) <= j {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= 1e-15 * hi.abs().max(1e-12) {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Dense `K` and the diagonal of `M`; rows are the vertex unknowns first,
    /// then the interior nodes edge by edge.
    pub fn assemble_dense(&self) -> (DMatrix<f64>, DVector<f64>) {
        let dim = self.dimension();
        let mut k = DMatrix::zeros(dim, dim);
        let mut m = DVector::zeros(dim);
        let mut next = self.free_vertices;
        for n in 0..self.cells.len() {
            let hn = self.cell_size(n);
            let c = self.cells[n] - 1;
            let rows: Vec<usize> = (next..next + c).collect();
            next += c;
            let (u, w) = self.ends[n];
            let mut nodes: Vec<Option<usize>> = vec![self.vertex_row[u]];
            nodes.extend(rows.iter().map(|&r| Some(r)));
            nodes.push(self.vertex_row[w]);
            for cell in nodes.windows(2) {
                for (x, y) in [(cell[0], cell[1]), (cell[1], cell[0])] {
                    if let Some(i) = x {
                        k[(i, i)] += 1.0 / hn;
                        m[i] += 0.5 * hn;
                        if let Some(j) = y {
                            k[(i, j)] -= 1.0 / hn;
                        }
                    }
                }
            }
        }
        (k, m)
    }
}

/// The lowest `count` eigenvalues of the finite-difference Laplacian with
/// mesh step close to `h`.
pub fn fd_spectrum(g: &MetricGraph, h: f64, count: usize) -> Result<Vec<f64>> {
    let d = DiscreteLaplacian::new(g, h)?;
    Ok((0..count).map(|j| d.eigenvalue(j)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticFamily {
    IntervalDD,
    IntervalSS,
    IntervalDS,
    Circle,
}

impl AnalyticFamily {
    pub fn graph(self, length: f64) -> MetricGraph {
        use crate::graph::families::{circle, interval};
        match self {
            AnalyticFamily::IntervalDD => interval(length, Condition::Dirichlet, Condition::Dirichlet),
            AnalyticFamily::IntervalSS => interval(length, Condition::Standard, Condition::Standard),
            AnalyticFamily::IntervalDS => interval(length, Condition::Dirichlet, Condition::Standard),
            AnalyticFamily::Circle => circle(length),
        }
    }

    /// Multiplicity of `lambda = 0`.
    pub fn zero_multiplicity(self) -> usize {
        match self {
            AnalyticFamily::IntervalSS | AnalyticFamily::Circle => 1,
            _ => 0,
        }
    }
}

/// The first `count` positive wavenumbers with multiplicities.
pub fn analytic_spectrum(family: AnalyticFamily, length: f64, count: usize) -> Vec<(f64, usize)> {
    (1..=count)
        .map(|n| {
            let n = n as f64;
            match family {
                AnalyticFamily::IntervalDD | AnalyticFamily::IntervalSS => (n * PI / length, 1),
                AnalyticFamily::IntervalDS => ((n - 0.5) * PI / length, 1),
                AnalyticFamily::Circle => (2.0 * PI * n / length, 2),
            }
        })
        .collect()
}

/// `analytic_spectrum` expanded into eigenvalues with repetition, the zero
/// eigenvalue included, truncated to `count` entries.
pub fn analytic_eigenvalues(family: AnalyticFamily, length: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; family.zero_multiplicity()];
    for (k, m) in analytic_spectrum(family, length, count) {
        out.extend(std::iter::repeat_n(k * k, m));
    }
    out.truncate(count);
    out
}
