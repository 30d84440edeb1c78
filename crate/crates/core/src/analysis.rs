//! Genericity of eigenpairs, length derivatives, nodal domains, equilateral
//! graphs and the truncated Titchmarsh-Weyl M-function.

use crate::error::{Error, Result};
use crate::graph::{Condition, MetricGraph};
use crate::spectral::{
    eigenbasis, eigenfunction, find_spectrum, first_levels, zero_mode_pair, Eigenfunction, Eigenpair,
    SpectrumSlice,
};
use crate::{format_real, Complex};
use std::f64::consts::PI;

pub const DEFAULT_GEN_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GenericityReport {
    pub k: f64,
    pub simple: bool,
    /// `min |psi(V)| / sup |psi|` over non-Dirichlet vertices; `None` when
    /// the eigenvalue is not simple, `+inf` when there is nothing to check.
    pub min_vertex_value: Option<f64>,
    pub generic: bool,
    pub failing_vertices: Vec<usize>,
}

/// Simple eigenvalue whose eigenfunction is nonzero at every
/// non-Dirichlet vertex.
pub fn genericity(g: &MetricGraph, pair: &Eigenpair, threshold: f64) -> Result<GenericityReport> {
    let simple = pair.multiplicity == 1 && !pair.cluster;
    if !simple {
        return Ok(GenericityReport {
            k: pair.k,
            simple,
            min_vertex_value: None,
            generic: false,
            failing_vertices: Vec::new(),
        });
    }
    let f = eigenfunction(g, pair, 0)?;
    let values = f.vertex_values()?;
    let sup = f.sup_norm();
    let mut min = f64::INFINITY;
    let mut failing = Vec::new();
    for (m, v) in g.vertices().iter().enumerate() {
        if v.is_dirichlet() {
            continue;
        }
        let rel = values[m].abs() / sup;
        min = min.min(rel);
        if rel <= threshold {
            failing.push(m);
        }
    }
    Ok(GenericityReport {
        k: pair.k,
        simple,
        min_vertex_value: Some(min),
        generic: failing.is_empty(),
        failing_vertices: failing,
    })
}

/// Whether generic eigenfunctions are expected: the graph is a tree or has a
/// Dirichlet vertex.
pub fn hypotheses_met(g: &MetricGraph) -> bool {
    g.is_tree() || g.has_dirichlet()
}

#[derive(Debug, Clone)]
pub struct GenericSequence {
    pub pairs: Vec<Eigenpair>,
    pub reports: Vec<GenericityReport>,
    /// Fewer than the requested number of generic pairs below `k_max`.
    pub insufficient: bool,
    pub hypotheses_met: bool,
    /// Eigenvalue levels examined, in order.
    pub scanned: usize,
}

/// First `count` generic eigenpairs with `0 < k <= k_max`.
pub fn generic_sequence(g: &MetricGraph, count: usize, k_max: f64) -> Result<GenericSequence> {
    generic_sequence_with(g, count, k_max, DEFAULT_GEN_THRESHOLD)
}

pub fn generic_sequence_with(g: &MetricGraph, count: usize, k_max: f64, threshold: f64) -> Result<GenericSequence> {
    let slice = find_spectrum(g, k_max)?;
    let mut pairs = Vec::new();
    let mut reports = Vec::new();
    let mut scanned = 0;
    for z in &slice.zeros {
        if pairs.len() >= count {
            break;
        }
        scanned += 1;
        let r = genericity(g, z, threshold)?;
        if r.generic {
            pairs.push(z.clone());
            reports.push(r);
        }
    }
    Ok(GenericSequence {
        insufficient: pairs.len() < count,
        pairs,
        reports,
        hypotheses_met: hypotheses_met(g),
        scanned,
    })
}

/// Length derivative `d lambda / d l_edge = -(psi'^2 + lambda psi^2)` of a
/// simple eigenvalue, evaluated at the edge midpoint.
pub fn hadamard_derivative(g: &MetricGraph, pair: &Eigenpair, edge: usize) -> Result<f64> {
    if pair.multiplicity != 1 || pair.cluster {
        return Err(Error::Multiplicity(pair.multiplicity));
    }
    if edge >= g.num_edges() {
        return Err(Error::OutOfRange(format!("edge {edge} does not exist")));
    }
    let f = eigenfunction(g, pair, 0)?;
    let l = g.length(edge);
    let samples: Vec<f64> = (0..=10)
        .map(|i| f.prufer(edge, l * i as f64 / 10.0))
        .collect::<Result<_>>()?;
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = hi.abs().max(f.lambda() * f.sup_norm() * f.sup_norm());
    if scale > 0.0 && (hi - lo) > 1e-6 * scale {
        return Err(Error::Inconsistency(format!(
            "Pruefer amplitude varies by {:.3e} along edge {edge}",
            (hi - lo) / scale
        )));
    }
    Ok(0.0 - f.prufer(edge, 0.5 * l)?)
}

/// Central difference `(lambda(l + h) - lambda(l - h)) / 2h` of the
/// eigenvalue that continues `pair` when edge `edge` is stretched.
pub fn hadamard_finite_difference(g: &MetricGraph, pair: &Eigenpair, edge: usize, h: f64) -> Result<f64> {
    if pair.k == 0.0 {
        return Ok(0.0);
    }
    let track = |delta: f64| -> Result<f64> {
        let gp = g.perturb_length(edge, delta)?;
        let w = 0.25 * crate::spectral::scan_step(&gp);
        let near = crate::spectral::zeros_in_window(&gp, pair.k - w, pair.k + w)?;
        near.iter()
            .min_by(|a, b| (a.k - pair.k).abs().total_cmp(&(b.k - pair.k).abs()))
            .map(|z| z.lambda)
            .ok_or_else(|| Error::Localization(format!("eigenvalue near k = {} lost under perturbation", pair.k)))
    };
    Ok((track(h)? - track(-h)?) / (2.0 * h))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalDecomposition {
    pub interior_zeros: Vec<Vec<f64>>,
    /// Non-Dirichlet vertices where `|psi|` is at or below the threshold.
    pub vertex_zeros: Vec<usize>,
    pub domain_count: usize,
    /// Domain of segment `s` of edge `n`; empty for an edge where `psi`
    /// vanishes identically.
    pub domain_assignment: Vec<Vec<usize>>,
    /// Sign of each segment.
    pub segment_signs: Vec<Vec<i8>>,
    pub generic: bool,
}

fn find_root(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn nodal_domains(g: &MetricGraph, pair: &Eigenpair) -> Result<NodalDecomposition> {
    nodal_domains_with(g, pair, DEFAULT_GEN_THRESHOLD)
}

/// Nodal domains of the eigenfunction of a simple eigenvalue, from the
/// exact zeros of `A cos kt + B sin kt` on every edge.
pub fn nodal_domains_with(g: &MetricGraph, pair: &Eigenpair, threshold: f64) -> Result<NodalDecomposition> {
    if pair.multiplicity != 1 || pair.cluster {
        return Err(Error::Multiplicity(pair.multiplicity));
    }
    let f = eigenfunction(g, pair, 0)?;
    nodal_domains_of(&f, threshold)
}

pub fn nodal_domains_of(f: &Eigenfunction, threshold: f64) -> Result<NodalDecomposition> {
    let g = f.graph();
    let sup = f.sup_norm();
    if !(sup > 0.0) {
        return Err(Error::InvalidInput("eigenfunction vanishes identically".into()));
    }
    let small = threshold * sup;
    let k = f.k();
    let mut interior_zeros = Vec::with_capacity(g.num_edges());
    let mut signs: Vec<Vec<i8>> = Vec::with_capacity(g.num_edges());
    for n in 0..g.num_edges() {
        let l = g.length(n);
        let (a, b) = f.coefficients(n);
        let r = a.hypot(b);
        if r <= small {
            interior_zeros.push(Vec::new());
            signs.push(Vec::new());
            continue;
        }
        let mut zs = Vec::new();
        if k > 0.0 {
            let start_small = a.abs() <= small;
            let end_small = f.endpoint_data(2 * n + 1).0.abs() <= small;
            // psi = r cos(kt - phi) vanishes at kt = phi + pi/2 + j pi
            let phi = b.atan2(a);
            let first = ((-phi - 0.5 * PI) / PI).ceil() as i64;
            let mut j = first;
            loop {
                let t = (phi + 0.5 * PI + j as f64 * PI) / k;
                if t >= l {
                    break;
                }
                let near_start = k * t < 1e-6 && start_small;
                let near_end = k * (l - t) < 1e-6 && end_small;
                if t > 0.0 && !near_start && !near_end {
                    zs.push(t);
                }
                j += 1;
            }
        }
        let mut cuts = vec![0.0];
        cuts.extend(zs.iter().copied());
        cuts.push(l);
        let s: Vec<i8> = cuts
            .windows(2)
            .map(|w| {
                let v = f.evaluate_on_edge(n, 0.5 * (w[0] + w[1])).expect("midpoint inside edge");
                if v >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        interior_zeros.push(zs);
        signs.push(s);
    }

    // segment ids
    let mut offset = Vec::with_capacity(g.num_edges());
    let mut total = 0;
    for s in &signs {
        offset.push(total);
        total += s.len();
    }
    let mut parent: Vec<usize> = (0..total).collect();
    let values = f.vertex_values()?;
    let mut vertex_zeros = Vec::new();
    for (m, v) in g.vertices().iter().enumerate() {
        if v.condition == Condition::Dirichlet {
            continue;
        }
        if values[m].abs() <= small {
            vertex_zeros.push(m);
            continue;
        }
        let segs: Vec<usize> = v
            .endpoints
            .iter()
            .filter_map(|&j| {
                let n = j / 2;
                let count = signs[n].len();
                if count == 0 {
                    None
                } else if j % 2 == 0 {
                    Some(offset[n])
                } else {
                    Some(offset[n] + count - 1)
                }
            })
            .collect();
        for w in segs.windows(2) {
            let (ra, rb) = (find_root(&mut parent, w[0]), find_root(&mut parent, w[1]));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }
    let mut label = vec![usize::MAX; total];
    let mut next = 0;
    let mut assignment = Vec::with_capacity(g.num_edges());
    for (n, s) in signs.iter().enumerate() {
        let mut row = Vec::with_capacity(s.len());
        for i in 0..s.len() {
            let r = find_root(&mut parent, offset[n] + i);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            row.push(label[r]);
        }
        assignment.push(row);
    }
    Ok(NodalDecomposition {
        interior_zeros,
        generic: vertex_zeros.is_empty(),
        vertex_zeros,
        domain_count: next,
        domain_assignment: assignment,
        segment_signs: signs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityRow {
    pub k: f64,
    pub nodal_count: usize,
    pub parity_match: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityReport {
    pub euler_characteristic: i64,
    pub hypotheses_met: bool,
    pub insufficient: bool,
    pub rows: Vec<ParityRow>,
    pub matches: usize,
}

impl ParityReport {
    pub fn any_match(&self) -> bool {
        self.matches > 0
    }
}

/// Nodal counts of the first `count` generic eigenfunctions and whether
/// their parity agrees with that of `chi = M - N`.
pub fn parity_scan(g: &MetricGraph, count: usize, k_max: f64) -> Result<ParityReport> {
    let seq = generic_sequence(g, count, k_max)?;
    let chi = g.euler_characteristic();
    let mut rows = Vec::new();
    for p in &seq.pairs {
        let d = nodal_domains(g, p)?;
        rows.push(ParityRow {
            k: p.k,
            nodal_count: d.domain_count,
            parity_match: (d.domain_count as i64 - chi).rem_euclid(2) == 0,
        });
    }
    Ok(ParityReport {
        euler_characteristic: chi,
        hypotheses_met: seq.hypotheses_met,
        insufficient: seq.insufficient,
        matches: rows.iter().filter(|r| r.parity_match).count(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericRow {
    /// Level index, `0` for the zero-energy state.
    pub index: usize,
    pub k: f64,
    pub multiplicity: usize,
    pub min_vertex_value: Option<f64>,
    pub generic: bool,
    pub nodal_count: Option<usize>,
    pub parity_match: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenericTable {
    pub rows: Vec<GenericRow>,
    pub generic_found: usize,
    pub requested: usize,
    pub insufficient: bool,
    pub hypotheses_met: bool,
    pub euler_characteristic: i64,
}

/// Genericity and nodal parity of every level up to the `count`-th generic
/// one. The zero-energy state, when present, is listed first with index 0.
pub fn generic_table(g: &MetricGraph, count: usize, k_max: f64, threshold: f64) -> Result<GenericTable> {
    let slice = find_spectrum(g, k_max)?;
    let chi = g.euler_characteristic();
    let mut rows = Vec::new();
    let row_for = |index: usize, pair: &Eigenpair| -> Result<GenericRow> {
        let r = genericity(g, pair, threshold)?;
        let nodal = if r.simple {
            Some(nodal_domains_with(g, pair, threshold)?.domain_count)
        } else {
            None
        };
        Ok(GenericRow {
            index,
            k: pair.k,
            multiplicity: pair.multiplicity,
            min_vertex_value: r.min_vertex_value,
            generic: r.generic,
            nodal_count: nodal,
            parity_match: nodal.map(|c| (c as i64 - chi).rem_euclid(2) == 0),
        })
    };
    if let Some(z) = zero_mode_pair(g) {
        rows.push(row_for(0, &z)?);
    }
    let mut found = 0;
    for (i, z) in slice.zeros.iter().enumerate() {
        if found >= count {
            break;
        }
        let row = row_for(i + 1, z)?;
        if row.generic {
            found += 1;
        }
        rows.push(row);
    }
    Ok(GenericTable {
        rows,
        generic_found: found,
        requested: count,
        insufficient: found < count,
        hypotheses_met: hypotheses_met(g),
        euler_characteristic: chi,
    })
}

impl GenericTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("# euler_characteristic={}\n", self.euler_characteristic));
        s.push_str(&format!("# hypotheses_met={}\n", self.hypotheses_met));
        s.push_str(&format!(
            "# generic_found={} requested={} insufficient={}\n",
            self.generic_found, self.requested, self.insufficient
        ));
        if self.rows.first().is_some_and(|r| r.index == 0) {
            s.push_str("# index 0 is the zero-energy state (non-secular: constant on each component)\n");
        }
        s.push_str("index,k,multiplicity,min_vertex_value,generic,nodal_count,parity_match\n");
        for r in &self.rows {
            let mv = match r.min_vertex_value {
                Some(v) if v.is_infinite() => "inf".to_string(),
                Some(v) => format_real(v),
                None => String::new(),
            };
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.index,
                format_real(r.k),
                r.multiplicity,
                mv,
                r.generic,
                r.nodal_count.map(|c| c.to_string()).unwrap_or_default(),
                r.parity_match.map(|c| c.to_string()).unwrap_or_default()
            ));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilateralReport {
    pub edge_length: f64,
    pub k_star: f64,
    pub multiplicity: usize,
    /// `1 + beta_1`.
    pub expected_multiplicity: usize,
    /// `cos(k t)` on every edge lies in the eigenspace.
    pub contains_equal_vertex_function: bool,
    /// For a simple eigenvalue: spread of the vertex values of the computed
    /// eigenfunction relative to its sup-norm.
    pub vertex_spread: Option<f64>,
    pub periodic: bool,
    pub max_period_error: f64,
}

impl EquilateralReport {
    pub fn ok(&self) -> bool {
        self.multiplicity == self.expected_multiplicity && self.contains_equal_vertex_function && self.periodic
    }
}

/// Checks at `k = 2 pi / l` for a graph with all lengths `l` and standard
/// conditions.
pub fn equilateral_check(g: &MetricGraph) -> Result<EquilateralReport> {
    g.ensure_valid()?;
    if !g.all_standard() {
        return Err(Error::NotEquilateral("graph has Dirichlet vertices".into()));
    }
    let l = g.length(0);
    if g.edges().iter().any(|e| (e.length - l).abs() > 1e-12 * l) {
        return Err(Error::NotEquilateral("edge lengths differ".into()));
    }
    let period = 2.0 * PI / l;
    let slice = find_spectrum(g, 2.0 * period)?;
    let at_star = slice.zeros.iter().find(|z| (z.k - period).abs() < 1e-8 * period);
    let multiplicity = at_star.map(|z| z.multiplicity).unwrap_or(0);

    // cos(k t) has value 1 and zero derivative at both ends of every edge
    let f = crate::secular::SecularFunction::new(g)?;
    let cosine = crate::spectral::Amplitudes::from_element(g.num_endpoints(), Complex::new(0.5, 0.0));
    let resid = (f.matrix(Complex::new(period, 0.0)) * &cosine).norm() / cosine.norm();
    let contains = resid < 1e-8;

    let vertex_spread = match at_star {
        Some(z) if z.multiplicity == 1 => {
            let e = eigenfunction(g, z, 0)?;
            let v = e.vertex_values()?;
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            Some((hi - lo) / e.sup_norm())
        }
        _ => None,
    };

    let first: Vec<&Eigenpair> = slice.zeros.iter().filter(|z| z.k <= period * (1.0 + 1e-12)).collect();
    let second: Vec<&Eigenpair> = slice.zeros.iter().filter(|z| z.k > period * (1.0 + 1e-12)).collect();
    let mut periodic = first.len() == second.len();
    let mut max_err: f64 = 0.0;
    if periodic {
        for (x, y) in first.iter().zip(&second) {
            max_err = max_err.max((y.k - x.k - period).abs());
            if x.multiplicity != y.multiplicity {
                periodic = false;
            }
        }
        periodic &= max_err < 1e-8 * period;
    } else {
        max_err = f64::INFINITY;
    }
    Ok(EquilateralReport {
        edge_length: l,
        k_star: period,
        multiplicity,
        expected_multiplicity: 1 + g.betti_number(),
        contains_equal_vertex_function: contains,
        vertex_spread,
        periodic,
        max_period_error: max_err,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MFunctionSample {
    pub vertex: usize,
    pub lambda: f64,
    pub n_max: usize,
    /// `-1 / S`.
    pub value: f64,
    /// `S = sum |psi_n(V)|^2 / (lambda_n - lambda)` over the included levels.
    pub spectral_sum: f64,
}

/// The truncated M-function at a vertex with the eigen-data precomputed:
/// for each of the first `n_max` levels, `lambda_n` and the squared vertex
/// value summed over an orthonormal basis of its eigenspace.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMFunction {
    pub vertex: usize,
    pub levels: Vec<(f64, f64)>,
}

impl TruncatedMFunction {
    pub fn new(g: &MetricGraph, slice: &SpectrumSlice, vertex: usize, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be positive".into()));
        }
        let v = g
            .vertices()
            .get(vertex)
            .ok_or_else(|| Error::OutOfRange(format!("vertex {vertex} does not exist")))?;
        if v.is_dirichlet() {
            return Err(Error::InvalidInput(format!("vertex {vertex} is a Dirichlet vertex")));
        }
        let all = slice.levels(g);
        if all.len() < n_max {
            return Err(Error::InvalidInput(format!(
                "spectrum slice holds {} levels, {n_max} requested",
                all.len()
            )));
        }
        let mut levels = Vec::with_capacity(n_max);
        for pair in all.iter().take(n_max) {
            let basis = eigenbasis(g, pair)?;
            let mut w = 0.0;
            for f in &basis {
                let val = f.vertex_values()?[vertex];
                w += val * val;
            }
            levels.push((pair.lambda, w));
        }
        Ok(TruncatedMFunction { vertex, levels })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len()
    }

    pub fn spectral_sum(&self, lambda: f64) -> Result<f64> {
        let mut s = 0.0;
        for &(ln, w) in &self.levels {
            let d = (ln - lambda).abs();
            if d < 1e-6 {
                return Err(Error::PoleProximity {
                    lambda,
                    eigenvalue: ln,
                    distance: d,
                });
            }
            s += w / (ln - lambda);
        }
        Ok(s)
    }

    pub fn eval(&self, lambda: f64) -> Result<MFunctionSample> {
        let s = self.spectral_sum(lambda)?;
        Ok(MFunctionSample {
            vertex: self.vertex,
            lambda,
            n_max: self.n_max(),
            value: -1.0 / s,
            spectral_sum: s,
        })
    }
}

/// `M_V(lambda) = -(sum_{n <= n_max} |psi_n(V)|^2 / (lambda_n - lambda))^{-1}`.
pub fn m_function_truncated(
    g: &MetricGraph,
    slice: &SpectrumSlice,
    vertex: usize,
    lambda: f64,
    n_max: usize,
) -> Result<MFunctionSample> {
    TruncatedMFunction::new(g, slice, vertex, n_max)?.eval(lambda)
}

/// Levels needed for an M-function with `n_max` terms.
pub fn spectrum_for_levels(g: &MetricGraph, n_max: usize) -> Result<SpectrumSlice> {
    let zero_level = usize::from(!g.dirichlet_free_components().is_empty());
    first_levels(g, n_max.saturating_sub(zero_level).max(1), 1e6)
}
