//! Compact metric graphs with standard and Dirichlet vertices.
//!
//! Edge `n` (0-based) is the interval `[0, length]`; its endpoints are
//! `2n` (at `t = 0`) and `2n + 1` (at `t = length`). Vertices partition the
//! `2N` endpoints. The text document uses 1-based endpoint numbers, so edge
//! `n` owns endpoints `2n + 1` and `2n + 2` there.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    Standard,
    Dirichlet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    /// 0-based endpoint indices.
    pub endpoints: Vec<usize>,
    pub condition: Condition,
}

impl Vertex {
    pub fn new(endpoints: Vec<usize>, condition: Condition) -> Self {
        Vertex {
            endpoints,
            condition,
        }
    }

    pub fn standard(endpoints: Vec<usize>) -> Self {
        Self::new(endpoints, Condition::Standard)
    }

    pub fn dirichlet(endpoint: usize) -> Self {
        Self::new(vec![endpoint], Condition::Dirichlet)
    }

    pub fn degree(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_dirichlet(&self) -> bool {
        self.condition == Condition::Dirichlet
    }
}

/// An immutable metric graph. Construction never validates; call
/// [`MetricGraph::validate`] or [`MetricGraph::ensure_valid`].
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    /// endpoint -> first vertex listing it
    owner: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IssueCode {
    NoEdges,
    NonPositiveLength,
    EmptyVertex,
    EndpointOutOfRange,
    DuplicateEndpoint,
    UncoveredEndpoint,
    DirichletDegree,
}

impl IssueCode {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueCode::NoEdges => "no-edges",
            IssueCode::NonPositiveLength => "non-positive-length",
            IssueCode::EmptyVertex => "empty-vertex",
            IssueCode::EndpointOutOfRange => "endpoint-out-of-range",
            IssueCode::DuplicateEndpoint => "duplicate-endpoint",
            IssueCode::UncoveredEndpoint => "uncovered-endpoint",
            IssueCode::DirichletDegree => "dirichlet-degree",
        }
    }
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub code: IssueCode,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
    pub connected: bool,
    pub components: usize,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "ok={} connected={} components={}",
            self.ok, self.connected, self.components
        )?;
        for issue in &self.issues {
            writeln!(f, "{}: {}", issue.code, issue.message)?;
        }
        Ok(())
    }
}

impl MetricGraph {
    pub fn new(edges: Vec<Edge>, vertices: Vec<Vertex>) -> Self {
        let mut owner = vec![None; 2 * edges.len()];
        for (m, v) in vertices.iter().enumerate() {
            for &j in &v.endpoints {
                if j < owner.len() && owner[j].is_none() {
                    owner[j] = Some(m);
                }
            }
        }
        MetricGraph {
            edges,
            vertices,
            owner,
        }
    }

    /// Convenience constructor from plain lengths and vertex records.
    pub fn from_lengths(lengths: &[f64], vertices: Vec<Vertex>) -> Self {
        Self::new(
            lengths.iter().map(|&length| Edge { length }).collect(),
            vertices,
        )
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_endpoints(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn length(&self, edge: usize) -> f64 {
        self.edges[edge].length
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Vertex owning `endpoint`, if any.
    pub fn vertex_of(&self, endpoint: usize) -> Option<usize> {
        self.owner.get(endpoint).copied().flatten()
    }

    pub fn has_dirichlet(&self) -> bool {
        self.vertices.iter().any(Vertex::is_dirichlet)
    }

    pub fn all_standard(&self) -> bool {
        !self.has_dirichlet()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let n_end = self.num_endpoints();
        if self.edges.is_empty() {
            issues.push(Issue {
                code: IssueCode::NoEdges,
                message: "graph has no edges".into(),
            });
        }
        for (n, e) in self.edges.iter().enumerate() {
            if !(e.length > 0.0 && e.length.is_finite()) {
                issues.push(Issue {
                    code: IssueCode::NonPositiveLength,
                    message: format!("edge {} has length {}", n + 1, e.length),
                });
            }
        }
        let mut seen = vec![false; n_end];
        for (m, v) in self.vertices.iter().enumerate() {
            if v.endpoints.is_empty() {
                issues.push(Issue {
                    code: IssueCode::EmptyVertex,
                    message: format!("vertex {} has no endpoints", m + 1),
                });
            }
            for &j in &v.endpoints {
                if j >= n_end {
                    issues.push(Issue {
                        code: IssueCode::EndpointOutOfRange,
                        message: format!(
                            "vertex {} lists endpoint {} but the graph has {n_end}",
                            m + 1,
                            j + 1
                        ),
                    });
                } else if seen[j] {
                    issues.push(Issue {
                        code: IssueCode::DuplicateEndpoint,
                        message: format!("endpoint {} appears in more than one place", j + 1),
                    });
                } else {
                    seen[j] = true;
                }
            }
            if v.is_dirichlet() && v.degree() != 1 {
                issues.push(Issue {
                    code: IssueCode::DirichletDegree,
                    message: format!(
                        "Dirichlet vertex {} has degree {}, expected 1",
                        m + 1,
                        v.degree()
                    ),
                });
            }
        }
        for (j, s) in seen.iter().enumerate() {
            if !s {
                issues.push(Issue {
                    code: IssueCode::UncoveredEndpoint,
                    message: format!("endpoint {} belongs to no vertex", j + 1),
                });
            }
        }
        let components = self.component_labels().1;
        ValidationReport {
            ok: issues.is_empty(),
            issues,
            connected: components == 1,
            components,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            let codes: Vec<String> = report
                .issues
                .iter()
                .map(|i| format!("{} ({})", i.code, i.message))
                .collect();
            Err(Error::InvalidGraph(codes.join("; ")))
        }
    }

    /// Component label per vertex and the number of components.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let m = self.vertices.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for n in 0..self.edges.len() {
            if let (Some(u), Some(v)) = (self.vertex_of(2 * n), self.vertex_of(2 * n + 1)) {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                }
            }
        }
        let mut labels = vec![usize::MAX; m];
        let mut next = 0;
        let mut root_label = vec![usize::MAX; m];
        for v in 0..m {
            let r = find(&mut parent, v);
            if root_label[r] == usize::MAX {
                root_label[r] = next;
                next += 1;
            }
            labels[v] = root_label[r];
        }
        (labels, next)
    }

    pub fn components(&self) -> usize {
        self.component_labels().1
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.betti_number() == 0
    }

    /// Components containing no Dirichlet vertex; these carry the constant
    /// eigenfunctions at zero energy.
    pub fn dirichlet_free_components(&self) -> Vec<usize> {
        let (labels, count) = self.component_labels();
        let mut touched = vec![false; count];
        for (v, vert) in self.vertices.iter().enumerate() {
            if vert.is_dirichlet() {
                touched[labels[v]] = true;
            }
        }
        (0..count).filter(|&c| !touched[c]).collect()
    }

    /// Component label of each edge (via the vertex at its start).
    pub fn edge_components(&self) -> Vec<usize> {
        let (labels, _) = self.component_labels();
        (0..self.edges.len())
            .map(|n| self.vertex_of(2 * n).map(|v| labels[v]).unwrap_or(usize::MAX))
            .collect()
    }

    /// `M - N`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    /// `N - M + components`: the number of independent cycles.
    pub fn betti_number(&self) -> usize {
        let b = self.edges.len() as i64 - self.vertices.len() as i64 + self.components() as i64;
        b.max(0) as usize
    }

    /// Split `edge` at `position` by inserting a standard degree-2 vertex.
    /// The first piece keeps the edge index, the second piece is appended.
    pub fn subdivide_edge(&self, edge: usize, position: f64) -> Result<MetricGraph> {
        let len = self.edge_length_checked(edge)?;
        if !(position > 0.0 && position < len) {
            return Err(Error::OutOfRange(format!(
                "subdivision position {position} not inside (0, {len})"
            )));
        }
        let new_edge = self.edges.len();
        let mut edges = self.edges.clone();
        edges[edge].length = position;
        edges.push(Edge {
            length: len - position,
        });
        let old_end = 2 * edge + 1;
        let mut vertices = self.vertices.clone();
        for v in &mut vertices {
            for j in &mut v.endpoints {
                if *j == old_end {
                    *j = 2 * new_edge + 1;
                }
            }
        }
        vertices.push(Vertex::standard(vec![old_end, 2 * new_edge]));
        Ok(MetricGraph::new(edges, vertices))
    }

    pub fn perturb_length(&self, edge: usize, delta: f64) -> Result<MetricGraph> {
        let len = self.edge_length_checked(edge)?;
        let new_len = len + delta;
        if !(new_len > 0.0) {
            return Err(Error::OutOfRange(format!(
                "edge {edge} would get non-positive length {new_len}"
            )));
        }
        let mut edges = self.edges.clone();
        edges[edge].length = new_len;
        Ok(MetricGraph::new(edges, self.vertices.clone()))
    }

    /// Multiply every edge length by `factor`.
    pub fn scaled(&self, factor: f64) -> MetricGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                length: e.length * factor,
            })
            .collect();
        MetricGraph::new(edges, self.vertices.clone())
    }

    /// Swap the roles of the two endpoints of `edge`.
    pub fn reverse_edge(&self, edge: usize) -> Result<MetricGraph> {
        self.edge_length_checked(edge)?;
        let (s, e) = (2 * edge, 2 * edge + 1);
        let mut vertices = self.vertices.clone();
        for v in &mut vertices {
            for j in &mut v.endpoints {
                if *j == s {
                    *j = e;
                } else if *j == e {
                    *j = s;
                }
            }
        }
        Ok(MetricGraph::new(self.edges.clone(), vertices))
    }

    fn edge_length_checked(&self, edge: usize) -> Result<f64> {
        self.edges
            .get(edge)
            .map(|e| e.length)
            .ok_or_else(|| Error::OutOfRange(format!("edge index {edge} out of range")))
    }
}

// ---------------------------------------------------------------------------
// Text document

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDocument {
    edges: Vec<Edge>,
    vertices: Vec<VertexDocument>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexDocument {
    endpoints: Vec<usize>,
    condition: Condition,
}

/// Parse a graph description. Only syntax and the endpoint partition's
/// uniqueness are checked here.
pub fn parse_graph(document: &str) -> Result<MetricGraph> {
    let doc: GraphDocument = serde_json::from_str(document).map_err(|e| Error::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut seen = BTreeSet::new();
    let mut vertices = Vec::with_capacity(doc.vertices.len());
    for v in doc.vertices {
        let mut endpoints = Vec::with_capacity(v.endpoints.len());
        for j in v.endpoints {
            if !seen.insert(j) {
                return Err(Error::DuplicateEndpoint(j));
            }
            if j == 0 {
                return Err(Error::Syntax {
                    line: 0,
                    column: 0,
                    message: "endpoint numbers are 1-based; found 0".into(),
                });
            }
            endpoints.push(j - 1);
        }
        vertices.push(Vertex::new(endpoints, v.condition));
    }
    Ok(MetricGraph::new(doc.edges, vertices))
}

pub fn serialize_graph(g: &MetricGraph) -> String {
    let doc = GraphDocument {
        edges: g.edges.clone(),
        vertices: g
            .vertices
            .iter()
            .map(|v| VertexDocument {
                endpoints: v.endpoints.iter().map(|j| j + 1).collect(),
                condition: v.condition,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph document serializes")
}

// ---------------------------------------------------------------------------
// Common graph families

pub mod families {
    use super::{Condition, MetricGraph, Vertex};

    pub fn interval(length: f64, left: Condition, right: Condition) -> MetricGraph {
        MetricGraph::from_lengths(&[length], vec![Vertex::new(vec![0], left), Vertex::new(vec![1], right)])
    }

    /// A single edge whose endpoints share one standard vertex.
    pub fn circle(length: f64) -> MetricGraph {
        MetricGraph::from_lengths(&[length], vec![Vertex::standard(vec![0, 1])])
    }

    /// Path with standard vertices; edge `n` runs from vertex `n` to `n + 1`.
    pub fn path(lengths: &[f64]) -> MetricGraph {
        let n = lengths.len();
        let mut vertices = vec![Vertex::standard(vec![0])];
        for i in 1..n {
            vertices.push(Vertex::standard(vec![2 * i - 1, 2 * i]));
        }
        vertices.push(Vertex::standard(vec![2 * n - 1]));
        MetricGraph::from_lengths(lengths, vertices)
    }

    /// Star with a standard center at the `t = 0` end of every edge;
    /// `leaves[n]` is the condition at the outer end of edge `n`.
    pub fn star(lengths: &[f64], leaves: &[Condition]) -> MetricGraph {
        assert_eq!(lengths.len(), leaves.len());
        let mut vertices = vec![Vertex::standard((0..lengths.len()).map(|n| 2 * n).collect())];
        for (n, &c) in leaves.iter().enumerate() {
            vertices.push(Vertex::new(vec![2 * n + 1], c));
        }
        MetricGraph::from_lengths(lengths, vertices)
    }

    pub fn standard_star(lengths: &[f64]) -> MetricGraph {
        star(lengths, &vec![Condition::Standard; lengths.len()])
    }

    /// Loops all attached to one standard vertex.
    pub fn flower(lengths: &[f64]) -> MetricGraph {
        MetricGraph::from_lengths(
            lengths,
            vec![Vertex::standard((0..2 * lengths.len()).collect())],
        )
    }

    pub fn figure_eight(l1: f64, l2: f64) -> MetricGraph {
        flower(&[l1, l2])
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use std::f64::consts::PI;

    const INTERVAL_DOC: &str = r#"{
        "edges": [ { "length": 3.141592653589793 } ],
        "vertices": [
            { "endpoints": [1], "condition": "dirichlet" },
            { "endpoints": [2], "condition": "dirichlet" }
        ] }"#;

    #[test]
    fn parses_interval() {
        let g = parse_graph(INTERVAL_DOC).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.num_vertices(), 2);
        assert!((g.length(0) - PI).abs() < 1e-15);
        assert_eq!(g.vertices()[0].endpoints, vec![0]);
        assert_eq!(g.vertices()[1].condition, Condition::Dirichlet);
    }

    #[test]
    fn parses_circle() {
        let doc = r#"{"edges":[{"length":6.283185307179586}],
                      "vertices":[{"endpoints":[1,2],"condition":"standard"}]}"#;
        let g = parse_graph(doc).unwrap();
        assert_eq!(g, circle(2.0 * PI));
        assert_eq!(g.num_vertices(), 1);
    }

    #[test]
    fn duplicate_endpoint_is_rejected() {
        let doc = r#"{"edges":[{"length":1},{"length":1}],
            "vertices":[{"endpoints":[1,3],"condition":"standard"},
                        {"endpoints":[3,4],"condition":"standard"},
                        {"endpoints":[2],"condition":"standard"}]}"#;
        match parse_graph(doc) {
            Err(Error::DuplicateEndpoint(3)) => {}
            other => panic!("expected duplicate endpoint error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_condition_and_syntax_errors_carry_position() {
        let doc = "{\"edges\":[{\"length\":1}],\n\"vertices\":[{\"endpoints\":[1,2],\"condition\":\"robin\"}]}";
        match parse_graph(doc) {
            Err(Error::Syntax { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(parse_graph("{\"edges\": ["), Err(Error::Syntax { .. })));
    }

    #[test]
    fn validation_of_small_graphs() {
        let r = interval(PI, Condition::Dirichlet, Condition::Dirichlet).validate();
        assert!(r.ok && r.connected);
        assert_eq!(r.components, 1);

        let bad = MetricGraph::from_lengths(
            &[1.0, 1.0],
            vec![
                Vertex::standard(vec![0]),
                Vertex::new(vec![1, 2], Condition::Dirichlet),
                Vertex::standard(vec![3]),
            ],
        );
        let r = bad.validate();
        assert!(!r.ok);
        assert!(r.issues.iter().any(|i| i.code == IssueCode::DirichletDegree));
        assert!(bad.ensure_valid().is_err());

        let two_circles = MetricGraph::from_lengths(
            &[1.0, 2.0],
            vec![Vertex::standard(vec![0, 1]), Vertex::standard(vec![2, 3])],
        );
        let r = two_circles.validate();
        assert!(r.ok);
        assert!(!r.connected);
        assert_eq!(r.components, 2);
    }

    #[test]
    fn validation_reports_partition_problems() {
        let g = MetricGraph::from_lengths(
            &[1.0, -1.0],
            vec![Vertex::standard(vec![0, 1, 7]), Vertex::standard(vec![])],
        );
        let codes: Vec<IssueCode> = g.validate().issues.iter().map(|i| i.code).collect();
        for c in [
            IssueCode::NonPositiveLength,
            IssueCode::EmptyVertex,
            IssueCode::EndpointOutOfRange,
            IssueCode::UncoveredEndpoint,
        ] {
            assert!(codes.contains(&c), "missing {c}");
        }
    }

    #[test]
    fn euler_and_betti() {
        let iv = interval(PI, Condition::Dirichlet, Condition::Dirichlet);
        assert_eq!(iv.euler_characteristic(), 1);
        assert_eq!(iv.betti_number(), 0);
        let c = circle(2.0 * PI);
        assert_eq!(c.euler_characteristic(), 0);
        assert_eq!(c.betti_number(), 1);
        let s = standard_star(&[1.0, 1.0, 1.0]);
        assert_eq!(s.euler_characteristic(), 1);
        assert_eq!(s.betti_number(), 0);
        assert!(s.is_tree());
        assert_eq!(figure_eight(1.0, 2.0).betti_number(), 2);
    }

    #[test]
    fn subdivision() {
        let iv = interval(PI, Condition::Dirichlet, Condition::Dirichlet);
        let p = iv.subdivide_edge(0, PI / 2.0).unwrap();
        assert_eq!(p.num_edges(), 2);
        assert_eq!(p.num_vertices(), 3);
        assert_eq!(p.lengths(), vec![PI / 2.0, PI - PI / 2.0]);
        assert_eq!(p.vertices()[2], Vertex::standard(vec![1, 2]));
        assert_eq!(p.vertices()[1], Vertex::dirichlet(3));
        assert!(p.validate().ok);

        let c = circle(2.0 * PI).subdivide_edge(0, PI).unwrap();
        assert!(c.validate().ok);
        assert_eq!(c.betti_number(), 1);

        assert!(iv.subdivide_edge(0, 0.0).is_err());
        assert!(iv.subdivide_edge(0, PI).is_err());
        assert!(iv.subdivide_edge(3, 1.0).is_err());
    }

    #[test]
    fn perturbation() {
        let iv = interval(PI, Condition::Dirichlet, Condition::Dirichlet);
        assert!((iv.perturb_length(0, 0.1).unwrap().length(0) - (PI + 0.1)).abs() < 1e-15);
        assert_eq!(iv.perturb_length(0, 0.0).unwrap(), iv);
        assert!(iv.perturb_length(0, -PI).is_err());
    }

    #[test]
    fn serialize_round_trip_of_families() {
        for g in [
            interval(PI, Condition::Dirichlet, Condition::Standard),
            circle(1.5),
            path(&[1.0, 2.0_f64.sqrt(), 0.7]),
            star(&[1.0, 2.0, 3.0], &[Condition::Dirichlet, Condition::Standard, Condition::Standard]),
            figure_eight(1.0, 3.0_f64.sqrt()),
        ] {
            assert!(g.validate().ok);
            assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
        }
    }

    #[test]
    fn dirichlet_free_components() {
        assert!(interval(1.0, Condition::Dirichlet, Condition::Standard)
            .dirichlet_free_components()
            .is_empty());
        assert_eq!(circle(1.0).dirichlet_free_components(), vec![0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn graph_strategy() -> impl Strategy<Value = MetricGraph> {
            (1usize..6, prop::collection::vec(0.1f64..5.0, 6), 0u64..1000).prop_map(
                |(n, lens, seed)| {
                    // random star/path/flower mixture with a deterministic layout
                    match seed % 3 {
                        0 => path(&lens[..n]),
                        1 => standard_star(&lens[..n]),
                        _ => flower(&lens[..n]),
                    }
                },
            )
        }

        proptest! {
            #[test]
            fn parse_serialize_identity(g in graph_strategy()) {
                prop_assert_eq!(parse_graph(&serialize_graph(&g)).unwrap(), g);
            }

            #[test]
            fn subdivision_preserves_length_and_chi(g in graph_strategy(), frac in 0.01f64..0.99, pick in 0usize..6) {
                let e = pick % g.num_edges();
                let s = g.subdivide_edge(e, frac * g.length(e)).unwrap();
                prop_assert!((s.total_length() - g.total_length()).abs() < 1e-12);
                prop_assert_eq!(s.num_edges(), g.num_edges() + 1);
                prop_assert_eq!(s.num_vertices(), g.num_vertices() + 1);
                prop_assert_eq!(s.euler_characteristic(), g.euler_characteristic());
                prop_assert!(s.validate().ok);
            }

            #[test]
            fn euler_plus_betti_is_components(g in graph_strategy()) {
                prop_assert_eq!(
                    g.euler_characteristic() + g.betti_number() as i64,
                    g.components() as i64
                );
            }
        }
    }
}
