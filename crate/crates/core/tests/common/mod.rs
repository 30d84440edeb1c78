#![allow(dead_code)]

use qgraph::graph::families::*;
use qgraph::{Condition, MetricGraph};
use std::f64::consts::{E, PI};

pub struct Named {
    pub name: &'static str,
    pub graph: MetricGraph,
}

fn named(name: &'static str, graph: MetricGraph) -> Named {
    Named { name, graph }
}

pub fn dirichlet_interval() -> MetricGraph {
    interval(PI, Condition::Dirichlet, Condition::Dirichlet)
}

pub fn mixed_interval() -> MetricGraph {
    interval(PI, Condition::Dirichlet, Condition::Standard)
}

pub fn star_one_dirichlet() -> MetricGraph {
    star(
        &[1.0, 2f64.sqrt(), PI / 3.0],
        &[Condition::Dirichlet, Condition::Standard, Condition::Standard],
    )
}

/// Four vertices, three edges, incommensurate lengths.
pub fn incommensurate_tree() -> MetricGraph {
    path(&[1.0, 3f64.sqrt(), E / 2.0])
}

pub fn corpus() -> Vec<Named> {
    vec![
        named("interval-DD", dirichlet_interval()),
        named("interval-DS", mixed_interval()),
        named("path", path(&[1.0, 2f64.sqrt()])),
        named("circle", circle(2.0 * PI)),
        named("star", standard_star(&[1.0, 2f64.sqrt(), PI / 3.0])),
        named("star-dirichlet-leaf", star_one_dirichlet()),
        named("figure-eight", figure_eight(1.0, 3f64.sqrt())),
        named("tree-4", incommensurate_tree()),
    ]
}
