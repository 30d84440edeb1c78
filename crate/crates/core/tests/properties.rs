mod common;

use common::*;
use proptest::prelude::*;
use qgraph::analysis::nodal_domains;
use qgraph::graph::families::*;
use qgraph::secular::*;
use qgraph::spectral::*;
use qgraph::{Complex, MetricGraph, Vertex};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn weyl_count_within_bound() {
    for c in corpus() {
        let s = find_spectrum(&c.graph, 20.0).unwrap();
        let count: usize = s.zeros.iter().map(|z| z.multiplicity).sum();
        let est = weyl_estimate(&c.graph, 20.0);
        let bound = 2.0 * c.graph.num_edges() as f64 + 2.0;
        assert!((count as f64 - est).abs() <= bound, "{}: {count} vs {est}", c.name);
    }
}

#[test]
fn subdivision_leaves_spectrum_unchanged() {
    for c in corpus() {
        let g = &c.graph;
        let sub = g.subdivide_edge(0, 0.37 * g.length(0)).unwrap();
        let a = first_levels(g, 10, 200.0).unwrap().eigenvalues();
        let b = first_levels(&sub, 10, 200.0).unwrap().eigenvalues();
        for (x, y) in a.iter().zip(&b).take(10) {
            assert!((x.sqrt() - y.sqrt()).abs() <= 1e-9, "{}: {x} vs {y}", c.name);
        }
    }
}

#[test]
fn scaling_divides_wavenumbers() {
    for c in corpus() {
        let factor = 1.7;
        let a = find_spectrum(&c.graph, 12.0).unwrap();
        let b = find_spectrum(&c.graph.scaled(factor), 12.0 / factor).unwrap();
        assert_eq!(a.count(), b.count(), "{}", c.name);
        for (x, y) in a.zeros.iter().zip(&b.zeros) {
            assert!((x.k / factor - y.k).abs() <= 1e-9 * y.k, "{}: {} vs {}", c.name, x.k, y.k);
            assert_eq!(x.multiplicity, y.multiplicity);
        }
    }
}

#[test]
fn prufer_quantity_constant_on_edges() {
    for c in corpus() {
        let g = &c.graph;
        let s = find_spectrum(g, 10.0).unwrap();
        for z in &s.zeros {
            for f in eigenbasis(g, z).unwrap() {
                for e in 0..g.num_edges() {
                    let vals: Vec<f64> = (0..11)
                        .map(|i| f.prufer(e, g.length(e) * i as f64 / 10.0).unwrap())
                        .collect();
                    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
                    let min = vals.iter().cloned().fold(f64::MAX, f64::min);
                    assert!(max - min <= 1e-8 * max.max(1e-300), "{} k = {} edge {e}", c.name, z.k);
                }
            }
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            corpus()
                .iter()
                .map(|c| {
                    let s = find_spectrum(&c.graph, 15.0).unwrap();
                    let fd = qgraph::oracle::fd_spectrum(&c.graph, 1e-2, 5).unwrap();
                    (spectrum_csv(&s), fd)
                })
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn secular_modulus_even_in_k() {
    let mut rng = StdRng::seed_from_u64(11);
    for c in corpus() {
        let f = SecularFunction::new(&c.graph).unwrap();
        for _ in 0..20 {
            let k = rng.random_range(0.1..20.0);
            let a = f.eval(Complex::new(k, 0.0)).norm();
            let b = f.eval(Complex::new(-k, 0.0)).norm();
            assert!((a - b).abs() <= 1e-10 * (1.0 + a), "{} k = {k}: {a} vs {b}", c.name);
        }
    }
}

#[test]
fn gradient_matches_difference_quotient() {
    let mut rng = StdRng::seed_from_u64(3);
    for c in corpus() {
        let p = secular_polynomial(&c.graph).unwrap();
        let n = c.graph.num_edges();
        for _ in 0..20 {
            let z: Vec<Complex> = (0..n)
                .map(|_| Complex::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
                .collect();
            let grad = poly_gradient(&p, &z);
            for (j, gj) in grad.iter().enumerate() {
                let step = 1e-6;
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += step;
                zm[j] -= step;
                let fd = (poly_eval(&p, &zp) - poly_eval(&p, &zm)) / (2.0 * step);
                assert!((fd - gj).norm() <= 1e-5 * (1.0 + gj.norm()), "{} var {j}: {fd} vs {gj}", c.name);
            }
        }
    }
}

#[test]
fn exponents_at_most_two() {
    for c in corpus() {
        let p = secular_polynomial(&c.graph).unwrap();
        assert!(p.max_exponent() <= 2, "{}", c.name);
    }
}

#[test]
fn tree_levels_have_courant_sharp_counts() {
    for g in [incommensurate_tree(), star_one_dirichlet(), path(&[1.0, 2f64.sqrt()])] {
        let s = find_spectrum(&g, 30.0).unwrap();
        for (i, z) in s.levels(&g).iter().enumerate().take(12) {
            if !z.is_simple() {
                continue;
            }
            let d = nodal_domains(&g, z).unwrap();
            if d.generic {
                assert_eq!(d.domain_count, i + 1, "level {} at k = {}", i + 1, z.k);
            }
        }
    }
}

/// A random tree: edge `n` joins a fresh leaf at its `t = l` end to an
/// earlier vertex at its `t = 0` end.
fn random_tree(parents: &[usize], lengths: &[f64]) -> MetricGraph {
    let n = lengths.len();
    let mut attached: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (e, &p) in parents.iter().enumerate() {
        attached[p % (e + 1)].push(2 * e);
        attached[e + 1].push(2 * e + 1);
    }
    let vertices = attached.into_iter().map(Vertex::standard).collect();
    MetricGraph::from_lengths(lengths, vertices)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_trees_have_simple_counted_spectra(
        parents in prop::collection::vec(0usize..8, 2..5),
        seed in prop::collection::vec(0.5f64..2.0, 5),
    ) {
        let lengths: Vec<f64> = seed[..parents.len()].to_vec();
        let g = random_tree(&parents, &lengths);
        let s = find_spectrum(&g, 8.0).unwrap();
        prop_assert_eq!(s.lambda0_multiplicity, 1);
        for (i, z) in s.zeros.iter().enumerate() {
            let null = null_space_at(&g, z.k, 1e-8).unwrap().len();
            prop_assert_eq!(null, z.multiplicity);
            if i + 1 < s.zeros.len() {
                prop_assert!(s.zeros[i + 1].k > z.k);
            }
            for f in eigenbasis(&g, z).unwrap() {
                prop_assert!(f.kirchhoff_residual() <= 1e-7);
                prop_assert!((f.norm_squared() - 1.0).abs() <= 1e-9);
            }
        }
        let count: usize = s.zeros.iter().map(|z| z.multiplicity).sum();
        let est = weyl_estimate(&g, 8.0);
        prop_assert!((count as f64 - est).abs() <= 2.0 * lengths.len() as f64 + 2.0);
    }
}
