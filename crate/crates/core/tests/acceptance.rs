//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use common::*;
use num_traits::{One, Zero};
use qgraph::analysis::*;
use qgraph::graph::families::*;
use qgraph::oracle::fd_spectrum;
use qgraph::poly::MultiPoly;
use qgraph::secular::*;
use qgraph::spectral::*;
use qgraph::{Complex, MetricGraph, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok_or<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check_wavenumbers(g: &MetricGraph, k_max: f64, expect: &[f64]) -> Result<f64, String> {
    let t = Instant::now();
    let s = ok_or(find_spectrum(g, k_max))?;
    let secs = t.elapsed().as_secs_f64();
    ensure!(s.zeros.len() == expect.len(), "found {} zeros, expected {}", s.zeros.len(), expect.len());
    for (z, &k) in s.zeros.iter().zip(expect) {
        ensure!((z.k - k).abs() <= 1e-9, "k = {} vs {k}", z.k);
        ensure!(z.multiplicity == 1, "multiplicity {} at k = {k}", z.multiplicity);
    }
    ensure!(secs < 1.0, "runtime {secs:.3} s");
    Ok(secs)
}

fn criterion_1() -> Outcome {
    let a = check_wavenumbers(&dirichlet_interval(), 5.5, &[1.0, 2.0, 3.0, 4.0, 5.0])?;
    let b = check_wavenumbers(&mixed_interval(), 3.0, &[0.5, 1.5, 2.5])?;
    Ok(format!("k within 1e-9; runtimes {a:.3} s and {b:.3} s"))
}

fn criterion_2() -> Outcome {
    let g = circle(2.0 * PI);
    let s = ok_or(find_spectrum(&g, 3.5))?;
    ensure!(s.zeros.len() == 3, "found {} zeros", s.zeros.len());
    for (i, z) in s.zeros.iter().enumerate() {
        let k = (i + 1) as f64;
        ensure!((z.k - k).abs() <= 1e-9, "k = {}", z.k);
        let wind = ok_or(count_zeros_in_box(&g, k - 0.25, k + 0.25, 0.25))?;
        let null = ok_or(null_space_at(&g, z.k, 1e-8))?.len();
        ensure!(z.multiplicity == 2 && wind == 2 && null == 2, "k = {k}: multiplicity {}, winding {wind}, null space {null}", z.multiplicity);
    }
    let p = ok_or(secular_polynomial(&g))?;
    let q = |n: i64| Rational::from_integer(n.into());
    let expect = MultiPoly::from_terms(1, vec![(vec![0], q(-1)), (vec![1], q(2)), (vec![2], q(-1))]);
    ensure!(p == expect, "P = {:?}", p);
    let grad = poly_gradient(&p, &[Rational::one()]);
    ensure!(grad.len() == 1 && grad[0].is_zero(), "grad P(1) = {:?}", grad);
    ensure!(poly_eval(&p, &[Rational::one()]).is_zero(), "P(1) != 0");
    Ok("k = 1, 2, 3 double (winding 2, null space 2); P = -(z-1)^2 exactly; grad P(1) = 0".into())
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for (name, g) in [("3-star", standard_star(&[1.0, 1.0, 1.0])), ("2-path", path(&[1.0, 1.0]))] {
        let r = ok_or(equilateral_check(&g))?;
        ensure!(r.multiplicity == 1, "{name}: multiplicity {} at 2 pi", r.multiplicity);
        let spread = r.vertex_spread.ok_or(format!("{name}: no vertex values"))?;
        ensure!(spread <= 1e-8, "{name}: vertex spread {spread:.3e}");
        let s = ok_or(find_spectrum(&g, 7.0))?;
        let z = s.zeros.iter().find(|z| (z.k - 2.0 * PI).abs() < 1e-9).ok_or(format!("{name}: no zero at 2 pi"))?;
        let f = ok_or(eigenfunction(&g, z, 0))?;
        let v = ok_or(f.vertex_values())?;
        ensure!(v.iter().all(|x| x.abs() > 1e-3 * f.sup_norm()), "{name}: vanishing vertex value");
        notes.push(format!("{name} simple, spread {spread:.1e}"));
    }
    let r = ok_or(equilateral_check(&circle(1.0)))?;
    ensure!(r.multiplicity == 2 && r.expected_multiplicity == 2, "circle: multiplicity {}", r.multiplicity);
    notes.push("circle multiplicity 2 = 1 + b1".into());
    Ok(notes.join("; "))
}

/// Winding count on a box isolating `z` from its neighbours.
fn isolated_winding(g: &MetricGraph, zeros: &[Eigenpair], i: usize) -> Result<usize, String> {
    let k = zeros[i].k;
    let mut r = scan_step(g);
    if i > 0 {
        r = r.min(0.5 * (k - zeros[i - 1].k));
    }
    if i + 1 < zeros.len() {
        r = r.min(0.5 * (zeros[i + 1].k - k));
    }
    ok_or(count_zeros_in_box(g, k - r, k + r, r))
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for c in corpus() {
        let s = ok_or(find_spectrum(&c.graph, 20.0))?;
        for i in 0..s.zeros.len() {
            let z = &s.zeros[i];
            let wind = isolated_winding(&c.graph, &s.zeros, i)?;
            let null = ok_or(null_space_at(&c.graph, z.k, 1e-8))?.len();
            ensure!(
                wind == null && null == z.multiplicity,
                "{} k = {}: winding {wind}, null space {null}, reported {}",
                c.name,
                z.k,
                z.multiplicity
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} zeros below k = 20 on 8 graphs"))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for c in corpus() {
        let p = ok_or(secular_polynomial(&c.graph))?;
        let f = ok_or(SecularFunction::new(&c.graph))?;
        for _ in 0..100 {
            let k = Complex::new(rng.random_range(0.0..20.0), 0.0);
            let direct = f.eval(k);
            let via = poly_on_curve(&p, &c.graph, k);
            let rel = (direct - via).norm() / (1.0 + direct.norm());
            worst = worst.max(rel);
            ensure!(rel <= 1e-9, "{} k = {}: deviation {rel:.3e}", c.name, k.re);
        }
    }
    Ok(format!("800 samples, worst scaled deviation {worst:.2e}"))
}

fn criterion_6() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for c in corpus() {
        let g = &c.graph;
        let s = ok_or(first_levels(g, 12, 200.0))?;
        let simple: Vec<&Eigenpair> = s.zeros.iter().filter(|z| z.multiplicity == 1).take(5).collect();
        for z in &simple {
            for e in 0..g.num_edges() {
                let exact = ok_or(hadamard_derivative(g, z, e))?;
                let fd = ok_or(hadamard_finite_difference(g, z, e, 1e-5))?;
                let scale = exact.abs().max(1e-6 * (1.0 + z.lambda));
                let rel = (exact - fd).abs() / scale;
                worst = worst.max(rel);
                ensure!(rel <= 1e-4, "{} k = {} edge {e}: formula {exact}, difference {fd}", c.name, z.k);
                checked += 1;
            }
        }
        if g.has_dirichlet() {
            let ground = &s.zeros[0];
            for e in 0..g.num_edges() {
                let d = ok_or(hadamard_derivative(g, ground, e))?;
                ensure!(d < 0.0, "{}: ground-state derivative {d} on edge {e}", c.name);
            }
        }
        if let Some(zm) = zero_mode_pair(g) {
            if zm.multiplicity == 1 {
                for e in 0..g.num_edges() {
                    let d = ok_or(hadamard_derivative(g, &zm, e))?;
                    ensure!(d == 0.0, "{}: constant-state derivative {d}", c.name);
                }
            }
        }
    }
    Ok(format!("{checked} derivatives, worst relative error {worst:.2e}; ground states decrease, constants give 0"))
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    for (name, g) in [("star-dirichlet-leaf", star_one_dirichlet()), ("tree-4", incommensurate_tree())] {
        let s = ok_or(find_spectrum(&g, 80.0))?;
        let levels = s.levels(&g);
        ensure!(levels.len() >= 20, "{name}: only {} levels below 80", levels.len());
        let mut generic = 0;
        for z in levels.iter().take(20) {
            let r = ok_or(genericity(&g, z, 1e-6))?;
            if r.generic {
                generic += 1;
            }
        }
        ensure!(generic >= 20, "{name}: {generic} of the first 20 eigenvalues are generic");
        let seq = ok_or(generic_sequence(&g, 20, 80.0))?;
        ensure!(seq.pairs.len() == 20 && !seq.insufficient, "{name}: generic_sequence returned {}", seq.pairs.len());
        ensure!(seq.pairs.iter().all(|p| p.multiplicity == 1), "{name}: non-simple pair returned");
        notes.push(format!("{name} 20/20 generic"));
    }
    let c = ok_or(generic_sequence(&circle(2.0 * PI), 3, 20.0))?;
    ensure!(c.insufficient, "circle: no insufficiency flag");
    notes.push(format!("circle insufficient ({} generic)", c.pairs.len()));
    Ok(notes.join("; "))
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for c in corpus() {
        if !hypotheses_met(&c.graph) {
            continue;
        }
        let r = ok_or(parity_scan(&c.graph, 10, 80.0))?;
        ensure!(r.rows.len() == 10, "{}: {} generic eigenfunctions", c.name, r.rows.len());
        ensure!(r.any_match(), "{}: no nodal count with the parity of chi = {}", c.name, r.euler_characteristic);
        notes.push(format!("{} {}/10", c.name, r.matches));
    }
    let r = ok_or(parity_scan(&dirichlet_interval(), 10, 20.0))?;
    for (i, row) in r.rows.iter().enumerate() {
        ensure!(row.nodal_count == i + 1, "Dirichlet interval level {}: {} domains", i + 1, row.nodal_count);
    }
    Ok(format!("parity matches: {}; Dirichlet interval counts equal the index", notes.join(", ")))
}

fn criterion_9(suite_start: Instant) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ratios = Vec::new();
    for c in corpus() {
        let g = &c.graph;
        let s = ok_or(first_levels(g, 12, 200.0))?;
        let exact: Vec<f64> = s.eigenvalues().into_iter().take(10).collect();
        ensure!(exact.len() == 10, "{}: {} eigenvalues", c.name, exact.len());
        let fd = ok_or(fd_spectrum(g, 1e-3, 10))?;
        let fd_half = ok_or(fd_spectrum(g, 5e-4, 10))?;
        for j in 0..10 {
            if exact[j] == 0.0 {
                ensure!(fd[j].abs() < 1e-8, "{}: zero eigenvalue approximated by {}", c.name, fd[j]);
                continue;
            }
            let e1 = (fd[j] - exact[j]).abs() / exact[j];
            let e2 = (fd_half[j] - exact[j]).abs() / exact[j];
            worst = worst.max(e1);
            ensure!(e1 <= 5e-3, "{} eigenvalue {j}: relative error {e1:.3e}", c.name);
            if e2 > 1e-11 {
                ratios.push(e1 / e2);
            }
        }
    }
    ratios.sort_by(f64::total_cmp);
    let median = ratios[ratios.len() / 2];
    let (lo, hi) = (ratios[0], ratios[ratios.len() - 1]);
    ensure!((3.5..=4.5).contains(&median), "median error ratio {median:.3}");
    ensure!(lo >= 3.0 && hi <= 5.0, "error ratios range over [{lo:.3}, {hi:.3}]");
    let elapsed = suite_start.elapsed().as_secs_f64();
    ensure!(elapsed < 120.0, "suite runtime {elapsed:.1} s");
    Ok(format!(
        "worst relative error {worst:.2e} at h = 1e-3; halving h divides errors by {lo:.2}..{hi:.2} (median {median:.2}); suite so far {elapsed:.1} s"
    ))
}

/// The spectral sum `S = -1/M` near `lambda_n`: a pole when the
/// eigenfunction is visible from the vertex, a regular point otherwise.
fn criterion_10() -> Outcome {
    let g = path(&[1.0, 1.0]);
    let center = 1;
    let n_max = 40;
    let s = ok_or(spectrum_for_levels(&g, n_max))?;
    let m = ok_or(TruncatedMFunction::new(&g, &s, center, n_max))?;
    let mut visible = 0;
    let mut hidden = 0;
    // levels 1..=4 are k = pi/2, pi, 3pi/2, 2pi
    for (lam, w) in m.levels.iter().copied().skip(1).take(4) {
        let sum = |x: f64| m.spectral_sum(x).map_err(|e| e.to_string());
        let width = 0.05 * lam;
        let grid: Vec<f64> = (0..=400)
            .map(|i| lam - width + 2.0 * width * i as f64 / 400.0)
            .filter(|x| (x - lam).abs() > 1e-3 * lam)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&x| sum(x)).collect::<Result<_, _>>()?;
        let changes = vals.windows(2).filter(|v| v[0].signum() != v[1].signum()).count();
        let near = sum(lam - 1e-5 * lam)?.abs().max(sum(lam + 1e-5 * lam)?.abs());
        let far = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if w > 1e-12 {
            // pole: one sign change, blow-up towards lambda_n
            ensure!(changes == 1, "visible lambda = {lam}: {changes} sign changes of the spectral sum");
            let edge = vals[0].abs().max(vals[vals.len() - 1].abs());
            ensure!(near > 100.0 * edge, "visible lambda = {lam}: no blow-up ({near:.3e} vs {edge:.3e})");
            let left = ok_or(m.eval(lam - 1e-4 * lam))?.value;
            let right = ok_or(m.eval(lam + 1e-4 * lam))?.value;
            ensure!(left.signum() != right.signum(), "visible lambda = {lam}: M keeps its sign");
            visible += 1;
        } else {
            // regular point: bounded, continuous across lambda_n
            let jump = (sum(lam + 1e-5 * lam)? - sum(lam - 1e-5 * lam)?).abs();
            ensure!(near <= 2.0 * far && jump < 1e-3 * far.max(1e-12), "hidden lambda = {lam}: singular behaviour");
            hidden += 1;
        }
    }
    ensure!(visible == 2 && hidden == 2, "visible {visible}, hidden {hidden}");
    Ok(format!(
        "2-path centre vertex, {n_max} levels: poles at k = pi, 2pi; no pole at k = pi/2, 3pi/2 (psi vanishes there)"
    ))
}

fn main() {
    let start = Instant::now();
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "canonical spectra", Box::new(criterion_1)),
        (2, "circle counterexample", Box::new(criterion_2)),
        (3, "equilateral tree eigenvalue", Box::new(criterion_3)),
        (4, "multiplicity equals zero order", Box::new(criterion_4)),
        (5, "secular polynomial identity", Box::new(criterion_5)),
        (6, "Hadamard formula", Box::new(criterion_6)),
        (7, "generic sequences", Box::new(criterion_7)),
        (8, "nodal parity", Box::new(criterion_8)),
        (9, "finite-difference oracle", Box::new(move || criterion_9(start))),
        (10, "M-function poles", Box::new(criterion_10)),
    ];
    let mut failed = 0;
    for (n, title, run) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run())).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2} ({title}) [{secs:.2} s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n:>2} ({title}) [{secs:.2} s]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed, {:.1} s", 10 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
