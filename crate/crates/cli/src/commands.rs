use crate::config::{Format, Options};
use crate::{Command, Failure};
use qgraph::analysis::{self, TruncatedMFunction, DEFAULT_GEN_THRESHOLD};
use qgraph::secular::{polynomial_records, secular_polynomial};
use qgraph::spectral::{self, Eigenpair, SolverConfig};
use qgraph::{format_real, Complex, MetricGraph};
use serde_json::{json, Value};
use std::io::Write;

type Outcome = Result<(), Failure>;

/// Search limit in `k` when a command looks up a level by index.
const LEVEL_SEARCH_LIMIT: f64 = 1e4;

pub fn run(command: Command, opts: &Options) -> Outcome {
    match command {
        Command::Validate => validate(opts),
        Command::Spectrum => spectrum(opts),
        Command::Generic => generic(opts),
        Command::SecularPoly => secular_poly(opts),
        Command::SampleSecular => sample_secular(opts),
        Command::Eigenfunction => eigenfunction(opts),
        Command::Nodal => nodal(opts),
        Command::Hadamard => hadamard(opts),
        Command::Mfunction => mfunction(opts),
        Command::Oracle => oracle(opts),
    }
}

fn read_graph(opts: &Options) -> Result<MetricGraph, Failure> {
    let path = opts.graph.as_ref().ok_or_else(|| Failure::usage("--graph is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    Ok(qgraph::parse_graph(&text)?)
}

fn load_graph(opts: &Options) -> Result<MetricGraph, Failure> {
    let g = read_graph(opts)?;
    g.ensure_valid()?;
    Ok(g)
}

fn emit(opts: &Options, text: &str) -> Outcome {
    match &opts.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(format!("cannot write output: {e}"))),
    }
}

fn emit_json(opts: &Options, value: &Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    emit(opts, &text)
}

/// Finite numbers as JSON numbers, anything else as a string.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

fn solver_config(opts: &Options) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(t) = opts.rank_tol {
        cfg.rank_tol = t;
    }
    if let Some(t) = opts.newton_tol {
        cfg.newton_tol = t;
    }
    cfg
}

fn threshold(opts: &Options) -> f64 {
    opts.gen_threshold.unwrap_or(DEFAULT_GEN_THRESHOLD)
}

/// A 1-based index into a list of `len` items.
fn pick(name: &str, value: Option<usize>, len: usize) -> Result<usize, Failure> {
    let i = value.ok_or_else(|| Failure::usage(format!("--{name} is required")))?;
    if i == 0 || i > len {
        return Err(Failure::usage(format!("--{name} {i} out of range 1..={len}")));
    }
    Ok(i - 1)
}

/// The level selected by `--index`, the zero-energy state coming first.
fn select_level(g: &MetricGraph, opts: &Options) -> Result<Eigenpair, Failure> {
    let index = Options::positive("index", opts.index, 1)?;
    let zero = spectral::zero_mode_pair(g);
    let offset = usize::from(zero.is_some());
    if index == 1 {
        if let Some(z) = zero {
            return Ok(z);
        }
    }
    let limit = match opts.k_max {
        Some(_) => opts.k_max()?,
        None => LEVEL_SEARCH_LIMIT,
    };
    let need = index - offset;
    let s = spectral::first_levels(g, need, limit)?;
    s.zeros.get(need - 1).cloned().ok_or_else(|| Failure {
        code: 3,
        message: format!("level {index} not found with k <= {limit}"),
    })
}

fn validate(opts: &Options) -> Outcome {
    let g = read_graph(opts)?;
    let report = g.validate();
    match opts.format() {
        Format::Csv => emit(opts, &report.to_string())?,
        Format::Structured => emit_json(opts, &serde_json::to_value(&report).expect("report serializes"))?,
    }
    g.ensure_valid()?;
    Ok(())
}

fn spectrum(opts: &Options) -> Outcome {
    let k_max = opts.k_max()?;
    let g = load_graph(opts)?;
    let s = spectral::find_spectrum_with(&g, k_max, &solver_config(opts))?;
    match opts.format() {
        Format::Csv => emit(opts, &spectral::spectrum_csv(&s))?,
        Format::Structured => {
            let zeros: Vec<Value> = s
                .zeros
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    json!({
                        "index": i + 1,
                        "k": num(z.k),
                        "lambda": num(z.lambda),
                        "multiplicity": z.multiplicity,
                        "cluster_flag": z.cluster,
                    })
                })
                .collect();
            emit_json(
                opts,
                &json!({
                    "k_max": num(s.k_max),
                    "lambda0_multiplicity": s.lambda0_multiplicity,
                    "zeros": zeros,
                }),
            )?;
        }
    }
    let count: usize = s.zeros.iter().map(|z| z.multiplicity).sum();
    let estimate = spectral::weyl_estimate(&g, k_max);
    let bound = 2.0 * g.num_edges() as f64 + 2.0;
    let line = format!(
        "weyl: count={count} estimate={} deviation={} bound={} ok={}",
        format_real(estimate),
        format_real(count as f64 - estimate),
        format_real(bound),
        (count as f64 - estimate).abs() <= bound
    );
    if opts.output.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn generic(opts: &Options) -> Outcome {
    let k_max = opts.k_max()?;
    let count = Options::positive("count", opts.count, 10)?;
    let g = load_graph(opts)?;
    let table = analysis::generic_table(&g, count, k_max, threshold(opts))?;
    match opts.format() {
        Format::Csv => emit(opts, &table.to_csv()),
        Format::Structured => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "index": r.index,
                        "k": num(r.k),
                        "multiplicity": r.multiplicity,
                        "min_vertex_value": r.min_vertex_value.map(num),
                        "generic": r.generic,
                        "nodal_count": r.nodal_count,
                        "parity_match": r.parity_match,
                        "non_secular": r.index == 0,
                    })
                })
                .collect();
            emit_json(
                opts,
                &json!({
                    "euler_characteristic": table.euler_characteristic,
                    "hypotheses_met": table.hypotheses_met,
                    "generic_found": table.generic_found,
                    "requested": table.requested,
                    "insufficient": table.insufficient,
                    "rows": rows,
                }),
            )
        }
    }
}

fn secular_poly(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let p = secular_polynomial(&g)?;
    let records = polynomial_records(&p)?;
    match opts.format() {
        Format::Structured => {
            let mut text = qgraph::secular::export_polynomial(&p)?;
            text.push('\n');
            emit(opts, &text)
        }
        Format::Csv => {
            let mut header: Vec<String> = (1..=g.num_edges()).map(|n| format!("e{n}")).collect();
            header.push("num".into());
            header.push("den".into());
            let mut text = header.join(",");
            text.push('\n');
            for r in records {
                let mut row: Vec<String> = r.exponents.iter().map(|e| e.to_string()).collect();
                row.push(r.coefficient.num.to_string());
                row.push(r.coefficient.den.to_string());
                text.push_str(&row.join(","));
                text.push('\n');
            }
            emit(opts, &text)
        }
    }
}

/// `n` points evenly spaced over `[lo, hi]`.
fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn sample_secular(opts: &Options) -> Outcome {
    let k_max = opts.k_max()?;
    let k_min = opts.k_min.unwrap_or(0.0);
    if !(k_min.is_finite() && k_min < k_max) {
        return Err(Failure::usage(format!("--k-min must be below --k-max, got {k_min}")));
    }
    let samples = opts.samples.unwrap_or(1000);
    if samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let g = load_graph(opts)?;
    let f = qgraph::SecularFunction::new(&g)?;
    let rows: Vec<(f64, Complex)> = grid(k_min, k_max, samples)
        .into_iter()
        .map(|k| (k, f.eval(Complex::new(k, 0.0))))
        .collect();
    match opts.format() {
        Format::Csv => {
            let mut text = String::from("k,re_p,im_p,abs_p\n");
            for (k, p) in rows {
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    format_real(k),
                    format_real(p.re),
                    format_real(p.im),
                    format_real(p.norm())
                ));
            }
            emit(opts, &text)
        }
        Format::Structured => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(k, p)| json!({"k": num(k), "re_p": num(p.re), "im_p": num(p.im), "abs_p": num(p.norm())}))
                .collect();
            emit_json(opts, &json!({ "samples": rows }))
        }
    }
}

fn eigenfunction(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let pair = select_level(&g, opts)?;
    let member = pick("member", Some(opts.member.unwrap_or(1)), pair.multiplicity)?;
    let per_edge = opts.samples.unwrap_or(101);
    if per_edge < 2 {
        return Err(Failure::usage("--samples must be at least 2 per edge"));
    }
    let f = spectral::eigenfunction(&g, &pair, member)?;
    match opts.format() {
        Format::Csv => {
            let mut text = format!(
                "# k={}\n# lambda={}\n# multiplicity={}\n# member={}\n",
                format_real(pair.k),
                format_real(pair.lambda),
                pair.multiplicity,
                member + 1
            );
            text.push_str(&spectral::eigenfunction_csv(&f, per_edge));
            emit(opts, &text)
        }
        Format::Structured => {
            let samples: Vec<Value> = f
                .samples(per_edge)
                .into_iter()
                .map(|(n, t, v)| json!({"edge": n + 1, "t": num(t), "psi": num(v)}))
                .collect();
            let vertex_values: Vec<Value> = f.vertex_values()?.into_iter().map(num).collect();
            emit_json(
                opts,
                &json!({
                    "k": num(pair.k),
                    "lambda": num(pair.lambda),
                    "multiplicity": pair.multiplicity,
                    "member": member + 1,
                    "sup_norm": num(f.sup_norm()),
                    "vertex_values": vertex_values,
                    "samples": samples,
                }),
            )
        }
    }
}

fn nodal(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let pair = select_level(&g, opts)?;
    let d = analysis::nodal_domains_with(&g, &pair, threshold(opts))?;
    // segments of edge n run between consecutive interior zeros
    let mut segments = Vec::new();
    for n in 0..g.num_edges() {
        let mut cuts = vec![0.0];
        cuts.extend(d.interior_zeros[n].iter().copied());
        cuts.push(g.length(n));
        for (s, w) in cuts.windows(2).enumerate() {
            let sign = d.segment_signs[n].get(s).copied().unwrap_or(0);
            let domain = d.domain_assignment[n].get(s).map(|x| x + 1);
            segments.push((n + 1, w[0], w[1], sign, domain));
        }
    }
    let vertex_zeros: Vec<usize> = d.vertex_zeros.iter().map(|v| v + 1).collect();
    match opts.format() {
        Format::Csv => {
            let zeros: Vec<String> = vertex_zeros.iter().map(|v| v.to_string()).collect();
            let mut text = format!(
                "# k={}\n# domain_count={}\n# generic={}\n# vertex_zeros={}\nedge,start,end,sign,domain\n",
                format_real(pair.k),
                d.domain_count,
                d.generic,
                zeros.join(" ")
            );
            for (n, a, b, sign, domain) in segments {
                let domain = domain.map(|x| x.to_string()).unwrap_or_default();
                text.push_str(&format!("{n},{},{},{sign},{domain}\n", format_real(a), format_real(b)));
            }
            emit(opts, &text)
        }
        Format::Structured => {
            let rows: Vec<Value> = segments
                .into_iter()
                .map(|(n, a, b, sign, domain)| {
                    json!({"edge": n, "start": num(a), "end": num(b), "sign": sign, "domain": domain})
                })
                .collect();
            emit_json(
                opts,
                &json!({
                    "k": num(pair.k),
                    "domain_count": d.domain_count,
                    "generic": d.generic,
                    "vertex_zeros": vertex_zeros,
                    "segments": rows,
                }),
            )
        }
    }
}

fn hadamard(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let pair = select_level(&g, opts)?;
    let edges: Vec<usize> = match opts.edge {
        Some(_) => vec![pick("edge", opts.edge, g.num_edges())?],
        None => (0..g.num_edges()).collect(),
    };
    let h = opts.h.unwrap_or(1e-5);
    let mut rows = Vec::with_capacity(edges.len());
    for e in edges {
        let exact = analysis::hadamard_derivative(&g, &pair, e)?;
        let fd = if pair.is_zero_mode() {
            0.0
        } else {
            analysis::hadamard_finite_difference(&g, &pair, e, h)?
        };
        rows.push((e + 1, exact, fd));
    }
    match opts.format() {
        Format::Csv => {
            let mut text = format!(
                "# k={}\n# lambda={}\n# h={}\nedge,derivative,finite_difference\n",
                format_real(pair.k),
                format_real(pair.lambda),
                format_real(h)
            );
            for (e, exact, fd) in rows {
                text.push_str(&format!("{e},{},{}\n", format_real(exact), format_real(fd)));
            }
            emit(opts, &text)
        }
        Format::Structured => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(e, exact, fd)| json!({"edge": e, "derivative": num(exact), "finite_difference": num(fd)}))
                .collect();
            emit_json(
                opts,
                &json!({"k": num(pair.k), "lambda": num(pair.lambda), "h": num(h), "rows": rows}),
            )
        }
    }
}

fn mfunction(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let vertex = pick("vertex", opts.vertex, g.num_vertices())?;
    if g.vertices()[vertex].is_dirichlet() {
        return Err(Failure::usage(format!("vertex {} is a Dirichlet vertex", vertex + 1)));
    }
    let n_max = Options::positive("n-max", opts.n_max, 40)?;
    let lambdas = match opts.lambda {
        Some(l) => vec![l],
        None => {
            let k_max = opts.k_max()?;
            let k_min = opts.k_min.unwrap_or(0.0).max(0.0);
            if k_min >= k_max {
                return Err(Failure::usage("--k-min must be below --k-max"));
            }
            let samples = Options::positive("samples", opts.samples, 200)?;
            grid(k_min * k_min, k_max * k_max, samples)
        }
    };
    let slice = analysis::spectrum_for_levels(&g, n_max)?;
    let m = TruncatedMFunction::new(&g, &slice, vertex, n_max)?;
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut skipped = 0;
    for l in lambdas {
        match m.eval(l) {
            Ok(s) => rows.push((l, s.value, s.spectral_sum)),
            Err(qgraph::Error::PoleProximity { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    match opts.format() {
        Format::Csv => {
            let mut text = format!(
                "# vertex={}\n# n_max={n_max}\n# skipped_near_poles={skipped}\n",
                vertex + 1
            );
            for (ln, w) in &m.levels {
                text.push_str(&format!("# level lambda={} weight={}\n", format_real(*ln), format_real(*w)));
            }
            text.push_str("lambda,m_value,spectral_sum\n");
            for (l, v, s) in rows {
                text.push_str(&format!("{},{},{}\n", format_real(l), format_real(v), format_real(s)));
            }
            emit(opts, &text)
        }
        Format::Structured => {
            let levels: Vec<Value> = m
                .levels
                .iter()
                .map(|(ln, w)| json!({"lambda": num(*ln), "weight": num(*w)}))
                .collect();
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(l, v, s)| json!({"lambda": num(l), "m_value": num(v), "spectral_sum": num(s)}))
                .collect();
            emit_json(
                opts,
                &json!({
                    "vertex": vertex + 1,
                    "n_max": n_max,
                    "skipped_near_poles": skipped,
                    "levels": levels,
                    "samples": rows,
                }),
            )
        }
    }
}

fn oracle(opts: &Options) -> Outcome {
    let g = load_graph(opts)?;
    let count = Options::positive("count", opts.count, 10)?;
    let h = opts.h.unwrap_or(1e-3);
    let fd = qgraph::oracle::fd_spectrum(&g, h, count)?;
    let exact: Vec<f64> = spectral::first_levels(&g, count, LEVEL_SEARCH_LIMIT)?
        .eigenvalues()
        .into_iter()
        .take(count)
        .collect();
    let rows: Vec<(usize, f64, Option<f64>, Option<f64>)> = fd
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let e = exact.get(i).copied();
            let err = e.map(|e| if e == 0.0 { (x - e).abs() } else { (x - e).abs() / e });
            (i + 1, x, e, err)
        })
        .collect();
    match opts.format() {
        Format::Csv => {
            let mut text = format!(
                "# h={}\n# error is relative, absolute for lambda = 0\nindex,lambda_fd,lambda_secular,error\n",
                format_real(h)
            );
            let opt = |v: Option<f64>| v.map(format_real).unwrap_or_default();
            for (i, x, e, err) in rows {
                text.push_str(&format!("{i},{},{},{}\n", format_real(x), opt(e), opt(err)));
            }
            emit(opts, &text)
        }
        Format::Structured => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(i, x, e, err)| {
                    json!({"index": i, "lambda_fd": num(x), "lambda_secular": e.map(num), "error": err.map(num)})
                })
                .collect();
            emit_json(opts, &json!({"h": num(h), "rows": rows}))
        }
    }
}
