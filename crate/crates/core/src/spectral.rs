//! Positive zeros of the secular function with multiplicities, the zero
//! eigenvalue, and eigenfunctions reconstructed from amplitude vectors.
//!
//! On edge `n` with endpoints `2n` (at `t = 0`) and `2n + 1` (at `t = l`) an
//! eigenfunction with null vector `a` of `S_e(k) - S_v` reads
//! `psi(t) = a_{2n} e^{ikt} + a_{2n+1} e^{ik(l - t)}`, and with `b = S_v a`
//! equivalently `b_{2n} e^{-ikt} + b_{2n+1} e^{-ik(l - t)}`. The value at
//! endpoint `j` is `a_j + b_j`.

use crate::error::{Error, Result};
use crate::graph::{Condition, MetricGraph};
use crate::secular::SecularFunction;
use crate::{format_real, Complex};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::PI;

pub type Amplitudes = DVector<Complex>;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Relative singular-value cutoff for null spaces.
    pub rank_tol: f64,
    /// Convergence tolerance in `k` for simple zeros.
    pub newton_tol: f64,
    /// Accepted `|(S_e - S_v) a|` for a unit amplitude vector.
    pub residual_tol: f64,
    /// Zeros closer than this are examined as a possible cluster.
    pub cluster_width: f64,
    /// Box dilations tried when `p` nearly vanishes on a contour.
    pub max_dilations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rank_tol: 1e-8,
            newton_tol: 1e-12,
            residual_tol: 1e-8,
            cluster_width: 1e-6,
            max_dilations: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub k: f64,
    pub lambda: f64,
    pub multiplicity: usize,
    pub amplitudes_a: Vec<Amplitudes>,
    pub amplitudes_b: Vec<Amplitudes>,
    /// Basis is real and orthonormal in `L^2` of the graph.
    pub normalized: bool,
    /// Several zeros that could not be separated at the working resolution.
    pub cluster: bool,
}

impl Eigenpair {
    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }

    pub fn is_zero_mode(&self) -> bool {
        self.k == 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSlice {
    pub k_max: f64,
    pub zeros: Vec<Eigenpair>,
    pub lambda0_multiplicity: usize,
}

impl SpectrumSlice {
    /// Number of positive eigenvalues counted with multiplicity.
    pub fn count(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.k).collect()
    }

    /// All eigenvalues repeated by multiplicity, zero included.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.lambda0_multiplicity];
        for z in &self.zeros {
            out.extend(std::iter::repeat_n(z.lambda, z.multiplicity));
        }
        out
    }

    /// The eigenvalue levels in increasing order, the zero mode first when
    /// present.
    pub fn levels(&self, g: &MetricGraph) -> Vec<Eigenpair> {
        let mut out: Vec<Eigenpair> = zero_mode_pair(g).into_iter().collect();
        out.extend(self.zeros.iter().cloned());
        out
    }
}

// ---------------------------------------------------------------------------
// Argument principle

#[derive(Debug)]
struct Vanishing;

fn segment_arg(
    f: &SecularFunction,
    za: Complex,
    zb: Complex,
    pa: Complex,
    pb: Complex,
    depth: usize,
) -> std::result::Result<f64, Vanishing> {
    let zm = (za + zb) * 0.5;
    let pm = f.eval(zm);
    if !(pm.norm() > 0.0) || !pm.norm().is_finite() {
        return Err(Vanishing);
    }
    let d1 = (pm / pa).arg();
    let d2 = (pb / pm).arg();
    if d1.abs() < PI / 4.0 && d2.abs() < PI / 4.0 {
        return Ok(d1 + d2);
    }
    if depth >= 64 || (zb - za).norm() < 1e-12 * (1.0 + za.norm()) {
        return Err(Vanishing);
    }
    Ok(segment_arg(f, za, zm, pa, pm, depth + 1)? + segment_arg(f, zm, zb, pm, pb, depth + 1)?)
}

fn winding_number(f: &SecularFunction, lo: f64, hi: f64, h: f64) -> std::result::Result<usize, Vanishing> {
    let corners = [
        Complex::new(lo, -h),
        Complex::new(hi, -h),
        Complex::new(hi, h),
        Complex::new(lo, h),
    ];
    let pieces = [8usize, 4, 8, 4];
    let mut total = 0.0;
    for side in 0..4 {
        let za = corners[side];
        let zb = corners[(side + 1) % 4];
        let n = pieces[side];
        let mut z_prev = za;
        let mut p_prev = f.eval(za);
        if !(p_prev.norm() > 0.0) {
            return Err(Vanishing);
        }
        for j in 1..=n {
            let z = za + (zb - za) * (j as f64 / n as f64);
            let p = f.eval(z);
            if !(p.norm() > 0.0) {
                return Err(Vanishing);
            }
            total += segment_arg(f, z_prev, z, p_prev, p, 0)?;
            z_prev = z;
            p_prev = p;
        }
    }
    let w = total / TWO_PI;
    let n = w.round();
    if (w - n).abs() > 0.1 || n < 0.0 {
        return Err(Vanishing);
    }
    Ok(n as usize)
}

fn count_with_dilation(f: &SecularFunction, lo: f64, hi: f64, h: f64, retries: usize) -> Result<usize> {
    let w = hi - lo;
    for attempt in 0..=retries {
        let grow = 0.01 * attempt as f64 * w;
        let lo2 = (lo - grow).max(0.5 * lo);
        let hi2 = hi + grow;
        let h2 = h * (1.0 + 0.1 * attempt as f64);
        if let Ok(n) = winding_number(f, lo2, hi2, h2) {
            return Ok(n);
        }
    }
    Err(Error::Localization(format!(
        "secular function vanishes on the boundary of [{lo}, {hi}] x [-{h}, {h}]"
    )))
}

/// Number of zeros of `p`, with multiplicity, inside the rectangle
/// `[k_lo, k_hi] x [-height, height]`.
pub fn count_zeros_in_box(g: &MetricGraph, k_lo: f64, k_hi: f64, height: f64) -> Result<usize> {
    count_zeros_in_box_with(g, k_lo, k_hi, height, &SolverConfig::default())
}

pub fn count_zeros_in_box_with(
    g: &MetricGraph,
    k_lo: f64,
    k_hi: f64,
    height: f64,
    cfg: &SolverConfig,
) -> Result<usize> {
    if !(k_lo > 0.0 && k_hi > k_lo && height > 0.0 && k_hi.is_finite() && height.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "box needs 0 < k_lo < k_hi and height > 0, got [{k_lo}, {k_hi}] x {height}"
        )));
    }
    let f = SecularFunction::new(g)?;
    count_with_dilation(&f, k_lo, k_hi, height, cfg.max_dilations)
}

// ---------------------------------------------------------------------------
// Zero refinement

/// Safeguarded Newton iteration for a simple zero bracketed by `[a, b]`.
fn refine_simple(f: &SecularFunction, a: f64, b: f64, cfg: &SolverConfig) -> f64 {
    let qa = f.real_form(a);
    let qb = f.real_form(b);
    if qa == 0.0 {
        return a;
    }
    if qb == 0.0 {
        return b;
    }
    if qa.signum() == qb.signum() {
        // No sign change: fall back on eigenphase crossing.
        return crossings(f, a, b, 1).and_then(|c| c.first().copied()).unwrap_or(0.5 * (a + b));
    }
    let (mut lo, mut hi, mut qlo) = (a, b, qa);
    let mut k = 0.5 * (a + b);
    let stop = (cfg.newton_tol * 1e-3).max(1e-16 * b);
    for _ in 0..200 {
        let q = f.real_form(k);
        if q == 0.0 {
            return k;
        }
        if q.signum() == qlo.signum() {
            lo = k;
            qlo = q;
        } else {
            hi = k;
        }
        let step = (f.eval(Complex::new(k, 0.0)) / f.derivative(k)).re;
        let mut next = k - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let dk = (next - k).abs();
        k = next;
        if dk < stop || hi - lo < stop {
            break;
        }
    }
    k
}

/// Eigenphases of the unitary `S_e(k) S_v`, mapped to `[0, 2 pi)`.
fn eigenphases(f: &SecularFunction, k: f64) -> Vec<f64> {
    let (_, t) = nalgebra::linalg::Schur::new(f.unitary(k)).unpack();
    (0..t.nrows())
        .map(|i| {
            let th = t[(i, i)].arg();
            if th < 0.0 {
                th + TWO_PI
            } else {
                th
            }
        })
        .collect()
}

fn phases_below(f: &SecularFunction, k: f64, alpha: f64) -> usize {
    eigenphases(f, k).into_iter().filter(|&t| t < alpha).count()
}

/// A cut `alpha` on the unit circle that no eigenphase crosses while `k`
/// runs over an interval in which each phase advances by at most `sweep`.
fn choose_cut(phases: &[f64], sweep: f64) -> Option<f64> {
    let margin = 1e-6;
    let mut best: Option<(f64, f64)> = None;
    for i in 0..1024 {
        let alpha = TWO_PI * (i as f64 + 0.5) / 1024.0;
        let mut clearance = f64::INFINITY;
        for &th in phases {
            // forward distance from the phase to alpha
            let d = (alpha - th).rem_euclid(TWO_PI);
            let c = if d <= sweep { -1.0 } else { (d - sweep).min(TWO_PI - d) };
            clearance = clearance.min(c);
        }
        if clearance > margin && best.is_none_or(|(_, c)| clearance > c) {
            best = Some((alpha, clearance));
        }
    }
    best.map(|(a, _)| a)
}

/// Locations of the `m` eigenphase crossings through `1` in `[a, b]`.
fn crossings(f: &SecularFunction, a: f64, b: f64, m: usize) -> Option<Vec<f64>> {
    let sweep = f.max_length() * (b - a) * (1.0 + 1e-9);
    let alpha = choose_cut(&eigenphases(f, a), sweep)?;
    let base = phases_below(f, a, alpha);
    let top = phases_below(f, b, alpha);
    if top < base || top - base != m {
        return None;
    }
    let mut out = Vec::with_capacity(m);
    for i in 1..=m {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..200 {
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if phases_below(f, mid, alpha) - base >= i {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Some(out)
}

/// Positions of all `m` zeros inside the cell `[a, b]`, with repetition.
fn locate_zeros(f: &SecularFunction, a: f64, b: f64, m: usize, cfg: &SolverConfig, depth: usize) -> Result<Vec<f64>> {
    match m {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![refine_simple(f, a, b, cfg)]),
        _ => {}
    }
    if let Some(c) = crossings(f, a, b, m) {
        return Ok(c);
    }
    if depth > 48 {
        return Err(Error::Localization(format!("could not separate {m} zeros near k = {a}")));
    }
    // Too many eigenphases for a clean cut: halve the interval.
    let w = b - a;
    let mut split = None;
    for off in [0.0, 0.0731, -0.0917, 0.1373, -0.1531] {
        let mid = a + w * (0.5 + off);
        if let (Ok(m1), Ok(m2)) = (
            winding_number(f, a, mid, 0.5 * (mid - a)),
            winding_number(f, mid, b, 0.5 * (b - mid)),
        ) {
            split = Some((mid, m1, m2));
            break;
        }
    }
    let (mid, m1, m2) = split.ok_or_else(|| Error::Localization(format!("cannot split [{a}, {b}]")))?;
    if m1 + m2 != m {
        return Err(Error::Inconsistency(format!(
            "winding counts {m1} + {m2} do not add up to {m} on [{a}, {b}]"
        )));
    }
    let mut out = locate_zeros(f, a, mid, m1, cfg, depth + 1)?;
    out.extend(locate_zeros(f, mid, b, m2, cfg, depth + 1)?);
    Ok(out)
}

struct Located {
    k: f64,
    multiplicity: usize,
    cluster: bool,
}

/// Merge zero positions into eigenvalues with multiplicities.
fn group_zeros(f: &SecularFunction, mut ks: Vec<f64>, cfg: &SolverConfig) -> Vec<Located> {
    ks.sort_by(f64::total_cmp);
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for k in ks {
        match groups.last_mut() {
            Some(g) if k - g[g.len() - 1] < cfg.cluster_width => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let mut out = Vec::new();
    for (gi, grp) in groups.iter().enumerate() {
        let first = grp[0];
        let last = grp[grp.len() - 1];
        let mean = grp.iter().sum::<f64>() / grp.len() as f64;
        let tol = 1e-9 * mean.max(1.0);
        if last - first <= tol {
            out.push(Located {
                k: mean,
                multiplicity: grp.len(),
                cluster: false,
            });
            continue;
        }
        // distinct positions inside the group
        let mut subs: Vec<Vec<f64>> = Vec::new();
        for &k in grp {
            match subs.last_mut() {
                Some(s) if k - s[s.len() - 1] <= tol => s.push(k),
                _ => subs.push(vec![k]),
            }
        }
        let neighbour_gap = |i: usize| -> f64 {
            let mut gap = f64::INFINITY;
            if i > 0 {
                gap = gap.min(groups[i][0] - groups[i - 1][groups[i - 1].len() - 1]);
            }
            if i + 1 < groups.len() {
                gap = gap.min(groups[i + 1][0] - groups[i][groups[i].len() - 1]);
            }
            gap
        };
        let outer = (0.5 * neighbour_gap(gi)).min(cfg.cluster_width);
        let enclosing = winding_number(f, first - outer, last + outer, outer.max(last - first));
        let centers: Vec<f64> = subs.iter().map(|s| s.iter().sum::<f64>() / s.len() as f64).collect();
        let mut sub_counts = Vec::new();
        for (i, &c) in centers.iter().enumerate() {
            let mut r = outer;
            if i > 0 {
                r = r.min(0.5 * (c - centers[i - 1]));
            }
            if i + 1 < centers.len() {
                r = r.min(0.5 * (centers[i + 1] - c));
            }
            sub_counts.push(winding_number(f, c - r, c + r, r).ok());
        }
        let separable = match enclosing {
            Ok(total) => {
                total == grp.len()
                    && sub_counts
                        .iter()
                        .zip(&subs)
                        .all(|(c, s)| *c == Some(s.len()))
            }
            Err(_) => false,
        };
        if separable {
            for (c, s) in centers.iter().zip(&subs) {
                out.push(Located {
                    k: *c,
                    multiplicity: s.len(),
                    cluster: false,
                });
            }
        } else {
            out.push(Located {
                k: mean,
                multiplicity: grp.len(),
                cluster: true,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Null spaces

/// Right singular vectors of `S_e(k) - S_v` with singular value below
/// `rank_tol` times the largest one. The reference scale is at least 1,
/// since the matrix can vanish identically (the circle at its eigenvalues).
pub fn null_space_at(g: &MetricGraph, k: f64, rank_tol: f64) -> Result<Vec<Amplitudes>> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("null space needs k > 0, got {k}")));
    }
    let f = SecularFunction::new(g)?;
    let (values, vectors) = singular_pairs(&f, k);
    let smax = values.first().copied().unwrap_or(0.0).max(1.0);
    Ok(values
        .iter()
        .zip(vectors)
        .filter(|(s, _)| **s < rank_tol * smax)
        .map(|(_, v)| v)
        .collect())
}

/// Singular values in decreasing order with their right singular vectors.
fn singular_pairs(f: &SecularFunction, k: f64) -> (Vec<f64>, Vec<Amplitudes>) {
    let svd = f.matrix(Complex::new(k, 0.0)).svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = idx.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = idx
        .iter()
        .map(|&i| vt.row(i).transpose().map(|z| z.conj()))
        .collect();
    (values, vectors)
}

fn smallest_singular_vectors(f: &SecularFunction, k: f64, m: usize) -> Vec<Amplitudes> {
    let (_, mut vectors) = singular_pairs(f, k);
    let n = vectors.len();
    let mut tail = vectors.split_off(n - m.min(n));
    tail.reverse();
    tail
}

// ---------------------------------------------------------------------------
// Edge integrals and realification

/// Complex coefficients `(A, B)` with `psi(t) = A cos kt + B sin kt` per edge.
fn edge_coefficients(a: &Amplitudes, k: f64, lengths: &[f64]) -> Vec<(Complex, Complex)> {
    lengths
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            let w = a[2 * n + 1] * Complex::from_polar(1.0, k * l);
            let a1 = a[2 * n];
            (a1 + w, Complex::i() * (a1 - w))
        })
        .collect()
}

/// `[int cos^2, int sin^2, int cos sin, int cos, int sin]` over `[0, l]`.
fn edge_moments(k: f64, l: f64) -> [f64; 5] {
    if k == 0.0 {
        return [l, 0.0, 0.0, l, 0.0];
    }
    let x = 2.0 * k * l;
    let s2 = x.sin() / (4.0 * k);
    // l/2 - sin(2kl)/(4k) without cancellation for small kl
    let ss = if x < 0.1 {
        let x2 = x * x;
        x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0))) / (4.0 * k)
    } else {
        0.5 * l - s2
    };
    let sk = (k * l).sin();
    let sh = (0.5 * k * l).sin();
    [0.5 * l + s2, ss, sk * sk / (2.0 * k), sk / k, 2.0 * sh * sh / k]
}

/// `sum_n int psi_x psi_y` without conjugation.
fn bilinear(x: &[(Complex, Complex)], y: &[(Complex, Complex)], k: f64, lengths: &[f64]) -> Complex {
    let mut acc = Complex::new(0.0, 0.0);
    for n in 0..lengths.len() {
        let [cc, ss, cs, _, _] = edge_moments(k, lengths[n]);
        let (xa, xb) = x[n];
        let (ya, yb) = y[n];
        acc += xa * ya * cc + (xa * yb + xb * ya) * cs + xb * yb * ss;
    }
    acc
}

fn integral(x: &[(Complex, Complex)], k: f64, lengths: &[f64]) -> Complex {
    x.iter()
        .zip(lengths)
        .map(|(&(a, b), &l)| {
            let m = edge_moments(k, l);
            a * m[3] + b * m[4]
        })
        .sum()
}

/// `max |A cos kt + B sin kt|` over `t` in `[0, l]`.
fn edge_sup(a: f64, b: f64, k: f64, l: f64) -> f64 {
    let r = a.hypot(b);
    if k == 0.0 || r == 0.0 {
        return a.abs();
    }
    let end = (a * (k * l).cos() + b * (k * l).sin()).abs();
    let mut best = a.abs().max(end);
    // extrema at k t = phi + j pi
    let phi = b.atan2(a);
    let j0 = (-phi / PI).ceil();
    if (phi + j0 * PI) / k <= l {
        best = best.max(r);
    }
    best
}

fn sup_parts(coeffs: &[(Complex, Complex)], k: f64, lengths: &[f64]) -> (f64, f64) {
    let mut re: f64 = 0.0;
    let mut im: f64 = 0.0;
    for (&(a, b), &l) in coeffs.iter().zip(lengths) {
        re = re.max(edge_sup(a.re, b.re, k, l));
        im = im.max(edge_sup(a.im, b.im, k, l));
    }
    (re, im)
}

/// Sign that makes the function positive in a reproducible sense: positive
/// mean, else positive first significant endpoint value.
fn canonical_sign(coeffs: &[(Complex, Complex)], k: f64, lengths: &[f64]) -> f64 {
    let total: f64 = lengths.iter().sum();
    let (sup, _) = sup_parts(coeffs, k, lengths);
    let mean = integral(coeffs, k, lengths).re;
    if mean.abs() > 1e-8 * sup * total {
        return mean.signum();
    }
    for (&(a, b), &l) in coeffs.iter().zip(lengths) {
        for v in [a.re, a.re * (k * l).cos() + b.re * (k * l).sin()] {
            if v.abs() > 1e-8 * sup {
                return v.signum();
            }
        }
    }
    for &(a, b) in coeffs {
        for v in [a.re, b.re] {
            if v.abs() > 1e-8 * sup {
                return v.signum();
            }
        }
    }
    1.0
}

/// Rotate by a global phase to make the function real, normalize to unit
/// `L^2` norm and fix the sign. Returns the amplitude vector and the ratio
/// of the remaining imaginary sup-norm to the real one.
fn realify(a: &Amplitudes, k: f64, lengths: &[f64]) -> (Amplitudes, f64) {
    let coeffs = edge_coefficients(a, k, lengths);
    let i2 = bilinear(&coeffs, &coeffs, k, lengths);
    let rot = Complex::from_polar(1.0, -0.5 * i2.arg());
    let rotated: Amplitudes = a * rot;
    let coeffs = edge_coefficients(&rotated, k, lengths);
    let (re_sup, im_sup) = sup_parts(&coeffs, k, lengths);
    let residual = if re_sup > 0.0 { im_sup / re_sup } else { f64::INFINITY };
    let real: Vec<(Complex, Complex)> = coeffs
        .iter()
        .map(|&(x, y)| (Complex::new(x.re, 0.0), Complex::new(y.re, 0.0)))
        .collect();
    let norm = bilinear(&real, &real, k, lengths).re.sqrt();
    let sign = canonical_sign(&real, k, lengths);
    let scale = if norm > 0.0 { sign / norm } else { 1.0 };
    (rotated * Complex::new(scale, 0.0), residual)
}

/// A real, `L^2`-orthonormal basis spanning the same eigenspace as the
/// complex null basis.
fn real_orthonormal_basis(
    f: &SecularFunction,
    k: f64,
    basis: &[Amplitudes],
) -> Result<Vec<Amplitudes>> {
    let lengths = f.lengths();
    if basis.len() == 1 {
        let (a, residual) = realify(&basis[0], k, lengths);
        if residual > 1e-6 {
            return Err(Error::DegeneratePair { residual });
        }
        return Ok(vec![a]);
    }
    // v and S_v conj(v) both lie in the null space and describe conjugate
    // functions, so their half sum and half difference are real functions.
    let sv = f.vertex_matrix();
    let mut cands: Vec<Amplitudes> = Vec::with_capacity(2 * basis.len());
    for v in basis {
        let jv = sv * v.map(|z| z.conj());
        cands.push((v + &jv) * Complex::new(0.5, 0.0));
        cands.push((v - &jv) * Complex::new(0.0, -0.5));
    }
    let coeffs: Vec<Vec<(Complex, Complex)>> = cands
        .iter()
        .map(|c| {
            edge_coefficients(c, k, lengths)
                .into_iter()
                .map(|(x, y)| (Complex::new(x.re, 0.0), Complex::new(y.re, 0.0)))
                .collect()
        })
        .collect();
    let n = cands.len();
    let gram = DMatrix::from_fn(n, n, |i, j| bilinear(&coeffs[i], &coeffs[j], k, lengths).re);
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let m = basis.len();
    let top = eig.eigenvalues[order[0]];
    if !(eig.eigenvalues[order[m - 1]] > 1e-10 * top) {
        return Err(Error::Inconsistency(format!(
            "real span of the eigenspace at k = {k} has dimension below {m}"
        )));
    }
    let mut out = Vec::with_capacity(m);
    for &col in order.iter().take(m) {
        let mu = eig.eigenvalues[col];
        let mut w = Amplitudes::zeros(cands[0].len());
        for (j, c) in cands.iter().enumerate() {
            w += c * Complex::new(eig.eigenvectors[(j, col)] / mu.sqrt(), 0.0);
        }
        let (w, _) = realify(&w, k, lengths);
        out.push(w);
    }
    Ok(out)
}

fn build_pair(f: &SecularFunction, loc: &Located, cfg: &SolverConfig) -> Result<Eigenpair> {
    let k = loc.k;
    let basis = smallest_singular_vectors(f, k, loc.multiplicity);
    if !loc.cluster {
        let mat = f.matrix(Complex::new(k, 0.0));
        for a in &basis {
            let r = (&mat * a).norm();
            if r > cfg.residual_tol {
                return Err(Error::Inconsistency(format!(
                    "null-space residual {r:.3e} at k = {k} exceeds {:.1e}",
                    cfg.residual_tol
                )));
            }
        }
    }
    let (amplitudes_a, normalized) = match real_orthonormal_basis(f, k, &basis) {
        Ok(b) => (b, true),
        Err(_) => (basis, false),
    };
    let amplitudes_b = amplitudes_a.iter().map(|a| f.vertex_matrix() * a).collect();
    Ok(Eigenpair {
        k,
        lambda: k * k,
        multiplicity: loc.multiplicity,
        amplitudes_a,
        amplitudes_b,
        normalized,
        cluster: loc.cluster,
    })
}

// ---------------------------------------------------------------------------
// Spectrum scan

/// Grid step of the scan: a quarter of the mean zero spacing.
pub fn scan_step(g: &MetricGraph) -> f64 {
    PI / (4.0 * g.total_length())
}

/// Move a cell boundary off near-zeros of `p`; `dir` restricts the move to
/// one side (`1.0` up, `-1.0` down, `0.0` either).
fn nudge(f: &SecularFunction, b: f64, step: f64, threshold: f64, dir: f64) -> f64 {
    let both = [0.0, 0.137, -0.163, 0.241, -0.277, 0.311, -0.353];
    let one_sided = [0.0, 0.137, 0.241, 0.311, 0.4];
    let offsets: Vec<f64> = if dir == 0.0 {
        both.to_vec()
    } else {
        one_sided.iter().map(|o| o * dir).collect()
    };
    let mut best = (b, -1.0);
    for o in offsets {
        let c = b + o * step;
        if c <= 0.0 {
            continue;
        }
        let v = f.eval(Complex::new(c, 0.0)).norm();
        if v >= threshold {
            return c;
        }
        if v > best.1 {
            best = (c, v);
        }
    }
    best.0
}

/// Zeros in `(lo, hi]`, scanned in cells of width at most `step` whose
/// outer boundaries only move outwards.
fn scan(f: &SecularFunction, lo: f64, hi: f64, step: f64, cfg: &SolverConfig) -> Result<Vec<Eigenpair>> {
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut raw: Vec<f64> = (0..cells).map(|j| lo + j as f64 * step).collect();
    if raw.len() >= 2 && hi - raw[raw.len() - 1] < 0.25 * step {
        raw.pop();
    }
    raw.push(hi);
    let values: Vec<f64> = raw
        .par_iter()
        .map(|&b| f.eval(Complex::new(b, 0.0)).norm())
        .collect();
    let scale = values.iter().copied().fold(0.0, f64::max);
    let threshold = 1e-4 * scale;
    let last = raw.len() - 1;
    let bounds: Vec<f64> = raw
        .par_iter()
        .enumerate()
        .map(|(j, &b)| {
            if values[j] >= threshold {
                return b;
            }
            let dir = if j == 0 {
                -1.0
            } else if j == last {
                1.0
            } else {
                0.0
            };
            nudge(f, b, step.min(hi - lo), threshold, dir)
        })
        .collect();

    let per_cell: Vec<Result<Vec<Eigenpair>>> = (0..last)
        .into_par_iter()
        .map(|j| {
            let (a, b) = (bounds[j], bounds[j + 1]);
            let m = winding_number(f, a, b, 0.5 * (b - a)).map_err(|_| {
                Error::Localization(format!("secular function vanishes on the contour around [{a}, {b}]"))
            })?;
            let ks = locate_zeros(f, a, b, m, cfg, 0)?;
            group_zeros(f, ks, cfg).iter().map(|loc| build_pair(f, loc, cfg)).collect()
        })
        .collect();
    let mut zeros = Vec::new();
    for cell in per_cell {
        zeros.extend(cell?);
    }
    let slack = 1e-12 * (1.0 + hi);
    zeros.retain(|z| z.k > lo + slack && z.k <= hi + slack);
    Ok(zeros)
}

pub fn find_spectrum(g: &MetricGraph, k_max: f64) -> Result<SpectrumSlice> {
    find_spectrum_with(g, k_max, &SolverConfig::default())
}

/// All eigenvalues `k^2` with `0 < k <= k_max`, plus the multiplicity of
/// `lambda = 0`.
pub fn find_spectrum_with(g: &MetricGraph, k_max: f64, cfg: &SolverConfig) -> Result<SpectrumSlice> {
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(Error::InvalidInput(format!("k_max must be positive, got {k_max}")));
    }
    let f = SecularFunction::new(g)?;
    let lambda0_multiplicity = g.dirichlet_free_components().len();
    let step = scan_step(g);
    // No positive eigenvalue lies below pi / (2 L) = 2 * step.
    let k_min = step;
    let zeros = if k_max <= k_min {
        Vec::new()
    } else {
        scan(&f, k_min, k_max, step, cfg)?
    };
    Ok(SpectrumSlice {
        k_max,
        zeros,
        lambda0_multiplicity,
    })
}

/// Eigenpairs with `lo < k <= hi`.
pub fn zeros_in_window(g: &MetricGraph, lo: f64, hi: f64) -> Result<Vec<Eigenpair>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!("window needs 0 < lo < hi, got ({lo}, {hi}]")));
    }
    let f = SecularFunction::new(g)?;
    scan(&f, lo, hi, scan_step(g), &SolverConfig::default())
}

/// The first `count` eigenvalue levels with `k > 0`, extending the scan as
/// needed up to `k_limit`.
pub fn first_levels(g: &MetricGraph, count: usize, k_limit: f64) -> Result<SpectrumSlice> {
    let total = g.total_length();
    // Weyl estimate with headroom
    let mut k = ((count as f64 + g.num_edges() as f64 + 2.0) * PI / total).min(k_limit);
    loop {
        let s = find_spectrum(g, k)?;
        if s.zeros.len() >= count || k >= k_limit {
            return Ok(s);
        }
        k = (2.0 * k).min(k_limit);
    }
}

/// Weyl estimate `L K / pi` of the number of eigenvalues with `k <= K`.
pub fn weyl_estimate(g: &MetricGraph, k: f64) -> f64 {
    g.total_length() * k / PI
}

/// The zero-energy eigenspace: one normalized constant per component that
/// has no Dirichlet vertex.
pub fn zero_mode_pair(g: &MetricGraph) -> Option<Eigenpair> {
    let comps = g.dirichlet_free_components();
    if comps.is_empty() {
        return None;
    }
    let labels = g.edge_components();
    let sv = crate::scattering::vertex_scattering(g).ok()?;
    let mut amplitudes_a = Vec::new();
    for &c in &comps {
        let len: f64 = (0..g.num_edges()).filter(|&n| labels[n] == c).map(|n| g.length(n)).sum();
        let half = 0.5 / len.sqrt();
        let mut a = Amplitudes::zeros(g.num_endpoints());
        for n in (0..g.num_edges()).filter(|&n| labels[n] == c) {
            a[2 * n] = Complex::new(half, 0.0);
            a[2 * n + 1] = Complex::new(half, 0.0);
        }
        amplitudes_a.push(a);
    }
    let amplitudes_b = amplitudes_a.iter().map(|a| &sv * a).collect();
    Some(Eigenpair {
        k: 0.0,
        lambda: 0.0,
        multiplicity: comps.len(),
        amplitudes_a,
        amplitudes_b,
        normalized: true,
        cluster: false,
    })
}

// ---------------------------------------------------------------------------
// Eigenfunctions

#[derive(Debug, Clone)]
pub struct Eigenfunction {
    k: f64,
    graph: MetricGraph,
    a: Amplitudes,
    b: Amplitudes,
    coeffs: Vec<(Complex, Complex)>,
    sup: f64,
    residual: f64,
}

impl Eigenfunction {
    /// The function carried by amplitude vector `a` at wavenumber `k`, taken
    /// as is: no phase rotation and no normalization.
    pub fn from_amplitudes(g: &MetricGraph, k: f64, a: Amplitudes) -> Result<Self> {
        if a.len() != g.num_endpoints() {
            return Err(Error::InvalidInput(format!(
                "amplitude vector has length {}, expected {}",
                a.len(),
                g.num_endpoints()
            )));
        }
        let sv = crate::scattering::vertex_scattering(g)?;
        let lengths = g.lengths();
        let coeffs = edge_coefficients(&a, k, &lengths);
        let (sup, im) = sup_parts(&coeffs, k, &lengths);
        Ok(Eigenfunction {
            k,
            b: &sv * &a,
            a,
            graph: g.clone(),
            residual: if sup > 0.0 { im / sup } else { f64::INFINITY },
            coeffs,
            sup,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.k * self.k
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    pub fn amplitudes_a(&self) -> &Amplitudes {
        &self.a
    }

    pub fn amplitudes_b(&self) -> &Amplitudes {
        &self.b
    }

    /// Imaginary sup-norm relative to the real one after realification.
    pub fn realification_residual(&self) -> f64 {
        self.residual
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    /// Real coefficients `(A, B)` of `psi(t) = A cos kt + B sin kt` on `edge`.
    pub fn coefficients(&self, edge: usize) -> (f64, f64) {
        let (a, b) = self.coeffs[edge];
        (a.re, b.re)
    }

    fn check_point(&self, edge: usize, t: f64) -> Result<f64> {
        if edge >= self.graph.num_edges() {
            return Err(Error::OutOfRange(format!("edge {edge} does not exist")));
        }
        let l = self.graph.length(edge);
        let slack = 1e-12 * l.max(1.0);
        if !(t >= -slack && t <= l + slack) {
            return Err(Error::OutOfRange(format!("t = {t} outside edge {edge} of length {l}")));
        }
        Ok(t.clamp(0.0, l))
    }

    pub fn evaluate_on_edge(&self, edge: usize, t: f64) -> Result<f64> {
        let t = self.check_point(edge, t)?;
        let (a, b) = self.coefficients(edge);
        Ok(a * (self.k * t).cos() + b * (self.k * t).sin())
    }

    /// `d psi / dt` along the edge orientation.
    pub fn derivative_on_edge(&self, edge: usize, t: f64) -> Result<f64> {
        let t = self.check_point(edge, t)?;
        let (a, b) = self.coefficients(edge);
        Ok(self.k * (b * (self.k * t).cos() - a * (self.k * t).sin()))
    }

    /// `psi'^2 + k^2 psi^2`, constant along each edge.
    pub fn prufer(&self, edge: usize, t: f64) -> Result<f64> {
        let v = self.evaluate_on_edge(edge, t)?;
        let d = self.derivative_on_edge(edge, t)?;
        Ok(d * d + self.k * self.k * v * v)
    }

    fn complex_endpoint(&self, j: usize) -> (Complex, Complex) {
        let n = j / 2;
        let (a, b) = self.coeffs[n];
        let k = self.k;
        if j % 2 == 0 {
            (a, k * b)
        } else {
            let l = self.graph.length(n);
            let (c, s) = ((k * l).cos(), (k * l).sin());
            // inward derivative at t = l is -psi'(l)
            (a * c + b * s, -k * (b * c - a * s))
        }
    }

    /// Value and inward derivative at endpoint `j`.
    pub fn endpoint_data(&self, j: usize) -> (f64, f64) {
        let (v, d) = self.complex_endpoint(j);
        (v.re, d.re)
    }

    /// `psi` at every vertex, checked for continuity and against `a_j + b_j`.
    pub fn vertex_values(&self) -> Result<Vec<f64>> {
        let tol = 1e-8 * self.sup.max(f64::MIN_POSITIVE);
        let mut out = Vec::with_capacity(self.graph.num_vertices());
        for (m, v) in self.graph.vertices().iter().enumerate() {
            let first = v.endpoints[0];
            let value = self.endpoint_data(first).0;
            for &j in &v.endpoints {
                let here = self.endpoint_data(j).0;
                if (here - value).abs() > tol {
                    return Err(Error::InconsistentEigenfunction(format!(
                        "vertex {m}: endpoint values {value} and {here} differ"
                    )));
                }
                let ab = (self.a[j] + self.b[j]).re;
                if (ab - here).abs() > tol {
                    return Err(Error::InconsistentEigenfunction(format!(
                        "vertex {m}: a_j + b_j = {ab} but psi = {here} at endpoint {j}"
                    )));
                }
            }
            out.push(value);
        }
        Ok(out)
    }

    /// Largest violation of the vertex conditions relative to the sup-norm:
    /// derivative sums at standard vertices plus the worst continuity gap
    /// (or Dirichlet value).
    pub fn kirchhoff_residual(&self) -> f64 {
        let mut flux: f64 = 0.0;
        let mut gap: f64 = 0.0;
        for v in self.graph.vertices() {
            let data: Vec<(Complex, Complex)> = v.endpoints.iter().map(|&j| self.complex_endpoint(j)).collect();
            match v.condition {
                Condition::Dirichlet => gap = gap.max(data[0].0.norm()),
                Condition::Standard => {
                    let s: Complex = data.iter().map(|d| d.1).sum();
                    flux = flux.max(s.norm());
                    for d in &data[1..] {
                        gap = gap.max((d.0 - data[0].0).norm());
                    }
                }
            }
        }
        if self.sup > 0.0 {
            (flux + gap) / self.sup
        } else {
            f64::INFINITY
        }
    }

    /// `int psi^2` over the graph.
    pub fn norm_squared(&self) -> f64 {
        let lengths = self.graph.lengths();
        let real: Vec<(Complex, Complex)> = (0..lengths.len())
            .map(|n| {
                let (a, b) = self.coefficients(n);
                (Complex::new(a, 0.0), Complex::new(b, 0.0))
            })
            .collect();
        bilinear(&real, &real, self.k, &lengths).re
    }

    /// `(edge, t, psi)` at `per_edge` equally spaced points of every edge.
    pub fn samples(&self, per_edge: usize) -> Vec<(usize, f64, f64)> {
        let mut out = Vec::new();
        for n in 0..self.graph.num_edges() {
            let l = self.graph.length(n);
            for i in 0..per_edge {
                let t = if per_edge == 1 { 0.5 * l } else { l * i as f64 / (per_edge - 1) as f64 };
                out.push((n, t, self.evaluate_on_edge(n, t).expect("sample inside edge")));
            }
        }
        out
    }
}

/// Basis function `which` of an eigenpair as a normalized real eigenfunction.
pub fn eigenfunction(g: &MetricGraph, pair: &Eigenpair, which: usize) -> Result<Eigenfunction> {
    let a = pair.amplitudes_a.get(which).ok_or_else(|| {
        Error::OutOfRange(format!(
            "basis index {which} out of range for multiplicity {}",
            pair.multiplicity
        ))
    })?;
    if a.len() != g.num_endpoints() {
        return Err(Error::InvalidInput("eigenpair does not belong to this graph".into()));
    }
    let (a, residual) = realify(a, pair.k, &g.lengths());
    if residual > 1e-6 {
        return Err(Error::DegeneratePair { residual });
    }
    let mut f = Eigenfunction::from_amplitudes(g, pair.k, a)?;
    f.residual = residual;
    Ok(f)
}

/// All basis functions of an eigenpair.
pub fn eigenbasis(g: &MetricGraph, pair: &Eigenpair) -> Result<Vec<Eigenfunction>> {
    (0..pair.amplitudes_a.len()).map(|i| eigenfunction(g, pair, i)).collect()
}

// ---------------------------------------------------------------------------
// Export

pub fn spectrum_csv(slice: &SpectrumSlice) -> String {
    let mut s = format!(
        "# k_max={}\n# lambda0_multiplicity={}\nindex,k,lambda,multiplicity,cluster_flag\n",
        format_real(slice.k_max),
        slice.lambda0_multiplicity
    );
    for (i, z) in slice.zeros.iter().enumerate() {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            format_real(z.k),
            format_real(z.lambda),
            z.multiplicity,
            z.cluster
        ));
    }
    s
}

pub fn eigenfunction_csv(f: &Eigenfunction, per_edge: usize) -> String {
    let mut s = String::from("edge,t,psi\n");
    for (n, t, v) in f.samples(per_edge) {
        s.push_str(&format!("{},{},{}\n", n + 1, format_real(t), format_real(v)));
    }
    s
}
