//! Sparse multivariate polynomials and a memoized cofactor determinant.

use crate::scalar::{FromCoefficient, Scalar};
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

/// Exponent multi-index `(a_1, ..., a_N)`.
pub type Exponents = Vec<u8>;

/// Polynomial in `num_vars` variables. Terms are kept in lexicographic
/// exponent order and never store zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly<T> {
    num_vars: usize,
    terms: BTreeMap<Exponents, T>,
}

impl<T: Scalar> MultiPoly<T> {
    pub fn zero(num_vars: usize) -> Self {
        MultiPoly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: T) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    /// The monomial `z_var`.
    pub fn variable(num_vars: usize, var: usize) -> Self {
        assert!(var < num_vars);
        let mut e = vec![0; num_vars];
        e[var] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(e, T::one());
        p
    }

    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Exponents, T)>) -> Self {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u8]) -> T {
        self.terms.get(exps).cloned().unwrap_or_else(T::zero)
    }

    /// Largest exponent of any variable.
    pub fn max_exponent(&self) -> u8 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, e: Exponents, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut p = Self::zero(self.num_vars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    /// Exact partial derivative with respect to `z_var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut p = Self::zero(self.num_vars);
        for (e, v) in &self.terms {
            if e[var] > 0 {
                let mut d = e.clone();
                d[var] -= 1;
                p.add_term(d, v.clone() * T::from_int(e[var] as i64));
            }
        }
        p
    }

    /// Nested Horner evaluation, one variable per level.
    pub fn eval<U>(&self, z: &[U]) -> U
    where
        U: Scalar + FromCoefficient<T>,
    {
        assert_eq!(z.len(), self.num_vars, "point dimension mismatch");
        let terms: Vec<(&[u8], U)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.as_slice(), U::from_coefficient(c)))
            .collect();
        horner(&terms, 0, z)
    }

    pub fn gradient<U>(&self, z: &[U]) -> Vec<U>
    where
        U: Scalar + FromCoefficient<T>,
    {
        (0..self.num_vars)
            .map(|i| self.derivative(i).eval(z))
            .collect()
    }
}

fn pow<U: Scalar>(x: &U, n: u8) -> U {
    let mut r = U::one();
    for _ in 0..n {
        r = r * x.clone();
    }
    r
}

// `terms` is lexicographically sorted, so each variable's exponents form
// contiguous ascending groups.
fn horner<U: Scalar>(terms: &[(&[u8], U)], var: usize, z: &[U]) -> U {
    if terms.is_empty() {
        return U::zero();
    }
    if var == z.len() {
        return terms.iter().fold(U::zero(), |a, (_, c)| a + c.clone());
    }
    let mut groups: Vec<(u8, &[(&[u8], U)])> = Vec::new();
    let mut start = 0;
    for i in 1..=terms.len() {
        if i == terms.len() || terms[i].0[var] != terms[start].0[var] {
            groups.push((terms[start].0[var], &terms[start..i]));
            start = i;
        }
    }
    let mut acc = U::zero();
    let mut prev: Option<u8> = None;
    for (e, slice) in groups.iter().rev() {
        if let Some(p) = prev {
            acc = acc * pow(&z[var], p - e);
        }
        acc = acc + horner(slice, var + 1, z);
        prev = Some(*e);
    }
    acc * pow(&z[var], prev.unwrap_or(0))
}

impl<T: Scalar> Add for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn add(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<T: Scalar> Sub for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn sub(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c.clone());
        }
        p
    }
}

impl<T: Scalar> Neg for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn neg(self) -> MultiPoly<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> Mul for &MultiPoly<T> {
    type Output = MultiPoly<T>;
    fn mul(self, rhs: &MultiPoly<T>) -> MultiPoly<T> {
        assert_eq!(self.num_vars, rhs.num_vars);
        let mut p = MultiPoly::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca.clone() * cb.clone());
            }
        }
        p
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion
/// along the sparsest remaining row, memoized on (rows, columns) minors.
pub fn cofactor_determinant<T: Scalar>(entries: &[Vec<MultiPoly<T>>], num_vars: usize) -> MultiPoly<T> {
    let n = entries.len();
    assert!(n <= 64, "matrix too large for bitmask minors");
    assert!(entries.iter().all(|r| r.len() == n), "matrix must be square");
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut memo = HashMap::new();
    minor(entries, full, full, num_vars, &mut memo)
}

fn minor<T: Scalar>(
    a: &[Vec<MultiPoly<T>>],
    rows: u64,
    cols: u64,
    num_vars: usize,
    memo: &mut HashMap<(u64, u64), MultiPoly<T>>,
) -> MultiPoly<T> {
    if rows == 0 {
        return MultiPoly::constant(num_vars, T::one());
    }
    if let Some(p) = memo.get(&(rows, cols)) {
        return p.clone();
    }
    let nonzero_in = |r: usize| {
        bits(cols)
            .filter(|&c| !a[r][c].is_zero())
            .count()
    };
    let pivot_row = bits(rows)
        .min_by_key(|&r| nonzero_in(r))
        .expect("rows non-empty");
    let row_rank = (rows & ((1u64 << pivot_row) - 1)).count_ones();
    let rest_rows = rows & !(1u64 << pivot_row);
    let mut det = MultiPoly::zero(num_vars);
    for (col_rank, c) in bits(cols).enumerate() {
        let entry = &a[pivot_row][c];
        if entry.is_zero() {
            continue;
        }
        let sub = minor(a, rest_rows, cols & !(1u64 << c), num_vars, memo);
        if sub.is_zero() {
            continue;
        }
        let term = entry * &sub;
        det = if (row_rank as usize + col_rank) % 2 == 0 {
            &det + &term
        } else {
            &det - &term
        };
    }
    memo.insert((rows, cols), det.clone());
    det
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1u64 << i) != 0)
}
