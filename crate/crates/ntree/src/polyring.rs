//! Sparse polynomials in `x1..xd, z` with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`ExpVec`], whose ordering is
//! graded lexicographic with `x1 > x2 > ... > xd > z`. Iteration through
//! [`SparsePoly::terms`] yields the leading term first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::zpoly::ZPoly;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable x{index} (dimension is {dim})")]
    UnknownVariable { index: usize, dim: usize },
    #[error("negative exponent at byte {pos}")]
    NegativeExponent { pos: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("shift contains z")]
    ShiftHasZ,
    #[error("both resultant arguments are free of z and nonconstant")]
    BothZFree,
    #[error("zero polynomial")]
    ZeroPoly,
    #[error("not regular: f(0, z) vanishes identically after removing the x-content")]
    NotRegular,
    #[error("exponent overflow in the resultant oracle")]
    ExponentOverflow,
}

/// Exponent vector `(alpha; beta)` of a term `x^alpha z^beta`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpVec {
    pub alpha: Vec<u32>,
    pub beta: u32,
}

impl ExpVec {
    pub fn new(alpha: Vec<u32>, beta: u32) -> Self {
        ExpVec { alpha, beta }
    }

    pub fn zero(dim: usize) -> Self {
        ExpVec { alpha: vec![0; dim], beta: 0 }
    }

    pub fn degree(&self) -> u64 {
        self.alpha.iter().map(|&a| a as u64).sum::<u64>() + self.beta as u64
    }

    pub(crate) fn add(&self, other: &ExpVec) -> ExpVec {
        ExpVec {
            alpha: self.alpha.iter().zip(&other.alpha).map(|(a, b)| a + b).collect(),
            beta: self.beta + other.beta,
        }
    }
}

impl Ord for ExpVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.alpha.cmp(&other.alpha))
            .then_with(|| self.beta.cmp(&other.beta))
    }
}

impl PartialOrd for ExpVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Monomial substitution `x_i -> s_i * y_i^{e_i}`, `z -> s_z * y^{zexp} * z`.
///
/// The general form carries a full exponent matrix, but only diagonal maps
/// are ever built here, so the matrix is stored by its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMap {
    pub scalars: Vec<Rat>,
    pub exponents: Vec<u32>,
    pub z_prefactor: Vec<u32>,
    pub z_scalar: Rat,
}

impl MonomialMap {
    pub fn identity(dim: usize) -> Self {
        MonomialMap {
            scalars: vec![Rat::one(); dim],
            exponents: vec![1; dim],
            z_prefactor: vec![0; dim],
            z_scalar: Rat::one(),
        }
    }

    /// The map `self` followed by `next`: substituting with the result equals
    /// substituting with `self` and then with `next`.
    pub fn then(&self, next: &MonomialMap) -> MonomialMap {
        let d = self.scalars.len();
        let mut scalars = Vec::with_capacity(d);
        let mut exponents = Vec::with_capacity(d);
        let mut z_prefactor = Vec::with_capacity(d);
        let mut z_scalar = self.z_scalar.clone() * &next.z_scalar;
        for i in 0..d {
            // x_i -> s_i y_i^{e_i} -> s_i (t_i y'_i^{f_i})^{e_i}
            scalars.push(self.scalars[i].clone() * pow_rat(&next.scalars[i], self.exponents[i]));
            exponents.push(self.exponents[i] * next.exponents[i]);
            // z -> s y^a z -> s (t y'^f)^a (s' y'^b z)
            z_scalar *= pow_rat(&next.scalars[i], self.z_prefactor[i]);
            z_prefactor.push(self.z_prefactor[i] * next.exponents[i] + next.z_prefactor[i]);
        }
        MonomialMap { scalars, exponents, z_prefactor, z_scalar }
    }
}

pub fn pow_rat(r: &Rat, e: u32) -> Rat {
    num_traits::pow::pow(r.clone(), e as usize)
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    dim: usize,
    terms: BTreeMap<ExpVec, Rat>,
}

impl SparsePoly {
    pub fn zero(dim: usize) -> Self {
        SparsePoly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rat::one())
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        Self::monomial(dim, ExpVec::zero(dim), c)
    }

    pub fn monomial(dim: usize, e: ExpVec, c: Rat) -> Self {
        assert_eq!(e.alpha.len(), dim, "exponent vector has wrong length");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        SparsePoly { dim, terms }
    }

    /// The variable `x_i`, 1-based.
    pub fn x(dim: usize, i: usize) -> Self {
        let mut alpha = vec![0; dim];
        alpha[i - 1] = 1;
        Self::monomial(dim, ExpVec::new(alpha, 0), Rat::one())
    }

    pub fn z(dim: usize) -> Self {
        Self::monomial(dim, ExpVec::new(vec![0; dim], 1), Rat::one())
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (ExpVec, Rat)>) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
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

    /// Terms, leading term first.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpVec, &Rat)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, e: &ExpVec) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, e: ExpVec, c: Rat) {
        debug_assert_eq!(e.alpha.len(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn z_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.beta).max()
    }

    pub fn is_z_free(&self) -> bool {
        self.terms.keys().all(|e| e.beta == 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.degree() == 0)
    }

    fn check_dim(&self, other: &SparsePoly) -> Result<(), PolyError> {
        if self.dim != other.dim {
            Err(PolyError::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_dim(other)?;
        let mut out = SparsePoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term(ea.add(eb), ca.clone() * cb);
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.try_add(other).expect("dimension mismatch")
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        self.try_mul(other).expect("dimension mismatch")
    }

    pub fn neg(&self) -> SparsePoly {
        self.scale(&-Rat::one())
    }

    pub fn scale(&self, c: &Rat) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.dim);
        }
        SparsePoly { dim: self.dim, terms: self.terms.iter().map(|(e, v)| (e.clone(), v.clone() * c)).collect() }
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut result = SparsePoly::one(self.dim);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiply by `x^alpha z^beta`.
    pub fn mul_monomial(&self, e: &ExpVec) -> SparsePoly {
        SparsePoly { dim: self.dim, terms: self.terms.iter().map(|(k, v)| (k.add(e), v.clone())).collect() }
    }

    /// Divide by `x^alpha z^beta`; `None` unless every term is divisible.
    pub fn div_monomial(&self, e: &ExpVec) -> Option<SparsePoly> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            if k.beta < e.beta || k.alpha.iter().zip(&e.alpha).any(|(a, b)| a < b) {
                return None;
            }
            let alpha = k.alpha.iter().zip(&e.alpha).map(|(a, b)| a - b).collect();
            terms.insert(ExpVec::new(alpha, k.beta - e.beta), v.clone());
        }
        Some(SparsePoly { dim: self.dim, terms })
    }

    pub fn partial_z(&self) -> SparsePoly {
        let mut out = SparsePoly::zero(self.dim);
        for (e, c) in &self.terms {
            if e.beta > 0 {
                out.add_term(ExpVec::new(e.alpha.clone(), e.beta - 1), c.clone() * rat(e.beta as i64));
            }
        }
        out
    }

    /// Coefficients of `z^0, z^1, ...` as z-free polynomials.
    pub fn z_coefficients(&self) -> Vec<SparsePoly> {
        let deg = self.z_degree().unwrap_or(0) as usize;
        let mut out = vec![SparsePoly::zero(self.dim); deg + 1];
        for (e, c) in &self.terms {
            out[e.beta as usize].add_term(ExpVec::new(e.alpha.clone(), 0), c.clone());
        }
        out
    }

    /// `f(x, z + h(x))`.
    pub fn shift_z(&self, h: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_dim(h)?;
        if !h.is_z_free() {
            return Err(PolyError::ShiftHasZ);
        }
        if h.is_zero() {
            return Ok(self.clone());
        }
        if h.len() == 1 {
            let (gamma, c) = h.terms.iter().next().expect("one term");
            return Ok(self.shift_by_monomial(&gamma.alpha, c));
        }
        // Horner in z with the shifted variable z + h.
        let z = ExpVec::new(vec![0; self.dim], 1);
        let coeffs = self.z_coefficients();
        let mut acc = SparsePoly::zero(self.dim);
        for c in coeffs.iter().rev() {
            acc = acc.mul_monomial(&z).add(&acc.mul(h)).add(c);
        }
        Ok(acc)
    }

    /// `f(x, z + c x^gamma)` term by term.
    fn shift_by_monomial(&self, gamma: &[u32], c: &Rat) -> SparsePoly {
        let deg = self.z_degree().unwrap_or(0) as usize;
        let mut powers = vec![Rat::one()];
        for k in 1..=deg {
            powers.push(powers[k - 1].clone() * c);
        }
        // weights[b][j] = binom(b, j) c^(b - j)
        let mut weights: Vec<Vec<Rat>> = Vec::with_capacity(deg + 1);
        for b in 0..=deg {
            let mut row = Vec::with_capacity(b + 1);
            let mut binom = BigInt::one();
            for j in 0..=b {
                row.push(Rat::from_integer(binom.clone()) * &powers[b - j]);
                binom = binom * BigInt::from(b - j) / BigInt::from(j + 1);
            }
            weights.push(row);
        }
        let mut out = SparsePoly::zero(self.dim);
        for (e, a) in &self.terms {
            let b = e.beta as usize;
            for (j, w) in weights[b].iter().enumerate() {
                let k = (b - j) as u32;
                let alpha = e.alpha.iter().zip(gamma).map(|(x, g)| x + k * g).collect();
                out.add_term(ExpVec::new(alpha, j as u32), a.clone() * w);
            }
        }
        out
    }

    pub fn monomial_substitute(&self, m: &MonomialMap) -> SparsePoly {
        assert_eq!(m.scalars.len(), self.dim, "map dimension mismatch");
        let mut out = SparsePoly::zero(self.dim);
        for (e, c) in &self.terms {
            let mut coef = c.clone() * pow_rat(&m.z_scalar, e.beta);
            let mut alpha = Vec::with_capacity(self.dim);
            for i in 0..self.dim {
                coef *= pow_rat(&m.scalars[i], e.alpha[i]);
                alpha.push(e.alpha[i] * m.exponents[i] + e.beta * m.z_prefactor[i]);
            }
            out.add_term(ExpVec::new(alpha, e.beta), coef);
        }
        out
    }

    /// Componentwise minimum of the x-exponents over the support.
    pub fn x_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.dim];
        };
        let mut m = first.alpha.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(&e.alpha) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// `(n, order, g)` with `f = x^n g` and `order` the z-order of `g(0, z)`.
    pub fn content_and_order(&self) -> Result<(Vec<u32>, u32, SparsePoly), PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPoly);
        }
        let n = self.x_content();
        let g = self.div_monomial(&ExpVec::new(n.clone(), 0)).expect("content divides every term");
        let order = g
            .terms
            .keys()
            .filter(|e| e.alpha.iter().all(|&a| a == 0))
            .map(|e| e.beta)
            .min()
            .ok_or(PolyError::NotRegular)?;
        Ok((n, order, g))
    }

    /// Substitute the constant `c` for `x_i` (1-based), dropping that variable.
    pub fn specialize(&self, i: usize, c: &Rat) -> SparsePoly {
        assert!(i >= 1 && i <= self.dim && self.dim >= 2);
        let mut out = SparsePoly::zero(self.dim - 1);
        for (e, v) in &self.terms {
            let mut alpha = e.alpha.clone();
            let k = alpha.remove(i - 1);
            out.add_term(ExpVec::new(alpha, e.beta), v.clone() * pow_rat(c, k));
        }
        out
    }

    /// Map every term through `f` on exponents; coefficients unchanged.
    pub fn map_exponents(&self, dim: usize, f: impl Fn(&ExpVec) -> ExpVec) -> SparsePoly {
        let mut out = SparsePoly::zero(dim);
        for (e, c) in &self.terms {
            out.add_term(f(e), c.clone());
        }
        out
    }

    /// Resultant with respect to `z`, the determinant of the Sylvester matrix
    /// with the rows of `self` first and coefficients in descending z-degree.
    pub fn sylvester_resultant(&self, g: &SparsePoly) -> Result<SparsePoly, PolyError> {
        self.check_dim(g)?;
        if self.is_zero() || g.is_zero() {
            return Ok(SparsePoly::zero(self.dim));
        }
        let m = self.z_degree().unwrap_or(0) as usize;
        let n = g.z_degree().unwrap_or(0) as usize;
        if m == 0 && n == 0 {
            if !self.is_constant() && !g.is_constant() {
                return Err(PolyError::BothZFree);
            }
            return Ok(SparsePoly::one(self.dim));
        }
        if n == 0 {
            return Ok(g.pow(m as u32));
        }
        if m == 0 {
            return Ok(self.pow(n as u32));
        }
        let (fi, fs) = integer_coefficients(self);
        let (gi, gs) = integer_coefficients(g);
        let fc: Vec<ZPoly> = fi.z_coefficients().iter().map(ZPoly::from_x_poly).collect();
        let gc: Vec<ZPoly> = gi.z_coefficients().iter().map(ZPoly::from_x_poly).collect();
        let size = m + n;
        let mut mat: Vec<Vec<ZPoly>> = vec![vec![ZPoly::zero(); size]; size];
        for r in 0..n {
            for k in 0..=m {
                mat[r][r + k] = fc[m - k].clone();
            }
        }
        for r in 0..m {
            for k in 0..=n {
                mat[n + r][r + k] = gc[n - k].clone();
            }
        }
        let bound = degree_bound(&fc, &gc, m, n, self.dim);
        let det = ZPoly::bareiss_det(mat, self.dim, &bound)?;
        // res(f, g) = res(a f, b g) / (a^n b^m)
        let scale = Rat::from_integer(num_traits::pow::pow(fs, n) * num_traits::pow::pow(gs, m));
        Ok(det.to_x_poly(self.dim).scale(&(Rat::one() / scale)))
    }

    /// `D` with `h = x^D u`, `u(0) != 0`, if it exists.
    pub fn monomial_unit_split(&self) -> Result<Option<Vec<u32>>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPoly);
        }
        let d = self.x_content();
        let e = ExpVec::new(d.clone(), 0);
        if self.terms.contains_key(&e) {
            Ok(Some(d))
        } else {
            Ok(None)
        }
    }

    pub fn parse(text: &str, dim: usize) -> Result<SparsePoly, PolyError> {
        Parser::new(text, dim).parse()
    }
}

/// `(a f, a)` with `a` the positive lcm of the coefficient denominators.
fn integer_coefficients(f: &SparsePoly) -> (SparsePoly, BigInt) {
    let mut l = BigInt::one();
    for c in f.terms.values() {
        l = l.lcm(c.denom());
    }
    (f.scale(&Rat::from_integer(l.clone())), l)
}

/// Per-variable degree bound for every minor of the Sylvester matrix.
fn degree_bound(fc: &[ZPoly], gc: &[ZPoly], m: usize, n: usize, dim: usize) -> Vec<u64> {
    (0..dim)
        .map(|i| {
            let df = fc.iter().map(|c| c.max_degree_in(i, dim)).max().unwrap_or(0);
            let dg = gc.iter().map(|c| c.max_degree_in(i, dim)).max().unwrap_or(0);
            n as u64 * df + m as u64 * dg
        })
        .collect()
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (i, &a) in e.alpha.iter().enumerate() {
                match a {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, a)),
                }
            }
            match e.beta {
                0 => {}
                1 => factors.push("z".to_string()),
                b => factors.push(format!("z^{}", b)),
            }
            if factors.is_empty() {
                write!(f, "{}", format_rat(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rat(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, dim: usize) -> Self {
        Parser { src: text.as_bytes(), pos: 0, dim }
    }

    fn err<T>(&self, msg: &str) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<SparsePoly, PolyError> {
        if self.dim == 0 {
            return self.err("dimension must be at least 1");
        }
        let p = self.expr()?;
        if self.peek().is_some() {
            return self.err("unexpected trailing input");
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<SparsePoly, PolyError> {
        let mut negate_first = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                negate_first = true;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let mut acc = self.term()?;
        if negate_first {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, PolyError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<SparsePoly, PolyError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                return Err(PolyError::NegativeExponent { pos: self.pos });
            }
            let e = self.natural()?;
            let e = u32::try_from(e).or_else(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn natural(&mut self) -> Result<BigInt, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse::<BigInt>().expect("digits parse"))
    }

    fn base(&mut self) -> Result<SparsePoly, PolyError> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(SparsePoly::z(self.dim))
            }
            Some(b'x') => {
                self.pos += 1;
                let at = self.pos;
                let idx = self.natural()?;
                let idx = usize::try_from(idx).unwrap_or(usize::MAX);
                if idx == 0 || idx > self.dim {
                    let _ = at;
                    return Err(PolyError::UnknownVariable { index: idx, dim: self.dim });
                }
                Ok(SparsePoly::x(self.dim, idx))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.natural()?;
                let mut value = Rat::from_integer(num);
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    let den = self.natural()?;
                    if den.is_zero() {
                        return self.err("zero denominator");
                    }
                    value /= Rat::from_integer(den);
                }
                Ok(SparsePoly::constant(self.dim, value))
            }
            Some(_) => self.err("unexpected character"),
            None => self.err("unexpected end of input"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> SparsePoly {
        SparsePoly::parse(s, d).unwrap()
    }

    #[test]
    fn parse_literals() {
        let f = p("z^2 - x1^3", 1);
        assert_eq!(f.len(), 2);
        assert_eq!(f.coeff(&ExpVec::new(vec![0], 2)), rat(1));
        assert_eq!(f.coeff(&ExpVec::new(vec![3], 0)), rat(-1));
        let g = p("1/2*z + x1", 1);
        assert_eq!(g.coeff(&ExpVec::new(vec![0], 1)), rat_frac(1, 2));
        assert_eq!(g.coeff(&ExpVec::new(vec![1], 0)), rat(1));
        let h = p("(z^2 - x1^3*x2)*(z^2 - x1^3*x2^4)", 2);
        assert_eq!(h.len(), 4);
        assert_eq!(h.coeff(&ExpVec::new(vec![3, 1], 2)), rat(-1));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(SparsePoly::parse("z^2 - x3", 2), Err(PolyError::UnknownVariable { index: 3, dim: 2 })));
        assert!(matches!(SparsePoly::parse("z^-2", 1), Err(PolyError::NegativeExponent { .. })));
        assert!(matches!(SparsePoly::parse("z^2 +", 1), Err(PolyError::Syntax { .. })));
        assert!(matches!(SparsePoly::parse("z ) ", 1), Err(PolyError::Syntax { pos: 2, .. })));
    }

    #[test]
    fn print_round_trip() {
        for s in ["z^2 - x1^3", "1/2*z + x1", "-3/7*x1^2*x2*z^3 + 5 - x2", "0"] {
            let f = p(s, 2);
            let g = p(&f.to_string(), 2);
            assert_eq!(f, g, "{s}");
        }
        assert_eq!(p("z^2 - x1^3", 1).to_string(), "-x1^3 + z^2");
    }

    #[test]
    fn arithmetic() {
        assert!(p("z^2", 1).add(&p("-z^2", 1)).is_zero());
        assert_eq!(p("z^2-x1^3", 1).mul(&p("z^3-x1^2", 1)), p("z^5 - x1^2*z^2 - x1^3*z^3 + x1^5", 1));
        let f = p("z^2-x1^3", 1);
        assert_eq!(f.mul(&SparsePoly::one(1)), f);
        assert!(matches!(p("z", 1).try_add(&p("z", 2)), Err(PolyError::DimensionMismatch(1, 2))));
    }

    #[test]
    fn derivative() {
        assert_eq!(p("z^2 - x1^3", 1).partial_z(), p("2*z", 1));
        assert!(p("x1^5", 1).partial_z().is_zero());
        assert_eq!(p("z^4 - 3*x1^3*z^2 + 2*x1^6", 1).partial_z(), p("4*z^3 - 6*x1^3*z", 1));
    }

    #[test]
    fn shifts() {
        assert_eq!(p("(z-x1)^2", 1).shift_z(&p("x1", 1)).unwrap(), p("z^2", 1));
        let f = p("z^2 - x1^3", 1);
        assert_eq!(f.shift_z(&SparsePoly::zero(1)).unwrap(), f);
        assert_eq!(p("z^2 - 2*x1*z + x1^2 - x1^5", 1).shift_z(&p("x1", 1)).unwrap(), p("z^2 - x1^5", 1));
        assert_eq!(f.shift_z(&p("z", 1)), Err(PolyError::ShiftHasZ));
    }

    #[test]
    fn substitution() {
        let f = p("z^2 - x1^3", 1);
        let m = MonomialMap { scalars: vec![rat(1)], exponents: vec![2], z_prefactor: vec![3], z_scalar: rat(1) };
        assert_eq!(f.monomial_substitute(&m), p("x1^6*z^2 - x1^6", 1));
        assert_eq!(f.monomial_substitute(&MonomialMap::identity(1)), f);
    }

    #[test]
    fn content_order() {
        let (n, o, g) = p("x1^2*x2*(z^2 - x1*z)", 2).content_and_order().unwrap();
        assert_eq!((n, o), (vec![2, 1], 2));
        assert_eq!(g, p("z^2 - x1*z", 2));
        let (n, o, _) = p("z^3", 1).content_and_order().unwrap();
        assert_eq!((n, o), (vec![0], 3));
        assert_eq!(p("x1*z + x2*z^2", 2).content_and_order(), Err(PolyError::NotRegular));
    }

    #[test]
    fn resultants() {
        let r = p("z^2-x1^3", 1).sylvester_resultant(&p("z^3-x1^2", 1)).unwrap();
        assert!(r == p("x1^4 - x1^9", 1) || r == p("x1^9 - x1^4", 1), "{r}");
        let r = p("z^2-x1^3", 1).sylvester_resultant(&p("2*z", 1)).unwrap();
        assert_eq!(r, p("-4*x1^3", 1));
        let r = p("z-x1^2", 1).sylvester_resultant(&p("z-3*x1", 1)).unwrap();
        assert!(r == p("x1^2 - 3*x1", 1) || r == p("3*x1 - x1^2", 1));
        assert_eq!(p("x1", 1).sylvester_resultant(&p("x1^2", 1)), Err(PolyError::BothZFree));
    }

    #[test]
    fn unit_split() {
        assert_eq!(p("x1^4 - x1^9", 1).monomial_unit_split().unwrap(), Some(vec![4]));
        assert_eq!(p("x1^3 + x2^3", 2).monomial_unit_split().unwrap(), None);
        assert_eq!(p("-4*x1^2*x2^3", 2).monomial_unit_split().unwrap(), Some(vec![2, 3]));
        assert_eq!(SparsePoly::zero(1).monomial_unit_split(), Err(PolyError::ZeroPoly));
    }
}
