//! Integer polynomials in `x1..xd` with packed monomials, used only by the
//! resultant. Monomials pack into a `u128` with `x1` in the high bits, so
//! integer order on keys is lexicographic order on exponents.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::polyring::{ExpVec, PolyError, Rat, SparsePoly};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct ZPoly {
    // descending by key
    terms: Vec<(u128, BigInt)>,
}

fn bits(dim: usize) -> u32 {
    (128 / dim.max(1) as u32).min(64)
}

fn pack(alpha: &[u32]) -> u128 {
    let b = bits(alpha.len());
    let mut k: u128 = 0;
    for &a in alpha {
        k = (k << b) | a as u128;
    }
    k
}

fn unpack(mut k: u128, dim: usize) -> Vec<u32> {
    let b = bits(dim);
    let mask: u128 = (1u128 << b) - 1;
    let mut out = vec![0u32; dim];
    for i in (0..dim).rev() {
        out[i] = (k & mask) as u32;
        k >>= b;
    }
    out
}

/// True when `a` divides `b` as monomials.
fn divides(a: u128, b: u128, dim: usize) -> bool {
    let bb = bits(dim);
    let mask: u128 = (1u128 << bb) - 1;
    let (mut a, mut b) = (a, b);
    for _ in 0..dim {
        if (a & mask) > (b & mask) {
            return false;
        }
        a >>= bb;
        b >>= bb;
    }
    true
}

impl ZPoly {
    pub(crate) fn zero() -> Self {
        ZPoly { terms: Vec::new() }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// From a z-free polynomial with integer coefficients.
    pub(crate) fn from_x_poly(p: &SparsePoly) -> Self {
        let mut terms: Vec<(u128, BigInt)> = p
            .terms()
            .map(|(e, c)| {
                debug_assert!(c.is_integer());
                (pack(&e.alpha), c.numer().clone())
            })
            .collect();
        terms.sort_by_key(|t| std::cmp::Reverse(t.0));
        ZPoly { terms }
    }

    pub(crate) fn to_x_poly(&self, dim: usize) -> SparsePoly {
        SparsePoly::from_terms(
            dim,
            self.terms.iter().map(|(k, c)| (ExpVec::new(unpack(*k, dim), 0), Rat::from_integer(c.clone()))),
        )
    }

    pub(crate) fn max_degree_in(&self, i: usize, dim: usize) -> u64 {
        self.terms.iter().map(|(k, _)| unpack(*k, dim)[i] as u64).max().unwrap_or(0)
    }

    fn neg(&self) -> ZPoly {
        ZPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    fn mul(&self, other: &ZPoly) -> ZPoly {
        if self.is_zero() || other.is_zero() {
            return ZPoly::zero();
        }
        let mut acc: BTreeMap<u128, BigInt> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let e = acc.entry(ka + kb).or_insert_with(BigInt::zero);
                *e += ca * cb;
            }
        }
        ZPoly::from_map(acc)
    }

    fn from_map(acc: BTreeMap<u128, BigInt>) -> ZPoly {
        ZPoly { terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect() }
    }

    fn sub(&self, other: &ZPoly) -> ZPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 > b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 > a[i].0 {
                out.push((b[j].0, -&b[j].1));
                j += 1;
            } else {
                let c = &a[i].1 - &b[j].1;
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        ZPoly { terms: out }
    }

    /// `self / d`, which must be exact.
    fn exact_div(&self, d: &ZPoly, dim: usize) -> ZPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if d.terms.len() == 1 {
            let (dk, dc) = &d.terms[0];
            return ZPoly {
                terms: self
                    .terms
                    .iter()
                    .map(|(k, c)| {
                        debug_assert!(divides(*dk, *k, dim));
                        debug_assert!((c % dc).is_zero());
                        (k - dk, c / dc)
                    })
                    .collect(),
            };
        }
        let (lk, lc) = &d.terms[0];
        let mut rem: BTreeMap<u128, BigInt> = self.terms.iter().cloned().collect();
        let mut quot: Vec<(u128, BigInt)> = Vec::new();
        while let Some((k, c)) = rem.pop_last() {
            assert!(divides(*lk, k, dim), "inexact division in Bareiss step");
            let qc = &c / lc;
            debug_assert!((&c % lc).is_zero());
            let qk = k - lk;
            for (dk, dc) in &d.terms[1..] {
                let e = rem.entry(qk + dk).or_insert_with(BigInt::zero);
                *e -= &qc * dc;
                if e.is_zero() {
                    rem.remove(&(qk + dk));
                }
            }
            quot.push((qk, qc));
        }
        ZPoly { terms: quot }
    }

    /// Fraction-free Gaussian elimination. `bound[i]` bounds the degree in
    /// `x_i` of every minor.
    pub(crate) fn bareiss_det(mut m: Vec<Vec<ZPoly>>, dim: usize, bound: &[u64]) -> Result<ZPoly, PolyError> {
        let b = bits(dim);
        // products of two minors must still fit
        if bound.iter().any(|&x| b < 64 && (2 * x + 1) >> b != 0) {
            return Err(PolyError::ExponentOverflow);
        }
        let n = m.len();
        if n == 0 {
            return Ok(ZPoly::one());
        }
        let mut sign_flip = false;
        let mut prev = ZPoly::one();
        for k in 0..n.saturating_sub(1) {
            if m[k][k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Ok(ZPoly::zero());
                };
                m.swap(k, r);
                sign_flip = !sign_flip;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let a = m[i][j].mul(&m[k][k]);
                    let c = m[i][k].mul(&m[k][j]);
                    let num = a.sub(&c);
                    m[i][j] = if num.is_zero() { num } else { num.exact_div(&prev, dim) };
                }
                m[i][k] = ZPoly::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign_flip { det.neg() } else { det })
    }

    fn one() -> ZPoly {
        ZPoly { terms: vec![(0, BigInt::one())] }
    }
}
