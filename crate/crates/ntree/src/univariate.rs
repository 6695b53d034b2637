//! Univariate polynomials over Q as coefficient vectors, constant first:
//! division, gcd and rational roots.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::polyring::Rat;

fn trim(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

pub(crate) fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![Rat::zero()], r);
    }
    let mut quot = vec![Rat::zero(); r.len() - db];
    let lb = b[db].clone();
    for s in (0..quot.len()).rev() {
        let f = r[s + db].clone() / &lb;
        for (k, c) in b.iter().enumerate() {
            r[s + k] -= &f * c;
        }
        quot[s] = f;
    }
    r.truncate(db.max(1));
    (quot, trim(r))
}

pub(crate) fn poly_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0].is_zero()) {
        let (_, r) = poly_divmod(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn derivative(a: &[Rat]) -> Vec<Rat> {
    if a.len() <= 1 {
        return vec![Rat::zero()];
    }
    a.iter().enumerate().skip(1).map(|(k, c)| c * Rat::from_integer(BigInt::from(k))).collect()
}

pub(crate) fn is_squarefree(a: &[Rat]) -> bool {
    poly_gcd(a, &derivative(a)).len() == 1
}

/// Primitive integer multiple.
fn primitive(poly: &[Rat]) -> Vec<BigInt> {
    let l = poly.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    ints.into_iter().map(|c| c / &g).collect()
}

fn next_prime(mut p: u64) -> u64 {
    loop {
        p += 1;
        if (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return p;
        }
    }
}

fn eval_mod(c: &[u64], x: u64, p: u64) -> u64 {
    c.iter().rev().fold(0, |acc, &k| ((acc as u128 * x as u128 + k as u128) % p as u128) as u64)
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Degree of `gcd(a, b)` over `F_p`; inputs have no trailing zeros.
fn gcd_degree_mod(a: &[u64], b: &[u64], p: u64) -> usize {
    let norm = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let (mut a, mut b) = (norm(a.to_vec()), norm(b.to_vec()));
    while !b.is_empty() {
        let inv = pow_mod(*b.last().expect("nonzero"), p - 2, p);
        while a.len() >= b.len() {
            let f = (*a.last().expect("nonzero") as u128 * inv as u128 % p as u128) as u64;
            let shift = a.len() - b.len();
            for (k, &c) in b.iter().enumerate() {
                let sub = (f as u128 * c as u128 % p as u128) as u64;
                a[shift + k] = (a[shift + k] + p - sub) % p;
            }
            a = norm(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// `a / b` with `|a| <= n`, `0 < b <= d` congruent to `u` modulo `m`.
fn reconstruct(u: &BigInt, m: &BigInt, n: &BigInt, d: &BigInt) -> Option<Rat> {
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > n {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        (r0, r1, t0, t1) = (r1, r2, t1, t2);
    }
    if t1.is_zero() || &t1.abs() > d {
        return None;
    }
    let a = if t1.is_negative() { -r1 } else { r1 };
    Some(Rat::new(a, t1.abs()))
}

fn vanishes(s: &[BigInt], r: &Rat) -> bool {
    let (a, b) = (r.numer(), r.denom());
    let n = s.len() - 1;
    let mut acc = BigInt::zero();
    let mut bp = BigInt::one();
    // sum s_k a^k b^(n-k), Horner from the top
    for k in (0..=n).rev() {
        acc = acc * a + &s[k] * &bp;
        bp *= b;
    }
    acc.is_zero()
}

/// Rational roots of a squarefree primitive integer polynomial with nonzero
/// constant term: roots modulo a good prime, lifted and reconstructed.
fn padic_roots(s: &[BigInt]) -> Vec<Rat> {
    let n = s.len() - 1;
    if n == 1 {
        return vec![Rat::new(-s[0].clone(), s[1].clone())];
    }
    let bound_a = s[0].abs();
    let bound_b = s[n].abs();
    let target = BigInt::from(2) * &bound_a * &bound_b;
    let ds: Vec<BigInt> = (1..=n).map(|k| &s[k] * BigInt::from(k)).collect();
    let mut p = 100;
    loop {
        p = next_prime(p);
        let bp = BigInt::from(p);
        let sp: Vec<u64> = s.iter().map(|c| c.mod_floor(&bp).to_u64().expect("reduced")).collect();
        if sp[n] == 0 {
            continue;
        }
        let dp: Vec<u64> = ds.iter().map(|c| c.mod_floor(&bp).to_u64().expect("reduced")).collect();
        if gcd_degree_mod(&sp, &dp, p) > 0 {
            continue;
        }
        let mut out = Vec::new();
        for x in (0..p).filter(|&x| eval_mod(&sp, x, p) == 0) {
            let mut r = BigInt::from(x);
            let mut m = bp.clone();
            while m <= target {
                m = &m * &m;
                let val = s.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &r + c).mod_floor(&m));
                let slope = ds.iter().rev().fold(BigInt::zero(), |acc, c| (acc * &r + c).mod_floor(&m));
                let inv = slope.modinv(&m).expect("simple root modulo p");
                r = (r - val * inv).mod_floor(&m);
            }
            if let Some(q) = reconstruct(&r, &m, &bound_a, &bound_b) {
                if vanishes(s, &q) {
                    out.push(q);
                }
            }
        }
        return out;
    }
}

/// Distinct rational roots with multiplicities, sorted, and the cofactor
/// left after dividing them out.
pub(crate) fn rational_roots(coeffs: &[Rat]) -> (Vec<(Rat, u32)>, Vec<Rat>) {
    let mut poly = trim(coeffs.to_vec());
    let mut roots = Vec::new();
    let mut zero_mult = 0;
    while poly.len() > 1 && poly[0].is_zero() {
        poly.remove(0);
        zero_mult += 1;
    }
    if zero_mult > 0 {
        roots.push((Rat::zero(), zero_mult));
    }
    if poly.len() <= 1 {
        return (roots, poly);
    }
    let (squarefree, _) = poly_divmod(&poly, &poly_gcd(&poly, &derivative(&poly)));
    let mut cands = padic_roots(&primitive(&squarefree));
    cands.sort();
    for r in cands {
        let mut m = 0;
        while poly.len() > 1 {
            let (quot, rem) = poly_divmod(&poly, &[-r.clone(), Rat::one()]);
            if !rem[0].is_zero() {
                break;
            }
            poly = quot;
            m += 1;
        }
        if m > 0 {
            roots.push((r, m));
        }
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    (roots, poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{rat, rat_frac};

    fn mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn roots_and_residual() {
        let lin = |r: Rat| vec![-r, rat(1)];
        let mut f = mul(&lin(rat_frac(2, 3)), &lin(rat_frac(2, 3)));
        f = mul(&f, &lin(rat(-5)));
        f = mul(&f, &[rat(1), rat(0), rat(1)]);
        let (roots, residual) = rational_roots(&f);
        assert_eq!(roots, vec![(rat(-5), 1), (rat_frac(2, 3), 2)]);
        assert_eq!(residual, vec![rat(1), rat(0), rat(1)]);
    }

    #[test]
    fn huge_coefficients() {
        let big = Rat::new(BigInt::from(2).pow(150u32), BigInt::from(3).pow(97u32));
        let f = mul(&mul(&[-big.clone(), rat(1)], &[rat(-2), rat(0), rat(1)]), &[rat(7), rat(1)]);
        let (roots, residual) = rational_roots(&f);
        assert_eq!(roots, vec![(rat(-7), 1), (big, 1)]);
        assert_eq!(residual.len(), 3);
    }

    #[test]
    fn gcd_of_products() {
        let g = poly_gcd(&mul(&[rat(1), rat(1)], &[rat(-2), rat(1)]), &mul(&[rat(1), rat(1)], &[rat(3), rat(1)]));
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].clone() / &g[1], rat(1));
    }
}
