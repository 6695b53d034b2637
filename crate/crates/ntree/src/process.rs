//! Newton maps and the bookkeeping of total transforms.

use num_integer::Integer;
use num_traits::One;

use crate::diagram::PathStep;
use crate::error::{Error, Result};
use crate::polyring::{format_rat, pow_rat, ExpVec, MonomialMap, Rat, SparsePoly};

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonMapData {
    pub mu: Rat,
    pub multiplicity: u32,
    pub p: u64,
    pub q: Vec<u64>,
    pub c: Vec<u64>,
    pub p_i: Vec<u64>,
    pub q_prime: Vec<u64>,
    pub u: Vec<u64>,
    pub u0: u64,
    pub stripped_exponent: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformRecord {
    pub input: SparsePoly,
    pub data: NewtonMapData,
    pub total: SparsePoly,
    pub stripped: SparsePoly,
    pub order: u32,
    pub acc_exp: Vec<u64>,
}

/// `gcd(p, q)` with `gcd(p, 0) = p`.
pub fn gcd_u(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Canonical nonnegative solution of `1 + u.q = u0 p`: least `u0`, then
/// least `Σu`, then least in colexicographic order.
pub fn solve_diophantine(q: &[u64], p: u64) -> Result<(Vec<u64>, u64)> {
    let g = q.iter().fold(p, |acc, &x| gcd_u(acc, x));
    if p == 0 || g != 1 {
        return Err(Error::NoDiophantineSolution { q: q.to_vec(), p });
    }
    let max_u0 = 1 + (p - 1) * q.iter().sum::<u64>().max(1);
    for u0 in 1..=max_u0 {
        let target = u0 * p - 1;
        let mut best: Option<Vec<u64>> = None;
        let mut cur = vec![0u64; q.len()];
        enumerate(q, 0, target, &mut cur, &mut best);
        if let Some(u) = best {
            return Ok((u, u0));
        }
    }
    Err(Error::NoDiophantineSolution { q: q.to_vec(), p })
}

fn better(a: &[u64], b: &[u64]) -> bool {
    let (sa, sb): (u64, u64) = (a.iter().sum(), b.iter().sum());
    if sa != sb {
        return sa < sb;
    }
    a.iter().rev().lt(b.iter().rev())
}

fn enumerate(q: &[u64], k: usize, rest: u64, cur: &mut Vec<u64>, best: &mut Option<Vec<u64>>) {
    if k == q.len() {
        if rest == 0 && best.as_ref().is_none_or(|b| better(cur, b)) {
            *best = Some(cur.clone());
        }
        return;
    }
    if q[k] == 0 {
        cur[k] = 0;
        enumerate(q, k + 1, rest, cur, best);
        return;
    }
    for x in 0..=rest / q[k] {
        cur[k] = x;
        enumerate(q, k + 1, rest - x * q[k], cur, best);
    }
    cur[k] = 0;
}

fn map_data(step: &PathStep, mu: &Rat, m: u32, u: Vec<u64>, u0: u64) -> NewtonMapData {
    let c: Vec<u64> = step.q.iter().map(|&qk| gcd_u(step.p, qk)).collect();
    NewtonMapData {
        mu: mu.clone(),
        multiplicity: m,
        p: step.p,
        q: step.q.clone(),
        p_i: c.iter().map(|&ck| step.p / ck).collect(),
        q_prime: step.q.iter().zip(&c).map(|(&qk, &ck)| qk / ck).collect(),
        stripped_exponent: step.n.iter().zip(&c).map(|(&nk, &ck)| nk / ck).collect(),
        c,
        u,
        u0,
    }
}

/// The composite `x_i -> mu^{u_i} y_i^{p_i}`, `z -> y^{q'} z` followed by the
/// shift `z -> z + mu^{u0}`.
pub fn apply_map(f: &SparsePoly, data: &NewtonMapData) -> Result<SparsePoly> {
    let m = MonomialMap {
        scalars: data.u.iter().map(|&uk| pow_rat(&data.mu, uk as u32)).collect(),
        exponents: data.p_i.iter().map(|&x| x as u32).collect(),
        z_prefactor: data.q_prime.iter().map(|&x| x as u32).collect(),
        z_scalar: Rat::one(),
    };
    let shift = SparsePoly::constant(f.dim(), pow_rat(&data.mu, data.u0 as u32));
    Ok(f.monomial_substitute(&m).shift_z(&shift)?)
}

pub fn newton_map(f: &SparsePoly, step: &PathStep, mu: &Rat, acc_pred: &[u64]) -> Result<TransformRecord> {
    let (u, u0) = solve_diophantine(&step.q, step.p)?;
    newton_map_with(f, step, mu, acc_pred, u, u0)
}

/// As [`newton_map`] with a caller-chosen solution `(u, u0)`.
pub fn newton_map_with(
    f: &SparsePoly,
    step: &PathStep,
    mu: &Rat,
    acc_pred: &[u64],
    u: Vec<u64>,
    u0: u64,
) -> Result<TransformRecord> {
    let dot: u64 = u.iter().zip(&step.q).map(|(a, b)| a * b).sum();
    if 1 + dot != u0 * step.p {
        return Err(Error::NoDiophantineSolution { q: step.q.clone(), p: step.p });
    }
    let m = step
        .roots
        .iter()
        .find(|(r, _)| r == mu)
        .map(|(_, m)| *m)
        .ok_or_else(|| Error::RootNotOnEdge(format_rat(mu)))?;
    let data = map_data(step, mu, m, u, u0);
    let total = apply_map(f, &data)?;
    let content: Vec<u64> = total.x_content().iter().map(|&x| x as u64).collect();
    if content != data.stripped_exponent {
        return Err(Error::Internal(format!(
            "transform content {content:?} differs from N/c = {:?}",
            data.stripped_exponent
        )));
    }
    let strip = ExpVec::new(content.iter().map(|&x| x as u32).collect(), 0);
    let stripped = total.div_monomial(&strip).expect("content divides");
    let (_, order, _) = stripped.content_and_order()?;
    if order != m {
        return Err(Error::Internal(format!("transform has order {order}, root multiplicity is {m}")));
    }
    let acc_exp =
        acc_pred.iter().zip(&data.p_i).zip(&data.stripped_exponent).map(|((&a, &pi), &s)| pi * a + s).collect();
    Ok(TransformRecord { input: f.clone(), data, total, stripped, order, acc_exp })
}

/// `∂(f∘σ)/∂z = y^{q'} (f_z∘σ)`.
pub fn chain_rule_holds(rec: &TransformRecord) -> Result<bool> {
    let lhs = rec.total.partial_z();
    let fz = apply_map(&rec.input.partial_z(), &rec.data)?;
    let qp = ExpVec::new(rec.data.q_prime.iter().map(|&x| x as u32).collect(), 0);
    Ok(lhs == fz.mul_monomial(&qp))
}
