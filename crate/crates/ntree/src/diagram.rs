//! Newton diagram geometry: apex projections, the polygonal path and face
//! polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polyring::{rat, ExpVec, Rat, SparsePoly};

pub const DEFAULT_ELIM_BUDGET: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum NuStatus {
    Void,
    OneVertex { v: Vec<Rat>, attained_by: ExpVec },
    Many,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathStep {
    pub upper: ExpVec,
    pub lower: ExpVec,
    pub p: u64,
    pub q: Vec<u64>,
    pub n: Vec<u64>,
    /// Roots of the face polynomial in `s = z^p / x^q`, ascending.
    pub roots: Vec<(Rat, u32)>,
    /// Simple irrational roots of the face polynomial, counted only when
    /// the path was computed with [`polygonal_path_with`].
    pub simple_irrational: u32,
    pub a_gamma: Rat,
    /// z-exponent of the lower endpoint.
    pub z_factor_exp: u32,
    /// x-exponent of the lower endpoint.
    pub x_factor_exp: Vec<u32>,
}

impl PathStep {
    /// Total z-drop along the edge.
    pub fn drop(&self) -> u32 {
        self.upper.beta - self.lower.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    /// The path reaches `z`-exponent 0.
    Nw1,
    /// Nothing lies below the last apex.
    Nw2,
    /// The shadow of the last apex has several vertices.
    Nw3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub steps: Vec<PathStep>,
    pub terminal: Terminal,
    pub terminal_order: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    pub face: SparsePoly,
    /// Coefficients of `p(s)`, constant term first.
    pub one_var: Vec<Rat>,
    pub roots: Vec<(Rat, u32)>,
}

enum Shadow {
    Void,
    One(Vec<Rat>, ExpVec),
    Many,
}

/// Pareto-minimal points of the projection of the terms below `(ax, ab)`
/// from that apex, each with the lowest-`β` term projecting onto it.
fn shadow_minima(f: &SparsePoly, ax: &[u32], ab: u32) -> Vec<(Vec<Rat>, ExpVec)> {
    let mut proj: Vec<(Vec<Rat>, &ExpVec)> = Vec::new();
    for (e, _) in f.terms() {
        if e.beta >= ab {
            continue;
        }
        let scale = Rat::new(BigInt::from(ab), BigInt::from(ab - e.beta));
        let v =
            e.alpha.iter().zip(ax).map(|(&a, &x)| rat(x as i64) + scale.clone() * rat(a as i64 - x as i64)).collect();
        proj.push((v, e));
    }
    let dominated = |a: &Vec<Rat>, b: &Vec<Rat>| a != b && b.iter().zip(a).all(|(x, y)| x <= y);
    let mut out: Vec<(Vec<Rat>, ExpVec)> = Vec::new();
    for (v, e) in &proj {
        if proj.iter().any(|(w, _)| dominated(v, w)) {
            continue;
        }
        match out.iter_mut().find(|(w, _)| w == v) {
            Some(slot) if e.beta < slot.1.beta => slot.1 = (*e).clone(),
            Some(_) => {}
            None => out.push((v.clone(), (*e).clone())),
        }
    }
    out.sort();
    out
}

fn shadow(f: &SparsePoly, ax: &[u32], ab: u32) -> Shadow {
    let mut minima = shadow_minima(f, ax, ab);
    match minima.len() {
        0 => Shadow::Void,
        1 => {
            let (v, e) = minima.pop().expect("one element");
            Shadow::One(v, e)
        }
        _ => Shadow::Many,
    }
}

pub fn nu_status(f: &SparsePoly) -> Result<NuStatus> {
    let (n, order, _) = f.content_and_order()?;
    Ok(match shadow(f, &n, order) {
        Shadow::Void => NuStatus::Void,
        Shadow::One(v, e) => NuStatus::OneVertex { v, attained_by: e },
        Shadow::Many => NuStatus::Many,
    })
}

/// Geometry of the path without root extraction.
fn path_geometry(f: &SparsePoly) -> Result<(Vec<PathStep>, Vec<Vec<Rat>>, Terminal, u32)> {
    let (n, order, _) = f.content_and_order()?;
    let mut apex = ExpVec::new(n, order);
    let mut steps = Vec::new();
    let mut faces = Vec::new();
    loop {
        if apex.beta == 0 {
            return Ok((steps, faces, Terminal::Nw1, 0));
        }
        let (v, _) = match shadow(f, &apex.alpha, apex.beta) {
            Shadow::Void => return Ok((steps, faces, Terminal::Nw2, apex.beta)),
            Shadow::Many if steps.is_empty() => return Err(Error::NuStatusMany),
            Shadow::Many => return Ok((steps, faces, Terminal::Nw3, apex.beta)),
            Shadow::One(v, e) => (v, e),
        };
        let ab = rat(apex.beta as i64);
        let slopes: Vec<Rat> =
            v.iter().zip(&apex.alpha).map(|(vk, &ak)| (vk.clone() - rat(ak as i64)) / ab.clone()).collect();
        let mut p = BigInt::one();
        for s in &slopes {
            p = p.lcm(s.denom());
        }
        let p = p.to_u64().expect("edge denominator fits u64");
        let q: Vec<u64> = slopes
            .iter()
            .map(|s| (s.clone() * rat(p as i64)).to_integer().to_u64().expect("slope is nonnegative"))
            .collect();
        let nvec: Vec<u64> = apex.alpha.iter().zip(&q).map(|(&a, &qk)| p * a as u64 + qk * apex.beta as u64).collect();
        let on_edge = |e: &ExpVec| {
            e.alpha.iter().zip(&q).zip(&nvec).all(|((&a, &qk), &nk)| p * a as u64 + qk * e.beta as u64 == nk)
        };
        let lower = f
            .terms()
            .map(|(e, _)| e)
            .filter(|e| on_edge(e))
            .min_by_key(|e| e.beta)
            .cloned()
            .expect("the dominating point lies on the edge");
        let k = (apex.beta - lower.beta) as u64 / p;
        let mut face = Vec::with_capacity(k as usize + 1);
        for j in 0..=k {
            let alpha = apex.alpha.iter().zip(&q).map(|(&a, &qk)| a + (j * qk) as u32).collect();
            face.push(f.coeff(&ExpVec::new(alpha, apex.beta - (j * p) as u32)));
        }
        steps.push(PathStep {
            upper: apex.clone(),
            lower: lower.clone(),
            p,
            q,
            n: nvec,
            roots: Vec::new(),
            simple_irrational: 0,
            a_gamma: face[0].clone(),
            z_factor_exp: lower.beta,
            x_factor_exp: lower.alpha.clone(),
        });
        faces.push(face);
        apex = lower;
    }
}

/// `Σ c_j s^{K-j}` with `c_j` the coefficient at the j-th lattice point
/// from the top, returned constant term first.
fn face_to_one_var(face: &[Rat]) -> Vec<Rat> {
    face.iter().rev().cloned().collect()
}

pub fn polygonal_path(f: &SparsePoly) -> Result<PathResult> {
    polygonal_path_with(f, false)
}

/// As [`polygonal_path`]; with `allow_simple` a squarefree irrational
/// residual is counted in `simple_irrational` instead of being an error.
pub fn polygonal_path_with(f: &SparsePoly, allow_simple: bool) -> Result<PathResult> {
    let (mut steps, faces, terminal, terminal_order) = path_geometry(f)?;
    for (step, face) in steps.iter_mut().zip(&faces) {
        let (roots, residual) = rational_roots(&face_to_one_var(face));
        if residual.len() > 1 {
            if !(allow_simple && crate::univariate::is_squarefree(&residual)) {
                return Err(Error::NonRationalRoots { residual: format_univariate(&residual) });
            }
            step.simple_irrational = (residual.len() - 1) as u32;
        }
        step.roots = roots;
    }
    Ok(PathResult { steps, terminal, terminal_order })
}

pub fn edge_polynomial(f: &SparsePoly, step: &PathStep) -> Result<EdgePolynomial> {
    let k = step.drop() as u64 / step.p;
    let mut face = SparsePoly::zero(f.dim());
    let mut coeffs = Vec::new();
    for j in 0..=k {
        let alpha: Vec<u32> = step.upper.alpha.iter().zip(&step.q).map(|(&a, &qk)| a + (j * qk) as u32).collect();
        let e = ExpVec::new(alpha, step.upper.beta - (j * step.p) as u32);
        let c = f.coeff(&e);
        coeffs.push(c.clone());
        face.add_term(e, c);
    }
    let one_var = face_to_one_var(&coeffs);
    let (roots, residual) = rational_roots(&one_var);
    if residual.len() > 1 {
        return Err(Error::NonRationalRoots { residual: format_univariate(&residual) });
    }
    Ok(EdgePolynomial { face, one_var, roots })
}

pub fn format_univariate(c: &[Rat]) -> String {
    let mut s = SparsePoly::zero(1);
    for (i, v) in c.iter().enumerate() {
        s.add_term(ExpVec::new(vec![0], i as u32), v.clone());
    }
    // printed in z, which plays the role of s here
    s.to_string()
}

/// Rational roots with multiplicities, ascending, and the residual factor
/// (constant term first) left after deflating them.
pub fn rational_roots(coeffs: &[Rat]) -> (Vec<(Rat, u32)>, Vec<Rat>) {
    crate::univariate::rational_roots(coeffs)
}

/// `h = μ x^q` if the first face is a pure power of one linear form that
/// absorbs the whole order.
pub fn eliminable(f: &SparsePoly, step: &PathStep) -> Option<SparsePoly> {
    let (n, order, _) = f.content_and_order().ok()?;
    if step.p != 1 || step.z_factor_exp != 0 || step.upper != ExpVec::new(n, order) {
        return None;
    }
    let roots = if step.roots.is_empty() { edge_polynomial(f, step).ok()?.roots } else { step.roots.clone() };
    match roots.as_slice() {
        [(mu, m)] if *m == order => {
            let alpha = step.q.iter().map(|&x| x as u32).collect();
            Some(SparsePoly::monomial(f.dim(), ExpVec::new(alpha, 0), mu.clone()))
        }
        _ => None,
    }
}

pub fn ensure_suitable(f: &SparsePoly, budget: usize) -> Result<(SparsePoly, Vec<SparsePoly>)> {
    let mut g = f.clone();
    let mut shifts = Vec::new();
    loop {
        if !matches!(nu_status(&g)?, NuStatus::OneVertex { .. }) {
            return Ok((g, shifts));
        }
        let (steps, _, _, _) = path_geometry(&g)?;
        let Some(h) = steps.first().and_then(|s| eliminable(&g, s)) else {
            return Ok((g, shifts));
        };
        if shifts.len() >= budget {
            return Err(Error::EliminationBudgetExceeded { budget });
        }
        g = g.shift_z(&h)?;
        shifts.push(h);
    }
}

/// Known part of a truncated series in `x`: a term `x^a z^b` is known when
/// `<weight, a> < bound`; everything above is dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precision {
    pub weight: Vec<u64>,
    pub bound: u64,
}

impl Precision {
    pub fn uniform(dim: usize, bound: u64) -> Precision {
        Precision { weight: vec![1; dim], bound }
    }

    pub fn weight_of(&self, alpha: &[u32]) -> u64 {
        self.weight.iter().zip(alpha).map(|(w, &a)| w * a as u64).sum()
    }

    fn rat_weight(&self, v: &[Rat]) -> Rat {
        v.iter().zip(&self.weight).map(|(x, &w)| x.clone() * rat(w as i64)).sum()
    }

    pub fn truncate(&self, f: &SparsePoly) -> SparsePoly {
        SparsePoly::from_terms(
            f.dim(),
            f.terms().filter(|(e, _)| self.weight_of(&e.alpha) < self.bound).map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        let mut right: Vec<(u64, &ExpVec, &Rat)> =
            b.terms().map(|(e, c)| (self.weight_of(&e.alpha), e, c)).filter(|t| t.0 < self.bound).collect();
        right.sort_by_key(|t| t.0);
        let mut out = SparsePoly::zero(a.dim());
        for (ea, ca) in a.terms() {
            let wa = self.weight_of(&ea.alpha);
            for (wb, eb, cb) in &right {
                if wa + wb >= self.bound {
                    break;
                }
                out.add_term(ea.add(eb), ca.clone() * *cb);
            }
        }
        out
    }

    /// `f(x, z + h)` modulo the unknown part.
    pub fn shift_z(&self, f: &SparsePoly, h: &SparsePoly) -> SparsePoly {
        let zh = SparsePoly::z(f.dim()).add(h);
        let mut acc = SparsePoly::zero(f.dim());
        for c in f.z_coefficients().iter().rev() {
            acc = self.mul(&acc, &zh).add(&self.truncate(c));
        }
        acc
    }

    /// `f(x, h(x))` and `f_z(x, h(x))` modulo the unknown part.
    fn eval_with_derivative(&self, f: &SparsePoly, h: &SparsePoly) -> (SparsePoly, SparsePoly) {
        let coeffs = f.z_coefficients();
        let mut power = SparsePoly::one(f.dim());
        let mut value = SparsePoly::zero(f.dim());
        let mut slope = SparsePoly::zero(f.dim());
        for (j, c) in coeffs.iter().enumerate() {
            let c = self.truncate(c);
            if j > 0 {
                slope = slope.add(&self.mul(&c, &power).scale(&rat(j as i64)));
                power = self.mul(&power, h);
            }
            value = value.add(&self.mul(&c, &power));
        }
        (value, slope)
    }

    /// Inverse of a z-free series with nonzero constant term.
    fn inverse(&self, u: &SparsePoly) -> Option<SparsePoly> {
        let u0 = u.coeff(&ExpVec::zero(u.dim()));
        if u0.is_zero() {
            return None;
        }
        let one = SparsePoly::one(u.dim());
        let mut v = SparsePoly::constant(u.dim(), u0.recip());
        loop {
            let e = one.sub(&self.mul(u, &v));
            if e.is_zero() {
                return Some(v);
            }
            v = v.add(&self.mul(&v, &e));
        }
    }

    /// Drops the terms whose image under the Newton map of `step` falls in
    /// the unknown part of the transform; the map is monomial, so this
    /// commutes with it.
    pub fn before_map(&self, f: &SparsePoly, step: &PathStep) -> SparsePoly {
        let c: Vec<u64> = step.q.iter().map(|&q| step.p.gcd(&q)).collect();
        let p_i: Vec<u64> = c.iter().map(|&ck| step.p / ck).collect();
        let l = p_i.iter().fold(1u64, |a, &b| a.lcm(&b));
        let z_weight: u64 =
            self.weight.iter().zip(&step.q).zip(&p_i).map(|((w, q), p)| w * (l / p) * q / step.p.gcd(q)).sum();
        SparsePoly::from_terms(
            f.dim(),
            f.terms()
                .filter(|(e, _)| l * self.weight_of(&e.alpha) + z_weight * (e.beta as u64) < l * self.bound)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Precision after `x_i -> y_i^{p_i}` (and the `z` substitution, which
    /// only raises weights) followed by division by `y^content`.
    pub fn after_map(&self, p_i: &[u64], content: &[u64]) -> Option<Precision> {
        let l = p_i.iter().fold(1u64, |a, &b| a.lcm(&b));
        let weight: Vec<u64> = self.weight.iter().zip(p_i).map(|(w, p)| w * (l / p)).collect();
        let used: u64 = weight.iter().zip(content).map(|(w, c)| w * c).sum();
        let bound = (l * self.bound).checked_sub(used).filter(|&b| b > 0)?;
        let g = weight.iter().fold(0u64, |a, &b| a.gcd(&b));
        Some(Precision { weight: weight.iter().map(|w| w / g).collect(), bound: bound.div_ceil(g) })
    }
}

/// `h = c x^q` when the edge from the apex to the shadow vertex `v` is
/// `x^n (z - h)^order`.
fn eliminable_towards(f: &SparsePoly, n: &[u32], order: u32, v: &[Rat]) -> Option<SparsePoly> {
    let ord = rat(order as i64);
    let mut q = Vec::with_capacity(n.len());
    for (vk, &nk) in v.iter().zip(n) {
        let s = (vk.clone() - rat(nk as i64)) / ord.clone();
        if !s.is_integer() || s.is_negative() {
            return None;
        }
        q.push(s.to_integer().to_u32()?);
    }
    let point = |j: u32| ExpVec::new(n.iter().zip(&q).map(|(&a, &b)| a + j * b).collect(), order - j);
    let c0 = f.coeff(&point(0));
    let c = -f.coeff(&point(1)) / (ord * c0.clone());
    if c.is_zero() {
        return None;
    }
    let mut binom = BigInt::one();
    let mut pw = Rat::one();
    for j in 0..=order {
        if f.coeff(&point(j)) != c0.clone() * Rat::from_integer(binom.clone()) * pw.clone() {
            return None;
        }
        binom = binom * BigInt::from(order - j) / BigInt::from(j + 1);
        pw *= -c.clone();
    }
    let alpha = q.to_vec();
    Some(SparsePoly::monomial(f.dim(), ExpVec::new(alpha, 0), c))
}

/// Series root of `d^{order-1} g / dz^{order-1}`, which has regular order
/// one: the shift that removes the `z^{order-1}` coefficient.
fn tschirnhausen_root(g: &SparsePoly, order: u32, pr: &Precision) -> Result<SparsePoly> {
    let n = g.x_content();
    let mut d = g.div_monomial(&ExpVec::new(n, 0)).expect("content divides");
    for _ in 1..order {
        d = d.partial_z();
    }
    let mut h = SparsePoly::zero(g.dim());
    // Newton's iteration doubles the known weight each round, so the
    // working precision doubles with it.
    let least = pr.weight.iter().copied().filter(|&w| w > 0).min().unwrap_or(1);
    let mut cur = Precision { weight: pr.weight.clone(), bound: (2 * least).min(pr.bound) };
    for _ in 0..128 {
        let (r, slope) = cur.eval_with_derivative(&d, &h);
        if r.is_zero() {
            if cur.bound == pr.bound {
                return Ok(h);
            }
        } else {
            let inv = cur
                .inverse(&slope)
                .ok_or_else(|| Error::Internal("derivative of order one vanishes at the origin".into()))?;
            h = h.sub(&cur.mul(&r, &inv));
        }
        cur.bound = (2 * cur.bound).min(pr.bound);
    }
    Err(Error::Internal("series root did not converge".into()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suitable {
    pub poly: SparsePoly,
    pub shifts: Vec<SparsePoly>,
    pub precision: Option<Precision>,
    /// Set when this call switched to truncated series.
    pub entered_series: bool,
    /// The exact polynomial and shifts at the switch, for retries at a
    /// larger scale.
    pub before_series: Option<(SparsePoly, Vec<SparsePoly>)>,
}

/// Shadows with several vertices before the switch to truncated series.
const EXACT_MANY_ELIMINATIONS: usize = 0;

/// [`ensure_suitable`], extended past shadows with several vertices: an
/// eliminable edge from the apex to one of them is eliminated as well. When
/// that repeats, the shift is a series. It is then taken as the root of the
/// `(order-1)`-th z-derivative, modulo total degree `scale (2 W + 8)` with
/// `W` the largest weight of a vertex that cannot be eliminated, and the
/// polynomial stays truncated from then on.
pub fn make_suitable(f: &SparsePoly, budget: usize, precision: Option<Precision>, scale: u64) -> Result<Suitable> {
    let mut out = Suitable {
        poly: match &precision {
            Some(pr) => pr.truncate(f),
            None => f.clone(),
        },
        shifts: Vec::new(),
        precision,
        entered_series: false,
        before_series: None,
    };
    let mut many_eliminations = 0;
    loop {
        let g = &out.poly;
        let (n, order, _) = g.content_and_order()?;
        let minima = shadow_minima(g, &n, order);
        let mut series_weight = None;
        let h = match minima.len() {
            0 => None,
            1 => {
                let (steps, _, _, _) = path_geometry(g)?;
                steps.first().and_then(|s| eliminable(g, s))
            }
            _ => {
                let mut found = None;
                let mut genuine = Rat::zero();
                let mut widest = Rat::zero();
                let unit = Precision::uniform(g.dim(), 0);
                for (v, _) in &minima {
                    let w = unit.rat_weight(v);
                    widest = widest.max(w.clone());
                    match eliminable_towards(g, &n, order, v) {
                        Some(h) => {
                            found.get_or_insert(h);
                        }
                        None => genuine = genuine.max(w),
                    }
                }
                if found.is_some() {
                    many_eliminations += 1;
                    if many_eliminations > EXACT_MANY_ELIMINATIONS {
                        let w = if genuine.is_zero() { widest } else { genuine };
                        series_weight = Some(w.ceil().to_integer().to_u64().unwrap_or(u64::MAX / 8));
                    }
                }
                found
            }
        };
        let Some(h) = h else {
            return Ok(out);
        };
        if out.shifts.len() >= budget {
            return Err(Error::EliminationBudgetExceeded { budget });
        }
        if let Some(w) = series_weight {
            if out.precision.is_none() {
                out.precision = Some(Precision::uniform(g.dim(), scale * (2 * w + 8)));
                out.entered_series = true;
                out.before_series = Some((g.clone(), out.shifts.clone()));
            }
            let pr = out.precision.clone().expect("set above");
            let known = pr.truncate(g);
            let h = tschirnhausen_root(&known, order, &pr)?;
            if h.is_zero() {
                return Ok(out);
            }
            out.poly = pr.shift_z(&known, &h);
            out.shifts.push(h);
            continue;
        }
        let shifted = out.poly.shift_z(&h)?;
        out.poly = match &out.precision {
            Some(pr) => pr.truncate(&shifted),
            None => shifted,
        };
        out.shifts.push(h);
    }
}

/// Whether every point that decides the path of `g` lies well inside the
/// known part: weights below half the bound.
pub fn precision_suffices(g: &SparsePoly, pr: &Precision) -> Result<bool> {
    let half = Rat::new(BigInt::from(pr.bound), BigInt::from(2));
    let inside = |alpha: &[u32]| rat(pr.weight_of(alpha) as i64) < half;
    let (n, order, _) = g.content_and_order()?;
    let minima = shadow_minima(g, &n, order);
    if minima.len() > 1 {
        return Ok(minima.iter().all(|(v, _)| pr.rat_weight(v) < half));
    }
    if minima.is_empty() {
        return Ok(true);
    }
    let (steps, _, terminal, _) = path_geometry(g)?;
    if !steps.iter().all(|s| inside(&s.lower.alpha)) {
        return Ok(false);
    }
    if terminal == Terminal::Nw3 {
        let last = &steps.last().expect("a path before a shadowed terminal").lower;
        return Ok(shadow_minima(g, &last.alpha, last.beta).iter().all(|(v, _)| pr.rat_weight(v) < half));
    }
    Ok(true)
}

/// Budget from `NTREE_ELIM_BUDGET`, falling back to the default.
pub fn budget_from_env() -> usize {
    std::env::var("NTREE_ELIM_BUDGET").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_ELIM_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::rat_frac;

    fn p(s: &str, d: usize) -> SparsePoly {
        SparsePoly::parse(s, d).unwrap()
    }

    #[test]
    fn status() {
        match nu_status(&p("z^2 - x1^3", 1)).unwrap() {
            NuStatus::OneVertex { v, .. } => assert_eq!(v, vec![rat(3)]),
            s => panic!("{s:?}"),
        }
        assert_eq!(nu_status(&p("z^2 - x1^3 - x2^3", 2)).unwrap(), NuStatus::Many);
        assert_eq!(nu_status(&p("z^2", 1)).unwrap(), NuStatus::Void);
    }

    #[test]
    fn paths() {
        let r = polygonal_path(&p("(z^2-x1^3)*(z^3-x1^2)", 1)).unwrap();
        let data: Vec<_> = r.steps.iter().map(|s| (s.q.clone(), s.p, s.n.clone())).collect();
        assert_eq!(data, vec![(vec![2], 3, vec![10]), (vec![3], 2, vec![10])]);
        assert_eq!(r.terminal, Terminal::Nw1);

        let r = polygonal_path(&p("z^2 - x1^2*x2^3", 2)).unwrap();
        assert_eq!(r.steps.len(), 1);
        assert_eq!((r.steps[0].q.clone(), r.steps[0].p, r.steps[0].n.clone()), (vec![2, 3], 2, vec![4, 6]));
        assert_eq!(r.terminal, Terminal::Nw1);

        let r = polygonal_path(&p("(z^7-x1^2)^2*(z^3-x1^5*x2*x3)+x1^10*x2*x3", 3)).unwrap();
        assert_eq!((r.steps[0].q.clone(), r.steps[0].p), (vec![2, 0, 0], 7));
        // the second apex still has a single dominating shadow vertex
        assert_eq!((r.steps[1].q.clone(), r.steps[1].p), (vec![5, 1, 1], 3));
        assert_eq!(r.terminal, Terminal::Nw1);

        assert_eq!(polygonal_path(&p("z^2 - x1^3 - x2^3", 2)), Err(Error::NuStatusMany));
    }

    #[test]
    fn black_box_terminal() {
        let r = polygonal_path(&p("z^4 + x1*x2*z^2 + x1^4*x2^2 + x1^2*x2^4", 2)).unwrap();
        assert_eq!((r.steps[0].q.clone(), r.steps[0].p), (vec![1, 1], 2));
        assert_eq!(r.terminal, Terminal::Nw3);
        assert_eq!(r.terminal_order, 2);
    }

    #[test]
    fn edge_polys() {
        let f = p("z^2 - x1^3", 1);
        let path = polygonal_path(&f).unwrap();
        let e = edge_polynomial(&f, &path.steps[0]).unwrap();
        assert_eq!(e.roots, vec![(rat(1), 1)]);
        assert_eq!(e.face, f);

        let f = p("(z^2 - x1^3)^2", 1);
        let path = polygonal_path(&f).unwrap();
        assert_eq!(path.steps[0].roots, vec![(rat(1), 2)]);

        let f = p("(z^2 - x1^3)*(z^2 - 2*x1^3)", 1);
        let e = edge_polynomial(&f, &polygonal_path(&f).unwrap().steps[0]).unwrap();
        assert_eq!(e.roots, vec![(rat(1), 1), (rat(2), 1)]);
        assert_eq!(e.one_var, vec![rat(2), rat(-3), rat(1)]);

        let f = p("z^2 - 2*x1^2", 1);
        assert!(matches!(polygonal_path(&f), Err(Error::NonRationalRoots { .. })));
    }

    #[test]
    fn roots_of_univariate() {
        // (s - 1/2)^2 (s + 3)(s^2 + 1)
        let c = vec![rat_frac(3, 4), rat_frac(-11, 4), rat_frac(11, 4), rat_frac(-7, 4), rat(2), rat(1)];
        let (roots, residual) = rational_roots(&c);
        assert_eq!(roots, vec![(rat(-3), 1), (rat_frac(1, 2), 2)]);
        assert_eq!(residual.len(), 3);
        assert_eq!(rational_roots(&[rat(0), rat(0), rat(5)]).0, vec![(rat(0), 2)]);
    }

    #[test]
    fn elimination() {
        let f = p("(z-x1)^2 + x1^5", 1);
        let path = polygonal_path(&f).unwrap();
        assert_eq!(eliminable(&f, &path.steps[0]), Some(p("x1", 1)));
        let f = p("z^2 - x1^3", 1);
        assert_eq!(eliminable(&f, &polygonal_path(&f).unwrap().steps[0]), None);
        let f = p("z*(z - x1)", 1);
        assert_eq!(eliminable(&f, &polygonal_path(&f).unwrap().steps[0]), None);
    }

    #[test]
    fn suitable() {
        let (g, shifts) = ensure_suitable(&p("(z-x1)^2", 1), 64).unwrap();
        assert_eq!(g, p("z^2", 1));
        assert_eq!(shifts, vec![p("x1", 1)]);
        assert_eq!(nu_status(&g).unwrap(), NuStatus::Void);
        let (_, shifts) = ensure_suitable(&p("z^2 - x1^3", 1), 64).unwrap();
        assert!(shifts.is_empty());
        let f = p("(z - x1 - x1^2)^3", 1);
        assert_eq!(ensure_suitable(&f, 1), Err(Error::EliminationBudgetExceeded { budget: 1 }));
        assert_eq!(ensure_suitable(&f, 2).unwrap().0, p("z^3", 1));
    }

    #[test]
    fn several_vertices() {
        let s = make_suitable(&p("(z - x1)^2 - x2^5", 2), 64, None, 1).unwrap();
        assert_eq!(s.shifts, vec![p("x1", 2)]);
        assert_eq!(s.poly, p("z^2 - x2^5", 2));
        assert!(matches!(nu_status(&s.poly).unwrap(), NuStatus::OneVertex { .. }));
        // the root x1/(1 - x1) is a series
        let s = make_suitable(&p("(z*(1 - x1) - x1)^2 - x2^3", 2), 64, None, 1).unwrap();
        assert!(s.entered_series);
        let pr = s.precision.clone().unwrap();
        assert_eq!(pr.bound, 14);
        assert_eq!(s.shifts.last().unwrap().len(), 13);
        match nu_status(&s.poly).unwrap() {
            NuStatus::OneVertex { v, .. } => assert_eq!(v, vec![rat(0), rat(3)]),
            other => panic!("{other:?}"),
        }
        assert!(precision_suffices(&s.poly, &pr).unwrap());
    }

    #[test]
    fn precision_under_maps() {
        let pr = Precision::uniform(2, 50);
        let next = pr.after_map(&[1, 2], &[14, 14]).unwrap();
        assert_eq!(next, Precision { weight: vec![2, 1], bound: 58 });
        assert_eq!(pr.after_map(&[1, 1], &[30, 30]), None);
        let f = p("z^3 + x1^50 + x1^20*z + x2^10", 2);
        assert_eq!(pr.truncate(&f), p("z^3 + x1^20*z + x2^10", 2));
    }
}
