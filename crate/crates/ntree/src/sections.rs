//! Transversal sections: trees of `f` with some `x_i` treated as a generic
//! constant, the curve sections, reconstruction of one-arrow trees, and a
//! numeric cross-check by specialisation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::rational_roots;
use crate::error::{Error, Result};
use crate::pgood::to_pgood;
use crate::polyring::{pow_rat, ExpVec, Rat, SparsePoly};
use crate::process::gcd_u;
use crate::tree::{build_tree, compute_decorations, Branch, BuildOptions, End, EndKind, Line, NewtonTree, Vertex};
use crate::univariate::{is_squarefree, poly_divmod, poly_gcd};

/// Trees with multiplicities. For [`section_forest`] `variable` is the
/// sectioned index, for [`curve_sections`] the kept one (both 1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionForest {
    pub variable: usize,
    pub entries: Vec<(NewtonTree, usize)>,
}

#[derive(Serialize, Deserialize)]
struct JsonEntry {
    count: usize,
    tree: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct JsonForest {
    variable: usize,
    entries: Vec<JsonEntry>,
}

impl SectionForest {
    pub fn to_json(&self) -> String {
        let jf = JsonForest {
            variable: self.variable,
            entries: self.entries.iter().map(|(t, c)| JsonEntry { count: *c, tree: t.to_json_value() }).collect(),
        };
        serde_json::to_string(&jf).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<SectionForest> {
        let jf: JsonForest = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        let entries = jf
            .entries
            .iter()
            .map(|e| Ok((NewtonTree::from_json_value(&e.tree)?, e.count)))
            .collect::<Result<Vec<_>>>()?;
        if entries.iter().any(|(_, c)| *c == 0) {
            return Err(Error::Json("forest counts must be positive".into()));
        }
        Ok(SectionForest { variable: jf.variable, entries })
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|(_, c)| c).sum()
    }
}

fn drop_index(v: &[u64], i: usize) -> Vec<u64> {
    v.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, x)| *x).collect()
}

/// Adds `p * delta` to the vertical `N` of the first vertex of a line.
fn offset(branch: Branch, delta: &[u64]) -> Branch {
    match branch {
        Branch::Line(mut l) => {
            let v = &mut l.vertices[0];
            for (n, d) in v.vertical_n.iter_mut().zip(delta) {
                *n += v.p * d;
            }
            Branch::Line(l)
        }
        e => e,
    }
}

fn sec_branch(b: &Branch, i: usize) -> Result<Vec<Branch>> {
    match b {
        Branch::End(e) => Ok(vec![Branch::End(End { color: None, ..e.clone() })]),
        Branch::Line(l) => sec_line(l, i),
    }
}

/// The branches replacing `line` in the section along `x_i` (0-based).
fn sec_line(line: &Line, i: usize) -> Result<Vec<Branch>> {
    let h = line.vertices.iter().take_while(|v| v.q[i] == v.q.iter().sum::<u64>()).count();
    let mut out = Vec::new();
    for v in &line.vertices[..h] {
        let n = drop_index(&v.vertical_n, i);
        if n.iter().any(|x| x % v.p != 0) {
            return Err(Error::Internal("vertical N of a z-free face is not divisible by p".into()));
        }
        let delta: Vec<u64> = n.iter().map(|x| x / v.p).collect();
        for ch in &v.children {
            let pieces = sec_branch(ch, i)?;
            for _ in 0..v.p {
                out.extend(pieces.iter().cloned().map(|b| offset(b, &delta)));
            }
        }
    }
    let mut vertices: Vec<Vertex> = Vec::new();
    for v in &line.vertices[h..] {
        let q = drop_index(&v.q, i);
        let d = q.iter().fold(v.p, |a, &x| gcd_u(a, x));
        let n = drop_index(&v.vertical_n, i);
        let mut sv = Vertex::bare(q.iter().map(|x| x / d).collect(), v.p / d, n.iter().map(|x| x / d).collect());
        for ch in &v.children {
            let pieces = sec_branch(ch, i)?;
            for _ in 0..d {
                sv.children.extend(pieces.iter().cloned());
            }
        }
        match vertices.last_mut() {
            Some(prev) if prev.q == sv.q && prev.p == sv.p => {
                if prev.vertical_n != sv.vertical_n {
                    return Err(Error::Internal("merged section vertices disagree on N".into()));
                }
                prev.children.append(&mut sv.children);
            }
            _ => vertices.push(sv),
        }
    }
    let bottom = End { color: None, ..line.bottom.clone() };
    if !vertices.is_empty() {
        out.push(Branch::Line(Line { vertices, bottom, color: None, shifts: Vec::new() }));
    } else if h == 0 || !bottom.is_dead() {
        out.push(Branch::End(bottom));
    }
    Ok(out)
}

fn merge(trees: impl IntoIterator<Item = (NewtonTree, usize)>) -> Vec<(NewtonTree, usize)> {
    let mut acc: BTreeMap<String, (NewtonTree, usize)> = BTreeMap::new();
    for (t, c) in trees {
        let t = t.canonical();
        acc.entry(t.to_json()).or_insert_with(|| (t, 0)).1 += c;
    }
    acc.into_values().collect()
}

/// The trees of the section treating `x_i` (1-based) as a generic constant.
pub fn section_forest(t: &NewtonTree, i: usize) -> Result<SectionForest> {
    if i == 0 || i > t.dim || t.dim < 2 {
        return Err(Error::Precondition(format!("cannot section variable {i} of a {}-variable tree", t.dim)));
    }
    if t.has_black_box() {
        return Err(Error::BlackBox);
    }
    let top = drop_index(&t.top, i - 1);
    let mut trees = Vec::new();
    for piece in sec_line(&t.root, i - 1)? {
        let root = match piece {
            Branch::Line(l) => l,
            Branch::End(e) => Line::terminal(e),
        };
        let mut tree = NewtonTree { dim: t.dim - 1, top: top.clone(), root };
        compute_decorations(&mut tree)?;
        trees.push((tree, 1));
    }
    Ok(SectionForest { variable: i, entries: merge(trees) })
}

/// For each `j`, the forest of one-variable trees keeping only `x_j`.
pub fn curve_sections(t: &NewtonTree) -> Result<Vec<SectionForest>> {
    (1..=t.dim)
        .map(|j| {
            let mut current = vec![(t.clone(), 1usize)];
            // remove from the highest index down so lower indices stay put
            for i in (1..=t.dim).rev().filter(|&i| i != j) {
                let mut next = Vec::new();
                for (tree, c) in &current {
                    for (s, k) in section_forest(tree, i)?.entries {
                        next.push((s, c * k));
                    }
                }
                current = merge(next);
            }
            Ok(SectionForest { variable: j, entries: merge(current) })
        })
        .collect()
}

struct Level {
    q: u64,
    p: u64,
    k: usize,
}

/// Vertex chain of a curve-section tree whose vertices carry identical
/// horizontal branches.
fn parse_chain(t: &NewtonTree) -> Result<(Vec<Level>, End)> {
    let multi = |m: &str| Error::UnsupportedMultiArrow(m.to_string());
    let mut levels = Vec::new();
    let mut line = &t.root;
    loop {
        match line.vertices.len() {
            0 => return Ok((levels, line.bottom.clone())),
            1 => {}
            _ => return Err(multi("a section line carries several vertices")),
        }
        if !(line.bottom.kind == EndKind::Arrow && line.bottom.is_dead()) {
            return Err(multi("a section line ends in a non-dead end"));
        }
        let v = &line.vertices[0];
        let first = &v.children[0];
        let key = |b: &Branch| match b {
            Branch::Line(l) => serde_json::to_string(&NewtonTree { dim: 1, top: vec![0], root: l.clone() }.canonical())
                .expect("serializable"),
            Branch::End(e) => serde_json::to_string(e).expect("serializable"),
        };
        let k0 = key(first);
        if v.children.iter().any(|b| key(b) != k0) {
            return Err(multi("horizontal branches of a section vertex differ"));
        }
        levels.push(Level { q: v.q[0], p: v.p, k: v.children.len() });
        match first {
            Branch::Line(l) => line = l,
            Branch::End(e) => {
                if e.kind != EndKind::Arrow || e.is_dead() {
                    return Err(multi("chain does not end in a live arrow"));
                }
                return Ok((levels, e.clone()));
            }
        }
    }
}

/// Rebuilds the tree of a polynomial with a single non-dead arrow from its
/// curve sections.
pub fn reconstruct(forests: &[SectionForest]) -> Result<NewtonTree> {
    let d = forests.len();
    if d == 0 {
        return Err(Error::InconsistentSections("no sections given".into()));
    }
    let bad = |m: String| Error::InconsistentSections(m);
    let mut chains = Vec::with_capacity(d);
    let mut pending = Vec::with_capacity(d);
    let mut top = Vec::with_capacity(d);
    for (j, f) in forests.iter().enumerate() {
        if f.entries.len() != 1 {
            return Err(Error::UnsupportedMultiArrow(format!(
                "section {} has {} distinct trees",
                j + 1,
                f.entries.len()
            )));
        }
        let (t, count) = &f.entries[0];
        if t.dim != 1 {
            return Err(bad(format!("section {} is not a curve section", j + 1)));
        }
        top.push(t.top[0]);
        chains.push(parse_chain(t)?);
        pending.push(*count as u64);
    }
    let mut pos = vec![0usize; d];
    let mut levels: Vec<(Vec<u64>, u64)> = Vec::new();
    while (0..d).any(|j| pos[j] < chains[j].0.len() || pending[j] > 1) {
        let visible: Vec<usize> = (0..d).filter(|&j| pending[j] == 1).collect();
        if visible.is_empty() {
            return Err(bad("no section shows the next vertex".into()));
        }
        let mut p = 1u64;
        for &j in &visible {
            let Some(l) = chains[j].0.get(pos[j]) else {
                return Err(bad(format!("section {} ends early", j + 1)));
            };
            p = p.lcm(&l.p);
        }
        let mut q = vec![0u64; d];
        for j in 0..d {
            if pending[j] == 1 {
                let l = &chains[j].0[pos[j]];
                let dj = p / l.p;
                q[j] = l.q * dj;
                if !(l.k as u64).is_multiple_of(dj) {
                    return Err(bad(format!("section {} has {} branches, not a multiple of {dj}", j + 1, l.k)));
                }
                pending[j] = l.k as u64 / dj;
                pos[j] += 1;
            } else {
                if pending[j] % p != 0 {
                    return Err(bad(format!("bunch of {} in section {} not divisible by {p}", pending[j], j + 1)));
                }
                pending[j] /= p;
            }
        }
        levels.push((q, p));
    }
    let arrow = chains[0].1.decoration;
    if chains.iter().any(|c| c.1.decoration != arrow) {
        return Err(bad("sections disagree on the arrow decoration".into()));
    }
    // z-orders of the stages: the last stage has order p k, each earlier one p times more
    let mut orders = vec![0u64; levels.len()];
    let mut m = arrow;
    for (l, (_, p)) in levels.iter().enumerate().rev() {
        m *= p;
        orders[l] = m;
    }
    let mut line = if levels.is_empty() {
        let bottoms: Vec<&End> = chains.iter().map(|c| &c.1).collect();
        if bottoms.iter().any(|b| *b != bottoms[0]) {
            return Err(bad("vertex-less sections disagree on the arrow".into()));
        }
        Line::terminal(bottoms[0].clone())
    } else {
        let mut child = Branch::End(End::arrow(arrow));
        for (l, (q, p)) in levels.iter().enumerate().rev() {
            let n: Vec<u64> = (0..d).map(|k| if l == 0 { p * top[k] } else { 0 } + q[k] * orders[l]).collect();
            let mut v = Vertex::bare(q.clone(), *p, n);
            v.children.push(child);
            child = Branch::Line(Line { vertices: vec![v], bottom: End::arrow(0), color: None, shifts: Vec::new() });
        }
        match child {
            Branch::Line(l) => l,
            Branch::End(_) => unreachable!("at least one level"),
        }
    };
    line.shifts.clear();
    let mut t = NewtonTree { dim: d, top, root: line };
    compute_decorations(&mut t)?;
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crosscheck {
    pub matched: bool,
    pub tries: usize,
    /// Canonical P-good trees with counts, from the combinatorial rules.
    pub combinatorial: BTreeMap<String, usize>,
    /// The same from trees built at the roots of the specialisation.
    pub direct: BTreeMap<String, usize>,
}

const CROSSCHECK_TRIES: usize = 3;

fn pgood_key(t: &NewtonTree) -> String {
    match to_pgood(t) {
        Ok(g) => g.canonical_json(),
        Err(e) => format!("error: {e}"),
    }
}

/// Least `L` such that every exponent `q_i / (p_1 ... p_k)` of `x_i` met
/// along a path is a multiple of `1 / L`.
fn section_denominator(t: &NewtonTree, i: usize) -> u64 {
    fn walk(line: &Line, i: usize, above: u64, l: &mut u64) {
        for v in &line.vertices {
            let below = above * v.p;
            *l = l.lcm(&(below / below.gcd(&v.q[i - 1])));
            for ch in &v.children {
                if let Branch::Line(sub) = ch {
                    walk(sub, i, below, l);
                }
            }
        }
    }
    let mut l = 1;
    walk(&t.root, i, 1, &mut l);
    l
}

/// Trees at the points over `x = 0` of `f` with `x_i = c`, keyed by their
/// canonical P-good form.
fn direct_trees(f: &SparsePoly, i: usize, c: &Rat, n_lcm: u32) -> Result<BTreeMap<String, usize>> {
    let fc = f.specialize(i, c);
    let content = fc.x_content();
    let g = fc.div_monomial(&ExpVec::new(content, 0)).expect("content divides");
    let zdeg = g.z_degree().unwrap_or(0) as usize;
    let mut coeffs = vec![Rat::zero(); zdeg + 1];
    for (e, v) in g.terms() {
        if e.alpha.iter().all(|&a| a == 0) {
            coeffs[e.beta as usize] += v;
        }
    }
    let (roots, mut residual) = rational_roots(&coeffs);
    let opts = BuildOptions { simple_irrational: true, ..BuildOptions::from_env() };
    let mut out: BTreeMap<String, usize> = BTreeMap::new();
    let mut keys: Vec<(Rat, String)> = Vec::new();
    for (z0, _) in &roots {
        let shifted = fc.shift_z(&SparsePoly::constant(fc.dim(), z0.clone()))?;
        let key = pgood_key(&build_tree(&shifted, opts)?);
        *out.entry(key.clone()).or_default() += 1;
        keys.push((z0.clone(), key));
    }
    // irrational roots z with z^N = r^N for a rational root r carry r's tree
    let mut seen: Vec<Rat> = Vec::new();
    for (r, key) in &keys {
        if r.is_zero() || residual.len() <= 1 {
            continue;
        }
        let b = pow_rat(r, n_lcm);
        if seen.contains(&b) {
            continue;
        }
        seen.push(b.clone());
        let mut zn = vec![Rat::zero(); n_lcm as usize + 1];
        zn[0] = -b;
        zn[n_lcm as usize] = Rat::one();
        let h = poly_gcd(&residual, &zn);
        if h.len() <= 1 {
            continue;
        }
        *out.entry(key.clone()).or_default() += h.len() - 1;
        loop {
            let (quot, rem) = poly_divmod(&residual, &h);
            if !(rem.len() == 1 && rem[0].is_zero()) {
                break;
            }
            residual = quot;
        }
    }
    if residual.len() > 1 {
        // a simple root is a smooth point, whose tree is a single arrow
        if !is_squarefree(&residual) {
            return Err(Error::NonRationalRoots { residual: format!("{residual:?}") });
        }
        let smooth = SparsePoly::parse("z", fc.dim())?;
        *out.entry(pgood_key(&build_tree(&smooth, opts)?)).or_default() += residual.len() - 1;
    }
    Ok(out)
}

/// Compares [`section_forest`] with trees computed after substituting a
/// power of a pseudorandom integer for `x_i`.
pub fn section_crosscheck(f: &SparsePoly, i: usize, seed: u64) -> Result<Crosscheck> {
    if f.dim() < 2 || i == 0 || i > f.dim() {
        return Err(Error::Precondition("cross-check needs d >= 2 and a valid index".into()));
    }
    let t = build_tree(f, BuildOptions::from_env())?;
    let forest = section_forest(&t, i)?;
    let mut combinatorial: BTreeMap<String, usize> = BTreeMap::new();
    for (s, c) in &forest.entries {
        *combinatorial.entry(pgood_key(s)).or_default() += c;
    }
    let l0 = section_denominator(&t, i) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..CROSSCHECK_TRIES {
        let r: i64 = rng.gen_range(2..=3);
        let (sign, l) = match attempt {
            0 => (1, l0),
            1 => (-1, l0),
            _ => (1, 2 * l0),
        };
        let c = Rat::from_integer(BigInt::from(sign)) * pow_rat(&Rat::from_integer(BigInt::from(r)), l);
        match direct_trees(f, i, &c, l0) {
            Ok(direct) => {
                return Ok(Crosscheck { matched: direct == combinatorial, tries: attempt + 1, combinatorial, direct })
            }
            Err(e) if matches!(e.root_cause(), Error::NonRationalRoots { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetryBudgetExceeded { tries: CROSSCHECK_TRIES })
}
