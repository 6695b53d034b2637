//! Coloured trees, the resultant path rule, quasi-ordinarity and the
//! discriminant, each paired with a determinant oracle.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::diagram::PathStep;
use crate::error::{Error, Result};
use crate::pgood::{is_pgood, to_pgood};
use crate::polyring::{Rat, SparsePoly};
use crate::tree::{
    build_tree, build_tree_of_product, Branch, BuildOptions, Color, End, EndKind, Line, NewtonTree, VertexStage,
};

#[derive(Debug, Clone, PartialEq)]
pub struct ColoredTree {
    pub tree: NewtonTree,
    /// Stage data of every vertex, in depth-first order.
    pub stages: Vec<VertexStage>,
}

pub fn build_colored_tree(f: &SparsePoly, g: &SparsePoly) -> Result<ColoredTree> {
    build_colored_tree_with(f, g, BuildOptions::from_env())
}

pub fn build_colored_tree_with(f: &SparsePoly, g: &SparsePoly, opts: BuildOptions) -> Result<ColoredTree> {
    let (tree, stats) = build_tree_of_product(f, g, opts)?;
    Ok(ColoredTree { tree, stages: stats.stages })
}

pub fn is_separated(ct: &ColoredTree) -> bool {
    ct.tree.ends().iter().all(|(e, _)| e.is_dead() || matches!(e.color, Some(Color::Blue) | Some(Color::Red)))
}

/// Terms of `h` on the face cut out by `p α_k + q_k β`, as the coefficients
/// of a polynomial in `s = z^p / x^q`, together with the lowest `β`.
fn part_face(h: &SparsePoly, step: &PathStep) -> Result<(Vec<Rat>, u32)> {
    let d = step.q.len();
    let weight = |alpha: &[u32], beta: u32, k: usize| step.p * alpha[k] as u64 + step.q[k] * beta as u64;
    let mins: Vec<u64> =
        (0..d).map(|k| h.terms().map(|(e, _)| weight(&e.alpha, e.beta, k)).min().unwrap_or(0)).collect();
    let face: Vec<(u32, Rat)> = h
        .terms()
        .filter(|(e, _)| (0..d).all(|k| weight(&e.alpha, e.beta, k) == mins[k]))
        .map(|(e, c)| (e.beta, c.clone()))
        .collect();
    let Some(low) = face.iter().map(|(b, _)| *b).min() else {
        return Err(Error::Precondition("part has no face on this edge".into()));
    };
    let top = face.iter().map(|(b, _)| *b).max().expect("nonempty");
    let p = step.p as u32;
    let mut coeffs = vec![Rat::zero(); ((top - low) / p) as usize + 1];
    for (b, c) in face {
        if (b - low) % p != 0 {
            return Err(Error::Internal("face points off the edge lattice".into()));
        }
        coeffs[((b - low) / p) as usize] += c;
    }
    Ok((coeffs, low))
}

fn trim(mut a: Vec<Rat>) -> Vec<Rat> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

/// Remainder of `a` by `b`, coefficients in ascending order.
fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor").clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().expect("nonempty").clone() / &lb;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd_degree(a: &[Rat], b: &[Rat]) -> usize {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn degree(a: &[Rat]) -> usize {
    trim(a.to_vec()).len().saturating_sub(1)
}

fn derivative(a: &[Rat]) -> Vec<Rat> {
    a.iter().enumerate().skip(1).map(|(i, c)| c * Rat::from_integer((i as i64).into())).collect()
}

/// z-degree of the part of the face of `f` not shared with the face of `g`.
pub fn separation_order(f: &SparsePoly, g: &SparsePoly, step: &PathStep) -> Result<u64> {
    let (ff, _) = part_face(f, step)?;
    let (gf, _) = part_face(g, step)?;
    let shared = poly_gcd_degree(&ff, &gf);
    Ok(step.p * (degree(&ff) - shared) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Vertex(usize),
    End(usize),
}

#[derive(Default)]
struct Graph {
    // near-vertex decoration of each incident edge
    adj: BTreeMap<Node, Vec<(Node, Vec<u64>)>>,
    ends: Vec<End>,
    // vertices the line of each vertex hangs from, outermost first
    hang: Vec<Vec<usize>>,
    c: Vec<Vec<u64>>,
}

impl Graph {
    fn edge(&mut self, a: Node, da: Vec<u64>, b: Node, db: Vec<u64>) {
        self.adj.entry(a).or_default().push((b, da));
        self.adj.entry(b).or_default().push((a, db));
    }

    fn end(&mut self, e: &End) -> Node {
        self.ends.push(e.clone());
        Node::End(self.ends.len() - 1)
    }

    fn line(&mut self, line: &Line, above: Option<(Node, Vec<u64>)>, hang: &[usize]) {
        let d = line.vertices.first().map_or(0, |v| v.q.len());
        let mut above = above;
        for v in &line.vertices {
            let id = self.hang.len();
            self.hang.push(hang.to_vec());
            self.c.push(v.c.clone());
            let me = Node::Vertex(id);
            if let Some((node, dec)) = above.take() {
                self.edge(node, dec, me, v.big_q.clone());
            }
            let mut inner = hang.to_vec();
            inner.push(id);
            for ch in &v.children {
                match ch {
                    Branch::End(e) => {
                        let en = self.end(e);
                        self.edge(me, vec![1; d], en, Vec::new());
                    }
                    Branch::Line(l) => self.line(l, Some((me, vec![1; d])), &inner),
                }
            }
            above = Some((me, vec![v.p; d]));
        }
        let en = self.end(&line.bottom);
        if let Some((node, dec)) = above {
            self.edge(node, dec, en, Vec::new());
        }
    }
}

/// Exponent of each `x_i` in `res_z(f, g)` read off the coloured tree.
pub fn resultant_exponent(ct: &ColoredTree) -> Result<Vec<u64>> {
    if !is_separated(ct) {
        return Err(Error::Precondition("coloured tree is not separated".into()));
    }
    let t = &ct.tree;
    let d = t.dim;
    let mut g = Graph::default();
    let top = g.end(&End::arrow(0));
    g.line(&t.root, Some((top, Vec::new())), &[]);
    let live = |color: Color| -> Vec<usize> {
        g.ends
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, e)| !e.is_dead() && e.color == Some(color))
            .map(|(i, _)| i)
            .collect()
    };
    let (blue, red) = (live(Color::Blue), live(Color::Red));
    if blue.len() != 1 || red.len() != 1 {
        return Err(Error::Precondition(format!(
            "need exactly one non-dead end of each colour, found {} blue and {} red",
            blue.len(),
            red.len()
        )));
    }
    if g.ends[blue[0]].kind == EndKind::BlackBox || g.ends[red[0]].kind == EndKind::BlackBox {
        return Err(Error::Precondition("an end is a black box".into()));
    }
    // path by depth-first search from the blue end
    let (from, to) = (Node::End(blue[0]), Node::End(red[0]));
    let mut parent: BTreeMap<Node, Node> = BTreeMap::new();
    let mut stack = vec![from];
    parent.insert(from, from);
    while let Some(n) = stack.pop() {
        for (m, _) in g.adj.get(&n).map(|v| v.as_slice()).unwrap_or(&[]) {
            if !parent.contains_key(m) {
                parent.insert(*m, n);
                stack.push(*m);
            }
        }
    }
    if !parent.contains_key(&to) {
        return Err(Error::Internal("tree graph is disconnected".into()));
    }
    let mut path = vec![to];
    while *path.last().expect("nonempty") != from {
        path.push(parent[path.last().expect("nonempty")]);
    }
    let mut out = vec![1u64; d];
    for &e in [blue[0], red[0]].iter() {
        out.iter_mut().for_each(|x| *x *= g.ends[e].decoration);
    }
    let mut first: Option<usize> = None;
    for w in 1..path.len() - 1 {
        let Node::Vertex(id) = path[w] else {
            return Err(Error::Internal("path passes through an end".into()));
        };
        if first.is_none_or(|f| g.hang[id].len() < g.hang[f].len()) {
            first = Some(id);
        }
        for (m, dec) in &g.adj[&path[w]] {
            if *m != path[w - 1] && *m != path[w + 1] {
                for k in 0..d {
                    out[k] *= dec[k];
                }
            }
        }
    }
    if let Some(f) = first {
        for &w in &g.hang[f] {
            for k in 0..d {
                out[k] *= g.c[w][k];
            }
        }
    }
    Ok(out)
}

/// Exponent vector of `res_z(f, g)` when it is a monomial times a unit.
pub fn resultant_oracle(f: &SparsePoly, g: &SparsePoly) -> Result<Option<Vec<u64>>> {
    let r = f.sylvester_resultant(g)?;
    if r.is_zero() {
        return Ok(None);
    }
    Ok(r.monomial_unit_split()?.map(|v| v.iter().map(|&x| x as u64).collect()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QoVerdict {
    QuasiOrdinary,
    BlackBox { depth: usize },
    Arrow { decoration: u64 },
}

impl std::fmt::Display for QoVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QoVerdict::QuasiOrdinary => write!(f, "quasi-ordinary"),
            QoVerdict::BlackBox { depth } => write!(f, "not quasi-ordinary: black box at depth {depth}"),
            QoVerdict::Arrow { decoration } => write!(f, "not quasi-ordinary: arrow decorated ({decoration})"),
        }
    }
}

impl QoVerdict {
    pub fn is_qo(&self) -> bool {
        matches!(self, QoVerdict::QuasiOrdinary)
    }
}

fn first_black_box(line: &Line, depth: usize) -> Option<usize> {
    for v in &line.vertices {
        for ch in &v.children {
            match ch {
                Branch::End(e) if e.kind == EndKind::BlackBox => return Some(depth + 1),
                Branch::Line(l) => {
                    if let Some(d) = first_black_box(l, depth + 1) {
                        return Some(d);
                    }
                }
                Branch::End(_) => {}
            }
        }
    }
    (line.bottom.kind == EndKind::BlackBox).then_some(depth)
}

pub fn qo_verdict(t: &NewtonTree) -> Result<QoVerdict> {
    if let Some(depth) = first_black_box(&t.root, 0) {
        return Ok(QoVerdict::BlackBox { depth });
    }
    let g = to_pgood(t)?;
    if let Some((e, _)) = g.ends().into_iter().find(|(e, _)| e.decoration > 1) {
        return Ok(QoVerdict::Arrow { decoration: e.decoration });
    }
    Ok(QoVerdict::QuasiOrdinary)
}

pub fn qo_by_tree(f: &SparsePoly) -> Result<bool> {
    let t = build_tree(f, BuildOptions::from_env())?;
    Ok(qo_verdict(&t)?.is_qo())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QoOracle {
    QuasiOrdinary(Vec<u64>),
    NotQuasiOrdinary,
    NonReduced,
}

pub fn qo_oracle(f: &SparsePoly) -> Result<QoOracle> {
    if f.z_degree().unwrap_or(0) < 1 {
        return Err(Error::Precondition("z-degree must be at least 1".into()));
    }
    let disc = f.sylvester_resultant(&f.partial_z())?;
    if disc.is_zero() {
        return Ok(QoOracle::NonReduced);
    }
    Ok(match disc.monomial_unit_split()? {
        Some(v) => QoOracle::QuasiOrdinary(v.iter().map(|&x| x as u64).collect()),
        None => QoOracle::NotQuasiOrdinary,
    })
}

/// Discriminant exponent from a P-good tree with only (0)- and (1)-arrows.
pub fn discriminant_exponent(t: &NewtonTree) -> Result<Vec<u64>> {
    if !is_pgood(t)? {
        return Err(Error::NotPGood);
    }
    if t.top.iter().any(|&x| x != 0) {
        return Err(Error::Precondition("top arrow must carry zero content".into()));
    }
    let d = t.dim;
    let mut plus = vec![0u64; d];
    let mut minus = vec![0u64; d];
    fn walk(line: &Line, scale: &[u64], plus: &mut [u64], minus: &mut [u64]) -> Result<()> {
        let n = line.vertices.len();
        for (i, v) in line.vertices.iter().enumerate() {
            let np: Vec<u64> = scale.iter().zip(&v.global_n).map(|(a, b)| a * b).collect();
            let delta = v.valency() as u64;
            for k in 0..np.len() {
                plus[k] += (delta - 2) * np[k];
            }
            let leaf = i + 1 == n && line.bottom.kind == EndKind::Arrow && line.bottom.decoration == 0;
            if leaf {
                for k in 0..np.len() {
                    if !np[k].is_multiple_of(v.p) {
                        return Err(Error::Internal(format!("N' = {np:?} not divisible by p = {}", v.p)));
                    }
                    minus[k] += np[k] / v.p;
                }
            }
            let inner: Vec<u64> = scale.iter().zip(&v.c).map(|(a, b)| a * b).collect();
            for ch in &v.children {
                if let Branch::Line(l) = ch {
                    walk(l, &inner, plus, minus)?;
                }
            }
        }
        Ok(())
    }
    walk(&t.root, &vec![1; d], &mut plus, &mut minus)?;
    plus.iter()
        .zip(&minus)
        .map(|(a, b)| a.checked_sub(*b).ok_or_else(|| Error::Internal("negative discriminant exponent".into())))
        .collect()
}

/// Builds, normalises and applies the discriminant formula.
pub fn discriminant_of(f: &SparsePoly) -> Result<Vec<u64>> {
    let t = build_tree(f, BuildOptions::from_env())?;
    match qo_verdict(&t)? {
        QoVerdict::QuasiOrdinary => discriminant_exponent(&to_pgood(&t)?),
        v => Err(Error::Precondition(v.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarVertex {
    /// Index into the coloured tree's depth-first vertex order.
    pub vertex: usize,
    pub p: u64,
    /// Distinct roots of the face of `f`.
    pub k: usize,
    pub leaf: bool,
    pub separation_order: u64,
}

impl PolarVertex {
    pub fn expected(&self) -> Option<u64> {
        (!self.leaf).then_some(self.k as u64 * self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarReport {
    pub vertices: Vec<PolarVertex>,
    /// Vertices of the polar alone lying above a part of `f` that still
    /// meets `z`, i.e. on an edge that is not a leaf edge.
    pub separations_on_inner_edges: usize,
}

impl PolarReport {
    pub fn holds(&self) -> bool {
        self.separations_on_inner_edges == 0
            && self.vertices.iter().all(|v| v.expected().is_none_or(|e| e == v.separation_order))
    }
}

pub fn polar_separation_report(f: &SparsePoly) -> Result<PolarReport> {
    if !qo_by_tree(f)? {
        return Err(Error::Precondition("polynomial is not quasi-ordinary".into()));
    }
    let ct = build_colored_tree(f, &f.partial_z())?;
    let mut vertices = Vec::new();
    let mut inner = 0;
    for (i, st) in ct.stages.iter().enumerate() {
        let (face, low) = part_face(&st.f, &st.step)?;
        if degree(&face) == 0 {
            if low > 0 {
                inner += 1;
            }
            continue;
        }
        let k = degree(&face) - poly_gcd_degree(&face, &derivative(&face));
        vertices.push(PolarVertex {
            vertex: i,
            p: st.step.p,
            k,
            leaf: low == 0,
            separation_order: separation_order(&st.g, &st.f, &st.step)?,
        });
    }
    Ok(PolarReport { vertices, separations_on_inner_edges: inner })
}
