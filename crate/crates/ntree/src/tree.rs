//! Decorated Newton trees: construction, decorations, JSON and rendering.
//!
//! A tree is stored nested. Each vertical line is a [`Line`] holding its
//! vertices top to bottom and its bottom end; every vertex owns the branches
//! hanging from it by horizontal edges.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::diagram::{
    self, make_suitable, nu_status, polygonal_path_with, precision_suffices, NuStatus, PathStep, Precision, Suitable,
    Terminal,
};
use crate::error::{Error, Result};
use crate::polyring::{format_rat, ExpVec, SparsePoly};
use crate::process::{apply_map, chain_rule_holds, gcd_u, newton_map};

pub const DEFAULT_MAX_DEPTH: usize = 32;
/// Largest multiple of the initial truncation tried for series shifts.
const MAX_SERIES_SCALE: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Blue,
    Red,
    Both,
}

impl Color {
    /// Colour from the orders of the two parts; `None` when both vanish.
    pub fn from_orders(f: u64, g: u64) -> Option<Color> {
        match (f > 0, g > 0) {
            (false, false) => None,
            (true, false) => Some(Color::Blue),
            (false, true) => Some(Color::Red),
            (true, true) => Some(Color::Both),
        }
    }

    pub fn has_blue(self) -> bool {
        matches!(self, Color::Blue | Color::Both)
    }

    pub fn has_red(self) -> bool {
        matches!(self, Color::Red | Color::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum EndKind {
    Arrow,
    BlackBox,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct End {
    pub kind: EndKind,
    pub decoration: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
}

impl End {
    pub fn arrow(k: u64) -> End {
        End { kind: EndKind::Arrow, decoration: k, color: None }
    }

    pub fn black_box(k: u64) -> End {
        End { kind: EndKind::BlackBox, decoration: k, color: None }
    }

    pub fn is_dead(&self) -> bool {
        self.decoration == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub q: Vec<u64>,
    pub p: u64,
    pub vertical_n: Vec<u64>,
    #[serde(rename = "Q")]
    pub big_q: Vec<u64>,
    #[serde(rename = "R")]
    pub r: Vec<u64>,
    pub c: Vec<u64>,
    pub acc_exp: Vec<u64>,
    pub global_n: Vec<u64>,
    pub children: Vec<Branch>,
}

impl Vertex {
    /// A vertex with only vertical data; decorations are filled by
    /// [`compute_decorations`].
    pub fn bare(q: Vec<u64>, p: u64, vertical_n: Vec<u64>) -> Vertex {
        let d = q.len();
        Vertex {
            q,
            p,
            vertical_n,
            big_q: vec![0; d],
            r: vec![0; d],
            c: vec![0; d],
            acc_exp: vec![0; d],
            global_n: vec![0; d],
            children: Vec::new(),
        }
    }

    pub fn valency(&self) -> usize {
        2 + self.children.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    End(End),
    Line(Line),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Line {
    pub vertices: Vec<Vertex>,
    pub bottom: End,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Color>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shifts: Vec<String>,
}

impl Line {
    pub fn terminal(bottom: End) -> Line {
        Line { vertices: Vec::new(), bottom, color: None, shifts: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NewtonTree {
    pub dim: usize,
    /// Decoration of the top arrow: the x-content of the polynomial.
    pub top: Vec<u64>,
    pub root: Line,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub budget: usize,
    pub max_depth: usize,
    pub check_chain_rule: bool,
    /// Keep every (input, stripped transform) pair in the stats.
    pub record_transforms: bool,
    /// Let a simple irrational root of a face polynomial end in an arrow
    /// of decoration 1 instead of failing. Its branch has order 1, so the
    /// tree does not depend on the root's value.
    pub simple_irrational: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            budget: diagram::DEFAULT_ELIM_BUDGET,
            max_depth: DEFAULT_MAX_DEPTH,
            check_chain_rule: false,
            record_transforms: false,
            simple_irrational: false,
        }
    }
}

impl BuildOptions {
    /// Defaults overridden by `NTREE_ELIM_BUDGET` and `NTREE_MAX_DEPTH`.
    pub fn from_env() -> Self {
        let max_depth = std::env::var("NTREE_MAX_DEPTH").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_MAX_DEPTH);
        BuildOptions { budget: diagram::budget_from_env(), max_depth, ..Default::default() }
    }
}

/// Stage data of a vertex in a coloured build, in depth-first order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexStage {
    pub step: PathStep,
    pub f: SparsePoly,
    pub g: SparsePoly,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BuildStats {
    pub newton_maps: usize,
    pub chain_rule_checks: usize,
    pub chain_rule_failures: usize,
    pub transforms: Vec<(SparsePoly, SparsePoly)>,
    pub stages: Vec<VertexStage>,
}

struct Builder {
    opts: BuildOptions,
    stats: BuildStats,
}

fn u64s(v: &[u32]) -> Vec<u64> {
    v.iter().map(|&x| x as u64).collect()
}

fn strip_content(f: &SparsePoly) -> SparsePoly {
    let n = f.x_content();
    f.div_monomial(&ExpVec::new(n, 0)).expect("content divides")
}

fn z_valuation(f: &SparsePoly) -> u64 {
    f.terms().map(|(e, _)| e.beta as u64).min().unwrap_or(0)
}

impl BuildStats {
    fn absorb(&mut self, other: BuildStats) {
        self.newton_maps += other.newton_maps;
        self.chain_rule_checks += other.chain_rule_checks;
        self.chain_rule_failures += other.chain_rule_failures;
        self.transforms.extend(other.transforms);
        self.stages.extend(other.stages);
    }
}

fn without_shifts(line: &Line) -> Line {
    let mut out = line.clone();
    out.shifts.clear();
    for v in &mut out.vertices {
        for ch in &mut v.children {
            if let Branch::Line(l) = ch {
                *l = without_shifts(l);
            }
        }
    }
    out
}

fn shift_parts(parts: Option<(SparsePoly, SparsePoly)>, s: &Suitable) -> Result<Option<(SparsePoly, SparsePoly)>> {
    let Some((mut a, mut b)) = parts else {
        return Ok(None);
    };
    for h in &s.shifts {
        a = a.shift_z(h)?;
        b = b.shift_z(h)?;
    }
    if let Some(pr) = &s.precision {
        a = pr.truncate(&a);
        b = pr.truncate(&b);
    }
    Ok(Some((a, b)))
}

impl Builder {
    #[allow(clippy::too_many_arguments)]
    fn stage(
        &mut self,
        f: &SparsePoly,
        parts: Option<(SparsePoly, SparsePoly)>,
        acc_pred: &[u64],
        depth: usize,
        label: &str,
        precision: Option<&Precision>,
    ) -> Result<(Vec<u64>, Line)> {
        if depth > self.opts.max_depth {
            return Err(Error::MaxDepthExceeded { max: self.opts.max_depth }.at(label));
        }
        let (n, order, _) = f.content_and_order().map_err(|e| Error::from(e).at(label))?;
        let n = u64s(&n);
        let line_color = part_color(&parts).map_err(|e| e.at(label))?;
        if order <= 1 {
            return Ok((n, terminal_line(End::arrow(order as u64), line_color)));
        }
        let s = make_suitable(f, self.opts.budget, precision.cloned(), 1).map_err(|e| e.at(label))?;
        if !s.entered_series {
            let parts = shift_parts(parts, &s)?;
            let line = self.body(s, parts, order, line_color, acc_pred, depth, label)?;
            return Ok((n, line));
        }
        // The shift is a series: accept the tree once doubling the
        // truncation no longer changes it.
        let mut previous: Option<(Line, BuildStats)> = None;
        let (exact, exact_shifts) = s.before_series.clone().expect("set when entering series");
        let mut first = Some(s);
        let mut scale = 1;
        while scale <= MAX_SERIES_SCALE {
            let mut sub = Builder { opts: self.opts, stats: BuildStats::default() };
            let suitable = match first.take() {
                Some(s) => Ok(s),
                None => make_suitable(&exact, self.opts.budget.saturating_sub(exact_shifts.len()), None, scale).map(
                    |mut s| {
                        s.shifts.splice(0..0, exact_shifts.iter().cloned());
                        s
                    },
                ),
            };
            let attempt = suitable.and_then(|s| {
                let parts = shift_parts(parts.clone(), &s)?;
                sub.body(s, parts, order, line_color, acc_pred, depth, label)
            });
            match attempt {
                Ok(line) => {
                    if let Some((prev, stats)) = previous.take() {
                        if without_shifts(&prev) == without_shifts(&line) {
                            self.stats.absorb(stats);
                            return Ok((n, prev));
                        }
                    }
                    previous = Some((line, sub.stats));
                }
                Err(e) if matches!(e.root_cause(), Error::SeriesPrecision { .. }) => previous = None,
                Err(e) => return Err(e),
            }
            scale *= 2;
        }
        let bound = scale / 2;
        Err(Error::SeriesPrecision { bound }.at(label))
    }

    #[allow(clippy::too_many_arguments)]
    fn body(
        &mut self,
        s: Suitable,
        parts: Option<(SparsePoly, SparsePoly)>,
        order: u32,
        line_color: Option<Color>,
        acc_pred: &[u64],
        depth: usize,
        label: &str,
    ) -> Result<Line> {
        let Suitable { poly: g, shifts, precision, .. } = s;
        let shift_text: Vec<String> = shifts.iter().map(|h| h.to_string()).collect();
        if let Some(pr) = &precision {
            if !precision_suffices(&g, pr).map_err(|e| e.at(label))? {
                return Err(Error::SeriesPrecision { bound: pr.bound }.at(label));
            }
        }
        match nu_status(&g).map_err(|e| e.at(label))? {
            NuStatus::Void => {
                let mut line = terminal_line(End::arrow(order as u64), line_color);
                line.shifts = shift_text;
                return Ok(line);
            }
            NuStatus::Many => {
                let mut line = terminal_line(End::black_box(order as u64), line_color);
                line.shifts = shift_text;
                return Ok(line);
            }
            NuStatus::OneVertex { .. } => {}
        }
        let path = polygonal_path_with(&g, self.opts.simple_irrational).map_err(|e| e.at(label))?;
        let mut vertices = Vec::with_capacity(path.steps.len());
        for (si, step) in path.steps.iter().enumerate() {
            let mut v = Vertex::bare(step.q.clone(), step.p, step.n.clone());
            if let Some((a, b)) = &parts {
                self.stats.stages.push(VertexStage { step: step.clone(), f: a.clone(), g: b.clone() });
            }
            for (mu, _) in &step.roots {
                let child_label = format!("{label}/v{}/mu={}", si + 1, format_rat(mu));
                let rec = match &precision {
                    Some(pr) => newton_map(&pr.before_map(&g, step), step, mu, acc_pred),
                    None => newton_map(&g, step, mu, acc_pred),
                }
                .map_err(|e| e.at(&child_label))?;
                self.stats.newton_maps += 1;
                if self.opts.check_chain_rule {
                    self.stats.chain_rule_checks += 1;
                    if !chain_rule_holds(&rec)? {
                        self.stats.chain_rule_failures += 1;
                        return Err(Error::Internal("chain rule fails for a Newton map".into()).at(&child_label));
                    }
                }
                let child_precision = match &precision {
                    None => None,
                    Some(pr) => Some(
                        pr.after_map(&rec.data.p_i, &rec.data.stripped_exponent)
                            .ok_or_else(|| Error::SeriesPrecision { bound: pr.bound }.at(&child_label))?,
                    ),
                };
                let stripped = match &child_precision {
                    Some(pr) => pr.truncate(&rec.stripped),
                    None => rec.stripped.clone(),
                };
                if self.opts.record_transforms {
                    self.stats.transforms.push((g.clone(), stripped.clone()));
                }
                v.acc_exp = rec.acc_exp.clone();
                let child_parts = match &parts {
                    None => None,
                    Some((a, b)) => {
                        let a = strip_content(&apply_map(a, &rec.data)?);
                        let b = strip_content(&apply_map(b, &rec.data)?);
                        Some(match &child_precision {
                            Some(pr) => (pr.truncate(&a), pr.truncate(&b)),
                            None => (a, b),
                        })
                    }
                };
                let (content, child) = self.stage(
                    &stripped,
                    child_parts,
                    &rec.acc_exp,
                    depth + 1,
                    &child_label,
                    child_precision.as_ref(),
                )?;
                if content.iter().any(|&x| x != 0) {
                    return Err(Error::Internal("stripped transform has x-content".into()).at(&child_label));
                }
                if child.vertices.is_empty() {
                    v.children.push(Branch::End(child.bottom));
                } else {
                    v.children.push(Branch::Line(child));
                }
            }
            for _ in 0..step.simple_irrational {
                v.children.push(Branch::End(End::arrow(1)));
            }
            if step.roots.is_empty() {
                // no transform to check the accumulated exponent against
                v.acc_exp.clear();
            }
            vertices.push(v);
        }
        let bottom_color = match &parts {
            None => None,
            Some((a, b)) => Color::from_orders(z_valuation(a), z_valuation(b)),
        };
        let order = path.terminal_order as u64;
        let bottom = match path.terminal {
            Terminal::Nw1 | Terminal::Nw2 => End::arrow(order),
            Terminal::Nw3 => End::black_box(order),
        };
        Ok(Line { vertices, bottom: End { color: bottom_color, ..bottom }, color: line_color, shifts: shift_text })
    }
}

fn part_color(parts: &Option<(SparsePoly, SparsePoly)>) -> Result<Option<Color>> {
    match parts {
        None => Ok(None),
        Some((a, b)) => {
            let (_, oa, _) = a.content_and_order()?;
            let (_, ob, _) = b.content_and_order()?;
            Ok(Color::from_orders(oa as u64, ob as u64))
        }
    }
}

fn terminal_line(end: End, color: Option<Color>) -> Line {
    let mut line = Line::terminal(End { color, ..end });
    line.color = color;
    line
}

fn build_inner(
    f: &SparsePoly,
    parts: Option<(SparsePoly, SparsePoly)>,
    opts: BuildOptions,
) -> Result<(NewtonTree, BuildStats)> {
    let mut b = Builder { opts, stats: BuildStats::default() };
    let acc0 = vec![0; f.dim()];
    let (top, root) = b.stage(f, parts, &acc0, 0, "root", None)?;
    let mut t = NewtonTree { dim: f.dim(), top, root };
    let built = t.clone();
    compute_decorations(&mut t)?;
    if !same_acc(&built.root, &t.root) {
        return Err(Error::Internal("accumulated exponents disagree with the transforms".into()));
    }
    Ok((t, b.stats))
}

fn same_acc(a: &Line, b: &Line) -> bool {
    a.vertices.iter().zip(&b.vertices).all(|(x, y)| {
        (x.acc_exp.is_empty() || x.acc_exp == y.acc_exp)
            && x.children.iter().zip(&y.children).all(|pair| match pair {
                (Branch::Line(l1), Branch::Line(l2)) => same_acc(l1, l2),
                _ => true,
            })
    })
}

pub fn build_tree(f: &SparsePoly, opts: BuildOptions) -> Result<NewtonTree> {
    Ok(build_inner(f, None, opts)?.0)
}

pub fn build_tree_with_stats(f: &SparsePoly, opts: BuildOptions) -> Result<(NewtonTree, BuildStats)> {
    build_inner(f, None, opts)
}

/// Tree of `f g` with the two factors followed through every stage.
pub fn build_tree_of_product(f: &SparsePoly, g: &SparsePoly, opts: BuildOptions) -> Result<(NewtonTree, BuildStats)> {
    build_inner(&f.mul(g), Some((f.clone(), g.clone())), opts)
}

struct Pred {
    big_q: Vec<u64>,
    r: Vec<u64>,
    p: u64,
    acc: Vec<u64>,
}

/// Fills `Q`, `R`, `c`, the accumulated exponents and `globalN` from the
/// vertical data `(q, p, verticalN)` and the shape, then checks `Q`
/// against the closed form.
pub fn compute_decorations(t: &mut NewtonTree) -> Result<()> {
    decorate_line(&mut t.root, None);
    let mut chain = Vec::new();
    check_closed_form(&t.root, &mut chain)
}

fn decorate_line(line: &mut Line, pred: Option<&Pred>) {
    for v in &mut line.vertices {
        let d = v.q.len();
        let mut acc = vec![0; d];
        for k in 0..d {
            let cl = gcd_u(v.p, v.q[k]);
            let prev = pred.map_or(0, |w| w.acc[k]);
            acc[k] = (v.p / cl) * prev + v.vertical_n[k] / cl;
        }
        let (big_q, r) = match pred {
            None => (v.q.clone(), v.q.clone()),
            Some(w) => {
                let mut big_q = vec![0; d];
                let mut r = vec![0; d];
                for k in 0..d {
                    big_q[k] = w.p * w.big_q[k] * v.p / gcd_u(w.p, w.big_q[k]) + v.q[k];
                    let g = gcd_u(w.r[k], w.p);
                    r[k] = v.q[k] + v.p * w.r[k] * w.p / (g * g);
                }
                (big_q, r)
            }
        };
        v.c = big_q.iter().map(|&x| gcd_u(x, v.p)).collect();
        v.global_n = v.c.iter().zip(&acc).map(|(a, b)| a * b).collect();
        v.big_q = big_q;
        v.r = r;
        v.acc_exp = acc;
        let here = Pred { big_q: v.big_q.clone(), r: v.r.clone(), p: v.p, acc: v.acc_exp.clone() };
        for ch in &mut v.children {
            if let Branch::Line(l) = ch {
                decorate_line(l, Some(&here));
            }
        }
    }
}

/// `Q` of the last vertex of `chain` (root-line vertex first) by the
/// closed formula, computed inside the subtree hanging from the first.
pub fn closed_form_q(chain: &[(Vec<u64>, u64)]) -> Option<Vec<u64>> {
    let i = chain.len() - 1;
    if i == 0 {
        return Some(chain[0].0.clone());
    }
    let d = chain[0].0.len();
    let sub = &chain[1..];
    // decoration of v_t inside the subtree: v_t is chain[i - t]
    let inner: Vec<Vec<u64>> = (1..i).map(|t| closed_form_q(&sub[..i - t])).collect::<Option<_>>()?;
    let q0i = closed_form_q(sub)?;
    let (qi, pi) = (&chain[0].0, chain[0].1 as u128);
    let p0 = chain[i].1 as u128;
    let mut out = vec![0; d];
    for k in 0..d {
        let mut num: u128 = pi * qi[k] as u128;
        let mut den: u128 = gcd_u(chain[0].1, qi[k]) as u128;
        for t in 1..i {
            let pt = chain[i - t].1;
            num = num.checked_mul((pt as u128) * (pt as u128))?;
            den = den.checked_mul(gcd_u(pt, inner[t - 1][k]) as u128)?;
        }
        num = num.checked_mul(p0)?;
        if !num.is_multiple_of(den) {
            return None;
        }
        out[k] = u64::try_from(num / den).ok()? + q0i[k];
    }
    Some(out)
}

fn check_closed_form(line: &Line, chain: &mut Vec<(Vec<u64>, u64)>) -> Result<()> {
    for v in &line.vertices {
        chain.push((v.q.clone(), v.p));
        let closed = closed_form_q(chain);
        if closed.as_ref() != Some(&v.big_q) {
            return Err(Error::Internal(format!("closed form {closed:?} disagrees with recursion {:?}", v.big_q)));
        }
        for ch in &v.children {
            if let Branch::Line(l) = ch {
                check_closed_form(l, chain)?;
            }
        }
        chain.pop();
    }
    Ok(())
}

/// `Q' > p Q p' / gcd(p, Q)` for every vertex and its preceding vertex.
pub fn check_growth(t: &NewtonTree) -> bool {
    fn walk(line: &Line, pred: Option<&Vertex>) -> bool {
        line.vertices.iter().all(|v| {
            let ok = pred
                .is_none_or(|w| (0..v.q.len()).all(|k| v.big_q[k] > w.p * w.big_q[k] * v.p / gcd_u(w.p, w.big_q[k])));
            ok && v.children.iter().all(|ch| match ch {
                Branch::Line(l) => walk(l, Some(v)),
                Branch::End(_) => true,
            })
        })
    }
    walk(&t.root, None)
}

/// Maximal number of horizontal edges on a path from the root.
pub fn depth(t: &NewtonTree) -> Result<usize> {
    if !crate::pgood::is_pgood(t)? {
        return Err(Error::NotPGood);
    }
    Ok(line_depth(&t.root))
}

pub(crate) fn line_depth(line: &Line) -> usize {
    line.vertices
        .iter()
        .flat_map(|v| v.children.iter())
        .map(|ch| match ch {
            Branch::End(_) => 1,
            Branch::Line(l) => 1 + line_depth(l),
        })
        .max()
        .unwrap_or(0)
}

pub fn tree_multiplicity(t: &NewtonTree) -> usize {
    fn walk(line: &Line) -> usize {
        line.vertices
            .iter()
            .map(|v| {
                v.children.len()
                    + v.children
                        .iter()
                        .map(|ch| match ch {
                            Branch::Line(l) => walk(l),
                            Branch::End(_) => 0,
                        })
                        .sum::<usize>()
            })
            .sum()
    }
    walk(&t.root)
}

impl NewtonTree {
    pub fn has_black_box(&self) -> bool {
        self.ends().iter().any(|(e, _)| e.kind == EndKind::BlackBox)
    }

    /// Every end except the top arrow, with its orientation.
    pub fn ends(&self) -> Vec<(End, Orientation)> {
        fn walk(line: &Line, out: &mut Vec<(End, Orientation)>) {
            for v in &line.vertices {
                for ch in &v.children {
                    match ch {
                        Branch::End(e) => out.push((e.clone(), Orientation::Horizontal)),
                        Branch::Line(l) => walk(l, out),
                    }
                }
            }
            out.push((line.bottom.clone(), Orientation::Bottom));
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Vertices in depth-first order.
    pub fn vertices(&self) -> Vec<&Vertex> {
        fn walk<'a>(line: &'a Line, out: &mut Vec<&'a Vertex>) {
            for v in &line.vertices {
                out.push(v);
                for ch in &v.children {
                    if let Branch::Line(l) = ch {
                        walk(l, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    /// Copy with sorted children and no shift history.
    pub fn canonical(&self) -> NewtonTree {
        fn canon_line(line: &mut Line) {
            line.shifts.clear();
            for v in &mut line.vertices {
                for ch in &mut v.children {
                    if let Branch::Line(l) = ch {
                        canon_line(l);
                    }
                }
                v.children.sort_by_cached_key(|ch| serde_json::to_string(ch).expect("serializable"));
            }
        }
        let mut t = self.clone();
        canon_line(&mut t.root);
        t
    }

    pub fn canonical_json(&self) -> String {
        self.canonical().to_json()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Top,
    Bottom,
    Horizontal,
}

// Flat JSON form.

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum Decoration {
    Scalar(u64),
    Vector(Vec<u64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct JsonVertex {
    id: usize,
    line: usize,
    q: Vec<u64>,
    p: u64,
    #[serde(rename = "verticalN")]
    vertical_n: Vec<u64>,
    #[serde(rename = "Q")]
    big_q: Vec<u64>,
    #[serde(rename = "R")]
    r: Vec<u64>,
    c: Vec<u64>,
    acc_exp: Vec<u64>,
    #[serde(rename = "globalN")]
    global_n: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonEnd {
    kind: EndKind,
    decoration: Decoration,
    at: Option<usize>,
    orientation: Orientation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<Color>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonShift {
    line: usize,
    h: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonLine {
    id: usize,
    color: Color,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct JsonTree {
    dim: usize,
    vertices: Vec<JsonVertex>,
    vertical_edges: Vec<[usize; 2]>,
    horizontal_edges: Vec<[usize; 2]>,
    ends: Vec<JsonEnd>,
    shifts: Vec<JsonShift>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    lines: Vec<JsonLine>,
}

struct Flattener {
    out: JsonTree,
    next_line: usize,
}

impl Flattener {
    fn line(&mut self, line: &Line, parent: Option<usize>) -> usize {
        let lid = self.next_line;
        self.next_line += 1;
        if let Some(c) = line.color {
            self.out.lines.push(JsonLine { id: lid, color: c });
        }
        for h in &line.shifts {
            self.out.shifts.push(JsonShift { line: lid, h: h.clone() });
        }
        let mut prev: Option<usize> = None;
        for (i, v) in line.vertices.iter().enumerate() {
            let id = self.out.vertices.len();
            self.out.vertices.push(JsonVertex {
                id,
                line: lid,
                q: v.q.clone(),
                p: v.p,
                vertical_n: v.vertical_n.clone(),
                big_q: v.big_q.clone(),
                r: v.r.clone(),
                c: v.c.clone(),
                acc_exp: v.acc_exp.clone(),
                global_n: v.global_n.clone(),
            });
            match (i, prev, parent) {
                (0, _, Some(w)) => self.out.horizontal_edges.push([w, id]),
                (_, Some(u), _) => self.out.vertical_edges.push([u, id]),
                _ => {}
            }
            prev = Some(id);
            for (slot, ch) in v.children.iter().enumerate() {
                match ch {
                    Branch::End(e) => self.out.ends.push(JsonEnd {
                        kind: e.kind,
                        decoration: Decoration::Scalar(e.decoration),
                        at: Some(id),
                        orientation: Orientation::Horizontal,
                        slot: Some(slot),
                        color: e.color,
                    }),
                    Branch::Line(l) => {
                        self.line(l, Some(id));
                    }
                }
            }
        }
        self.out.ends.push(JsonEnd {
            kind: line.bottom.kind,
            decoration: Decoration::Scalar(line.bottom.decoration),
            at: prev,
            orientation: Orientation::Bottom,
            slot: None,
            color: line.bottom.color,
        });
        lid
    }
}

impl NewtonTree {
    pub fn to_json(&self) -> String {
        let mut fl = Flattener {
            out: JsonTree {
                dim: self.dim,
                vertices: Vec::new(),
                vertical_edges: Vec::new(),
                horizontal_edges: Vec::new(),
                ends: vec![JsonEnd {
                    kind: EndKind::Arrow,
                    decoration: Decoration::Vector(self.top.clone()),
                    at: None,
                    orientation: Orientation::Top,
                    slot: None,
                    color: None,
                }],
                shifts: Vec::new(),
                lines: Vec::new(),
            },
            next_line: 0,
        };
        fl.line(&self.root, None);
        if let Some(first) = fl.out.vertices.first() {
            fl.out.ends[0].at = Some(first.id);
        }
        serde_json::to_string(&fl.out).expect("serializable")
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::from_str(&self.to_json()).expect("valid json")
    }

    pub fn from_json(text: &str) -> Result<NewtonTree> {
        let jt: JsonTree = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_json_tree(jt)
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<NewtonTree> {
        let jt: JsonTree = serde_json::from_value(v.clone()).map_err(|e| Error::Json(e.to_string()))?;
        Self::from_json_tree(jt)
    }

    fn from_json_tree(jt: JsonTree) -> Result<NewtonTree> {
        let bad = |m: &str| Error::Json(m.to_string());
        let top = jt.ends.iter().find(|e| e.orientation == Orientation::Top).ok_or_else(|| bad("missing top end"))?;
        let top = match &top.decoration {
            Decoration::Vector(v) => v.clone(),
            Decoration::Scalar(_) => return Err(bad("top decoration must be a vector")),
        };
        let nv = jt.vertices.len();
        for (i, v) in jt.vertices.iter().enumerate() {
            if v.id != i {
                return Err(bad("vertex ids must be 0..n in order"));
            }
            if v.q.len() != jt.dim {
                return Err(bad("vertex data has wrong length"));
            }
        }
        let mut line_vertices: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in &jt.vertices {
            line_vertices.entry(v.line).or_default().push(v.id);
        }
        let mut hang: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for [w, u] in &jt.horizontal_edges {
            if *w >= nv || *u >= nv {
                return Err(bad("edge endpoint out of range"));
            }
            hang[*w].push(jt.vertices[*u].line);
        }
        let mut hend: Vec<Vec<(usize, End)>> = vec![Vec::new(); nv];
        let mut bottoms: std::collections::BTreeMap<Option<usize>, End> = Default::default();
        for e in &jt.ends {
            let dec = match e.decoration {
                Decoration::Scalar(k) => k,
                Decoration::Vector(_) if e.orientation == Orientation::Top => continue,
                Decoration::Vector(_) => return Err(bad("only the top end has a vector decoration")),
            };
            let end = End { kind: e.kind, decoration: dec, color: e.color };
            match e.orientation {
                Orientation::Top => {}
                Orientation::Bottom => {
                    bottoms.insert(e.at, end);
                }
                Orientation::Horizontal => {
                    let at = e.at.ok_or_else(|| bad("horizontal end without vertex"))?;
                    let slot = e.slot.ok_or_else(|| bad("horizontal end without slot"))?;
                    if at >= nv {
                        return Err(bad("end vertex out of range"));
                    }
                    hend[at].push((slot, end));
                }
            }
        }
        let colors: std::collections::BTreeMap<usize, Color> = jt.lines.iter().map(|l| (l.id, l.color)).collect();
        let mut shifts: std::collections::BTreeMap<usize, Vec<String>> = Default::default();
        for s in &jt.shifts {
            shifts.entry(s.line).or_default().push(s.h.clone());
        }
        struct Ctx<'a> {
            jt: &'a JsonTree,
            line_vertices: &'a std::collections::BTreeMap<usize, Vec<usize>>,
            hang: &'a [Vec<usize>],
            hend: &'a [Vec<(usize, End)>],
            bottoms: &'a std::collections::BTreeMap<Option<usize>, End>,
            colors: &'a std::collections::BTreeMap<usize, Color>,
            shifts: &'a std::collections::BTreeMap<usize, Vec<String>>,
        }
        fn build(ctx: &Ctx, lid: usize, depth: usize) -> Result<Line> {
            if depth > 10_000 {
                return Err(Error::Json("cyclic line structure".into()));
            }
            let ids = ctx.line_vertices.get(&lid).cloned().unwrap_or_default();
            let mut vertices = Vec::new();
            for &id in &ids {
                let jv = &ctx.jt.vertices[id];
                let total = ctx.hang[id].len() + ctx.hend[id].len();
                let mut slots: Vec<Option<Branch>> = vec![None; total];
                for (s, e) in &ctx.hend[id] {
                    if *s >= total || slots[*s].is_some() {
                        return Err(Error::Json("bad end slot".into()));
                    }
                    slots[*s] = Some(Branch::End(e.clone()));
                }
                let mut lines = ctx.hang[id].iter();
                for s in slots.iter_mut() {
                    if s.is_none() {
                        let l = *lines.next().expect("slot count matches");
                        *s = Some(Branch::Line(build(ctx, l, depth + 1)?));
                    }
                }
                vertices.push(Vertex {
                    q: jv.q.clone(),
                    p: jv.p,
                    vertical_n: jv.vertical_n.clone(),
                    big_q: jv.big_q.clone(),
                    r: jv.r.clone(),
                    c: jv.c.clone(),
                    acc_exp: jv.acc_exp.clone(),
                    global_n: jv.global_n.clone(),
                    children: slots.into_iter().map(|s| s.expect("filled")).collect(),
                });
            }
            let bottom = ctx
                .bottoms
                .get(&ids.last().copied())
                .cloned()
                .ok_or_else(|| Error::Json(format!("line {lid} has no bottom end")))?;
            Ok(Line {
                vertices,
                bottom,
                color: ctx.colors.get(&lid).copied(),
                shifts: ctx.shifts.get(&lid).cloned().unwrap_or_default(),
            })
        }
        let ctx = Ctx {
            jt: &jt,
            line_vertices: &line_vertices,
            hang: &hang,
            hend: &hend,
            bottoms: &bottoms,
            colors: &colors,
            shifts: &shifts,
        };
        let root_line = jt.vertices.first().map_or(0, |v| v.line);
        let root = build(&ctx, root_line, 0)?;
        Ok(NewtonTree { dim: jt.dim, top, root })
    }
}

fn vec_label(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}

fn end_label(e: &End) -> String {
    match e.kind {
        EndKind::Arrow => format!("-> ({})", e.decoration),
        EndKind::BlackBox => format!("[#] ({})", e.decoration),
    }
}

impl NewtonTree {
    pub fn render_ascii(&self) -> String {
        fn line_ascii(line: &Line, ids: &mut usize, ind: &str, out: &mut String) {
            for v in &line.vertices {
                let id = *ids;
                *ids += 1;
                let _ = writeln!(out, "{ind}|");
                let _ =
                    writeln!(out, "{ind}o v{id} (({})) Q=({}) p={}", vec_label(&v.global_n), vec_label(&v.big_q), v.p);
                for ch in &v.children {
                    match ch {
                        Branch::End(e) => {
                            let _ = writeln!(out, "{ind}+-- {}", end_label(e));
                        }
                        Branch::Line(l) => {
                            let _ = writeln!(out, "{ind}+--+");
                            line_ascii(l, ids, &format!("{ind}|  "), out);
                        }
                    }
                }
            }
            let _ = writeln!(out, "{ind}|");
            let _ = writeln!(out, "{ind}{}", end_label(&line.bottom));
        }
        let mut out = format!("^ ({})\n", vec_label(&self.top));
        let mut ids = 0;
        line_ascii(&self.root, &mut ids, "", &mut out);
        out
    }

    pub fn render_dot(&self) -> String {
        struct Dot {
            out: String,
            vid: usize,
            eid: usize,
        }
        impl Dot {
            fn end(&mut self, e: &End) -> String {
                let name = format!("e{}", self.eid);
                self.eid += 1;
                let shape = match e.kind {
                    EndKind::Arrow => "plaintext",
                    EndKind::BlackBox => "box, style=filled, fillcolor=black, fontcolor=white",
                };
                let _ = writeln!(self.out, "  {name} [shape={shape}, label=\"({})\"];", e.decoration);
                name
            }
            fn line(&mut self, line: &Line, upper: Option<(String, String)>) {
                let mut prev = upper;
                for v in &line.vertices {
                    let name = format!("v{}", self.vid);
                    self.vid += 1;
                    let _ = writeln!(self.out, "  {name} [shape=circle, label=\"({})\"];", vec_label(&v.global_n));
                    if let Some((from, tail)) = &prev {
                        let _ = writeln!(
                            self.out,
                            "  {from} -> {name} [taillabel=\"{tail}\", headlabel=\"{}\"];",
                            vec_label(&v.big_q)
                        );
                    }
                    for ch in &v.children {
                        match ch {
                            Branch::End(e) => {
                                let en = self.end(e);
                                let _ = writeln!(self.out, "  {name} -> {en} [constraint=false, taillabel=\"1\"];");
                            }
                            Branch::Line(l) => {
                                self.line(l, Some((name.clone(), "1".to_string())));
                            }
                        }
                    }
                    prev = Some((name, v.p.to_string()));
                }
                let en = self.end(&line.bottom);
                if let Some((from, tail)) = prev {
                    let _ = writeln!(self.out, "  {from} -> {en} [taillabel=\"{tail}\"];");
                }
            }
        }
        let mut d = Dot { out: String::from("digraph ntree {\n  rankdir=TB;\n"), vid: 0, eid: 0 };
        let _ = writeln!(d.out, "  top [shape=plaintext, label=\"({})\"];", vec_label(&self.top));
        d.line(&self.root, Some(("top".to_string(), String::new())));
        d.out.push_str("}\n");
        d.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(s: &str, d: usize) -> NewtonTree {
        build_tree(&SparsePoly::parse(s, d).unwrap(), BuildOptions::default()).unwrap()
    }

    #[test]
    fn cusp() {
        let t = tree("z^2 - x1^3", 1);
        assert_eq!(t.top, vec![0]);
        assert_eq!(t.root.vertices.len(), 1);
        let v = &t.root.vertices[0];
        assert_eq!((v.q.clone(), v.p, v.vertical_n.clone()), (vec![3], 2, vec![6]));
        assert_eq!(v.children, vec![Branch::End(End::arrow(1))]);
        assert_eq!(t.root.bottom, End::arrow(0));
        assert_eq!(tree_multiplicity(&t), 1);
    }

    #[test]
    fn black_box_tree() {
        let t = tree("z^2 - x1^3 - x2^3", 2);
        assert!(t.root.vertices.is_empty());
        assert_eq!(t.root.bottom, End::black_box(2));
        assert!(t.has_black_box());
    }

    #[test]
    fn two_lines() {
        let t = tree("(z^2 - x1^3)^2 - x1^7*z", 1);
        let v1 = &t.root.vertices[0];
        assert_eq!((v1.q.clone(), v1.p, v1.vertical_n.clone()), (vec![3], 2, vec![12]));
        let Branch::Line(l2) = &v1.children[0] else { panic!("expected a line") };
        let v2 = &l2.vertices[0];
        assert_eq!((v2.q.clone(), v2.p), (vec![5], 2));
        assert_eq!(v2.big_q, vec![17]);
        assert_eq!(v2.r, vec![17]);
        assert_eq!(v1.acc_exp, vec![12]);
        assert_eq!(v2.acc_exp, vec![34]);
        assert_eq!(l2.bottom, End::arrow(0));
        assert_eq!(v2.children, vec![Branch::End(End::arrow(1))]);
        assert!(check_growth(&t));
        assert_eq!(depth(&t).unwrap(), 2);
    }

    #[test]
    fn two_variable_decorations() {
        let t = tree("(z^2 - x1^2*x2^3)^2 - x1^5*x2^8", 2);
        let v1 = &t.root.vertices[0];
        assert_eq!((v1.q.clone(), v1.p), (vec![2, 3], 2));
        assert_eq!(v1.acc_exp, vec![4, 12]);
        assert_eq!(v1.c, vec![2, 1]);
        let Branch::Line(l2) = &v1.children[0] else { panic!("expected a line") };
        let v2 = &l2.vertices[0];
        assert_eq!((v2.q.clone(), v2.p), (vec![1, 4], 2));
        assert_eq!(v2.big_q, vec![5, 16]);
        assert_eq!(v2.c, vec![1, 2]);
        assert_eq!(v2.acc_exp, vec![10, 16]);
    }

    #[test]
    fn closed_form() {
        assert_eq!(closed_form_q(&[(vec![3], 2), (vec![5], 2)]), Some(vec![17]));
        assert_eq!(closed_form_q(&[(vec![2, 3], 2), (vec![1, 4], 2)]), Some(vec![5, 16]));
        // three levels agree with the recursion
        let chain = [(vec![3], 2), (vec![5], 2), (vec![7], 3)];
        let q1 = 17;
        let expect = 2 * q1 * 3 / gcd_u(2, q1) + 7;
        assert_eq!(closed_form_q(&chain), Some(vec![expect]));
    }

    #[test]
    fn growth_violation() {
        let mut t = tree("(z^2 - x1^3)^2 - x1^7*z", 1);
        let Branch::Line(l2) = &mut t.root.vertices[0].children[0] else { panic!() };
        l2.vertices[0].big_q = vec![12];
        assert!(!check_growth(&t));
        assert!(check_growth(&tree("z^2 - x1^3", 1)));
    }

    #[test]
    fn multiplicities() {
        assert_eq!(tree_multiplicity(&tree("(z^2 - x1^3)*(z^2 - 2*x1^3)", 1)), 2);
        assert_eq!(tree_multiplicity(&tree("(z^2 - x1^3)*(z^3 - x1^2)", 1)), 2);
    }

    #[test]
    fn case_one_depth() {
        let t = tree("x1^3*z", 1);
        assert_eq!(t.top, vec![3]);
        assert_eq!(t.root.bottom, End::arrow(1));
        assert_eq!(depth(&t).unwrap(), 0);
        assert_eq!(depth(&tree("z^2 - x1^3", 1)).unwrap(), 1);
    }

    #[test]
    fn json_round_trip() {
        for (s, d) in [
            ("z^2 - x1^3", 1),
            ("(z^2 - x1^3)^2 - x1^7*z", 1),
            ("(z^2 - x1^2*x2^3)^2 - x1^5*x2^8", 2),
            ("(z - x1)*(z - 2*x1)*(z^2 - x1^3)", 1),
            ("x1*z", 1),
            ("(z-x1)^2*(z^2-x1^3)", 1),
        ] {
            let t = tree(s, d);
            let back = NewtonTree::from_json(&t.to_json()).unwrap();
            assert_eq!(back, t, "{s}");
        }
        let v = tree("x1*z", 1).to_json_value();
        assert_eq!(v["ends"][0]["at"], serde_json::Value::Null);
        assert_eq!(v["ends"][0]["decoration"], serde_json::json!([1]));
    }

    #[test]
    fn renders() {
        let t = tree("x1^0*z", 1);
        assert_eq!(t.render_ascii().lines().count(), 3);
        let dot = tree("z^2 - x1^3", 1).render_dot();
        assert!(dot.contains("label=\"(6)\""));
        assert!(dot.contains("headlabel=\"3\""));
        assert!(dot.contains("taillabel=\"2\""));
        assert_eq!(dot.matches("shape=plaintext").count(), 3);
    }

    #[test]
    fn depth_cap() {
        let f = SparsePoly::parse("(z^2 - x1^3)^2 - x1^7*z", 1).unwrap();
        let opts = BuildOptions { max_depth: 0, ..Default::default() };
        let err = build_tree(&f, opts).unwrap_err();
        assert_eq!(err.root_cause(), &Error::MaxDepthExceeded { max: 0 });
    }

    #[test]
    fn simple_irrational_roots() {
        let f = SparsePoly::parse("(z^2 - 2*x1^2)*(z - x1)", 1).unwrap();
        assert!(matches!(
            build_tree(&f, BuildOptions::default()).unwrap_err().root_cause(),
            Error::NonRationalRoots { .. }
        ));
        let opts = BuildOptions { simple_irrational: true, ..Default::default() };
        let t = build_tree(&f, opts).unwrap();
        let v = &t.root.vertices[0];
        assert_eq!((v.q.clone(), v.p), (vec![1], 1));
        assert_eq!(v.children.len(), 3);
        assert!(v.children.iter().all(|c| matches!(c, Branch::End(e) if e.decoration == 1)));
        let doubled = SparsePoly::parse("(z^2 - 2*x1^2)^2", 1).unwrap();
        assert!(build_tree(&doubled, opts).is_err());
    }
}
