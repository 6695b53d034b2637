//! Normalisation of vertices with `p = 1`.
//!
//! A tree is P-good when every vertex with `p = 1` is the last vertex of its
//! line, its lower edge ends in a dead arrow and it carries at least two
//! horizontal branches.

use crate::error::{Error, Result};
use crate::tree::{compute_decorations, Branch, End, EndKind, Line, NewtonTree, Vertex};

fn is_dead_arrow(e: &End) -> bool {
    e.kind == EndKind::Arrow && e.decoration == 0
}

pub fn is_pgood(t: &NewtonTree) -> Result<bool> {
    if t.has_black_box() {
        return Err(Error::BlackBox);
    }
    fn ok(line: &Line) -> bool {
        let n = line.vertices.len();
        line.vertices.iter().enumerate().all(|(i, v)| {
            let here = v.p != 1 || (i + 1 == n && is_dead_arrow(&line.bottom) && v.children.len() >= 2);
            here && v.children.iter().all(|ch| match ch {
                Branch::Line(l) => ok(l),
                Branch::End(_) => true,
            })
        })
    }
    Ok(ok(&t.root))
}

/// Moves `u` from hanging below `v` (same line) to hanging from `v`.
fn lower_by(u: &mut Vertex, v: &Vertex) -> Result<()> {
    for k in 0..u.q.len() {
        u.q[k] = u.q[k]
            .checked_sub(u.p * v.q[k])
            .ok_or_else(|| Error::Internal("slope below a p = 1 vertex is too small".into()))?;
        u.vertical_n[k] = u.vertical_n[k]
            .checked_sub(u.p * v.vertical_n[k])
            .ok_or_else(|| Error::Internal("vertical N below a p = 1 vertex is too small".into()))?;
    }
    Ok(())
}

fn raise_by(u: &mut Vertex, v: &Vertex) {
    for k in 0..u.q.len() {
        u.q[k] += u.p * v.q[k];
        u.vertical_n[k] += u.p * v.vertical_n[k];
    }
}

fn pass(line: &mut Line) -> Result<bool> {
    let mut changed = false;
    for v in &mut line.vertices {
        for ch in &mut v.children {
            if let Branch::Line(l) = ch {
                changed |= pass(l)?;
                if l.vertices.is_empty() {
                    *ch = Branch::End(l.bottom.clone());
                }
            }
        }
    }
    let mut i = line.vertices.len();
    while i > 0 {
        i -= 1;
        if line.vertices[i].p != 1 {
            continue;
        }
        let last = i + 1 == line.vertices.len();
        if !last || !is_dead_arrow(&line.bottom) {
            let mut lower: Vec<Vertex> = line.vertices.drain(i + 1..).collect();
            let bottom = std::mem::replace(&mut line.bottom, End::arrow(0));
            let v = &line.vertices[i];
            for u in &mut lower {
                lower_by(u, v)?;
            }
            let branch = if lower.is_empty() {
                Branch::End(bottom)
            } else {
                Branch::Line(Line { vertices: lower, bottom, color: line.color, shifts: Vec::new() })
            };
            line.vertices[i].children.push(branch);
            changed = true;
        } else if line.vertices[i].children.len() == 1 {
            let mut v = line.vertices.remove(i);
            match v.children.pop().expect("one child") {
                Branch::End(e) => line.bottom = e,
                Branch::Line(l) => {
                    for mut u in l.vertices {
                        raise_by(&mut u, &v);
                        line.vertices.push(u);
                    }
                    line.bottom = l.bottom;
                }
            }
            changed = true;
        }
    }
    Ok(changed)
}

/// The P-good tree equivalent to `t`.
pub fn to_pgood(t: &NewtonTree) -> Result<NewtonTree> {
    if t.has_black_box() {
        return Err(Error::BlackBox);
    }
    let mut out = t.clone();
    while pass(&mut out.root)? {}
    compute_decorations(&mut out)?;
    if !is_pgood(&out)? {
        return Err(Error::Internal("normalisation did not reach a P-good tree".into()));
    }
    Ok(out)
}
