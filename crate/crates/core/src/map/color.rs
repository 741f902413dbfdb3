//! Monochromatic subgraphs and angle classification.

use std::collections::{BTreeMap, BTreeSet};

use super::{Dart, Diagram, VertexId};
use crate::coxeter::Gen;

/// A maximal path of one color, running through crossings (vertices where the
/// color meets a commuting color).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorArc {
    pub start: Dart,
    pub end: Dart,
    /// Crossings in order, with the slot the arc enters through.
    pub crossings: Vec<(VertexId, u16)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorSubgraph {
    pub color: Gen,
    pub nodes: Vec<VertexId>,
    pub arcs: Vec<ColorArc>,
}

impl ColorSubgraph {
    pub fn loops(&self) -> impl Iterator<Item = &ColorArc> {
        self.arcs.iter().filter(|a| a.closed)
    }
}

pub(crate) fn is_node(d: &Diagram, v: VertexId, c: Gen) -> bool {
    let x = &d.vertices[&v];
    x.has_color(c) && x.m >= 3
}

pub(crate) fn is_crossing(d: &Diagram, v: VertexId, c: Gen) -> bool {
    let x = &d.vertices[&v];
    x.has_color(c) && x.m == 2
}

/// Follows the color of `from` through crossings until a node or the boundary.
pub(crate) fn walk(d: &Diagram, from: Dart, c: Gen) -> (Dart, Vec<(VertexId, u16)>) {
    let mut crossings = Vec::new();
    let mut y = d.alpha(from);
    while let Dart::V(w, t) = y {
        if !is_crossing(d, w, c) {
            break;
        }
        crossings.push((w, t));
        let next = Dart::V(w, (t + 2) % 4);
        if next == from {
            break;
        }
        y = d.alpha(next);
        if y == from {
            break;
        }
    }
    (y, crossings)
}

/// The subgraph of color `c` with crossings contracted into arcs.
pub fn color_subgraph(d: &Diagram, c: Gen) -> ColorSubgraph {
    let nodes: Vec<VertexId> = d.vertices.keys().copied().filter(|&v| is_node(d, v, c)).collect();
    let mut starts: Vec<Dart> = Vec::new();
    for &v in &nodes {
        let x = &d.vertices[&v];
        let first = if x.lo == c { 0 } else { 1 };
        starts.extend((first..x.degree()).step_by(2).map(|s| Dart::V(v, s)));
    }
    starts.extend(
        d.boundary.iter().enumerate().filter(|(_, p)| p.color == c).map(|(i, _)| Dart::B(i as u32)),
    );
    let mut arcs = Vec::new();
    let mut covered: BTreeSet<VertexId> = BTreeSet::new();
    for &s in &starts {
        let (end, crossings) = walk(d, s, c);
        if s <= end {
            covered.extend(crossings.iter().map(|x| x.0));
            arcs.push(ColorArc { start: s, end, crossings, closed: false });
        }
    }
    for (&v, x) in &d.vertices {
        if !is_crossing(d, v, c) || covered.contains(&v) {
            continue;
        }
        let slot = if x.lo == c { 0 } else { 1 };
        let start = Dart::V(v, slot);
        let mut crossings = vec![(v, (slot + 2) % 4)];
        let mut y = d.alpha(start);
        while let Dart::V(w, t) = y {
            if Dart::V(w, (t + 2) % 4) == start {
                break;
            }
            crossings.push((w, t));
            y = d.alpha(Dart::V(w, (t + 2) % 4));
        }
        covered.extend(crossings.iter().map(|x| x.0));
        arcs.push(ColorArc { start, end: start, crossings, closed: true });
    }
    ColorSubgraph { color: c, nodes, arcs }
}

/// Faces of the contracted subgraph of color `c`, as cyclic lists of node or
/// boundary darts. Each listed dart starts an arc along the face; the face lies
/// on the left of the arc.
pub fn color_faces(d: &Diagram, c: Gen) -> Vec<Vec<Dart>> {
    let g = color_subgraph(d, c);
    let mut end: BTreeMap<Dart, Dart> = BTreeMap::new();
    for a in g.arcs.iter().filter(|a| !a.closed) {
        end.insert(a.start, a.end);
        end.insert(a.end, a.start);
    }
    let k = d.boundary.len() as u32;
    let next_c = |x: Dart| -> Dart {
        match x {
            Dart::V(v, s) => Dart::V(v, (s + 2) % d.vertices[&v].degree()),
            Dart::B(p) => {
                let mut q = (p + k - 1) % k;
                while d.boundary[q as usize].color != c {
                    q = (q + k - 1) % k;
                }
                Dart::B(q)
            }
        }
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &x in end.keys() {
        if seen.contains(&x) {
            continue;
        }
        let mut face = vec![x];
        seen.insert(x);
        let mut y = next_c(end[&x]);
        while y != x {
            seen.insert(y);
            face.push(y);
            y = next_c(end[&y]);
        }
        out.push(face);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AngleKind {
    /// Between an incoming and an outgoing dart.
    Varied,
    /// Between two darts of the same direction.
    Uniform,
}

/// Classifies the corner between slots `s` and `s + 1` of every vertex.
pub fn classify_angles(d: &Diagram) -> Vec<(VertexId, u16, AngleKind)> {
    let mut out = Vec::new();
    for (&id, v) in &d.vertices {
        for s in 0..v.degree() {
            let a = v.is_out(s);
            let b = v.is_out((s + 1) % v.degree());
            if a.is_none() {
                continue;
            }
            let kind = if a == b { AngleKind::Uniform } else { AngleKind::Varied };
            out.push((id, s, kind));
        }
    }
    out
}
