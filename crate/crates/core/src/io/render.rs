//! Graphviz and SVG output.
//!
//! SVG positions come from a Tutte embedding per component: the boundary
//! points (or the largest face of a closed component) are pinned to a circle
//! and every free vertex sits at the mean of its neighbors. A force layout is
//! used when that degenerates or when asked for.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::coxeter::Gen;
use crate::map::{Dart, Diagram, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Tutte,
    Force,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderSpec {
    pub format: RenderFormat,
    pub layout: Layout,
    pub palette: BTreeMap<Gen, String>,
    pub arrowheads: bool,
}

impl RenderSpec {
    /// SVG with a Tutte layout, arrowheads and the system's own colors.
    pub fn for_diagram(d: &Diagram) -> Self {
        RenderSpec {
            format: RenderFormat::Svg,
            layout: Layout::Tutte,
            palette: d.sys.colors.iter().enumerate().map(|(i, c)| (i as Gen + 1, c.clone())).collect(),
            arrowheads: true,
        }
    }

    fn color(&self, g: Gen) -> &str {
        self.palette.get(&g).map(String::as_str).unwrap_or("black")
    }
}

pub fn render(d: &Diagram, spec: &RenderSpec) -> String {
    match spec.format {
        RenderFormat::Dot => dot(d, spec),
        RenderFormat::Svg => svg(d, spec),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    V(VertexId),
    B(u32),
}

fn node(d: Dart) -> Node {
    match d {
        Dart::V(v, _) => Node::V(v),
        Dart::B(p) => Node::B(p),
    }
}

struct Edge {
    from: Node,
    to: Node,
    color: Gen,
    directed: bool,
}

/// One entry per edge. Oriented edges run from their outgoing end.
fn edges(d: &Diagram) -> Vec<Edge> {
    let mut out = Vec::new();
    for a in d.darts() {
        let b = d.alpha(a);
        let directed = match d.is_out(a) {
            Some(true) => true,
            None if a < b => false,
            _ => continue,
        };
        out.push(Edge { from: node(a), to: node(b), color: d.color(a), directed });
    }
    out
}

fn dot_name(n: Node) -> String {
    match n {
        Node::V(v) => format!("v{v}"),
        Node::B(p) => format!("b{p}"),
    }
}

fn dot(d: &Diagram, spec: &RenderSpec) -> String {
    let oriented = d.sys.oriented;
    let (kw, arrow) = if oriented { ("digraph", "->") } else { ("graph", "--") };
    let mut s = format!("{kw} diagram {{\n  node [shape=point];\n");
    for (id, v) in &d.vertices {
        let _ = writeln!(s, "  v{id} [xlabel=\"{id}:{}{}\"];", v.lo, v.hi);
    }
    for p in 0..d.boundary.len() {
        let _ = writeln!(s, "  b{p} [shape=plaintext, label=\"{p}\"];");
    }
    for e in edges(d) {
        let head = if e.directed && spec.arrowheads { "" } else if oriented { ", arrowhead=none" } else { "" };
        let _ = writeln!(
            s,
            "  {} {arrow} {} [color={}{head}];",
            dot_name(e.from),
            dot_name(e.to),
            spec.color(e.color)
        );
    }
    for (&(g, spin), &n) in &d.circles {
        for i in 0..n {
            let label = match spin {
                Some(sp) => format!("{sp:?}"),
                None => String::new(),
            };
            let _ = writeln!(s, "  c{g}_{i}_{label} [shape=circle, label=\"{label}\", color={}];", spec.color(g));
        }
    }
    s.push_str("}\n");
    s
}

type Pos = (f64, f64);

/// Positions in the unit disk for the nodes of one component.
fn layout_component(d: &Diagram, nodes: &[Node], pinned: &[Node], layout: Layout) -> BTreeMap<Node, Pos> {
    let adj = adjacency(d, nodes);
    if layout == Layout::Tutte {
        if let Some(p) = tutte(nodes, pinned, &adj) {
            return p;
        }
    }
    force(nodes, pinned, &adj)
}

fn adjacency(d: &Diagram, nodes: &[Node]) -> BTreeMap<Node, Vec<Node>> {
    let mut adj: BTreeMap<Node, Vec<Node>> = nodes.iter().map(|&n| (n, Vec::new())).collect();
    for &n in nodes {
        let darts: Vec<Dart> = match n {
            Node::V(v) => d.vertex_darts(v).collect(),
            Node::B(p) => vec![Dart::B(p)],
        };
        for x in darts {
            let m = node(d.alpha(x));
            if m != n {
                adj.get_mut(&n).expect("node in component").push(m);
            }
        }
    }
    adj
}

fn on_circle(pinned: &[Node]) -> BTreeMap<Node, Pos> {
    let k = pinned.len() as f64;
    pinned
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let t = std::f64::consts::TAU * i as f64 / k;
            (n, (t.cos(), -t.sin()))
        })
        .collect()
}

fn tutte(nodes: &[Node], pinned: &[Node], adj: &BTreeMap<Node, Vec<Node>>) -> Option<BTreeMap<Node, Pos>> {
    let mut pos = on_circle(pinned);
    let free: Vec<Node> = nodes.iter().copied().filter(|n| !pos.contains_key(n)).collect();
    if free.is_empty() {
        return (pinned.len() <= 2 || !degenerate(&pos)).then_some(pos);
    }
    if pinned.len() < 3 {
        return None;
    }
    for &n in &free {
        pos.insert(n, (0.0, 0.0));
    }
    // Gauss-Seidel; the system is diagonally dominant on connected components
    for _ in 0..4000 {
        let mut delta: f64 = 0.0;
        for &n in &free {
            let ns = &adj[&n];
            if ns.is_empty() {
                continue;
            }
            let (sx, sy) = ns.iter().fold((0.0, 0.0), |(x, y), m| (x + pos[m].0, y + pos[m].1));
            let p = (sx / ns.len() as f64, sy / ns.len() as f64);
            let old = pos[&n];
            delta = delta.max((p.0 - old.0).abs() + (p.1 - old.1).abs());
            pos.insert(n, p);
        }
        if delta < 1e-9 {
            break;
        }
    }
    (!degenerate(&pos)).then_some(pos)
}

fn degenerate(pos: &BTreeMap<Node, Pos>) -> bool {
    let pts: Vec<Pos> = pos.values().copied().collect();
    if pts.iter().any(|p| !p.0.is_finite() || !p.1.is_finite()) {
        return true;
    }
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            if (a.0 - b.0).hypot(a.1 - b.1) < 1e-3 {
                return true;
            }
        }
    }
    false
}

/// Fruchterman-Reingold with a fixed start, so output is reproducible.
fn force(nodes: &[Node], pinned: &[Node], adj: &BTreeMap<Node, Vec<Node>>) -> BTreeMap<Node, Pos> {
    let fixed = on_circle(pinned);
    let n = nodes.len().max(1) as f64;
    let mut pos: BTreeMap<Node, Pos> = nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let p = fixed.get(&x).copied().unwrap_or_else(|| {
                let t = 2.399_963 * i as f64;
                let r = 0.8 * ((i as f64 + 0.5) / n).sqrt();
                (r * t.cos(), r * t.sin())
            });
            (x, p)
        })
        .collect();
    let k = (4.0 / n).sqrt();
    let mut temp = 0.2;
    for _ in 0..300 {
        let mut disp: BTreeMap<Node, Pos> = nodes.iter().map(|&x| (x, (0.0, 0.0))).collect();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                let (dx, dy) = (pos[&a].0 - pos[&b].0, pos[&a].1 - pos[&b].1);
                let dist = dx.hypot(dy).max(1e-4);
                let f = k * k / dist;
                let (ux, uy) = (dx / dist * f, dy / dist * f);
                let da = disp.get_mut(&a).expect("node");
                *da = (da.0 + ux, da.1 + uy);
                let db = disp.get_mut(&b).expect("node");
                *db = (db.0 - ux, db.1 - uy);
            }
        }
        for (&a, ns) in adj {
            for b in ns {
                let (dx, dy) = (pos[&a].0 - pos[b].0, pos[&a].1 - pos[b].1);
                let dist = dx.hypot(dy).max(1e-4);
                // each edge is listed from both ends, so half the pull
                let f = dist * dist / k / 2.0;
                let da = disp.get_mut(&a).expect("node");
                *da = (da.0 - dx / dist * f, da.1 - dy / dist * f);
            }
        }
        for &x in nodes {
            if fixed.contains_key(&x) {
                continue;
            }
            let (dx, dy) = disp[&x];
            let len = dx.hypot(dy).max(1e-9);
            let step = len.min(temp);
            let p = pos[&x];
            let (mut nx, mut ny) = (p.0 + dx / len * step, p.1 + dy / len * step);
            let r = nx.hypot(ny);
            if r > 1.0 {
                nx /= r;
                ny /= r;
            }
            pos.insert(x, (nx, ny));
        }
        temp *= 0.985;
    }
    pos
}

const CELL: f64 = 320.0;
const RADIUS: f64 = 130.0;

fn svg(d: &Diagram, spec: &RenderSpec) -> String {
    let mut cells: Vec<BTreeMap<Node, Pos>> = Vec::new();
    let faces = d.faces();
    for c in d.components() {
        let mut nodes: Vec<Node> = c.vertices.iter().map(|&v| Node::V(v)).collect();
        let pinned: Vec<Node> = if c.boundary {
            let b: Vec<Node> = (0..d.boundary.len() as u32).map(Node::B).collect();
            nodes.extend(&b);
            b
        } else {
            outer_face(&faces, &c.vertices)
        };
        cells.push(layout_component(d, &nodes, &pinned, spec.layout));
    }
    if d.vertices.is_empty() && !d.boundary.is_empty() && cells.is_empty() {
        let b: Vec<Node> = (0..d.boundary.len() as u32).map(Node::B).collect();
        cells.push(on_circle(&b));
    }
    let circles: Vec<(Gen, Option<crate::map::Spin>)> =
        d.circles.iter().flat_map(|(&k, &n)| std::iter::repeat_n(k, n as usize)).collect();
    let total = cells.len() + circles.len();
    if total == 0 {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"></svg>\n".to_string();
    }
    let cols = (total as f64).sqrt().ceil() as usize;
    let rows = total.div_ceil(cols);
    let origin = |i: usize| ((i % cols) as f64 * CELL + CELL / 2.0, (i / cols) as f64 * CELL + CELL / 2.0);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\">\n",
        cols as f64 * CELL,
        rows as f64 * CELL
    );
    if spec.arrowheads && d.sys.oriented {
        s.push_str(
            "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" \
             markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n",
        );
    }
    let mut at: BTreeMap<Node, Pos> = BTreeMap::new();
    for (i, cell) in cells.iter().enumerate() {
        let (ox, oy) = origin(i);
        for (&n, &(x, y)) in cell {
            at.insert(n, (ox + x * RADIUS, oy + y * RADIUS));
        }
    }
    if !d.boundary.is_empty() {
        let (ox, oy) = origin(0);
        let _ = writeln!(s, "<circle cx=\"{ox:.1}\" cy=\"{oy:.1}\" r=\"{RADIUS}\" fill=\"none\" stroke=\"#ccc\"/>");
    }
    let mut multiplicity: BTreeMap<(Node, Node), usize> = BTreeMap::new();
    for e in edges(d) {
        let key = if e.from <= e.to { (e.from, e.to) } else { (e.to, e.from) };
        let k = multiplicity.entry(key).or_insert(0);
        let (a, b) = (at[&e.from], at[&e.to]);
        let path = edge_path(a, b, *k);
        *k += 1;
        let marker = if e.directed && spec.arrowheads { " marker-end=\"url(#arrow)\"" } else { "" };
        let _ = writeln!(
            s,
            "<path d=\"{path}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{marker}/>",
            spec.color(e.color)
        );
    }
    for (id, v) in &d.vertices {
        let (x, y) = at[&Node::V(*id)];
        let _ = writeln!(
            s,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"4\" fill=\"black\"><title>{id} ({},{})</title></circle>",
            v.lo, v.hi
        );
    }
    for (j, (g, spin)) in circles.iter().enumerate() {
        let (ox, oy) = origin(cells.len() + j);
        let marker = match spin {
            Some(_) if spec.arrowheads => " marker-end=\"url(#arrow)\"",
            _ => "",
        };
        let r = RADIUS / 2.0;
        // a circle as two arcs so the marker has a direction
        let sweep = if *spin == Some(crate::map::Spin::Cw) { 1 } else { 0 };
        let _ = writeln!(
            s,
            "<path d=\"M{:.1},{oy:.1} A{r},{r} 0 1,{sweep} {:.1},{oy:.1} A{r},{r} 0 1,{sweep} {:.1},{oy:.1}\" \
             fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{marker}/>",
            ox - r,
            ox + r,
            ox - r,
            spec.color(*g)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Distinct vertices of the largest face touching `vs`, in face order.
fn outer_face(faces: &[crate::map::Face], vs: &[VertexId]) -> Vec<Node> {
    let Some(first) = vs.first() else { return Vec::new() };
    let best = faces
        .iter()
        .filter(|f| f.darts.iter().any(|d| d.vertex() == Some(*first)))
        .max_by_key(|f| {
            let mut u: Vec<VertexId> = f.darts.iter().filter_map(|d| d.vertex()).collect();
            u.sort_unstable();
            u.dedup();
            u.len()
        });
    let mut out = Vec::new();
    if let Some(f) = best {
        for d in &f.darts {
            if let Some(v) = d.vertex() {
                if !out.contains(&Node::V(v)) {
                    out.push(Node::V(v));
                }
            }
        }
    }
    out
}

fn edge_path(a: Pos, b: Pos, k: usize) -> String {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len = dx.hypot(dy);
    if len < 1e-6 {
        // self-loop
        let r = 12.0 + 6.0 * k as f64;
        return format!("M{:.1},{:.1} c{r:.1},{:.1} {:.1},{:.1} 0,0", a.0, a.1, -2.0 * r, -r, -2.0 * r);
    }
    if k == 0 {
        return format!("M{:.1},{:.1} L{:.1},{:.1}", a.0, a.1, b.0, b.1);
    }
    // alternate sides: 1 -> +1, 2 -> -1, 3 -> +2, ...
    let side = if k % 2 == 1 { 1.0 } else { -1.0 } * k.div_ceil(2) as f64;
    let off = 18.0 * side;
    let (mx, my) = ((a.0 + b.0) / 2.0 - dy / len * off, (a.1 + b.1) / 2.0 + dx / len * off);
    format!("M{:.1},{:.1} Q{mx:.1},{my:.1} {:.1},{:.1}", a.0, a.1, b.0, b.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{glue, parse};

    const STAR: &str = "group I 3\nvertex 1 1 2\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n";

    fn count(s: &str, pat: &str) -> usize {
        s.matches(pat).count()
    }

    #[test]
    fn empty_is_an_empty_canvas() {
        let d = parse("group A 3\n").unwrap();
        let s = render(&d, &RenderSpec::for_diagram(&d));
        assert!(!s.contains("<path") && !s.contains("<circle"));
    }

    #[test]
    fn one_vertex_is_a_centered_star() {
        let d = parse(STAR).unwrap();
        let spec = RenderSpec::for_diagram(&d);
        let s = render(&d, &spec);
        assert_eq!(count(&s, "<path"), 6);
        assert_eq!(count(&s, "stroke=\"blue\""), 3);
        assert_eq!(count(&s, "stroke=\"red\""), 3);
        assert!(s.contains("cx=\"160.0\" cy=\"160.0\" r=\"4\""), "{s}");
        let dot = render(&d, &RenderSpec { format: RenderFormat::Dot, ..spec });
        assert_eq!(count(&dot, " -- "), 6);
    }

    #[test]
    fn oriented_pair_has_six_arrows() {
        let p = parse("group BI 3\nvertex 1 1 2 out@0\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n").unwrap();
        let d = glue(&p, &p).unwrap();
        let spec = RenderSpec::for_diagram(&d);
        let s = render(&d, &spec);
        assert_eq!(count(&s, "marker-end"), 6);
        assert_eq!(count(&s, "stroke=\"green\""), 3);
        // each edge carries one arrow, from an outgoing dart into an incoming one
        let es = edges(&d);
        assert_eq!(es.len(), 6);
        for a in d.darts() {
            let b = d.alpha(a);
            assert_ne!(d.is_out(a), d.is_out(b));
        }
        assert!(es.iter().all(|e| e.directed));
    }

    #[test]
    fn layouts_never_fail() {
        let sys = std::sync::Arc::new(crate::coxeter::build_system(crate::coxeter::Family::A, 3).unwrap());
        let rules = crate::rules::RuleSet::builtin(&sys);
        for d in crate::generate::corpus_sequential(&sys, 5, 12, 3, &rules) {
            for layout in [Layout::Tutte, Layout::Force] {
                let s = render(&d, &RenderSpec { layout, ..RenderSpec::for_diagram(&d) });
                assert!(!s.contains("NaN"));
                assert_eq!(count(&s, "r=\"4\""), d.vertex_count());
            }
        }
    }
}
