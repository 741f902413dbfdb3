//! Derived moves built from primitives: deleting and creating adjacent pairs,
//! and pushing a commuting crossing around a vertex.

use std::fmt;

use super::{apply_op, inverse_op, Op, RuleError, RuleSet, Session};
use crate::coxeter::Gen;
use crate::map::{Dart, Diagram, Spin, Vertex, VertexId};

fn fail<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Precondition(msg.into()))
}

/// Where a canceling pair is inserted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InsertSite {
    /// The edge at this dart.
    Edge(Dart),
    /// A circle record of this color and spin.
    Circle(Gen, Option<Spin>),
}

impl fmt::Display for InsertSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InsertSite::Edge(x) => write!(f, "{x}"),
            InsertSite::Circle(c, None) => write!(f, "circle:{c}"),
            InsertSite::Circle(c, Some(Spin::Cw)) => write!(f, "circle:{c}:cw"),
            InsertSite::Circle(c, Some(Spin::Ccw)) => write!(f, "circle:{c}:ccw"),
        }
    }
}

/// Bridges and the final cancellation deleting two adjacent vertices of one type.
///
/// The bridges pair `u.(a + k)` with `v.(b - k)` around a connecting edge
/// `u.a - v.b`, so the pair becomes a closed full gluing. `prefer` names the
/// connecting edge to try first.
pub(crate) fn delete_pair_ops(
    d: &Diagram,
    u: VertexId,
    v: VertexId,
    rules: &RuleSet,
    prefer: Option<(u16, u16)>,
) -> Result<Vec<Op>, RuleError> {
    if u == v {
        return fail("a vertex cannot pair with itself");
    }
    let (Some(x), Some(y)) = (d.vertices.get(&u), d.vertices.get(&v)) else {
        return fail("no such vertices");
    };
    if (x.lo, x.hi, x.m) != (y.lo, y.hi, y.m) {
        return fail("vertices of different types");
    }
    let deg = x.degree();
    let mut edges: Vec<(u16, u16)> = (0..deg)
        .filter_map(|a| match x.links[a as usize] {
            Dart::V(w, b) if w == v => Some((a, b)),
            _ => None,
        })
        .collect();
    if edges.is_empty() {
        return fail("vertices are not adjacent");
    }
    if let Some(p) = prefer {
        if let Some(i) = edges.iter().position(|&e| e == p) {
            edges.swap(0, i);
        }
    }
    let mut last = RuleError::Precondition("bridging blocked".into());
    'edge: for (a, b) in edges {
        let shift = (a + b) % deg;
        if let (Some(ou), Some(ov)) = (x.out_start, y.out_start) {
            if (shift + 2 * deg - ou - ov + 1) % deg != 0 {
                last = RuleError::Precondition("oriented direction mismatch".into());
                continue;
            }
        }
        let mut scratch = d.clone();
        let mut ops = Vec::new();
        for k in 1..deg {
            let p = Dart::V(u, (a + k) % deg);
            let q = Dart::V(v, (b + deg - k) % deg);
            if scratch.alpha(p) == q {
                continue;
            }
            let op = Op::Bridge { a: p, b: scratch.alpha(q) };
            if let Err(e) = apply_op(&mut scratch, &op, rules) {
                last = e;
                continue 'edge;
            }
            ops.push(op);
        }
        let op = Op::Cancel { u, v };
        if let Err(e) = apply_op(&mut scratch, &op, rules) {
            last = e;
            continue;
        }
        ops.push(op);
        return Ok(ops);
    }
    Err(last)
}

/// Inverts an operation sequence that starts at `start`.
pub(crate) fn reverse_ops(start: &Diagram, ops: &[Op], rules: &RuleSet) -> Result<Vec<Op>, RuleError> {
    let mut d = start.clone();
    let mut inv = Vec::with_capacity(ops.len());
    for op in ops {
        inv.push(inverse_op(&d, op, rules)?);
        apply_op(&mut d, op, rules)?;
    }
    inv.reverse();
    Ok(inv)
}

/// Operations creating a canceling pair `w`, `w'` of type `(lo, hi)` across `m`
/// parallel strands. `near` lists the strand darts, in counterclockwise order
/// around the face they share, that the pair will be attached to; `w` is the
/// vertex next to them. Unoriented systems only.
pub(crate) fn create_pair_ops(
    d: &Diagram,
    near: &[Dart],
    lo: Gen,
    hi: Gen,
    w: VertexId,
    w2: VertexId,
    rules: &RuleSet,
) -> Result<Vec<Op>, RuleError> {
    if d.sys.oriented {
        return Err(RuleError::Unsupported("pair creation across strands in oriented systems".into()));
    }
    let m = d.sys.m(lo, hi).ok_or_else(|| RuleError::Precondition("infinite exponent".into()))?;
    if near.len() != m as usize || lo >= hi {
        return fail("wrong number of strands");
    }
    if w == w2 || d.vertices.contains_key(&w) || d.vertices.contains_key(&w2) {
        return fail("ids already in use");
    }
    for (i, &n) in near.iter().enumerate() {
        if !d.exists(n) || near[..i].contains(&n) || near.contains(&d.alpha(n)) {
            return fail("strands are not distinct edges");
        }
    }
    let far: Vec<Dart> = near.iter().map(|&n| d.alpha(n)).collect();
    let s: u16 = if d.color(near[0]) == lo { 0 } else { 1 };
    let s2 = 1 - s;
    let proto = Vertex::new(lo, hi, m, None);
    for (j, &n) in near.iter().enumerate() {
        if d.color(n) != proto.color(s + j as u16) {
            return fail("strand colors do not alternate");
        }
    }
    let mut t = d.clone();
    t.add_vertex(w, proto.clone());
    t.add_vertex(w2, proto);
    let deg = 2 * m;
    for j in 0..m {
        t.link(Dart::V(w, s + j), near[j as usize]);
        t.link(Dart::V(w, (s + m + j) % deg), Dart::V(w2, (s2 + m - 1 - j) % deg));
        t.link(Dart::V(w2, (s2 + m + j) % deg), far[(m - 1 - j) as usize]);
    }
    if !t.is_valid() {
        return fail("strands do not share a face in this order");
    }
    let ops = delete_pair_ops(&t, w, w2, rules, Some((s + m, (s2 + m - 1) % deg)))?;
    let mut back = t.clone();
    for op in &ops {
        apply_op(&mut back, op, rules)?;
    }
    if back != *d {
        return fail("pair deletion does not restore the strands");
    }
    reverse_ops(&t, &ops, rules)
}

/// Deletes two adjacent vertices of one type, recorded as one macro step.
pub fn delete_pair(s: &mut Session, u: VertexId, v: VertexId) -> Result<(), RuleError> {
    let ops = delete_pair_ops(s.diagram(), u, v, s.rules(), None)?;
    s.macro_op("delete_adjacent_pair", vec![u.to_string(), v.to_string()], |s| s.apply_all(ops))
}

/// Deletes `u`, `v` through a chosen connecting edge `u.a - v.b`.
pub(crate) fn delete_pair_via(
    s: &mut Session,
    u: VertexId,
    v: VertexId,
    edge: (u16, u16),
) -> Result<(), RuleError> {
    let ops = delete_pair_ops(s.diagram(), u, v, s.rules(), Some(edge))?;
    s.macro_op("delete_adjacent_pair", vec![u.to_string(), v.to_string()], |s| s.apply_all(ops))
}

/// Inserts a canceling pair on an edge or a circle. Returns the new ids.
pub fn insert_pair(s: &mut Session, site: InsertSite, lo: Gen, hi: Gen) -> Result<(VertexId, VertexId), RuleError> {
    let sys = s.diagram().sys.clone();
    if lo >= hi || sys.check_gen(hi).is_err() || lo == 0 {
        return fail("bad vertex type");
    }
    let m = sys.m(lo, hi).ok_or_else(|| RuleError::Precondition("infinite exponent".into()))?;
    let deg = 2 * m;
    let color = match site {
        InsertSite::Edge(x) => {
            if !s.diagram().exists(x) {
                return fail(format!("dart {x} does not exist"));
            }
            s.diagram().color(x)
        }
        InsertSite::Circle(c, _) => c,
    };
    if color != lo && color != hi {
        return fail("edge color does not belong to the vertex type");
    }
    let (out_u, out_v) = if sys.oriented { (Some(0), Some(1)) } else { (None, None) };
    let site_tokens = vec![site.to_string(), lo.to_string(), hi.to_string()];
    s.macro_op("insert_adjacent_pair", site_tokens, |s| {
        let u = s.fresh_id();
        let v = s.fresh_id();
        if let InsertSite::Circle(c, spin) = site {
            s.apply(Op::CircleRemove { color: c, spin })?;
        }
        s.apply(Op::Uncancel { u, v, lo, hi, b: 0, out_u, out_v })?;
        if let InsertSite::Edge(x) = site {
            let want = s.diagram().is_out(x);
            let proto = Vertex::new(lo, hi, m, out_u);
            let k = (0..deg)
                .find(|&k| proto.color(k) == color && proto.is_out(k) == want)
                .ok_or_else(|| RuleError::Precondition("no slot with a matching direction".into()))?;
            s.apply(Op::Bridge { a: x, b: Dart::V(u, k) })?;
        }
        Ok((u, v))
    })
}

/// Creates a canceling pair across `m` parallel strands (see [`create_pair_ops`]),
/// trying the given strand order and its reverse. Returns `(w, w')`.
pub fn create_pair(s: &mut Session, near: &[Dart], lo: Gen, hi: Gen) -> Result<(VertexId, VertexId), RuleError> {
    let w = s.diagram().next_id();
    let w2 = w + 1;
    let mut rev = near.to_vec();
    rev.reverse();
    let mut last = RuleError::Precondition("no strands".into());
    for order in [near.to_vec(), rev] {
        match create_pair_ops(s.diagram(), &order, lo, hi, w, w2, s.rules()) {
            Ok(ops) => {
                let site = vec![order.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","), lo.to_string(), hi.to_string()];
                s.macro_op("create_pair", site, |s| s.apply_all(ops))?;
                return Ok((w, w2));
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Moves the crossing on spoke `e` of node `x` around `x`: fingers of the
/// crossing strand are pulled over the next `m - 1` spokes, then a commuting
/// ZAM carries the strand across the vertex. Either direction may be used.
pub fn push_crossing(s: &mut Session, x: VertexId, e: u16) -> Result<(), RuleError> {
    let mut last = RuleError::Precondition("crossing cannot be pushed".into());
    for dir in [1i64, -1] {
        let r = s.macro_op("push_crossing", vec![x.to_string(), e.to_string()], |s| push_dir(s, x, e, dir));
        match r {
            Ok(()) => return Ok(()),
            Err(err @ RuleError::Budget(_)) => return Err(err),
            Err(err) => last = err,
        }
    }
    Err(last)
}

fn push_dir(s: &mut Session, x: VertexId, e: u16, dir: i64) -> Result<(), RuleError> {
    let xv = s.diagram().vertex(x).clone();
    let m = xv.m;
    let Dart::V(c0, p) = s.diagram().alpha(Dart::V(x, e)) else {
        return fail("spoke leads to the boundary");
    };
    let cv = s.diagram().vertex(c0).clone();
    if cv.m != 2 {
        return fail("no crossing on the spoke");
    }
    let strand = cv.color((p + 1) % 4);
    let mut side = Dart::V(c0, if dir > 0 { (p + 3) % 4 } else { (p + 1) % 4 });
    for k in 1..m as i64 {
        let spoke = Dart::V(x, xv.slot(e as i64 + dir * k));
        let sc = xv.color(match spoke {
            Dart::V(_, t) => t,
            _ => unreachable!(),
        });
        let (lo, hi) = if sc < strand { (sc, strand) } else { (strand, sc) };
        let (w, _) = create_pair(s, &[spoke, side], lo, hi)?;
        let wv = s.diagram().vertex(w);
        let slot = (0..4u16)
            .find(|&t| wv.links[t as usize] == side)
            .ok_or_else(|| RuleError::Precondition("finger not attached".into()))?;
        side = Dart::V(w, (slot + 2) % 4);
    }
    let t = if dir > 0 { e } else { xv.slot(e as i64 - (m as i64 - 1)) };
    let new_ids: Vec<VertexId> = (0..m).map(|_| s.fresh_id()).collect();
    s.apply(Op::ZamCommuting { w: x, t, new_ids })
}
