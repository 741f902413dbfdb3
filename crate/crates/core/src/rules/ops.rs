//! Primitive relations as replayable operations with explicit sites.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{RuleError, RuleSet};
use crate::coxeter::Gen;
use crate::map::{replace_region, Dart, Diagram, Region, Spin, Vertex, VertexId};

/// One primitive rewrite. Every site is explicit, including the ids of created
/// vertices, so a sequence of operations replays exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Op {
    CircleAdd { color: Gen, spin: Option<Spin> },
    CircleRemove { color: Gen, spin: Option<Spin> },
    /// Swaps the partners of `a` and `b`.
    Bridge { a: Dart, b: Dart },
    /// Deletes a closed two-vertex full gluing.
    Cancel { u: VertexId, v: VertexId },
    /// Creates a closed pair with `u.k` glued to `v.(b - k)`.
    Uncancel {
        u: VertexId,
        v: VertexId,
        lo: Gen,
        hi: Gen,
        b: u16,
        out_u: Option<u16>,
        out_v: Option<u16>,
    },
    /// Moves a commuting strand across vertex `w` from spokes `t..t+m` to the
    /// opposite block. `new_ids` name the crossings created on spokes `t-1, t-2, ...`.
    ZamCommuting { w: VertexId, t: u16, new_ids: Vec<VertexId> },
    /// Exchanges an embedded template side, anchored at the image of the side's
    /// root dart, for the partner side.
    ZamA3 { template: String, side: u8, anchor: Dart, new_ids: Vec<VertexId> },
}

impl Op {
    pub fn rule(&self) -> &'static str {
        match self {
            Op::CircleAdd { .. } => "circle_add",
            Op::CircleRemove { .. } => "circle_remove",
            Op::Bridge { .. } => "bridge",
            Op::Cancel { .. } => "cancel_pair",
            Op::Uncancel { .. } => "cancel_pair_inv",
            Op::ZamCommuting { .. } => "zam_commuting",
            Op::ZamA3 { .. } => "zam_a3",
        }
    }

    /// Site tokens, without the rule name.
    pub fn site(&self) -> Vec<String> {
        fn spin(s: &Option<Spin>) -> String {
            match s {
                None => "-".into(),
                Some(Spin::Cw) => "cw".into(),
                Some(Spin::Ccw) => "ccw".into(),
            }
        }
        fn opt(x: &Option<u16>) -> String {
            x.map_or("-".into(), |v| v.to_string())
        }
        fn ids(v: &[VertexId]) -> String {
            if v.is_empty() {
                "-".into()
            } else {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            }
        }
        match self {
            Op::CircleAdd { color, spin: s } | Op::CircleRemove { color, spin: s } => {
                vec![color.to_string(), spin(s)]
            }
            Op::Bridge { a, b } => vec![a.to_string(), b.to_string()],
            Op::Cancel { u, v } => vec![u.to_string(), v.to_string()],
            Op::Uncancel { u, v, lo, hi, b, out_u, out_v } => vec![
                u.to_string(),
                v.to_string(),
                lo.to_string(),
                hi.to_string(),
                b.to_string(),
                opt(out_u),
                opt(out_v),
            ],
            Op::ZamCommuting { w, t, new_ids } => vec![w.to_string(), t.to_string(), ids(new_ids)],
            Op::ZamA3 { template, side, anchor, new_ids } => {
                vec![template.clone(), side.to_string(), anchor.to_string(), ids(new_ids)]
            }
        }
    }

    pub fn site_len(rule: &str) -> Option<usize> {
        Some(match rule {
            "circle_add" | "circle_remove" | "bridge" | "cancel_pair" => 2,
            "cancel_pair_inv" => 7,
            "zam_commuting" => 3,
            "zam_a3" => 4,
            _ => return None,
        })
    }

    pub fn parse(rule: &str, site: &[&str]) -> Result<Op, String> {
        fn n<T: std::str::FromStr>(s: &str) -> Result<T, String> {
            s.parse().map_err(|_| format!("bad number `{s}`"))
        }
        fn spin(s: &str) -> Result<Option<Spin>, String> {
            match s {
                "-" => Ok(None),
                "cw" => Ok(Some(Spin::Cw)),
                "ccw" => Ok(Some(Spin::Ccw)),
                _ => Err(format!("bad spin `{s}`")),
            }
        }
        fn opt(s: &str) -> Result<Option<u16>, String> {
            if s == "-" {
                Ok(None)
            } else {
                n(s).map(Some)
            }
        }
        fn dart(s: &str) -> Result<Dart, String> {
            if let Some(p) = s.strip_prefix('~') {
                return Ok(Dart::B(n(p)?));
            }
            let (v, t) = s.split_once('.').ok_or_else(|| format!("bad dart `{s}`"))?;
            Ok(Dart::V(n(v)?, n(t)?))
        }
        fn ids(s: &str) -> Result<Vec<VertexId>, String> {
            if s == "-" {
                return Ok(Vec::new());
            }
            s.split(',').map(n).collect()
        }
        if Op::site_len(rule) != Some(site.len()) {
            return Err(format!("rule `{rule}` with {} site tokens", site.len()));
        }
        Ok(match rule {
            "circle_add" => Op::CircleAdd { color: n(site[0])?, spin: spin(site[1])? },
            "circle_remove" => Op::CircleRemove { color: n(site[0])?, spin: spin(site[1])? },
            "bridge" => Op::Bridge { a: dart(site[0])?, b: dart(site[1])? },
            "cancel_pair" => Op::Cancel { u: n(site[0])?, v: n(site[1])? },
            "cancel_pair_inv" => Op::Uncancel {
                u: n(site[0])?,
                v: n(site[1])?,
                lo: n(site[2])?,
                hi: n(site[3])?,
                b: n(site[4])?,
                out_u: opt(site[5])?,
                out_v: opt(site[6])?,
            },
            "zam_commuting" => Op::ZamCommuting { w: n(site[0])?, t: n(site[1])?, new_ids: ids(site[2])? },
            "zam_a3" => Op::ZamA3 {
                template: site[0].to_string(),
                side: n(site[1])?,
                anchor: dart(site[2])?,
                new_ids: ids(site[3])?,
            },
            _ => unreachable!(),
        })
    }

    /// Ids this operation creates.
    pub fn created_ids(&self) -> Vec<VertexId> {
        match self {
            Op::Uncancel { u, v, .. } => vec![*u, *v],
            Op::ZamCommuting { new_ids, .. } | Op::ZamA3 { new_ids, .. } => new_ids.clone(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.rule(), self.site().join(" "))
    }
}

fn fail<T>(msg: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::Precondition(msg.into()))
}

fn check_dart(d: &Diagram, x: Dart) -> Result<(), RuleError> {
    if d.exists(x) {
        Ok(())
    } else {
        fail(format!("dart {x} does not exist"))
    }
}

/// Darts of two different components, or of one face, may be bridged.
fn bridgeable(d: &Diagram, a: Dart, b: Dart) -> bool {
    if d.same_face_traversal(a, b) {
        return true;
    }
    let comps = d.components();
    let key = |x: Dart| -> Option<usize> {
        let probe = match x {
            Dart::V(v, _) => v,
            Dart::B(_) => return comps.iter().position(|c| c.boundary),
        };
        comps.iter().position(|c| c.vertices.binary_search(&probe).is_ok())
    };
    match (key(a), key(b)) {
        (Some(x), Some(y)) => x != y,
        _ => false,
    }
}

pub(crate) fn bridge_check(d: &Diagram, a: Dart, b: Dart) -> Result<(), RuleError> {
    check_dart(d, a)?;
    check_dart(d, b)?;
    if a == b {
        return fail("identical edge bound twice");
    }
    if d.color(a) != d.color(b) {
        return fail("bridge between different colors");
    }
    if b == d.alpha(a) {
        if !d.same_face_traversal(a, b) {
            return fail("edges not on a common face");
        }
        return Ok(());
    }
    if !bridgeable(d, a, b) {
        return fail("edges not on a common face");
    }
    if d.is_out(a) != d.is_out(b) {
        return fail("orientation clash");
    }
    Ok(())
}

fn chain(d: &Diagram, w: VertexId, t: u16) -> Result<(Gen, Vec<(VertexId, u16)>), RuleError> {
    let x = d.vertices.get(&w).ok_or_else(|| RuleError::Precondition(format!("no vertex {w}")))?;
    let m = x.m;
    let deg = x.degree();
    if t >= deg {
        return fail("spoke out of range");
    }
    let mut out = Vec::new();
    let mut c = None;
    for k in 0..m {
        let spoke = (t + k) % deg;
        let Dart::V(y, p) = x.links[spoke as usize] else {
            return fail("spoke leads to the boundary");
        };
        if y == w || out.iter().any(|(z, _)| *z == y) {
            return fail("chain not consecutive");
        }
        let yv = &d.vertices[&y];
        if yv.m != 2 {
            return fail("chain vertex is not a crossing");
        }
        let strand = yv.color((p + 1) % 4);
        match c {
            None => c = Some(strand),
            Some(c0) if c0 != strand => return fail("chain colors differ"),
            _ => {}
        }
        out.push((y, p));
    }
    let c = c.unwrap();
    if x.has_color(c) || d.sys.m(c, x.lo) != Some(2) || d.sys.m(c, x.hi) != Some(2) {
        return fail("strand color does not commute with the vertex colors");
    }
    for k in 0..out.len() - 1 {
        let (y, p) = out[k];
        let (z, q) = out[k + 1];
        if d.alpha(Dart::V(y, (p + 3) % 4)) != Dart::V(z, (q + 1) % 4) {
            return fail("chain not consecutive");
        }
    }
    let members: BTreeSet<VertexId> = out.iter().map(|x| x.0).chain([w]).collect();
    let outside = |x: Dart| !matches!(x, Dart::V(v, _) if members.contains(&v));
    let (y0, p0) = out[0];
    let (yl, pl) = out[out.len() - 1];
    let mut ends = vec![d.alpha(Dart::V(y0, (p0 + 1) % 4)), d.alpha(Dart::V(yl, (pl + 3) % 4))];
    ends.extend(out.iter().map(|&(y, p)| d.alpha(Dart::V(y, (p + 2) % 4))));
    if !ends.iter().all(|&e| outside(e)) {
        return fail("degenerate chain");
    }
    for k in m..deg {
        let s = (t + k) % deg;
        if let Dart::V(y, _) = x.links[s as usize] {
            if y == w {
                return fail("degenerate opposite block");
            }
        }
    }
    Ok((c, out))
}

fn zam_commuting(d: &mut Diagram, w: VertexId, t: u16, new_ids: &[VertexId]) -> Result<(), RuleError> {
    if d.sys.oriented {
        return fail("commuting ZAM is not available for oriented systems");
    }
    let (c, xs) = chain(d, w, t)?;
    let x = d.vertices[&w].clone();
    let (m, deg) = (x.m, x.degree());
    let gone: BTreeSet<VertexId> = xs.iter().map(|p| p.0).collect();
    if new_ids.len() != m as usize
        || new_ids.iter().collect::<BTreeSet<_>>().len() != new_ids.len()
        || new_ids.iter().any(|i| d.vertices.contains_key(i) && !gone.contains(i))
    {
        return fail("bad new ids");
    }
    let (y0, p0) = xs[0];
    let (yl, pl) = xs[xs.len() - 1];
    let e_in = d.alpha(Dart::V(y0, (p0 + 1) % 4));
    let e_out = d.alpha(Dart::V(yl, (pl + 3) % 4));
    for (k, &(y, p)) in xs.iter().enumerate() {
        let far = d.alpha(Dart::V(y, (p + 2) % 4));
        d.vertices.remove(&y);
        d.link(Dart::V(w, (t + k as u16) % deg), far);
    }
    let mut prev: Option<Dart> = None;
    for (k, &id) in new_ids.iter().enumerate() {
        let spoke = (t + 2 * deg - 1 - k as u16) % deg;
        let col = x.color(spoke);
        let q = if col < c { 0 } else { 1 };
        let far = d.alpha(Dart::V(w, spoke));
        d.add_vertex(id, Vertex::new(col, c, 2, None));
        d.link(Dart::V(w, spoke), Dart::V(id, q));
        d.link(Dart::V(id, q + 2), far);
        match prev {
            None => d.link(e_in, Dart::V(id, (q + 3) % 4)),
            Some(p) => d.link(p, Dart::V(id, (q + 3) % 4)),
        }
        prev = Some(Dart::V(id, q + 1));
    }
    d.link(prev.unwrap(), e_out);
    Ok(())
}

/// Maps a template side into the host, anchored at `anchor`.
pub(crate) fn embed(
    host: &Diagram,
    side: &Diagram,
    anchor: Dart,
) -> Option<(BTreeMap<VertexId, (VertexId, u16)>, Region)> {
    let Dart::V(h0, s0) = anchor else { return None };
    let root = *side.vertices.keys().next()?;
    let mut map: BTreeMap<VertexId, (VertexId, u16)> = BTreeMap::new();
    let mut used: BTreeSet<VertexId> = BTreeSet::new();
    let fits = |tv: VertexId, hv: VertexId, off: u16| -> bool {
        let (a, b) = (&side.vertices[&tv], match host.vertices.get(&hv) {
            Some(x) => x,
            None => return false,
        });
        a.lo == b.lo && a.hi == b.hi && a.m == b.m && off % 2 == 0 && a.out_start.is_none() == b.out_start.is_none()
            && match (a.out_start, b.out_start) {
                (Some(oa), Some(ob)) => (oa + off) % a.degree() == ob,
                _ => true,
            }
    };
    if !fits(root, h0, s0) {
        return None;
    }
    map.insert(root, (h0, s0));
    used.insert(h0);
    let mut queue = vec![root];
    let mut i = 0;
    while i < queue.len() {
        let tv = queue[i];
        i += 1;
        let (hv, off) = map[&tv];
        let tx = &side.vertices[&tv];
        let deg = tx.degree();
        for k in 0..deg {
            let hd = Dart::V(hv, (k + off) % deg);
            match tx.links[k as usize] {
                Dart::V(tw, tk) => {
                    let Dart::V(hw, hk) = host.alpha(hd) else { return None };
                    let tdeg = side.vertices[&tw].degree();
                    let off_w = (hk + tdeg - tk % tdeg) % tdeg;
                    match map.get(&tw) {
                        Some(&(mw, mo)) => {
                            if mw != hw || mo != off_w {
                                return None;
                            }
                        }
                        None => {
                            if used.contains(&hw) || !fits(tw, hw, off_w) {
                                return None;
                            }
                            map.insert(tw, (hw, off_w));
                            used.insert(hw);
                            queue.push(tw);
                        }
                    }
                }
                Dart::B(_) => {}
            }
        }
    }
    if map.len() != side.vertices.len() {
        return None;
    }
    let mut outer = Vec::new();
    for p in &side.boundary {
        let Dart::V(tv, tk) = p.link else { return None };
        let (hv, off) = map[&tv];
        let deg = side.vertices[&tv].degree();
        let o = host.alpha(Dart::V(hv, (tk + off) % deg));
        if let Dart::V(w, _) = o {
            if used.contains(&w) {
                return None;
            }
        }
        outer.push(o);
    }
    let mut vertices: Vec<VertexId> = used.into_iter().collect();
    vertices.sort_unstable();
    Some((map, Region { vertices, outer }))
}

fn zam_a3(
    d: &mut Diagram,
    rules: &RuleSet,
    template: &str,
    side: u8,
    anchor: Dart,
    new_ids: &[VertexId],
) -> Result<(), RuleError> {
    let t = rules.template(template).ok_or_else(|| RuleError::Precondition(format!("unknown template {template}")))?;
    if side != 1 && side != 2 {
        return fail("side must be 1 or 2");
    }
    if t.sides[0].sys.as_ref() != d.sys.as_ref() {
        return fail("template belongs to another system");
    }
    let from = &t.sides[side as usize - 1];
    let to = &t.sides[2 - side as usize];
    let (_, region) = embed(d, from, anchor).ok_or_else(|| RuleError::Precondition("no embedding at site".into()))?;
    let (out, _) = replace_region(d, &region, to, Some(new_ids))?;
    *d = out;
    Ok(())
}

/// Applies one primitive in place. Preconditions are checked before mutation.
pub fn apply_op(d: &mut Diagram, op: &Op, rules: &RuleSet) -> Result<(), RuleError> {
    match op {
        Op::CircleAdd { color, spin } => {
            d.sys.check_gen(*color).map_err(|e| RuleError::Precondition(e.to_string()))?;
            if spin.is_some() != d.sys.oriented {
                return fail("circle direction does not match the system");
            }
            d.add_circle(*color, *spin);
        }
        Op::CircleRemove { color, spin } => {
            if !d.remove_circle(*color, *spin) {
                return fail("no such circle");
            }
        }
        Op::Bridge { a, b } => {
            bridge_check(d, *a, *b)?;
            if *b == d.alpha(*a) {
                let spin = d.is_out(*a).map(|o| if o { Spin::Ccw } else { Spin::Cw });
                d.add_circle(d.color(*a), spin);
            } else {
                let (pa, pb) = (d.alpha(*a), d.alpha(*b));
                d.link(*a, pb);
                d.link(*b, pa);
            }
        }
        Op::Cancel { u, v } => {
            cancel_check(d, *u, *v)?;
            d.vertices.remove(u);
            d.vertices.remove(v);
        }
        Op::Uncancel { u, v, lo, hi, b, out_u, out_v } => {
            if u == v || d.vertices.contains_key(u) || d.vertices.contains_key(v) {
                return fail("ids already in use");
            }
            if lo >= hi || d.sys.check_gen(*hi).is_err() || *lo == 0 {
                return fail("bad vertex type");
            }
            let m = d.sys.m(*lo, *hi).ok_or_else(|| RuleError::Precondition("infinite exponent".into()))?;
            let deg = 2 * m;
            if b % 2 != 0 || *b >= deg {
                return fail("gluing shift must be even and in range");
            }
            if out_u.is_some() != d.sys.oriented || out_v.is_some() != d.sys.oriented {
                return fail("orientation does not match the system");
            }
            if let (Some(ou), Some(ov)) = (out_u, out_v) {
                if *ou >= deg || *ov >= deg || (b + 2 * deg - ou - ov + 1) % deg != 0 {
                    return fail("oriented direction mismatch");
                }
            }
            d.add_vertex(*u, Vertex::new(*lo, *hi, m, *out_u));
            d.add_vertex(*v, Vertex::new(*lo, *hi, m, *out_v));
            for k in 0..deg {
                d.link(Dart::V(*u, k), Dart::V(*v, (b + deg - k) % deg));
            }
        }
        Op::ZamCommuting { w, t, new_ids } => {
            let mut tmp = d.clone();
            zam_commuting(&mut tmp, *w, *t, new_ids)?;
            *d = tmp;
        }
        Op::ZamA3 { template, side, anchor, new_ids } => {
            zam_a3(d, rules, template, *side, *anchor, new_ids)?;
        }
    }
    Ok(())
}

/// Returns the gluing shift `b` of a closed pair.
pub(crate) fn cancel_check(d: &Diagram, u: VertexId, v: VertexId) -> Result<u16, RuleError> {
    if u == v {
        return fail("a vertex cannot cancel itself");
    }
    let (Some(x), Some(y)) = (d.vertices.get(&u), d.vertices.get(&v)) else {
        return fail("no such vertices");
    };
    if (x.lo, x.hi, x.m) != (y.lo, y.hi, y.m) {
        return fail("vertices of different types");
    }
    let deg = x.degree();
    let Dart::V(pv, b) = x.links[0] else {
        return fail("pattern not a closed 2-vertex full gluing");
    };
    if pv != v {
        return fail("pattern not a closed 2-vertex full gluing");
    }
    for k in 0..deg {
        if x.links[k as usize] != Dart::V(v, (b + deg - k) % deg) {
            return fail("pattern not a closed 2-vertex full gluing");
        }
    }
    if let (Some(ou), Some(ov)) = (x.out_start, y.out_start) {
        if (b + 2 * deg - ou - ov + 1) % deg != 0 {
            return fail("oriented direction mismatch");
        }
    }
    Ok(b)
}

/// The operation undoing `op`, computed from the state before `op`.
pub fn inverse_op(pre: &Diagram, op: &Op, rules: &RuleSet) -> Result<Op, RuleError> {
    Ok(match op {
        Op::CircleAdd { color, spin } => Op::CircleRemove { color: *color, spin: *spin },
        Op::CircleRemove { color, spin } => Op::CircleAdd { color: *color, spin: *spin },
        Op::Bridge { a, b } => {
            if *b == pre.alpha(*a) {
                let spin = pre.is_out(*a).map(|o| if o { Spin::Ccw } else { Spin::Cw });
                Op::CircleRemove { color: pre.color(*a), spin }
            } else {
                Op::Bridge { a: pre.alpha(*b), b: pre.alpha(*a) }
            }
        }
        Op::Cancel { u, v } => {
            let b = cancel_check(pre, *u, *v)?;
            let (x, y) = (&pre.vertices[u], &pre.vertices[v]);
            Op::Uncancel { u: *u, v: *v, lo: x.lo, hi: x.hi, b, out_u: x.out_start, out_v: y.out_start }
        }
        Op::Uncancel { u, v, .. } => Op::Cancel { u: *u, v: *v },
        Op::ZamCommuting { w, t, .. } => {
            let (_, xs) = chain(pre, *w, *t)?;
            let deg = pre.vertices[w].degree();
            let m = pre.vertices[w].m;
            Op::ZamCommuting { w: *w, t: (t + m) % deg, new_ids: xs.iter().rev().map(|x| x.0).collect() }
        }
        Op::ZamA3 { template, side, anchor, new_ids } => {
            let t = rules
                .template(template)
                .ok_or_else(|| RuleError::Precondition(format!("unknown template {template}")))?;
            let from = &t.sides[*side as usize - 1];
            let (map, _) = embed(pre, from, *anchor)
                .ok_or_else(|| RuleError::Precondition("no embedding at site".into()))?;
            let first = *new_ids.first().ok_or_else(|| RuleError::Precondition("no ids".into()))?;
            Op::ZamA3 {
                template: template.clone(),
                side: 3 - side,
                anchor: Dart::V(first, 0),
                new_ids: map.values().map(|x| x.0).collect(),
            }
        }
    })
}
