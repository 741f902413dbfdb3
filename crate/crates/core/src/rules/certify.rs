//! Certified patch replacement.
//!
//! A region `P1` of a host is exchanged for a patch `P2` with the same boundary,
//! given a reduction of the closed diagram `glue(P1, P2)` to empty. The exchange
//! is spelled out in primitives: the closed double `glue(P2, P2)` is created from
//! nothing, its seam is bridged into the region boundary so that the outside
//! meets one copy of `P2` and the region closes up against the other, and the
//! closed part is then reduced by the certificate's operations.

use std::collections::{BTreeMap, BTreeSet};

use super::{apply_op, bridge_check, delete_pair_ops, reverse_ops, Op, RuleError, RuleSet, Session};
use crate::coxeter::Gen;
use crate::map::{
    component_code, cut_region, digest, glue, traverse, BoundaryPoint, Dart, Diagram, MapError, Region,
    Spin, VertexId,
};
use crate::trace::{verify_certificate, Certificate, Trace};

/// A closed diagram with primitive operations reducing it to empty.
#[derive(Debug, Clone)]
pub(crate) struct Reference {
    pub glued: Diagram,
    pub ops: Vec<Op>,
}

impl Reference {
    pub fn from_certificate(c: &Certificate) -> Self {
        Reference { glued: c.glued.clone(), ops: c.trace.primitives() }
    }
}

fn cert_err<T>(msg: &str) -> Result<T, RuleError> {
    Err(RuleError::Certificate(msg.to_string()))
}

type IsoMap = BTreeMap<VertexId, (VertexId, u16)>;

/// Isomorphism between two closed diagrams: per vertex of `a`, its image in `b`
/// and the slot offset.
pub(crate) fn iso_map(a: &Diagram, b: &Diagram) -> Option<IsoMap> {
    if !a.is_closed() || !b.is_closed() || a.vertex_count() != b.vertex_count() {
        return None;
    }
    let mut pool: Vec<(Vec<u32>, Dart)> =
        b.components().iter().map(|c| component_code(b, &c.vertices)).collect();
    let mut map = BTreeMap::new();
    for c in a.components() {
        let (code, root) = component_code(a, &c.vertices);
        let i = pool.iter().position(|x| x.0 == code)?;
        let (_, root_b) = pool.swap_remove(i);
        let (_, oa) = traverse(a, root, None)?;
        let (_, ob) = traverse(b, root_b, None)?;
        for (&(va, ea), &(vb, eb)) in oa.iter().zip(ob.iter()) {
            let deg = a.vertices[&va].degree();
            map.insert(va, (vb, (eb + deg - ea) % deg));
        }
    }
    Some(map)
}

/// Rewrites an operation for an isomorphic copy. Created vertices take ids
/// from `fresh` and are added to the map with offset 0.
pub(crate) fn transport(
    op: &Op,
    map: &mut IsoMap,
    degree: &dyn Fn(VertexId) -> u16,
    fresh: &mut dyn FnMut() -> VertexId,
) -> Op {
    let dart = |map: &IsoMap, x: Dart| match x {
        Dart::V(v, s) => {
            let (w, off) = map[&v];
            Dart::V(w, (s + off) % degree(w))
        }
        b => b,
    };
    let mut renew = |map: &mut IsoMap, ids: &[VertexId]| -> Vec<VertexId> {
        ids.iter()
            .map(|&i| {
                let n = fresh();
                map.insert(i, (n, 0));
                n
            })
            .collect()
    };
    match op {
        Op::CircleAdd { .. } | Op::CircleRemove { .. } => op.clone(),
        Op::Bridge { a, b } => Op::Bridge { a: dart(map, *a), b: dart(map, *b) },
        Op::Cancel { u, v } => Op::Cancel { u: map[u].0, v: map[v].0 },
        Op::Uncancel { u, v, lo, hi, b, out_u, out_v } => {
            let ids = renew(map, &[*u, *v]);
            Op::Uncancel { u: ids[0], v: ids[1], lo: *lo, hi: *hi, b: *b, out_u: *out_u, out_v: *out_v }
        }
        Op::ZamCommuting { w, t, new_ids } => {
            let (nw, off) = map[w];
            let t = (t + off) % degree(nw);
            Op::ZamCommuting { w: nw, t, new_ids: renew(map, new_ids) }
        }
        Op::ZamA3 { template, side, anchor, new_ids } => {
            let anchor = dart(map, *anchor);
            Op::ZamA3 { template: template.clone(), side: *side, anchor, new_ids: renew(map, new_ids) }
        }
    }
}

/// Operations reducing a closed double `glue(P, P)` to empty: mirror pairs are
/// deleted across the seam, then circles are removed.
fn double_ops(
    z: &Diagram,
    twin: &dyn Fn(VertexId) -> Option<VertexId>,
    rules: &RuleSet,
) -> Result<Vec<Op>, RuleError> {
    let mut d = z.clone();
    let mut ops = Vec::new();
    'outer: while !d.vertices.is_empty() {
        let ids: Vec<VertexId> = d.vertices.keys().copied().collect();
        for u in ids {
            let Some(t) = twin(u) else { continue };
            let x = &d.vertices[&u];
            for a in 0..x.degree() {
                let Dart::V(w, b) = x.links[a as usize] else { continue };
                if w != t {
                    continue;
                }
                if let Ok(pair) = delete_pair_ops(&d, u, t, rules, Some((a, b))) {
                    for op in &pair {
                        apply_op(&mut d, op, rules)?;
                    }
                    ops.extend(pair);
                    continue 'outer;
                }
            }
        }
        return cert_err("double has no deletable mirror pair");
    }
    let circles: Vec<(Gen, Option<Spin>)> = d
        .circles
        .iter()
        .flat_map(|(&k, &n)| std::iter::repeat(k).take(n as usize))
        .collect();
    for (color, spin) in circles {
        ops.push(Op::CircleRemove { color, spin });
    }
    Ok(ops)
}

fn spin_of(b: &BoundaryPoint) -> Option<Spin> {
    b.inward.map(|inw| if inw { Spin::Ccw } else { Spin::Cw })
}

/// Replaces `region` of the session diagram by `patch`, justified by a
/// reduction of a diagram isomorphic to `glue(cut region, patch)`. Recorded as
/// one macro step carrying the certificate.
pub(crate) fn replace_certified(
    s: &mut Session,
    region: &Region,
    patch: &Diagram,
    reference: &Reference,
) -> Result<(), RuleError> {
    let cut = cut_region(s.diagram(), region)?;
    if cut.boundary_signature() != patch.boundary_signature() {
        return Err(MapError::BoundaryMismatch("region and patch boundaries differ".into()).into());
    }
    let ids = region.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    let site = vec![if ids.is_empty() { "-".into() } else { ids }, digest(patch)];
    s.macro_op("patch_replace", site, |s| replace_inner(s, region, patch, reference))
}

enum Seam {
    Point(usize),
    Arc(usize, usize),
}

fn replace_inner(
    s: &mut Session,
    region: &Region,
    patch: &Diagram,
    reference: &Reference,
) -> Result<(), RuleError> {
    let rules = s.rules();

    // the patch under fresh host ids
    let relabel: BTreeMap<VertexId, VertexId> = patch.vertices.keys().map(|&p| (p, s.fresh_id())).collect();
    let tr = |x: Dart| match x {
        Dart::V(v, t) => Dart::V(relabel[&v], t),
        b => b,
    };
    let mut p2 = Diagram::new(patch.sys.clone());
    for (pid, v) in &patch.vertices {
        let mut v = v.clone();
        for l in v.links.iter_mut() {
            *l = tr(*l);
        }
        p2.add_vertex(relabel[pid], v);
    }
    p2.boundary = patch.boundary.iter().map(|b| BoundaryPoint { link: tr(b.link), ..b.clone() }).collect();
    p2.circles = patch.circles.clone();

    // its closed double, created from nothing
    let z = glue(&p2, &p2)?;
    let off = p2.vertices.keys().next_back().copied().unwrap_or(0);
    if let Some(&top) = z.vertices.keys().next_back() {
        s.reserve_id(top);
    }
    let mine: BTreeSet<VertexId> = p2.vertices.keys().copied().collect();
    let twin = |u: VertexId| mine.contains(&u).then_some(u + off);
    let reduce_z = double_ops(&z, &twin, rules)?;
    let create_z = reverse_ops(&z, &reduce_z, rules)?;
    s.apply_all(create_z)?;

    // bridge the seam: outside to the first copy, region to the mirror copy
    let outer = &region.outer;
    let mut pending: Vec<Seam> = Vec::new();
    for (k, b) in p2.boundary.iter().enumerate() {
        match b.link {
            Dart::V(..) => pending.push(Seam::Point(k)),
            Dart::B(j) if j as usize > k => pending.push(Seam::Arc(k, j as usize)),
            Dart::B(_) => {}
        }
    }
    let mut extra: Vec<(Gen, Option<Spin>)> = Vec::new();
    let mut closed_circles: Vec<(Gen, Option<Spin>)> = Vec::new();
    while !pending.is_empty() {
        let before = pending.len();
        let mut i = 0;
        while i < pending.len() {
            let d = s.diagram();
            let (options, circle) = match pending[i] {
                Seam::Point(k) => {
                    let p = p2.boundary[k].link;
                    let options =
                        vec![Op::Bridge { a: outer[k], b: d.alpha(p) }, Op::Bridge { a: d.alpha(outer[k]), b: p }];
                    (options, None)
                }
                Seam::Arc(a, b) => {
                    let key = (p2.boundary[a].color, spin_of(&p2.boundary[a]));
                    if d.alpha(outer[a]) == outer[b] {
                        // the region runs the same arc, so the closed side is a bare loop
                        closed_circles.push(key);
                        pending.remove(i);
                        continue;
                    }
                    let options = vec![
                        Op::Bridge { a: outer[a], b: d.alpha(outer[b]) },
                        Op::Bridge { a: d.alpha(outer[a]), b: outer[b] },
                    ];
                    (options, Some(key))
                }
            };
            let pick = options.into_iter().find(|op| match op {
                Op::Bridge { a, b } => bridge_check(d, *a, *b).is_ok(),
                _ => false,
            });
            match pick {
                Some(op) => {
                    s.apply(op)?;
                    extra.extend(circle);
                    pending.remove(i);
                }
                None => i += 1,
            }
        }
        if pending.len() == before {
            return cert_err("seam cannot be bridged");
        }
    }
    for (color, spin) in extra {
        s.apply(Op::CircleRemove { color, spin })?;
    }

    // the region closed up against the mirror copy
    let mut closed: Vec<VertexId> = region.vertices.clone();
    closed.extend(z.vertices.keys().copied().filter(|v| !mine.contains(v)));
    closed.retain(|v| s.diagram().vertices.contains_key(v));
    closed.sort_unstable();
    let mut gx = s.diagram().extract(&closed);
    for (&(c, sp), &n) in &patch.circles {
        for _ in 0..n {
            gx.add_circle(c, sp);
        }
    }
    for (c, sp) in closed_circles {
        gx.add_circle(c, sp);
    }
    if !gx.is_valid() || digest(&gx) != digest(&reference.glued) {
        return cert_err("closed part differs from the certified diagram");
    }

    // the certificate's operations, moved onto the closed part
    let mut map = iso_map(&reference.glued, &gx).ok_or_else(|| RuleError::Certificate("no isomorphism".into()))?;
    let mut degrees: BTreeMap<VertexId, u16> = gx.vertices.iter().map(|(&v, x)| (v, x.degree())).collect();
    let mut next = s.diagram().next_id();
    let mut scratch = reference.glued.clone();
    let mut ops = Vec::with_capacity(reference.ops.len());
    for op in &reference.ops {
        let moved = {
            let deg = |v: VertexId| degrees.get(&v).copied().unwrap_or(0);
            let mut fresh = || {
                next += 1;
                next - 1
            };
            transport(op, &mut map, &deg, &mut fresh)
        };
        apply_op(&mut scratch, op, rules)?;
        for id in op.created_ids() {
            degrees.insert(map[&id].0, scratch.vertices[&id].degree());
        }
        ops.push(moved);
    }
    if next > 0 {
        s.reserve_id(next - 1);
    }
    let mut cs = Session::new(gx.clone(), rules);
    cs.apply_all(ops.iter().cloned())?;
    let (trace, end) = cs.finish();
    if !end.is_empty() {
        return cert_err("certificate does not empty the closed part");
    }
    s.attach(Certificate { glued: gx, trace });
    s.apply_all(ops)
}

/// Builds a certificate for exchanging `p1` with `p2`: a reduction of
/// `glue(p1, p2)` to empty. Equal patches are certified by deleting mirror pairs
/// across the seam; otherwise `reduce` is called with the budget.
pub fn make_certificate(
    p1: &Diagram,
    p2: &Diagram,
    rules: &RuleSet,
    budget: Option<usize>,
    reduce: &dyn Fn(&Diagram, Option<usize>) -> Result<Trace, RuleError>,
) -> Result<Certificate, RuleError> {
    let glued = glue(p1, p2)?;
    if p1 == p2 {
        let off = p1.vertices.keys().next_back().copied().unwrap_or(0);
        let twin = |u: VertexId| p1.vertices.contains_key(&u).then_some(u + off);
        let ops = double_ops(&glued, &twin, rules)?;
        let mut s = Session::new(glued.clone(), rules).with_budget(budget);
        s.apply_all(ops)?;
        let (trace, _) = s.finish();
        return Ok(Certificate { glued, trace });
    }
    if budget == Some(0) {
        return Err(RuleError::Budget(0));
    }
    let trace = reduce(&glued, budget)?;
    Ok(Certificate { glued, trace })
}

/// The closed relation `glue(side 1, side 2)` of a template with its reduction:
/// one template exchange turns it into a double, then mirror pairs are deleted.
pub(crate) fn template_reference(rules: &RuleSet, name: &str) -> Result<Reference, RuleError> {
    let t = rules.template(name).ok_or_else(|| RuleError::Precondition(format!("no template {name}")))?;
    let glued = glue(&t.sides[0], &t.sides[1])?;
    let n = t.sides[0].vertex_count() as VertexId;
    let root = *glued.vertices.keys().next().ok_or_else(|| RuleError::Precondition("empty template".into()))?;
    for s in 0..glued.vertices[&root].degree() {
        let new_ids: Vec<VertexId> = (0..t.sides[1].vertex_count() as VertexId).map(|k| glued.next_id() + k).collect();
        let op = Op::ZamA3 { template: name.into(), side: 1, anchor: Dart::V(root, s), new_ids: new_ids.clone() };
        let mut d = glued.clone();
        if apply_op(&mut d, &op, rules).is_err() {
            continue;
        }
        let twin = |u: VertexId| new_ids.iter().position(|&x| x == u).map(|k| k as VertexId + n + 1);
        if let Ok(rest) = double_ops(&d, &twin, rules) {
            let ops = std::iter::once(op).chain(rest).collect();
            return Ok(Reference { glued, ops });
        }
    }
    cert_err("template relation does not reduce")
}

/// Certificate of a loaded template: the glued relation and its reduction by
/// one exchange plus mirror-pair deletions.
pub fn template_certificate(rules: &RuleSet, name: &str) -> Result<Certificate, RuleError> {
    let r = template_reference(rules, name)?;
    let mut s = Session::new(r.glued.clone(), rules);
    s.apply_all(r.ops)?;
    let (trace, end) = s.finish();
    if !end.is_empty() {
        return cert_err("template relation does not reduce");
    }
    Ok(Certificate { glued: r.glued, trace })
}

/// Replaces `region` of `d` by `patch` given a certificate for the exchange.
/// Returns the new diagram and a one-step trace recording the replacement.
pub fn replace_patch_certified(
    d: &Diagram,
    region: &Region,
    patch: &Diagram,
    certificate: &Certificate,
    rules: &RuleSet,
) -> Result<(Diagram, Trace), RuleError> {
    let v = verify_certificate(certificate, rules);
    if !v.ok {
        return Err(RuleError::Certificate(v.reason));
    }
    let mut s = Session::new(d.clone(), rules);
    replace_certified(&mut s, region, patch, &Reference::from_certificate(certificate))?;
    let (t, out) = s.finish();
    Ok((out, t))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::coxeter::{build_system, Family};
    use crate::map::{cut_patch, rotate_boundary};
    use crate::rules::commuting_template;
    use crate::trace::verify_trace;

    fn a3_rules() -> RuleSet {
        RuleSet::builtin(&Arc::new(build_system(Family::A, 3).unwrap()))
    }

    fn no_reduce(_: &Diagram, _: Option<usize>) -> Result<Trace, RuleError> {
        Err(RuleError::Stuck("no reducer".into()))
    }

    #[test]
    fn equal_patches_certify_by_mirror_pairs() {
        let rules = a3_rules();
        let t = rules.template("a3").unwrap();
        for p in [&t.sides[0], &t.sides[1], &commuting_template(3).unwrap().sides[0]] {
            let c = make_certificate(p, p, &rules, None, &no_reduce).unwrap();
            assert!(verify_certificate(&c, &rules).ok);
            assert_eq!(c.trace.primitives().iter().filter(|o| o.rule() == "cancel_pair").count(), p.vertex_count());
        }
    }

    #[test]
    fn zero_budget_rejects_distinct_patches() {
        let rules = a3_rules();
        let t = rules.template("a3").unwrap();
        let e = make_certificate(&t.sides[0], &t.sides[1], &rules, Some(0), &no_reduce).unwrap_err();
        assert_eq!(e, RuleError::Budget(0));
    }

    /// Host `glue(side1, side2)`; the side1 half is exchanged for side2.
    #[test]
    fn half_of_the_relation_is_exchanged() {
        let rules = a3_rules();
        let t = rules.template("a3").unwrap();
        let (s1, s2) = (&t.sides[0], &t.sides[1]);
        let host = glue(s1, s2).unwrap();
        let ids: Vec<VertexId> = s1.vertices.keys().copied().collect();
        let (cut, region) = cut_patch(&host, &ids).unwrap();
        let r = (0..s1.boundary.len()).find(|&r| rotate_boundary(s1, r) == cut).expect("cut is a rotation of side 1");
        let patch = rotate_boundary(s2, r);

        // certificate: swap the cut half by the template, then delete mirror pairs
        let glued = glue(&cut, &patch).unwrap();
        let mut found = None;
        for s in 0..glued.vertices[&1].degree() {
            let new_ids: Vec<VertexId> = (0..7).map(|k| glued.next_id() + k).collect();
            let op = Op::ZamA3 { template: "a3".into(), side: 1, anchor: Dart::V(1, s), new_ids: new_ids.clone() };
            let mut d = glued.clone();
            if apply_op(&mut d, &op, &rules).is_err() {
                continue;
            }
            let twin = |u: VertexId| new_ids.iter().position(|&x| x == u).map(|k| k as VertexId + 8);
            if let Ok(rest) = double_ops(&d, &twin, &rules) {
                found = Some(std::iter::once(op).chain(rest).collect::<Vec<_>>());
                break;
            }
        }
        let ops = found.expect("the cut half embeds the template");
        let mut s = Session::new(glued.clone(), &rules);
        s.apply_all(ops).unwrap();
        let (trace, end) = s.finish();
        assert!(end.is_empty());
        let cert = Certificate { glued, trace };

        let (out, tr) = replace_patch_certified(&host, &region, &patch, &cert, &rules).unwrap();
        assert!(out.is_valid());
        assert_eq!(digest(&out), digest(&glue(s2, s2).unwrap()));
        let v = verify_trace(&host, &tr, &rules);
        assert!(v.ok, "{v:?}");
        assert_eq!(tr.rule_counts().get("patch_replace"), Some(&1));
    }
}
