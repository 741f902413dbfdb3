//! Relations as rewrite operations: the primitive moves, derived moves built from
//! them, ZAM templates, and certified patch replacement.

mod certify;
mod macros;
mod ops;
mod session;
mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::coxeter::{CoxeterError, CoxeterSystem, Family, Gen};
use crate::map::{Dart, Diagram, MapError, VertexId};

pub(crate) use certify::{replace_certified, template_reference, Reference};
pub use certify::{make_certificate, replace_patch_certified, template_certificate};
pub(crate) use macros::{delete_pair_ops, delete_pair_via, reverse_ops};
pub use macros::{create_pair, delete_pair, insert_pair, push_crossing, InsertSite};
pub(crate) use ops::{bridge_check, cancel_check, embed};
pub use ops::{apply_op, inverse_op, Op};
pub use session::Session;
pub use templates::{
    a3_cycle, commuting_template, compile_path, derive_zam_template, read_template_dir, write_template_dir,
    ZamCycle,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("step budget of {0} exhausted")]
    Budget(usize),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error("certificate rejected: {0}")]
    Certificate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("macro {0} has no expansion")]
    Unexpandable(String),
    #[error("no qualifying cycle")]
    NoCycle,
    #[error("stuck: {0}")]
    Stuck(String),
    #[error("rule file {file}: {msg}")]
    RuleFile { file: String, msg: String },
}

/// A ZAM relation as two patches with equal boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZamTemplate {
    pub name: String,
    pub sides: [Diagram; 2],
}

impl ZamTemplate {
    pub fn new(name: &str, side1: Diagram, side2: Diagram) -> Result<Self, RuleError> {
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(RuleError::Precondition(format!("bad template name `{name}`")));
        }
        if side1.sys != side2.sys {
            return Err(RuleError::Precondition("template sides in different systems".into()));
        }
        if side1.boundary_signature() != side2.boundary_signature() {
            return Err(RuleError::Precondition("template sides have different boundaries".into()));
        }
        for s in [&side1, &side2] {
            if let Some(v) = s.validate().first() {
                return Err(RuleError::Precondition(format!("template side invalid: {}", v.detail)));
            }
        }
        Ok(ZamTemplate { name: name.to_string(), sides: [side1, side2] })
    }
}

/// The loaded templates. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    templates: BTreeMap<String, ZamTemplate>,
}

impl RuleSet {
    pub fn empty() -> Self {
        RuleSet::default()
    }

    /// Built-in templates for a system: the A3 relation on every window of three
    /// consecutive colors of a type A system.
    pub fn builtin(sys: &Arc<CoxeterSystem>) -> Self {
        let mut rs = RuleSet::empty();
        if sys.family == Family::A && sys.rank >= 3 {
            let cycle = a3_cycle().expect("A3 rex graph has a qualifying cycle");
            for lo in 1..=(sys.rank - 2) as Gen {
                let t = cycle.template(sys, lo).expect("A3 template compiles");
                rs.insert(t);
            }
        }
        rs
    }

    /// Loads every template file of a directory, keeping those of `sys`.
    pub fn load_dir(dir: &Path, sys: &Arc<CoxeterSystem>) -> Result<Self, RuleError> {
        let mut rs = RuleSet::empty();
        for t in read_template_dir(dir)? {
            if t.sides[0].sys.as_ref() == sys.as_ref() {
                rs.insert(ZamTemplate {
                    name: t.name,
                    sides: t.sides.map(|mut s| {
                        s.sys = sys.clone();
                        s
                    }),
                });
            }
        }
        Ok(rs)
    }

    pub fn insert(&mut self, t: ZamTemplate) {
        self.templates.insert(t.name.clone(), t);
    }

    pub fn template(&self, name: &str) -> Option<&ZamTemplate> {
        self.templates.get(name)
    }

    pub fn templates(&self) -> impl Iterator<Item = &ZamTemplate> {
        self.templates.values()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }
}

/// Rule identifiers, as used by match enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleKind {
    CircleAdd,
    CircleRemove,
    Bridge,
    CancelPair,
    ZamCommuting,
    ZamA3,
    DeleteAdjacentPair,
    InsertAdjacentPair,
}

impl RuleKind {
    pub const ALL: [RuleKind; 8] = [
        RuleKind::CircleAdd,
        RuleKind::CircleRemove,
        RuleKind::Bridge,
        RuleKind::CancelPair,
        RuleKind::ZamCommuting,
        RuleKind::ZamA3,
        RuleKind::DeleteAdjacentPair,
        RuleKind::InsertAdjacentPair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::CircleAdd => "circle_add",
            RuleKind::CircleRemove => "circle_remove",
            RuleKind::Bridge => "bridge",
            RuleKind::CancelPair => "cancel_pair",
            RuleKind::ZamCommuting => "zam_commuting",
            RuleKind::ZamA3 => "zam_a3",
            RuleKind::DeleteAdjacentPair => "delete_adjacent_pair",
            RuleKind::InsertAdjacentPair => "insert_adjacent_pair",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An applicable rule instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Match {
    Primitive(Op),
    DeletePair(VertexId, VertexId),
    InsertPair { site: InsertSite, lo: Gen, hi: Gen },
}

impl Match {
    pub fn rule(&self) -> RuleKind {
        match self {
            Match::Primitive(op) => match op {
                Op::CircleAdd { .. } => RuleKind::CircleAdd,
                Op::CircleRemove { .. } => RuleKind::CircleRemove,
                Op::Bridge { .. } => RuleKind::Bridge,
                Op::Cancel { .. } | Op::Uncancel { .. } => RuleKind::CancelPair,
                Op::ZamCommuting { .. } => RuleKind::ZamCommuting,
                Op::ZamA3 { .. } => RuleKind::ZamA3,
            },
            Match::DeletePair(..) => RuleKind::DeleteAdjacentPair,
            Match::InsertPair { .. } => RuleKind::InsertAdjacentPair,
        }
    }

    /// Serialized site, the sort key of match enumeration.
    pub fn site(&self) -> String {
        match self {
            Match::Primitive(op) => op.site().join(" "),
            Match::DeletePair(u, v) => format!("{u} {v}"),
            Match::InsertPair { site, lo, hi } => format!("{site} {lo} {hi}"),
        }
    }

    /// Applies the match to a copy of `d`.
    pub fn apply(&self, d: &Diagram, rules: &RuleSet) -> Result<Diagram, RuleError> {
        let mut s = Session::new(d.clone(), rules);
        match self {
            Match::Primitive(op) => s.apply(op.clone())?,
            Match::DeletePair(u, v) => delete_pair(&mut s, *u, *v)?,
            Match::InsertPair { site, lo, hi } => {
                insert_pair(&mut s, *site, *lo, *hi)?;
            }
        }
        Ok(s.into_diagram())
    }
}

fn sort_matches(mut v: Vec<Match>) -> Vec<Match> {
    v.sort_by_cached_key(|m| m.site());
    v
}

fn face_index(d: &Diagram) -> BTreeMap<Dart, usize> {
    let mut out = BTreeMap::new();
    for (i, f) in d.faces().into_iter().enumerate() {
        for x in f.darts {
            out.insert(x, i);
        }
    }
    out
}

/// Every applicable instance of `rule`, sorted by serialized site.
///
/// Circle additions are listed once per color (and direction). Created vertices
/// take the diagram's next free ids.
pub fn find_matches(d: &Diagram, rule: RuleKind, rules: &RuleSet) -> Vec<Match> {
    let sys = &d.sys;
    let mut out = Vec::new();
    match rule {
        RuleKind::CircleAdd => {
            for c in sys.gens() {
                if sys.oriented {
                    for spin in [crate::map::Spin::Cw, crate::map::Spin::Ccw] {
                        out.push(Match::Primitive(Op::CircleAdd { color: c, spin: Some(spin) }));
                    }
                } else {
                    out.push(Match::Primitive(Op::CircleAdd { color: c, spin: None }));
                }
            }
        }
        RuleKind::CircleRemove => {
            for (&(color, spin), &n) in &d.circles {
                for _ in 0..n {
                    out.push(Match::Primitive(Op::CircleRemove { color, spin }));
                }
            }
        }
        RuleKind::Bridge => {
            // Bridge{a, b} equals Bridge{b, a} and Bridge{α(a), α(b)}, so each
            // pair of edges has two distinct bridges, plus the circle split.
            let faces = face_index(d);
            let comps = d.components();
            let comp_of = |x: Dart| -> Option<usize> {
                match x {
                    Dart::B(_) => comps.iter().position(|c| c.boundary),
                    Dart::V(v, _) => comps.iter().position(|c| c.vertices.binary_search(&v).is_ok()),
                }
            };
            let reps: Vec<Dart> = d.darts().into_iter().filter(|&x| x < d.alpha(x)).collect();
            for (i, &a) in reps.iter().enumerate() {
                if bridge_check(d, a, d.alpha(a)).is_ok() {
                    out.push(Match::Primitive(Op::Bridge { a, b: d.alpha(a) }));
                }
                for &e in &reps[i + 1..] {
                    if d.color(a) != d.color(e) {
                        continue;
                    }
                    for b in [e, d.alpha(e)] {
                        let cheap = faces.get(&a) == faces.get(&b) || comp_of(a) != comp_of(b);
                        if cheap && bridge_check(d, a, b).is_ok() {
                            out.push(Match::Primitive(Op::Bridge { a, b }));
                        }
                    }
                }
            }
        }
        RuleKind::CancelPair => {
            for (&u, x) in &d.vertices {
                if let Dart::V(v, _) = x.links[0] {
                    if u < v && cancel_check(d, u, v).is_ok() {
                        out.push(Match::Primitive(Op::Cancel { u, v }));
                    }
                }
            }
        }
        RuleKind::ZamCommuting => {
            for (&w, x) in &d.vertices {
                for t in 0..x.degree() {
                    let ids: Vec<VertexId> = (0..x.m as u32).map(|k| d.next_id() + k).collect();
                    let op = Op::ZamCommuting { w, t, new_ids: ids };
                    let mut tmp = d.clone();
                    if apply_op(&mut tmp, &op, rules).is_ok() {
                        out.push(Match::Primitive(op));
                    }
                }
            }
        }
        RuleKind::ZamA3 => {
            for t in rules.templates() {
                if t.sides[0].sys.as_ref() != sys.as_ref() {
                    continue;
                }
                for side in [1u8, 2] {
                    let from = &t.sides[side as usize - 1];
                    let n = t.sides[2 - side as usize].vertices.len() as u32;
                    for (&h, x) in &d.vertices {
                        for s in (0..x.degree()).step_by(2) {
                            let anchor = Dart::V(h, s);
                            if embed(d, from, anchor).is_some() {
                                let new_ids = (0..n).map(|k| d.next_id() + k).collect();
                                out.push(Match::Primitive(Op::ZamA3 {
                                    template: t.name.clone(),
                                    side,
                                    anchor,
                                    new_ids,
                                }));
                            }
                        }
                    }
                }
            }
        }
        RuleKind::DeleteAdjacentPair => {
            let mut pairs = std::collections::BTreeSet::new();
            for (&u, x) in &d.vertices {
                for l in &x.links {
                    if let Dart::V(v, _) = *l {
                        let y = &d.vertices[&v];
                        if u < v && (x.lo, x.hi) == (y.lo, y.hi) {
                            pairs.insert((u, v));
                        }
                    }
                }
            }
            for (u, v) in pairs {
                if delete_pair_ops(d, u, v, rules, None).is_ok() {
                    out.push(Match::DeletePair(u, v));
                }
            }
        }
        RuleKind::InsertAdjacentPair => {
            let mut sites: Vec<InsertSite> = Vec::new();
            for x in d.darts() {
                let rep = if sys.oriented { d.is_out(x) == Some(true) } else { x < d.alpha(x) };
                if rep {
                    sites.push(InsertSite::Edge(x));
                }
            }
            for &(color, spin) in d.circles.keys() {
                sites.push(InsertSite::Circle(color, spin));
            }
            sites.dedup();
            for site in sites {
                let c = match site {
                    InsertSite::Edge(x) => d.color(x),
                    InsertSite::Circle(c, _) => c,
                };
                for (lo, hi) in sys.vertex_types() {
                    if lo == c || hi == c {
                        out.push(Match::InsertPair { site, lo, hi });
                    }
                }
            }
        }
    }
    sort_matches(out)
}

/// Circle addition or removal as a function on diagrams.
pub fn apply_circle(
    d: &Diagram,
    add: bool,
    color: Gen,
    spin: Option<crate::map::Spin>,
) -> Result<Diagram, RuleError> {
    let op = if add { Op::CircleAdd { color, spin } } else { Op::CircleRemove { color, spin } };
    let mut out = d.clone();
    apply_op(&mut out, &op, &RuleSet::empty())?;
    Ok(out)
}

/// Bridge move: swaps the partners of `a` and `b`.
pub fn apply_bridge(d: &Diagram, a: Dart, b: Dart) -> Result<Diagram, RuleError> {
    let mut out = d.clone();
    apply_op(&mut out, &Op::Bridge { a, b }, &RuleSet::empty())?;
    Ok(out)
}

/// Deletes a closed two-vertex full gluing.
pub fn apply_cancel_pair(d: &Diagram, u: VertexId, v: VertexId) -> Result<Diagram, RuleError> {
    let mut out = d.clone();
    apply_op(&mut out, &Op::Cancel { u, v }, &RuleSet::empty())?;
    Ok(out)
}

/// Commuting ZAM at vertex `w`, moving the strand on spokes `t..t+m` across.
pub fn apply_zam_commuting(d: &Diagram, w: VertexId, t: u16) -> Result<Diagram, RuleError> {
    let mut out = d.clone();
    let m = d
        .vertices
        .get(&w)
        .ok_or_else(|| RuleError::Precondition(format!("no vertex {w}")))?
        .m;
    let new_ids = (0..m as u32).map(|k| d.next_id() + k).collect();
    apply_op(&mut out, &Op::ZamCommuting { w, t, new_ids }, &RuleSet::empty())?;
    Ok(out)
}

/// A3 ZAM: exchanges the embedded side of a template for the other side.
pub fn apply_zam_a3(
    d: &Diagram,
    rules: &RuleSet,
    template: &str,
    side: u8,
    anchor: Dart,
) -> Result<Diagram, RuleError> {
    let t = rules
        .template(template)
        .ok_or_else(|| RuleError::Precondition(format!("unknown template {template}")))?;
    let n = t.sides.get(2 - side.clamp(1, 2) as usize).map_or(0, |s| s.vertices.len()) as u32;
    let new_ids = (0..n).map(|k| d.next_id() + k).collect();
    let mut out = d.clone();
    apply_op(&mut out, &Op::ZamA3 { template: template.into(), side, anchor, new_ids }, rules)?;
    Ok(out)
}

/// Deletes two adjacent vertices of one type: bridges until they form a closed
/// full gluing, then cancels it.
pub fn delete_adjacent_pair(d: &Diagram, u: VertexId, v: VertexId) -> Result<Diagram, RuleError> {
    let rules = RuleSet::empty();
    let mut s = Session::new(d.clone(), &rules);
    delete_pair(&mut s, u, v)?;
    Ok(s.into_diagram())
}

/// Inserts a canceling pair of type `(lo, hi)` on an edge or a circle.
pub fn insert_adjacent_pair(d: &Diagram, site: InsertSite, lo: Gen, hi: Gen) -> Result<Diagram, RuleError> {
    let rules = RuleSet::empty();
    let mut s = Session::new(d.clone(), &rules);
    insert_pair(&mut s, site, lo, hi)?;
    Ok(s.into_diagram())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_system;
    use crate::map::{glue, parse};

    fn a3_closed() -> (Diagram, RuleSet) {
        let sys = Arc::new(build_system(Family::A, 3).unwrap());
        let rules = RuleSet::builtin(&sys);
        let t = rules.template("a3").unwrap();
        (glue(&t.sides[0], &t.sides[1]).unwrap(), rules)
    }

    fn braid_pair() -> Diagram {
        let text = "group BI 3\nvertex 1 1 2 out@0\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n";
        let d = parse(text).unwrap();
        glue(&d, &d).unwrap()
    }

    fn commuting_closed(m: usize) -> (Diagram, RuleSet) {
        let t = commuting_template(m).unwrap();
        (glue(&t.sides[0], &t.sides[1]).unwrap(), RuleSet::empty())
    }

    fn round_trips(d: &Diagram, rules: &RuleSet) -> BTreeMap<RuleKind, usize> {
        let mut n = BTreeMap::new();
        for kind in [RuleKind::CircleAdd, RuleKind::Bridge, RuleKind::CancelPair, RuleKind::ZamCommuting, RuleKind::ZamA3] {
            for m in find_matches(d, kind, rules) {
                let Match::Primitive(op) = m else { unreachable!() };
                let mut e = d.clone();
                apply_op(&mut e, &op, rules).unwrap_or_else(|err| panic!("{op}: {err}"));
                assert!(e.is_valid(), "{op}: {:?}", e.validate());
                assert_eq!(e.boundary_signature(), d.boundary_signature());
                let inv = inverse_op(d, &op, rules).unwrap();
                apply_op(&mut e, &inv, rules).unwrap_or_else(|err| panic!("{inv} after {op}: {err}"));
                // ZAM inverses may rotate the re-created vertices; the code is restored
                if matches!(kind, RuleKind::ZamCommuting | RuleKind::ZamA3) {
                    assert_eq!(crate::map::digest(&e), crate::map::digest(d), "{op} then {inv}");
                } else {
                    assert_eq!(&e, d, "{op} then {inv}");
                }
                *n.entry(kind).or_insert(0) += 1;
            }
        }
        n
    }

    #[test]
    fn primitives_invert_on_a3_relation() {
        let (d, rules) = a3_closed();
        assert!(d.is_valid());
        let n = round_trips(&d, &rules);
        assert!(n.get(&RuleKind::ZamA3).copied().unwrap_or(0) > 0, "{n:?}");
        let e = insert_adjacent_pair(&d, InsertSite::Edge(Dart::V(1, 0)), 1, 2).unwrap();
        let n = round_trips(&e, &rules);
        assert!(n.get(&RuleKind::Bridge).copied().unwrap_or(0) > 0, "{n:?}");
    }

    #[test]
    fn primitives_invert_on_commuting_relation() {
        for m in 2..=4 {
            let (d, rules) = commuting_closed(m);
            assert!(d.is_valid());
            let n = round_trips(&d, &rules);
            assert!(n.get(&RuleKind::ZamCommuting).copied().unwrap_or(0) > 0, "{n:?}");
        }
    }

    #[test]
    fn primitives_invert_on_oriented_pair() {
        let d = braid_pair();
        assert!(d.is_valid());
        let rules = RuleSet::empty();
        let n = round_trips(&d, &rules);
        assert_eq!(n.get(&RuleKind::CancelPair), Some(&1), "{n:?}");
    }

    #[test]
    fn adjacent_pairs_delete_and_insert() {
        let d = braid_pair();
        let rules = RuleSet::empty();
        let ms = find_matches(&d, RuleKind::DeleteAdjacentPair, &rules);
        assert_eq!(ms.len(), 1);
        assert!(ms[0].apply(&d, &rules).unwrap().is_empty());

        let (d, rules) = a3_closed();
        for m in find_matches(&d, RuleKind::DeleteAdjacentPair, &rules) {
            let e = m.apply(&d, &rules).unwrap();
            assert!(e.is_valid());
            assert_eq!(e.vertex_count(), d.vertex_count() - 2);
        }
        let ins = find_matches(&d, RuleKind::InsertAdjacentPair, &rules);
        assert!(!ins.is_empty());
        for m in &ins {
            let e = m.apply(&d, &rules).unwrap();
            assert!(e.is_valid(), "{m:?}");
            assert_eq!(e.vertex_count(), d.vertex_count() + 2);
        }
    }

    #[test]
    fn zam_a3_swaps_template_sides() {
        let (d, rules) = a3_closed();
        let ms = find_matches(&d, RuleKind::ZamA3, &rules);
        let Match::Primitive(op) = &ms[0] else { unreachable!() };
        let mut e = d.clone();
        apply_op(&mut e, op, &rules).unwrap();
        assert_eq!(e.vertex_count(), 14);
        assert_ne!(crate::map::digest(&e), crate::map::digest(&d));
    }
}
