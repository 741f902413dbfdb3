//! Rank-two strategies: plain dihedral diagrams and their oriented version.

use crate::map::{Dart, Diagram, VertexId};
use crate::rules::{delete_pair_via, Op, RuleError, RuleSet, Session};
use crate::trace::Trace;

use super::{delete_some_pair, remove_circles, run, ReduceFailure, Stats, Strategy};

/// Deletes adjacent pairs and circles until nothing is left.
pub(crate) fn dihedral(s: &mut Session, st: &mut Stats) -> Result<(), RuleError> {
    loop {
        remove_circles(s, None)?;
        if s.diagram().is_empty() {
            return Ok(());
        }
        if !delete_some_pair(s, |_, _| true)? {
            return Err(RuleError::Stuck("no deletable adjacent pair".into()));
        }
        st.iterations += 1;
    }
}

/// Reduces a closed diagram of a rank-two system by deleting adjacent pairs.
pub fn reduce_dihedral(d: &Diagram, rules: &RuleSet) -> Result<Trace, ReduceFailure> {
    run(d, rules, None, Strategy::Dihedral, dihedral).map(|r| r.trace)
}

/// Two consecutive corners of one face, both between an incoming and an
/// outgoing dart: the corner of `u` before slot `s` and of `v` before slot `t`,
/// with `u.s` glued to `v.(t - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariedSite {
    pub u: VertexId,
    pub s: u16,
    pub v: VertexId,
    pub t: u16,
    pub face_size: usize,
}

fn varied(d: &Diagram, v: VertexId, s: u16) -> bool {
    let x = d.vertex(v);
    let prev = x.slot(s as i64 - 1);
    x.is_out(prev).is_some() && x.is_out(prev) != x.is_out(s)
}

fn varied_sites(d: &Diagram) -> Vec<VariedSite> {
    let mut out = Vec::new();
    for f in d.faces() {
        let n = f.darts.len();
        for i in 0..n {
            let (Dart::V(u, s), Dart::V(v, t)) = (f.darts[i], f.darts[(i + 1) % n]) else { continue };
            if u != v && varied(d, u, s) && varied(d, v, t) {
                out.push(VariedSite { u, s, v, t, face_size: f.size() });
            }
        }
    }
    out.sort_by_key(|x| (x.face_size, x.u, x.s));
    out
}

/// A site of two adjacent varied angles, if any.
pub fn find_adjacent_varied_angles(d: &Diagram) -> Option<VariedSite> {
    varied_sites(d).into_iter().next()
}

/// Cancels the two vertices of a varied site, bridging first when the face is
/// larger than a digon.
fn cancel_site(s: &mut Session, x: VariedSite) -> Result<(), RuleError> {
    let site = vec![format!("{}.{}", x.u, x.s), format!("{}.{}", x.v, x.t)];
    s.macro_op("varied_angle_cancel", site, |s| {
        let d = s.diagram();
        let deg = d.vertex(x.u).degree();
        let before_u = Dart::V(x.u, (x.s + deg - 1) % deg);
        if d.alpha(before_u) != Dart::V(x.v, x.t) {
            let a = d.alpha(before_u);
            s.apply(Op::Bridge { a, b: Dart::V(x.v, x.t) })?;
        }
        let t1 = (x.t + deg - 1) % deg;
        delete_pair_via(s, x.u, x.v, (x.s, t1))
    })
}

pub(crate) fn braid(s: &mut Session, st: &mut Stats) -> Result<(), RuleError> {
    loop {
        remove_circles(s, None)?;
        if s.diagram().is_empty() {
            return Ok(());
        }
        let sites = varied_sites(s.diagram());
        if sites.is_empty() {
            return Err(RuleError::Stuck("no adjacent varied angles".into()));
        }
        let mut done = false;
        for x in sites {
            match cancel_site(s, x) {
                Ok(()) => {
                    done = true;
                    break;
                }
                Err(e @ RuleError::Budget(_)) => return Err(e),
                Err(_) => {}
            }
        }
        if !done {
            return Err(RuleError::Stuck("no varied site cancels".into()));
        }
        st.iterations += 1;
    }
}

/// Reduces a closed oriented dihedral diagram, two vertices per iteration.
pub fn reduce_braid_dihedral(d: &Diagram, rules: &RuleSet) -> Result<super::Reduction, ReduceFailure> {
    run(d, rules, None, Strategy::BraidDihedral, braid)
}
