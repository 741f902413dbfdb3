//! Type A strategy. Colors are handled from the lowest up: vertices of type
//! `(lo, lo + 1)` are removed face by face, the remaining loops of color `lo`
//! are emptied, and the rest is a diagram on the higher colors.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::coxeter::{first_generator_moves, is_trivial_word, CoxeterSystem, Family, Gen, WordMove};
use crate::map::{color_faces, cut_patch, digest, is_node, rotate_boundary, walk, Dart, Diagram, VertexId};
use crate::rules::{
    compile_path, delete_pair_via, push_crossing, replace_certified, template_reference, a3_cycle, Reference,
    RuleError, RuleSet, Session,
};

use super::strand::{letters, realize_all, remove_loops, Strand};
use super::{delete_some_pair, remove_circles, run, ProgressMeasure, ReduceFailure, Reduction, Stats, Strategy};

/// The two sides of the face-shrinking exchange on colors `lo, lo + 1, lo + 2`:
/// `r` is two nodes joined through one crossing, `p2` the other way around the
/// relation cycle.
#[derive(Debug, Clone)]
pub struct TrickPatches {
    pub r: Diagram,
    pub p2: Diagram,
    reference: Reference,
}

fn shifted(w: &[Gen], lo: Gen) -> Vec<Gen> {
    w.iter().map(|g| g + lo - 1).collect()
}

/// Builds the exchange patches for level `lo` of a type A system.
pub fn trick_patches(sys: &Arc<CoxeterSystem>, lo: Gen, rules: &RuleSet) -> Result<TrickPatches, RuleError> {
    if sys.family != Family::A || (lo as usize) + 2 > sys.rank {
        return Err(RuleError::Unsupported(format!("no exchange at level {lo}")));
    }
    let cycle = a3_cycle()?;
    let l = cycle.len();
    let word = |i: usize| &cycle.graph.nodes[cycle.nodes[i % l]];
    // the walk 212321 -> 121321 -> 123121 -> 123212 must be three consecutive
    // cycle edges, in either direction
    let path = [[2, 1, 2, 3, 2, 1], [1, 2, 1, 3, 2, 1], [1, 2, 3, 1, 2, 1], [1, 2, 3, 2, 1, 2]];
    let mut found = None;
    for i in 0..l {
        if word(i) != &path[0] {
            continue;
        }
        if (1..4).all(|k| word(i + l - k) == &path[k]) {
            let r: Vec<WordMove> = (1..4).map(|k| cycle.moves[(i + l - k) % l]).collect();
            let p2: Vec<WordMove> = (0..l - 3).map(|k| cycle.moves[(i + k) % l]).collect();
            found = Some((r, p2));
        } else if (1..4).all(|k| word(i + k) == &path[k]) {
            // walking backwards, the move from node j to j - 1 is moves[j - 1]
            let r: Vec<WordMove> = (0..3).map(|k| cycle.moves[(i + k) % l]).collect();
            let p2: Vec<WordMove> = (1..l - 2).map(|k| cycle.moves[(i + 2 * l - k) % l]).collect();
            found = Some((r, p2));
        }
    }
    let (rm, pm) = found.ok_or(RuleError::NoCycle)?;
    let start = shifted(&path[0], lo);
    let r = compile_path(sys, &start, &rm)?;
    let p2 = compile_path(sys, &start, &pm)?;
    let name = if lo == 1 { "a3".to_string() } else { format!("a3.{lo}") };
    let reference = template_reference(rules, &name)?;
    Ok(TrickPatches { r, p2, reference })
}

fn cached_patches(sys: &Arc<CoxeterSystem>, lo: Gen, rules: &RuleSet) -> Result<Arc<TrickPatches>, RuleError> {
    static CACHE: OnceLock<Mutex<HashMap<(String, Gen), Arc<TrickPatches>>>> = OnceLock::new();
    let key = (sys.header(), lo);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("trick cache poisoned").get(&key) {
        return Ok(p.clone());
    }
    let p = Arc::new(trick_patches(sys, lo, rules)?);
    cache.lock().expect("trick cache poisoned").insert(key, p.clone());
    Ok(p)
}

/// Exchanges nodes `x`, `y` and the crossing `c` between them for the long way
/// around the relation cycle.
fn trick(s: &mut Session, lo: Gen, x: VertexId, c: VertexId, y: VertexId) -> Result<(), RuleError> {
    let sys = s.diagram().sys.clone();
    let p = cached_patches(&sys, lo, s.rules())?;
    let (cut, region) = cut_patch(s.diagram(), &[x, c, y])?;
    let want = digest(&cut);
    let k = (0..p.r.boundary.len())
        .find(|&k| digest(&rotate_boundary(&p.r, k)) == want)
        .ok_or_else(|| RuleError::Precondition("nodes and crossing do not form the exchange patch".into()))?;
    let patch = rotate_boundary(&p.p2, k);
    replace_certified(s, &region, &patch, &p.reference)
}

/// Where the exchange applies: the arc of color `lo` leaving `arc`, which must
/// run through exactly one crossing to another node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrickSite {
    pub arc: Dart,
}

/// Applies the face-shrinking exchange at an arc: the blue face on its left
/// loses one node. Faces of size two do not qualify.
pub fn apply_trick(d: &Diagram, rules: &RuleSet, site: TrickSite) -> Result<Diagram, RuleError> {
    let Dart::V(x, e) = site.arc else {
        return Err(RuleError::Precondition("arc starts at the boundary".into()));
    };
    let lo = d.vertex(x).lo;
    let (end, crossings) = walk(d, site.arc, lo);
    let Dart::V(y, _) = end else {
        return Err(RuleError::Precondition("arc ends at the boundary".into()));
    };
    if crossings.len() != 1 || y == x {
        return Err(RuleError::Precondition("arc must join two nodes through one crossing".into()));
    }
    let size = face_size(d, lo, Dart::V(x, e)).unwrap_or(0);
    if size < 3 {
        return Err(RuleError::Precondition(format!("face of size {size} is too small")));
    }
    let mut s = Session::new(d.clone(), rules);
    trick(&mut s, lo, x, crossings[0].0, y)?;
    Ok(s.into_diagram())
}

fn face_size(d: &Diagram, c: Gen, arc: Dart) -> Option<usize> {
    color_faces(d, c).into_iter().find(|f| f.contains(&arc)).map(|f| f.len())
}

/// Rewrites the crossings on the arc leaving `arc` so that at most one of
/// color `lo + 2` remains, then pushes all others off around the end nodes.
pub(crate) fn normalize(s: &mut Session, arc: Dart) -> Result<(), RuleError> {
    let Dart::V(x, e) = arc else {
        return Err(RuleError::Precondition("arc starts at the boundary".into()));
    };
    let lo = s.diagram().vertex(x).lo;
    let sys = s.diagram().sys.clone();
    let word = letters(s.diagram(), &walk(s.diagram(), arc, lo).1);
    let moves = first_generator_moves(&sys, &word, lo + 2);
    realize_all(s, lo, Strand::Arc(arc), &moves)?;
    // crossings before the kept one go around x, those after around y
    loop {
        let (end, ch) = walk(s.diagram(), arc, lo);
        let w = letters(s.diagram(), &ch);
        match w.iter().position(|&g| g == lo + 2) {
            None if w.is_empty() => return Ok(()),
            Some(0) if w.len() == 1 => return Ok(()),
            Some(0) => {
                let Dart::V(y, f) = end else {
                    return Err(RuleError::Precondition("arc ends at the boundary".into()));
                };
                push_crossing(s, y, f)?;
            }
            _ => push_crossing(s, x, e)?,
        }
    }
}

/// Normalizes the crossings of one arc (see the type A strategy) and returns
/// the rewritten diagram.
pub fn normalize_crossings_on_edge(d: &Diagram, rules: &RuleSet, arc: Dart) -> Result<Diagram, RuleError> {
    let Dart::V(x, _) = arc else {
        return Err(RuleError::Precondition("arc starts at the boundary".into()));
    };
    if d.sys.family != Family::A || !is_node(d, x, d.vertex(x).lo) {
        return Err(RuleError::Precondition("arc must leave a type A node".into()));
    }
    let mut s = Session::new(d.clone(), rules);
    normalize(&mut s, arc)?;
    Ok(s.into_diagram())
}

/// Whether a blue digon whose arcs carry `a` and `b` crossings of color
/// `lo + 2` (after normalization) can exist: the word around its inside must be
/// trivial.
pub(crate) fn digon_possible(sys: &CoxeterSystem, lo: Gen, a: usize, b: usize) -> bool {
    let mut w = vec![lo + 1];
    w.extend(std::iter::repeat_n(lo + 2, a));
    w.push(lo + 1);
    w.extend(std::iter::repeat_n(lo + 2, b));
    is_trivial_word(sys, &w).unwrap_or(false)
}

/// Picks the arc to work on: smallest face first, then the smallest dart.
fn pick_arc(d: &Diagram, lo: Gen) -> Option<(Dart, usize)> {
    let mut faces = color_faces(d, lo);
    faces.sort_by_key(|f| (f.len(), f.iter().min().copied()));
    for f in faces {
        let mut arcs: Vec<Dart> = f.clone();
        arcs.sort();
        for a in arcs {
            let Dart::V(x, _) = a else { continue };
            if let (Dart::V(y, _), _) = walk(d, a, lo) {
                if y != x {
                    return Some((a, f.len()));
                }
            }
        }
    }
    None
}

/// Removes all vertices of type `(lo, lo + 1)`.
fn clear_nodes(s: &mut Session, lo: Gen, st: &mut Stats) -> Result<(), RuleError> {
    let cap = 64 * (s.diagram().vertex_count() + 4).pow(2);
    let sys = s.diagram().sys.clone();
    for _ in 0..cap {
        if s.diagram().count_type(lo, lo + 1) == 0 {
            return Ok(());
        }
        st.iterations += 1;
        if delete_some_pair(s, |a, b| (a, b) == (lo, lo + 1))? {
            continue;
        }
        let (arc, size) = pick_arc(s.diagram(), lo)
            .ok_or_else(|| RuleError::Stuck(format!("no arc of color {lo} joins two nodes")))?;
        let Dart::V(x, e) = arc else { unreachable!() };
        normalize(s, arc)?;
        let (end, ch) = walk(s.diagram(), arc, lo);
        let Dart::V(y, f) = end else { unreachable!() };
        match ch.len() {
            0 => delete_pair_via(s, x, y, (e, f))?,
            1 if size >= 3 => trick(s, lo, x, ch[0].0, y)?,
            1 => {
                let msg = if digon_possible(&sys, lo, 1, 0) || digon_possible(&sys, lo, 1, 1) {
                    "digon with one crossing was not rewritten"
                } else {
                    "digon with one crossing cannot occur in a valid diagram"
                };
                return Err(RuleError::Stuck(msg.into()));
            }
            _ => return Err(RuleError::Stuck("normalization left several crossings".into())),
        }
    }
    Err(RuleError::Stuck(format!("no progress on color {lo} after {cap} iterations")))
}

pub(crate) fn an_level(s: &mut Session, lo: Gen, st: &mut Stats) -> Result<(), RuleError> {
    let n = s.diagram().sys.rank as Gen;
    if lo >= n {
        return remove_circles(s, None);
    }
    if lo + 1 == n {
        return super::dihedral::dihedral(s, st);
    }
    st.measures.push(ProgressMeasure::of(s.diagram(), lo));
    clear_nodes(s, lo, st)?;
    st.measures.push(ProgressMeasure::of(s.diagram(), lo));
    remove_loops(s, lo)?;
    st.measures.push(ProgressMeasure::of(s.diagram(), lo));
    an_level(s, lo + 1, st)
}

pub(crate) fn an(s: &mut Session, st: &mut Stats) -> Result<(), RuleError> {
    if s.diagram().sys.family != Family::A {
        return Err(RuleError::Unsupported("type A strategy on another family".into()));
    }
    an_level(s, 1, st)
}

/// Reduces a closed type A diagram.
pub fn reduce_an(d: &Diagram, rules: &RuleSet) -> Result<Reduction, ReduceFailure> {
    run(d, rules, None, Strategy::AFamily, an)
}
