//! Word moves realized on the crossings along one strand.
//!
//! A strand of color `c` running through crossings reads a word (the other
//! color of each crossing). A cancellation deletes two consecutive crossings.
//! A braid move creates a canceling pair next to the crossings and slides the
//! strand across one of its vertices with a commuting ZAM.

use crate::coxeter::{filling_moves, Gen, Word, WordMove};
use crate::map::{walk, Dart, Diagram, VertexId};
use crate::rules::{create_pair, delete_pair_via, Op, RuleError, Session};

use super::remove_circles;

/// A strand of one color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Strand {
    /// The arc leaving a node or boundary dart.
    Arc(Dart),
    /// A closed loop read from crossing `v` entered through `slot`; the
    /// crossing sits at word position `at`.
    Loop { v: VertexId, slot: u16, at: usize },
}

/// Crossings along the strand, with their entry slots, in word order.
pub(crate) fn chain(d: &Diagram, strand: Strand, c: Gen) -> Vec<(VertexId, u16)> {
    match strand {
        Strand::Arc(x) => walk(d, x, c).1,
        Strand::Loop { v, slot, at } => {
            let start = Dart::V(v, slot);
            let mut raw = vec![(v, slot)];
            let mut y = d.alpha(Dart::V(v, (slot + 2) % 4));
            while let Dart::V(w, t) = y {
                if y == start {
                    break;
                }
                raw.push((w, t));
                y = d.alpha(Dart::V(w, (t + 2) % 4));
            }
            let n = raw.len();
            (0..n).map(|i| raw[(i + n - at % n) % n]).collect()
        }
    }
}

pub(crate) fn letters(d: &Diagram, chain: &[(VertexId, u16)]) -> Word {
    chain.iter().map(|&(v, t)| d.vertex(v).color((t + 1) % 4)).collect()
}

/// Applies one word move to the strand. Returns the strand handle afterwards,
/// or `None` when a loop disappeared.
pub(crate) fn realize(s: &mut Session, c: Gen, strand: Strand, mv: WordMove) -> Result<Option<Strand>, RuleError> {
    let ch = chain(s.diagram(), strand, c);
    let n = ch.len();
    match mv {
        WordMove::Cancel { pos } => {
            if pos + 1 >= n {
                return Err(RuleError::Precondition("cancel past the end of the strand".into()));
            }
            let ((u, a), (v, b)) = (ch[pos], ch[pos + 1]);
            delete_pair_via(s, u, v, ((a + 2) % 4, b))?;
            Ok(match strand {
                Strand::Arc(_) => Some(strand),
                Strand::Loop { .. } if n == 2 => None,
                Strand::Loop { .. } => {
                    let (v, slot) = ch[(pos + 2) % n];
                    Some(Strand::Loop { v, slot, at: if pos + 2 < n { pos } else { 0 } })
                }
            })
        }
        WordMove::Braid { pos, len } => {
            if pos + len > n {
                return Err(RuleError::Precondition("braid past the end of the strand".into()));
            }
            if matches!(strand, Strand::Loop { .. }) && len == n {
                return Err(RuleError::Precondition("braid covers the whole loop".into()));
            }
            braid(s, c, &ch[pos..pos + len])?;
            Ok(match strand {
                Strand::Arc(_) => Some(strand),
                Strand::Loop { .. } => {
                    let k = (pos + len) % n;
                    Some(Strand::Loop { v: ch[k].0, slot: ch[k].1, at: k })
                }
            })
        }
    }
}

/// Replaces the alternating crossings `seg` by the other alternating word.
fn braid(s: &mut Session, c: Gen, seg: &[(VertexId, u16)]) -> Result<(), RuleError> {
    let d = s.diagram();
    let word = letters(d, seg);
    let (lo, hi) = (word[0].min(word[1]), word[0].max(word[1]));
    let ids: Vec<VertexId> = seg.iter().map(|x| x.0).collect();
    let site = vec![ids.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","), c.to_string()];
    let mut last = RuleError::Precondition("no side admits the braid".into());
    for side in [1u16, 3] {
        let near: Vec<Dart> = seg.iter().map(|&(v, t)| Dart::V(v, (t + side) % 4)).collect();
        let r = s.macro_op("braid_on_strand", site.clone(), |s| {
            let (w, _) = create_pair(s, &near, lo, hi)?;
            let m = s.diagram().vertex(w).m;
            for t in 0..2 * m {
                let spokes: Vec<Option<VertexId>> =
                    (0..m).map(|k| s.diagram().alpha(Dart::V(w, (t + k) % (2 * m))).vertex()).collect();
                if spokes.iter().any(|x| x.is_none_or(|v| !ids.contains(&v))) {
                    continue;
                }
                let new_ids: Vec<VertexId> = (0..m).map(|_| s.fresh_id()).collect();
                if s.apply(Op::ZamCommuting { w, t, new_ids }).is_ok() {
                    return Ok(());
                }
            }
            Err(RuleError::Precondition("created pair does not carry the strand".into()))
        });
        match r {
            Ok(()) => return Ok(()),
            Err(e @ RuleError::Budget(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Runs word moves computed on the strand's word.
pub(crate) fn realize_all(
    s: &mut Session,
    c: Gen,
    mut strand: Strand,
    moves: &[WordMove],
) -> Result<Option<Strand>, RuleError> {
    let sys = s.diagram().sys.clone();
    let mut word = letters(s.diagram(), &chain(s.diagram(), strand, c));
    for &mv in moves {
        if !mv.apply(&sys, &mut word) {
            return Err(RuleError::Precondition(format!("move {mv:?} does not apply to the strand word")));
        }
        match realize(s, c, strand, mv)? {
            Some(x) => strand = x,
            None => return Ok(None),
        }
        if letters(s.diagram(), &chain(s.diagram(), strand, c)) != word {
            return Err(RuleError::Stuck(format!("strand of color {c} does not read the rewritten word")));
        }
    }
    Ok(Some(strand))
}

/// Empties every closed loop of color `c` by filling its word, then removes the
/// circles of that color.
pub(crate) fn remove_loops(s: &mut Session, c: Gen) -> Result<(), RuleError> {
    loop {
        let g = crate::map::color_subgraph(s.diagram(), c);
        let Some(l) = g.loops().next() else { break };
        let (v, slot) = l.crossings[0];
        let strand = Strand::Loop { v, slot, at: 0 };
        let word = letters(s.diagram(), &chain(s.diagram(), strand, c));
        let sys = s.diagram().sys.clone();
        let moves = filling_moves(&sys, &word)?;
        if realize_all(s, c, strand, &moves)?.is_some() {
            return Err(RuleError::Stuck(format!("loop of color {c} did not empty")));
        }
    }
    remove_circles(s, Some(c))
}
