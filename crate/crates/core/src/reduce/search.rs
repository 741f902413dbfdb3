//! Breadth-first search over diagrams with a fixed boundary.

use std::collections::{HashSet, VecDeque};

use crate::coxeter::Gen;
use crate::map::{digest, Diagram};
use crate::rules::{apply_op, delete_pair_ops, find_matches, Match, Op, RuleError, RuleKind, RuleSet};

/// Move families the search may use. Moves creating vertices are left out so
/// the search space stays finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMove {
    Bridge,
    CancelPair,
    DeletePair,
    ZamCommuting,
    ZamA3,
    CircleRemove,
}

impl SearchMove {
    pub const DEFAULT: [SearchMove; 5] = [
        SearchMove::Bridge,
        SearchMove::CancelPair,
        SearchMove::ZamCommuting,
        SearchMove::ZamA3,
        SearchMove::CircleRemove,
    ];

    fn kind(self) -> RuleKind {
        match self {
            SearchMove::Bridge => RuleKind::Bridge,
            SearchMove::CancelPair => RuleKind::CancelPair,
            SearchMove::DeletePair => RuleKind::DeleteAdjacentPair,
            SearchMove::ZamCommuting => RuleKind::ZamCommuting,
            SearchMove::ZamA3 => RuleKind::ZamA3,
            SearchMove::CircleRemove => RuleKind::CircleRemove,
        }
    }
}

fn match_ops(d: &Diagram, m: &Match, rules: &RuleSet) -> Option<Vec<Op>> {
    match m {
        Match::Primitive(op) => Some(vec![op.clone()]),
        Match::DeletePair(u, v) => delete_pair_ops(d, *u, *v, rules, None).ok(),
        Match::InsertPair { .. } => None,
    }
}

/// Shortest move sequence from `start` to a diagram satisfying `goal`.
///
/// States are deduplicated by canonical code. `budget` caps the number of
/// expanded states; running out is a [`RuleError::Budget`] error.
pub fn bfs_equivalence(
    signature: &[(Gen, Option<bool>)],
    start: &Diagram,
    goal: impl Fn(&Diagram) -> bool,
    budget: usize,
    rules: &RuleSet,
    moves: &[SearchMove],
) -> Result<Vec<Op>, RuleError> {
    if start.boundary_signature() != signature {
        return Err(RuleError::Precondition("start does not have the given boundary".into()));
    }
    if goal(start) {
        return Ok(Vec::new());
    }
    // arena of (diagram, parent, ops from the parent)
    let mut arena: Vec<(Diagram, usize, Vec<Op>)> = vec![(start.clone(), usize::MAX, Vec::new())];
    let mut seen: HashSet<String> = HashSet::from([digest(start)]);
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0;
    while let Some(i) = queue.pop_front() {
        if expanded >= budget {
            return Err(RuleError::Budget(budget));
        }
        expanded += 1;
        let d = arena[i].0.clone();
        for mv in moves {
            for m in find_matches(&d, mv.kind(), rules) {
                let Some(ops) = match_ops(&d, &m, rules) else { continue };
                let mut next = d.clone();
                if ops.iter().any(|op| apply_op(&mut next, op, rules).is_err()) {
                    continue;
                }
                if !seen.insert(digest(&next)) {
                    continue;
                }
                let hit = goal(&next);
                arena.push((next, i, ops));
                let j = arena.len() - 1;
                if hit {
                    return Ok(path_to(&arena, j));
                }
                queue.push_back(j);
            }
        }
    }
    Err(RuleError::Stuck(format!("no path after {expanded} states")))
}

fn path_to(arena: &[(Diagram, usize, Vec<Op>)], mut j: usize) -> Vec<Op> {
    let mut chunks = Vec::new();
    while arena[j].1 != usize::MAX {
        chunks.push(arena[j].2.clone());
        j = arena[j].1;
    }
    chunks.into_iter().rev().flatten().collect()
}

/// Searches for a reduction of a closed diagram to the empty diagram.
pub fn search_to_empty(
    d: &Diagram,
    rules: &RuleSet,
    moves: &[SearchMove],
    budget: usize,
) -> Result<Vec<Op>, RuleError> {
    bfs_equivalence(&d.boundary_signature(), d, |x| x.is_empty(), budget, rules, moves)
}
