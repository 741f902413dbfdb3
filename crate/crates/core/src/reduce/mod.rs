//! Reduction strategies: closed diagrams are rewritten to the empty diagram and
//! every move is recorded in a trace.
//!
//! Each strategy works on a [`Session`]. A failed reduction keeps the partial
//! trace and the diagram it reached, so callers can inspect or shrink it.

mod an;
mod dihedral;
mod product;
mod search;
mod strand;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::coxeter::{Family, Gen};
use crate::map::Diagram;
use crate::rules::{delete_pair, Op, RuleError, RuleSet, Session};
use crate::trace::Trace;

pub use an::{apply_trick, normalize_crossings_on_edge, reduce_an, trick_patches, TrickPatches, TrickSite};
pub use dihedral::{find_adjacent_varied_angles, reduce_braid_dihedral, reduce_dihedral, VariedSite};
pub use product::reduce_product;
pub use search::{bfs_equivalence, search_to_empty, SearchMove};

/// Reduction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Dihedral,
    AFamily,
    BraidDihedral,
    Product,
    GenericGreedy,
}

impl Strategy {
    /// The strategy for a system's family.
    pub fn for_system(sys: &crate::coxeter::CoxeterSystem) -> Strategy {
        match sys.family {
            Family::I => Strategy::Dihedral,
            Family::A => Strategy::AFamily,
            Family::BraidI => Strategy::BraidDihedral,
            Family::Explicit if sys.components().len() > 1 => Strategy::Product,
            Family::Explicit if sys.rank == 2 => Strategy::Dihedral,
            Family::Explicit => Strategy::GenericGreedy,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Dihedral => "dihedral",
            Strategy::AFamily => "an",
            Strategy::BraidDihedral => "braid",
            Strategy::Product => "product",
            Strategy::GenericGreedy => "greedy",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "dihedral" => Strategy::Dihedral,
            "an" | "a_family" => Strategy::AFamily,
            "braid" | "braid_dihedral" => Strategy::BraidDihedral,
            "product" => Strategy::Product,
            "greedy" | "generic_greedy" => Strategy::GenericGreedy,
            _ => return Err(format!("unknown strategy `{s}`")),
        })
    }
}

/// Progress of the type A reduction, compared lexicographically: vertices of
/// the lowest remaining non-commuting type, all vertices, edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProgressMeasure {
    pub nodes: usize,
    pub vertices: usize,
    pub edges: usize,
}

impl ProgressMeasure {
    pub fn of(d: &Diagram, lo: Gen) -> Self {
        ProgressMeasure { nodes: d.count_type(lo, lo + 1), vertices: d.vertex_count(), edges: d.edge_count() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    Invalid,
    Unsupported,
    Stuck,
    Budget,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Invalid => "invalid input",
            FailureKind::Unsupported => "unsupported",
            FailureKind::Stuck => "stuck",
            FailureKind::Budget => "budget exhausted",
        })
    }
}

/// A reduction that did not reach the empty diagram.
#[derive(Debug, Clone, Error)]
#[error("{kind}: {message}")]
pub struct ReduceFailure {
    pub kind: FailureKind,
    pub message: String,
    /// Moves made before the failure; they verify from the input.
    pub partial: Trace,
    /// The diagram reached.
    pub state: Diagram,
}

/// A successful reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub trace: Trace,
    pub strategy: Strategy,
    /// Loop iterations of the strategy (pair deletions for the braid strategy).
    pub iterations: usize,
    /// Measures at phase boundaries of the type A strategy.
    pub measures: Vec<ProgressMeasure>,
}

#[derive(Debug, Clone, Default)]
pub struct ReduceOptions {
    pub strategy: Option<Strategy>,
    /// Cap on primitive steps.
    pub budget: Option<usize>,
}

/// Counters filled in by the strategies.
#[derive(Debug, Default)]
pub(crate) struct Stats {
    pub iterations: usize,
    pub measures: Vec<ProgressMeasure>,
}

/// Reduces a closed diagram with the strategy of its system.
pub fn reduce(d: &Diagram, rules: &RuleSet) -> Result<Trace, ReduceFailure> {
    reduce_with(d, rules, &ReduceOptions::default()).map(|r| r.trace)
}

/// Reduces a closed diagram with explicit options.
pub fn reduce_with(d: &Diagram, rules: &RuleSet, opts: &ReduceOptions) -> Result<Reduction, ReduceFailure> {
    let strategy = opts.strategy.unwrap_or_else(|| Strategy::for_system(&d.sys));
    run(d, rules, opts.budget, strategy, |s, st| match strategy {
        Strategy::Dihedral => dihedral::dihedral(s, st),
        Strategy::AFamily => an::an(s, st),
        Strategy::BraidDihedral => dihedral::braid(s, st),
        Strategy::Product => product::product(s, None),
        Strategy::GenericGreedy => greedy(s),
    })
}

/// [`reduce_with`] over many diagrams, in parallel with the `parallel` feature.
/// Results are in input order.
pub fn reduce_batch(ds: &[Diagram], rules: &RuleSet, opts: &ReduceOptions) -> Vec<Result<Reduction, ReduceFailure>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        ds.par_iter().map(|d| reduce_with(d, rules, opts)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    reduce_batch_sequential(ds, rules, opts)
}

/// [`reduce_batch`] on the calling thread.
pub fn reduce_batch_sequential(
    ds: &[Diagram],
    rules: &RuleSet,
    opts: &ReduceOptions,
) -> Vec<Result<Reduction, ReduceFailure>> {
    ds.iter().map(|d| reduce_with(d, rules, opts)).collect()
}

pub(crate) fn run(
    d: &Diagram,
    rules: &RuleSet,
    budget: Option<usize>,
    strategy: Strategy,
    f: impl FnOnce(&mut Session, &mut Stats) -> Result<(), RuleError>,
) -> Result<Reduction, ReduceFailure> {
    let fail = |kind, message: String, d: &Diagram| ReduceFailure {
        kind,
        message,
        partial: Trace::empty(d),
        state: d.clone(),
    };
    if !d.is_closed() {
        return Err(fail(FailureKind::Invalid, "diagram has a boundary".into(), d));
    }
    if let Some(v) = d.validate().first() {
        return Err(fail(FailureKind::Invalid, format!("{}: {}", v.kind, v.detail), d));
    }
    let mut s = Session::new(d.clone(), rules).with_budget(budget);
    let mut stats = Stats::default();
    let r = f(&mut s, &mut stats).and_then(|()| {
        if s.diagram().is_empty() {
            Ok(())
        } else {
            Err(RuleError::Stuck("strategy ended on a nonempty diagram".into()))
        }
    });
    let (trace, state) = s.finish();
    match r {
        Ok(()) => Ok(Reduction { trace, strategy, iterations: stats.iterations, measures: stats.measures }),
        Err(e) => {
            let kind = match e {
                RuleError::Budget(_) => FailureKind::Budget,
                RuleError::Unsupported(_) => FailureKind::Unsupported,
                RuleError::Coxeter(crate::coxeter::CoxeterError::Unsupported(_)) => FailureKind::Unsupported,
                _ => FailureKind::Stuck,
            };
            Err(ReduceFailure { kind, message: e.to_string(), partial: trace, state })
        }
    }
}

/// Removes circles, all or those of one color.
pub(crate) fn remove_circles(s: &mut Session, color: Option<Gen>) -> Result<(), RuleError> {
    let circles: Vec<_> = s
        .diagram()
        .circles
        .iter()
        .filter(|((c, _), _)| color.is_none_or(|x| x == *c))
        .flat_map(|(&k, &n)| std::iter::repeat_n(k, n as usize))
        .collect();
    for (color, spin) in circles {
        s.apply(Op::CircleRemove { color, spin })?;
    }
    Ok(())
}

/// Deletes `u`, `v` if possible; `Ok(false)` when the deletion is blocked.
pub(crate) fn try_delete(s: &mut Session, u: u32, v: u32) -> Result<bool, RuleError> {
    match delete_pair(s, u, v) {
        Ok(()) => Ok(true),
        Err(e @ RuleError::Budget(_)) => Err(e),
        Err(_) => Ok(false),
    }
}

/// Deletes some adjacent pair whose type passes `keep`. Returns whether one was found.
pub(crate) fn delete_some_pair(s: &mut Session, keep: impl Fn(Gen, Gen) -> bool) -> Result<bool, RuleError> {
    let mut pairs = Vec::new();
    for (&u, x) in &s.diagram().vertices {
        if !keep(x.lo, x.hi) {
            continue;
        }
        for l in &x.links {
            if let crate::map::Dart::V(v, _) = *l {
                let y = &s.diagram().vertices[&v];
                if u < v && (y.lo, y.hi) == (x.lo, x.hi) && !pairs.contains(&(u, v)) {
                    pairs.push((u, v));
                }
            }
        }
    }
    for (u, v) in pairs {
        if try_delete(s, u, v)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Fallback: delete adjacent same-type pairs and circles while possible, then
/// search the remainder.
fn greedy(s: &mut Session) -> Result<(), RuleError> {
    loop {
        remove_circles(s, None)?;
        if s.diagram().is_empty() {
            return Ok(());
        }
        if !delete_some_pair(s, |_, _| true)? {
            break;
        }
    }
    let moves = [SearchMove::DeletePair, SearchMove::ZamCommuting, SearchMove::ZamA3, SearchMove::Bridge];
    let ops = search_to_empty(s.diagram(), s.rules(), &moves, 20_000)?;
    s.apply_all(ops)
}

#[cfg(test)]
mod tests;
