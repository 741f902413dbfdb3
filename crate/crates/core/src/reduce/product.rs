//! Reducible systems: the factors commute, so each factor is cleared in turn
//! after pushing the crossings with later factors out of the way.

use crate::coxeter::Gen;
use crate::map::{color_subgraph, walk, Dart, Diagram};
use crate::rules::{delete_pair_via, push_crossing, RuleError, RuleSet, Session};

use super::strand::remove_loops;
use super::{dihedral, remove_circles, run, ReduceFailure, Reduction, Stats, Strategy};

fn check_partition(d: &Diagram, parts: &[Vec<Gen>]) -> Result<(), RuleError> {
    let sys = &d.sys;
    let mut all: Vec<Gen> = parts.iter().flatten().copied().collect();
    all.sort();
    if all != sys.gens().collect::<Vec<_>>() {
        return Err(RuleError::Precondition("partition does not cover the generators once".into()));
    }
    for (i, p) in parts.iter().enumerate() {
        for q in &parts[i + 1..] {
            if p.iter().any(|&a| q.iter().any(|&b| !sys.commute(a, b))) {
                return Err(RuleError::Precondition("partition blocks do not commute".into()));
            }
        }
    }
    Ok(())
}

/// Deletes every vertex of type `(a, b)`: crossings on an arc between two such
/// vertices are pushed around its start, then the two ends cancel.
fn clear_pairs(s: &mut Session, a: Gen, b: Gen) -> Result<(), RuleError> {
    let cap = 16 * (s.diagram().vertex_count() + 4).pow(2);
    for _ in 0..cap {
        if s.diagram().count_type(a, b) == 0 {
            return Ok(());
        }
        let g = color_subgraph(s.diagram(), a);
        let arc = g
            .arcs
            .iter()
            .filter(|r| !r.closed)
            .find(|r| matches!((r.start, r.end), (Dart::V(x, _), Dart::V(y, _)) if x != y))
            .ok_or_else(|| RuleError::Stuck(format!("no arc of color {a} joins two vertices")))?;
        let start = arc.start;
        let Dart::V(x, e) = start else { unreachable!() };
        while !walk(s.diagram(), start, a).1.is_empty() {
            push_crossing(s, x, e)?;
        }
        let Dart::V(y, f) = walk(s.diagram(), start, a).0 else { unreachable!() };
        delete_pair_via(s, x, y, (e, f))?;
    }
    Err(RuleError::Stuck(format!("no progress on type ({a}, {b})")))
}

pub(crate) fn product(s: &mut Session, partition: Option<&[Vec<Gen>]>) -> Result<(), RuleError> {
    let parts: Vec<Vec<Gen>> = match partition {
        Some(p) => p.to_vec(),
        None => s.diagram().sys.components(),
    };
    check_partition(s.diagram(), &parts)?;
    let last = parts.len() - 1;
    for (i, p) in parts.iter().enumerate() {
        match p.as_slice() {
            [a] => remove_loops(s, *a)?,
            [a, b] if i == last => {
                let _ = (a, b);
                dihedral::dihedral(s, &mut Stats::default())?;
            }
            [a, b] => {
                clear_pairs(s, *a, *b)?;
                remove_loops(s, *a)?;
                remove_loops(s, *b)?;
            }
            _ => return Err(RuleError::Unsupported(format!("factor of rank {} in a product", p.len()))),
        }
    }
    remove_circles(s, None)
}

/// Reduces a closed diagram of a reducible system, one commuting block of
/// generators at a time. `partition` defaults to the components of the
/// Coxeter graph.
pub fn reduce_product(
    d: &Diagram,
    rules: &RuleSet,
    partition: Option<&[Vec<Gen>]>,
) -> Result<Reduction, ReduceFailure> {
    run(d, rules, None, Strategy::Product, |s, _| product(s, partition))
}
