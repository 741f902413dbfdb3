#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use rand::prelude::*;

use coxdiag::coxeter::{build_system, CoxeterSystem, Family};
use coxdiag::map::{cut_patch, Dart, Diagram, Vertex, VertexId};

pub fn sys(f: Family, n: usize) -> Arc<CoxeterSystem> {
    Arc::new(build_system(f, n).unwrap())
}

/// The disk spanned by up to `k` vertices grown breadth-first from a random
/// vertex. Shrinks the set until it cuts out a disk.
pub fn random_patch(d: &Diagram, rng: &mut impl Rng, k: usize) -> Option<Diagram> {
    let ids: Vec<VertexId> = d.vertices.keys().copied().collect();
    let start = *ids.choose(rng)?;
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let mut next: Vec<VertexId> = d.vertices[&v].links.iter().filter_map(|l| l.vertex()).collect();
        next.shuffle(rng);
        for w in next {
            if !order.contains(&w) {
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    for n in (1..=k.min(order.len())).rev() {
        if let Ok((p, _)) = cut_patch(d, &order[..n]) {
            return Some(p);
        }
    }
    None
}

/// Renames vertex ids by a random permutation.
pub fn relabel(d: &Diagram, rng: &mut impl Rng) -> Diagram {
    let old: Vec<VertexId> = d.vertices.keys().copied().collect();
    let mut new: Vec<VertexId> = (1..=old.len() as VertexId * 3).collect();
    new.shuffle(rng);
    let map: BTreeMap<VertexId, VertexId> = old.iter().copied().zip(new).collect();
    let dart = |x: Dart| match x {
        Dart::V(v, s) => Dart::V(map[&v], s),
        b => b,
    };
    let mut out = Diagram::new(d.sys.clone());
    for (id, v) in &d.vertices {
        out.add_vertex(map[id], Vertex { links: v.links.iter().map(|&l| dart(l)).collect(), ..v.clone() });
    }
    out.boundary = d.boundary.iter().map(|p| coxdiag::map::BoundaryPoint { link: dart(p.link), ..p.clone() }).collect();
    out.circles = d.circles.clone();
    out
}
