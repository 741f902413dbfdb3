//! Colored planar combinatorial maps.
//!
//! A diagram is a rotation system: every vertex owns `2m` darts in counterclockwise
//! order, and `links` pairs darts into edges. The boundary of a patch is modelled as
//! one pseudo-vertex whose points are listed counterclockwise around the patch; seen
//! from inside the map its rotation runs the other way. Boundary points may be joined
//! to each other directly, which gives arcs crossing the patch without vertices.

mod canon;
mod color;
mod patch;
mod text;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::coxeter::{CoxeterSystem, Gen, Word};

pub use canon::{canonical_code, code_digest, digest, Digest};
pub(crate) use canon::{component_code, traverse};
pub(crate) use color::{is_node, walk};
pub use color::{classify_angles, color_faces, color_subgraph, AngleKind, ColorArc, ColorSubgraph};
pub use patch::{cut_patch, cut_region, glue, mirror, replace_region, rotate_boundary, Region};
pub use text::{parse, serialize, ParseError};

pub type VertexId = u32;

/// A half-edge: slot of a vertex or a boundary point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dart {
    V(VertexId, u16),
    B(u32),
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dart::V(v, s) => write!(f, "{v}.{s}"),
            Dart::B(p) => write!(f, "~{p}"),
        }
    }
}

impl Dart {
    pub fn vertex(self) -> Option<VertexId> {
        match self {
            Dart::V(v, _) => Some(v),
            Dart::B(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub lo: Gen,
    pub hi: Gen,
    pub m: u16,
    /// Oriented systems: first slot of the block of `m` outgoing darts.
    pub out_start: Option<u16>,
    pub links: Vec<Dart>,
}

impl Vertex {
    pub fn new(lo: Gen, hi: Gen, m: u16, out_start: Option<u16>) -> Self {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Vertex { lo, hi, m, out_start, links: vec![Dart::B(u32::MAX); 2 * m as usize] }
    }

    pub fn degree(&self) -> u16 {
        2 * self.m
    }

    pub fn color(&self, slot: u16) -> Gen {
        if slot % 2 == 0 {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn is_out(&self, slot: u16) -> Option<bool> {
        let d = self.degree();
        self.out_start.map(|o| (slot + d - o % d) % d < self.m)
    }

    pub fn slot(&self, s: i64) -> u16 {
        s.rem_euclid(self.degree() as i64) as u16
    }

    pub fn has_color(&self, c: Gen) -> bool {
        self.lo == c || self.hi == c
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryPoint {
    pub color: Gen,
    /// Oriented systems: the edge at this point is directed into the patch.
    pub inward: Option<bool>,
    pub link: Dart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Cw,
    Ccw,
}

impl Spin {
    pub fn flip(self) -> Spin {
        match self {
            Spin::Cw => Spin::Ccw,
            Spin::Ccw => Spin::Cw,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Diagram {
    pub sys: Arc<CoxeterSystem>,
    pub vertices: BTreeMap<VertexId, Vertex>,
    /// Counterclockwise boundary points; empty for closed diagrams.
    pub boundary: Vec<BoundaryPoint>,
    pub circles: BTreeMap<(Gen, Option<Spin>), u32>,
    next_id: VertexId,
}

/// Structural equality: same ids, links, boundary and circles. The id counter is ignored.
impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        self.sys == other.sys
            && self.vertices == other.vertices
            && self.boundary == other.boundary
            && self.circles == other.circles
    }
}

impl Eq for Diagram {}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("diagram is closed")]
    Closed,
    #[error("region is not a disk")]
    NotDisk,
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
}

/// One failed axiom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: &'static str,
    pub detail: String,
}

/// A face: the cyclic dart sequence of one orbit of `phi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    /// Number of vertex corners on the face.
    pub fn size(&self) -> usize {
        self.darts.iter().filter(|d| matches!(d, Dart::V(..))).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EulerRecord {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub chi: i64,
    pub touches_boundary: bool,
}

/// A connected component: its vertices and whether it meets the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub boundary: bool,
}

impl Diagram {
    pub fn new(sys: Arc<CoxeterSystem>) -> Self {
        Diagram {
            sys,
            vertices: BTreeMap::new(),
            boundary: Vec::new(),
            circles: BTreeMap::new(),
            next_id: 1,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty() && self.boundary.is_empty() && self.circles.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        let darts: usize = self.vertices.values().map(|v| v.links.len()).sum();
        (darts + self.boundary.len()) / 2
    }

    pub fn circle_count(&self) -> u32 {
        self.circles.values().sum()
    }

    pub fn next_id(&self) -> VertexId {
        self.next_id
    }

    /// Resets the id counter to one past the largest id in use.
    pub fn reset_ids(&mut self) {
        self.next_id = self.vertices.keys().next_back().map_or(1, |&v| v + 1);
    }

    pub fn fresh_id(&mut self) -> VertexId {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    pub fn reserve_id(&mut self, id: VertexId) {
        self.next_id = self.next_id.max(id + 1);
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[&v]
    }

    pub fn add_vertex(&mut self, id: VertexId, vertex: Vertex) {
        self.reserve_id(id);
        self.vertices.insert(id, vertex);
    }

    pub fn exists(&self, d: Dart) -> bool {
        match d {
            Dart::V(v, s) => self.vertices.get(&v).is_some_and(|x| s < x.degree()),
            Dart::B(p) => (p as usize) < self.boundary.len(),
        }
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        match d {
            Dart::V(v, s) => self.vertices[&v].links[s as usize],
            Dart::B(p) => self.boundary[p as usize].link,
        }
    }

    pub fn set_half(&mut self, d: Dart, to: Dart) {
        match d {
            Dart::V(v, s) => self.vertices.get_mut(&v).expect("vertex").links[s as usize] = to,
            Dart::B(p) => self.boundary[p as usize].link = to,
        }
    }

    /// Pairs two darts into an edge.
    pub fn link(&mut self, a: Dart, b: Dart) {
        self.set_half(a, b);
        self.set_half(b, a);
    }

    pub fn color(&self, d: Dart) -> Gen {
        match d {
            Dart::V(v, s) => self.vertices[&v].color(s),
            Dart::B(p) => self.boundary[p as usize].color,
        }
    }

    /// Direction of a dart seen from its owner; `None` when unoriented.
    pub fn is_out(&self, d: Dart) -> Option<bool> {
        match d {
            Dart::V(v, s) => self.vertices[&v].is_out(s),
            Dart::B(p) => self.boundary[p as usize].inward,
        }
    }

    /// Counterclockwise successor in the owner's rotation.
    pub fn sigma(&self, d: Dart) -> Dart {
        match d {
            Dart::V(v, s) => Dart::V(v, (s + 1) % self.vertices[&v].degree()),
            Dart::B(p) => {
                let k = self.boundary.len() as u32;
                Dart::B((p + k - 1) % k)
            }
        }
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        match d {
            Dart::V(v, s) => {
                let deg = self.vertices[&v].degree();
                Dart::V(v, (s + deg - 1) % deg)
            }
            Dart::B(p) => Dart::B((p + 1) % self.boundary.len() as u32),
        }
    }

    /// Face permutation: cross the edge, then turn counterclockwise.
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma(self.alpha(d))
    }

    pub fn phi_inv(&self, d: Dart) -> Dart {
        self.alpha(self.sigma_inv(d))
    }

    pub fn darts(&self) -> Vec<Dart> {
        let mut out: Vec<Dart> = self
            .vertices
            .iter()
            .flat_map(|(&v, x)| (0..x.degree()).map(move |s| Dart::V(v, s)))
            .collect();
        out.extend((0..self.boundary.len() as u32).map(Dart::B));
        out
    }

    pub fn vertex_darts(&self, v: VertexId) -> impl Iterator<Item = Dart> + '_ {
        (0..self.vertices[&v].degree()).map(move |s| Dart::V(v, s))
    }

    pub fn face_of(&self, d: Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut x = self.phi(d);
        while x != d {
            out.push(x);
            x = self.phi(x);
        }
        out
    }

    pub fn faces(&self) -> Vec<Face> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for d in self.darts() {
            if seen.contains(&d) {
                continue;
            }
            let face = self.face_of(d);
            seen.extend(face.iter().copied());
            out.push(Face { darts: face });
        }
        out
    }

    /// True when the traversal `a -> alpha(a)` and `b -> alpha(b)` lie on one face.
    pub fn same_face_traversal(&self, a: Dart, b: Dart) -> bool {
        let start = self.phi(a);
        let target = self.phi(b);
        let mut x = start;
        loop {
            if x == target {
                return true;
            }
            x = self.phi(x);
            if x == start {
                return false;
            }
        }
    }

    pub fn components(&self) -> Vec<Component> {
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        let mut out = Vec::new();
        let mut boundary_comp: Option<Component> = None;
        if !self.boundary.is_empty() {
            let mut comp = Vec::new();
            let mut stack: Vec<VertexId> = Vec::new();
            for p in &self.boundary {
                if let Dart::V(v, _) = p.link {
                    if seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            self.flood(&mut stack, &mut seen, &mut comp);
            comp.sort_unstable();
            boundary_comp = Some(Component { vertices: comp, boundary: true });
        }
        for &v in self.vertices.keys() {
            if seen.contains(&v) {
                continue;
            }
            seen.insert(v);
            let mut comp = Vec::new();
            let mut stack = vec![v];
            self.flood(&mut stack, &mut seen, &mut comp);
            comp.sort_unstable();
            out.push(Component { vertices: comp, boundary: false });
        }
        if let Some(b) = boundary_comp {
            out.insert(0, b);
        }
        out
    }

    fn flood(&self, stack: &mut Vec<VertexId>, seen: &mut BTreeSet<VertexId>, comp: &mut Vec<VertexId>) {
        while let Some(v) = stack.pop() {
            comp.push(v);
            for &l in &self.vertices[&v].links {
                if let Dart::V(w, _) = l {
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
    }

    pub fn component_of(&self, v: VertexId) -> Vec<VertexId> {
        let mut seen = BTreeSet::from([v]);
        let mut comp = Vec::new();
        let mut stack = vec![v];
        self.flood(&mut stack, &mut seen, &mut comp);
        comp.sort_unstable();
        comp
    }

    /// Per-component V, E, F and V - E + F; the boundary counts as one vertex.
    pub fn euler_report(&self) -> Vec<EulerRecord> {
        let mut face_id: BTreeMap<Dart, usize> = BTreeMap::new();
        for (i, f) in self.faces().into_iter().enumerate() {
            for d in f.darts {
                face_id.insert(d, i);
            }
        }
        self.components()
            .into_iter()
            .map(|c| {
                let mut darts: Vec<Dart> =
                    c.vertices.iter().flat_map(|&v| self.vertex_darts(v)).collect();
                if c.boundary {
                    darts.extend((0..self.boundary.len() as u32).map(Dart::B));
                }
                let faces: BTreeSet<usize> = darts.iter().map(|d| face_id[d]).collect();
                let v = c.vertices.len() + usize::from(c.boundary);
                let e = darts.len() / 2;
                let f = faces.len();
                EulerRecord {
                    v: c.vertices.len(),
                    e,
                    f,
                    chi: v as i64 - e as i64 + f as i64,
                    touches_boundary: c.boundary,
                }
            })
            .collect()
    }

    pub fn boundary_word(&self) -> Result<Word, MapError> {
        if self.boundary.is_empty() {
            return Err(MapError::Closed);
        }
        Ok(self.boundary.iter().map(|p| p.color).collect())
    }

    /// Boundary colors and directions, compared when patches are exchanged.
    pub fn boundary_signature(&self) -> Vec<(Gen, Option<bool>)> {
        self.boundary.iter().map(|p| (p.color, p.inward)).collect()
    }

    pub fn add_circle(&mut self, color: Gen, spin: Option<Spin>) {
        *self.circles.entry((color, spin)).or_insert(0) += 1;
    }

    pub fn remove_circle(&mut self, color: Gen, spin: Option<Spin>) -> bool {
        match self.circles.get_mut(&(color, spin)) {
            Some(n) if *n > 0 => {
                *n -= 1;
                if *n == 0 {
                    self.circles.remove(&(color, spin));
                }
                true
            }
            _ => false,
        }
    }

    /// Vertices whose type is exactly `(lo, hi)`.
    pub fn count_type(&self, lo: Gen, hi: Gen) -> usize {
        self.vertices.values().filter(|v| v.lo == lo && v.hi == hi).count()
    }

    /// Sub-diagram induced by a closed set of vertices, keeping ids.
    pub fn extract(&self, vs: &[VertexId]) -> Diagram {
        let mut d = Diagram::new(self.sys.clone());
        for &v in vs {
            d.vertices.insert(v, self.vertices[&v].clone());
        }
        d.next_id = self.next_id;
        d
    }

    /// Removes vertices without touching their neighbours' links.
    pub fn remove_vertices(&mut self, vs: &[VertexId]) {
        for v in vs {
            self.vertices.remove(v);
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |kind: &'static str, detail: String| out.push(Violation { kind, detail });
        let sys = &self.sys;
        let oriented = sys.oriented;
        let mut structural = true;
        for (&id, v) in &self.vertices {
            if v.lo == 0 || v.hi as usize > sys.rank {
                bad("type", format!("vertex {id}: generator out of range"));
                structural = false;
                continue;
            }
            if v.lo == v.hi {
                bad("alternation", format!("vertex {id}: consecutive darts share color {}", v.lo));
                structural = false;
                continue;
            }
            match sys.m(v.lo, v.hi) {
                Some(m) if m == v.m => {}
                _ => {
                    bad("type", format!("vertex {id}: exponent does not match type"));
                    structural = false;
                    continue;
                }
            }
            if v.links.len() != v.degree() as usize {
                bad("degree", format!("vertex {id}: degree {} != {}", v.links.len(), v.degree()));
                structural = false;
            }
            match (oriented, v.out_start) {
                (true, None) => bad("orientation", format!("vertex {id}: missing orientation")),
                (true, Some(o)) if o >= v.degree() => {
                    bad("orientation", format!("vertex {id}: out block start {o} out of range"))
                }
                (false, Some(_)) => bad("orientation", format!("vertex {id}: orientation on unoriented system")),
                _ => {}
            }
        }
        for (p, b) in self.boundary.iter().enumerate() {
            if b.color == 0 || b.color as usize > sys.rank {
                bad("boundary", format!("boundary point {p}: bad color"));
                structural = false;
            }
            if b.inward.is_some() != oriented {
                bad("orientation", format!("boundary point {p}: direction flag mismatch"));
            }
        }
        for (&(c, spin), _) in &self.circles {
            if c == 0 || c as usize > sys.rank {
                bad("circle", format!("circle color {c} out of range"));
            }
            if spin.is_some() != oriented {
                bad("circle", format!("circle of color {c}: spin flag mismatch"));
            }
        }
        if !structural {
            return out;
        }
        for d in self.darts() {
            let p = self.alpha(d);
            if !self.exists(p) {
                bad("involution", format!("{d} links to missing dart {p}"));
                structural = false;
                continue;
            }
            if p == d {
                bad("involution", format!("{d} links to itself"));
                structural = false;
                continue;
            }
            if self.alpha(p) != d {
                bad("involution", format!("{d} -> {p} is not symmetric"));
                structural = false;
                continue;
            }
            if d < p {
                if self.color(d) != self.color(p) {
                    bad("color", format!("edge {d} - {p} joins different colors"));
                }
                if oriented {
                    if let (Some(a), Some(b)) = (self.is_out(d), self.is_out(p)) {
                        if a == b {
                            bad("orientation", format!("edge {d} - {p} has no consistent direction"));
                        }
                    }
                }
            }
        }
        if !structural {
            return out;
        }
        for (i, r) in self.euler_report().iter().enumerate() {
            if r.chi != 2 {
                bad("genus", format!("component {i}: V - E + F = {}", r.chi));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}
