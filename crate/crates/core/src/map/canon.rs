//! Canonical codes: isomorphism-invariant serializations of diagrams.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use sha2::{Digest as _, Sha256};

use super::{Dart, Diagram, Spin, VertexId};

pub type Digest = String;

const TAG_B: u32 = u32::MAX;
const NONE: u32 = u32::MAX - 1;

/// Streams a code and aborts as soon as it exceeds the best code found so far.
struct Emitter<'a> {
    best: Option<&'a [u32]>,
    out: Vec<u32>,
    state: Ordering,
}

impl Emitter<'_> {
    fn emit(&mut self, x: u32) -> bool {
        if self.state == Ordering::Equal {
            if let Some(best) = self.best {
                match best.get(self.out.len()) {
                    Some(&b) if x > b => return false,
                    Some(&b) if x < b => self.state = Ordering::Less,
                    Some(_) => {}
                    None => return false,
                }
            }
        }
        self.out.push(x);
        true
    }
}

/// Breadth-first traversal from a root dart. Returns the vertex order with the
/// slot each vertex was entered through, or `None` if the code exceeds `best`.
pub(crate) fn traverse(
    d: &Diagram,
    root: Dart,
    best: Option<&[u32]>,
) -> Option<(Vec<u32>, Vec<(VertexId, u16)>)> {
    let mut em = Emitter { best, out: Vec::new(), state: Ordering::Equal };
    let mut order: Vec<(VertexId, u16)> = Vec::new();
    let mut index: BTreeMap<VertexId, u32> = BTreeMap::new();
    let mut visit = |w: VertexId, t: u16, order: &mut Vec<(VertexId, u16)>| -> u32 {
        *index.entry(w).or_insert_with(|| {
            order.push((w, t));
            order.len() as u32 - 1
        })
    };
    let offset_of = |order: &Vec<(VertexId, u16)>, w: VertexId, t: u16| -> u32 {
        let (_, e) = order.iter().find(|x| x.0 == w).copied().expect("visited");
        let deg = d.vertices[&w].degree();
        ((t + deg - e) % deg) as u32
    };
    match root {
        Dart::B(_) => {
            let k = d.boundary.len();
            if !em.emit(k as u32) {
                return None;
            }
            for p in &d.boundary {
                let dir = p.inward.map_or(NONE, u32::from);
                if !(em.emit(p.color as u32) && em.emit(dir)) {
                    return None;
                }
                let ok = match p.link {
                    Dart::V(w, t) => {
                        let n = visit(w, t, &mut order);
                        let off = offset_of(&order, w, t);
                        em.emit(n) && em.emit(off)
                    }
                    Dart::B(q) => em.emit(TAG_B) && em.emit(q),
                };
                if !ok {
                    return None;
                }
            }
        }
        Dart::V(v, s) => {
            visit(v, s, &mut order);
        }
    }
    let mut i = 0;
    while i < order.len() {
        let (v, e) = order[i];
        let x = &d.vertices[&v];
        let deg = x.degree();
        let dir = x.out_start.map_or(NONE, |o| ((o + deg - e) % deg) as u32);
        // entry parity pins the colors of the slots
        let head = [x.lo as u32, x.hi as u32, deg as u32, (e % 2) as u32, dir];
        if !head.iter().all(|&w| em.emit(w)) {
            return None;
        }
        for k in 0..deg {
            let ok = match x.links[((e + k) % deg) as usize] {
                Dart::V(w, t) => {
                    let n = visit(w, t, &mut order);
                    let off = offset_of(&order, w, t);
                    em.emit(n) && em.emit(off)
                }
                Dart::B(q) => em.emit(TAG_B) && em.emit(q),
            };
            if !ok {
                return None;
            }
        }
        i += 1;
    }
    if let Some(b) = best {
        if em.state == Ordering::Equal && em.out.len() >= b.len() {
            return None;
        }
    }
    Some((em.out, order))
}

/// Minimal code of a closed component, with the root dart that realizes it.
pub(crate) fn component_code(d: &Diagram, vs: &[VertexId]) -> (Vec<u32>, Dart) {
    let mut counts: BTreeMap<(u8, u8, Option<u16>), usize> = BTreeMap::new();
    for v in vs {
        let x = &d.vertices[v];
        *counts.entry((x.lo, x.hi, x.out_start.map(|_| 0))).or_insert(0) += 1;
    }
    let rare = counts.iter().min_by_key(|(k, &n)| (n, **k)).map(|(k, _)| *k).expect("non-empty");
    let mut best: Option<(Vec<u32>, Dart)> = None;
    for &v in vs {
        let x = &d.vertices[&v];
        if (x.lo, x.hi, x.out_start.map(|_| 0)) != rare {
            continue;
        }
        for s in 0..x.degree() {
            let root = Dart::V(v, s);
            let bound = best.as_ref().map(|b| b.0.as_slice());
            if let Some((code, _)) = traverse(d, root, bound) {
                best = Some((code, root));
            }
        }
    }
    best.expect("component has a root")
}

/// Isomorphism-invariant code. Vertex ids do not matter; boundary positions do.
pub fn canonical_code(d: &Diagram) -> Vec<u8> {
    let mut words: Vec<u32> = Vec::new();
    for b in d.sys.header().bytes() {
        words.push(b as u32);
    }
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut boundary_code = Vec::new();
    for c in d.components() {
        if c.boundary {
            boundary_code = traverse(d, Dart::B(0), None).expect("unbounded").0;
        } else {
            comps.push(component_code(d, &c.vertices).0);
        }
    }
    comps.sort();
    words.push(boundary_code.len() as u32);
    words.extend(boundary_code);
    words.push(comps.len() as u32);
    for c in comps {
        words.push(c.len() as u32);
        words.extend(c);
    }
    for (&(c, spin), &n) in &d.circles {
        let s = match spin {
            None => 0,
            Some(Spin::Cw) => 1,
            Some(Spin::Ccw) => 2,
        };
        words.extend([c as u32, s, n]);
    }
    words.iter().flat_map(|w| w.to_le_bytes()).collect()
}

pub fn code_digest(code: &[u8]) -> Digest {
    hex::encode(Sha256::digest(code))
}

pub fn digest(d: &Diagram) -> Digest {
    code_digest(&canonical_code(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{build_system, Family};
    use crate::map::{Vertex};
    use std::sync::Arc;

    fn pair(ids: (u32, u32), rot: u16) -> Diagram {
        let sys = Arc::new(build_system(Family::I, 3).unwrap());
        let mut d = Diagram::new(sys);
        d.add_vertex(ids.0, Vertex::new(1, 2, 3, None));
        d.add_vertex(ids.1, Vertex::new(1, 2, 3, None));
        for k in 0..6u16 {
            d.link(Dart::V(ids.0, (k + rot) % 6), Dart::V(ids.1, (6 - k) % 6));
        }
        d
    }

    #[test]
    fn relabelling_and_rotation_do_not_change_code() {
        let a = canonical_code(&pair((1, 2), 0));
        let b = canonical_code(&pair((9, 4), 2));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_code_is_a_sentinel() {
        let sys = Arc::new(build_system(Family::A, 3).unwrap());
        let e = Diagram::new(sys.clone());
        assert_eq!(canonical_code(&e), canonical_code(&Diagram::new(sys)));
        assert_ne!(canonical_code(&e), canonical_code(&pair((1, 2), 0)));
    }

    #[test]
    fn circles_are_part_of_the_code() {
        let mut d = pair((1, 2), 0);
        let before = digest(&d);
        d.add_circle(1, None);
        assert_ne!(before, digest(&d));
    }
}
