//! Patches: cutting disks out of diagrams, gluing, mirroring and replacement.

use std::collections::{BTreeMap, BTreeSet};

use super::{BoundaryPoint, Dart, Diagram, MapError, Spin, Vertex, VertexId};

/// A disk in a host diagram: its vertices and, per boundary position in
/// counterclockwise order, the host dart just outside the disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub vertices: Vec<VertexId>,
    pub outer: Vec<Dart>,
}

/// Reflects a diagram. In oriented systems every arrow is reversed as well, so a
/// diagram glues onto its own mirror.
pub fn mirror(d: &Diagram) -> Diagram {
    let k = d.boundary.len() as u32;
    let flip = |x: Dart| -> Dart {
        match x {
            Dart::V(w, t) => {
                let deg = d.vertices[&w].degree();
                Dart::V(w, (deg - t) % deg)
            }
            Dart::B(p) => Dart::B((k - p) % k),
        }
    };
    let mut out = Diagram::new(d.sys.clone());
    for (&id, v) in &d.vertices {
        let deg = v.degree();
        let mut n = Vertex::new(v.lo, v.hi, v.m, v.out_start.map(|o| (deg + 1 - o % deg) % deg));
        for s in 0..deg {
            n.links[((deg - s) % deg) as usize] = flip(v.links[s as usize]);
        }
        out.add_vertex(id, n);
    }
    for p in 0..k {
        let old = &d.boundary[((k - p) % k) as usize];
        out.boundary.push(BoundaryPoint {
            color: old.color,
            inward: old.inward.map(|x| !x),
            link: flip(old.link),
        });
    }
    out.circles = d.circles.clone();
    out.reserve_id(d.next_id().saturating_sub(1));
    out
}

/// Joins the boundary of `d1` to the reflected boundary of `d2`, point by point.
/// Vertices of `d2` are renumbered after those of `d1`.
pub fn glue(d1: &Diagram, d2: &Diagram) -> Result<Diagram, MapError> {
    if d1.sys != d2.sys {
        return Err(MapError::BoundaryMismatch("different systems".into()));
    }
    let n = d1.boundary.len();
    if n != d2.boundary.len() {
        return Err(MapError::BoundaryMismatch(format!("{n} vs {} points", d2.boundary.len())));
    }
    if d1.boundary_signature() != d2.boundary_signature() {
        return Err(MapError::BoundaryMismatch("colors or directions differ".into()));
    }
    let off = d1.vertices.keys().next_back().copied().unwrap_or(0);
    let shift = |x: Dart| match x {
        Dart::V(w, t) => Dart::V(w + off, t),
        b => b,
    };
    let m = mirror(d2);
    let mut out = Diagram::new(d1.sys.clone());
    for (&id, v) in &d1.vertices {
        out.add_vertex(id, v.clone());
    }
    for (&id, v) in &m.vertices {
        let mut v = v.clone();
        for l in v.links.iter_mut() {
            *l = shift(*l);
        }
        out.add_vertex(id + off, v);
    }
    // side 0 is d1 at position k, side 1 is the mirror at position (n - k) % n
    let link = |side: usize, k: usize| -> Dart {
        if side == 0 {
            d1.boundary[k].link
        } else {
            match shift(m.boundary[(n - k) % n].link) {
                Dart::B(q) => Dart::B(((n as u32) - q) % n as u32),
                x => x,
            }
        }
    };
    let mut visited: BTreeSet<(usize, usize)> = BTreeSet::new();
    for side in 0..2 {
        for k in 0..n {
            if visited.contains(&(side, k)) {
                continue;
            }
            let x = link(side, k);
            if !matches!(x, Dart::V(..)) {
                continue;
            }
            visited.insert((side, k));
            let (mut s, mut pos) = (1 - side, k);
            loop {
                visited.insert((s, pos));
                match link(s, pos) {
                    Dart::B(j) => {
                        visited.insert((s, j as usize));
                        pos = j as usize;
                        s = 1 - s;
                    }
                    y => {
                        out.link(x, y);
                        break;
                    }
                }
            }
        }
    }
    for k in 0..n {
        if visited.contains(&(0, k)) {
            continue;
        }
        let (mut s, mut pos) = (0, k);
        while visited.insert((s, pos)) {
            let Dart::B(j) = link(s, pos) else { unreachable!("vertex darts resolved") };
            visited.insert((s, j as usize));
            pos = j as usize;
            s = 1 - s;
        }
        let spin = d1.boundary[k].inward.map(|inw| if inw { Spin::Ccw } else { Spin::Cw });
        out.add_circle(d1.boundary[k].color, spin);
    }
    for (&(c, s), &cnt) in d1.circles.iter().chain(m.circles.iter()) {
        for _ in 0..cnt {
            out.add_circle(c, s);
        }
    }
    out.reset_ids();
    Ok(out)
}

/// Cuts the given disk out of the host. Vertex ids are kept.
pub fn cut_region(host: &Diagram, region: &Region) -> Result<Diagram, MapError> {
    let inside: BTreeSet<VertexId> = region.vertices.iter().copied().collect();
    let pos: BTreeMap<Dart, u32> =
        region.outer.iter().enumerate().map(|(i, &d)| (d, i as u32)).collect();
    let mut p = Diagram::new(host.sys.clone());
    for &v in &region.vertices {
        p.add_vertex(v, host.vertices[&v].clone());
    }
    for (i, &o) in region.outer.iter().enumerate() {
        if let Dart::V(w, _) = o {
            if inside.contains(&w) {
                return Err(MapError::NotDisk);
            }
        }
        let partner = host.alpha(o);
        let link = match partner {
            Dart::V(w, _) if inside.contains(&w) => partner,
            _ => match pos.get(&partner) {
                Some(&j) => Dart::B(j),
                None => return Err(MapError::NotDisk),
            },
        };
        p.boundary.push(BoundaryPoint {
            color: host.color(o),
            inward: host.is_out(o),
            link,
        });
        if let Dart::V(..) = link {
            p.set_half(link, Dart::B(i as u32));
        }
    }
    for &v in &region.vertices {
        for &l in &p.vertices[&v].links {
            if let Dart::V(w, _) = l {
                if !inside.contains(&w) {
                    return Err(MapError::NotDisk);
                }
            }
        }
    }
    if !p.validate().is_empty() {
        return Err(MapError::NotDisk);
    }
    p.reset_ids();
    Ok(p)
}

/// Cuts out the disk spanned by a connected vertex set. Boundary position 0 is
/// the smallest dangling dart.
pub fn cut_patch(host: &Diagram, vertices: &[VertexId]) -> Result<(Diagram, Region), MapError> {
    let inside: BTreeSet<VertexId> = vertices.iter().copied().collect();
    let is_in = |x: Dart| matches!(x, Dart::V(w, _) if inside.contains(&w));
    let dangling: Vec<Dart> = vertices
        .iter()
        .flat_map(|&v| host.vertex_darts(v))
        .filter(|&x| !is_in(host.alpha(x)))
        .collect();
    let mut outer = Vec::new();
    if let Some(&start) = dangling.iter().min() {
        let step = |x: Dart| -> Dart {
            let a = host.alpha(x);
            host.sigma(if is_in(a) { a } else { x })
        };
        let mut x = start;
        loop {
            if !is_in(host.alpha(x)) {
                outer.push(host.alpha(x));
            }
            x = step(x);
            if x == start {
                break;
            }
        }
        if outer.len() != dangling.len() {
            return Err(MapError::NotDisk);
        }
    }
    let mut vs = vertices.to_vec();
    vs.sort_unstable();
    let region = Region { vertices: vs, outer };
    let patch = cut_region(host, &region)?;
    Ok((patch, region))
}

/// Replaces a region by a patch with the same boundary signature. New vertices
/// take `ids` in the order of the patch's own ids, or fresh ids when `None`.
/// Returns the diagram and the map from patch ids to host ids.
pub fn replace_region(
    host: &Diagram,
    region: &Region,
    patch: &Diagram,
    ids: Option<&[VertexId]>,
) -> Result<(Diagram, BTreeMap<VertexId, VertexId>), MapError> {
    let old = cut_region(host, region)?;
    if old.boundary_signature() != patch.boundary_signature() {
        return Err(MapError::BoundaryMismatch(format!(
            "region {:?} vs patch {:?}",
            old.boundary_signature(),
            patch.boundary_signature()
        )));
    }
    if let Some(ids) = ids {
        if ids.len() != patch.vertices.len() {
            return Err(MapError::BoundaryMismatch("wrong number of ids".into()));
        }
    }
    let mut out = host.clone();
    out.remove_vertices(&region.vertices);
    let mut map = BTreeMap::new();
    for (i, &pid) in patch.vertices.keys().enumerate() {
        let id = match ids {
            Some(ids) => ids[i],
            None => out.fresh_id(),
        };
        if out.vertices.contains_key(&id) {
            return Err(MapError::Invalid(format!("id {id} already in use")));
        }
        out.reserve_id(id);
        map.insert(pid, id);
    }
    let tr = |x: Dart| -> Dart {
        match x {
            Dart::V(w, t) => Dart::V(map[&w], t),
            Dart::B(j) => region.outer[j as usize],
        }
    };
    for (pid, v) in &patch.vertices {
        let mut v = v.clone();
        for l in v.links.iter_mut() {
            *l = tr(*l);
        }
        out.vertices.insert(map[pid], v);
    }
    for (i, b) in patch.boundary.iter().enumerate() {
        out.set_half(region.outer[i], tr(b.link));
    }
    for (&(c, s), &n) in &patch.circles {
        for _ in 0..n {
            out.add_circle(c, s);
        }
    }
    Ok((out, map))
}

/// Renumbers boundary positions so that old position `r` becomes position 0.
pub fn rotate_boundary(d: &Diagram, r: usize) -> Diagram {
    let k = d.boundary.len();
    if k == 0 {
        return d.clone();
    }
    let r = r % k;
    let mv = |x: Dart| match x {
        Dart::B(q) => Dart::B(((q as usize + k - r) % k) as u32),
        v => v,
    };
    let mut out = d.clone();
    for v in out.vertices.values_mut() {
        for l in v.links.iter_mut() {
            *l = mv(*l);
        }
    }
    out.boundary = (0..k)
        .map(|p| {
            let mut b = d.boundary[(p + r) % k].clone();
            b.link = mv(b.link);
            b
        })
        .collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{canonical_code, parse};

    const STAR: &str = "group I 3\nvertex 1 1 2\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n";

    #[test]
    fn star_glued_to_itself_is_a_pair() {
        let d = parse(STAR).unwrap();
        let g = glue(&d, &d).unwrap();
        assert!(g.validate().is_empty(), "{:?}", g.validate());
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 6);
        assert!(g.circles.is_empty());
    }

    #[test]
    fn mirror_is_an_involution() {
        let text = "group BI 3\nvertex 1 1 2 out@1\nvertex 2 1 2 out@4\nedge 1.1 2.3 >\n\
            boundary 1.0 2.4 2.5 2.0 2.1 2.2 1.2 1.3 1.4 1.5\n";
        let d = parse(text).unwrap();
        assert!(d.validate().is_empty(), "{:?}", d.validate());
        let m = mirror(&d);
        assert!(m.validate().is_empty(), "{:?}", m.validate());
        assert_eq!(canonical_code(&mirror(&m)), canonical_code(&d));
        let g = glue(&d, &d).unwrap();
        assert!(g.validate().is_empty(), "{:?}", g.validate());
    }

    #[test]
    fn arcs_glue_into_circles() {
        let text = "group I 2\nboundary 1~1 1~0\n";
        let d = parse(text).unwrap();
        let g = glue(&d, &d).unwrap();
        assert_eq!(g.circle_count(), 1);
        assert!(g.vertices.is_empty());
    }

    #[test]
    fn cut_and_replace_round_trip() {
        let text = "group I 3\nvertex 1 1 2\nvertex 2 1 2\n\
            edge 1.0 2.0\nedge 1.1 2.5\nedge 1.2 2.4\nedge 1.3 2.3\nedge 1.4 2.2\nedge 1.5 2.1\n";
        let d = parse(text).unwrap();
        let (p, region) = cut_patch(&d, &[1]).unwrap();
        assert_eq!(p.boundary.len(), 6);
        assert!(p.validate().is_empty());
        let (back, _) = replace_region(&d, &region, &p, Some(&[7])).unwrap();
        assert!(back.validate().is_empty());
        assert_eq!(canonical_code(&back), canonical_code(&d));
    }

    #[test]
    fn rotation_preserves_validity() {
        let d = parse(STAR).unwrap();
        for r in 0..6 {
            assert!(rotate_boundary(&d, r).validate().is_empty());
        }
    }
}
