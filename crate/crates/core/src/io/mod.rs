//! Statistics and rendering. Text parsing and serialization live in
//! [`crate::map`].

mod render;

use std::collections::BTreeMap;
use std::fmt;

use crate::coxeter::Gen;
use crate::map::{classify_angles, AngleKind, Diagram};

pub use render::{render, Layout, RenderFormat, RenderSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentStats {
    pub v: usize,
    pub e: usize,
    pub f: usize,
    pub euler: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StatsReport {
    pub components: Vec<ComponentStats>,
    pub vertex_types: BTreeMap<(Gen, Gen), usize>,
    /// Corner counts of oriented diagrams; empty otherwise.
    pub angles: BTreeMap<AngleKind, usize>,
    pub circles: u32,
}

impl StatsReport {
    pub fn uniform_angles(&self) -> usize {
        self.angles.get(&AngleKind::Uniform).copied().unwrap_or(0)
    }

    pub fn varied_angles(&self) -> usize {
        self.angles.get(&AngleKind::Varied).copied().unwrap_or(0)
    }

    pub fn total(&self) -> ComponentStats {
        self.components.iter().fold(ComponentStats { v: 0, e: 0, f: 0, euler: 0 }, |a, c| ComponentStats {
            v: a.v + c.v,
            e: a.e + c.e,
            f: a.f + c.f,
            euler: a.euler + c.euler,
        })
    }
}

pub fn stats(d: &Diagram) -> StatsReport {
    let components = d
        .euler_report()
        .into_iter()
        .map(|r| ComponentStats { v: r.v, e: r.e, f: r.f, euler: r.chi })
        .collect();
    let mut vertex_types = BTreeMap::new();
    for x in d.vertices.values() {
        *vertex_types.entry((x.lo, x.hi)).or_insert(0) += 1;
    }
    let mut angles = BTreeMap::new();
    for (_, _, kind) in classify_angles(d) {
        *angles.entry(kind).or_insert(0) += 1;
    }
    StatsReport { components, vertex_types, angles, circles: d.circle_count() }
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.total();
        writeln!(f, "vertices {} edges {} faces {} components {}", t.v, t.e, t.f, self.components.len())?;
        for (i, c) in self.components.iter().enumerate() {
            writeln!(f, "component {i}: V={} E={} F={} euler={}", c.v, c.e, c.f, c.euler)?;
        }
        for ((lo, hi), n) in &self.vertex_types {
            writeln!(f, "type ({lo},{hi}): {n}")?;
        }
        if !self.angles.is_empty() {
            writeln!(f, "angles uniform {} varied {}", self.uniform_angles(), self.varied_angles())?;
        }
        writeln!(f, "circles {}", self.circles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{glue, parse};

    #[test]
    fn empty_is_all_zeros() {
        let r = stats(&parse("group I 3\n").unwrap());
        assert_eq!(r, StatsReport::default());
    }

    #[test]
    fn oriented_pair_angle_counts() {
        let p = parse("group BI 3\nvertex 1 1 2 out@0\nboundary 1.0 1.1 1.2 1.3 1.4 1.5\n").unwrap();
        let r = stats(&glue(&p, &p).unwrap());
        assert_eq!((r.uniform_angles(), r.varied_angles()), (8, 4));
        assert_eq!(r.components, vec![ComponentStats { v: 2, e: 6, f: 6, euler: 2 }]);
    }

    #[test]
    fn faces_match_the_census() {
        let d = crate::generate::braid_cycle(
            &std::sync::Arc::new(crate::coxeter::build_system(crate::coxeter::Family::A, 3).unwrap()),
            4,
            6,
            10,
        )
        .unwrap();
        let r = stats(&d);
        assert_eq!(r.total().f, d.faces().len());
        assert!(r.components.iter().all(|c| c.euler == 2));
    }
}
