//! Compiling rex-graph paths into patches, and the ZAM templates built from them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use super::{RuleError, ZamTemplate};
use crate::coxeter::{build_system, longest_element, rex_graph, CoxeterSystem, Family, Gen, RexGraph, WordMove};
use crate::map::{parse, serialize, BoundaryPoint, Dart, Diagram, Vertex};

fn join(d: &mut Diagram, bb: &mut BTreeMap<u32, Dart>, a: Dart, b: Dart) {
    match (a, b) {
        (Dart::B(i), Dart::B(j)) => {
            bb.insert(i, Dart::B(j));
            bb.insert(j, Dart::B(i));
        }
        (Dart::B(i), x) | (x, Dart::B(i)) => {
            bb.insert(i, x);
            d.set_half(x, Dart::B(i));
        }
        (x, y) => d.link(x, y),
    }
}

/// Compiles a sequence of word moves into a patch, read bottom to top.
///
/// Every braid move becomes one vertex and every cancellation a cap; letters
/// left untouched run through as strands. Bottom positions `0..L` become
/// boundary points `0..L`, and the final word is read right to left after them,
/// which is counterclockwise around the patch.
pub fn compile_path(sys: &Arc<CoxeterSystem>, word: &[Gen], moves: &[WordMove]) -> Result<Diagram, RuleError> {
    if sys.oriented {
        return Err(RuleError::Unsupported("path compilation for oriented systems".into()));
    }
    for &g in word {
        sys.check_gen(g)?;
    }
    let mut d = Diagram::new(sys.clone());
    let n = word.len();
    // open strand ends, one per letter of the current word
    let mut open: Vec<Dart> = (0..n as u32).map(Dart::B).collect();
    let mut w = word.to_vec();
    let mut bb: BTreeMap<u32, Dart> = BTreeMap::new();
    let mut next_id = 1;
    for mv in moves {
        let before = w.clone();
        if !mv.apply(sys, &mut w) {
            return Err(RuleError::Precondition(format!("move {mv:?} does not apply to {before:?}")));
        }
        match *mv {
            WordMove::Braid { pos, len } => {
                let (s, t) = (before[pos], before[pos + 1]);
                let m = len as u16;
                let (lo, hi) = (s.min(t), s.max(t));
                let k0: u16 = if s == lo { 0 } else { 1 };
                let id = next_id;
                next_id += 1;
                d.add_vertex(id, Vertex::new(lo, hi, m, None));
                for j in 0..m {
                    let below = open[pos + j as usize];
                    join(&mut d, &mut bb, below, Dart::V(id, k0 + j));
                }
                for j in 0..m {
                    open[pos + (m - 1 - j) as usize] = Dart::V(id, (k0 + m + j) % (2 * m));
                }
            }
            WordMove::Cancel { pos } => {
                let (a, b) = (open[pos], open[pos + 1]);
                join(&mut d, &mut bb, a, b);
                open.drain(pos..pos + 2);
            }
        }
    }
    let top = w.len();
    for (p, &x) in open.iter().enumerate() {
        let point = (n + top - 1 - p) as u32;
        join(&mut d, &mut bb, x, Dart::B(point));
    }
    let colors: Vec<Gen> = word.iter().copied().chain(w.iter().rev().copied()).collect();
    d.boundary = colors
        .iter()
        .enumerate()
        .map(|(i, &c)| BoundaryPoint { color: c, inward: None, link: bb[&(i as u32)] })
        .collect();
    let bad = d.validate();
    if let Some(v) = bad.first() {
        return Err(RuleError::Precondition(format!("compiled patch invalid: {}", v.detail)));
    }
    Ok(d)
}

/// A cycle in the rex graph of the longest element, as node indices with the
/// move leading from each node to the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZamCycle {
    pub graph: RexGraph,
    pub nodes: Vec<usize>,
    pub moves: Vec<WordMove>,
}

impl ZamCycle {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The two halves between the base point and its antipode.
    fn halves(&self, shift: Gen, sys: &Arc<CoxeterSystem>) -> Result<(Diagram, Diagram), RuleError> {
        let l = self.len();
        let base: Vec<Gen> = self.graph.nodes[self.nodes[0]].iter().map(|g| g + shift).collect();
        let one = compile_path(sys, &base, &self.moves[..l / 2])?;
        let back: Vec<WordMove> = self.moves[l / 2..].iter().rev().copied().collect();
        let two = compile_path(sys, &base, &back)?;
        Ok((one, two))
    }

    /// The template on colors `lo, lo + 1, lo + 2` of a type A system.
    pub fn template(&self, sys: &Arc<CoxeterSystem>, lo: Gen) -> Result<ZamTemplate, RuleError> {
        let (one, two) = self.halves(lo - 1, sys)?;
        let name = if lo == 1 { "a3".to_string() } else { format!("a3.{lo}") };
        ZamTemplate::new(&name, one, two)
    }

    /// Rotates the cycle to start at position `k`.
    fn rotated(&self, k: usize, reverse: bool) -> ZamCycle {
        let l = self.len();
        let (nodes, moves) = if reverse {
            // node sequence k, k-1, ...; the move from i to i-1 is moves[i-1]
            let nodes = (0..l).map(|i| self.nodes[(k + l - i) % l]).collect();
            let moves = (0..l).map(|i| self.moves[(k + 2 * l - i - 1) % l]).collect();
            (nodes, moves)
        } else {
            let nodes = (0..l).map(|i| self.nodes[(k + i) % l]).collect();
            let moves = (0..l).map(|i| self.moves[(k + i) % l]).collect();
            (nodes, moves)
        };
        ZamCycle { graph: self.graph.clone(), nodes, moves }
    }
}

fn has_arcs(d: &Diagram) -> bool {
    d.boundary.iter().any(|p| matches!(p.link, Dart::B(_)))
}

/// Simple cycles of a small graph, each listed once with its smallest node first.
fn simple_cycles(g: &RexGraph, max_len: usize) -> Vec<Vec<usize>> {
    fn dfs(g: &RexGraph, start: usize, path: &mut Vec<usize>, max_len: usize, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for nb in g.neighbors(last) {
            if nb == start && path.len() >= 3 {
                // each cycle is found in both directions; keep one
                if path[1] < path[path.len() - 1] {
                    out.push(path.clone());
                }
            } else if nb > start && !path.contains(&nb) && path.len() < max_len {
                path.push(nb);
                dfs(g, start, path, max_len, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..g.nodes.len() {
        dfs(g, s, &mut vec![s], max_len, &mut out);
    }
    out
}

/// Finds the ZAM cycle of a rank-3 system: the shortest cycle of the rex graph
/// of the longest element whose two halves compile to non-isomorphic patches.
/// Ties go to halves without through-strands, then to the smallest serialization.
pub fn derive_zam_template(sys: &CoxeterSystem) -> Result<ZamCycle, RuleError> {
    if sys.oriented {
        return Err(RuleError::Unsupported("rex graphs of oriented systems".into()));
    }
    if sys.family == Family::A && sys.rank != 3 && sys.rank != 2 {
        return Err(RuleError::Unsupported(format!("rank {} system", sys.rank)));
    }
    let arc = Arc::new(sys.clone());
    let g = rex_graph(sys, &longest_element(sys)?)?;
    let mut cycles = simple_cycles(&g, g.nodes.len());
    cycles.sort_by_key(|c| c.len());
    let mut best: Option<((usize, bool, String), ZamCycle)> = None;
    for c in cycles {
        let l = c.len();
        if l % 2 != 0 || best.as_ref().is_some_and(|b| b.0 .0 < l) {
            continue;
        }
        let moves: Vec<WordMove> =
            (0..l).map(|i| g.edge_move(c[i], c[(i + 1) % l]).expect("cycle edge")).collect();
        let base = ZamCycle { graph: g.clone(), nodes: c, moves };
        for k in 0..l {
            for reverse in [false, true] {
                let z = base.rotated(k, reverse);
                let Ok((one, two)) = z.halves(0, &arc) else { continue };
                if crate::map::digest(&one) == crate::map::digest(&two) {
                    continue;
                }
                let key = (l, has_arcs(&one) || has_arcs(&two), serialize(&one) + &serialize(&two));
                if best.as_ref().map_or(true, |b| key < b.0) {
                    best = Some((key, z));
                }
            }
        }
    }
    best.map(|b| b.1).ok_or(RuleError::NoCycle)
}

/// The A3 ZAM cycle, computed once.
pub fn a3_cycle() -> Result<ZamCycle, RuleError> {
    static CYCLE: std::sync::OnceLock<Result<ZamCycle, RuleError>> = std::sync::OnceLock::new();
    CYCLE
        .get_or_init(|| derive_zam_template(&build_system(Family::A, 3).expect("A3")))
        .clone()
}

/// The commuting ZAM of `A1 x I_m` as a template: a strand of color 1 crossing
/// one block of `m` spokes of a `(2, 3)` vertex, against the opposite block.
pub fn commuting_template(m: usize) -> Result<ZamTemplate, RuleError> {
    let a1 = build_system(Family::A, 1)?;
    let im = build_system(Family::I, m)?;
    let sys = Arc::new(CoxeterSystem::product(&a1, &im)?);
    let alt: Vec<Gen> = (0..m).map(|k| if k % 2 == 0 { 2 } else { 3 }).collect();
    let mut word = vec![1];
    word.extend(&alt);
    let braid_first: Vec<WordMove> = std::iter::once(WordMove::Braid { pos: 1, len: m })
        .chain((0..m).map(|p| WordMove::Braid { pos: p, len: 2 }))
        .collect();
    let mut slide_first: Vec<WordMove> = (0..m).map(|p| WordMove::Braid { pos: p, len: 2 }).collect();
    slide_first.push(WordMove::Braid { pos: 0, len: m });
    let one = compile_path(&sys, &word, &braid_first)?;
    let two = compile_path(&sys, &word, &slide_first)?;
    ZamTemplate::new(&format!("a1xi{m}"), one, two)
}

/// Writes each template side as `<name>.side<k>` with a `template` header line.
pub fn write_template_dir(dir: &Path, templates: &[ZamTemplate]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for t in templates {
        for (k, side) in t.sides.iter().enumerate() {
            let text = format!("template {} side {}\n{}", t.name, k + 1, serialize(side));
            fs::write(dir.join(format!("{}.side{}", t.name, k + 1)), text)?;
        }
    }
    Ok(())
}

/// Reads every template file of a directory and pairs the sides by name.
pub fn read_template_dir(dir: &Path) -> Result<Vec<ZamTemplate>, RuleError> {
    let err = |file: &Path, msg: String| RuleError::RuleFile { file: file.display().to_string(), msg };
    let mut sides: BTreeMap<String, [Option<Diagram>; 2]> = BTreeMap::new();
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| err(dir, e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path).map_err(|e| err(&path, e.to_string()))?;
        let Some((head, body)) = text.split_once('\n') else { continue };
        let toks: Vec<&str> = head.split_whitespace().collect();
        if toks.first() != Some(&"template") {
            continue;
        }
        let (name, k) = match toks.as_slice() {
            [_, name, "side", k] => match k.parse::<usize>() {
                Ok(k @ 1..=2) => (name.to_string(), k),
                _ => return Err(err(&path, format!("bad side `{k}`"))),
            },
            _ => return Err(err(&path, "header must be `template <name> side <1|2>`".into())),
        };
        let d = parse(body).map_err(|e| err(&path, format!("line {}: {}", e.line + 1, e.msg)))?;
        let slot = &mut sides.entry(name).or_default()[k - 1];
        if slot.is_some() {
            return Err(err(&path, "side given twice".into()));
        }
        *slot = Some(d);
    }
    let mut out = Vec::new();
    for (name, [a, b]) in sides {
        match (a, b) {
            (Some(a), Some(b)) => out.push(ZamTemplate::new(&name, a, b)?),
            _ => {
                return Err(RuleError::RuleFile { file: dir.display().to_string(), msg: format!("template {name} lacks a side") })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::{format_word, is_trivial_word};

    #[test]
    fn a2_has_no_qualifying_cycle() {
        let a2 = build_system(Family::A, 2).unwrap();
        assert_eq!(derive_zam_template(&a2).unwrap_err(), RuleError::NoCycle);
    }

    #[test]
    fn a3_cycle_halves_share_a_trivial_boundary() {
        let z = a3_cycle().unwrap();
        assert_eq!(z.len(), 14);
        let sys = Arc::new(build_system(Family::A, 3).unwrap());
        let t = z.template(&sys, 1).unwrap();
        let base = &z.graph.nodes[z.nodes[0]];
        assert_eq!(base.len(), 6);
        let w = t.sides[0].boundary_word().unwrap();
        assert_eq!(&w[..6], base.as_slice(), "{}", format_word(&w));
        assert!(is_trivial_word(&sys, &w).unwrap());
        assert_eq!(t.sides[0].vertex_count(), 7);
        assert_eq!(t.sides[1].vertex_count(), 7);
    }

    #[test]
    fn commuting_templates_differ_by_one_zam() {
        for m in 2..=6 {
            let t = commuting_template(m).unwrap();
            assert_eq!(t.sides[0].vertex_count(), m + 1);
            assert_ne!(crate::map::digest(&t.sides[0]), crate::map::digest(&t.sides[1]));
        }
    }

    #[test]
    fn compiled_braid_is_one_vertex() {
        let sys = Arc::new(build_system(Family::I, 4).unwrap());
        let d = compile_path(&sys, &[1, 2, 1, 2], &[WordMove::Braid { pos: 0, len: 4 }]).unwrap();
        assert_eq!(d.vertex_count(), 1);
        assert_eq!(d.boundary_word().unwrap(), vec![1, 2, 1, 2, 1, 2, 1, 2]);
    }
}
