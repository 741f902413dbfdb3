//! Coxeter systems, their permutation representations, and word rewriting.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// 1-based generator index.
pub type Gen = u8;
pub type Word = Vec<Gen>;

/// Bound on reduced word length used by enumeration.
pub const REDUCED_WORD_BOUND: usize = 12;
const MAX_GROUP_ORDER: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    I,
    BraidI,
    Explicit,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unsupported system: {0}")]
    Unsupported(String),
    #[error("the word problem is not available for oriented systems")]
    Oriented,
    #[error("generator {0} out of range for rank {1}")]
    BadGenerator(Gen, usize),
    #[error("reduced word length {len} exceeds bound {bound}")]
    BoundExceeded { len: usize, bound: usize },
    #[error("group has more than {MAX_GROUP_ORDER} elements")]
    TooLarge,
    #[error("word is not trivial in the group")]
    NotTrivial,
}

/// A Coxeter system, or the braid system sharing its exponents when `oriented`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CoxeterSystem {
    pub family: Family,
    pub rank: usize,
    /// Row-major exponent matrix; 0 encodes infinity.
    exps: Vec<u16>,
    pub oriented: bool,
    pub colors: Vec<String>,
}

impl fmt::Debug for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoxeterSystem({})", self.header())
    }
}

const PALETTE: [&str; 10] = [
    "blue", "red", "green", "yellow", "purple", "orange", "cyan", "magenta", "brown", "gray",
];

fn default_color(i: usize) -> String {
    PALETTE
        .get(i)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("c{}", i + 1))
}

/// Builds the system of a family: `A n`, `I m` or `BraidI m`.
pub fn build_system(family: Family, n: usize) -> Result<CoxeterSystem, CoxeterError> {
    match family {
        Family::A => {
            if n < 1 {
                return Err(CoxeterError::Unsupported("A needs rank >= 1".into()));
            }
            let mut exps = vec![2u16; n * n];
            for i in 0..n {
                exps[i * n + i] = 1;
                if i + 1 < n {
                    exps[i * n + i + 1] = 3;
                    exps[(i + 1) * n + i] = 3;
                }
            }
            Ok(CoxeterSystem {
                family,
                rank: n,
                exps,
                oriented: false,
                colors: (0..n).map(default_color).collect(),
            })
        }
        Family::I | Family::BraidI => {
            if n < 2 {
                return Err(CoxeterError::Unsupported(format!("{family:?} needs m >= 2")));
            }
            if n > u16::MAX as usize / 2 {
                return Err(CoxeterError::Unsupported(format!("m = {n} too large")));
            }
            let m = n as u16;
            let oriented = family == Family::BraidI;
            let colors = if oriented {
                vec!["blue".to_string(), "green".to_string()]
            } else {
                vec!["blue".to_string(), "red".to_string()]
            };
            Ok(CoxeterSystem { family, rank: 2, exps: vec![1, m, m, 1], oriented, colors })
        }
        Family::Explicit => Err(CoxeterError::Unsupported(
            "explicit systems are built with CoxeterSystem::explicit".into(),
        )),
    }
}

impl CoxeterSystem {
    /// Unoriented system from an exponent matrix (0 = infinity).
    pub fn explicit(rank: usize, matrix: &[u16]) -> Result<Self, CoxeterError> {
        if rank == 0 || matrix.len() != rank * rank {
            return Err(CoxeterError::Unsupported("matrix shape".into()));
        }
        for i in 0..rank {
            if matrix[i * rank + i] != 1 {
                return Err(CoxeterError::Unsupported("diagonal must be 1".into()));
            }
            for j in 0..rank {
                let v = matrix[i * rank + j];
                if v != matrix[j * rank + i] {
                    return Err(CoxeterError::Unsupported("matrix not symmetric".into()));
                }
                if i != j && v == 1 {
                    return Err(CoxeterError::Unsupported("off-diagonal exponent 1".into()));
                }
            }
        }
        Ok(CoxeterSystem {
            family: Family::Explicit,
            rank,
            exps: matrix.to_vec(),
            oriented: false,
            colors: (0..rank).map(default_color).collect(),
        })
    }

    /// Direct product of two systems, generators of `b` shifted after those of `a`.
    pub fn product(a: &CoxeterSystem, b: &CoxeterSystem) -> Result<Self, CoxeterError> {
        if a.oriented || b.oriented {
            return Err(CoxeterError::Oriented);
        }
        let r = a.rank + b.rank;
        let mut m = vec![2u16; r * r];
        for i in 0..r {
            for j in 0..r {
                m[i * r + j] = if i == j {
                    1
                } else if i < a.rank && j < a.rank {
                    a.exps[i * a.rank + j]
                } else if i >= a.rank && j >= a.rank {
                    b.exps[(i - a.rank) * b.rank + (j - a.rank)]
                } else {
                    2
                };
            }
        }
        Self::explicit(r, &m)
    }

    /// Exponent m_{i,j}; `None` means infinity.
    pub fn m(&self, i: Gen, j: Gen) -> Option<u16> {
        let (i, j) = (i as usize - 1, j as usize - 1);
        match self.exps[i * self.rank + j] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn commute(&self, i: Gen, j: Gen) -> bool {
        i != j && self.m(i, j) == Some(2)
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> {
        1..=self.rank as Gen
    }

    pub fn check_gen(&self, g: Gen) -> Result<(), CoxeterError> {
        if g == 0 || g as usize > self.rank {
            Err(CoxeterError::BadGenerator(g, self.rank))
        } else {
            Ok(())
        }
    }

    pub fn color_name(&self, g: Gen) -> &str {
        &self.colors[g as usize - 1]
    }

    /// Vertex types (i < j) with finite exponent.
    pub fn vertex_types(&self) -> Vec<(Gen, Gen)> {
        let mut out = Vec::new();
        for i in self.gens() {
            for j in self.gens() {
                if i < j && self.m(i, j).is_some() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Header line of the diagram text format.
    pub fn header(&self) -> String {
        match self.family {
            Family::A => format!("group A {}", self.rank),
            Family::I => format!("group I {}", self.exps[1]),
            Family::BraidI => format!("group BI {}", self.exps[1]),
            Family::Explicit => {
                let mut s = format!("group X {}", self.rank);
                for i in 0..self.rank {
                    for j in i + 1..self.rank {
                        s.push_str(&format!(" {}", self.exps[i * self.rank + j]));
                    }
                }
                s
            }
        }
    }

    /// Connected components of the Coxeter graph (edges where m >= 3).
    pub fn components(&self) -> Vec<Vec<Gen>> {
        let mut seen = vec![false; self.rank];
        let mut out = Vec::new();
        for s in 0..self.rank {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s as Gen + 1];
            seen[s] = true;
            let mut k = 0;
            while k < comp.len() {
                let a = comp[k];
                for b in self.gens() {
                    if !seen[b as usize - 1] && a != b && self.m(a, b) != Some(2) {
                        seen[b as usize - 1] = true;
                        comp.push(b);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn representation(&self) -> Result<Representation, CoxeterError> {
        if self.oriented {
            return Err(CoxeterError::Oriented);
        }
        let mut images: Vec<Vec<u16>> = vec![Vec::new(); self.rank];
        let mut degree = 0usize;
        for comp in self.components() {
            match comp.len() {
                1 => {
                    let base = degree as u16;
                    images[comp[0] as usize - 1] = vec![base + 1, base];
                    degree += 2;
                }
                2 => {
                    let m = self.m(comp[0], comp[1]).ok_or_else(|| {
                        CoxeterError::Unsupported("infinite dihedral component".into())
                    })? as usize;
                    let n = 2 * m;
                    let base = degree as u16;
                    let g1 = (0..n).map(|f| base + (f ^ 1) as u16).collect();
                    let g2 = (0..n)
                        .map(|f| {
                            let t = if f % 2 == 1 { (f + 1) % n } else { (f + n - 1) % n };
                            base + t as u16
                        })
                        .collect();
                    images[comp[0] as usize - 1] = g1;
                    images[comp[1] as usize - 1] = g2;
                    degree += n;
                }
                _ => {
                    let path = self.chain_order(&comp)?;
                    let n = path.len() + 1;
                    let base = degree as u16;
                    for (k, &g) in path.iter().enumerate() {
                        images[g as usize - 1] = (0..n)
                            .map(|p| {
                                let q = if p == k {
                                    k + 1
                                } else if p == k + 1 {
                                    k
                                } else {
                                    p
                                };
                                base + q as u16
                            })
                            .collect();
                    }
                    degree += n;
                }
            }
        }
        let full = images
            .iter()
            .map(|img| {
                let mut v: Vec<u16> = (0..degree as u16).collect();
                if let Some(&base) = img.iter().min() {
                    for (k, &t) in img.iter().enumerate() {
                        v[base as usize + k] = t;
                    }
                }
                v
            })
            .collect();
        Ok(Representation { images: full })
    }

    /// Orders a type-A component along its path, failing for other shapes.
    fn chain_order(&self, comp: &[Gen]) -> Result<Vec<Gen>, CoxeterError> {
        let nbrs = |a: Gen| -> Vec<Gen> {
            comp.iter().copied().filter(|&b| b != a && self.m(a, b) != Some(2)).collect()
        };
        for &a in comp {
            for b in nbrs(a) {
                if self.m(a, b) != Some(3) {
                    return Err(CoxeterError::Unsupported(
                        "only type A chains and dihedral components have a word oracle".into(),
                    ));
                }
            }
        }
        let ends: Vec<Gen> = comp.iter().copied().filter(|&a| nbrs(a).len() == 1).collect();
        if ends.len() != 2 || comp.iter().any(|&a| nbrs(a).len() > 2) {
            return Err(CoxeterError::Unsupported("component is not a path".into()));
        }
        let mut path = vec![ends[0]];
        let mut prev = 0;
        while path.len() < comp.len() {
            let cur = *path.last().unwrap();
            let next = nbrs(cur).into_iter().find(|&b| b != prev).unwrap();
            prev = cur;
            path.push(next);
        }
        Ok(path)
    }
}

struct Representation {
    images: Vec<Vec<u16>>,
}

/// A group element as a permutation of the representation carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub perm: Vec<u16>,
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| p as usize == i)
    }

    fn times(&self, img: &[u16]) -> GroupElement {
        GroupElement { perm: self.perm.iter().map(|&p| img[p as usize]).collect() }
    }
}

fn check_word(sys: &CoxeterSystem, word: &[Gen]) -> Result<(), CoxeterError> {
    word.iter().try_for_each(|&g| sys.check_gen(g))
}

pub fn identity(sys: &CoxeterSystem) -> Result<GroupElement, CoxeterError> {
    let rep = sys.representation()?;
    let n = rep.images.first().map_or(0, |v| v.len());
    Ok(GroupElement { perm: (0..n as u16).collect() })
}

/// Product of generator permutations, left to right.
pub fn word_to_element(sys: &CoxeterSystem, word: &[Gen]) -> Result<GroupElement, CoxeterError> {
    check_word(sys, word)?;
    let rep = sys.representation()?;
    let n = rep.images.first().map_or(0, |v| v.len());
    let mut e = GroupElement { perm: (0..n as u16).collect() };
    for &g in word {
        e = e.times(&rep.images[g as usize - 1]);
    }
    Ok(e)
}

pub fn is_trivial_word(sys: &CoxeterSystem, word: &[Gen]) -> Result<bool, CoxeterError> {
    Ok(word_to_element(sys, word)?.is_identity())
}

/// Word length function of a finite group, by breadth-first search of its Cayley graph.
pub struct LengthTable {
    rep: Representation,
    len: HashMap<GroupElement, usize>,
}

impl LengthTable {
    pub fn new(sys: &CoxeterSystem) -> Result<Self, CoxeterError> {
        let rep = sys.representation()?;
        let e = identity(sys)?;
        let mut len = HashMap::new();
        len.insert(e.clone(), 0);
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            let l = len[&x];
            for img in &rep.images {
                let y = x.times(img);
                if !len.contains_key(&y) {
                    if len.len() >= MAX_GROUP_ORDER {
                        return Err(CoxeterError::TooLarge);
                    }
                    len.insert(y.clone(), l + 1);
                    queue.push_back(y);
                }
            }
        }
        Ok(LengthTable { rep, len })
    }

    pub fn order(&self) -> usize {
        self.len.len()
    }

    pub fn length(&self, x: &GroupElement) -> usize {
        self.len[x]
    }

    pub fn times(&self, x: &GroupElement, g: Gen) -> GroupElement {
        x.times(&self.rep.images[g as usize - 1])
    }

    pub fn longest(&self) -> GroupElement {
        self.len.iter().max_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0))).unwrap().0.clone()
    }

    pub fn element(&self, word: &[Gen]) -> GroupElement {
        let n = self.rep.images.first().map_or(0, |v| v.len());
        let mut e = GroupElement { perm: (0..n as u16).collect() };
        for &g in word {
            e = self.times(&e, g);
        }
        e
    }
}

pub fn longest_element(sys: &CoxeterSystem) -> Result<GroupElement, CoxeterError> {
    Ok(LengthTable::new(sys)?.longest())
}

/// All words of the given length representing `element` with no shorter representative.
pub fn reduced_words(
    sys: &CoxeterSystem,
    element: &GroupElement,
    length: usize,
) -> Result<BTreeSet<Word>, CoxeterError> {
    if length > REDUCED_WORD_BOUND {
        return Err(CoxeterError::BoundExceeded { len: length, bound: REDUCED_WORD_BOUND });
    }
    let table = LengthTable::new(sys)?;
    let mut out = BTreeSet::new();
    if table.len.get(element) != Some(&length) {
        return Ok(out);
    }
    let mut suffix = Vec::new();
    collect_reduced(sys, &table, element, &mut suffix, &mut out);
    Ok(out)
}

fn collect_reduced(
    sys: &CoxeterSystem,
    table: &LengthTable,
    x: &GroupElement,
    suffix: &mut Vec<Gen>,
    out: &mut BTreeSet<Word>,
) {
    let l = table.length(x);
    if l == 0 {
        out.insert(suffix.iter().rev().copied().collect());
        return;
    }
    for g in sys.gens() {
        let y = table.times(x, g);
        if table.length(&y) + 1 == l {
            suffix.push(g);
            collect_reduced(sys, table, &y, suffix, out);
            suffix.pop();
        }
    }
}

/// An elementary rewrite of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WordMove {
    /// Replace the alternating subword of length `len` at `pos` by the other alternating word.
    Braid { pos: usize, len: usize },
    /// Delete the square `s s` at `pos`.
    Cancel { pos: usize },
}

impl WordMove {
    pub fn apply(&self, sys: &CoxeterSystem, word: &mut Word) -> bool {
        match *self {
            WordMove::Braid { pos, len } => {
                if pos + len > word.len() || len < 2 {
                    return false;
                }
                let (s, t) = (word[pos], word[pos + 1]);
                if s == t || sys.m(s, t) != Some(len as u16) {
                    return false;
                }
                let alt = (0..len).all(|k| word[pos + k] == if k % 2 == 0 { s } else { t });
                if !alt {
                    return false;
                }
                for k in 0..len {
                    word[pos + k] = if k % 2 == 0 { t } else { s };
                }
                true
            }
            WordMove::Cancel { pos } => {
                if pos + 1 >= word.len() || word[pos] != word[pos + 1] {
                    return false;
                }
                word.drain(pos..pos + 2);
                true
            }
        }
    }
}

/// Applies a move sequence, panicking on an inapplicable move (internal use).
pub fn apply_moves(sys: &CoxeterSystem, word: &[Gen], moves: &[WordMove]) -> Word {
    let mut w = word.to_vec();
    for mv in moves {
        assert!(mv.apply(sys, &mut w), "inapplicable move {mv:?} on {w:?}");
    }
    w
}

/// Braid moves available on a word.
pub fn braid_moves(sys: &CoxeterSystem, word: &[Gen]) -> Vec<(WordMove, Word)> {
    let mut out = Vec::new();
    for pos in 0..word.len() {
        if pos + 1 >= word.len() || word[pos] == word[pos + 1] {
            continue;
        }
        if let Some(m) = sys.m(word[pos], word[pos + 1]) {
            let mv = WordMove::Braid { pos, len: m as usize };
            let mut w = word.to_vec();
            if mv.apply(sys, &mut w) {
                out.push((mv, w));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RexGraph {
    pub nodes: Vec<Word>,
    pub edges: Vec<(usize, usize, WordMove)>,
}

impl RexGraph {
    pub fn index(&self, w: &[Gen]) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_slice().cmp(w)).ok()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b, _)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.nodes.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in self.neighbors(i) {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn edge_move(&self, a: usize, b: usize) -> Option<WordMove> {
        self.edges
            .iter()
            .find(|&&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a))
            .map(|e| e.2)
    }
}

/// Reduced expression graph of an element.
pub fn rex_graph(sys: &CoxeterSystem, element: &GroupElement) -> Result<RexGraph, CoxeterError> {
    let table = LengthTable::new(sys)?;
    let l = table.length(element);
    let nodes: Vec<Word> = reduced_words(sys, element, l)?.into_iter().collect();
    let mut edges = Vec::new();
    for (i, w) in nodes.iter().enumerate() {
        for (mv, w2) in braid_moves(sys, w) {
            let j = nodes.binary_search(&w2).expect("braid move leaves the rex set");
            if i < j {
                edges.push((i, j, mv));
            }
        }
    }
    Ok(RexGraph { nodes, edges })
}

/// Rewrites a type-A word (generators `lo..` forming a chain) so that `lo` occurs at most once.
///
/// Returns the elementary moves in order; the rewriting always works on the leftmost
/// pair of occurrences.
pub fn first_generator_moves(sys: &CoxeterSystem, word: &[Gen], lo: Gen) -> Vec<WordMove> {
    let mut w = word.to_vec();
    let mut moves = Vec::new();
    rfg(sys, &mut w, 0, word.len(), lo, &mut moves);
    moves
}

/// Applies `mv` to `w` and logs it.
fn push_move(sys: &CoxeterSystem, w: &mut Word, mv: WordMove, log: &mut Vec<WordMove>) {
    let ok = mv.apply(sys, w);
    debug_assert!(ok, "bad move {mv:?}");
    log.push(mv);
}

/// Works on `w[start..end]`; returns the new end.
fn rfg(
    sys: &CoxeterSystem,
    w: &mut Word,
    start: usize,
    mut end: usize,
    lo: Gen,
    log: &mut Vec<WordMove>,
) -> usize {
    loop {
        let occ: Vec<usize> = (start..end).filter(|&p| w[p] == lo).collect();
        if occ.len() < 2 {
            return end;
        }
        let (i, j) = (occ[0], occ[1]);
        let next = lo + 1;
        let inner_end = if (next as usize) <= sys.rank && sys.m(lo, next) == Some(3) {
            rfg(sys, w, i + 1, j, next, log)
        } else {
            j
        };
        let shrink = j - inner_end;
        end -= shrink;
        let j = inner_end;
        match (i + 1..j).find(|&p| w[p] == next) {
            None => {
                // slide the left copy right until it meets the right copy, then cancel
                for p in i..j - 1 {
                    push_move(sys, w, WordMove::Braid { pos: p, len: 2 }, log);
                }
                push_move(sys, w, WordMove::Cancel { pos: j - 1 }, log);
                end -= 2;
            }
            Some(k) => {
                for p in i..k - 1 {
                    push_move(sys, w, WordMove::Braid { pos: p, len: 2 }, log);
                }
                for p in (k + 1..j).rev() {
                    push_move(sys, w, WordMove::Braid { pos: p, len: 2 }, log);
                }
                push_move(sys, w, WordMove::Braid { pos: k - 1, len: 3 }, log);
            }
        }
    }
}

/// Output of the first-generator rewriting on a type-A system.
pub fn reduce_first_generator(sys: &CoxeterSystem, word: &[Gen]) -> Result<Word, CoxeterError> {
    if sys.family != Family::A {
        return Err(CoxeterError::Unsupported("reduce_first_generator needs family A".into()));
    }
    check_word(sys, word)?;
    let moves = first_generator_moves(sys, word, 1);
    Ok(apply_moves(sys, word, &moves))
}

/// Moves rewriting `from` into some reduced word of the same element satisfying `goal`.
pub fn rex_path(
    sys: &CoxeterSystem,
    from: &[Gen],
    goal: impl Fn(&[Gen]) -> bool,
) -> Option<Vec<WordMove>> {
    if goal(from) {
        return Some(Vec::new());
    }
    let mut prev: HashMap<Word, (Word, WordMove)> = HashMap::new();
    let mut queue = VecDeque::from([from.to_vec()]);
    prev.insert(from.to_vec(), (Vec::new(), WordMove::Cancel { pos: usize::MAX }));
    while let Some(w) = queue.pop_front() {
        for (mv, w2) in braid_moves(sys, &w) {
            if prev.contains_key(&w2) {
                continue;
            }
            prev.insert(w2.clone(), (w.clone(), mv));
            if goal(&w2) {
                let mut path = Vec::new();
                let mut cur = w2;
                while cur.as_slice() != from {
                    let (p, mv) = prev[&cur].clone();
                    path.push(mv);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w2);
        }
    }
    None
}

/// Moves reducing a trivial word to the empty word using braid moves and cancellations.
pub fn filling_moves(sys: &CoxeterSystem, word: &[Gen]) -> Result<Vec<WordMove>, CoxeterError> {
    check_word(sys, word)?;
    let table = LengthTable::new(sys)?;
    if !table.element(word).is_identity() {
        return Err(CoxeterError::NotTrivial);
    }
    let mut w = word.to_vec();
    let mut moves = Vec::new();
    // w[..p] is always a reduced word
    let mut p = 0;
    let mut prefix = table.element(&[]);
    while p < w.len() {
        let s = w[p];
        let next = table.times(&prefix, s);
        if table.length(&next) > p {
            prefix = next;
            p += 1;
            continue;
        }
        let path = rex_path(sys, &w[..p], |x| x.last() == Some(&s))
            .expect("exchange condition guarantees a reduced word ending in s");
        for mv in path {
            push_move(sys, &mut w, mv, &mut moves);
        }
        push_move(sys, &mut w, WordMove::Cancel { pos: p - 1 }, &mut moves);
        p -= 1;
        prefix = next;
    }
    debug_assert!(w.is_empty());
    Ok(moves)
}

pub fn parse_word(text: &str) -> Result<Word, String> {
    text.split_whitespace()
        .map(|t| t.parse::<Gen>().map_err(|_| format!("bad generator `{t}`")))
        .collect()
}

pub fn format_word(word: &[Gen]) -> String {
    word.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: usize) -> CoxeterSystem {
        build_system(Family::A, n).unwrap()
    }

    #[test]
    fn a2_relations() {
        let s = a(2);
        assert_eq!(s.m(1, 2), Some(3));
        assert!(is_trivial_word(&s, &[1, 2, 1, 2, 1, 2]).unwrap());
        assert!(!is_trivial_word(&s, &[1, 2]).unwrap());
        assert!(is_trivial_word(&s, &[]).unwrap());
    }

    #[test]
    fn braid_system_is_oriented() {
        let s = build_system(Family::BraidI, 3).unwrap();
        assert!(s.oriented);
        assert_eq!(s.m(1, 2), Some(3));
        assert_eq!(s.color_name(2), "green");
        assert_eq!(word_to_element(&s, &[1]), Err(CoxeterError::Oriented));
    }

    #[test]
    fn i2_commutes() {
        let s = build_system(Family::I, 2).unwrap();
        assert!(s.commute(1, 2));
        assert_eq!(word_to_element(&s, &[1, 2]), word_to_element(&s, &[2, 1]));
    }

    #[test]
    fn a3_far_generators_commute() {
        let s = a(3);
        assert_eq!(word_to_element(&s, &[1, 3]), word_to_element(&s, &[3, 1]));
        assert_ne!(word_to_element(&s, &[1, 2]), word_to_element(&s, &[2, 1]));
    }

    #[test]
    fn defining_relations_hold() {
        let systems = vec![a(4), build_system(Family::I, 7).unwrap(), build_system(Family::I, 2).unwrap()];
        for s in systems {
            for i in s.gens() {
                for j in s.gens() {
                    let m = s.m(i, j).unwrap() as usize;
                    let w: Word = (0..2 * m).map(|k| if k % 2 == 0 { i } else { j }).collect();
                    assert!(is_trivial_word(&s, &w).unwrap(), "{i} {j}");
                    if i != j {
                        let short: Word = (0..2 * m - 2).map(|k| if k % 2 == 0 { i } else { j }).collect();
                        assert!(!is_trivial_word(&s, &short).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn first_generator_examples() {
        assert_eq!(reduce_first_generator(&a(3), &[2, 3]).unwrap(), vec![2, 3]);
        assert_eq!(reduce_first_generator(&a(2), &[1, 2, 1]).unwrap(), vec![2, 1, 2]);
        assert_eq!(reduce_first_generator(&a(3), &[1, 3, 1]).unwrap(), vec![3]);
    }

    #[test]
    fn group_orders() {
        assert_eq!(LengthTable::new(&a(3)).unwrap().order(), 24);
        assert_eq!(LengthTable::new(&build_system(Family::I, 5).unwrap()).unwrap().order(), 10);
    }

    #[test]
    fn filling_reaches_empty() {
        let s = a(3);
        let w = vec![1, 2, 1, 2, 1, 2, 3, 1, 3, 1];
        let moves = filling_moves(&s, &w).unwrap();
        assert!(apply_moves(&s, &w, &moves).is_empty());
        assert_eq!(filling_moves(&s, &[1, 2]), Err(CoxeterError::NotTrivial));
    }

    #[test]
    fn rex_graph_i2() {
        let s = build_system(Family::I, 2).unwrap();
        let g = rex_graph(&s, &longest_element(&s).unwrap()).unwrap();
        assert_eq!(g.nodes, vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(g.edges.len(), 1);
    }

    #[test]
    fn bound_is_enforced() {
        let s = a(2);
        let e = identity(&s).unwrap();
        assert!(matches!(reduced_words(&s, &e, 13), Err(CoxeterError::BoundExceeded { .. })));
        assert_eq!(reduced_words(&s, &e, 0).unwrap().len(), 1);
    }
}
