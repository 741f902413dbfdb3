//! Line-oriented text format.
//!
//! ```text
//! group A 3                 # or: I m, BI m, X rank e12 e13 ... (upper triangle)
//! vertex 1 1 2              # id and the two generators; oriented: out | in | out@k
//! edge 1.0 2.4              # oriented: `>` marks the first dart as the tail
//! circle 1                  # oriented: cw | ccw
//! boundary 1.3 2.5 2~4 2~3  # ccw points: a vertex dart, or an arc to position k
//! ```
//!
//! In oriented files an arc token carries a trailing `>` on its tail end.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{BoundaryPoint, Dart, Diagram, Spin, Vertex, VertexId};
use crate::coxeter::{build_system, CoxeterSystem, Family, Gen};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse().or_else(|_| err(line, format!("bad {what} `{tok}`")))
}

pub(crate) fn parse_system(line: usize, toks: &[&str]) -> Result<CoxeterSystem, ParseError> {
    let fail = |e: crate::coxeter::CoxeterError| ParseError { line, msg: e.to_string() };
    match toks {
        ["A", n] => build_system(Family::A, num(line, n, "rank")?).map_err(fail),
        ["I", m] => build_system(Family::I, num(line, m, "exponent")?).map_err(fail),
        ["BI", m] => build_system(Family::BraidI, num(line, m, "exponent")?).map_err(fail),
        ["X", r, rest @ ..] => {
            let r: usize = num(line, r, "rank")?;
            if rest.len() != r * r.saturating_sub(1) / 2 {
                return err(line, format!("X {r} needs {} exponents", r * r.saturating_sub(1) / 2));
            }
            let mut m = vec![1u16; r * r];
            let mut it = rest.iter();
            for i in 0..r {
                for j in i + 1..r {
                    let e: u16 = num(line, it.next().unwrap(), "exponent")?;
                    m[i * r + j] = e;
                    m[j * r + i] = e;
                }
            }
            CoxeterSystem::explicit(r, &m).map_err(fail)
        }
        _ => err(line, "expected `group A n`, `group I m`, `group BI m` or `group X ...`"),
    }
}

fn parse_dart(line: usize, tok: &str) -> Result<(VertexId, u16), ParseError> {
    let (v, s) = tok.split_once('.').ok_or_else(|| ParseError {
        line,
        msg: format!("expected vertex.slot, got `{tok}`"),
    })?;
    Ok((num(line, v, "vertex id")?, num(line, s, "slot")?))
}

enum Token {
    Dart(VertexId, u16),
    Arc { color: Gen, to: u32, tail: bool },
}

/// Parses a diagram. Structural problems are errors; axioms are left to `validate`.
pub fn parse(text: &str) -> Result<Diagram, ParseError> {
    let mut sys: Option<Arc<CoxeterSystem>> = None;
    let mut d: Option<Diagram> = None;
    let mut vertex_line: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut boundary: Option<(usize, Vec<Token>)> = None;
    let mut edges: Vec<(usize, (VertexId, u16), (VertexId, u16), bool)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks[0] != "group" && d.is_none() {
            return err(line, "first statement must be `group`");
        }
        match toks[0] {
            "group" => {
                if d.is_some() {
                    return err(line, "duplicate `group` line");
                }
                let s = Arc::new(parse_system(line, &toks[1..])?);
                d = Some(Diagram::new(s.clone()));
                sys = Some(s);
            }
            "vertex" => {
                let sys = sys.as_ref().unwrap();
                let dg = d.as_mut().unwrap();
                let (id, a, b) = match toks.len() {
                    4 | 5 => (
                        num::<VertexId>(line, toks[1], "vertex id")?,
                        num::<Gen>(line, toks[2], "generator")?,
                        num::<Gen>(line, toks[3], "generator")?,
                    ),
                    _ => return err(line, "expected `vertex <id> <i> <j> [out|in|out@k]`"),
                };
                if vertex_line.contains_key(&id) {
                    return err(line, format!("duplicate vertex {id}"));
                }
                for g in [a, b] {
                    if g == 0 || g as usize > sys.rank {
                        return err(line, format!("generator {g} out of range"));
                    }
                }
                let m = if a == b { 1 } else {
                    match sys.m(a, b) {
                        Some(m) => m,
                        None => return err(line, format!("m({a},{b}) is infinite")),
                    }
                };
                let out_start = match (sys.oriented, toks.get(4)) {
                    (false, None) => None,
                    (false, Some(_)) => return err(line, "orientation given for an unoriented system"),
                    (true, None) => return err(line, "oriented vertex needs out|in"),
                    (true, Some(&"out")) => Some(0),
                    (true, Some(&"in")) => Some(m),
                    (true, Some(t)) => match t.strip_prefix("out@") {
                        Some(k) => {
                            let k: u16 = num(line, k, "out offset")?;
                            if k >= 2 * m {
                                return err(line, format!("out offset {k} out of range"));
                            }
                            Some(k)
                        }
                        None => return err(line, format!("bad orientation `{t}`")),
                    },
                };
                dg.add_vertex(id, Vertex::new(a, b, m, out_start));
                vertex_line.insert(id, line);
            }
            "edge" => {
                let (a, b, tail) = match toks.as_slice() {
                    [_, a, b] => (parse_dart(line, a)?, parse_dart(line, b)?, false),
                    [_, a, b, ">"] => (parse_dart(line, a)?, parse_dart(line, b)?, true),
                    _ => return err(line, "expected `edge a.s b.t [>]`"),
                };
                edges.push((line, a, b, tail));
            }
            "circle" => {
                let sys = sys.as_ref().unwrap();
                let (c, spin) = match toks.as_slice() {
                    [_, c] if !sys.oriented => (num::<Gen>(line, c, "color")?, None),
                    [_, c, "cw"] if sys.oriented => (num::<Gen>(line, c, "color")?, Some(Spin::Cw)),
                    [_, c, "ccw"] if sys.oriented => (num::<Gen>(line, c, "color")?, Some(Spin::Ccw)),
                    _ if sys.oriented => return err(line, "expected `circle <color> cw|ccw`"),
                    _ => return err(line, "expected `circle <color>`"),
                };
                if c == 0 || c as usize > sys.rank {
                    return err(line, format!("circle color {c} out of range"));
                }
                d.as_mut().unwrap().add_circle(c, spin);
            }
            "boundary" => {
                if boundary.is_some() {
                    return err(line, "duplicate `boundary` line");
                }
                let mut list = Vec::new();
                for t in &toks[1..] {
                    if let Some((c, rest)) = t.split_once('~') {
                        let (k, tail) = match rest.strip_suffix('>') {
                            Some(k) => (k, true),
                            None => (rest, false),
                        };
                        list.push(Token::Arc {
                            color: num(line, c, "color")?,
                            to: num(line, k, "position")?,
                            tail,
                        });
                    } else {
                        let (v, s) = parse_dart(line, t)?;
                        list.push(Token::Dart(v, s));
                    }
                }
                boundary = Some((line, list));
            }
            other => return err(line, format!("unknown statement `{other}`")),
        }
    }
    let Some(mut d) = d else {
        return err(text.lines().count().max(1), "missing `group` line");
    };
    let oriented = d.sys.oriented;
    let mut used: BTreeMap<(VertexId, u16), usize> = BTreeMap::new();
    let mut claim = |line: usize, d: &Diagram, (v, s): (VertexId, u16)| -> Result<(), ParseError> {
        let Some(x) = d.vertices.get(&v) else {
            return err(line, format!("unknown vertex {v}"));
        };
        if s >= x.degree() {
            return err(line, format!("slot {s} out of range for vertex {v}"));
        }
        if let Some(prev) = used.insert((v, s), line) {
            return err(line, format!("dart {v}.{s} already used on line {prev}"));
        }
        Ok(())
    };
    for &(line, a, b, tail) in &edges {
        claim(line, &d, a)?;
        claim(line, &d, b)?;
        if oriented {
            if !tail {
                return err(line, "oriented edge needs `>`");
            }
            if d.is_out(Dart::V(a.0, a.1)) != Some(true) {
                return err(line, format!("dart {}.{} is not outgoing", a.0, a.1));
            }
        } else if tail {
            return err(line, "`>` on an unoriented edge");
        }
        d.link(Dart::V(a.0, a.1), Dart::V(b.0, b.1));
    }
    if let Some((line, list)) = boundary {
        let k = list.len() as u32;
        for (p, t) in list.iter().enumerate() {
            match *t {
                Token::Dart(v, s) => {
                    claim(line, &d, (v, s))?;
                    let x = &d.vertices[&v];
                    d.boundary.push(BoundaryPoint {
                        color: x.color(s),
                        inward: x.is_out(s).map(|o| !o),
                        link: Dart::V(v, s),
                    });
                }
                Token::Arc { color, to, tail } => {
                    if to >= k || to as usize == p {
                        return err(line, format!("arc target {to} invalid at position {p}"));
                    }
                    match &list[to as usize] {
                        Token::Arc { color: c2, to: back, tail: t2 } => {
                            if *back as usize != p || *c2 != color {
                                return err(line, format!("arc {p} ~ {to} is not mutual"));
                            }
                            if oriented && tail == *t2 {
                                return err(line, format!("arc {p} ~ {to} needs exactly one `>`"));
                            }
                        }
                        Token::Dart(..) => return err(line, format!("arc {p} ~ {to} is not mutual")),
                    }
                    if !oriented && tail {
                        return err(line, "`>` on an unoriented arc");
                    }
                    d.boundary.push(BoundaryPoint {
                        color,
                        inward: oriented.then_some(tail),
                        link: Dart::B(to),
                    });
                }
            }
        }
        for p in 0..k {
            if let Dart::V(v, s) = d.boundary[p as usize].link {
                d.link(Dart::V(v, s), Dart::B(p));
            }
        }
    }
    for (&id, x) in &d.vertices {
        for s in 0..x.degree() {
            if !used.contains_key(&(id, s)) {
                return err(vertex_line[&id], format!("dart {id}.{s} is not attached"));
            }
        }
    }
    d.reset_ids();
    Ok(d)
}

pub fn serialize(d: &Diagram) -> String {
    let mut out = d.sys.header();
    out.push('\n');
    for (id, v) in &d.vertices {
        out.push_str(&format!("vertex {id} {} {}", v.lo, v.hi));
        match v.out_start {
            None => {}
            Some(0) => out.push_str(" out"),
            Some(o) if o == v.m => out.push_str(" in"),
            Some(o) => out.push_str(&format!(" out@{o}")),
        }
        out.push('\n');
    }
    let mut edges = Vec::new();
    for (&id, v) in &d.vertices {
        for s in 0..v.degree() {
            let a = Dart::V(id, s);
            let b = v.links[s as usize];
            if let Dart::V(..) = b {
                match v.is_out(s) {
                    Some(true) => edges.push((a, b, true)),
                    Some(false) => {}
                    None if a < b => edges.push((a, b, false)),
                    None => {}
                }
            }
        }
    }
    edges.sort();
    for (a, b, tail) in edges {
        out.push_str(&format!("edge {a} {b}{}\n", if tail { " >" } else { "" }));
    }
    for (&(c, spin), &n) in &d.circles {
        for _ in 0..n {
            match spin {
                None => out.push_str(&format!("circle {c}\n")),
                Some(Spin::Cw) => out.push_str(&format!("circle {c} cw\n")),
                Some(Spin::Ccw) => out.push_str(&format!("circle {c} ccw\n")),
            }
        }
    }
    if !d.boundary.is_empty() {
        out.push_str("boundary");
        for p in &d.boundary {
            match p.link {
                Dart::V(v, s) => out.push_str(&format!(" {v}.{s}")),
                Dart::B(q) => {
                    let tail = if p.inward == Some(true) { ">" } else { "" };
                    out.push_str(&format!(" {}~{q}{tail}", p.color));
                }
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAIR: &str = "group I 3\nvertex 1 1 2\nvertex 2 1 2\n\
        edge 1.0 2.0\nedge 1.1 2.5\nedge 1.2 2.4\nedge 1.3 2.3\nedge 1.4 2.2\nedge 1.5 2.1\n";

    #[test]
    fn round_trip() {
        let d = parse(PAIR).unwrap();
        assert!(d.validate().is_empty());
        let again = parse(&serialize(&d)).unwrap();
        assert_eq!(serialize(&d), serialize(&again));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse("group I 3\nvertex 1 1 2\nedge 1.0 1.9\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse("vertex 1 1 2\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse("group I 3\nvertex 1 1 2\nvertex 2 1 2\nbogus\n").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn unattached_dart_is_an_error() {
        let e = parse("group I 3\nvertex 1 1 2\n").unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn oriented_pair_and_arcs() {
        let text = "group BI 2\nvertex 1 1 2 out\nboundary 1.0 1.1 1.2 1.3 1~5> 1~4\n";
        let d = parse(text).unwrap();
        assert!(d.validate().is_empty(), "{:?}", d.validate());
        assert_eq!(serialize(&parse(&serialize(&d)).unwrap()), serialize(&d));
    }
}
