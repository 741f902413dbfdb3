//! Line-oriented trace files.
//!
//! ```text
//! trace v1
//! initial <code>
//! step <rule> <site...> <before> <after>
//! begin-macro <rule> <site count> <site...> <before> <after>
//!   step ...
//!   certificate
//!     diagram
//!       <diagram text>
//!     end-diagram
//!     trace v1
//!     ...
//!   end-certificate
//! end-macro
//! final <code>
//! checksum <sha-256 of all preceding bytes>
//! ```

use sha2::{Digest as _, Sha256};
use thiserror::Error;

use super::{Certificate, Entry, MacroStep, Step, Trace};
use crate::map::{parse, serialize};
use crate::rules::Op;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("trace line {line}: {msg}")]
pub struct TraceParseError {
    pub line: usize,
    pub msg: String,
}

fn is_code(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

fn write_trace(t: &Trace, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    out.push_str(&format!("{pad}trace v1\n{pad}initial {}\n", t.initial));
    write_entries(&t.entries, depth, out);
    out.push_str(&format!("{pad}final {}\n", t.final_code));
}

fn write_entries(es: &[Entry], depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for e in es {
        match e {
            Entry::Step(s) => {
                out.push_str(&format!("{pad}step {} {} {}\n", s.op, s.before, s.after));
            }
            Entry::Macro(m) => {
                out.push_str(&format!("{pad}begin-macro {} {}", m.rule, m.site.len()));
                for t in &m.site {
                    out.push(' ');
                    out.push_str(t);
                }
                out.push_str(&format!(" {} {}\n", m.before, m.after));
                write_entries(&m.expansion, depth + 1, out);
                if let Some(c) = &m.certificate {
                    let inner = "  ".repeat(depth + 1);
                    out.push_str(&format!("{inner}certificate\n{inner}  diagram\n"));
                    for line in serialize(&c.glued).lines() {
                        out.push_str(&format!("{inner}    {line}\n"));
                    }
                    out.push_str(&format!("{inner}  end-diagram\n"));
                    write_trace(&c.trace, depth + 2, out);
                    out.push_str(&format!("{inner}end-certificate\n"));
                }
                out.push_str(&format!("{pad}end-macro\n"));
            }
        }
    }
}

/// Serializes a trace with a trailing checksum line.
pub fn serialize_trace(t: &Trace) -> String {
    let mut out = String::new();
    write_trace(t, 0, &mut out);
    let sum = hex::encode(Sha256::digest(out.as_bytes()));
    out.push_str(&format!("checksum {sum}\n"));
    out
}

struct Reader<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, TraceParseError> {
        let line = self.lines.get(self.pos).map_or(self.lines.len() + 1, |l| l.0);
        Err(TraceParseError { line, msg: msg.into() })
    }

    fn peek(&self) -> Option<&'a str> {
        self.lines.get(self.pos).map(|l| l.1.trim())
    }

    fn next(&mut self) -> Result<&'a str, TraceParseError> {
        match self.peek() {
            Some(l) => {
                self.pos += 1;
                Ok(l)
            }
            None => self.err("unexpected end of trace"),
        }
    }

    fn expect_code(&mut self, key: &str) -> Result<String, TraceParseError> {
        let l = self.next()?;
        match l.split_once(' ') {
            Some((k, c)) if k == key && is_code(c) => Ok(c.to_string()),
            _ => {
                self.pos -= 1;
                self.err(format!("expected `{key} <code>`"))
            }
        }
    }

    fn trace(&mut self) -> Result<Trace, TraceParseError> {
        if self.next()? != "trace v1" {
            self.pos -= 1;
            return self.err("expected `trace v1`");
        }
        let initial = self.expect_code("initial")?;
        let entries = self.entries()?;
        let final_code = self.expect_code("final")?;
        Ok(Trace { initial, entries, final_code })
    }

    fn entries(&mut self) -> Result<Vec<Entry>, TraceParseError> {
        let mut out = Vec::new();
        loop {
            let Some(l) = self.peek() else { return Ok(out) };
            let toks: Vec<&str> = l.split(' ').collect();
            match toks[0] {
                "step" => {
                    if toks.len() < 4 {
                        return self.err("short step line");
                    }
                    let n = toks.len();
                    let (before, after) = (toks[n - 2], toks[n - 1]);
                    if !is_code(before) || !is_code(after) {
                        return self.err("bad code in step");
                    }
                    let op = match Op::parse(toks[1], &toks[2..n - 2]) {
                        Ok(op) => op,
                        Err(e) => return self.err(e),
                    };
                    if op.to_string() != toks[1..n - 2].join(" ") {
                        return self.err("non-canonical step site");
                    }
                    self.pos += 1;
                    out.push(Entry::Step(Step { op, before: before.into(), after: after.into() }));
                }
                "begin-macro" => {
                    if toks.len() < 5 {
                        return self.err("short macro line");
                    }
                    let k: usize = match toks[2].parse() {
                        Ok(k) => k,
                        Err(_) => return self.err("bad site count"),
                    };
                    if toks.len() != 5 + k {
                        return self.err("site count mismatch");
                    }
                    let (before, after) = (toks[3 + k], toks[4 + k]);
                    if !is_code(before) || !is_code(after) || toks[1].is_empty() {
                        return self.err("bad macro line");
                    }
                    let rule = toks[1].to_string();
                    let site = toks[3..3 + k].iter().map(|s| s.to_string()).collect();
                    self.pos += 1;
                    let expansion = self.entries()?;
                    let mut certificate = None;
                    if self.peek() == Some("certificate") {
                        self.pos += 1;
                        if self.next()? != "diagram" {
                            self.pos -= 1;
                            return self.err("expected `diagram`");
                        }
                        let start = self.pos;
                        while self.peek().is_some_and(|l| l != "end-diagram") {
                            self.pos += 1;
                        }
                        let text: String =
                            self.lines[start..self.pos].iter().map(|l| format!("{}\n", l.1.trim())).collect();
                        if self.peek().is_none() {
                            return self.err("unterminated diagram");
                        }
                        let glued = match parse(&text) {
                            Ok(d) => d,
                            Err(e) => {
                                let line = self.lines[start].0 + e.line - 1;
                                return Err(TraceParseError { line, msg: e.msg });
                            }
                        };
                        self.pos += 1;
                        let trace = self.trace()?;
                        if self.next()? != "end-certificate" {
                            self.pos -= 1;
                            return self.err("expected `end-certificate`");
                        }
                        certificate = Some(Box::new(Certificate { glued, trace }));
                    }
                    if self.next()? != "end-macro" {
                        self.pos -= 1;
                        return self.err("expected `end-macro`");
                    }
                    out.push(Entry::Macro(MacroStep {
                        rule,
                        site,
                        before: before.into(),
                        after: after.into(),
                        certificate,
                        expansion,
                    }));
                }
                _ => return Ok(out),
            }
        }
    }
}

/// Parses a serialized trace. The checksum, the layout and every code are checked.
pub fn parse_trace(text: &str) -> Result<Trace, TraceParseError> {
    let body_end = text.trim_end_matches('\n').rfind('\n').map_or(0, |i| i + 1);
    let (body, last) = text.split_at(body_end);
    let nlines = body.lines().count();
    let Some(sum) = last.strip_prefix("checksum ").map(|s| s.strip_suffix('\n').unwrap_or(s)) else {
        return Err(TraceParseError { line: nlines + 1, msg: "missing checksum".into() });
    };
    if sum != hex::encode(Sha256::digest(body.as_bytes())) {
        return Err(TraceParseError { line: nlines + 1, msg: "checksum mismatch".into() });
    }
    let lines: Vec<(usize, &str)> = body.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let mut r = Reader { lines, pos: 0 };
    let t = r.trace()?;
    if r.pos != r.lines.len() {
        return r.err("trailing content");
    }
    let again = serialize_trace(&t);
    if again != text {
        return Err(TraceParseError { line: 1, msg: "non-canonical layout".into() });
    }
    Ok(t)
}
