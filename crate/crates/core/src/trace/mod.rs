//! Replayable rewrite traces: recording, text form, verification and macro expansion.

mod text;

use std::fmt;

use crate::map::{digest, Diagram, Digest};
use crate::rules::{apply_op, Op, RuleError, RuleSet};

pub use text::{parse_trace, serialize_trace, TraceParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub op: Op,
    pub before: Digest,
    pub after: Digest,
}

/// A derived move with its primitive expansion and, for patch replacements,
/// the certificate that justifies it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroStep {
    pub rule: String,
    pub site: Vec<String>,
    pub before: Digest,
    pub after: Digest,
    pub certificate: Option<Box<Certificate>>,
    pub expansion: Vec<Entry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Step(Step),
    Macro(MacroStep),
}

impl Entry {
    pub fn before(&self) -> &Digest {
        match self {
            Entry::Step(s) => &s.before,
            Entry::Macro(m) => &m.before,
        }
    }

    pub fn after(&self) -> &Digest {
        match self {
            Entry::Step(s) => &s.after,
            Entry::Macro(m) => &m.after,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: Digest,
    pub entries: Vec<Entry>,
    pub final_code: Digest,
}

/// A closed diagram glued from two patches, with a trace reducing it to empty.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub glued: Diagram,
    pub trace: Trace,
}

impl PartialEq for Certificate {
    fn eq(&self, other: &Self) -> bool {
        crate::map::serialize(&self.glued) == crate::map::serialize(&other.glued) && self.trace == other.trace
    }
}

impl Eq for Certificate {}

impl Trace {
    pub fn empty(d: &Diagram) -> Trace {
        let c = digest(d);
        Trace { initial: c.clone(), entries: Vec::new(), final_code: c }
    }

    /// Number of primitive steps, counting expansions.
    pub fn primitive_count(&self) -> usize {
        fn count(es: &[Entry]) -> usize {
            es.iter()
                .map(|e| match e {
                    Entry::Step(_) => 1,
                    Entry::Macro(m) => count(&m.expansion),
                })
                .sum()
        }
        count(&self.entries)
    }

    /// Counts of top-level entries per rule name.
    pub fn rule_counts(&self) -> std::collections::BTreeMap<String, usize> {
        let mut out = std::collections::BTreeMap::new();
        for e in &self.entries {
            let name = match e {
                Entry::Step(s) => s.op.rule().to_string(),
                Entry::Macro(m) => m.rule.clone(),
            };
            *out.entry(name).or_insert(0) += 1;
        }
        out
    }

    /// Primitive operations in order.
    pub fn primitives(&self) -> Vec<Op> {
        fn walk(es: &[Entry], out: &mut Vec<Op>) {
            for e in es {
                match e {
                    Entry::Step(s) => out.push(s.op.clone()),
                    Entry::Macro(m) => walk(&m.expansion, out),
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.entries, &mut out);
        out
    }
}

/// Outcome of verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    /// Index of the first failing entry in depth-first order.
    pub failing_step: Option<usize>,
    pub reason: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failing_step {
            None if self.ok => write!(f, "ok"),
            None => write!(f, "rejected: {}", self.reason),
            Some(i) => write!(f, "rejected at step {i}: {}", self.reason),
        }
    }
}

struct Replay<'a> {
    rules: &'a RuleSet,
    index: usize,
}

impl Replay<'_> {
    fn entries(&mut self, d: &mut Diagram, es: &[Entry]) -> Result<(), (usize, String)> {
        for e in es {
            let here = self.index;
            self.index += 1;
            let now = digest(d);
            if &now != e.before() {
                return Err((here, "before code does not chain".into()));
            }
            match e {
                Entry::Step(s) => {
                    let signature = d.boundary_signature();
                    apply_op(d, &s.op, self.rules).map_err(|err| (here, format!("{}: {err}", s.op)))?;
                    let bad = d.validate();
                    if !bad.is_empty() {
                        return Err((here, format!("result invalid: {}", bad[0].detail)));
                    }
                    if d.boundary_signature() != signature {
                        return Err((here, "boundary changed".into()));
                    }
                }
                Entry::Macro(m) => {
                    if m.expansion.is_empty() && m.before != m.after {
                        return Err((here, format!("macro {} has no expansion", m.rule)));
                    }
                    if let Some(c) = &m.certificate {
                        let v = verify_certificate(c, self.rules);
                        if !v.ok {
                            return Err((here, format!("certificate rejected: {}", v.reason)));
                        }
                    }
                    self.entries(d, &m.expansion)?;
                }
            }
            if &digest(d) != e.after() {
                return Err((here, "after code mismatch".into()));
            }
        }
        Ok(())
    }
}

/// Replays a trace from `initial`, checking codes, validity and the boundary at
/// every step. Macro steps replay their expansions; certificates are checked too.
pub fn verify_trace(initial: &Diagram, trace: &Trace, rules: &RuleSet) -> Verdict {
    verify_and_replay(initial, trace, rules).0
}

/// Like [`verify_trace`], also returning the diagram reached.
pub fn verify_and_replay(initial: &Diagram, trace: &Trace, rules: &RuleSet) -> (Verdict, Diagram) {
    let mut d = initial.clone();
    if digest(&d) != trace.initial {
        let v = Verdict { ok: false, failing_step: None, reason: "initial code mismatch".into() };
        return (v, d);
    }
    let mut r = Replay { rules, index: 0 };
    if let Err((i, reason)) = r.entries(&mut d, &trace.entries) {
        return (Verdict { ok: false, failing_step: Some(i), reason }, d);
    }
    if digest(&d) != trace.final_code {
        let v = Verdict { ok: false, failing_step: None, reason: "final code mismatch".into() };
        return (v, d);
    }
    (Verdict { ok: true, failing_step: None, reason: String::new() }, d)
}

/// Verifies independent `(initial, trace)` pairs, in parallel with the
/// `parallel` feature. Each trace is replayed sequentially.
pub fn verify_batch(items: &[(Diagram, Trace)], rules: &RuleSet) -> Vec<Verdict> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(|(d, t)| verify_trace(d, t, rules)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    verify_batch_sequential(items, rules)
}

/// [`verify_batch`] on the calling thread.
pub fn verify_batch_sequential(items: &[(Diagram, Trace)], rules: &RuleSet) -> Vec<Verdict> {
    items.iter().map(|(d, t)| verify_trace(d, t, rules)).collect()
}

/// A certificate verifies when its trace replays from the glued diagram to empty.
pub fn verify_certificate(c: &Certificate, rules: &RuleSet) -> Verdict {
    let (v, end) = verify_and_replay(&c.glued, &c.trace, rules);
    if !v.ok {
        return v;
    }
    if !end.is_empty() {
        return Verdict { ok: false, failing_step: None, reason: "certificate does not end empty".into() };
    }
    v
}

/// Flattens every macro into its primitive expansion.
pub fn expand_macros(trace: &Trace) -> Result<Trace, RuleError> {
    fn flat(es: &[Entry], out: &mut Vec<Entry>) -> Result<(), RuleError> {
        for e in es {
            match e {
                Entry::Step(s) => out.push(Entry::Step(s.clone())),
                Entry::Macro(m) => {
                    if m.expansion.is_empty() && m.before != m.after {
                        return Err(RuleError::Unexpandable(m.rule.clone()));
                    }
                    flat(&m.expansion, out)?;
                }
            }
        }
        Ok(())
    }
    let mut entries = Vec::new();
    flat(&trace.entries, &mut entries)?;
    Ok(Trace { initial: trace.initial.clone(), entries, final_code: trace.final_code.clone() })
}
