//! A diagram under rewriting, recording every applied operation as a trace.

use super::{apply_op, Op, RuleError, RuleSet};
use crate::map::{digest, Diagram, Digest, VertexId};
use crate::trace::{Certificate, Entry, MacroStep, Step, Trace};

struct Frame {
    rule: String,
    site: Vec<String>,
    before: Digest,
    entries: Vec<Entry>,
    certificate: Option<Box<Certificate>>,
    snapshot: (Diagram, usize),
}

/// Applies operations to a diagram and records them. Macros nest; an aborted
/// macro restores the diagram it started from.
pub struct Session<'a> {
    d: Diagram,
    rules: &'a RuleSet,
    initial: Digest,
    current: Digest,
    entries: Vec<Entry>,
    frames: Vec<Frame>,
    budget: Option<usize>,
    steps: usize,
}

impl<'a> Session<'a> {
    pub fn new(d: Diagram, rules: &'a RuleSet) -> Self {
        let c = digest(&d);
        Session {
            d,
            rules,
            initial: c.clone(),
            current: c,
            entries: Vec::new(),
            frames: Vec::new(),
            budget: None,
            steps: 0,
        }
    }

    /// Caps the number of primitive steps.
    pub fn with_budget(mut self, budget: Option<usize>) -> Self {
        self.budget = budget;
        self
    }

    pub fn diagram(&self) -> &Diagram {
        &self.d
    }

    pub fn rules(&self) -> &'a RuleSet {
        self.rules
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn budget(&self) -> Option<usize> {
        self.budget
    }

    pub fn fresh_id(&mut self) -> VertexId {
        self.d.fresh_id()
    }

    pub fn reserve_id(&mut self, id: VertexId) {
        self.d.reserve_id(id);
    }

    fn sink(&mut self) -> &mut Vec<Entry> {
        match self.frames.last_mut() {
            Some(f) => &mut f.entries,
            None => &mut self.entries,
        }
    }

    pub fn apply(&mut self, op: Op) -> Result<(), RuleError> {
        if let Some(b) = self.budget {
            if self.steps >= b {
                return Err(RuleError::Budget(b));
            }
        }
        apply_op(&mut self.d, &op, self.rules)?;
        self.steps += 1;
        let after = digest(&self.d);
        let before = std::mem::replace(&mut self.current, after.clone());
        self.sink().push(Entry::Step(Step { op, before, after }));
        Ok(())
    }

    pub fn apply_all(&mut self, ops: impl IntoIterator<Item = Op>) -> Result<(), RuleError> {
        for op in ops {
            self.apply(op)?;
        }
        Ok(())
    }

    pub fn begin(&mut self, rule: &str, site: Vec<String>) {
        self.frames.push(Frame {
            rule: rule.to_string(),
            site,
            before: self.current.clone(),
            entries: Vec::new(),
            certificate: None,
            snapshot: (self.d.clone(), self.steps),
        });
    }

    pub fn attach(&mut self, cert: Certificate) {
        if let Some(f) = self.frames.last_mut() {
            f.certificate = Some(Box::new(cert));
        }
    }

    /// Closes the innermost macro. A macro that did nothing leaves no entry.
    pub fn end(&mut self) {
        let f = self.frames.pop().expect("end without begin");
        if f.entries.is_empty() && f.certificate.is_none() {
            return;
        }
        let m = MacroStep {
            rule: f.rule,
            site: f.site,
            before: f.before,
            after: self.current.clone(),
            certificate: f.certificate,
            expansion: f.entries,
        };
        self.sink().push(Entry::Macro(m));
    }

    /// Drops the innermost macro and restores the diagram it started from.
    pub fn abort(&mut self) {
        let f = self.frames.pop().expect("abort without begin");
        self.d = f.snapshot.0;
        self.steps = f.snapshot.1;
        self.current = f.before;
    }

    /// Runs `f` as one macro step; on error nothing is recorded or changed.
    pub fn macro_op<T>(
        &mut self,
        rule: &str,
        site: Vec<String>,
        f: impl FnOnce(&mut Self) -> Result<T, RuleError>,
    ) -> Result<T, RuleError> {
        self.begin(rule, site);
        match f(self) {
            Ok(v) => {
                self.end();
                Ok(v)
            }
            Err(e) => {
                self.abort();
                Err(e)
            }
        }
    }

    /// Closes open macros and returns the trace with the final diagram.
    pub fn finish(mut self) -> (Trace, Diagram) {
        while !self.frames.is_empty() {
            self.end();
        }
        let t = Trace { initial: self.initial, entries: self.entries, final_code: self.current };
        (t, self.d)
    }

    pub fn into_diagram(self) -> Diagram {
        self.d
    }
}
