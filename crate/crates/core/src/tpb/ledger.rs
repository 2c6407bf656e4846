use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::problems::MultiObjectiveProblem;
use crate::scalarize::RefPoints;
use crate::{DecisionVector, Error, ObjectiveVector, Result};

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    /// Starts at 1.
    pub eval_index: usize,
    pub x: DecisionVector,
    pub f: ObjectiveVector,
}

/// Every evaluation of a run, in order, under a hard capacity.
#[derive(Debug, Clone, Default)]
pub struct EvaluationLedger {
    entries: Vec<LedgerEntry>,
    capacity: usize,
    eval_time: Duration,
}

impl PartialEq for EvaluationLedger {
    fn eq(&self, other: &Self) -> bool {
        self.capacity == other.capacity && self.entries == other.entries
    }
}

impl EvaluationLedger {
    pub fn new(capacity: usize) -> Self {
        EvaluationLedger {
            entries: Vec::with_capacity(capacity.min(1 << 16)),
            capacity,
            eval_time: Duration::ZERO,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn remaining(&self) -> usize {
        self.capacity - self.entries.len()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn objectives(&self) -> impl Iterator<Item = &ObjectiveVector> {
        self.entries.iter().map(|e| &e.f)
    }

    /// Time spent inside `evaluate` calls.
    pub fn eval_time(&self) -> Duration {
        self.eval_time
    }

    /// Appends an already evaluated point.
    pub fn push(&mut self, x: DecisionVector, f: ObjectiveVector) -> Result<usize> {
        if self.remaining() == 0 {
            return Err(Error::precondition(format!(
                "ledger capacity {} exhausted",
                self.capacity
            )));
        }
        let eval_index = self.entries.len() + 1;
        self.entries.push(LedgerEntry { eval_index, x, f });
        Ok(eval_index)
    }

    /// Evaluates `problem` at `x` and records the result.
    ///
    /// # Panics
    ///
    /// When the ledger is full; callers cap their requests by `remaining()`.
    pub fn evaluate<P: MultiObjectiveProblem + ?Sized>(&mut self, problem: &P, x: &[f64]) -> ObjectiveVector {
        let start = Instant::now();
        let f = problem.evaluate(x);
        self.eval_time += start.elapsed();
        self.push(x.to_vec(), f.clone())
            .expect("evaluation requested beyond ledger capacity");
        f
    }

    /// Component-wise extremes over all recorded objective vectors.
    pub fn ref_points(&self) -> Result<RefPoints> {
        RefPoints::from_objectives(self.entries.iter().map(|e| e.f.as_slice()))
    }

    /// First entry minimizing `g(f)`.
    pub fn argmin(&self, g: impl Fn(&[f64]) -> f64) -> Option<&LedgerEntry> {
        let mut best: Option<(&LedgerEntry, f64)> = None;
        for e in &self.entries {
            let v = g(&e.f);
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((e, v));
            }
        }
        best.map(|(e, _)| e)
    }

    /// One JSON object per line with keys `eval_index`, `x` and `f`.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&serde_json::to_string(e).expect("ledger entries serialize"));
            s.push('\n');
        }
        s
    }

    pub fn from_jsonl(text: &str, capacity: usize) -> Result<Self> {
        let mut ledger = EvaluationLedger::new(capacity);
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let e: LedgerEntry = serde_json::from_str(line)?;
            let idx = ledger.push(e.x, e.f)?;
            if idx != e.eval_index {
                return Err(Error::Format {
                    path: "<ledger>".into(),
                    message: format!("eval_index {} where {idx} was expected", e.eval_index),
                });
            }
        }
        Ok(ledger)
    }
}
