//! Versioned report documents.

use std::collections::BTreeMap;

use framekit::transforms::{Tolerances, TransformReport, Verdict};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "framekit-report/1";

/// One verified claim instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub claim: String,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<usize>,
    pub residuals: BTreeMap<String, Value>,
    /// Named conditions whose conjunction is the verdict.
    pub conditions: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub flags: BTreeMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdict: Verdict,
}

impl CheckRecord {
    pub fn new(claim: &str, anchor: &str, trial: Option<usize>) -> Self {
        Self {
            claim: claim.to_string(),
            anchor: anchor.to_string(),
            trial,
            residuals: BTreeMap::new(),
            conditions: BTreeMap::new(),
            flags: BTreeMap::new(),
            error: None,
            verdict: Verdict::Fail,
        }
    }

    pub fn from_transform(anchor: &str, trial: Option<usize>, r: &TransformReport) -> Self {
        let mut rec = Self::new(&r.claim, anchor, trial);
        for (k, v) in &r.residuals {
            rec.residuals.insert(k.clone(), Value::from(*v));
        }
        rec.residuals.insert("lower".into(), Value::from(r.actual.lower_bound));
        rec.residuals.insert("upper".into(), Value::from(r.actual.upper_bound));
        rec.conditions = r.checks.clone();
        rec.flags = r.flags.clone();
        rec.finish()
    }

    pub fn failed_with(claim: &str, anchor: &str, trial: Option<usize>, error: impl ToString) -> Self {
        let mut rec = Self::new(claim, anchor, trial);
        rec.error = Some(error.to_string());
        rec
    }

    pub fn residual(mut self, name: &str, value: impl Into<Value>) -> Self {
        self.residuals.insert(name.to_string(), value.into());
        self
    }

    pub fn condition(mut self, name: &str, ok: bool) -> Self {
        self.conditions.insert(name.to_string(), ok);
        self
    }

    pub fn flag(mut self, name: &str, value: bool) -> Self {
        self.flags.insert(name.to_string(), value);
        self
    }

    /// Sets the verdict from the conditions; an empty set or an error fails.
    pub fn finish(mut self) -> Self {
        let ok = self.error.is_none() && !self.conditions.is_empty() && self.conditions.values().all(|&c| c);
        self.verdict = Verdict::from_bool(ok);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suite: String,
    pub anchor: String,
    pub seed: u64,
    pub trials: usize,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(
        suite: &str,
        anchor: &str,
        seed: u64,
        trials: usize,
        tolerances: Tolerances,
        input: Option<String>,
        checks: Vec<CheckRecord>,
    ) -> Self {
        let passed = checks.iter().filter(|c| c.passed()).count();
        let total = checks.len();
        Self {
            schema: SCHEMA,
            suite: suite.to_string(),
            anchor: anchor.to_string(),
            seed,
            trials,
            tolerances,
            input,
            verdict: Verdict::from_bool(total > 0 && passed == total),
            summary: Summary {
                total,
                passed,
                failed: total - passed,
            },
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} (seed {}, {} trials): {}\n",
            self.suite,
            self.seed,
            self.trials,
            verdict_word(self.verdict)
        );
        for c in &self.checks {
            let trial = c.trial.map(|t| format!(" trial={t}")).unwrap_or_default();
            let failing: Vec<&str> = c
                .conditions
                .iter()
                .filter(|(_, ok)| !**ok)
                .map(|(k, _)| k.as_str())
                .collect();
            let detail = match (&c.error, failing.is_empty()) {
                (Some(e), _) => format!(" error: {e}"),
                (None, false) => format!(" failing: {}", failing.join(", ")),
                (None, true) => String::new(),
            };
            out.push_str(&format!("{} {}{trial}{detail}\n", verdict_word(c.verdict), c.claim));
        }
        out.push_str(&format!(
            "{} of {} checks passed\n",
            self.summary.passed, self.summary.total
        ));
        out
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    if v.passed() {
        "PASS"
    } else {
        "FAIL"
    }
}
