use std::fmt::Write as _;

use entangle_core::classify::{classify2, classify3, ClassifyConfig, Evidence, FamilyLabel};
use entangle_core::witness::TangentVerdict;
use entangle_core::Error;
use serde::Serialize;

use crate::io::State;

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub id: String,
    pub label: Option<FamilyLabel>,
    pub evidence: Option<Evidence>,
    pub error: Option<String>,
    pub config: ClassifyConfig,
    pub warnings: Vec<String>,
}

impl ClassificationReport {
    pub fn failed(id: impl Into<String>, error: impl ToString, cfg: &ClassifyConfig) -> Self {
        Self {
            id: id.into(),
            label: None,
            evidence: None,
            error: Some(error.to_string()),
            config: cfg.clone(),
            warnings: Vec::new(),
        }
    }

    pub fn classify(id: impl Into<String>, state: &State, cfg: &ClassifyConfig) -> Self {
        let id = id.into();
        let result = match state {
            State::Two(t) => classify2(t, cfg),
            State::Three(t) => classify3(t, cfg),
        };
        match result {
            Ok(c) => {
                let mut warnings = c.evidence.warnings();
                if c.label.tangent == TangentVerdict::Inconclusive {
                    warnings.push("proper/tangent split inconclusive; a larger --restarts may settle it".into());
                }
                Self {
                    id,
                    label: Some(c.label),
                    evidence: Some(c.evidence),
                    error: None,
                    config: cfg.clone(),
                    warnings,
                }
            }
            Err(Error::Contradictory { reason, evidence }) => Self {
                warnings: evidence.warnings(),
                evidence: Some(*evidence),
                ..Self::failed(id, format!("contradictory evidence: {reason}"), cfg)
            },
            Err(e) => Self::failed(id, e, cfg),
        }
    }

    pub fn is_error(&self) -> bool {
        self.error.is_some()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match (&self.label, &self.error) {
            (Some(label), _) => writeln!(out, "{}: {label}", self.id).unwrap(),
            (None, Some(e)) => writeln!(out, "{}: error: {e}", self.id).unwrap(),
            (None, None) => writeln!(out, "{}: no result", self.id).unwrap(),
        }
        if let Some(ev) = &self.evidence {
            writeln!(out, "  evidence: {ev}").unwrap();
        }
        for w in &self.warnings {
            writeln!(out, "  warning: {w}").unwrap();
        }
        out
    }
}
