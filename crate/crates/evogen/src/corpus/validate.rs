//! Record validation.
//!
//! Violations are data, not errors: `validate_sample` returns a report
//! listing every broken invariant with a stable machine-readable code,
//! and an empty report means the sample is fully valid. Grounding
//! violations are warnings on seed data (heterogeneous upstream sources
//! predate the annotation paradigm) and errors on evolved data.

use serde::{Deserialize, Serialize};

use super::capability::{canonicalize_capability, function_capability};
use super::sample::{fold_label, InstructionSample, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Warning,
    Error,
}

/// Stable violation codes. New codes may be added; existing codes never
/// change meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    BadSchemaVersion,
    EmptyId,
    EmptyImageRef,
    EmptyObjectLabel,
    BadBbox,
    NoTurns,
    EmptyQuestion,
    EmptyAnswer,
    UnknownCapability,
    DuplicateCapability,
    UnknownFunction,
    NonVisionFunction,
    UngroundedStepArg,
    LineageRoundOperatorMismatch,
    LineageParentMissing,
    LineageParentUnexpected,
    DuplicateId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub severity: Severity,
    /// Dotted path to the offending field, e.g. `turns[1].capabilities[0]`.
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when no violation at `Severity::Error` is present; warnings
    /// are tolerated.
    pub fn passes_error_level(&self) -> bool {
        self.violations.iter().all(|v| v.severity < Severity::Error)
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    fn push(&mut self, code: ViolationCode, severity: Severity, path: String, message: String) {
        self.violations.push(Violation { code, severity, path, message });
    }
}

/// Checks every typed invariant of one sample and reports all
/// violations. Never fails: bad data comes back as report entries.
pub fn validate_sample(sample: &InstructionSample) -> ValidationReport {
    let mut report = ValidationReport::default();
    let err = Severity::Error;

    if sample.schema_version != SCHEMA_VERSION {
        report.push(
            ViolationCode::BadSchemaVersion,
            err,
            "schema_version".into(),
            format!("expected schema_version {SCHEMA_VERSION}, got {}", sample.schema_version),
        );
    }
    if sample.id.trim().is_empty() {
        report.push(ViolationCode::EmptyId, err, "id".into(), "sample id is empty".into());
    }
    if sample.image_ref.trim().is_empty() {
        report.push(
            ViolationCode::EmptyImageRef,
            err,
            "image_ref".into(),
            "image reference is empty".into(),
        );
    }

    for (i, obj) in sample.objects.iter().enumerate() {
        if obj.label.trim().is_empty() {
            report.push(
                ViolationCode::EmptyObjectLabel,
                err,
                format!("objects[{i}].label"),
                "object label is empty after trimming".into(),
            );
        }
        if let Some([x1, y1, x2, y2]) = obj.bbox {
            let in_unit = |v: f64| (0.0..=1.0).contains(&v);
            let ok = in_unit(x1) && in_unit(y1) && in_unit(x2) && in_unit(y2) && x1 < x2 && y1 < y2;
            if !ok {
                report.push(
                    ViolationCode::BadBbox,
                    err,
                    format!("objects[{i}].bbox"),
                    format!("bbox [{x1}, {y1}, {x2}, {y2}] must satisfy 0 <= x1 < x2 <= 1 and 0 <= y1 < y2 <= 1"),
                );
            }
        }
    }

    if sample.turns.is_empty() {
        report.push(ViolationCode::NoTurns, err, "turns".into(), "sample has no turns".into());
    }

    // Grounding severity depends on provenance: warning for seeds,
    // error for evolved samples.
    let grounding_severity =
        if sample.lineage.round == 0 { Severity::Warning } else { Severity::Error };
    let declared = sample.folded_object_labels();

    for (t, turn) in sample.turns.iter().enumerate() {
        if turn.question.trim().is_empty() {
            report.push(
                ViolationCode::EmptyQuestion,
                err,
                format!("turns[{t}].question"),
                "question is empty".into(),
            );
        }
        if turn.answer.trim().is_empty() {
            report.push(
                ViolationCode::EmptyAnswer,
                err,
                format!("turns[{t}].answer"),
                "answer is empty".into(),
            );
        }

        let mut seen = std::collections::BTreeSet::new();
        for (c, raw) in turn.capabilities.iter().enumerate() {
            match canonicalize_capability(raw) {
                Ok(cap) => {
                    if !seen.insert(cap) {
                        report.push(
                            ViolationCode::DuplicateCapability,
                            err,
                            format!("turns[{t}].capabilities[{c}]"),
                            format!("capability {cap} listed more than once"),
                        );
                    }
                }
                Err(_) => report.push(
                    ViolationCode::UnknownCapability,
                    err,
                    format!("turns[{t}].capabilities[{c}]"),
                    format!("{raw:?} is not one of the nine atomic capabilities"),
                ),
            }
        }

        for (s, step) in turn.manipulation_chain.iter().enumerate() {
            match function_capability(&step.function) {
                Ok(cap) if cap.is_vision_centric() => {}
                Ok(cap) => report.push(
                    ViolationCode::NonVisionFunction,
                    err,
                    format!("turns[{t}].manipulation_chain[{s}].function"),
                    format!("step function {:?} maps to language-centric {cap}", step.function),
                ),
                Err(_) => report.push(
                    ViolationCode::UnknownFunction,
                    err,
                    format!("turns[{t}].manipulation_chain[{s}].function"),
                    format!("{:?} is not a vision-centric pseudo-function", step.function),
                ),
            }
            for (a, arg) in step.arguments.iter().enumerate() {
                if is_literal_argument(arg) {
                    continue;
                }
                if !declared.contains(&fold_label(arg)) {
                    report.push(
                        ViolationCode::UngroundedStepArg,
                        grounding_severity,
                        format!("turns[{t}].manipulation_chain[{s}].arguments[{a}]"),
                        format!("argument {arg:?} references an object not declared in objects"),
                    );
                }
            }
        }
    }

    let lin = &sample.lineage;
    let seed_op = lin.operator.is_seed();
    if (lin.round == 0) != seed_op {
        report.push(
            ViolationCode::LineageRoundOperatorMismatch,
            err,
            "lineage".into(),
            format!("round {} is inconsistent with operator (round 0 iff seed)", lin.round),
        );
    }
    if lin.round > 0 && lin.parent_id.is_none() {
        report.push(
            ViolationCode::LineageParentMissing,
            err,
            "lineage.parent_id".into(),
            "evolved sample has no parent_id".into(),
        );
    }
    if lin.round == 0 && lin.parent_id.is_some() {
        report.push(
            ViolationCode::LineageParentUnexpected,
            err,
            "lineage.parent_id".into(),
            "seed sample carries a parent_id".into(),
        );
    }

    report
}

/// Per-sample validation plus the corpus-level id-uniqueness invariant.
/// Returns `(sample index, report)` for every sample with a non-empty
/// report.
pub fn validate_corpus(samples: &[InstructionSample]) -> Vec<(usize, ValidationReport)> {
    let mut seen = std::collections::HashMap::new();
    let mut out = Vec::new();
    for (i, sample) in samples.iter().enumerate() {
        let mut report = validate_sample(sample);
        if let Some(first) = seen.insert(sample.id.clone(), i) {
            report.push(
                ViolationCode::DuplicateId,
                Severity::Error,
                "id".into(),
                format!("id also used by sample at index {first}"),
            );
        }
        if !report.is_empty() {
            out.push((i, report));
        }
    }
    out
}

/// Arguments that are not object-label references: numbers, booleans,
/// bracketed regions, and quoted strings.
fn is_literal_argument(arg: &str) -> bool {
    let a = arg.trim();
    a.is_empty()
        || a.parse::<f64>().is_ok()
        || matches!(a.to_ascii_lowercase().as_str(), "true" | "false" | "yes" | "no")
        || a.starts_with('[')
        || a.starts_with('"')
        || a.starts_with('\'')
        || a.starts_with(|c: char| c.is_ascii_digit())
}
