//! The image-text instruction sample and its component records.
//!
//! One sample couples an image reference with conversation turns and
//! the four annotation domains (visual objects, atomic capabilities,
//! manipulation chains, instruction formats), plus lineage tracking
//! across evolution rounds. All types are immutable in practice:
//! operations build new samples rather than mutating in place.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::capability::{canonicalize_capability, AtomicCapability, UnknownCapability};

/// On-disk corpus schema version written to every record.
pub const SCHEMA_VERSION: u32 = 1;

/// A visual object mentioned by a sample: a free-text noun phrase plus
/// an optional normalized bounding box `[x1, y1, x2, y2]`, each in [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualObject {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<[f64; 4]>,
}

impl VisualObject {
    pub fn new(label: impl Into<String>) -> Self {
        Self { label: label.into(), bbox: None }
    }

    pub fn with_bbox(label: impl Into<String>, bbox: [f64; 4]) -> Self {
        Self { label: label.into(), bbox: Some(bbox) }
    }
}

/// One step of a visual manipulation chain: a vision-centric
/// pseudo-function call with its arguments and a one-line rationale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulationStep {
    pub function: String,
    #[serde(default)]
    pub arguments: Vec<String>,
    #[serde(default)]
    pub rationale: String,
}

impl ManipulationStep {
    pub fn new<S: Into<String>>(function: S, arguments: Vec<String>, rationale: S) -> Self {
        Self { function: function.into(), arguments, rationale: rationale.into() }
    }

    /// The vision-centric capability this step exercises, resolved from
    /// the function name.
    pub fn capability(&self) -> Result<AtomicCapability, UnknownCapability> {
        super::capability::function_capability(&self.function)
    }
}

/// One question/answer exchange with its annotation domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationTurn {
    pub question: String,
    pub answer: String,
    /// Capability names; canonical on well-formed records, validated by
    /// [`validate_sample`](super::validate::validate_sample).
    #[serde(default)]
    pub capabilities: Vec<String>,
    #[serde(default)]
    pub manipulation_chain: Vec<ManipulationStep>,
    #[serde(default)]
    pub format_tag: String,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ConversationTurn {
    pub fn new(question: impl Into<String>, answer: impl Into<String>) -> Self {
        Self {
            question: question.into(),
            answer: answer.into(),
            capabilities: Vec::new(),
            manipulation_chain: Vec::new(),
            format_tag: String::new(),
            extra: serde_json::Map::new(),
        }
    }

    /// The turn's capabilities as a typed set. Unknown names are
    /// silently dropped here; validation reports them.
    pub fn capability_set(&self) -> std::collections::BTreeSet<AtomicCapability> {
        self.capabilities.iter().filter_map(|s| canonicalize_capability(s).ok()).collect()
    }
}

/// The three evolution operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvolutionOperator {
    /// Fine-grained perception: questions about new, overlooked visual objects.
    #[serde(rename = "FP")]
    FinePerception,
    /// Cognitive reasoning: longer visual manipulation chains.
    #[serde(rename = "CR")]
    CognitiveReasoning,
    /// Interaction: diverse instruction/task forms.
    #[serde(rename = "IA")]
    Interaction,
}

pub const ALL_OPERATORS: [EvolutionOperator; 3] = [
    EvolutionOperator::FinePerception,
    EvolutionOperator::CognitiveReasoning,
    EvolutionOperator::Interaction,
];

impl EvolutionOperator {
    pub fn code(self) -> &'static str {
        match self {
            EvolutionOperator::FinePerception => "FP",
            EvolutionOperator::CognitiveReasoning => "CR",
            EvolutionOperator::Interaction => "IA",
        }
    }
}

impl std::fmt::Display for EvolutionOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for EvolutionOperator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "FP" => Ok(EvolutionOperator::FinePerception),
            "CR" => Ok(EvolutionOperator::CognitiveReasoning),
            "IA" => Ok(EvolutionOperator::Interaction),
            other => Err(format!("unknown operator {other:?} (expected FP, CR, or IA)")),
        }
    }
}

/// Where a sample came from: the seed corpus, or one of the operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LineageOperator {
    #[serde(rename = "seed")]
    Seed,
    #[serde(untagged)]
    Evolved(EvolutionOperator),
}

impl LineageOperator {
    pub fn is_seed(self) -> bool {
        matches!(self, LineageOperator::Seed)
    }
}

/// Elimination output for one (parent, candidate) pair: the signed
/// evolutionary gain, an ordinal complexity level, and any per-dimension
/// scores the judge reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub gain: f64,
    pub complexity_level: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dimension_scores: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub raw_text: String,
}

impl JudgeVerdict {
    pub fn new(gain: f64, complexity_level: u32) -> Self {
        Self { gain, complexity_level, dimension_scores: BTreeMap::new(), raw_text: String::new() }
    }
}

/// Provenance of a sample across evolution rounds.
///
/// Invariants (checked by validation): `round == 0` iff the operator is
/// `seed`, and `parent_id` is present iff `round > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lineage {
    pub round: u32,
    pub operator: LineageOperator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<JudgeVerdict>,
}

impl Lineage {
    pub fn seed() -> Self {
        Self { round: 0, operator: LineageOperator::Seed, parent_id: None, verdict: None }
    }
}

/// One image-grounded instruction sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionSample {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub id: String,
    pub image_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caption: Option<String>,
    #[serde(default)]
    pub objects: Vec<VisualObject>,
    pub turns: Vec<ConversationTurn>,
    #[serde(default = "Lineage::seed")]
    pub lineage: Lineage,
    #[serde(default)]
    pub source_tag: String,
    /// Unknown upstream fields, preserved verbatim on round-trip.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LineageError {
    #[error("invalid round {child} for parent at round {parent} (must be parent round + 1)")]
    InvalidRound { parent: u32, child: u32 },
}

impl InstructionSample {
    /// Object labels declared by this sample, trimmed and case-folded
    /// for grounding comparisons.
    pub fn folded_object_labels(&self) -> std::collections::BTreeSet<String> {
        self.objects.iter().map(|o| fold_label(&o.label)).collect()
    }

    /// Recomputes and installs the content-hash id from the current
    /// image_ref and turns.
    pub fn rehash_id(&mut self) {
        self.id = compute_sample_id(&self.image_ref, &self.turns);
    }
}

/// Case-folded, whitespace-trimmed form of an object label, used for
/// grounding checks and long-tail counting.
pub fn fold_label(label: &str) -> String {
    label.trim().to_lowercase()
}

/// Deterministic sample id: a content hash of the image reference and
/// the serialized turns. Identical content gets an identical id, which
/// makes the id the dedup key.
pub fn compute_sample_id(image_ref: &str, turns: &[ConversationTurn]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(image_ref.as_bytes());
    hasher.update([0u8]);
    // serde_json serialization of turns is deterministic: struct fields
    // in declaration order, extras in insertion order.
    let turns_json = serde_json::to_vec(turns).expect("turns serialize");
    hasher.update(&turns_json);
    hex::encode(&hasher.finalize()[..16])
}

/// Builds the evolved child of `parent`: same content as `child_body`,
/// lineage advanced by one round under `operator`. The parent is
/// untouched; the child id is regenerated from its content.
pub fn lineage_append(
    parent: &InstructionSample,
    round: u32,
    operator: EvolutionOperator,
    mut child_body: InstructionSample,
    verdict: Option<JudgeVerdict>,
) -> Result<InstructionSample, LineageError> {
    if round != parent.lineage.round + 1 {
        return Err(LineageError::InvalidRound { parent: parent.lineage.round, child: round });
    }
    child_body.lineage = Lineage {
        round,
        operator: LineageOperator::Evolved(operator),
        parent_id: Some(parent.id.clone()),
        verdict,
    };
    child_body.rehash_id();
    Ok(child_body)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed_sample() -> InstructionSample {
        let turns = vec![ConversationTurn::new("Describe the image.", "A bus.")];
        InstructionSample {
            schema_version: SCHEMA_VERSION,
            id: compute_sample_id("img/1.jpg", &turns),
            image_ref: "img/1.jpg".into(),
            caption: Some("a red bus".into()),
            objects: vec![VisualObject::new("bus")],
            turns,
            lineage: Lineage::seed(),
            source_tag: "test".into(),
            extra: serde_json::Map::new(),
        }
    }

    #[test]
    fn lineage_append_advances_one_round() {
        let seed = seed_sample();
        let child = lineage_append(
            &seed,
            1,
            EvolutionOperator::FinePerception,
            seed.clone(),
            None,
        )
        .unwrap();
        assert_eq!(child.lineage.round, 1);
        assert_eq!(
            child.lineage.operator,
            LineageOperator::Evolved(EvolutionOperator::FinePerception)
        );
        assert_eq!(child.lineage.parent_id.as_deref(), Some(seed.id.as_str()));
        // Parent untouched.
        assert_eq!(seed.lineage.round, 0);

        let grandchild =
            lineage_append(&child, 2, EvolutionOperator::CognitiveReasoning, child.clone(), None)
                .unwrap();
        assert_eq!(grandchild.lineage.round, 2);
    }

    #[test]
    fn lineage_append_rejects_round_skip() {
        let seed = seed_sample();
        let err = lineage_append(&seed, 2, EvolutionOperator::Interaction, seed.clone(), None)
            .unwrap_err();
        assert_eq!(err, LineageError::InvalidRound { parent: 0, child: 2 });
    }

    #[test]
    fn sample_id_is_content_addressed() {
        let a = seed_sample();
        let mut b = seed_sample();
        assert_eq!(a.id, b.id);
        b.turns[0].answer = "A blue bus.".into();
        b.rehash_id();
        assert_ne!(a.id, b.id);
    }

    #[test]
    fn operator_serde_uses_codes() {
        let json = serde_json::to_string(&EvolutionOperator::FinePerception).unwrap();
        assert_eq!(json, "\"FP\"");
        let op: EvolutionOperator = serde_json::from_str("\"CR\"").unwrap();
        assert_eq!(op, EvolutionOperator::CognitiveReasoning);
    }

    #[test]
    fn lineage_operator_serde() {
        let seed = serde_json::to_string(&LineageOperator::Seed).unwrap();
        assert_eq!(seed, "\"seed\"");
        let parsed: LineageOperator = serde_json::from_str("\"IA\"").unwrap();
        assert_eq!(parsed, LineageOperator::Evolved(EvolutionOperator::Interaction));
        let parsed: LineageOperator = serde_json::from_str("\"seed\"").unwrap();
        assert!(parsed.is_seed());
    }
}
