//! The nine atomic capabilities and the vision-centric pseudo-functions.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the nine canonical skills an instruction can exercise.
///
/// Five are vision-centric and four are language-centric; no other
/// capability is representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomicCapability {
    // Vision-centric.
    Localization,
    Reference,
    Computation,
    Ocr,
    ExistenceJudgment,
    // Language-centric.
    RelationDescription,
    SceneUnderstanding,
    BehaviorPrediction,
    WorldKnowledgeAssociation,
}

/// Raised when a capability or pseudo-function name cannot be mapped
/// onto one of the nine canonical capabilities.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown capability: {0:?}")]
pub struct UnknownCapability(pub String);

/// All nine capabilities, vision-centric first.
pub const ALL_CAPABILITIES: [AtomicCapability; 9] = [
    AtomicCapability::Localization,
    AtomicCapability::Reference,
    AtomicCapability::Computation,
    AtomicCapability::Ocr,
    AtomicCapability::ExistenceJudgment,
    AtomicCapability::RelationDescription,
    AtomicCapability::SceneUnderstanding,
    AtomicCapability::BehaviorPrediction,
    AtomicCapability::WorldKnowledgeAssociation,
];

impl AtomicCapability {
    /// Canonical kebab-case name used on disk and in prompts.
    pub fn name(self) -> &'static str {
        match self {
            AtomicCapability::Localization => "localization",
            AtomicCapability::Reference => "reference",
            AtomicCapability::Computation => "computation",
            AtomicCapability::Ocr => "OCR",
            AtomicCapability::ExistenceJudgment => "existence-judgment",
            AtomicCapability::RelationDescription => "relation-description",
            AtomicCapability::SceneUnderstanding => "scene-understanding",
            AtomicCapability::BehaviorPrediction => "behavior-prediction",
            AtomicCapability::WorldKnowledgeAssociation => "world-knowledge-association",
        }
    }

    pub fn is_vision_centric(self) -> bool {
        matches!(
            self,
            AtomicCapability::Localization
                | AtomicCapability::Reference
                | AtomicCapability::Computation
                | AtomicCapability::Ocr
                | AtomicCapability::ExistenceJudgment
        )
    }

    pub fn is_language_centric(self) -> bool {
        !self.is_vision_centric()
    }

    /// Pseudo-function name for a vision-centric capability, used in
    /// visual manipulation chains. Language-centric capabilities have
    /// no pseudo-function and return `None`.
    pub fn pseudo_function(self) -> Option<&'static str> {
        match self {
            AtomicCapability::Localization => Some("locate"),
            AtomicCapability::Reference => Some("refer"),
            AtomicCapability::Computation => Some("count"),
            AtomicCapability::Ocr => Some("read_text"),
            AtomicCapability::ExistenceJudgment => Some("exists"),
            _ => None,
        }
    }

    pub fn vision_centric() -> impl Iterator<Item = AtomicCapability> {
        ALL_CAPABILITIES.iter().copied().filter(|c| c.is_vision_centric())
    }

    pub fn language_centric() -> impl Iterator<Item = AtomicCapability> {
        ALL_CAPABILITIES.iter().copied().filter(|c| c.is_language_centric())
    }
}

impl std::fmt::Display for AtomicCapability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AtomicCapability {
    type Err = UnknownCapability;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        canonicalize_capability(s)
    }
}

impl Serialize for AtomicCapability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for AtomicCapability {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        canonicalize_capability(&raw).map_err(D::Error::custom)
    }
}

fn normalize(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut prev_dash = true; // swallow leading separators
    for ch in raw.trim().chars() {
        let c = if ch == '_' || ch.is_whitespace() { '-' } else { ch.to_ascii_lowercase() };
        if c == '-' {
            if !prev_dash {
                out.push('-');
            }
            prev_dash = true;
        } else {
            out.push(c);
            prev_dash = false;
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    out
}

/// Case-insensitive, synonym-tolerant mapping of a raw string onto one
/// of the nine capabilities. Spaces, underscores, and hyphens are
/// interchangeable; anything unmapped is an error.
pub fn canonicalize_capability(raw: &str) -> Result<AtomicCapability, UnknownCapability> {
    use AtomicCapability::*;
    let cap = match normalize(raw).as_str() {
        "localization" | "localisation" | "localize" | "localise" | "locate" => Localization,
        "reference" | "refer" | "referring" => Reference,
        "computation" | "compute" | "count" | "counting" | "calculation" => Computation,
        "ocr" | "optical-character-recognition" | "text-recognition" | "read-text" => Ocr,
        "existence-judgment" | "existence-judgement" | "existence" | "exists"
        | "presence-judgment" => ExistenceJudgment,
        "relation-description" | "relationship-description" | "relation" | "relations" => {
            RelationDescription
        }
        "scene-understanding" | "scene-description" | "scene" => SceneUnderstanding,
        "behavior-prediction" | "behaviour-prediction" | "behavior" | "behaviour" => {
            BehaviorPrediction
        }
        "world-knowledge-association" | "world-knowledge" | "knowledge-association" => {
            WorldKnowledgeAssociation
        }
        _ => return Err(UnknownCapability(raw.to_string())),
    };
    Ok(cap)
}

/// Maps a manipulation-chain function name onto the vision-centric
/// capability it exercises. Accepts the five pseudo-function names as
/// well as capability names themselves (so a chain written with
/// `localization(...)` still resolves).
pub fn function_capability(name: &str) -> Result<AtomicCapability, UnknownCapability> {
    use AtomicCapability::*;
    match normalize(name).as_str() {
        "locate" => return Ok(Localization),
        "refer" => return Ok(Reference),
        "count" => return Ok(Computation),
        "read-text" => return Ok(Ocr),
        "exists" => return Ok(ExistenceJudgment),
        _ => {}
    }
    canonicalize_capability(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_is_five_plus_four() {
        let vision: Vec<_> = AtomicCapability::vision_centric().collect();
        let language: Vec<_> = AtomicCapability::language_centric().collect();
        assert_eq!(vision.len(), 5);
        assert_eq!(language.len(), 4);
        let mut union: Vec<_> = vision.into_iter().chain(language).collect();
        union.sort();
        union.dedup();
        assert_eq!(union.len(), 9);
    }

    #[test]
    fn canonicalize_identity_and_synonyms() {
        assert_eq!(canonicalize_capability("OCR").unwrap(), AtomicCapability::Ocr);
        assert_eq!(
            canonicalize_capability("optical character recognition").unwrap(),
            AtomicCapability::Ocr
        );
        assert_eq!(
            canonicalize_capability("Existence Judgment").unwrap(),
            AtomicCapability::ExistenceJudgment
        );
        assert_eq!(
            canonicalize_capability("world_knowledge_association").unwrap(),
            AtomicCapability::WorldKnowledgeAssociation
        );
    }

    #[test]
    fn grounding_is_not_a_capability() {
        // "grounding" is not among the nine canonical names.
        assert!(ALL_CAPABILITIES.iter().all(|c| c.name() != "grounding"));
        assert_eq!(
            canonicalize_capability("grounding"),
            Err(UnknownCapability("grounding".to_string()))
        );
    }

    #[test]
    fn telepathy_is_rejected() {
        assert!(canonicalize_capability("telepathy").is_err());
    }

    #[test]
    fn every_vision_capability_has_a_pseudo_function() {
        for cap in AtomicCapability::vision_centric() {
            let f = cap.pseudo_function().expect("vision-centric must have a function");
            assert_eq!(function_capability(f).unwrap(), cap);
        }
        for cap in AtomicCapability::language_centric() {
            assert!(cap.pseudo_function().is_none());
        }
    }

    #[test]
    fn capability_names_round_trip_through_canonicalize() {
        for cap in ALL_CAPABILITIES {
            assert_eq!(canonicalize_capability(cap.name()).unwrap(), cap);
        }
    }
}
