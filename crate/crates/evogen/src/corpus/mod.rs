//! The instruction-sample data model and corpus validation.
//!
//! A corpus is a JSONL file of [`InstructionSample`] records. Each
//! sample grounds a list of conversation turns in one image and
//! annotates them along four domains: the visual objects involved, the
//! atomic capabilities exercised, the visual manipulation chain that
//! solves the question, and the instruction format. Everything here is
//! immutable after construction and safe to share across threads.

mod capability;
mod jsonl;
mod sample;
mod validate;

pub use capability::{
    canonicalize_capability, function_capability, AtomicCapability, UnknownCapability,
    ALL_CAPABILITIES,
};
pub use jsonl::{read_corpus, sample_from_line, sample_to_line, write_corpus, CorpusIoError};
pub use sample::{
    compute_sample_id, fold_label, lineage_append, ConversationTurn, EvolutionOperator,
    InstructionSample, JudgeVerdict, Lineage, LineageError, LineageOperator, ManipulationStep,
    VisualObject, ALL_OPERATORS, SCHEMA_VERSION,
};
pub use validate::{validate_corpus, validate_sample, Severity, ValidationReport, Violation, ViolationCode};
