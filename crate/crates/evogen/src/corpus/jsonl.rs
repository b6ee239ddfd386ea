//! JSONL corpus files: UTF-8, one sample object per line.
//!
//! Field names are fixed by the schema document in the guide; every
//! record carries `schema_version`. Unknown fields round-trip verbatim,
//! so corpora written by newer tooling survive a pass through this one.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

use super::sample::InstructionSample;

#[derive(Debug, Error)]
pub enum CorpusIoError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {source}")]
    Malformed {
        path: String,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Serializes one sample as a single JSONL line (no trailing newline).
pub fn sample_to_line(sample: &InstructionSample) -> String {
    serde_json::to_string(sample).expect("sample serializes")
}

pub fn sample_from_line(line: &str) -> Result<InstructionSample, serde_json::Error> {
    serde_json::from_str(line)
}

/// Reads a whole corpus file into memory, skipping blank lines.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<InstructionSample>, CorpusIoError> {
    let path = path.as_ref();
    let as_str = path.display().to_string();
    let file = File::open(path).map_err(|source| CorpusIoError::Io { path: as_str.clone(), source })?;
    let reader = BufReader::new(file);
    let mut samples = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| CorpusIoError::Io { path: as_str.clone(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = sample_from_line(&line).map_err(|source| CorpusIoError::Malformed {
            path: as_str.clone(),
            line: idx + 1,
            source,
        })?;
        samples.push(sample);
    }
    Ok(samples)
}

/// Writes a corpus as JSONL, one sample per line, in the given order.
pub fn write_corpus(
    path: impl AsRef<Path>,
    samples: &[InstructionSample],
) -> Result<(), CorpusIoError> {
    let path = path.as_ref();
    let as_str = path.display().to_string();
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|source| CorpusIoError::Io { path: as_str.clone(), source })?;
        }
    }
    let file =
        File::create(path).map_err(|source| CorpusIoError::Io { path: as_str.clone(), source })?;
    let mut writer = BufWriter::new(file);
    for sample in samples {
        writer
            .write_all(sample_to_line(sample).as_bytes())
            .and_then(|_| writer.write_all(b"\n"))
            .map_err(|source| CorpusIoError::Io { path: as_str.clone(), source })?;
    }
    writer.flush().map_err(|source| CorpusIoError::Io { path: as_str, source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::sample::{compute_sample_id, ConversationTurn, Lineage};

    fn sample_with_extras() -> InstructionSample {
        let mut turn = ConversationTurn::new("Q?", "A.");
        turn.extra.insert("upstream_score".into(), serde_json::json!(0.91));
        let turns = vec![turn];
        let mut s = InstructionSample {
            schema_version: 1,
            id: compute_sample_id("x.png", &turns),
            image_ref: "x.png".into(),
            caption: None,
            objects: vec![],
            turns,
            lineage: Lineage::seed(),
            source_tag: "t".into(),
            extra: serde_json::Map::new(),
        };
        s.extra.insert("license".into(), serde_json::json!("CC-BY"));
        s.extra.insert("upstream_ids".into(), serde_json::json!([4, 2]));
        s
    }

    #[test]
    fn unknown_fields_survive_round_trip() {
        let original = sample_with_extras();
        let line = sample_to_line(&original);
        let parsed = sample_from_line(&line).unwrap();
        assert_eq!(parsed, original);
        // And byte-stable on a second pass.
        assert_eq!(sample_to_line(&parsed), line);
    }

    #[test]
    fn file_round_trip_preserves_order_and_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let mut b = sample_with_extras();
        b.image_ref = "y.png".into();
        b.rehash_id();
        let corpus = vec![sample_with_extras(), b];
        write_corpus(&path, &corpus).unwrap();
        let back = read_corpus(&path).unwrap();
        assert_eq!(back, corpus);
    }

    #[test]
    fn malformed_line_reports_its_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"not\": \"a sample\"}\n").unwrap();
        let err = read_corpus(&path).unwrap_err();
        assert!(matches!(err, CorpusIoError::Malformed { line: 1, .. }), "{err}");
    }

    #[test]
    fn missing_schema_version_defaults_to_current() {
        let line = r#"{"id":"abc","image_ref":"x.png","turns":[{"question":"Q?","answer":"A."}]}"#;
        let s = sample_from_line(line).unwrap();
        assert_eq!(s.schema_version, 1);
        assert!(s.lineage.operator.is_seed());
    }
}
