//! Ontology ingestion: N-Triples with restriction reconstruction, and the
//! normalized JSON exchange format.

mod json;
mod ntriples;
mod reconstruct;

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use thiserror::Error;

pub use json::{parse_ontology_json, write_ontology_json};
pub use ntriples::{parse_ntriples, Term, Triple, TripleSet};
pub use reconstruct::{reconstruct_ontology, IngestConfig, IngestIssue, IngestReport, Ingested};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed triple at line {line}: {detail}")]
    MalformedTriple { line: u64, detail: String },
    #[error("schema violation at {path}: {detail}")]
    SchemaViolation { path: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Loads an ontology from a `.json` exchange file or an N-Triples file
/// (any other extension).
pub fn load_ontology(path: &Path, config: &IngestConfig) -> Result<Ingested, IoError> {
    let reader = BufReader::new(File::open(path)?);
    if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("json")) {
        Ok(Ingested { ontology: parse_ontology_json(reader)?, report: IngestReport::default() })
    } else {
        let triples = parse_ntriples(reader)?;
        Ok(reconstruct_ontology(&triples, config))
    }
}
