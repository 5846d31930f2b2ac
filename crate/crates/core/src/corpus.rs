//! End-to-end corpus construction: positives, split, masking, negatives
//! and sentence pairs, serialized as JSON lines.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hierarchy::ClassHierarchy;
use crate::model::{ClassExpr, ClassExprJson, Iri, Ontology};
use crate::par::map_ordered;
use crate::rng::derive_rng;
use crate::sampling::{
    extract_positives, negative_for_training, split, SamplingError, SplitSpec, SubsumptionAxiom, SubsumptionKind,
};
use crate::templates::{Renderer, Side, TemplateConfig, TemplateKind};
use crate::verbalizer::{LabelPolicy, PrepositionTable};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error("invalid template configuration: {0}")]
    Template(String),
    #[error("negative ratio must be at least 1")]
    NegRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Valid,
    Test,
}

impl SplitName {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Valid => "valid",
            SplitName::Test => "test",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub sample_id: String,
    pub label: u8,
    pub sentence_a: String,
    pub sentence_b: String,
    pub child_iri: String,
    pub parent_ref: ClassExprJson,
    pub template: TemplateKind,
    pub split: SplitName,
}

#[derive(Serialize)]
struct RecordKey<'a> {
    label: u8,
    sentence_a: &'a str,
    sentence_b: &'a str,
    child_iri: &'a str,
    parent_ref: &'a ClassExprJson,
    template: TemplateKind,
    split: SplitName,
}

impl CorpusRecord {
    pub fn new(
        label: u8,
        sentence_a: String,
        sentence_b: String,
        child: &Iri,
        parent: &ClassExpr,
        template: TemplateKind,
        split: SplitName,
    ) -> Self {
        let mut record = Self {
            sample_id: String::new(),
            label,
            sentence_a,
            sentence_b,
            child_iri: child.to_string(),
            parent_ref: parent.into(),
            template,
            split,
        };
        record.sample_id = record.expected_id();
        record
    }

    /// SHA-256 of the canonical JSON of every other field, hex encoded.
    pub fn expected_id(&self) -> String {
        let key = RecordKey {
            label: self.label,
            sentence_a: &self.sentence_a,
            sentence_b: &self.sentence_b,
            child_iri: &self.child_iri,
            parent_ref: &self.parent_ref,
            template: self.template,
            split: self.split,
        };
        let bytes = serde_json::to_vec(&key).expect("record key serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub kind: SubsumptionKind,
    pub template: TemplateConfig,
    pub policy: LabelPolicy,
    pub split: SplitSpec,
    /// Training negatives drawn per positive.
    pub neg_ratio: usize,
}

impl CorpusConfig {
    pub fn new(kind: SubsumptionKind) -> Self {
        Self {
            kind,
            template: TemplateConfig::default(),
            policy: LabelPolicy::single(),
            split: SplitSpec::default(),
            neg_ratio: 1,
        }
    }
}

/// A subsumption that could not be turned into records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub child: String,
    pub parent: ClassExprJson,
    pub split: SplitName,
    pub negative: bool,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

impl SplitCounts {
    fn bump(&mut self, split: SplitName) {
        match split {
            SplitName::Train => self.train += 1,
            SplitName::Valid => self.valid += 1,
            SplitName::Test => self.test += 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub records: Vec<CorpusRecord>,
    pub failures: Vec<AxiomFailure>,
    /// Positives per split, before rendering.
    pub positives: SplitCounts,
    /// Positives per split that produced at least one record.
    pub rendered: SplitCounts,
}

struct AxiomOutput {
    records: Vec<CorpusRecord>,
    failures: Vec<AxiomFailure>,
    rendered: bool,
}

/// Hierarchy with the edges of `held_out` removed.
pub fn masked_hierarchy(o: &Ontology, held_out: &[&SubsumptionAxiom]) -> ClassHierarchy {
    let mut named = BTreeSet::new();
    let mut restrictions = BTreeSet::new();
    for ax in held_out {
        match &ax.parent {
            ClassExpr::Named(p) => {
                named.insert((ax.child.clone(), p.clone()));
            }
            ClassExpr::Restriction(r) => {
                restrictions.insert((ax.child.clone(), r.clone()));
            }
        }
    }
    ClassHierarchy::new(o).without(&named, &restrictions)
}

/// Builds the corpus. Every split is rendered against the hierarchy with
/// valid and test edges removed. Each positive gets `neg_ratio` negatives,
/// drawn against the full hierarchy so that no true subsumer, held out or
/// not, becomes a negative. Per-axiom failures are collected, not fatal.
pub fn build_corpus(o: &Ontology, cfg: &CorpusConfig) -> Result<Corpus, CorpusError> {
    cfg.template.validate().map_err(CorpusError::Template)?;
    if cfg.neg_ratio == 0 {
        return Err(CorpusError::NegRatio);
    }
    let positives = extract_positives(o, cfg.kind);
    let parts = split(&positives, &cfg.split)?;
    let full = ClassHierarchy::new(o);
    let held_out: Vec<&SubsumptionAxiom> = parts.valid.iter().chain(&parts.test).collect();
    let masked = masked_hierarchy(o, &held_out);

    let preps = PrepositionTable::default();
    let renderer = Renderer::intra(Side { ontology: o, hierarchy: &masked }, &cfg.policy, &preps, &cfg.template);

    let work: Vec<(SplitName, &SubsumptionAxiom)> =
        [(SplitName::Train, &parts.train), (SplitName::Valid, &parts.valid), (SplitName::Test, &parts.test)]
            .into_iter()
            .flat_map(|(name, axioms)| axioms.iter().map(move |ax| (name, ax)))
            .collect();

    let outputs = map_ordered(&work, |(name, ax)| build_axiom(*name, ax, &full, &renderer, cfg));

    let mut corpus = Corpus::default();
    for ((name, _), out) in work.iter().zip(outputs) {
        corpus.positives.bump(*name);
        if out.rendered {
            corpus.rendered.bump(*name);
        }
        corpus.records.extend(out.records);
        corpus.failures.extend(out.failures);
    }
    Ok(corpus)
}

fn build_axiom(
    split_name: SplitName,
    ax: &SubsumptionAxiom,
    full: &ClassHierarchy,
    renderer: &Renderer<'_>,
    cfg: &CorpusConfig,
) -> AxiomOutput {
    let mut out = AxiomOutput { records: Vec::new(), failures: Vec::new(), rendered: false };
    let fail = |parent: &ClassExpr, negative: bool, reason: String| AxiomFailure {
        child: ax.child.to_string(),
        parent: parent.into(),
        split: split_name,
        negative,
        reason,
    };
    let template = cfg.template.kind;
    match renderer.pairs(&ax.child, &ax.parent) {
        Ok(pairs) => {
            out.rendered = true;
            out.records.extend(pairs.into_iter().map(|p| {
                CorpusRecord::new(1, p.sentence_a, p.sentence_b, &ax.child, &ax.parent, template, split_name)
            }));
        }
        Err(err) => {
            out.failures.push(fail(&ax.parent, false, err.to_string()));
            return out;
        }
    }
    let parent_key = ax.parent.key();
    for i in 0..cfg.neg_ratio {
        let index = i.to_string();
        let mut rng = derive_rng(cfg.split.seed, &["negative", ax.child.as_str(), &parent_key, &index]);
        let neg = match negative_for_training(ax, full, &mut rng) {
            Ok(neg) => neg,
            Err(err) => {
                out.failures.push(fail(&ax.parent, true, err.to_string()));
                break;
            }
        };
        match renderer.pairs(&neg.child, &neg.parent) {
            Ok(pairs) => out.records.extend(pairs.into_iter().map(|p| {
                CorpusRecord::new(0, p.sentence_a, p.sentence_b, &neg.child, &neg.parent, template, split_name)
            })),
            Err(err) => out.failures.push(fail(&neg.parent, true, err.to_string())),
        }
    }
    out
}

pub fn write_corpus_jsonl<W: Write>(mut writer: W, records: &[CorpusRecord]) -> std::io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut writer, record)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn read_corpus_jsonl<R: BufRead>(reader: R) -> Result<Vec<CorpusRecord>, SamplingError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| SamplingError::Format { line: i + 1, detail: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let record =
            serde_json::from_str(&line).map_err(|e| SamplingError::Format { line: i + 1, detail: e.to_string() })?;
        out.push(record);
    }
    Ok(out)
}

/// Ontology size figures: named classes, distinct restrictions of the form
/// ∃r.C with a named filler, named subsumptions, and subsumptions whose
/// parent is such a restriction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub named_classes: usize,
    pub existential_restrictions: usize,
    pub named_subsumptions: usize,
    pub existential_subsumptions: usize,
}

pub fn corpus_stats(o: &Ontology) -> CorpusStats {
    CorpusStats {
        named_classes: o.classes.len(),
        existential_restrictions: o.restriction_inventory().iter().filter(|r| r.is_simple()).count(),
        named_subsumptions: o.named_subsumptions.len(),
        existential_subsumptions: o.restriction_axioms.iter().filter(|(_, r)| r.is_simple()).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RestrictionExpr;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://x/{s}"))
    }

    fn chain(n: usize) -> Ontology {
        let mut o = Ontology::default();
        for i in 0..n {
            o.classes.insert(iri(&format!("C{i:02}")));
            o.add_label(iri(&format!("C{i:02}")), Iri::new(crate::model::RDFS_LABEL), format!("class {i}"));
        }
        for i in 1..n {
            o.named_subsumptions.insert((iri(&format!("C{i:02}")), iri(&format!("C{:02}", i - 1))));
        }
        o
    }

    #[test]
    fn empty_ontology_has_zero_stats() {
        assert_eq!(corpus_stats(&Ontology::default()), CorpusStats::default());
    }

    #[test]
    fn stats_count_only_simple_restrictions() {
        let mut o = chain(3);
        let p = iri("p");
        o.properties.insert(p.clone());
        let simple = RestrictionExpr::named(p.clone(), iri("C00"));
        let conj = RestrictionExpr::from_parts(p, "and", vec![iri("C00"), iri("C01")]).unwrap();
        o.restriction_axioms.insert((iri("C02"), simple.clone()));
        o.restriction_axioms.insert((iri("C01"), simple));
        o.restriction_axioms.insert((iri("C02"), conj));
        let s = corpus_stats(&o);
        assert_eq!(
            s,
            CorpusStats {
                named_classes: 3,
                existential_restrictions: 1,
                named_subsumptions: 2,
                existential_subsumptions: 2,
            }
        );
    }

    #[test]
    fn sample_id_tracks_fields() {
        let c = iri("a");
        let p = ClassExpr::Named(iri("b"));
        let r = CorpusRecord::new(1, "x".into(), "y".into(), &c, &p, TemplateKind::Ic, SplitName::Train);
        assert_eq!(r.sample_id, r.expected_id());
        assert_eq!(r.sample_id.len(), 64);
        let mut other = r.clone();
        other.label = 0;
        assert_ne!(other.expected_id(), r.sample_id);
    }

    #[test]
    fn one_negative_per_train_positive() {
        let o = chain(40);
        let corpus = build_corpus(&o, &CorpusConfig::new(SubsumptionKind::Named)).unwrap();
        let empty_train = corpus
            .failures
            .iter()
            .filter(|f| f.split == SplitName::Train && f.reason.starts_with("no negative"))
            .count();
        assert_eq!(empty_train, corpus.failures.iter().filter(|f| f.split == SplitName::Train).count());
        let pos = corpus.records.iter().filter(|r| r.split == SplitName::Train && r.label == 1).count();
        let neg = corpus.records.iter().filter(|r| r.split == SplitName::Train && r.label == 0).count();
        assert_eq!(pos, corpus.rendered.train);
        assert_eq!(neg, pos - empty_train);
        assert_eq!(corpus.positives, SplitCounts { train: 33, valid: 1, test: 5 });
    }

    #[test]
    fn held_out_axioms_never_leak_into_train() {
        let o = chain(40);
        let corpus = build_corpus(&o, &CorpusConfig::new(SubsumptionKind::Named)).unwrap();
        let held: BTreeSet<(&str, &ClassExprJson)> = corpus
            .records
            .iter()
            .filter(|r| r.split != SplitName::Train && r.label == 1)
            .map(|r| (r.child_iri.as_str(), &r.parent_ref))
            .collect();
        assert!(!held.is_empty());
        assert!(corpus
            .records
            .iter()
            .filter(|r| r.split == SplitName::Train)
            .all(|r| !held.contains(&(r.child_iri.as_str(), &r.parent_ref))));
    }

    #[test]
    fn roundtrip_jsonl() {
        let o = chain(10);
        let corpus = build_corpus(&o, &CorpusConfig::new(SubsumptionKind::Named)).unwrap();
        let mut buf = Vec::new();
        write_corpus_jsonl(&mut buf, &corpus.records).unwrap();
        assert_eq!(read_corpus_jsonl(buf.as_slice()).unwrap(), corpus.records);
    }
}
