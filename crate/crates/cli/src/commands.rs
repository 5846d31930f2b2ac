use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;
use std::time::Duration;

use ontosub::corpus::{build_corpus, corpus_stats, masked_hierarchy, write_corpus_jsonl, CorpusConfig};
use ontosub::eval::{evaluate, TieRule, DEFAULT_KS};
use ontosub::hierarchy::ClassHierarchy;
use ontosub::io::{load_ontology, write_ontology_json, IngestConfig, Ingested};
use ontosub::model::{Iri, Ontology, OBO_HAS_EXACT_SYNONYM, OBO_HAS_SYNONYM, RDFS_LABEL};
use ontosub::par::map_ordered;
use ontosub::rng::derive_rng;
use ontosub::sampling::{
    build_eval_cases, derive_inter_subsumptions, eval_pool_inter, extract_positives, read_eval_cases,
    read_mappings_tsv, split, split_inter, write_eval_cases, EvalCase, InterAxiom, InterIssue, NamedPoolParams,
    RestrictionPoolParams, SplitSpec, SubsumptionAxiom, SubsumptionKind,
};
use ontosub::scorer::{serve, Endpoint, LexicalScorer, ScorerKind, ScorerSpec};
use ontosub::templates::{Renderer, Side, TemplateConfig, TemplateKind};
use ontosub::verbalizer::{class_labels, verbalize_restriction, LabelMode, LabelPolicy, PrepositionTable};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::failure::Failure;
use crate::output::{write_json_pretty, write_with, ManifestWriter};

const PREFIXES: [(&str, &str); 5] = [
    ("rdfs:", "http://www.w3.org/2000/01/rdf-schema#"),
    ("owl:", "http://www.w3.org/2002/07/owl#"),
    ("skos:", "http://www.w3.org/2004/02/skos/core#"),
    ("oboInOwl:", "http://www.geneontology.org/formats/oboInOwl#"),
    ("obo:", "http://purl.obolibrary.org/obo/"),
];

/// Full IRI, or one of a few common prefixed names.
fn expand_iri(s: &str) -> Result<Iri, Failure> {
    let s = s.trim().trim_start_matches('<').trim_end_matches('>');
    let full = PREFIXES
        .iter()
        .find_map(|(prefix, ns)| s.strip_prefix(prefix).map(|rest| format!("{ns}{rest}")))
        .unwrap_or_else(|| s.to_string());
    Iri::try_new(full).ok_or_else(|| Failure::input("invalid_argument", "empty IRI"))
}

fn label_policy(args: &LabelArgs) -> Result<LabelPolicy, Failure> {
    let mode = match args.labels {
        Labels::Single => LabelMode::Single,
        Labels::Multi => LabelMode::Multi,
    };
    if args.label_properties.is_empty() {
        return Ok(match mode {
            LabelMode::Single => LabelPolicy::single(),
            LabelMode::Multi => LabelPolicy::multi(),
        });
    }
    let props = args.label_properties.iter().map(|p| expand_iri(p)).collect::<Result<Vec<_>, _>>()?;
    LabelPolicy::with_properties(mode, props)
        .ok_or_else(|| Failure::input("invalid_argument", "no label properties given"))
}

fn ingest_config(args: &IngestArgs, policy: Option<&LabelPolicy>) -> IngestConfig {
    let mut label_properties = vec![Iri::new(RDFS_LABEL), Iri::new(OBO_HAS_EXACT_SYNONYM), Iri::new(OBO_HAS_SYNONYM)];
    if let Some(policy) = policy {
        for p in &policy.annotation_properties {
            if !label_properties.contains(p) {
                label_properties.push(p.clone());
            }
        }
    }
    let language = if args.all_languages { None } else { Some(args.lang.clone()) };
    IngestConfig { label_properties, language }
}

fn ingest(path: &Path, config: &IngestConfig) -> Result<Ingested, Failure> {
    load_ontology(path, config).map_err(|err| {
        let mut failure = Failure::from(err);
        failure.message = format!("{}: {}", path.display(), failure.message);
        failure
    })
}

fn load(path: &Path, config: &IngestConfig) -> Result<Ontology, Failure> {
    let ingested = ingest(path, config)?;
    let report = &ingested.report;
    if !report.issues.is_empty() {
        log::warn!(
            "{}: skipped {} dangling and {} unsupported restrictions",
            path.display(),
            report.dangling(),
            report.unsupported()
        );
    }
    Ok(ingested.ontology)
}

fn template_config(args: &TemplateArgs, seed: u64) -> Result<TemplateConfig, Failure> {
    let config = TemplateConfig {
        kind: match args.template {
            Template::Ic => TemplateKind::Ic,
            Template::Pc => TemplateKind::Pc,
            Template::Bc => TemplateKind::Bc,
        },
        depth: args.depth,
        width: args.width,
        traversals: args.traversals,
        sep_token: args.sep_token.clone(),
        max_pairs: args.max_pairs,
        seed,
    };
    config.validate().map_err(|e| Failure::input("invalid_argument", e))?;
    Ok(config)
}

fn task_kind(task: Task) -> SubsumptionKind {
    match task {
        Task::IntraNamed => SubsumptionKind::Named,
        Task::IntraExistential => SubsumptionKind::Existential,
    }
}

fn print_json(value: &serde_json::Value) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, value)
        .map_err(io::Error::from)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| Failure::internal("io", e))
}

pub fn stats(args: &StatsArgs) -> Result<(), Failure> {
    let ingested = ingest(&args.ontology, &ingest_config(&args.ingest, None))?;
    let stats = corpus_stats(&ingested.ontology);
    print_json(&json!({
        "named_classes": stats.named_classes,
        "existential_restrictions": stats.existential_restrictions,
        "named_subsumptions": stats.named_subsumptions,
        "existential_subsumptions": stats.existential_subsumptions,
        "skipped_restrictions": {
            "dangling": ingested.report.dangling(),
            "unsupported": ingested.report.unsupported(),
        },
    }))
}

pub fn build_corpus_cmd(args: &BuildCorpusArgs, jobs: Option<usize>) -> Result<(), Failure> {
    let policy = label_policy(&args.labels)?;
    let ontology = load(&args.ontology, &ingest_config(&args.ingest, Some(&policy)))?;
    let config = CorpusConfig {
        kind: task_kind(args.task),
        template: template_config(&args.template, args.seed)?,
        policy,
        split: SplitSpec { seed: args.seed, ..SplitSpec::default() },
        neg_ratio: args.neg_ratio,
    };
    let corpus = build_corpus(&ontology, &config)?;
    write_with(&args.out, |w| write_corpus_jsonl(w, &corpus.records))?;
    let mut outputs = vec![args.out.as_path()];
    if let Some(path) = &args.failures {
        write_with(path, |w| {
            for failure in &corpus.failures {
                serde_json::to_writer(&mut *w, failure)?;
                w.write_all(b"\n")?;
            }
            Ok(())
        })?;
        outputs.push(path);
    }
    ManifestWriter { command: "build-corpus", options: args, jobs }.write(&[&args.ontology], &outputs, &args.out)?;
    for f in corpus.failures.iter().take(5) {
        log::warn!("{} -> {:?}: {}", f.child, f.parent, f.reason);
    }
    let positives = corpus.records.iter().filter(|r| r.label == 1).count();
    print_json(&json!({
        "records": corpus.records.len(),
        "positive_records": positives,
        "negative_records": corpus.records.len() - positives,
        "axioms": corpus.positives,
        "rendered_axioms": corpus.rendered,
        "failures": corpus.failures.len(),
    }))
}

#[derive(Serialize)]
struct CaseSummary {
    cases: usize,
    skipped: usize,
    mean_pool_size: f64,
}

fn summarize(cases: &[EvalCase]) -> CaseSummary {
    let ranked: Vec<&EvalCase> = cases.iter().filter(|c| !c.is_skipped()).collect();
    let mean_pool_size = if ranked.is_empty() {
        0.0
    } else {
        ranked.iter().map(|c| c.negatives.len()).sum::<usize>() as f64 / ranked.len() as f64
    };
    CaseSummary { cases: cases.len(), skipped: cases.len() - ranked.len(), mean_pool_size }
}

fn write_cases(path: &Path, cases: &[EvalCase]) -> Result<(), Failure> {
    write_with(path, |w| write_eval_cases(w, cases))
}

pub fn build_eval_cmd(args: &BuildEvalArgs, jobs: Option<usize>) -> Result<(), Failure> {
    let ontology = load(&args.ontology, &ingest_config(&args.ingest, None))?;
    let positives = extract_positives(&ontology, task_kind(args.task));
    let parts = split(&positives, &SplitSpec { seed: args.seed, ..SplitSpec::default() })?;
    let hierarchy = ClassHierarchy::new(&ontology);
    let named = NamedPoolParams { max_seeds: args.max_seeds, hops: args.hops, cap: args.cap };
    let restriction = RestrictionPoolParams { related: args.n1, other: args.n2 };
    let cases = |golds: &[SubsumptionAxiom]| -> Result<Vec<EvalCase>, Failure> {
        build_eval_cases(golds, &hierarchy, &named, &restriction, args.seed)
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::from)
    };
    let test = cases(&parts.test)?;
    write_cases(&args.out, &test)?;
    let mut outputs = vec![args.out.as_path()];
    let mut summary = json!({ "test": summarize(&test) });
    if let Some(path) = &args.valid_out {
        let valid = cases(&parts.valid)?;
        write_cases(path, &valid)?;
        outputs.push(path);
        summary["valid"] = json!(summarize(&valid));
    }
    ManifestWriter { command: "build-eval", options: args, jobs }.write(&[&args.ontology], &outputs, &args.out)?;
    print_json(&summary)
}

pub fn build_eval_inter_cmd(args: &BuildEvalInterArgs, jobs: Option<usize>) -> Result<(), Failure> {
    let ingest = ingest_config(&args.ingest, None);
    let ontology_a = load(&args.ontology_a, &ingest)?;
    let ontology_b = load(&args.ontology_b, &ingest)?;
    let file =
        File::open(&args.mappings).map_err(|e| Failure::input("io", format!("{}: {e}", args.mappings.display())))?;
    let all_mappings = read_mappings_tsv(BufReader::new(file))?;
    let (mappings, unknown_a): (Vec<_>, Vec<_>) =
        all_mappings.into_iter().partition(|(a, _)| ontology_a.classes.contains(a));
    for (a, _) in &unknown_a {
        log::warn!("mapping source {a} not found in ontology A");
    }
    let derivation = derive_inter_subsumptions(&mappings, &ontology_b);
    let (valid, test) = split_inter(&derivation.axioms, args.seed);
    let original = ClassHierarchy::new(&ontology_b);
    let pruned = ClassHierarchy::new(&derivation.pruned);
    let params = NamedPoolParams { max_seeds: args.max_seeds, hops: args.hops, cap: args.cap };
    let cases = |axioms: &[InterAxiom]| -> Result<Vec<EvalCase>, Failure> {
        map_ordered(axioms, |inter| {
            let parent = inter.axiom.parent.key();
            let mut rng = derive_rng(args.seed, &["eval-pool-inter", inter.axiom.child.as_str(), &parent]);
            eval_pool_inter(inter, &original, &pruned, &params, &mut rng)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::from)
    };
    let test_cases = cases(&test)?;
    write_cases(&args.out, &test_cases)?;
    let mut outputs = vec![args.out.as_path()];
    let mut summary = json!({ "test": summarize(&test_cases) });
    if let Some(path) = &args.valid_out {
        let valid_cases = cases(&valid)?;
        write_cases(path, &valid_cases)?;
        outputs.push(path);
        summary["valid"] = json!(summarize(&valid_cases));
    }
    if let Some(path) = &args.pruned_b_out {
        write_with(path, |w| write_ontology_json(&derivation.pruned, w).map_err(io::Error::other))?;
        outputs.push(path);
    }
    let parent_deleted = derivation.issues.iter().filter(|i| matches!(i, InterIssue::ParentDeleted { .. })).count();
    summary["mappings"] = json!({
        "used": mappings.len(),
        "unknown_in_a": unknown_a.len(),
        "unknown_in_b": derivation.issues.len() - parent_deleted,
        "parents_deleted": parent_deleted,
    });
    ManifestWriter { command: "build-eval-inter", options: args, jobs }.write(
        &[&args.ontology_a, &args.ontology_b, &args.mappings],
        &outputs,
        &args.out,
    )?;
    print_json(&summary)
}

fn scorer_spec(args: &EvaluateArgs) -> Result<ScorerSpec, Failure> {
    let kind = match args.scorer.as_str() {
        "lexical" => ScorerKind::Lexical,
        s if s == "external" || s.starts_with("external:") => {
            let explicit = s.strip_prefix("external:").filter(|e| !e.is_empty());
            let endpoint = args.scorer_endpoint.as_deref().or(explicit).ok_or_else(|| {
                Failure::input("invalid_argument", format!("external scorer needs an endpoint (or {SCORER_ENV})"))
            })?;
            ScorerKind::External(Endpoint::parse(endpoint).map_err(|e| Failure::input("invalid_argument", e))?)
        }
        other => {
            return Err(Failure::input(
                "invalid_argument",
                format!("unknown scorer {other:?} (expected lexical or external:<endpoint>)"),
            ))
        }
    };
    if args.batch_size == 0 {
        return Err(Failure::input("invalid_argument", "batch size must be at least 1"));
    }
    Ok(ScorerSpec { kind, batch_size: args.batch_size, timeout: Duration::from_secs(args.timeout.max(1)) })
}

pub fn evaluate_cmd(args: &EvaluateArgs, jobs: Option<usize>) -> Result<(), Failure> {
    let policy = label_policy(&args.labels)?;
    let ingest = ingest_config(&args.ingest, Some(&policy));
    let ontology_a = load(&args.ontology, &ingest)?;
    let ontology_b = args.ontology_b.as_deref().map(|p| load(p, &ingest)).transpose()?;
    let file = File::open(&args.eval).map_err(|e| Failure::input("io", format!("{}: {e}", args.eval.display())))?;
    let cases = read_eval_cases(BufReader::new(file))?;
    let config = template_config(&args.template, args.seed)?;
    let spec = scorer_spec(args)?;
    let preps = PrepositionTable::default();

    // Intra cases: the gold edges are hidden from the traversal hierarchy.
    let golds: Vec<&SubsumptionAxiom> = cases.iter().map(|c| &c.gold).collect();
    let hierarchy_a = match &ontology_b {
        None => masked_hierarchy(&ontology_a, &golds),
        Some(_) => ClassHierarchy::new(&ontology_a),
    };
    let hierarchy_b = ontology_b.as_ref().map(ClassHierarchy::new);
    let child_side = Side { ontology: &ontology_a, hierarchy: &hierarchy_a };
    let parent_side = match (&ontology_b, &hierarchy_b) {
        (Some(o), Some(h)) => Side { ontology: o, hierarchy: h },
        _ => child_side,
    };
    let renderer = Renderer { child_side, parent_side, policy: &policy, preps: &preps, config: &config };
    let tie = match args.tie {
        Tie::Pessimistic => TieRule::Pessimistic,
        Tie::Optimistic => TieRule::Optimistic,
        Tie::Midpoint => TieRule::Midpoint,
    };
    let mut scorer = spec.connect(&config.sep_token)?;
    let report = evaluate(&cases, &renderer, scorer.as_mut(), tie, &DEFAULT_KS)?;
    drop(scorer);
    write_json_pretty(&args.report, &report)?;
    let mut inputs = vec![args.eval.as_path(), args.ontology.as_path()];
    if let Some(b) = &args.ontology_b {
        inputs.push(b);
    }
    ManifestWriter { command: "evaluate", options: args, jobs }.write(&inputs, &[&args.report], &args.report)?;
    print_json(&json!(report.metrics))
}

pub fn verbalize_cmd(args: &VerbalizeArgs) -> Result<(), Failure> {
    let policy = label_policy(&args.labels)?;
    let ontology = load(&args.ontology, &ingest_config(&args.ingest, Some(&policy)))?;
    let preps = PrepositionTable::default();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut lines = Vec::new();
    if let Some(class) = &args.class {
        let iri = expand_iri(class)?;
        if !ontology.classes.contains(&iri) && !ontology.properties.contains(&iri) {
            return Err(Failure::input("unknown_class", format!("{iri} is not declared")));
        }
        lines.extend(class_labels(&ontology, &iri, &policy)?);
    }
    if let Some(child) = &args.restriction {
        let iri = expand_iri(child)?;
        if !ontology.classes.contains(&iri) {
            return Err(Failure::input("unknown_class", format!("{iri} is not declared")));
        }
        let restrictions: BTreeSet<_> =
            ontology.restriction_axioms.iter().filter(|(c, _)| *c == iri).map(|(_, r)| r).collect();
        for r in restrictions {
            for sentence in verbalize_restriction(&ontology, r, &policy, &preps)? {
                lines.push(format!("{r}\t{sentence}"));
            }
        }
    }
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Failure::internal("io", e))?;
    }
    Ok(())
}

pub fn serve_lexical(args: &ServeLexicalArgs) -> Result<(), Failure> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut scorer = LexicalScorer::new(&args.sep_token);
    serve(stdin.lock(), stdout.lock(), &mut scorer)?;
    Ok(())
}
