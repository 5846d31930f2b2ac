//! Corpus building and evaluation with one worker vs the full rayon pool.
//! Without the `parallel` feature both arms run the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ontosub::corpus::{build_corpus, CorpusConfig};
use ontosub::eval::{evaluate, TieRule, DEFAULT_KS};
use ontosub::hierarchy::ClassHierarchy;
use ontosub::par::with_jobs;
use ontosub::sampling::{build_eval_cases, extract_positives, NamedPoolParams, RestrictionPoolParams, SubsumptionKind};
use ontosub::scorer::LexicalScorer;
use ontosub::templates::{Renderer, Side, TemplateConfig, TemplateKind};
use ontosub::verbalizer::{LabelPolicy, PrepositionTable};
use ontosub_testkit::random_ontology;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn arms() -> [(&'static str, Option<usize>); 2] {
    [("sequential", Some(1)), ("parallel", None)]
}

fn bench_corpus(c: &mut Criterion) {
    let o = random_ontology(&mut ChaCha8Rng::seed_from_u64(1), 2000, 0.002, 8, 1500);
    let mut group = c.benchmark_group("build_corpus");
    group.sample_size(10);
    for kind in [TemplateKind::Ic, TemplateKind::Pc, TemplateKind::Bc] {
        let mut cfg = CorpusConfig::new(SubsumptionKind::Named);
        cfg.template.kind = kind;
        for (arm, jobs) in arms() {
            group.bench_with_input(BenchmarkId::new(arm, format!("{kind:?}")), &cfg, |b, cfg| {
                b.iter(|| with_jobs(jobs, || build_corpus(&o, cfg).unwrap().records.len()))
            });
        }
    }
    group.finish();
}

fn bench_evaluate(c: &mut Criterion) {
    let o = random_ontology(&mut ChaCha8Rng::seed_from_u64(2), 1500, 0.003, 6, 800);
    let h = ClassHierarchy::new(&o);
    let golds: Vec<_> = extract_positives(&o, SubsumptionKind::Named).into_iter().take(300).collect();
    let cases: Vec<_> = build_eval_cases(&golds, &h, &NamedPoolParams::default(), &RestrictionPoolParams::default(), 0)
        .into_iter()
        .filter_map(Result::ok)
        .collect();
    let policy = LabelPolicy::single();
    let preps = PrepositionTable::default();
    let config = TemplateConfig { kind: TemplateKind::Pc, ..TemplateConfig::default() };
    let renderer = Renderer::intra(Side { ontology: &o, hierarchy: &h }, &policy, &preps, &config);
    let mut group = c.benchmark_group("evaluate");
    group.sample_size(10);
    for (arm, jobs) in arms() {
        group.bench_function(arm, |b| {
            b.iter(|| {
                with_jobs(jobs, || {
                    evaluate(&cases, &renderer, &mut LexicalScorer::default(), TieRule::Pessimistic, &DEFAULT_KS)
                        .unwrap()
                        .metrics
                        .mrr
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_corpus, bench_evaluate);
criterion_main!(benches);
