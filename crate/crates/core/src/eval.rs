//! Ranking evaluation: each gold subsumer is ranked against its negative
//! pool by the mean score of its sentence pairs, then MRR and Hits@K are
//! aggregated over the ranked cases.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::{ClassExpr, ClassExprJson, Iri};
use crate::par::map_ordered;
use crate::sampling::EvalCase;
use crate::scorer::{aggregate_candidate, score_batch, Scorer, ScorerError};
use crate::templates::{Renderer, SentencePair, TemplateError};

pub const DEFAULT_KS: [usize; 3] = [1, 5, 10];

/// Cases rendered and scored together.
const CHUNK_CASES: usize = 256;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("case {case}: {source}")]
    Template { case: usize, source: TemplateError },
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    #[error("case {case}: candidate produced no sentence pairs")]
    NoPairs { case: usize },
}

/// Placement of the gold among candidates with the same score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TieRule {
    /// Gold ranked below every tied negative.
    #[default]
    Pessimistic,
    /// Gold ranked above every tied negative.
    Optimistic,
    /// Gold placed in the middle of its tie group (rounded down).
    Midpoint,
}

impl FromStr for TieRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pessimistic" => Ok(TieRule::Pessimistic),
            "optimistic" => Ok(TieRule::Optimistic),
            "midpoint" => Ok(TieRule::Midpoint),
            other => Err(format!("unknown tie rule {other:?}")),
        }
    }
}

impl fmt::Display for TieRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieRule::Pessimistic => "pessimistic",
            TieRule::Optimistic => "optimistic",
            TieRule::Midpoint => "midpoint",
        })
    }
}

/// 1-based rank of `gold` among `negatives`.
pub fn gold_rank(gold: f64, negatives: &[f64], tie: TieRule) -> usize {
    let greater = negatives.iter().filter(|&&s| s > gold).count();
    let equal = negatives.iter().filter(|&&s| s == gold).count();
    1 + greater
        + match tie {
            TieRule::Pessimistic => equal,
            TieRule::Optimistic => 0,
            TieRule::Midpoint => equal / 2,
        }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub case_index: usize,
    pub child: String,
    pub gold_parent: ClassExprJson,
    pub gold_rank: usize,
    pub pool_size: usize,
    pub gold_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseOutcome {
    Ranked(RankingResult),
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
    pub n_cases: usize,
    pub n_skipped: usize,
}

/// MRR and Hits@K over ranked cases; `n_skipped` is carried through.
pub fn compute_metrics(results: &[RankingResult], ks: &[usize], n_skipped: usize) -> Metrics {
    let n = results.len();
    let (mrr, hits) = if n == 0 {
        (0.0, ks.iter().map(|&k| (k, 0.0)).collect())
    } else {
        let mrr = results.iter().map(|r| 1.0 / r.gold_rank as f64).sum::<f64>() / n as f64;
        let hits =
            ks.iter().map(|&k| (k, results.iter().filter(|r| r.gold_rank <= k).count() as f64 / n as f64)).collect();
        (mrr, hits)
    };
    Metrics { mrr, hits, n_cases: n, n_skipped }
}

/// Candidates of a case, gold first.
fn candidates(case: &EvalCase) -> impl Iterator<Item = &ClassExpr> {
    std::iter::once(&case.gold.parent).chain(case.negatives.iter())
}

fn render_case(index: usize, case: &EvalCase, renderer: &Renderer<'_>) -> Result<Vec<Vec<SentencePair>>, EvalError> {
    candidates(case)
        .map(|cand| {
            let pairs =
                renderer.pairs(&case.gold.child, cand).map_err(|source| EvalError::Template { case: index, source })?;
            if pairs.is_empty() {
                return Err(EvalError::NoPairs { case: index });
            }
            Ok(pairs)
        })
        .collect()
}

fn rank_rendered(index: usize, case: &EvalCase, candidate_scores: &[f64], tie: TieRule) -> RankingResult {
    let (gold, negatives) = candidate_scores.split_first().expect("gold is always scored");
    RankingResult {
        case_index: index,
        child: case.gold.child.to_string(),
        gold_parent: (&case.gold.parent).into(),
        gold_rank: gold_rank(*gold, negatives, tie),
        pool_size: negatives.len(),
        gold_score: *gold,
    }
}

fn score_candidates<S: Scorer + ?Sized>(scorer: &mut S, rendered: &[Vec<SentencePair>]) -> Result<Vec<f64>, EvalError> {
    let flat: Vec<SentencePair> = rendered.iter().flatten().cloned().collect();
    let scores = score_batch(scorer, &flat)?;
    if scores.len() != flat.len() {
        return Err(ScorerError::ProtocolError(format!("{} scores for {} pairs", scores.len(), flat.len())).into());
    }
    let mut out = Vec::with_capacity(rendered.len());
    let mut offset = 0;
    for pairs in rendered {
        let chunk = &scores[offset..offset + pairs.len()];
        offset += pairs.len();
        out.push(aggregate_candidate(chunk).expect("non-empty").value());
    }
    Ok(out)
}

/// Ranks one case. Every candidate (gold and negatives) is rendered with
/// the child, scored, and reduced to its mean pair score.
pub fn rank_case<S: Scorer + ?Sized>(
    index: usize,
    case: &EvalCase,
    renderer: &Renderer<'_>,
    scorer: &mut S,
    tie: TieRule,
) -> Result<CaseOutcome, EvalError> {
    if case.is_skipped() {
        return Ok(CaseOutcome::Skipped);
    }
    let rendered = render_case(index, case, renderer)?;
    let scores = score_candidates(scorer, &rendered)?;
    Ok(CaseOutcome::Ranked(rank_rendered(index, case, &scores, tie)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub metrics: Metrics,
    pub tie_rule: TieRule,
    pub cases: Vec<RankingResult>,
    pub skipped: Vec<usize>,
}

/// Ranks every case. Sentence pairs are rendered in parallel; scoring goes
/// through the single `scorer` in case order, so results do not depend on
/// the worker count.
pub fn evaluate<S: Scorer + ?Sized>(
    cases: &[EvalCase],
    renderer: &Renderer<'_>,
    scorer: &mut S,
    tie: TieRule,
    ks: &[usize],
) -> Result<EvalReport, EvalError> {
    let indexed: Vec<(usize, &EvalCase)> = cases.iter().enumerate().collect();
    let skipped: Vec<usize> = indexed.iter().filter(|(_, c)| c.is_skipped()).map(|(i, _)| *i).collect();
    let active: Vec<(usize, &EvalCase)> = indexed.into_iter().filter(|(_, c)| !c.is_skipped()).collect();
    let mut results = Vec::with_capacity(active.len());
    for chunk in active.chunks(CHUNK_CASES) {
        let rendered: Vec<Result<Vec<Vec<SentencePair>>, EvalError>> =
            map_ordered(chunk, |(i, case)| render_case(*i, case, renderer));
        let rendered = rendered.into_iter().collect::<Result<Vec<_>, _>>()?;
        let flat: Vec<Vec<SentencePair>> = rendered.iter().flatten().cloned().collect();
        let scores = score_candidates(scorer, &flat)?;
        let mut offset = 0;
        for ((i, case), per_candidate) in chunk.iter().zip(&rendered) {
            let n = per_candidate.len();
            results.push(rank_rendered(*i, case, &scores[offset..offset + n], tie));
            offset += n;
        }
    }
    let metrics = compute_metrics(&results, ks, skipped.len());
    Ok(EvalReport { metrics, tie_rule: tie, cases: results, skipped })
}

/// Convenience: the child IRI and candidate list of a case, gold first.
pub fn case_candidates(case: &EvalCase) -> (&Iri, Vec<&ClassExpr>) {
    (&case.gold.child, candidates(case).collect())
}
