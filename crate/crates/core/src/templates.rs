//! Class-to-sentence templates.
//!
//! * IC: the labels of the two classes alone.
//! * PC: depth-first paths, downward from the child and upward from the
//!   parent, rendered as `label [SEP] label ...`.
//! * BC: breadth-first sequences that interleave each discovered context
//!   subsumption `(sub, super)` after the anchor class.
//!
//! A restriction on either side is never expanded; its context is itself.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::{ClassHierarchy, Direction, HierarchyError};
use crate::model::{ClassExpr, Iri, Ontology};
use crate::rng::{derive_rng, sample_sorted};
use crate::verbalizer::{expr_labels, LabelMode, LabelPolicy, PrepositionTable, VerbalizeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error(transparent)]
    NoLabel(#[from] VerbalizeError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Ic,
    Pc,
    Bc,
}

impl TemplateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TemplateKind::Ic => "ic",
            TemplateKind::Pc => "pc",
            TemplateKind::Bc => "bc",
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ic" => Ok(TemplateKind::Ic),
            "pc" => Ok(TemplateKind::Pc),
            "bc" => Ok(TemplateKind::Bc),
            other => Err(format!("unknown template {other:?} (expected ic, pc or bc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateConfig {
    pub kind: TemplateKind,
    /// Maximum traversal depth.
    pub depth: usize,
    /// Maximum branches kept per step (PC) or expansions per depth (BC).
    pub width: usize,
    /// Independent BC traversals per side.
    pub traversals: usize,
    pub sep_token: String,
    /// Cap on sentence pairs per subsumption.
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for TemplateConfig {
    fn default() -> Self {
        Self {
            kind: TemplateKind::Ic,
            depth: 1,
            width: 4,
            traversals: 2,
            sep_token: "[SEP]".to_string(),
            max_pairs: 16,
            seed: 0,
        }
    }
}

impl TemplateConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.depth == 0 || self.width == 0 || self.max_pairs == 0 || self.traversals == 0 {
            return Err("depth, width, traversals and max_pairs must all be at least 1".into());
        }
        if self.sep_token.trim().is_empty() {
            return Err("separator token must be non-empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub sentence_a: String,
    pub sentence_b: String,
    pub child: Iri,
    pub parent: ClassExpr,
    pub template: TemplateKind,
}

/// The ontology and (possibly masked) hierarchy a class is rendered from.
#[derive(Debug, Clone, Copy)]
pub struct Side<'a> {
    pub ontology: &'a Ontology,
    pub hierarchy: &'a ClassHierarchy,
}

/// Depth-first paths from `c`, each starting at `c` and holding at most
/// `depth + 1` classes. At every step at most `width` next classes are
/// kept, chosen uniformly; kept classes stay in IRI order.
pub fn pc_paths<R: Rng + ?Sized>(
    h: &ClassHierarchy,
    c: &ClassExpr,
    direction: Direction,
    depth: usize,
    width: usize,
    rng: &mut R,
) -> Result<Vec<Vec<ClassExpr>>, HierarchyError> {
    let ClassExpr::Named(iri) = c else {
        return Ok(vec![vec![c.clone()]]);
    };
    let start = h.id(iri)?;
    let mut paths = Vec::new();
    let mut stack = vec![start];
    extend_paths(h, direction, depth, width, rng, &mut stack, &mut paths);
    Ok(paths.into_iter().map(|p| p.into_iter().map(|id| ClassExpr::Named(h.iri(id).clone())).collect()).collect())
}

fn extend_paths<R: Rng + ?Sized>(
    h: &ClassHierarchy,
    direction: Direction,
    depth: usize,
    width: usize,
    rng: &mut R,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let last = *stack.last().expect("path is never empty");
    let next: Vec<usize> = h.step_ids(last, direction).iter().copied().filter(|n| !stack.contains(n)).collect();
    if stack.len() > depth || next.is_empty() {
        out.push(stack.clone());
        return;
    }
    for n in sample_sorted(rng, &next, width) {
        stack.push(n);
        extend_paths(h, direction, depth, width, rng, stack, out);
        stack.pop();
    }
}

/// Breadth-first context sequence: `[c]` followed by each chosen context
/// subsumption as `sub, super`, depth by depth. At most `width` context
/// subsumptions are drawn per depth.
pub fn bc_sequence<R: Rng + ?Sized>(
    h: &ClassHierarchy,
    c: &ClassExpr,
    direction: Direction,
    depth: usize,
    width: usize,
    rng: &mut R,
) -> Result<Vec<ClassExpr>, HierarchyError> {
    let ClassExpr::Named(iri) = c else {
        return Ok(vec![c.clone()]);
    };
    let start = h.id(iri)?;
    let mut sequence = vec![start];
    let mut frontier = vec![start];
    for _ in 0..depth {
        let edges: Vec<(usize, usize)> =
            frontier.iter().flat_map(|&f| h.step_ids(f, direction).iter().map(move |&n| (f, n))).collect();
        if edges.is_empty() {
            break;
        }
        let chosen = sample_sorted(rng, &edges, width);
        let mut next = Vec::new();
        for (f, n) in chosen {
            match direction {
                Direction::Down => sequence.extend([n, f]),
                Direction::Up => sequence.extend([f, n]),
            }
            if !next.contains(&n) {
                next.push(n);
            }
        }
        frontier = next;
    }
    Ok(sequence.into_iter().map(|id| ClassExpr::Named(h.iri(id).clone())).collect())
}

/// Turns candidate subsumptions into sentence pairs under one template.
#[derive(Debug, Clone, Copy)]
pub struct Renderer<'a> {
    pub child_side: Side<'a>,
    pub parent_side: Side<'a>,
    pub policy: &'a LabelPolicy,
    pub preps: &'a PrepositionTable,
    pub config: &'a TemplateConfig,
}

impl<'a> Renderer<'a> {
    /// Renderer whose child and parent come from the same ontology.
    pub fn intra(
        side: Side<'a>,
        policy: &'a LabelPolicy,
        preps: &'a PrepositionTable,
        config: &'a TemplateConfig,
    ) -> Self {
        Self { child_side: side, parent_side: side, policy, preps, config }
    }

    /// Pairs for `(child, parent)` under the configured template, with
    /// random streams derived from the seed and both identities.
    pub fn pairs(&self, child: &Iri, parent: &ClassExpr) -> Result<Vec<SentencePair>, TemplateError> {
        self.pairs_salted(child, parent, "")
    }

    /// As [`Renderer::pairs`], with an extra salt for the random streams.
    pub fn pairs_salted(
        &self,
        child: &Iri,
        parent: &ClassExpr,
        salt: &str,
    ) -> Result<Vec<SentencePair>, TemplateError> {
        let parent_key = parent.key();
        let ids = [child.as_str(), parent_key.as_str(), salt];
        let mut traverse = derive_rng(self.config.seed, &[&["traverse"], &ids[..]].concat());
        let mut truncate = derive_rng(self.config.seed, &[&["truncate"], &ids[..]].concat());
        match self.config.kind {
            TemplateKind::Ic => self.ic_pairs(child, parent, &mut truncate),
            TemplateKind::Pc => self.pc_pairs(child, parent, &mut traverse, &mut truncate),
            TemplateKind::Bc => self.bc_pairs(child, parent, &mut traverse, &mut truncate),
        }
    }

    pub fn ic_pairs<R: Rng + ?Sized>(
        &self,
        child: &Iri,
        parent: &ClassExpr,
        truncate: &mut R,
    ) -> Result<Vec<SentencePair>, TemplateError> {
        let left = self.labels(self.child_side, &ClassExpr::Named(child.clone()))?;
        let right = self.labels(self.parent_side, parent)?;
        Ok(self.cross(child, parent, &left, &right, truncate))
    }

    pub fn pc_pairs<R: Rng + ?Sized, T: Rng + ?Sized>(
        &self,
        child: &Iri,
        parent: &ClassExpr,
        rng: &mut R,
        truncate: &mut T,
    ) -> Result<Vec<SentencePair>, TemplateError> {
        let cfg = self.config;
        let child_expr = ClassExpr::Named(child.clone());
        let down = pc_paths(self.child_side.hierarchy, &child_expr, Direction::Down, cfg.depth, cfg.width, rng)?;
        let up = pc_paths(self.parent_side.hierarchy, parent, Direction::Up, cfg.depth, cfg.width, rng)?;
        let left = self.render_all(self.child_side, &down, rng)?;
        let right = self.render_all(self.parent_side, &up, rng)?;
        Ok(self.cross(child, parent, &left, &right, truncate))
    }

    pub fn bc_pairs<R: Rng + ?Sized, T: Rng + ?Sized>(
        &self,
        child: &Iri,
        parent: &ClassExpr,
        rng: &mut R,
        truncate: &mut T,
    ) -> Result<Vec<SentencePair>, TemplateError> {
        let cfg = self.config;
        let child_expr = ClassExpr::Named(child.clone());
        let mut down = Vec::with_capacity(cfg.traversals);
        let mut up = Vec::with_capacity(cfg.traversals);
        for _ in 0..cfg.traversals {
            down.push(bc_sequence(self.child_side.hierarchy, &child_expr, Direction::Down, cfg.depth, cfg.width, rng)?);
            up.push(bc_sequence(self.parent_side.hierarchy, parent, Direction::Up, cfg.depth, cfg.width, rng)?);
        }
        let left = self.render_all(self.child_side, &down, rng)?;
        let right = self.render_all(self.parent_side, &up, rng)?;
        Ok(self.cross(child, parent, &left, &right, truncate))
    }

    fn labels(&self, side: Side<'_>, expr: &ClassExpr) -> Result<Vec<String>, VerbalizeError> {
        expr_labels(side.ontology, expr, self.policy, self.preps)
    }

    /// Renders class sequences with the separator token. The anchor (first)
    /// class contributes every label allowed by the policy; context classes
    /// contribute one label each. Duplicate sentences are dropped.
    fn render_all<R: Rng + ?Sized>(
        &self,
        side: Side<'_>,
        sequences: &[Vec<ClassExpr>],
        rng: &mut R,
    ) -> Result<Vec<String>, VerbalizeError> {
        let sep = format!(" {} ", self.config.sep_token);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for seq in sequences {
            let (anchor, context) = seq.split_first().expect("sequences are never empty");
            let anchor_labels = self.labels(side, anchor)?;
            let mut tail = Vec::with_capacity(context.len());
            for expr in context {
                let labels = self.labels(side, expr)?;
                let pick = match self.policy.mode {
                    LabelMode::Single => labels[0].clone(),
                    LabelMode::Multi => labels.choose(rng).expect("labels are never empty").clone(),
                };
                tail.push(pick);
            }
            for a in anchor_labels {
                let mut parts = Vec::with_capacity(1 + tail.len());
                parts.push(a);
                parts.extend(tail.iter().cloned());
                let sentence = parts.join(&sep);
                if seen.insert(sentence.clone()) {
                    out.push(sentence);
                }
            }
        }
        Ok(out)
    }

    fn cross<R: Rng + ?Sized>(
        &self,
        child: &Iri,
        parent: &ClassExpr,
        left: &[String],
        right: &[String],
        truncate: &mut R,
    ) -> Vec<SentencePair> {
        let all: Vec<(usize, usize)> = (0..left.len()).flat_map(|i| (0..right.len()).map(move |j| (i, j))).collect();
        sample_sorted(truncate, &all, self.config.max_pairs)
            .into_iter()
            .map(|(i, j)| SentencePair {
                sentence_a: left[i].clone(),
                sentence_b: right[j].clone(),
                child: child.clone(),
                parent: parent.clone(),
                template: self.config.kind,
            })
            .collect()
    }
}
