//! Positive extraction, splits, training negatives and evaluation
//! candidate pools.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hierarchy::{ClassHierarchy, HierarchyError};
use crate::model::{ClassExpr, ClassExprJson, Iri, Ontology};
use crate::rng::{derive_rng, sample_sorted};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SamplingError {
    #[error("no negative candidates left for {0}")]
    EmptyNegativePool(Iri),
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("invalid split: {0}")]
    InvalidSplit(String),
    #[error("{0}")]
    KindMismatch(String),
    #[error("line {line}: {detail}")]
    Format { line: usize, detail: String },
}

impl From<HierarchyError> for SamplingError {
    fn from(err: HierarchyError) -> Self {
        match err {
            HierarchyError::UnknownClass(c) => SamplingError::UnknownClass(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsumptionKind {
    /// Named class subsumed by a named class.
    Named,
    /// Named class subsumed by an existential restriction.
    Existential,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubsumptionAxiom {
    pub child: Iri,
    pub parent: ClassExpr,
}

impl SubsumptionAxiom {
    pub fn new(child: Iri, parent: impl Into<ClassExpr>) -> Self {
        Self { child, parent: parent.into() }
    }

    pub fn kind(&self) -> SubsumptionKind {
        match self.parent {
            ClassExpr::Named(_) => SubsumptionKind::Named,
            ClassExpr::Restriction(_) => SubsumptionKind::Existential,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleLabel {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledSample {
    pub axiom: SubsumptionAxiom,
    pub label: SampleLabel,
}

/// One gold subsumption and the non-subsumers ranked against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalCase {
    pub gold: SubsumptionAxiom,
    pub negatives: Vec<ClassExpr>,
}

impl EvalCase {
    /// Cases with an empty pool are excluded from metrics.
    pub fn is_skipped(&self) -> bool {
        self.negatives.is_empty()
    }
}

pub fn extract_positives(o: &Ontology, kind: SubsumptionKind) -> Vec<SubsumptionAxiom> {
    match kind {
        SubsumptionKind::Named => {
            o.named_subsumptions.iter().map(|(c, p)| SubsumptionAxiom::new(c.clone(), p.clone())).collect()
        }
        SubsumptionKind::Existential => {
            o.restriction_axioms.iter().map(|(c, r)| SubsumptionAxiom::new(c.clone(), r.clone())).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self { train: 0.80, valid: 0.05, test: 0.15, seed: 0 }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<(), SamplingError> {
        for (name, f) in [("train", self.train), ("valid", self.valid), ("test", self.test)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(SamplingError::InvalidSplit(format!("{name} fraction {f} outside [0, 1]")));
            }
        }
        let sum = self.train + self.valid + self.test;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SamplingError::InvalidSplit(format!("fractions sum to {sum}, not 1")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<SubsumptionAxiom>,
    pub valid: Vec<SubsumptionAxiom>,
    pub test: Vec<SubsumptionAxiom>,
}

fn floor_share(n: usize, fraction: f64) -> usize {
    ((n as f64) * fraction + 1e-9).floor() as usize
}

/// Seeded shuffle then cut. Valid and test sizes are floored; the
/// remainder goes to train. Each part is returned in canonical order.
pub fn split(positives: &[SubsumptionAxiom], spec: &SplitSpec) -> Result<Split, SamplingError> {
    spec.validate()?;
    let mut canonical: Vec<SubsumptionAxiom> = positives.to_vec();
    canonical.sort();
    canonical.dedup();
    let n = canonical.len();
    let n_valid = floor_share(n, spec.valid);
    let n_test = floor_share(n, spec.test).min(n - n_valid);
    let mut rng = derive_rng(spec.seed, &["split"]);
    canonical.shuffle(&mut rng);
    let mut rest = canonical.split_off(n_valid);
    let mut valid = canonical;
    let mut train = rest.split_off(n_test);
    let mut test = rest;
    valid.sort();
    test.sort();
    train.sort();
    Ok(Split { train, valid, test })
}

/// Uniform pick from `0..universe` minus the sorted, duplicate-free
/// `excluded` ids.
fn pick_excluding<R: Rng + ?Sized>(rng: &mut R, universe: usize, excluded: &[usize]) -> Option<usize> {
    let blocked = excluded.iter().filter(|&&e| e < universe).count();
    let free = universe - blocked;
    if free == 0 {
        return None;
    }
    let mut idx = rng.gen_range(0..free);
    for &e in excluded {
        if e <= idx {
            idx += 1;
        } else {
            break;
        }
    }
    Some(idx)
}

/// Replaces the parent of `pos` with a uniform draw from the classes (or
/// restrictions, for existential axioms) that neither are the child nor
/// subsume it, declared or inherited.
pub fn negative_for_training<R: Rng + ?Sized>(
    pos: &SubsumptionAxiom,
    hierarchy: &ClassHierarchy,
    rng: &mut R,
) -> Result<SubsumptionAxiom, SamplingError> {
    let child = hierarchy.id(&pos.child)?;
    let subsumers = hierarchy.subsumer_ids(child);
    let parent = match pos.kind() {
        SubsumptionKind::Named => {
            let mut excluded: Vec<usize> = subsumers.named.into_iter().collect();
            if let Err(at) = excluded.binary_search(&child) {
                excluded.insert(at, child);
            }
            let id = pick_excluding(rng, hierarchy.classes().len(), &excluded)
                .ok_or_else(|| SamplingError::EmptyNegativePool(pos.child.clone()))?;
            ClassExpr::Named(hierarchy.iri(id).clone())
        }
        SubsumptionKind::Existential => {
            let excluded: Vec<usize> = subsumers.restrictions.into_iter().collect();
            let id = pick_excluding(rng, hierarchy.restriction_inventory().len(), &excluded)
                .ok_or_else(|| SamplingError::EmptyNegativePool(pos.child.clone()))?;
            ClassExpr::Restriction(hierarchy.restriction(id).clone())
        }
    };
    Ok(SubsumptionAxiom { child: pos.child.clone(), parent })
}

/// Parameters of the named-subsumer evaluation pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NamedPoolParams {
    pub max_seeds: usize,
    pub hops: usize,
    pub cap: usize,
}

impl Default for NamedPoolParams {
    fn default() -> Self {
        Self { max_seeds: 8, hops: 3, cap: 50 }
    }
}

/// Parameters of the restriction-subsumer evaluation pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestrictionPoolParams {
    /// Draws among restrictions sharing the gold's property or a filler.
    pub related: usize,
    /// Draws among all other restrictions.
    pub other: usize,
}

impl Default for RestrictionPoolParams {
    fn default() -> Self {
        Self { related: 40, other: 10 }
    }
}

/// Negative pool for a named gold: hop neighborhood of the gold parent,
/// minus the child, the gold and every entailed subsumer of the child,
/// subsampled to `cap`.
pub fn eval_pool_named<R: Rng + ?Sized>(
    gold: &SubsumptionAxiom,
    hierarchy: &ClassHierarchy,
    params: &NamedPoolParams,
    rng: &mut R,
) -> Result<EvalCase, SamplingError> {
    let ClassExpr::Named(parent) = &gold.parent else {
        return Err(SamplingError::KindMismatch("named pool needs a named gold parent".into()));
    };
    let child = hierarchy.id(&gold.child)?;
    let parent_id = hierarchy.id(parent)?;
    let excluded = hierarchy.subsumer_ids(child).named;
    let pool: Vec<usize> = hierarchy
        .neighborhood_ids(parent_id, params.max_seeds.max(1), params.hops.max(1), rng)
        .into_iter()
        .filter(|&c| c != child && c != parent_id && !excluded.contains(&c))
        .collect();
    let negatives = sample_sorted(rng, &pool, params.cap)
        .into_iter()
        .map(|id| ClassExpr::Named(hierarchy.iri(id).clone()))
        .collect();
    Ok(EvalCase { gold: gold.clone(), negatives })
}

/// Negative pool for a restriction gold: up to `related` draws among
/// restrictions sharing its property or a filler class, then up to `other`
/// draws among the rest. Entailed subsumers of the child never enter.
pub fn eval_pool_restriction<R: Rng + ?Sized>(
    gold: &SubsumptionAxiom,
    hierarchy: &ClassHierarchy,
    params: &RestrictionPoolParams,
    rng: &mut R,
) -> Result<EvalCase, SamplingError> {
    let ClassExpr::Restriction(target) = &gold.parent else {
        return Err(SamplingError::KindMismatch("restriction pool needs a restriction gold parent".into()));
    };
    let child = hierarchy.id(&gold.child)?;
    let mut excluded = hierarchy.subsumer_ids(child).restrictions;
    if let Some(id) = hierarchy.restriction_id(target) {
        excluded.insert(id);
    }
    let related_all = hierarchy.related_restriction_ids(target);
    let related: Vec<usize> = related_all.iter().copied().filter(|r| !excluded.contains(r)).collect();
    let others: Vec<usize> = (0..hierarchy.restriction_inventory().len())
        .filter(|r| !related_all.contains(r) && !excluded.contains(r))
        .collect();
    let mut picked: BTreeSet<usize> = sample_sorted(rng, &related, params.related).into_iter().collect();
    picked.extend(sample_sorted(rng, &others, params.other));
    let negatives = picked.into_iter().map(|id| ClassExpr::Restriction(hierarchy.restriction(id).clone())).collect();
    Ok(EvalCase { gold: gold.clone(), negatives })
}

/// Builds one pool per gold axiom with a per-axiom random stream.
pub fn build_eval_cases(
    golds: &[SubsumptionAxiom],
    hierarchy: &ClassHierarchy,
    named: &NamedPoolParams,
    restriction: &RestrictionPoolParams,
    seed: u64,
) -> Vec<Result<EvalCase, SamplingError>> {
    crate::par::map_ordered(golds, |gold| {
        let mut rng = derive_rng(seed, &["eval-pool", gold.child.as_str(), &gold.parent.key()]);
        match gold.kind() {
            SubsumptionKind::Named => eval_pool_named(gold, hierarchy, named, &mut rng),
            SubsumptionKind::Existential => eval_pool_restriction(gold, hierarchy, restriction, &mut rng),
        }
    })
}

/// Inter-ontology subsumption derived from an equivalence mapping.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct InterAxiom {
    /// Child from ontology A, parent a named class of ontology B.
    pub axiom: SubsumptionAxiom,
    /// The B class mapped to the child; removed from the pruned B.
    pub equivalent: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InterIssue {
    /// Mapping target absent from B.
    UnknownClass(Iri),
    /// Derived parent is itself a deleted mapping target.
    ParentDeleted { child: Iri, parent: Iri },
}

#[derive(Debug, Clone)]
pub struct InterDerivation {
    pub axioms: Vec<InterAxiom>,
    /// B with every mapped class removed.
    pub pruned: Ontology,
    pub issues: Vec<InterIssue>,
}

/// For each equivalence `(a, b)`, emits `(a, p)` for every declared named
/// parent `p` of `b` in B, then deletes the mapped `b` classes from B.
pub fn derive_inter_subsumptions(mappings: &[(Iri, Iri)], ontology_b: &Ontology) -> InterDerivation {
    let mut issues = Vec::new();
    let targets: BTreeSet<&Iri> = mappings.iter().map(|(_, b)| b).filter(|b| ontology_b.classes.contains(*b)).collect();
    let mut axioms = BTreeSet::new();
    for (a, b) in mappings {
        if !ontology_b.classes.contains(b) {
            log::warn!("mapping target {b} not found in ontology B");
            issues.push(InterIssue::UnknownClass(b.clone()));
            continue;
        }
        for (c, p) in ontology_b.named_subsumptions.range((b.clone(), Iri::new("\0"))..) {
            if c != b {
                break;
            }
            if targets.contains(p) {
                issues.push(InterIssue::ParentDeleted { child: a.clone(), parent: p.clone() });
                continue;
            }
            axioms.insert(InterAxiom { axiom: SubsumptionAxiom::new(a.clone(), p.clone()), equivalent: b.clone() });
        }
    }
    let mut pruned = ontology_b.clone();
    for b in targets {
        pruned.remove_class(b);
    }
    InterDerivation { axioms: axioms.into_iter().collect(), pruned, issues }
}

/// 25% validation / 75% test, seeded; validation size is floored.
pub fn split_inter(axioms: &[InterAxiom], seed: u64) -> (Vec<InterAxiom>, Vec<InterAxiom>) {
    let mut all = axioms.to_vec();
    all.sort();
    all.dedup();
    let n_valid = floor_share(all.len(), 0.25);
    let mut rng = derive_rng(seed, &["split-inter"]);
    all.shuffle(&mut rng);
    let mut test = all.split_off(n_valid);
    let mut valid = all;
    valid.sort();
    test.sort();
    (valid, test)
}

/// Negative pool for an inter-ontology gold. Candidates come from the
/// neighborhood of the gold parent in the pruned B; the entailed
/// subsumers of the mapped class in the original B are excluded.
pub fn eval_pool_inter<R: Rng + ?Sized>(
    inter: &InterAxiom,
    original_b: &ClassHierarchy,
    pruned_b: &ClassHierarchy,
    params: &NamedPoolParams,
    rng: &mut R,
) -> Result<EvalCase, SamplingError> {
    let ClassExpr::Named(parent) = &inter.axiom.parent else {
        return Err(SamplingError::KindMismatch("inter-ontology gold must be named".into()));
    };
    let mapped = original_b.id(&inter.equivalent)?;
    let excluded: BTreeSet<&Iri> =
        original_b.subsumer_ids(mapped).named.into_iter().map(|id| original_b.iri(id)).collect();
    let parent_id = pruned_b.id(parent)?;
    let pool: Vec<usize> = pruned_b
        .neighborhood_ids(parent_id, params.max_seeds.max(1), params.hops.max(1), rng)
        .into_iter()
        .filter(|&c| c != parent_id && !excluded.contains(pruned_b.iri(c)) && pruned_b.iri(c) != &inter.equivalent)
        .collect();
    let negatives = sample_sorted(rng, &pool, params.cap)
        .into_iter()
        .map(|id| ClassExpr::Named(pruned_b.iri(id).clone()))
        .collect();
    Ok(EvalCase { gold: inter.axiom.clone(), negatives })
}

/// Reads equivalence mappings: tab-separated, first two columns are IRIs
/// (optionally in angle brackets). Blank lines and `#` comments are skipped.
pub fn read_mappings_tsv<R: BufRead>(reader: R) -> Result<Vec<(Iri, Iri)>, SamplingError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| SamplingError::Format { line: i + 1, detail: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cols = trimmed.split('\t').map(|c| c.trim().trim_start_matches('<').trim_end_matches('>'));
        match (cols.next().and_then(Iri::try_new), cols.next().and_then(Iri::try_new)) {
            (Some(a), Some(b)) => out.push((a, b)),
            _ => return Err(SamplingError::Format { line: i + 1, detail: "expected two tab-separated IRIs".into() }),
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct EvalCaseJson {
    child: String,
    gold_parent: ClassExprJson,
    negatives: Vec<ClassExprJson>,
}

/// Writes one JSON object per line:
/// `{"child": .., "gold_parent": {..}, "negatives": [{..}]}`.
pub fn write_eval_cases<W: Write>(mut writer: W, cases: &[EvalCase]) -> std::io::Result<()> {
    for case in cases {
        let doc = EvalCaseJson {
            child: case.gold.child.to_string(),
            gold_parent: (&case.gold.parent).into(),
            negatives: case.negatives.iter().map(ClassExprJson::from).collect(),
        };
        serde_json::to_writer(&mut writer, &doc)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_eval_cases<R: BufRead>(reader: R) -> Result<Vec<EvalCase>, SamplingError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let err = |detail: String| SamplingError::Format { line: i + 1, detail };
        let line = line.map_err(|e| err(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc: EvalCaseJson = serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let child = Iri::try_new(doc.child).ok_or_else(|| err("empty child IRI".into()))?;
        let parent = ClassExpr::try_from(doc.gold_parent).map_err(err)?;
        let negatives =
            doc.negatives.into_iter().map(ClassExpr::try_from).collect::<Result<Vec<_>, _>>().map_err(err)?;
        out.push(EvalCase { gold: SubsumptionAxiom { child, parent }, negatives });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RestrictionExpr;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://example.org/{s}"))
    }

    fn named_axioms(n: usize) -> Vec<SubsumptionAxiom> {
        (0..n).map(|i| SubsumptionAxiom::new(iri(&format!("c{i:03}")), iri("root"))).collect()
    }

    fn ontology(edges: &[(&str, &str)]) -> Ontology {
        let mut o = Ontology::default();
        for (c, p) in edges {
            o.classes.insert(iri(c));
            o.classes.insert(iri(p));
            o.named_subsumptions.insert((iri(c), iri(p)));
        }
        o
    }

    #[test]
    fn split_of_100_is_exact() {
        let s = split(&named_axioms(100), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (80, 5, 15));
    }

    #[test]
    fn split_of_99_gives_remainder_to_train() {
        let s = split(&named_axioms(99), &SplitSpec::default()).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (81, 4, 14));
    }

    #[test]
    fn split_is_deterministic_and_disjoint() {
        let axioms = named_axioms(57);
        let spec = SplitSpec { seed: 11, ..SplitSpec::default() };
        let a = split(&axioms, &spec).unwrap();
        assert_eq!(a, split(&axioms, &spec).unwrap());
        let mut all: Vec<_> = a.train.iter().chain(&a.valid).chain(&a.test).cloned().collect();
        all.sort();
        assert_eq!(all, axioms);
        let other = split(&axioms, &SplitSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn split_rejects_bad_fractions() {
        let spec = SplitSpec { train: 0.9, valid: 0.2, test: 0.1, seed: 0 };
        assert!(matches!(split(&named_axioms(3), &spec), Err(SamplingError::InvalidSplit(_))));
    }

    #[test]
    fn two_class_ontology_has_empty_negative_pool() {
        let o = ontology(&[("a", "b")]);
        let h = ClassHierarchy::new(&o);
        let pos = SubsumptionAxiom::new(iri("a"), iri("b"));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(negative_for_training(&pos, &h, &mut rng), Err(SamplingError::EmptyNegativePool(iri("a"))));
    }

    #[test]
    fn training_negatives_are_uniform_over_the_pool() {
        // child "a" under "b" plus 10 unrelated classes
        let mut edges = vec![("a", "b")];
        let names: Vec<String> = (0..10).map(|i| format!("x{i}")).collect();
        for n in &names {
            edges.push((n.as_str(), "y"));
        }
        let mut o = ontology(&edges);
        o.named_subsumptions.retain(|(_, p)| p != &iri("y"));
        o.classes.remove(&iri("y"));
        let h = ClassHierarchy::new(&o);
        let pos = SubsumptionAxiom::new(iri("a"), iri("b"));
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 10_000usize;
        let mut counts = std::collections::BTreeMap::<Iri, usize>::new();
        for _ in 0..draws {
            let neg = negative_for_training(&pos, &h, &mut rng).unwrap();
            *counts.entry(neg.parent.as_named().unwrap().clone()).or_default() += 1;
        }
        assert_eq!(counts.len(), 10);
        let p = 0.1;
        let mean = draws as f64 * p;
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        for (c, n) in counts {
            assert!((n as f64 - mean).abs() <= 5.0 * sigma, "{c}: {n}");
        }
    }

    #[test]
    fn existential_negative_excludes_inherited_restrictions() {
        let mut o = ontology(&[("a", "b")]);
        o.classes.insert(iri("f"));
        o.properties.insert(iri("r"));
        let inherited = RestrictionExpr::named(iri("r"), iri("f"));
        let own = RestrictionExpr::named(iri("r"), iri("b"));
        let free = RestrictionExpr::named(iri("r"), iri("a"));
        o.restriction_axioms.insert((iri("b"), inherited.clone()));
        o.restriction_axioms.insert((iri("a"), own.clone()));
        o.restriction_axioms.insert((iri("f"), free.clone()));
        let h = ClassHierarchy::new(&o);
        let pos = SubsumptionAxiom::new(iri("a"), own);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let neg = negative_for_training(&pos, &h, &mut rng).unwrap();
            assert_eq!(neg.parent, ClassExpr::Restriction(free.clone()));
        }
    }

    #[test]
    fn isolated_gold_parent_gives_skipped_case() {
        let mut o = ontology(&[]);
        o.classes.insert(iri("a"));
        o.classes.insert(iri("b"));
        let h = ClassHierarchy::new(&o);
        let gold = SubsumptionAxiom::new(iri("a"), iri("b"));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let case = eval_pool_named(&gold, &h, &NamedPoolParams::default(), &mut rng).unwrap();
        assert!(case.is_skipped());
    }

    #[test]
    fn named_pool_is_capped() {
        let names: Vec<String> = (0..200).map(|i| format!("s{i:03}")).collect();
        let mut edges: Vec<(&str, &str)> = names.iter().map(|n| (n.as_str(), "p")).collect();
        edges.push(("p", "top"));
        let o = ontology(&edges);
        let h = ClassHierarchy::new(&o);
        let gold = SubsumptionAxiom::new(iri("s000"), iri("p"));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let case = eval_pool_named(&gold, &h, &NamedPoolParams::default(), &mut rng).unwrap();
        assert_eq!(case.negatives.len(), 50);
        assert!(!case.negatives.contains(&ClassExpr::Named(iri("p"))));
        assert!(!case.negatives.contains(&ClassExpr::Named(iri("top"))));
        assert!(!case.negatives.contains(&ClassExpr::Named(iri("s000"))));
    }

    fn restriction_inventory(same_property: usize, others: usize) -> (Ontology, SubsumptionAxiom) {
        let mut o = Ontology::default();
        o.classes.insert(iri("child"));
        o.properties.insert(iri("r"));
        o.properties.insert(iri("q"));
        let mut add = |holder: String, prop: &str, filler: String| {
            o.classes.insert(iri(&holder));
            o.classes.insert(iri(&filler));
            o.restriction_axioms.insert((iri(&holder), RestrictionExpr::named(iri(prop), iri(&filler))));
        };
        add("child".into(), "r", "gold-filler".into());
        for i in 0..same_property {
            add(format!("h{i}"), "r", format!("f{i}"));
        }
        for i in 0..others {
            add(format!("k{i}"), "q", format!("g{i}"));
        }
        let gold = SubsumptionAxiom::new(iri("child"), RestrictionExpr::named(iri("r"), iri("gold-filler")));
        (o, gold)
    }

    #[test]
    fn restriction_pool_draws_forty_plus_ten() {
        let (o, gold) = restriction_inventory(100, 100);
        let h = ClassHierarchy::new(&o);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let case = eval_pool_restriction(&gold, &h, &RestrictionPoolParams::default(), &mut rng).unwrap();
        let same = case.negatives.iter().filter(|n| n.as_restriction().unwrap().property == iri("r")).count();
        assert_eq!((same, case.negatives.len() - same), (40, 10));
        assert!(!case.negatives.contains(&gold.parent));
    }

    #[test]
    fn single_restriction_gives_skipped_case() {
        let (o, gold) = restriction_inventory(0, 0);
        let h = ClassHierarchy::new(&o);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let case = eval_pool_restriction(&gold, &h, &RestrictionPoolParams::default(), &mut rng).unwrap();
        assert!(case.is_skipped());
    }

    #[test]
    fn inter_derivation_uses_declared_parents_and_prunes() {
        let b = ontology(&[("y", "p"), ("y", "q"), ("p", "top"), ("z", "y")]);
        let d = derive_inter_subsumptions(&[(iri("x"), iri("y"))], &b);
        let got: Vec<_> = d.axioms.iter().map(|a| a.axiom.clone()).collect();
        assert_eq!(got, vec![SubsumptionAxiom::new(iri("x"), iri("p")), SubsumptionAxiom::new(iri("x"), iri("q"))]);
        assert!(!d.pruned.classes.contains(&iri("y")));
        assert!(d.pruned.classes.contains(&iri("p")) && d.pruned.classes.contains(&iri("q")));
        assert!(d.pruned.named_subsumptions.iter().all(|(c, p)| c != &iri("y") && p != &iri("y")));
        assert!(d.issues.is_empty());
    }

    #[test]
    fn inter_root_target_gives_nothing_and_unknown_is_reported() {
        let b = ontology(&[("y", "p")]);
        let d = derive_inter_subsumptions(&[(iri("x"), iri("p")), (iri("w"), iri("missing"))], &b);
        assert!(d.axioms.is_empty());
        assert_eq!(d.issues, vec![InterIssue::UnknownClass(iri("missing"))]);
    }

    #[test]
    fn split_inter_quarter() {
        let axioms: Vec<InterAxiom> =
            named_axioms(400).into_iter().map(|axiom| InterAxiom { axiom, equivalent: iri("e") }).collect();
        let (valid, test) = split_inter(&axioms, 4);
        assert_eq!((valid.len(), test.len()), (100, 300));
        assert_eq!(split_inter(&axioms, 4), (valid, test));
    }

    #[test]
    fn mappings_tsv_parsing() {
        let tsv = "# comment\n<http://a/1>\thttp://b/1\t0.9\n\nhttp://a/2\thttp://b/2\n";
        let m = read_mappings_tsv(tsv.as_bytes()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0], (Iri::new("http://a/1"), Iri::new("http://b/1")));
        assert!(read_mappings_tsv("only-one-column\n".as_bytes()).is_err());
    }

    #[test]
    fn eval_case_jsonl_round_trip() {
        let case = EvalCase {
            gold: SubsumptionAxiom::new(
                iri("a"),
                RestrictionExpr::from_parts(iri("r"), "or", vec![iri("b"), iri("c")]).unwrap(),
            ),
            negatives: vec![ClassExpr::Named(iri("d"))],
        };
        let mut buf = Vec::new();
        write_eval_cases(&mut buf, std::slice::from_ref(&case)).unwrap();
        let line = String::from_utf8(buf.clone()).unwrap();
        assert!(line.starts_with(r#"{"child":"http://example.org/a","gold_parent":{"kind":"restriction""#), "{line}");
        assert_eq!(read_eval_cases(&buf[..]).unwrap(), vec![case]);
    }
}
