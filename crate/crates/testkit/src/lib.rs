//! Random ontologies and brute-force reference implementations used by the
//! integration and acceptance tests.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::path::PathBuf;

use ontosub::eval::TieRule;
use ontosub::model::{ClassExpr, Iri, Ontology, RestrictionExpr, RDFS_LABEL};
use ontosub::sampling::EvalCase;
use ontosub::scorer::{Score, Scorer, ScorerError};
use ontosub::templates::Renderer;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn class_iri(i: usize) -> Iri {
    Iri::new(format!("http://example.org/onto#C{i:03}"))
}

pub fn property_iri(i: usize) -> Iri {
    Iri::new(format!("http://example.org/onto#p{i}"))
}

const WORDS: [&str; 12] =
    ["soy", "bean", "milk", "food", "plant", "product", "seed", "drink", "bread", "grain", "oil", "leaf"];

fn random_label<R: Rng>(rng: &mut R) -> String {
    let n = rng.gen_range(1..=3);
    (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
}

/// Random DAG over `n` labelled classes. Edges only run from a later to an
/// earlier topological position, and names are shuffled so IRI order and
/// topological order disagree.
pub fn random_dag<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> Ontology {
    let mut names: Vec<usize> = (0..n).collect();
    names.shuffle(rng);
    let mut o = Ontology::default();
    for &name in &names {
        o.classes.insert(class_iri(name));
        o.add_label(class_iri(name), Iri::new(RDFS_LABEL), random_label(rng));
    }
    for child in 1..n {
        for parent in 0..child {
            if rng.gen_bool(edge_prob) {
                o.named_subsumptions.insert((class_iri(names[child]), class_iri(names[parent])));
            }
        }
    }
    o
}

/// Random DAG plus `n_axioms` existential axioms over `n_props` properties.
pub fn random_ontology<R: Rng>(rng: &mut R, n: usize, edge_prob: f64, n_props: usize, n_axioms: usize) -> Ontology {
    let mut o = random_dag(rng, n, edge_prob);
    for p in 0..n_props {
        o.properties.insert(property_iri(p));
        o.add_label(property_iri(p), Iri::new(RDFS_LABEL), format!("{} {}", random_label(rng), "of"));
    }
    if n_props == 0 || n == 0 {
        return o;
    }
    for _ in 0..n_axioms {
        let child = class_iri(rng.gen_range(0..n));
        let property = property_iri(rng.gen_range(0..n_props));
        let r = if rng.gen_bool(0.8) {
            RestrictionExpr::named(property, class_iri(rng.gen_range(0..n)))
        } else {
            let fillers: Vec<Iri> = (0..rng.gen_range(2..=3)).map(|_| class_iri(rng.gen_range(0..n))).collect();
            let kind = if rng.gen_bool(0.5) { "and" } else { "or" };
            match RestrictionExpr::from_parts(property.clone(), kind, fillers) {
                Ok(r) => r,
                Err(_) => RestrictionExpr::named(property, class_iri(rng.gen_range(0..n))),
            }
        };
        o.restriction_axioms.insert((child, r));
    }
    o
}

/// Reflexive-free transitive closure of the declared edges by repeated
/// boolean matrix squaring: `reach[i][j]` is true when class `i` is a
/// (strict) subclass of class `j`. Classes are indexed in IRI order.
#[allow(clippy::needless_range_loop)]
pub fn closure_matrix(o: &Ontology) -> (Vec<Iri>, Vec<Vec<bool>>) {
    let iris: Vec<Iri> = o.classes.iter().cloned().collect();
    let index: BTreeMap<&Iri, usize> = iris.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let n = iris.len();
    let mut reach = vec![vec![false; n]; n];
    for (c, p) in &o.named_subsumptions {
        reach[index[c]][index[p]] = true;
    }
    loop {
        let mut next = reach.clone();
        for i in 0..n {
            for k in 0..n {
                if reach[i][k] {
                    for j in 0..n {
                        if reach[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        if next == reach {
            return (iris, reach);
        }
        reach = next;
    }
}

/// Strict ancestors of every class from the matrix closure.
pub fn oracle_ancestors(o: &Ontology) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let (iris, reach) = closure_matrix(o);
    iris.iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), (0..iris.len()).filter(|&j| reach[i][j]).map(|j| iris[j].clone()).collect()))
        .collect()
}

pub fn oracle_descendants(o: &Ontology) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let (iris, reach) = closure_matrix(o);
    iris.iter()
        .enumerate()
        .map(|(j, c)| (c.clone(), (0..iris.len()).filter(|&i| reach[i][j]).map(|i| iris[i].clone()).collect()))
        .collect()
}

/// Restrictions declared on a class or on any of its ancestors.
pub fn oracle_restriction_subsumers(
    o: &Ontology,
    ancestors: &BTreeMap<Iri, BTreeSet<Iri>>,
) -> BTreeMap<Iri, BTreeSet<RestrictionExpr>> {
    o.classes
        .iter()
        .map(|c| {
            let mut owners: BTreeSet<&Iri> = ancestors[c].iter().collect();
            owners.insert(c);
            let rs = o
                .restriction_axioms
                .iter()
                .filter(|(child, _)| owners.contains(child))
                .map(|(_, r)| r.clone())
                .collect();
            (c.clone(), rs)
        })
        .collect()
}

/// True when `child ⊑ parent` is declared or follows by inheritance.
pub fn oracle_entailed(
    child: &Iri,
    parent: &ClassExpr,
    ancestors: &BTreeMap<Iri, BTreeSet<Iri>>,
    restriction_subsumers: &BTreeMap<Iri, BTreeSet<RestrictionExpr>>,
) -> bool {
    match parent {
        ClassExpr::Named(p) => ancestors[child].contains(p),
        ClassExpr::Restriction(r) => restriction_subsumers[child].contains(r),
    }
}

/// Deterministic scorer with coarse levels so that ties are common.
#[derive(Debug, Clone, Copy)]
pub struct BucketScorer {
    pub levels: u64,
}

impl BucketScorer {
    pub fn value(&self, a: &str, b: &str) -> f64 {
        let mut h = DefaultHasher::new();
        a.hash(&mut h);
        b.hash(&mut h);
        (h.finish() % self.levels) as f64 / (self.levels - 1) as f64
    }
}

impl Scorer for BucketScorer {
    fn score(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError> {
        Ok(pairs.iter().map(|(a, b)| Score::new(self.value(a, b)).unwrap()).collect())
    }
}

/// Reference ranking: scores every candidate one pair at a time, sorts
/// all candidates by score and reads off the gold position. Ties are
/// broken by placing the gold after (pessimistic), before (optimistic) or
/// in the middle (midpoint, rounded down) of its equal-score group.
pub fn brute_force_rank<S: Scorer>(
    case: &EvalCase,
    renderer: &Renderer<'_>,
    scorer: &mut S,
    tie: TieRule,
) -> Option<usize> {
    if case.negatives.is_empty() {
        return None;
    }
    let mut scored: Vec<(f64, bool)> = Vec::new();
    let candidates = std::iter::once((&case.gold.parent, true)).chain(case.negatives.iter().map(|n| (n, false)));
    for (cand, is_gold) in candidates {
        let pairs = renderer.pairs(&case.gold.child, cand).expect("renderable");
        let mut total = 0.0;
        for p in &pairs {
            total += scorer.score(&[(p.sentence_a.as_str(), p.sentence_b.as_str())]).unwrap()[0].value();
        }
        scored.push((total / pairs.len() as f64, is_gold));
    }
    let gold_score = scored[0].0;
    scored.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
    let first_tied = scored.iter().position(|s| s.0 == gold_score).unwrap();
    let tied_negatives = scored.iter().filter(|s| s.0 == gold_score && !s.1).count();
    let offset = match tie {
        TieRule::Pessimistic => tied_negatives,
        TieRule::Optimistic => 0,
        TieRule::Midpoint => tied_negatives / 2,
    };
    Some(first_tied + offset + 1)
}
