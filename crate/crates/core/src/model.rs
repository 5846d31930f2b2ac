//! Ontology value types shared by every stage of the pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_FIRST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#first";
pub const RDF_REST: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#rest";
pub const RDF_NIL: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#nil";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_THING: &str = "http://www.w3.org/2002/07/owl#Thing";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_RESTRICTION: &str = "http://www.w3.org/2002/07/owl#Restriction";
pub const OWL_ON_PROPERTY: &str = "http://www.w3.org/2002/07/owl#onProperty";
pub const OWL_SOME_VALUES_FROM: &str = "http://www.w3.org/2002/07/owl#someValuesFrom";
pub const OWL_INTERSECTION_OF: &str = "http://www.w3.org/2002/07/owl#intersectionOf";
pub const OWL_UNION_OF: &str = "http://www.w3.org/2002/07/owl#unionOf";
pub const OBO_HAS_EXACT_SYNONYM: &str = "http://www.geneontology.org/formats/oboInOwl#hasExactSynonym";
pub const OBO_HAS_SYNONYM: &str = "http://www.geneontology.org/formats/oboInOwl#hasSynonym";

/// Identity of a named entity (class, property or annotation property).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Iri(String);

impl Iri {
    /// Panics on an empty string; use [`Iri::try_new`] for untrusted input.
    pub fn new(value: impl Into<String>) -> Self {
        Self::try_new(value).expect("IRI must be non-empty")
    }

    pub fn try_new(value: impl Into<String>) -> Option<Self> {
        let value = value.into();
        if value.is_empty() {
            None
        } else {
            Some(Self(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The fragment after the last `#`, `/` or `:` separator.
    pub fn local_name(&self) -> &str {
        let s = self.0.as_str();
        match s.rfind(['#', '/', ':']) {
            Some(pos) => &s[pos + 1..],
            None => s,
        }
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Filler of an existential restriction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Filler {
    Named(Iri),
    /// Conjunction of at least two distinct named classes, input order kept.
    And(Vec<Iri>),
    /// Disjunction of at least two distinct named classes, input order kept.
    Or(Vec<Iri>),
}

impl Filler {
    pub fn classes(&self) -> &[Iri] {
        match self {
            Filler::Named(c) => std::slice::from_ref(c),
            Filler::And(cs) | Filler::Or(cs) => cs,
        }
    }

    pub fn kind_str(&self) -> &'static str {
        match self {
            Filler::Named(_) => "named",
            Filler::And(_) => "and",
            Filler::Or(_) => "or",
        }
    }
}

/// An existential restriction `some property . filler`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RestrictionExpr {
    pub property: Iri,
    pub filler: Filler,
}

impl RestrictionExpr {
    pub fn named(property: Iri, filler: Iri) -> Self {
        Self { property, filler: Filler::Named(filler) }
    }

    /// Builds a restriction from a filler kind and class list, dropping
    /// duplicate fillers while keeping first occurrences in order.
    pub fn from_parts(property: Iri, kind: &str, fillers: Vec<Iri>) -> Result<Self, String> {
        let mut seen = BTreeSet::new();
        let fillers: Vec<Iri> = fillers.into_iter().filter(|f| seen.insert(f.clone())).collect();
        let filler = match (kind, fillers.len()) {
            ("named", 1) => Filler::Named(fillers.into_iter().next().unwrap()),
            ("named", n) => return Err(format!("named filler needs exactly 1 class, got {n}")),
            ("and", n) if n >= 2 => Filler::And(fillers),
            ("or", n) if n >= 2 => Filler::Or(fillers),
            ("and" | "or", n) => return Err(format!("{kind} filler needs at least 2 distinct classes, got {n}")),
            (other, _) => return Err(format!("unknown filler kind {other:?}")),
        };
        Ok(Self { property, filler })
    }

    /// True for the plain `some r . C` form with a single named filler.
    pub fn is_simple(&self) -> bool {
        matches!(self.filler, Filler::Named(_))
    }
}

impl fmt::Display for RestrictionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} some ", self.property)?;
        match &self.filler {
            Filler::Named(c) => write!(f, "{c}"),
            Filler::And(cs) | Filler::Or(cs) => {
                let op = if matches!(self.filler, Filler::And(_)) { " and " } else { " or " };
                let parts: Vec<&str> = cs.iter().map(Iri::as_str).collect();
                write!(f, "({})", parts.join(op))
            }
        }
    }
}

/// A class-or-restriction reference: either side of a candidate subsumption.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassExpr {
    Named(Iri),
    Restriction(RestrictionExpr),
}

impl ClassExpr {
    pub fn as_named(&self) -> Option<&Iri> {
        match self {
            ClassExpr::Named(iri) => Some(iri),
            ClassExpr::Restriction(_) => None,
        }
    }

    pub fn as_restriction(&self) -> Option<&RestrictionExpr> {
        match self {
            ClassExpr::Restriction(r) => Some(r),
            ClassExpr::Named(_) => None,
        }
    }

    /// Stable textual key used when deriving per-item random streams.
    pub fn key(&self) -> String {
        match self {
            ClassExpr::Named(iri) => iri.to_string(),
            ClassExpr::Restriction(r) => r.to_string(),
        }
    }
}

impl From<Iri> for ClassExpr {
    fn from(iri: Iri) -> Self {
        ClassExpr::Named(iri)
    }
}

impl From<RestrictionExpr> for ClassExpr {
    fn from(r: RestrictionExpr) -> Self {
        ClassExpr::Restriction(r)
    }
}

/// Wire form of a [`ClassExpr`], shared by the eval-set and corpus files.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassExprJson {
    Named { iri: String },
    Restriction { property: String, filler_kind: String, fillers: Vec<String> },
}

impl From<&ClassExpr> for ClassExprJson {
    fn from(expr: &ClassExpr) -> Self {
        match expr {
            ClassExpr::Named(iri) => ClassExprJson::Named { iri: iri.to_string() },
            ClassExpr::Restriction(r) => ClassExprJson::Restriction {
                property: r.property.to_string(),
                filler_kind: r.filler.kind_str().to_string(),
                fillers: r.filler.classes().iter().map(Iri::to_string).collect(),
            },
        }
    }
}

impl TryFrom<ClassExprJson> for ClassExpr {
    type Error = String;

    fn try_from(value: ClassExprJson) -> Result<Self, Self::Error> {
        let iri = |s: String| Iri::try_new(s).ok_or_else(|| "empty IRI".to_string());
        match value {
            ClassExprJson::Named { iri: s } => Ok(ClassExpr::Named(iri(s)?)),
            ClassExprJson::Restriction { property, filler_kind, fillers } => {
                let fillers = fillers.into_iter().map(iri).collect::<Result<Vec<_>, _>>()?;
                RestrictionExpr::from_parts(iri(property)?, &filler_kind, fillers).map(ClassExpr::Restriction)
            }
        }
    }
}

/// An ingested ontology: named classes, labels, declared subsumptions and
/// existential-restriction subsumptions.
///
/// All collections are ordered so that equal content always compares and
/// serializes identically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    pub classes: BTreeSet<Iri>,
    pub properties: BTreeSet<Iri>,
    /// entity -> annotation property -> sorted, duplicate-free label strings
    pub labels: BTreeMap<Iri, BTreeMap<Iri, Vec<String>>>,
    pub named_subsumptions: BTreeSet<(Iri, Iri)>,
    pub restriction_axioms: BTreeSet<(Iri, RestrictionExpr)>,
}

impl Ontology {
    pub fn add_label(&mut self, entity: Iri, property: Iri, value: String) {
        let values = self.labels.entry(entity).or_default().entry(property).or_default();
        if let Err(pos) = values.binary_search(&value) {
            values.insert(pos, value);
        }
    }

    pub fn labels_for(&self, entity: &Iri, property: &Iri) -> &[String] {
        self.labels.get(entity).and_then(|by_prop| by_prop.get(property)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct restrictions used as subsumers anywhere in the ontology.
    pub fn restriction_inventory(&self) -> BTreeSet<RestrictionExpr> {
        self.restriction_axioms.iter().map(|(_, r)| r.clone()).collect()
    }

    /// Removes a class with its labels, incident declared edges and every
    /// restriction axiom mentioning it. Nothing is re-wired.
    pub fn remove_class(&mut self, class: &Iri) {
        self.classes.remove(class);
        self.labels.remove(class);
        self.named_subsumptions.retain(|(c, p)| c != class && p != class);
        self.restriction_axioms.retain(|(c, r)| c != class && !r.filler.classes().contains(class));
    }
}
