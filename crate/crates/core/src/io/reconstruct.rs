//! Rebuilds an [`Ontology`] from the OWL-to-RDF mapping of its axioms.
//!
//! Existential restrictions arrive as blank nodes:
//!
//! ```text
//! A rdfs:subClassOf _:r .
//! _:r rdf:type owl:Restriction ; owl:onProperty r ; owl:someValuesFrom X .
//! ```
//!
//! where `X` is either a class IRI or a blank node carrying an
//! `owl:intersectionOf` / `owl:unionOf` RDF list of class IRIs. Anything
//! deeper is skipped and counted.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::*;

use super::ntriples::{Term, Triple};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    /// Annotation properties harvested as labels.
    pub label_properties: Vec<Iri>,
    /// Keep literals with this language tag (plus untagged ones); `None`
    /// keeps every literal.
    pub language: Option<String>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            label_properties: vec![Iri::new(RDFS_LABEL), Iri::new(OBO_HAS_EXACT_SYNONYM), Iri::new(OBO_HAS_SYNONYM)],
            language: Some("en".to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum IngestIssue {
    /// Restriction node without `owl:onProperty` or `owl:someValuesFrom`.
    DanglingRestriction { node: String, child: Iri },
    /// Subsumer that is a blank node outside the supported forms.
    UnsupportedRestriction { node: String, child: Iri },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub issues: Vec<IngestIssue>,
}

impl IngestReport {
    pub fn dangling(&self) -> usize {
        self.issues.iter().filter(|i| matches!(i, IngestIssue::DanglingRestriction { .. })).count()
    }

    pub fn unsupported(&self) -> usize {
        self.issues.iter().filter(|i| matches!(i, IngestIssue::UnsupportedRestriction { .. })).count()
    }
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub ontology: Ontology,
    pub report: IngestReport,
}

/// Outgoing edges of one blank node, by predicate.
type BlankIndex<'a> = BTreeMap<&'a str, BTreeMap<&'a str, Vec<&'a Term>>>;

enum Resolved {
    Ok(RestrictionExpr),
    Dangling,
    Unsupported,
}

struct Resolver<'a> {
    blanks: BlankIndex<'a>,
}

impl<'a> Resolver<'a> {
    fn objects(&self, node: &str, predicate: &str) -> &[&'a Term] {
        self.blanks.get(node).and_then(|m| m.get(predicate)).map(Vec::as_slice).unwrap_or(&[])
    }

    fn has_type(&self, node: &str, ty: &str) -> bool {
        self.objects(node, RDF_TYPE).iter().any(|t| t.as_iri() == Some(ty))
    }

    fn single(&self, node: &str, predicate: &str) -> Option<&'a Term> {
        match self.objects(node, predicate) {
            [one] => Some(*one),
            _ => None,
        }
    }

    fn restriction(&self, node: &str) -> Resolved {
        let is_restriction = self.has_type(node, OWL_RESTRICTION)
            || !self.objects(node, OWL_ON_PROPERTY).is_empty()
            || !self.objects(node, OWL_SOME_VALUES_FROM).is_empty();
        if !is_restriction {
            return Resolved::Unsupported;
        }
        let property = self.single(node, OWL_ON_PROPERTY).and_then(Term::as_iri);
        let filler = self.single(node, OWL_SOME_VALUES_FROM);
        let (Some(property), Some(filler)) = (property, filler) else {
            let other_kind = self.blanks.get(node).is_some_and(|m| {
                m.keys().any(|p| {
                    p.starts_with("http://www.w3.org/2002/07/owl#")
                        && *p != OWL_ON_PROPERTY
                        && *p != OWL_SOME_VALUES_FROM
                })
            });
            // universal / cardinality / hasValue restrictions are a different construct
            return if other_kind && !self.objects(node, OWL_ON_PROPERTY).is_empty() {
                Resolved::Unsupported
            } else {
                Resolved::Dangling
            };
        };
        let property = Iri::new(property);
        match filler {
            Term::Iri(c) => Resolved::Ok(RestrictionExpr::named(property, Iri::new(c.as_str()))),
            Term::Blank(b) => {
                let (kind, list) = match (self.single(b, OWL_INTERSECTION_OF), self.single(b, OWL_UNION_OF)) {
                    (Some(list), None) => ("and", list),
                    (None, Some(list)) => ("or", list),
                    _ => return Resolved::Unsupported,
                };
                let Some(members) = self.iri_list(list) else {
                    return Resolved::Unsupported;
                };
                match RestrictionExpr::from_parts(property, kind, members) {
                    Ok(r) => Resolved::Ok(r),
                    Err(_) => Resolved::Unsupported,
                }
            }
            Term::Literal { .. } => Resolved::Unsupported,
        }
    }

    /// Reads an RDF collection whose members are all IRIs.
    fn iri_list(&self, head: &Term) -> Option<Vec<Iri>> {
        let mut out = Vec::new();
        let mut cursor = head;
        let mut seen = BTreeSet::new();
        loop {
            match cursor {
                Term::Iri(nil) if nil == RDF_NIL => return Some(out),
                Term::Blank(node) => {
                    if !seen.insert(node.as_str()) {
                        return None;
                    }
                    let first = self.single(node, RDF_FIRST)?.as_iri()?;
                    out.push(Iri::new(first));
                    cursor = self.single(node, RDF_REST)?;
                }
                _ => return None,
            }
        }
    }
}

fn literal_accepted(language: &Option<String>, config: &IngestConfig) -> bool {
    match (&config.language, language) {
        (None, _) | (_, None) => true,
        (Some(want), Some(have)) => {
            have.eq_ignore_ascii_case(want)
                || have.to_ascii_lowercase().starts_with(&format!("{}-", want.to_ascii_lowercase()))
        }
    }
}

/// Reconstructs the ontology. Malformed restrictions are skipped and
/// listed in the report; the result does not depend on triple order.
pub fn reconstruct_ontology(triples: &[Triple], config: &IngestConfig) -> Ingested {
    let mut blanks: BlankIndex<'_> = BTreeMap::new();
    for t in triples {
        if let Term::Blank(b) = &t.subject {
            blanks.entry(b.as_str()).or_default().entry(t.predicate.as_str()).or_default().push(&t.object);
        }
    }
    for preds in blanks.values_mut() {
        for objects in preds.values_mut() {
            objects.sort();
            objects.dedup();
        }
    }
    let resolver = Resolver { blanks };

    let label_props: BTreeSet<&str> = config.label_properties.iter().map(Iri::as_str).collect();
    let mut ontology = Ontology::default();
    let mut issues = BTreeSet::new();

    for t in triples {
        let Term::Iri(subject) = &t.subject else { continue };
        match (t.predicate.as_str(), &t.object) {
            (RDF_TYPE, Term::Iri(ty)) if ty == OWL_CLASS => {
                if subject != OWL_THING {
                    ontology.classes.insert(Iri::new(subject.as_str()));
                }
            }
            (RDF_TYPE, Term::Iri(ty)) if ty == OWL_OBJECT_PROPERTY => {
                ontology.properties.insert(Iri::new(subject.as_str()));
            }
            (RDFS_SUBCLASS_OF, Term::Iri(parent)) => {
                if subject == OWL_THING {
                    continue;
                }
                let child = Iri::new(subject.as_str());
                ontology.classes.insert(child.clone());
                if parent == OWL_THING {
                    continue;
                }
                let parent = Iri::new(parent.as_str());
                ontology.classes.insert(parent.clone());
                if child != parent {
                    ontology.named_subsumptions.insert((child, parent));
                }
            }
            (RDFS_SUBCLASS_OF, Term::Blank(node)) => {
                let child = Iri::new(subject.as_str());
                ontology.classes.insert(child.clone());
                match resolver.restriction(node) {
                    Resolved::Ok(r) => {
                        ontology.properties.insert(r.property.clone());
                        ontology.classes.extend(r.filler.classes().iter().cloned());
                        ontology.restriction_axioms.insert((child, r));
                    }
                    Resolved::Dangling => {
                        issues.insert(IngestIssue::DanglingRestriction { node: node.clone(), child });
                    }
                    Resolved::Unsupported => {
                        issues.insert(IngestIssue::UnsupportedRestriction { node: node.clone(), child });
                    }
                }
            }
            (pred, Term::Literal { value, language })
                if label_props.contains(pred) && literal_accepted(language, config) =>
            {
                ontology.add_label(Iri::new(subject.as_str()), Iri::new(pred), value.clone());
            }
            _ => {}
        }
    }
    // Fillers typed owl:Thing never enter the class set.
    ontology.classes.remove(&Iri::new(OWL_THING));

    let issues: Vec<IngestIssue> = issues.into_iter().collect();
    for issue in &issues {
        log::debug!("skipped restriction: {issue:?}");
    }
    Ingested { ontology, report: IngestReport { issues } }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_ntriples;

    const EX: &str = "http://example.org/";

    fn iri(local: &str) -> Iri {
        Iri::new(format!("{EX}{local}"))
    }

    fn ingest(doc: &str) -> Ingested {
        let triples = parse_ntriples(doc.as_bytes()).unwrap();
        reconstruct_ontology(&triples, &IngestConfig::default())
    }

    fn restriction_doc(extra: &str) -> String {
        format!(
            "<{EX}A> <{RDFS_SUBCLASS_OF}> _:b0 .\n\
             _:b0 <{RDF_TYPE}> <{OWL_RESTRICTION}> .\n\
             _:b0 <{OWL_ON_PROPERTY}> <{EX}r> .\n{extra}"
        )
    }

    #[test]
    fn named_subsumption_maps_directly() {
        let ing = ingest(&format!("<{EX}A> <{RDFS_SUBCLASS_OF}> <{EX}B> .\n"));
        assert_eq!(ing.ontology.named_subsumptions, BTreeSet::from([(iri("A"), iri("B"))]));
        assert_eq!(ing.ontology.classes, BTreeSet::from([iri("A"), iri("B")]));
    }

    #[test]
    fn existential_restriction_reconstructed() {
        let doc = restriction_doc(&format!("_:b0 <{OWL_SOME_VALUES_FROM}> <{EX}B> .\n"));
        let ing = ingest(&doc);
        assert!(ing.report.issues.is_empty());
        assert_eq!(
            ing.ontology.restriction_axioms,
            BTreeSet::from([(iri("A"), RestrictionExpr::named(iri("r"), iri("B")))])
        );
        assert!(ing.ontology.named_subsumptions.is_empty());
        assert!(ing.ontology.properties.contains(&iri("r")));
        assert!(ing.ontology.classes.contains(&iri("B")));
    }

    #[test]
    fn intersection_filler_becomes_conjunction() {
        let doc = restriction_doc(&format!(
            "_:b0 <{OWL_SOME_VALUES_FROM}> _:f .\n\
             _:f <{OWL_INTERSECTION_OF}> _:l1 .\n\
             _:l1 <{RDF_FIRST}> <{EX}C2> .\n_:l1 <{RDF_REST}> _:l2 .\n\
             _:l2 <{RDF_FIRST}> <{EX}C1> .\n_:l2 <{RDF_REST}> <{RDF_NIL}> .\n"
        ));
        let ing = ingest(&doc);
        let (_, r) = ing.ontology.restriction_axioms.iter().next().unwrap();
        assert_eq!(r.filler, Filler::And(vec![iri("C2"), iri("C1")]));
    }

    #[test]
    fn union_filler_becomes_disjunction() {
        let doc = restriction_doc(&format!(
            "_:b0 <{OWL_SOME_VALUES_FROM}> _:f .\n\
             _:f <{OWL_UNION_OF}> _:l1 .\n\
             _:l1 <{RDF_FIRST}> <{EX}C1> .\n_:l1 <{RDF_REST}> _:l2 .\n\
             _:l2 <{RDF_FIRST}> <{EX}C2> .\n_:l2 <{RDF_REST}> <{RDF_NIL}> .\n"
        ));
        let (_, r) = ingest(&doc).ontology.restriction_axioms.into_iter().next().unwrap();
        assert_eq!(r.filler, Filler::Or(vec![iri("C1"), iri("C2")]));
    }

    #[test]
    fn missing_filler_is_dangling() {
        let ing = ingest(&restriction_doc(""));
        assert!(ing.ontology.restriction_axioms.is_empty());
        assert_eq!(ing.report.dangling(), 1);
        assert!(ing.ontology.classes.contains(&iri("A")));
    }

    #[test]
    fn nested_filler_is_unsupported() {
        let doc = restriction_doc(&format!(
            "_:b0 <{OWL_SOME_VALUES_FROM}> _:f .\n\
             _:f <{OWL_INTERSECTION_OF}> _:l1 .\n\
             _:l1 <{RDF_FIRST}> <{EX}C1> .\n_:l1 <{RDF_REST}> _:l2 .\n\
             _:l2 <{RDF_FIRST}> _:inner .\n_:l2 <{RDF_REST}> <{RDF_NIL}> .\n\
             _:inner <{RDF_TYPE}> <{OWL_RESTRICTION}> .\n"
        ));
        let ing = ingest(&doc);
        assert!(ing.ontology.restriction_axioms.is_empty());
        assert_eq!(ing.report.unsupported(), 1);
        assert_eq!(ing.report.dangling(), 0);
    }

    #[test]
    fn universal_restriction_is_unsupported_not_dangling() {
        let doc = restriction_doc(&format!("_:b0 <http://www.w3.org/2002/07/owl#allValuesFrom> <{EX}B> .\n"));
        let ing = ingest(&doc);
        assert_eq!(ing.report.unsupported(), 1);
    }

    #[test]
    fn labels_filtered_by_language_and_kept_verbatim() {
        let doc = format!(
            "<{EX}A> <{RDFS_LABEL}> \"Soybean Milk\"@en .\n\
             <{EX}A> <{RDFS_LABEL}> \"lait de soja\"@fr .\n\
             <{EX}A> <{RDFS_LABEL}> \"soy milk\" .\n"
        );
        let ing = ingest(&doc);
        assert_eq!(
            ing.ontology.labels_for(&iri("A"), &Iri::new(RDFS_LABEL)),
            &["Soybean Milk".to_string(), "soy milk".to_string()]
        );
    }

    #[test]
    fn owl_thing_never_becomes_a_class() {
        let doc = format!("<{EX}A> <{RDFS_SUBCLASS_OF}> <{OWL_THING}> .\n<{OWL_THING}> <{RDF_TYPE}> <{OWL_CLASS}> .\n");
        let ing = ingest(&doc);
        assert_eq!(ing.ontology.classes, BTreeSet::from([iri("A")]));
        assert!(ing.ontology.named_subsumptions.is_empty());
    }

    #[test]
    fn reflexive_subclass_dropped() {
        let ing = ingest(&format!("<{EX}A> <{RDFS_SUBCLASS_OF}> <{EX}A> .\n"));
        assert!(ing.ontology.named_subsumptions.is_empty());
    }
}
