//! Natural-language labels for named classes, properties and existential
//! restrictions.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    ClassExpr, Filler, Iri, Ontology, RestrictionExpr, OBO_HAS_EXACT_SYNONYM, OBO_HAS_SYNONYM, RDFS_LABEL,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerbalizeError {
    #[error("no label for {0}")]
    NoLabel(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    #[default]
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPolicy {
    pub mode: LabelMode,
    /// Consulted in order; never empty.
    pub annotation_properties: Vec<Iri>,
}

impl LabelPolicy {
    pub fn single() -> Self {
        Self { mode: LabelMode::Single, annotation_properties: vec![Iri::new(RDFS_LABEL)] }
    }

    pub fn multi() -> Self {
        Self {
            mode: LabelMode::Multi,
            annotation_properties: vec![
                Iri::new(RDFS_LABEL),
                Iri::new(OBO_HAS_EXACT_SYNONYM),
                Iri::new(OBO_HAS_SYNONYM),
            ],
        }
    }

    pub fn with_properties(mode: LabelMode, annotation_properties: Vec<Iri>) -> Option<Self> {
        if annotation_properties.is_empty() {
            None
        } else {
            Some(Self { mode, annotation_properties })
        }
    }
}

impl Default for LabelPolicy {
    fn default() -> Self {
        Self::single()
    }
}

/// Property-label endings after which no connective is inserted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrepositionTable {
    prepositions: BTreeSet<String>,
}

impl PrepositionTable {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Self {
            prepositions: words
                .into_iter()
                .map(|w| w.as_ref().trim().to_lowercase())
                .filter(|w| !w.is_empty() && !w.contains(char::is_whitespace))
                .collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.prepositions.contains(&word.to_lowercase())
    }

    fn ends_with_preposition(&self, label: &str) -> bool {
        label.split_whitespace().last().is_some_and(|w| self.contains(w))
    }
}

impl Default for PrepositionTable {
    fn default() -> Self {
        Self::new(["of", "in", "on", "at", "by", "from", "to", "with", "for", "about", "as", "into", "over", "under"])
    }
}

/// Splits an IRI local name on camelCase boundaries, underscores and
/// hyphens, lowercasing the result: `ProcessedLegumes` -> `processed legumes`.
pub fn split_local_name(name: &str) -> String {
    let chars: Vec<char> = name.chars().collect();
    let mut words: Vec<String> = Vec::new();
    let mut current = String::new();
    for (i, &ch) in chars.iter().enumerate() {
        if ch == '_' || ch == '-' || ch.is_whitespace() {
            if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
            continue;
        }
        if ch.is_uppercase() && !current.is_empty() {
            let prev = chars[i - 1];
            let next_lower = chars.get(i + 1).is_some_and(|c| c.is_lowercase());
            // "processedLegumes" and the "S" in "HTTPServer"
            if prev.is_lowercase() || prev.is_ascii_digit() || (prev.is_uppercase() && next_lower) {
                words.push(std::mem::take(&mut current));
            }
        }
        current.extend(ch.to_lowercase());
    }
    if !current.is_empty() {
        words.push(current);
    }
    words.join(" ")
}

/// Labels of a named entity (class or property) under `policy`.
pub fn class_labels(o: &Ontology, c: &Iri, policy: &LabelPolicy) -> Result<Vec<String>, VerbalizeError> {
    let mut out: Vec<String> = Vec::new();
    match policy.mode {
        LabelMode::Single => {
            if let Some(first) = policy
                .annotation_properties
                .iter()
                .find_map(|p| o.labels_for(c, p).iter().find(|l| !l.trim().is_empty()))
            {
                out.push(first.clone());
            }
        }
        LabelMode::Multi => {
            let mut seen = BTreeSet::new();
            for p in &policy.annotation_properties {
                for label in o.labels_for(c, p) {
                    if !label.trim().is_empty() && seen.insert(label.to_lowercase()) {
                        out.push(label.clone());
                    }
                }
            }
        }
    }
    if out.is_empty() {
        let fallback = split_local_name(c.local_name());
        if fallback.is_empty() {
            return Err(VerbalizeError::NoLabel(c.clone()));
        }
        out.push(fallback);
    }
    Ok(out)
}

fn cartesian(options: &[Vec<String>]) -> Vec<Vec<&str>> {
    let mut acc: Vec<Vec<&str>> = vec![Vec::new()];
    for choices in options {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c.as_str());
                    next
                })
            })
            .collect();
    }
    acc
}

/// Renders `some r . F` as "something L(r) [of] L(F)"; conjunctive and
/// disjunctive fillers join their class labels with "and" / "or".
pub fn verbalize_restriction(
    o: &Ontology,
    r: &RestrictionExpr,
    policy: &LabelPolicy,
    preps: &PrepositionTable,
) -> Result<Vec<String>, VerbalizeError> {
    let property_labels = class_labels(o, &r.property, policy)?;
    let filler_labels = r.filler.classes().iter().map(|c| class_labels(o, c, policy)).collect::<Result<Vec<_>, _>>()?;
    let joiner = match r.filler {
        Filler::Named(_) | Filler::And(_) => " and ",
        Filler::Or(_) => " or ",
    };
    let fillers: Vec<String> = cartesian(&filler_labels).into_iter().map(|parts| parts.join(joiner)).collect();
    let mut out = Vec::with_capacity(property_labels.len() * fillers.len());
    for p in &property_labels {
        let connective = if preps.ends_with_preposition(p) { "" } else { " of" };
        for f in &fillers {
            out.push(format!("something {p}{connective} {f}"));
        }
    }
    Ok(out)
}

/// Labels of either side of a subsumption.
pub fn expr_labels(
    o: &Ontology,
    expr: &ClassExpr,
    policy: &LabelPolicy,
    preps: &PrepositionTable,
) -> Result<Vec<String>, VerbalizeError> {
    match expr {
        ClassExpr::Named(c) => class_labels(o, c, policy),
        ClassExpr::Restriction(r) => verbalize_restriction(o, r, policy, preps),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://example.org/{s}"))
    }

    fn labelled(entries: &[(&str, &str, &str)]) -> Ontology {
        let mut o = Ontology::default();
        for (c, prop, value) in entries {
            o.classes.insert(iri(c));
            o.add_label(iri(c), Iri::new(*prop), value.to_string());
        }
        o
    }

    #[test]
    fn local_name_splitting() {
        assert_eq!(split_local_name("ProcessedLegumes"), "processed legumes");
        assert_eq!(split_local_name("has_quality"), "has quality");
        assert_eq!(split_local_name("derives-from"), "derives from");
        assert_eq!(split_local_name("HTTPServer"), "http server");
        assert_eq!(split_local_name(""), "");
    }

    #[test]
    fn iri_fallback_for_unlabelled_class() {
        let o = Ontology::default();
        let c = Iri::new("http://www.bl.uk/helis#ProcessedLegumes");
        assert_eq!(class_labels(&o, &c, &LabelPolicy::single()).unwrap(), vec!["processed legumes"]);
        let compact = Iri::new("vc:ProcessedLegumes");
        assert_eq!(class_labels(&o, &compact, &LabelPolicy::multi()).unwrap(), vec!["processed legumes"]);
    }

    #[test]
    fn empty_local_name_is_no_label() {
        let c = Iri::new("http://example.org/");
        assert_eq!(class_labels(&Ontology::default(), &c, &LabelPolicy::single()), Err(VerbalizeError::NoLabel(c)));
    }

    #[test]
    fn single_mode_takes_first_property_then_lexicographic() {
        let o =
            labelled(&[("a", OBO_HAS_EXACT_SYNONYM, "aardvark"), ("a", RDFS_LABEL, "zebra"), ("a", RDFS_LABEL, "yak")]);
        let policy = LabelPolicy::with_properties(
            LabelMode::Single,
            vec![Iri::new(RDFS_LABEL), Iri::new(OBO_HAS_EXACT_SYNONYM)],
        )
        .unwrap();
        assert_eq!(class_labels(&o, &iri("a"), &policy).unwrap(), vec!["yak"]);
    }

    #[test]
    fn multi_mode_dedups_case_insensitively_in_policy_order() {
        let o = labelled(&[
            ("a", OBO_HAS_SYNONYM, "Soy Milk"),
            ("a", OBO_HAS_EXACT_SYNONYM, "soy milk"),
            ("a", RDFS_LABEL, "soybean milk"),
        ]);
        assert_eq!(class_labels(&o, &iri("a"), &LabelPolicy::multi()).unwrap(), vec!["soybean milk", "soy milk"]);
    }

    #[test]
    fn property_ending_in_preposition_gets_no_connective() {
        let o = labelled(&[("r", RDFS_LABEL, "derives from"), ("c", RDFS_LABEL, "soybean plant")]);
        let r = RestrictionExpr::named(iri("r"), iri("c"));
        let out = verbalize_restriction(&o, &r, &LabelPolicy::single(), &PrepositionTable::default()).unwrap();
        assert_eq!(out, vec!["something derives from soybean plant"]);
    }

    #[test]
    fn of_inserted_after_non_preposition() {
        let o = labelled(&[("r", RDFS_LABEL, "has quality"), ("c", RDFS_LABEL, "crunchy")]);
        let r = RestrictionExpr::named(iri("r"), iri("c"));
        let out = verbalize_restriction(&o, &r, &LabelPolicy::single(), &PrepositionTable::default()).unwrap();
        assert_eq!(out, vec!["something has quality of crunchy"]);
    }

    #[test]
    fn conjunction_and_disjunction() {
        let o = labelled(&[("r", RDFS_LABEL, "part of"), ("c1", RDFS_LABEL, "a"), ("c2", RDFS_LABEL, "b")]);
        let preps = PrepositionTable::default();
        let and = RestrictionExpr::from_parts(iri("r"), "and", vec![iri("c1"), iri("c2")]).unwrap();
        let or = RestrictionExpr::from_parts(iri("r"), "or", vec![iri("c1"), iri("c2")]).unwrap();
        assert_eq!(
            verbalize_restriction(&o, &and, &LabelPolicy::single(), &preps).unwrap(),
            vec!["something part of a and b"]
        );
        assert_eq!(
            verbalize_restriction(&o, &or, &LabelPolicy::single(), &preps).unwrap(),
            vec!["something part of a or b"]
        );
    }

    #[test]
    fn multi_mode_restriction_is_cross_product() {
        let o = labelled(&[
            ("r", RDFS_LABEL, "derives from"),
            ("r", OBO_HAS_EXACT_SYNONYM, "comes from"),
            ("c", RDFS_LABEL, "soybean plant"),
            ("c", OBO_HAS_EXACT_SYNONYM, "soya plant"),
        ]);
        let r = RestrictionExpr::named(iri("r"), iri("c"));
        let out = verbalize_restriction(&o, &r, &LabelPolicy::multi(), &PrepositionTable::default()).unwrap();
        assert_eq!(out.len(), 4);
        assert!(out.contains(&"something comes from soya plant".to_string()));
    }

    #[test]
    fn custom_preposition_table() {
        let o = labelled(&[("r", RDFS_LABEL, "has quality"), ("c", RDFS_LABEL, "x")]);
        let r = RestrictionExpr::named(iri("r"), iri("c"));
        let preps = PrepositionTable::new(["Quality"]);
        let out = verbalize_restriction(&o, &r, &LabelPolicy::single(), &preps).unwrap();
        assert_eq!(out, vec!["something has quality x"]);
    }
}
