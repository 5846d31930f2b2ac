//! Normalized JSON exchange format:
//!
//! ```json
//! { "classes": [iri], "properties": [iri],
//!   "labels": [{"iri": .., "prop": .., "values": [..]}],
//!   "subclass_of": [[child, parent]],
//!   "restrictions": [{"child": .., "property": .., "filler_kind": "named"|"and"|"or", "fillers": [iri]}] }
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::model::{Iri, Ontology, RestrictionExpr};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OntologyDoc {
    classes: Vec<String>,
    properties: Vec<String>,
    labels: Vec<LabelEntry>,
    subclass_of: Vec<(String, String)>,
    restrictions: Vec<RestrictionEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelEntry {
    iri: String,
    prop: String,
    values: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RestrictionEntry {
    child: String,
    property: String,
    filler_kind: String,
    fillers: Vec<String>,
}

fn violation(path: impl Into<String>, detail: impl Into<String>) -> IoError {
    IoError::SchemaViolation { path: path.into(), detail: detail.into() }
}

fn iri_at(value: &str, path: impl Fn() -> String) -> Result<Iri, IoError> {
    Iri::try_new(value).ok_or_else(|| violation(path(), "empty IRI"))
}

pub fn parse_ontology_json<R: Read>(reader: R) -> Result<Ontology, IoError> {
    let mut de = serde_json::Deserializer::from_reader(reader);
    let doc: OntologyDoc = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        violation(format!("$.{path}").trim_end_matches('.'), e.into_inner().to_string())
    })?;
    de.end().map_err(|e| violation("$", e.to_string()))?;

    let mut o = Ontology::default();
    for (i, c) in doc.classes.iter().enumerate() {
        o.classes.insert(iri_at(c, || format!("$.classes[{i}]"))?);
    }
    for (i, p) in doc.properties.iter().enumerate() {
        o.properties.insert(iri_at(p, || format!("$.properties[{i}]"))?);
    }
    for (i, entry) in doc.labels.into_iter().enumerate() {
        let entity = iri_at(&entry.iri, || format!("$.labels[{i}].iri"))?;
        let prop = iri_at(&entry.prop, || format!("$.labels[{i}].prop"))?;
        for value in entry.values {
            o.add_label(entity.clone(), prop.clone(), value);
        }
    }
    for (i, (child, parent)) in doc.subclass_of.iter().enumerate() {
        let child = iri_at(child, || format!("$.subclass_of[{i}][0]"))?;
        let parent = iri_at(parent, || format!("$.subclass_of[{i}][1]"))?;
        if child == parent {
            return Err(violation(format!("$.subclass_of[{i}]"), "reflexive subsumption"));
        }
        for (j, c) in [&child, &parent].into_iter().enumerate() {
            if !o.classes.contains(c) {
                return Err(violation(format!("$.subclass_of[{i}][{j}]"), format!("undeclared class {c}")));
            }
        }
        o.named_subsumptions.insert((child, parent));
    }
    for (i, entry) in doc.restrictions.into_iter().enumerate() {
        let child = iri_at(&entry.child, || format!("$.restrictions[{i}].child"))?;
        if !o.classes.contains(&child) {
            return Err(violation(format!("$.restrictions[{i}].child"), format!("undeclared class {child}")));
        }
        let property = iri_at(&entry.property, || format!("$.restrictions[{i}].property"))?;
        if !o.properties.contains(&property) {
            return Err(violation(format!("$.restrictions[{i}].property"), format!("undeclared property {property}")));
        }
        let mut fillers = Vec::with_capacity(entry.fillers.len());
        for (j, f) in entry.fillers.iter().enumerate() {
            let f = iri_at(f, || format!("$.restrictions[{i}].fillers[{j}]"))?;
            if !o.classes.contains(&f) {
                return Err(violation(format!("$.restrictions[{i}].fillers[{j}]"), format!("undeclared class {f}")));
            }
            fillers.push(f);
        }
        let r = RestrictionExpr::from_parts(property, &entry.filler_kind, fillers)
            .map_err(|detail| violation(format!("$.restrictions[{i}]"), detail))?;
        o.restriction_axioms.insert((child, r));
    }
    Ok(o)
}

pub fn write_ontology_json<W: Write>(o: &Ontology, writer: W) -> Result<(), IoError> {
    let doc = OntologyDoc {
        classes: o.classes.iter().map(Iri::to_string).collect(),
        properties: o.properties.iter().map(Iri::to_string).collect(),
        labels: o
            .labels
            .iter()
            .flat_map(|(iri, by_prop)| {
                by_prop.iter().map(move |(prop, values)| LabelEntry {
                    iri: iri.to_string(),
                    prop: prop.to_string(),
                    values: values.clone(),
                })
            })
            .collect(),
        subclass_of: o.named_subsumptions.iter().map(|(c, p)| (c.to_string(), p.to_string())).collect(),
        restrictions: o
            .restriction_axioms
            .iter()
            .map(|(child, r)| RestrictionEntry {
                child: child.to_string(),
                property: r.property.to_string(),
                filler_kind: r.filler.kind_str().to_string(),
                fillers: r.filler.classes().iter().map(Iri::to_string).collect(),
            })
            .collect(),
    };
    let mut writer = writer;
    serde_json::to_writer_pretty(&mut writer, &doc).map_err(std::io::Error::from)?;
    writer.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EMPTY: &str = r#"{"classes":[],"properties":[],"labels":[],"subclass_of":[],"restrictions":[]}"#;

    #[test]
    fn empty_document_is_empty_ontology() {
        assert_eq!(parse_ontology_json(EMPTY.as_bytes()).unwrap(), Ontology::default());
    }

    #[test]
    fn missing_key_reports_path() {
        let err = parse_ontology_json(r#"{"classes":[]}"#.as_bytes()).unwrap_err();
        assert!(matches!(err, IoError::SchemaViolation { .. }), "{err}");
    }

    #[test]
    fn wrong_type_reports_json_path() {
        let doc = r#"{"classes":["a", 3],"properties":[],"labels":[],"subclass_of":[],"restrictions":[]}"#;
        match parse_ontology_json(doc.as_bytes()).unwrap_err() {
            IoError::SchemaViolation { path, .. } => assert_eq!(path, "$.classes[1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undeclared_class_in_axiom_rejected() {
        let doc = r#"{"classes":["a"],"properties":[],"labels":[],"subclass_of":[["a","b"]],"restrictions":[]}"#;
        match parse_ontology_json(doc.as_bytes()).unwrap_err() {
            IoError::SchemaViolation { path, .. } => assert_eq!(path, "$.subclass_of[0][1]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_filler_kind_rejected() {
        let doc = r#"{"classes":["a","b"],"properties":["r"],"labels":[],"subclass_of":[],
            "restrictions":[{"child":"a","property":"r","filler_kind":"and","fillers":["b"]}]}"#;
        match parse_ontology_json(doc.as_bytes()).unwrap_err() {
            IoError::SchemaViolation { path, .. } => assert_eq!(path, "$.restrictions[0]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reflexive_pair_rejected() {
        let doc = r#"{"classes":["a"],"properties":[],"labels":[],"subclass_of":[["a","a"]],"restrictions":[]}"#;
        assert!(parse_ontology_json(doc.as_bytes()).is_err());
    }
}
