//! Line-oriented N-Triples ingestion into an owned triple set.

use std::io::BufRead;

use rio_api::model::{Literal, Subject, Term as RioTerm};
use rio_api::parser::{ParseError, TriplesParser};
use rio_turtle::{NTriplesParser, TurtleError};

use super::IoError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Iri(String),
    Blank(String),
    Literal { value: String, language: Option<String> },
}

impl Term {
    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_blank(&self) -> Option<&str> {
        match self {
            Term::Blank(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triple {
    pub subject: Term,
    pub predicate: String,
    pub object: Term,
}

pub type TripleSet = Vec<Triple>;

fn convert_subject(s: Subject<'_>) -> Result<Term, String> {
    match s {
        Subject::NamedNode(n) => Ok(Term::Iri(n.iri.to_string())),
        Subject::BlankNode(b) => Ok(Term::Blank(b.id.to_string())),
        Subject::Triple(_) => Err("quoted triples are not N-Triples".into()),
    }
}

fn convert_object(t: RioTerm<'_>) -> Result<Term, String> {
    match t {
        RioTerm::NamedNode(n) => Ok(Term::Iri(n.iri.to_string())),
        RioTerm::BlankNode(b) => Ok(Term::Blank(b.id.to_string())),
        RioTerm::Literal(Literal::Simple { value }) | RioTerm::Literal(Literal::Typed { value, .. }) => {
            Ok(Term::Literal { value: value.to_string(), language: None })
        }
        RioTerm::Literal(Literal::LanguageTaggedString { value, language }) => {
            Ok(Term::Literal { value: value.to_string(), language: Some(language.to_ascii_lowercase()) })
        }
        RioTerm::Triple(_) => Err("quoted triples are not N-Triples".into()),
    }
}

/// Parses an N-Triples stream. Blank and comment lines are skipped; the
/// first malformed line aborts parsing with its 1-based line number.
pub fn parse_ntriples<R: BufRead>(reader: R) -> Result<TripleSet, IoError> {
    let mut triples = Vec::new();
    let mut parser = NTriplesParser::new(reader);
    let mut conversion_error: Option<String> = None;
    let result: Result<(), TurtleError> = parser.parse_all(&mut |t| {
        match (convert_subject(t.subject), convert_object(t.object)) {
            (Ok(subject), Ok(object)) => {
                triples.push(Triple { subject, predicate: t.predicate.iri.to_string(), object })
            }
            (Err(e), _) | (_, Err(e)) => {
                conversion_error.get_or_insert(e);
            }
        }
        Ok(())
    });
    if let Err(err) = result {
        let line = err.textual_position().map(|p| p.line_number()).unwrap_or(0);
        return Err(IoError::MalformedTriple { line, detail: err.to_string() });
    }
    if let Some(detail) = conversion_error {
        return Err(IoError::MalformedTriple { line: 0, detail });
    }
    Ok(triples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_stream_is_empty() {
        assert!(parse_ntriples(&b""[..]).unwrap().is_empty());
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let doc = b"# header\n\n<http://a> <http://b> <http://c> .\n   \n";
        assert_eq!(parse_ntriples(&doc[..]).unwrap().len(), 1);
    }

    #[test]
    fn language_tagged_literal() {
        let doc = b"<http://ex/a> <http://ex/b> \"x\"@en .\n";
        let triples = parse_ntriples(&doc[..]).unwrap();
        assert_eq!(triples.len(), 1);
        assert_eq!(triples[0].object, Term::Literal { value: "x".into(), language: Some("en".into()) });
    }

    #[test]
    fn blank_nodes_classified() {
        let doc = b"_:b0 <http://ex/p> _:b1 .\n";
        let t = &parse_ntriples(&doc[..]).unwrap()[0];
        assert_eq!(t.subject, Term::Blank("b0".into()));
        assert_eq!(t.object, Term::Blank("b1".into()));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let doc = b"<http://a> <http://b> <http://c> .\n# ok\n<http://a> <http://b> .\n";
        match parse_ntriples(&doc[..]) {
            Err(IoError::MalformedTriple { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
