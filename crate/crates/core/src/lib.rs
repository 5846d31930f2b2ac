//! Sentence-pair corpora and ranking evaluation for OWL class subsumption
//! prediction.

pub mod corpus;
pub mod eval;
pub mod hierarchy;
pub mod io;
pub mod model;
pub mod par;
pub mod rng;
pub mod sampling;
pub mod scorer;
pub mod templates;
pub mod verbalizer;
