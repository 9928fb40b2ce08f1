//! Core RDF data model, indexed in-memory dataset, N-Triples / Turtle
//! serialization and the climate-analysis ontology.

pub mod dataset;
pub mod model;
pub mod ntriples;
pub mod ontology;
pub mod turtle;
pub mod vocab;

pub use dataset::{Dataset, GraphScope, TermId};
pub use model::{Iri, Literal, ModelError, Quad, Term, Triple};
pub use ntriples::{parse_nquads, parse_ntriples, serialize_nquads, serialize_ntriples, SyntaxError};
pub use ontology::{ObjectKind, Ontology, OntologyError, ResourceKind};
pub use turtle::{parse_turtle, write_turtle};
