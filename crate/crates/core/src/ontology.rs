//! The climate-analysis (CA) vocabulary: classes per CDO endpoint,
//! properties per CDO JSON field, alignment axioms and resource IRI minting.

use std::fmt;
use std::str::FromStr;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use crate::model::{Iri, Literal, Term, Triple};
use crate::vocab::{aemet, owl, qudt, rdf, rdfs, sosa, wgs84, COMMON_PREFIXES};

pub const DEFAULT_BASE: &str = "http://jresearch.ucd.ie/climate-kg/";

/// Characters escaped in the id segment of a resource IRI. Colons stay
/// literal so NOAA ids such as `GHCND:EI000003969` read naturally.
const ID_SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~').remove(b':');

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("unknown CDO endpoint {0:?}")]
    UnknownEndpoint(String),
    #[error("no property is mapped to field {0:?}")]
    UnknownField(String),
    #[error("unknown resource kind {0:?}")]
    UnknownResourceKind(String),
    #[error("resource id must not be empty")]
    EmptyId,
    #[error("invalid base IRI: {0}")]
    InvalidBase(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Class,
    Property,
}

/// A vocabulary entry as namespace + local name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabTerm {
    pub namespace: String,
    pub local: String,
    pub kind: TermKind,
}

impl VocabTerm {
    pub fn iri(&self) -> Iri {
        Iri::new(format!("{}{}", self.namespace, self.local)).expect("vocabulary IRIs are valid")
    }
}

/// How a mapped JSON value becomes an RDF object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    LiteralString,
    LiteralDouble,
    LiteralDateTime,
    LiteralDate,
    ResourceRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassMapping {
    pub endpoint: &'static str,
    pub class_iri: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyMapping {
    pub json_field: &'static str,
    pub property_iri: Iri,
    pub object_kind: ObjectKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlignmentRelation {
    SubClassOf,
    SameAs,
    EquivalentProperty,
}

impl AlignmentRelation {
    pub fn iri(self) -> Iri {
        Iri::from_static(match self {
            AlignmentRelation::SubClassOf => rdfs::SUB_CLASS_OF,
            AlignmentRelation::SameAs => owl::SAME_AS,
            AlignmentRelation::EquivalentProperty => owl::EQUIVALENT_PROPERTY,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentAxiom {
    pub subject: Iri,
    pub relation: AlignmentRelation,
    pub object: Iri,
}

/// Kinds of minted resources; the path segment after `resource/`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceKind {
    Dataset,
    DataCategory,
    DataType,
    LocationCategory,
    Location,
    Station,
    Observation,
    Result,
}

impl ResourceKind {
    pub const ALL: [ResourceKind; 8] = [
        ResourceKind::Dataset,
        ResourceKind::DataCategory,
        ResourceKind::DataType,
        ResourceKind::LocationCategory,
        ResourceKind::Location,
        ResourceKind::Station,
        ResourceKind::Observation,
        ResourceKind::Result,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceKind::Dataset => "dataset",
            ResourceKind::DataCategory => "datacategory",
            ResourceKind::DataType => "datatype",
            ResourceKind::LocationCategory => "locationcategory",
            ResourceKind::Location => "location",
            ResourceKind::Station => "station",
            ResourceKind::Observation => "observation",
            ResourceKind::Result => "result",
        }
    }
}

impl fmt::Display for ResourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResourceKind {
    type Err = OntologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResourceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| OntologyError::UnknownResourceKind(s.to_owned()))
    }
}

/// CA classes, in CDO endpoint order, with the `/data` class last.
const CA_CLASSES: [(&str, &str); 7] = [
    ("Dataset", "/datasets"),
    ("DataCategory", "/datacategories"),
    ("DataType", "/datatypes"),
    ("LocationCategory", "/locationcategories"),
    ("Location", "/locations"),
    ("Station", "/stations"),
    ("Result", ""),
];

/// CA-namespace properties and their labels.
const CA_PROPERTIES: [&str; 10] = [
    "name",
    "isLocatedIn",
    "elev",
    "elevUnit",
    "inDataCategory",
    "sourceStation",
    "withDataType",
    "minDate",
    "maxDate",
    "dataCoverage",
];

/// Properties reused from external vocabularies.
const REUSED_PROPERTIES: [(&str, &str); 5] = [
    (sosa::NS, "resultTime"),
    (sosa::NS, "hasResult"),
    (qudt::NS, "numericValue"),
    (wgs84::NS, "lat"),
    (wgs84::NS, "long"),
];

/// The CA vocabulary bound to a deployment base IRI.
#[derive(Debug, Clone)]
pub struct Ontology {
    base: String,
    ns: String,
}

impl Default for Ontology {
    fn default() -> Self {
        Ontology::new(DEFAULT_BASE).expect("default base is valid")
    }
}

impl Ontology {
    /// `base` must end with `/`; the CA namespace is `{base}ontology#`.
    pub fn new(base: &str) -> Result<Self, OntologyError> {
        if !base.ends_with('/') || Iri::new(base).is_err() {
            return Err(OntologyError::InvalidBase(base.to_owned()));
        }
        Ok(Ontology { base: base.to_owned(), ns: format!("{base}ontology#") })
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    /// The CA namespace IRI.
    pub fn namespace(&self) -> &str {
        &self.ns
    }

    /// A CA term by local name (no check that it is declared).
    pub fn ca(&self, local: &str) -> Iri {
        Iri::new(format!("{}{local}", self.ns)).expect("CA IRIs are valid")
    }

    /// Named graph holding the imported Wikidata snapshot.
    pub fn wikidata_graph(&self) -> Iri {
        Iri::new(format!("{}graph/wikidata", self.base)).expect("valid graph IRI")
    }

    /// Prefix table for Turtle output.
    pub fn prefixes(&self) -> Vec<(String, String)> {
        let mut out = vec![("ca".to_owned(), self.ns.clone())];
        out.extend(COMMON_PREFIXES.iter().map(|(p, n)| ((*p).to_owned(), (*n).to_owned())));
        out
    }

    /// SPARQL `PREFIX` lines for the same table.
    pub fn sparql_prologue(&self) -> String {
        self.prefixes().iter().map(|(p, n)| format!("PREFIX {p}: <{n}>\n")).collect()
    }

    pub fn class_mappings(&self) -> Vec<ClassMapping> {
        let mut out: Vec<ClassMapping> = CA_CLASSES
            .iter()
            .filter(|(_, ep)| !ep.is_empty())
            .map(|(local, endpoint)| ClassMapping { endpoint, class_iri: self.ca(local) })
            .collect();
        out.push(ClassMapping { endpoint: "/data", class_iri: Iri::from_static(sosa::OBSERVATION) });
        out
    }

    pub fn class_for_endpoint(&self, endpoint: &str) -> Result<Iri, OntologyError> {
        self.class_mappings()
            .into_iter()
            .find(|m| m.endpoint == endpoint)
            .map(|m| m.class_iri)
            .ok_or_else(|| OntologyError::UnknownEndpoint(endpoint.to_owned()))
    }

    pub fn property_mappings(&self) -> Vec<PropertyMapping> {
        use ObjectKind::*;
        let m = |json_field, property_iri, object_kind| PropertyMapping { json_field, property_iri, object_kind };
        vec![
            m("name", self.ca("name"), LiteralString),
            m("locationid", self.ca("isLocatedIn"), ResourceRef),
            m("elevation", self.ca("elev"), LiteralDouble),
            m("latitude", Iri::from_static(wgs84::LAT), LiteralDouble),
            m("longitude", Iri::from_static(wgs84::LONG), LiteralDouble),
            m("elevationUnit", self.ca("elevUnit"), LiteralString),
            m("datacategoryid", self.ca("inDataCategory"), ResourceRef),
            m("station", self.ca("sourceStation"), ResourceRef),
            m("date", Iri::from_static(sosa::RESULT_TIME), LiteralDateTime),
            m("datatype", self.ca("withDataType"), ResourceRef),
            m("value", Iri::from_static(qudt::NUMERIC_VALUE), LiteralDouble),
            m("mindate", self.ca("minDate"), LiteralDate),
            m("maxdate", self.ca("maxDate"), LiteralDate),
            m("datacoverage", self.ca("dataCoverage"), LiteralDouble),
        ]
    }

    pub fn property_for_field(&self, field: &str) -> Result<(Iri, ObjectKind), OntologyError> {
        self.property_mappings()
            .into_iter()
            .find(|m| m.json_field == field)
            .map(|m| (m.property_iri, m.object_kind))
            .ok_or_else(|| OntologyError::UnknownField(field.to_owned()))
    }

    pub fn alignment_axioms(&self) -> Vec<AlignmentAxiom> {
        vec![
            AlignmentAxiom {
                subject: self.ca("Result"),
                relation: AlignmentRelation::SubClassOf,
                object: Iri::from_static(sosa::RESULT),
            },
            AlignmentAxiom {
                subject: self.ca("Location"),
                relation: AlignmentRelation::SameAs,
                object: Iri::from_static(aemet::ADMINISTRATIVE_AREA),
            },
            AlignmentAxiom {
                subject: self.ca("Station"),
                relation: AlignmentRelation::SameAs,
                object: Iri::from_static(aemet::WEATHER_STATION),
            },
        ]
    }

    /// Every declared term: CA classes, `sosa:Observation`, CA properties
    /// and the reused external properties.
    pub fn terms(&self) -> Vec<VocabTerm> {
        let mut out: Vec<VocabTerm> = CA_CLASSES
            .iter()
            .map(|(local, _)| VocabTerm { namespace: self.ns.clone(), local: (*local).to_owned(), kind: TermKind::Class })
            .collect();
        out.push(VocabTerm { namespace: sosa::NS.to_owned(), local: "Observation".to_owned(), kind: TermKind::Class });
        out.extend(CA_PROPERTIES.iter().map(|local| VocabTerm {
            namespace: self.ns.clone(),
            local: (*local).to_owned(),
            kind: TermKind::Property,
        }));
        out.extend(REUSED_PROPERTIES.iter().map(|(ns, local)| VocabTerm {
            namespace: (*ns).to_owned(),
            local: (*local).to_owned(),
            kind: TermKind::Property,
        }));
        out
    }

    /// The T-Box: class and property declarations with labels, plus the
    /// alignment axioms.
    pub fn ontology_triples(&self) -> Vec<Triple> {
        let rdf_type = Iri::from_static(rdf::TYPE);
        let label = Iri::from_static(rdfs::LABEL);
        let onto = Iri::new(self.ns.trim_end_matches('#')).expect("valid ontology IRI");
        let mut out = vec![Triple::new(onto, rdf_type.clone(), Iri::from_static(owl::ONTOLOGY))];
        for term in self.terms() {
            let iri = term.iri();
            let class = match term.kind {
                TermKind::Class => owl::CLASS,
                TermKind::Property => rdf::PROPERTY,
            };
            out.push(Triple::new(iri.clone(), rdf_type.clone(), Iri::from_static(class)));
            out.push(Triple::new(iri, label.clone(), Literal::string(term.local)));
        }
        for ax in self.alignment_axioms() {
            out.push(Triple::new(ax.subject, ax.relation.iri(), ax.object));
        }
        out
    }

    /// `{base}resource/{kind}/{id}` with the id percent-encoded except for
    /// unreserved characters and `:`.
    pub fn mint_resource_iri(&self, kind: ResourceKind, id: &str) -> Result<Iri, OntologyError> {
        if id.is_empty() {
            return Err(OntologyError::EmptyId);
        }
        let encoded = utf8_percent_encode(id, ID_SEGMENT);
        Ok(Iri::new(format!("{}resource/{kind}/{encoded}", self.base)).expect("minted IRIs are valid"))
    }

    /// Convenience wrapper taking the kind as a string.
    pub fn mint(&self, kind: &str, id: &str) -> Result<Iri, OntologyError> {
        self.mint_resource_iri(kind.parse()?, id)
    }

    /// Inverse of [`Ontology::mint_resource_iri`] for IRIs under this base.
    pub fn parse_resource_iri(&self, iri: &Iri) -> Option<(ResourceKind, String)> {
        let rest = iri.as_str().strip_prefix(&self.base)?.strip_prefix("resource/")?;
        let (kind, id) = rest.split_once('/')?;
        let id = percent_encoding::percent_decode_str(id).decode_utf8().ok()?.into_owned();
        Some((kind.parse().ok()?, id))
    }

    /// True when `term` is declared by [`Ontology::ontology_triples`].
    pub fn declares(&self, term: &Iri) -> bool {
        self.terms().iter().any(|t| t.iri() == *term)
    }

    pub fn rdf_type(&self) -> Iri {
        Iri::from_static(rdf::TYPE)
    }

    /// Shorthand for a literal typed with the given XSD datatype.
    pub fn typed_literal(lexical: impl Into<String>, datatype: &'static str) -> Option<Term> {
        Literal::typed(lexical, Iri::from_static(datatype)).ok().map(Term::Literal)
    }
}
