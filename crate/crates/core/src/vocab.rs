//! External vocabulary IRIs.

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    pub const PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
    pub const LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    pub const COMMENT: &str = "http://www.w3.org/2000/01/rdf-schema#comment";
    pub const SUB_CLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
}

pub mod owl {
    pub const NS: &str = "http://www.w3.org/2002/07/owl#";
    pub const CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
    pub const SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
    pub const EQUIVALENT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#equivalentProperty";
    pub const ONTOLOGY: &str = "http://www.w3.org/2002/07/owl#Ontology";
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
    pub const BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";
    pub const INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
    pub const DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";
    pub const DOUBLE: &str = "http://www.w3.org/2001/XMLSchema#double";
    pub const DATE: &str = "http://www.w3.org/2001/XMLSchema#date";
    pub const DATE_TIME: &str = "http://www.w3.org/2001/XMLSchema#dateTime";
}

pub mod sosa {
    pub const NS: &str = "http://www.w3.org/ns/sosa/";
    pub const OBSERVATION: &str = "http://www.w3.org/ns/sosa/Observation";
    pub const RESULT: &str = "http://www.w3.org/ns/sosa/Result";
    pub const HAS_RESULT: &str = "http://www.w3.org/ns/sosa/hasResult";
    pub const RESULT_TIME: &str = "http://www.w3.org/ns/sosa/resultTime";
}

pub mod qudt {
    pub const NS: &str = "http://qudt.org/schema/qudt/";
    pub const NUMERIC_VALUE: &str = "http://qudt.org/schema/qudt/numericValue";
}

pub mod wgs84 {
    pub const NS: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#";
    pub const LAT: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#lat";
    pub const LONG: &str = "http://www.w3.org/2003/01/geo/wgs84_pos#long";
}

pub mod aemet {
    pub const NS: &str = "http://aemet.linkeddata.es/ontology/";
    pub const WEATHER_STATION: &str = "http://aemet.linkeddata.es/ontology/WeatherStation";
    pub const ADMINISTRATIVE_AREA: &str = "http://aemet.linkeddata.es/ontology/AdministrativeArea";
}

pub mod wikidata {
    pub const ENTITY: &str = "http://www.wikidata.org/entity/";
    pub const DIRECT: &str = "http://www.wikidata.org/prop/direct/";
    /// "located in or next to body of water"
    pub const P206: &str = "http://www.wikidata.org/prop/direct/P206";
}

/// Prefixes commonly used when pretty-printing; the CA prefix is added by
/// the ontology since its namespace depends on the deployment base.
pub const COMMON_PREFIXES: &[(&str, &str)] = &[
    ("rdf", rdf::NS),
    ("rdfs", rdfs::NS),
    ("owl", owl::NS),
    ("xsd", xsd::NS),
    ("sosa", sosa::NS),
    ("qudt", qudt::NS),
    ("wgs84", wgs84::NS),
    ("aemet", aemet::NS),
    ("wd", wikidata::ENTITY),
    ("wdt", wikidata::DIRECT),
];
