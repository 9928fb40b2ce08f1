//! RDF terms and triples.
//!
//! Only IRIs and literals exist in this data model. Nodes that would be
//! anonymous elsewhere are given deterministic IRIs by the producers.

use std::fmt;

use crate::vocab::{rdf, xsd};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid IRI {0:?}: {1}")]
    InvalidIri(String, &'static str),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("lexical form {lexical:?} is not valid for datatype <{datatype}>")]
    InvalidLexicalForm { lexical: String, datatype: String },
    #[error("a literal cannot be used in {0} position")]
    LiteralInPosition(&'static str),
}

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        if let Err(reason) = validate_iri(&value) {
            return Err(ModelError::InvalidIri(value, reason));
        }
        Ok(Iri(value))
    }

    /// Builds an IRI from a string already known to be valid, such as a
    /// vocabulary constant. Debug builds still check it.
    pub fn from_static(value: &'static str) -> Self {
        debug_assert!(validate_iri(value).is_ok(), "bad static IRI {value}");
        Iri(value.to_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

fn validate_iri(value: &str) -> Result<(), &'static str> {
    if value.is_empty() {
        return Err("empty");
    }
    if let Some(c) = value
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '\\' | '^' | '`'))
    {
        return Err(if c.is_whitespace() {
            "contains whitespace"
        } else if c == '<' || c == '>' {
            "contains an angle bracket"
        } else {
            "contains a forbidden character"
        });
    }
    if let Some(rest) = value.strip_prefix("urn:").or_else(|| value.strip_prefix("URN:")) {
        // urn:<nid>:<nss>
        let (nid, nss) = rest.split_once(':').ok_or("URN without namespace-specific part")?;
        if nid.is_empty() || !nid.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') || nss.is_empty() {
            return Err("malformed URN");
        }
        return Ok(());
    }
    let (scheme, rest) = value.split_once("://").ok_or("missing scheme separator")?;
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return Err("malformed scheme"),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.')) {
        return Err("malformed scheme");
    }
    if rest.is_empty() {
        return Err("missing authority or path");
    }
    Ok(())
}

/// A literal: lexical form, datatype and optional language tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    lang: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), datatype: Iri::from_static(xsd::STRING), lang: None }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Result<Self, ModelError> {
        let lexical = lexical.into();
        if datatype.as_str() == rdf::LANG_STRING {
            return Err(ModelError::InvalidLexicalForm { lexical, datatype: datatype.into_string() });
        }
        if !lexical_form_is_valid(&lexical, datatype.as_str()) {
            return Err(ModelError::InvalidLexicalForm { lexical, datatype: datatype.into_string() });
        }
        Ok(Literal { lexical, datatype, lang: None })
    }

    /// A language-tagged string. Tags are normalised to lower case.
    pub fn lang_string(lexical: impl Into<String>, lang: &str) -> Result<Self, ModelError> {
        if !is_language_tag(lang) {
            return Err(ModelError::InvalidLanguageTag(lang.to_owned()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri::from_static(rdf::LANG_STRING),
            lang: Some(lang.to_ascii_lowercase()),
        })
    }

    pub fn double(value: f64) -> Self {
        Literal { lexical: format_double(value), datatype: Iri::from_static(xsd::DOUBLE), lang: None }
    }

    pub fn integer(value: i64) -> Self {
        Literal { lexical: value.to_string(), datatype: Iri::from_static(xsd::INTEGER), lang: None }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn lang(&self) -> Option<&str> {
        self.lang.as_deref()
    }

    /// Numeric value for `xsd:double`, `xsd:decimal`, `xsd:integer` and the
    /// other numeric XSD types.
    pub fn as_f64(&self) -> Option<f64> {
        if !is_numeric_datatype(self.datatype.as_str()) {
            return None;
        }
        parse_xsd_double(&self.lexical)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("\"")?;
        f.write_str(&escape_string(&self.lexical))?;
        f.write_str("\"")?;
        if let Some(lang) = &self.lang {
            write!(f, "@{lang}")
        } else if self.datatype.as_str() != xsd::STRING {
            write!(f, "^^{}", self.datatype)
        } else {
            Ok(())
        }
    }
}

/// Formats a double the way mappers write `xsd:double` lexical forms.
pub fn format_double(value: f64) -> String {
    if value.is_nan() {
        "NaN".to_owned()
    } else if value.is_infinite() {
        if value > 0.0 { "INF".to_owned() } else { "-INF".to_owned() }
    } else {
        let s = value.to_string();
        if s == "-0" { "0".to_owned() } else { s }
    }
}

pub(crate) fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let first = parts.next().unwrap_or("");
    !first.is_empty()
        && first.len() <= 8
        && first.chars().all(|c| c.is_ascii_alphabetic())
        && parts.all(|p| !p.is_empty() && p.len() <= 8 && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

pub fn is_numeric_datatype(datatype: &str) -> bool {
    matches!(
        datatype.strip_prefix(xsd::NS),
        Some(
            "double" | "float" | "decimal" | "integer" | "long" | "int" | "short" | "byte"
                | "nonNegativeInteger" | "positiveInteger" | "negativeInteger" | "nonPositiveInteger"
                | "unsignedLong" | "unsignedInt" | "unsignedShort" | "unsignedByte"
        )
    )
}

fn lexical_form_is_valid(lexical: &str, datatype: &str) -> bool {
    match datatype.strip_prefix(xsd::NS) {
        Some("double" | "float") => parse_xsd_double(lexical).is_some(),
        Some("decimal") => is_decimal(lexical),
        Some(_) if is_numeric_datatype(datatype) => is_integer(lexical),
        Some("boolean") => matches!(lexical, "true" | "false" | "1" | "0"),
        _ => true,
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn is_integer(s: &str) -> bool {
    let digits = strip_sign(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn is_decimal(s: &str) -> bool {
    let body = strip_sign(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    (!int.is_empty() || !frac.is_empty())
        && int.bytes().all(|b| b.is_ascii_digit())
        && frac.bytes().all(|b| b.is_ascii_digit())
        && !(body.contains('.') && int.is_empty() && frac.is_empty())
}

/// Parses an `xsd:double` lexical form (`INF`, `-INF`, `NaN` included).
pub fn parse_xsd_double(s: &str) -> Option<f64> {
    match s {
        "INF" | "+INF" => return Some(f64::INFINITY),
        "-INF" => return Some(f64::NEG_INFINITY),
        "NaN" => return Some(f64::NAN),
        _ => {}
    }
    // Rust accepts "inf", "infinity" and "nan" spellings that XSD does not.
    let body = strip_sign(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-')) {
        return None;
    }
    s.parse().ok()
}

/// Escapes a string for use between double quotes in N-Triples or Turtle.
pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// An RDF term: an IRI or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => iri.fmt(f),
            Term::Literal(lit) => lit.fmt(f),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple { subject, predicate, object: object.into() }
    }

    /// Builds a triple from arbitrary terms, rejecting literals in subject or
    /// predicate position.
    pub fn from_terms(subject: Term, predicate: Term, object: Term) -> Result<Self, ModelError> {
        let Term::Iri(subject) = subject else {
            return Err(ModelError::LiteralInPosition("subject"));
        };
        let Term::Iri(predicate) = predicate else {
            return Err(ModelError::LiteralInPosition("predicate"));
        };
        Ok(Triple { subject, predicate, object })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

/// A triple together with the named graph it belongs to; `None` is the
/// default graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quad {
    pub triple: Triple,
    pub graph: Option<Iri>,
}
