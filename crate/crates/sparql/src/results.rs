//! Result sets and their JSON and CSV serializations.

use std::collections::BTreeMap;

use climakg_core::vocab::{rdf, xsd};
use climakg_core::{Iri, Literal, Term};
use serde_json::{json, Map, Value};

/// One solution: variable name (without `?`) to bound term.
pub type Solution = BTreeMap<String, Term>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryResults {
    pub variables: Vec<String>,
    pub solutions: Vec<Solution>,
}

#[derive(Debug, thiserror::Error)]
pub enum ResultsError {
    #[error("invalid results document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid results document: {0}")]
    Shape(String),
}

/// A term in the SPARQL JSON results encoding.
pub fn term_json(term: &Term) -> Value {
    match term {
        Term::Iri(iri) => json!({"type": "uri", "value": iri.as_str()}),
        Term::Literal(lit) => {
            let mut m = Map::new();
            m.insert("type".into(), "literal".into());
            m.insert("value".into(), lit.lexical().into());
            if let Some(lang) = lit.lang() {
                m.insert("xml:lang".into(), lang.into());
            } else if lit.datatype().as_str() != xsd::STRING {
                m.insert("datatype".into(), lit.datatype().as_str().into());
            }
            Value::Object(m)
        }
    }
}

impl QueryResults {
    /// The standard SPARQL JSON results document.
    pub fn to_json(&self) -> Value {
        let bindings: Vec<Value> = self
            .solutions
            .iter()
            .map(|s| Value::Object(s.iter().map(|(k, t)| (k.clone(), term_json(t))).collect()))
            .collect();
        json!({"head": {"vars": self.variables}, "results": {"bindings": bindings}})
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("JSON values always serialize")
    }

    /// CSV with a header row and CRLF line ends; unbound cells are empty.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.variables).expect("in-memory write");
        for s in &self.solutions {
            let row = self.variables.iter().map(|v| match s.get(v) {
                Some(Term::Iri(iri)) => iri.as_str(),
                Some(Term::Literal(lit)) => lit.lexical(),
                None => "",
            });
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input gives UTF-8 output")
    }
}

fn shape(msg: impl Into<String>) -> ResultsError {
    ResultsError::Shape(msg.into())
}

/// Inverse of [`term_json`].
pub fn parse_term(v: &Value) -> Result<Term, ResultsError> {
    let kind = v.get("type").and_then(Value::as_str).ok_or_else(|| shape("binding without type"))?;
    let value = v.get("value").and_then(Value::as_str).ok_or_else(|| shape("binding without value"))?;
    match kind {
        "uri" => Ok(Term::Iri(Iri::new(value).map_err(|e| shape(e.to_string()))?)),
        "literal" | "typed-literal" => {
            let lit = if let Some(lang) = v.get("xml:lang").and_then(Value::as_str) {
                Literal::lang_string(value, lang)
            } else if let Some(dt) = v.get("datatype").and_then(Value::as_str) {
                if dt == rdf::LANG_STRING {
                    return Err(shape("rdf:langString literal without xml:lang"));
                }
                Literal::typed(value, Iri::new(dt).map_err(|e| shape(e.to_string()))?)
            } else {
                Ok(Literal::string(value))
            };
            Ok(Term::Literal(lit.map_err(|e| shape(e.to_string()))?))
        }
        other => Err(shape(format!("unsupported term type '{other}'"))),
    }
}

/// Reads a SPARQL JSON results document.
pub fn parse_results_json(text: &str) -> Result<QueryResults, ResultsError> {
    let doc: Value = serde_json::from_str(text)?;
    let vars = doc
        .pointer("/head/vars")
        .and_then(Value::as_array)
        .ok_or_else(|| shape("missing head.vars"))?
        .iter()
        .map(|v| v.as_str().map(str::to_owned).ok_or_else(|| shape("non-string variable name")))
        .collect::<Result<Vec<_>, _>>()?;
    let bindings = doc.pointer("/results/bindings").and_then(Value::as_array).ok_or_else(|| shape("missing results.bindings"))?;
    let mut solutions = Vec::with_capacity(bindings.len());
    for b in bindings {
        let obj = b.as_object().ok_or_else(|| shape("binding is not an object"))?;
        let mut s = Solution::new();
        for (k, v) in obj {
            s.insert(k.clone(), parse_term(v)?);
        }
        solutions.push(s);
    }
    Ok(QueryResults { variables: vars, solutions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> QueryResults {
        let mut a = Solution::new();
        a.insert("s".into(), Term::Iri(Iri::new("http://example.org/a").unwrap()));
        a.insert("n".into(), Term::Literal(Literal::lang_string("Dún Laoghaire, \"pier\"", "ga").unwrap()));
        let mut b = Solution::new();
        b.insert("s".into(), Term::Iri(Iri::new("http://example.org/b").unwrap()));
        b.insert("v".into(), Term::Literal(Literal::double(2.5)));
        b.insert("n".into(), Term::Literal(Literal::string("plain")));
        QueryResults { variables: vec!["s".into(), "n".into(), "v".into()], solutions: vec![a, b] }
    }

    #[test]
    fn json_shape() {
        let j = sample().to_json();
        assert_eq!(j["head"]["vars"], json!(["s", "n", "v"]));
        let b = &j["results"]["bindings"];
        assert_eq!(b[0]["s"], json!({"type": "uri", "value": "http://example.org/a"}));
        assert_eq!(b[0]["n"]["xml:lang"], "ga");
        assert!(b[0].get("v").is_none(), "unbound variables are omitted");
        assert_eq!(b[1]["v"]["datatype"], xsd::DOUBLE);
        assert!(b[1]["n"].get("datatype").is_none());
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(parse_results_json(&r.to_json_string()).unwrap(), r);
    }

    #[test]
    fn csv_output() {
        let csv = sample().to_csv();
        assert_eq!(csv, "s,n,v\r\nhttp://example.org/a,\"Dún Laoghaire, \"\"pier\"\"\",\r\nhttp://example.org/b,plain,2.5\r\n");
    }
}
