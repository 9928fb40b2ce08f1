//! Resource descriptions served at `/resource/{kind}/{id}`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use climakg_core::{write_turtle, Dataset, GraphScope, Iri, Ontology, ResourceKind, Term, Triple};
use climakg_sparql::term_json;
use serde_json::{json, Value};

/// Outgoing triples of the focus, outgoing triples of the result nodes it
/// points to, and up to `incoming_cap` triples pointing at it. Each list is
/// sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct DerefDocument {
    pub focus: Iri,
    pub outgoing: Vec<Triple>,
    pub expanded: Vec<Triple>,
    pub incoming: Vec<Triple>,
    /// Incoming triples beyond the cap.
    pub incoming_truncated: usize,
}

impl DerefDocument {
    /// `None` when the focus is not the subject of any triple.
    pub fn build(ds: &Dataset, o: &Ontology, focus: Iri, incoming_cap: usize) -> Option<Self> {
        let sorted = |v: Vec<Triple>| -> Vec<Triple> { v.into_iter().collect::<BTreeSet<_>>().into_iter().collect() };
        let outgoing = sorted(ds.match_in(GraphScope::Union, Some(&focus), None, None));
        if outgoing.is_empty() {
            return None;
        }
        let mut expanded = BTreeSet::new();
        for t in &outgoing {
            if let Term::Iri(node) = &t.object {
                if node != &focus && matches!(o.parse_resource_iri(node), Some((ResourceKind::Result, _))) {
                    expanded.extend(ds.match_in(GraphScope::Union, Some(node), None, None));
                }
            }
        }
        let all_incoming = sorted(ds.match_in(GraphScope::Union, None, None, Some(&Term::Iri(focus.clone()))));
        let incoming_truncated = all_incoming.len().saturating_sub(incoming_cap);
        let incoming = all_incoming.into_iter().take(incoming_cap).collect();
        Some(DerefDocument { focus, outgoing, expanded: expanded.into_iter().collect(), incoming, incoming_truncated })
    }

    pub fn triples(&self) -> BTreeSet<&Triple> {
        self.outgoing.iter().chain(&self.expanded).chain(&self.incoming).collect()
    }

    pub fn to_turtle(&self, o: &Ontology) -> String {
        write_turtle(self.triples(), &o.prefixes())
    }

    pub fn to_json(&self) -> Value {
        let iri = |i: &Iri| Value::String(i.as_str().to_owned());
        json!({
            "iri": self.focus.as_str(),
            "outgoing": self.outgoing.iter().map(|t| json!({"p": iri(&t.predicate), "o": term_json(&t.object)})).collect::<Vec<_>>(),
            "incoming": self.incoming.iter().map(|t| json!({"s": iri(&t.subject), "p": iri(&t.predicate)})).collect::<Vec<_>>(),
            "expanded": self.expanded.iter().map(|t| json!({"s": iri(&t.subject), "p": iri(&t.predicate), "o": term_json(&t.object)})).collect::<Vec<_>>(),
            "incomingTruncated": self.incoming_truncated,
        })
    }

    pub fn to_html(&self, o: &Ontology) -> String {
        let name = self
            .outgoing
            .iter()
            .find(|t| t.predicate == o.ca("name"))
            .and_then(|t| t.object.as_literal())
            .map(|l| l.lexical().to_owned())
            .unwrap_or_else(|| self.focus.as_str().to_owned());
        let mut h = String::new();
        let _ = write!(
            h,
            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>{0}</title></head><body>\n<h1>{0}</h1>\n<p><code>{1}</code></p>\n",
            escape(&name),
            escape(self.focus.as_str())
        );
        let row = |h: &mut String, a: String, b: String| {
            let _ = writeln!(h, "<tr><td>{a}</td><td>{b}</td></tr>");
        };
        h.push_str("<h2>Properties</h2>\n<table>\n");
        for t in &self.outgoing {
            row(&mut h, link(o, &t.predicate), render(o, &t.object));
        }
        h.push_str("</table>\n");
        if !self.expanded.is_empty() {
            h.push_str("<h2>Results</h2>\n<table>\n");
            for t in &self.expanded {
                row(&mut h, link(o, &t.predicate), render(o, &t.object));
            }
            h.push_str("</table>\n");
        }
        if !self.incoming.is_empty() {
            h.push_str("<h2>Referenced by</h2>\n<table>\n");
            for t in &self.incoming {
                row(&mut h, link(o, &t.subject), link(o, &t.predicate));
            }
            h.push_str("</table>\n");
            if self.incoming_truncated > 0 {
                let _ = writeln!(h, "<p>{} more not shown.</p>", self.incoming_truncated);
            }
        }
        h.push_str("</body></html>\n");
        h
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '&' => out.push_str("&amp;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Local resources link to this server's path so browsing stays on the
/// deployment; everything else links out.
fn link(o: &Ontology, iri: &Iri) -> String {
    let href = match iri.as_str().strip_prefix(o.base()) {
        Some(rest) if rest.starts_with("resource/") => format!("/{rest}"),
        _ => iri.as_str().to_owned(),
    };
    format!("<a href=\"{}\">{}</a>", escape(&href), escape(iri.as_str()))
}

fn render(o: &Ontology, term: &Term) -> String {
    match term {
        Term::Iri(i) => link(o, i),
        Term::Literal(l) => match l.lang() {
            Some(lang) => format!("{} <small>@{}</small>", escape(l.lexical()), escape(lang)),
            None => escape(l.lexical()),
        },
    }
}
