//! N-Triples and N-Quads parsing and canonical serialization.

use std::fmt::Write as _;

use crate::model::{Iri, Literal, ModelError, Quad, Term, Triple};

/// A parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError { line, column, message: message.into() }
    }
}

/// Converts raw bytes to text, reporting the position of the first invalid
/// UTF-8 sequence.
pub fn decode_utf8(input: &[u8]) -> Result<&str, SyntaxError> {
    std::str::from_utf8(input).map_err(|e| {
        let valid = &input[..e.valid_up_to()];
        let text = std::str::from_utf8(valid).unwrap_or_default();
        let line = text.matches('\n').count() + 1;
        let column = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SyntaxError::new(line, column, "invalid UTF-8")
    })
}

/// Parses an N-Triples document. All-or-nothing: the first error aborts.
pub fn parse_ntriples(input: impl AsRef<[u8]>) -> Result<Vec<Triple>, SyntaxError> {
    let text = decode_utf8(input.as_ref())?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some((triple, _)) = LineParser::new(line, idx + 1).statement(false)? {
            out.push(triple);
        }
    }
    Ok(out)
}

/// Parses an N-Quads document; lines without a graph label belong to the
/// default graph.
pub fn parse_nquads(input: impl AsRef<[u8]>) -> Result<Vec<Quad>, SyntaxError> {
    let text = decode_utf8(input.as_ref())?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some((triple, graph)) = LineParser::new(line, idx + 1).statement(true)? {
            out.push(Quad { triple, graph });
        }
    }
    Ok(out)
}

struct LineParser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl LineParser {
    fn new(line: &str, number: usize) -> Self {
        LineParser { chars: line.chars().collect(), pos: 0, line: number }
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line, self.pos + 1, message)
    }

    fn err_at(&self, pos: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line, pos + 1, message)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.pos += 1;
        }
    }

    fn at_end_or_comment(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn statement(&mut self, allow_graph: bool) -> Result<Option<(Triple, Option<Iri>)>, SyntaxError> {
        if self.at_end_or_comment() {
            return Ok(None);
        }
        let start = self.pos;
        let subject = self.term()?;
        self.skip_ws();
        let pred_pos = self.pos;
        let predicate = self.term()?;
        self.skip_ws();
        let object = self.term()?;
        self.skip_ws();
        let mut graph = None;
        if allow_graph && self.peek() == Some('<') {
            let g_pos = self.pos;
            match self.term()? {
                Term::Iri(iri) => graph = Some(iri),
                Term::Literal(_) => return Err(self.err_at(g_pos, "graph label must be an IRI")),
            }
            self.skip_ws();
        }
        if self.bump() != Some('.') {
            self.pos = self.pos.saturating_sub(1);
            return Err(self.err("expected '.' at end of statement"));
        }
        if !self.at_end_or_comment() {
            return Err(self.err("unexpected content after '.'"));
        }
        let triple = Triple::from_terms(subject, predicate, object).map_err(|e| match e {
            ModelError::LiteralInPosition("predicate") => self.err_at(pred_pos, e.to_string()),
            _ => self.err_at(start, e.to_string()),
        })?;
        Ok(Some((triple, graph)))
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some('<') => Ok(Term::Iri(self.iri()?)),
            Some('"') => Ok(Term::Literal(self.literal()?)),
            Some('_') => Err(self.err("blank nodes are not supported")),
            Some(c) => Err(self.err(format!("unexpected character {c:?}"))),
            None => Err(self.err("unexpected end of line")),
        }
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        let start = self.pos;
        self.bump(); // '<'
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err_at(start, "unterminated IRI")),
                Some('>') => break,
                Some('\\') => value.push(self.uchar()?),
                Some(c) => value.push(c),
            }
        }
        Iri::new(value).map_err(|e| self.err_at(start, e.to_string()))
    }

    fn uchar(&mut self) -> Result<char, SyntaxError> {
        let esc_pos = self.pos - 1;
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.err_at(esc_pos, "invalid escape sequence")),
        };
        self.hex(width, esc_pos)
    }

    fn hex(&mut self, width: usize, esc_pos: usize) -> Result<char, SyntaxError> {
        let mut code = 0u32;
        for _ in 0..width {
            let digit = self.bump().and_then(|c| c.to_digit(16)).ok_or_else(|| self.err_at(esc_pos, "invalid unicode escape"))?;
            code = code * 16 + digit;
        }
        char::from_u32(code).ok_or_else(|| self.err_at(esc_pos, "escape is not a unicode scalar value"))
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let start = self.pos;
        self.bump(); // '"'
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err_at(start, "unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let esc_pos = self.pos - 1;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4, esc_pos)?,
                        Some('U') => self.hex(8, esc_pos)?,
                        _ => return Err(self.err_at(esc_pos, "invalid escape sequence")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                let tag_pos = self.pos;
                self.bump();
                let mut tag = String::new();
                while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                    tag.push(c);
                    self.pos += 1;
                }
                Literal::lang_string(lexical, &tag).map_err(|e| self.err_at(tag_pos, e.to_string()))
            }
            Some('^') => {
                let dt_pos = self.pos;
                self.bump();
                if self.bump() != Some('^') {
                    return Err(self.err_at(dt_pos, "expected '^^'"));
                }
                if self.peek() != Some('<') {
                    return Err(self.err("expected datatype IRI"));
                }
                let datatype = self.iri()?;
                Literal::typed(lexical, datatype).map_err(|e| self.err_at(start, e.to_string()))
            }
            _ => Ok(Literal::string(lexical)),
        }
    }
}

fn sort_key(t: &Triple) -> (String, String, String) {
    (t.subject.to_string(), t.predicate.to_string(), t.object.to_string())
}

fn sorted_lines<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> Vec<(String, String, String)> {
    let mut keys: Vec<_> = triples.into_iter().map(sort_key).collect();
    keys.sort();
    keys.dedup();
    keys
}

/// Canonical N-Triples: one statement per line, sorted by the serialized
/// subject, predicate and object, duplicates removed.
pub fn serialize_ntriples<'a>(triples: impl IntoIterator<Item = &'a Triple>) -> String {
    let mut out = String::new();
    for (s, p, o) in sorted_lines(triples) {
        let _ = writeln!(out, "{s} {p} {o} .");
    }
    out
}

/// Canonical N-Quads: the default graph first, then each named graph in IRI
/// order, each section sorted like [`serialize_ntriples`].
pub fn serialize_nquads(quads: &[Quad]) -> String {
    let mut graphs: std::collections::BTreeMap<Option<&Iri>, Vec<&Triple>> = Default::default();
    graphs.entry(None).or_default();
    for q in quads {
        graphs.entry(q.graph.as_ref()).or_default().push(&q.triple);
    }
    let mut out = String::new();
    for (graph, triples) in graphs {
        for (s, p, o) in sorted_lines(triples) {
            match graph {
                None => {
                    let _ = writeln!(out, "{s} {p} {o} .");
                }
                Some(g) => {
                    let _ = writeln!(out, "{s} {p} {o} {g} .");
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocab::xsd;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn empty_input() {
        assert!(parse_ntriples("").unwrap().is_empty());
        assert!(parse_ntriples("# only a comment\n\n   \n").unwrap().is_empty());
        assert_eq!(serialize_ntriples(&[]), "");
    }

    #[test]
    fn station_name_line() {
        let doc = "<http://jresearch.ucd.ie/climate-kg/resource/station/GHCND:EI000003969> \
                   <http://jresearch.ucd.ie/climate-kg/ontology#name> \"DUBLIN PHOENIX PARK\"@en .";
        let triples = parse_ntriples(doc).unwrap();
        assert_eq!(triples.len(), 1);
        let lit = triples[0].object.as_literal().unwrap();
        assert_eq!(lit.lexical(), "DUBLIN PHOENIX PARK");
        assert_eq!(lit.lang(), Some("en"));
        assert_eq!(
            triples[0].subject.as_str(),
            "http://jresearch.ucd.ie/climate-kg/resource/station/GHCND:EI000003969"
        );
    }

    #[test]
    fn escapes_are_decoded() {
        let doc = r#"<http://a.example/s> <http://a.example/p> "q\"b\\s\nn\tt\rré\U0001F600" ."#;
        let t = &parse_ntriples(doc).unwrap()[0];
        assert_eq!(t.object.as_literal().unwrap().lexical(), "q\"b\\s\nn\tt\rr\u{e9}\u{1F600}");
    }

    #[test]
    fn typed_literal_and_trailing_comment() {
        let doc = format!("<http://a.example/s> <http://a.example/p> \"1.5\"^^<{}> . # value\n", xsd::DOUBLE);
        let t = &parse_ntriples(doc).unwrap()[0];
        assert_eq!(t.object.as_literal().unwrap().as_f64(), Some(1.5));
    }

    #[test]
    fn errors_report_positions() {
        let doc = "<http://a.example/s> <http://a.example/p> <http://a.example/o> .\n<http://a.example/s> <http://a.example/p> \"open .";
        let err = parse_ntriples(doc).unwrap_err();
        assert_eq!((err.line, err.column), (2, 43));

        let err = parse_ntriples("<http://a.example/s> <http://a.example/p> <http://a.example/o>").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("'.'"), "{err}");

        let err = parse_ntriples("\"lit\" <http://a.example/p> <http://a.example/o> .").unwrap_err();
        assert_eq!(err.column, 1);
        let err = parse_ntriples("_:b <http://a.example/p> <http://a.example/o> .").unwrap_err();
        assert!(err.message.contains("blank"));
        let err = parse_ntriples("<http://a.example/s> <http://a.example/p> \"x\"^^<http://www.w3.org/2001/XMLSchema#double> .").unwrap_err();
        assert!(err.message.contains("not valid"), "{err}");
    }

    #[test]
    fn parsing_is_all_or_nothing() {
        let doc = "<http://a.example/s> <http://a.example/p> <http://a.example/o> .\nbroken\n";
        assert!(parse_ntriples(doc).is_err());
    }

    #[test]
    fn invalid_utf8_position() {
        let mut bytes = b"<http://a.example/s> <http://a.example/p> \"ok\" .\n\"ab".to_vec();
        bytes.push(0xff);
        let err = parse_ntriples(bytes).unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));
    }

    #[test]
    fn single_line_serialization() {
        let t = Triple::new(
            Iri::new("http://a.example/s").unwrap(),
            Iri::new("http://a.example/p").unwrap(),
            Literal::string("x"),
        );
        let out = serialize_ntriples([&t]);
        assert_eq!(out.lines().count(), 1);
        assert!(out.ends_with(" .\n"));
    }

    #[test]
    fn nquads_sections() {
        let g = Iri::new("http://a.example/g").unwrap();
        let t = Triple::new(
            Iri::new("http://a.example/s").unwrap(),
            Iri::new("http://a.example/p").unwrap(),
            Iri::new("http://a.example/o").unwrap(),
        );
        let quads = vec![Quad { triple: t.clone(), graph: Some(g.clone()) }, Quad { triple: t.clone(), graph: None }];
        let text = serialize_nquads(&quads);
        assert_eq!(
            text,
            "<http://a.example/s> <http://a.example/p> <http://a.example/o> .\n\
             <http://a.example/s> <http://a.example/p> <http://a.example/o> <http://a.example/g> .\n"
        );
        let back: BTreeSet<Quad> = parse_nquads(&text).unwrap().into_iter().collect();
        assert_eq!(back, quads.into_iter().collect());
        assert!(parse_ntriples(&text).is_err());
    }

    fn arb_text() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop_oneof![
                Just('"'), Just('\\'), Just('\n'), Just('\r'), Just('\t'), Just('\u{0}'), Just('\u{7f}'),
                Just('é'), Just('\u{1F600}'), Just(' '), Just('#'), Just('.'), Just('<'),
                proptest::char::range('a', 'z'),
            ],
            0..12,
        )
        .prop_map(|cs| cs.into_iter().collect())
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        prop_oneof![
            (0..5u8).prop_map(|i| Term::Iri(Iri::new(format!("http://a.example/r{i}")).unwrap())),
            arb_text().prop_map(|s| Term::Literal(Literal::string(s))),
            (arb_text(), prop_oneof![Just("en"), Just("ga"), Just("en-gb")])
                .prop_map(|(s, l)| Term::Literal(Literal::lang_string(s, l).unwrap())),
            any::<i32>().prop_map(|i| Term::Literal(Literal::integer(i64::from(i)))),
            (-1.0e6..1.0e6f64).prop_map(|f| Term::Literal(Literal::double(f))),
        ]
    }

    fn arb_triple() -> impl Strategy<Value = Triple> {
        (0..5u8, 0..3u8, arb_term()).prop_map(|(s, p, o)| {
            Triple::new(
                Iri::new(format!("http://a.example/s{s}")).unwrap(),
                Iri::new(format!("http://a.example/p{p}")).unwrap(),
                o,
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_identity_on_sets(triples in prop::collection::vec(arb_triple(), 0..30)) {
            let text = serialize_ntriples(&triples);
            let parsed = parse_ntriples(&text).unwrap();
            let a: BTreeSet<Triple> = triples.into_iter().collect();
            let b: BTreeSet<Triple> = parsed.iter().cloned().collect();
            prop_assert_eq!(a, b);
            prop_assert_eq!(serialize_ntriples(&parsed), text);
        }
    }
}
