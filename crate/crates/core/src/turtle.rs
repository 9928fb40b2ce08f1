//! Turtle pretty-printing and a small Turtle reader.
//!
//! The reader accepts the N-Triples-compatible subset plus `@prefix` /
//! `PREFIX`, prefixed names, `a`, the `;` and `,` abbreviations and bare
//! numeric and boolean literals. Blank nodes and collections are rejected.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::model::{escape_string, Iri, Literal, Term, Triple};
use crate::ntriples::{decode_utf8, SyntaxError};
use crate::vocab::{rdf, xsd};

fn is_local_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() || c == '_' => chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
        Some(_) => false,
    }
}

struct Compactor<'a> {
    prefixes: &'a [(String, String)],
    used: BTreeMap<&'a str, &'a str>,
}

impl<'a> Compactor<'a> {
    fn iri(&mut self, iri: &Iri) -> String {
        let mut best: Option<&'a (String, String)> = None;
        for entry in self.prefixes {
            if let Some(local) = iri.as_str().strip_prefix(entry.1.as_str()) {
                if is_local_name(local) && best.is_none_or(|b| entry.1.len() > b.1.len()) {
                    best = Some(entry);
                }
            }
        }
        match best {
            Some((prefix, ns)) => {
                self.used.insert(prefix, ns);
                format!("{prefix}:{}", &iri.as_str()[ns.len()..])
            }
            None => iri.to_string(),
        }
    }

    fn term(&mut self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Literal(lit) => {
                let mut out = format!("\"{}\"", escape_string(lit.lexical()));
                if let Some(lang) = lit.lang() {
                    out.push('@');
                    out.push_str(lang);
                } else if lit.datatype().as_str() != xsd::STRING {
                    out.push_str("^^");
                    out.push_str(&self.iri(lit.datatype()));
                }
                out
            }
        }
    }
}

/// Writes triples as Turtle grouped by subject. Subjects and predicates are
/// sorted (with `rdf:type` first as `a`); only prefixes actually used are
/// declared. Output is deterministic for a given triple set.
pub fn write_turtle<'a>(triples: impl IntoIterator<Item = &'a Triple>, prefixes: &[(String, String)]) -> String {
    let mut by_subject: BTreeMap<&Iri, BTreeMap<(bool, &Iri), Vec<&Term>>> = BTreeMap::new();
    for t in triples {
        by_subject
            .entry(&t.subject)
            .or_default()
            .entry((t.predicate.as_str() != rdf::TYPE, &t.predicate))
            .or_default()
            .push(&t.object);
    }
    let mut compactor = Compactor { prefixes, used: BTreeMap::new() };
    let mut body = String::new();
    for (subject, preds) in &by_subject {
        let _ = write!(body, "{}", compactor.iri(subject));
        let n_preds = preds.len();
        for (i, ((_, pred), objects)) in preds.iter().enumerate() {
            let pred_text = if pred.as_str() == rdf::TYPE { "a".to_owned() } else { compactor.iri(pred) };
            let mut objs: Vec<String> = objects.iter().map(|o| compactor.term(o)).collect();
            objs.sort();
            objs.dedup();
            let sep = if i == 0 { " " } else { "    " };
            let _ = write!(body, "{sep}{pred_text} {}", objs.join(", "));
            body.push_str(if i + 1 == n_preds { " .\n" } else { " ;\n" });
        }
        body.push('\n');
    }
    let mut out = String::new();
    for (prefix, ns) in &compactor.used {
        let _ = writeln!(out, "@prefix {prefix}: <{ns}> .");
    }
    if !compactor.used.is_empty() && !body.is_empty() {
        out.push('\n');
    }
    out.push_str(&body);
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixDirective { sparql_style: bool },
    Iri(String),
    PName(String, String),
    Literal(String),
    LangTag(String),
    DatatypeMark,
    Number(String),
    Bool(bool),
    A,
    Dot,
    Semicolon,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, chars: src.char_indices().peekable(), line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|(_, c)| *c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, msg: impl Into<String>) -> SyntaxError {
        SyntaxError::new(line, col, msg)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                '<' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => return Err(self.err(line, col, "unterminated IRI")),
                            Some('>') => break,
                            Some('\\') => s.push(self.escape(line, col, false)?),
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Iri(s)
                }
                '"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            None | Some('\n') => return Err(self.err(line, col, "unterminated string literal")),
                            Some('"') => break,
                            Some('\\') => s.push(self.escape(line, col, true)?),
                            Some(c) => s.push(c),
                        }
                    }
                    Tok::Literal(s)
                }
                '@' => {
                    self.bump();
                    let word = self.word();
                    if word == "prefix" {
                        Tok::PrefixDirective { sparql_style: false }
                    } else if crate::model::is_language_tag(&word) {
                        Tok::LangTag(word)
                    } else {
                        return Err(self.err(line, col, format!("unsupported directive or language tag @{word}")));
                    }
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(self.err(line, col, "expected '^^'"));
                    }
                    Tok::DatatypeMark
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                ';' => {
                    self.bump();
                    Tok::Semicolon
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                '_' if self.src[self.offset()..].starts_with("_:") => {
                    return Err(self.err(line, col, "blank nodes are not supported"));
                }
                '[' | '(' => return Err(self.err(line, col, "blank nodes and collections are not supported")),
                c if c.is_ascii_digit() || c == '+' || c == '-' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | 'e' | 'E' | '.')) {
                        // a trailing '.' terminates the statement
                        if c == '.' && !self.src[self.offset() + 1..].starts_with(|n: char| n.is_ascii_digit()) {
                            break;
                        }
                        s.push(c);
                        self.bump();
                    }
                    Tok::Number(s)
                }
                _ => {
                    let word = self.pname_word();
                    match word.split_once(':') {
                        Some((prefix, local)) => Tok::PName(prefix.to_owned(), local.to_owned()),
                        None => match word.as_str() {
                            "a" => Tok::A,
                            "true" => Tok::Bool(true),
                            "false" => Tok::Bool(false),
                            w if w.eq_ignore_ascii_case("prefix") => Tok::PrefixDirective { sparql_style: true },
                            "" => return Err(self.err(line, col, format!("unexpected character {c:?}"))),
                            w => return Err(self.err(line, col, format!("unexpected token {w:?}"))),
                        },
                    }
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |(i, _)| *i)
    }

    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
            s.push(c);
            self.bump();
        }
        s
    }

    fn pname_word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '.' | '%')) {
            if c == '.' {
                // dots are allowed inside local names but not at their end
                let rest = &self.src[self.offset() + 1..];
                if !rest.starts_with(|n: char| n.is_alphanumeric() || matches!(n, '_' | '-' | ':' | '%')) {
                    break;
                }
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn escape(&mut self, line: usize, col: usize, in_string: bool) -> Result<char, SyntaxError> {
        let c = self.bump().ok_or_else(|| self.err(line, col, "invalid escape sequence"))?;
        let width = match c {
            'u' => 4,
            'U' => 8,
            't' if in_string => return Ok('\t'),
            'b' if in_string => return Ok('\u{8}'),
            'n' if in_string => return Ok('\n'),
            'r' if in_string => return Ok('\r'),
            'f' if in_string => return Ok('\u{c}'),
            '"' | '\'' | '\\' if in_string => return Ok(c),
            _ => return Err(self.err(line, col, "invalid escape sequence")),
        };
        let mut code = 0;
        for _ in 0..width {
            let d = self.bump().and_then(|c| c.to_digit(16)).ok_or_else(|| self.err(line, col, "invalid unicode escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.err(line, col, "escape is not a unicode scalar value"))
    }
}

struct TurtleParser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    prefixes: BTreeMap<String, String>,
    eof: (usize, usize),
}

impl TurtleParser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |(_, l, c)| (*l, *c))
    }

    fn err(&self, msg: impl Into<String>) -> SyntaxError {
        let (l, c) = self.here();
        SyntaxError::new(l, c, msg)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn iri_of(&self, tok: Tok) -> Result<Iri, SyntaxError> {
        let value = match tok {
            Tok::Iri(s) => s,
            Tok::PName(prefix, local) => {
                let ns = self.prefixes.get(&prefix).ok_or_else(|| self.err(format!("undeclared prefix {prefix:?}")))?;
                format!("{ns}{local}")
            }
            Tok::A => rdf::TYPE.to_owned(),
            _ => return Err(self.err("expected an IRI")),
        };
        Iri::new(value).map_err(|e| self.err(e.to_string()))
    }

    fn document(&mut self) -> Result<Vec<Triple>, SyntaxError> {
        let mut out = Vec::new();
        while let Some(tok) = self.peek().cloned() {
            if let Tok::PrefixDirective { sparql_style } = tok {
                self.pos += 1;
                let (prefix, local) = match self.next() {
                    Some(Tok::PName(p, l)) => (p, l),
                    _ => {
                        self.pos -= 1;
                        return Err(self.err("expected prefix name"));
                    }
                };
                if !local.is_empty() {
                    self.pos -= 1;
                    return Err(self.err("expected prefix name ending in ':'"));
                }
                let Some(Tok::Iri(ns)) = self.next() else {
                    self.pos -= 1;
                    return Err(self.err("expected namespace IRI"));
                };
                if !sparql_style {
                    self.expect(&Tok::Dot, "'.'")?;
                }
                self.prefixes.insert(prefix, ns);
                continue;
            }
            let subj_at = self.pos;
            let subject = self.next().ok_or_else(|| self.err("expected subject"))?;
            if matches!(subject, Tok::Literal(_) | Tok::Number(_) | Tok::Bool(_)) {
                self.pos = subj_at;
                return Err(self.err("a literal cannot be used in subject position"));
            }
            let subject = {
                self.pos = subj_at;
                let r = self.iri_of(subject);
                self.pos = subj_at + 1;
                r?
            };
            loop {
                let pred_at = self.pos;
                let pred = self.next().ok_or_else(|| self.err("expected predicate"))?;
                let predicate = {
                    self.pos = pred_at;
                    let r = self.iri_of(pred);
                    self.pos = pred_at + 1;
                    r?
                };
                loop {
                    let object = self.object()?;
                    out.push(Triple::new(subject.clone(), predicate.clone(), object));
                    if self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                match self.peek() {
                    Some(Tok::Semicolon) => {
                        while self.peek() == Some(&Tok::Semicolon) {
                            self.pos += 1;
                        }
                        if self.peek() == Some(&Tok::Dot) {
                            self.pos += 1;
                            break;
                        }
                    }
                    Some(Tok::Dot) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ';', ',' or '.'")),
                }
            }
        }
        Ok(out)
    }

    fn object(&mut self) -> Result<Term, SyntaxError> {
        let at = self.pos;
        match self.next() {
            Some(Tok::Literal(lex)) => match self.peek().cloned() {
                Some(Tok::LangTag(tag)) => {
                    self.pos += 1;
                    Literal::lang_string(lex, &tag).map(Term::Literal).map_err(|e| self.err(e.to_string()))
                }
                Some(Tok::DatatypeMark) => {
                    self.pos += 1;
                    let dt_tok = self.next().ok_or_else(|| self.err("expected datatype"))?;
                    self.pos -= 1;
                    let dt = self.iri_of(dt_tok)?;
                    self.pos += 1;
                    Literal::typed(lex, dt).map(Term::Literal).map_err(|e| {
                        self.pos = at;
                        self.err(e.to_string())
                    })
                }
                _ => Ok(Term::Literal(Literal::string(lex))),
            },
            Some(Tok::Number(n)) => {
                let dt = if n.contains(['e', 'E']) {
                    xsd::DOUBLE
                } else if n.contains('.') {
                    xsd::DECIMAL
                } else {
                    xsd::INTEGER
                };
                Literal::typed(n, Iri::from_static(dt)).map(Term::Literal).map_err(|e| {
                    self.pos = at;
                    self.err(e.to_string())
                })
            }
            Some(Tok::Bool(b)) => Ok(Term::Literal(Literal::typed(b.to_string(), Iri::from_static(xsd::BOOLEAN)).expect("valid boolean"))),
            Some(tok @ (Tok::Iri(_) | Tok::PName(..) | Tok::A)) => {
                self.pos = at;
                let r = self.iri_of(tok).map(Term::Iri);
                self.pos = at + 1;
                r
            }
            _ => {
                self.pos = at;
                Err(self.err("expected object"))
            }
        }
    }
}

/// Parses the supported Turtle subset.
pub fn parse_turtle(input: impl AsRef<[u8]>) -> Result<Vec<Triple>, SyntaxError> {
    let text = decode_utf8(input.as_ref())?;
    let toks = Lexer::new(text).tokens()?;
    let eof = {
        let line = text.matches('\n').count() + 1;
        let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    };
    TurtleParser { toks, pos: 0, prefixes: BTreeMap::new(), eof }.document()
}
