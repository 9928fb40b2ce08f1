//! Tokenizer and recursive-descent parser for the supported SELECT subset.

use std::collections::BTreeMap;
use std::fmt;

use climakg_core::vocab::{rdf, xsd};
use climakg_core::{Iri, Literal, Term};

use crate::ast::*;

/// A syntax error with a 1-based position and the offending token.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at line {line}, column {column} near {token}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    /// The offending token as written, or `end of input`.
    pub token: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Iri(String),
    PName(String, String),
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Punct(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Var(s) => write!(f, "`?{s}`"),
            Tok::Iri(s) => write!(f, "`<{s}>`"),
            Tok::PName(p, l) => write!(f, "`{p}:{l}`"),
            Tok::Str(s) => write!(f, "`\"{s}\"`"),
            Tok::LangTag(s) => write!(f, "`@{s}`"),
            Tok::Integer(s) | Tok::Decimal(s) | Tok::Double(s) => write!(f, "`{s}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const PUNCTS: [&str; 21] = [
    "&&", "||", "!=", "<=", ">=", "^^", "{", "}", "(", ")", ".", ";", ",", "*", "=", "<", ">", "!", "+", "-", "/",
];

fn tokenize(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, token: String, message: &str| ParseError { line, column, token, message: message.to_owned() };
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        let rest = &chars[i..];
        let (tok, len) = if c == '?' || c == '$' {
            let n = rest[1..].iter().take_while(|c| c.is_alphanumeric() || **c == '_').count();
            if n == 0 {
                return Err(err(tline, tcol, format!("`{c}`"), "expected a variable name"));
            }
            (Tok::Var(rest[1..=n].iter().collect()), n + 1)
        } else if c == '<' && iri_ref_len(rest).is_some() {
            let n = iri_ref_len(rest).unwrap_or(0);
            let mut value = String::new();
            let mut j = 1;
            while j < n - 1 {
                if rest[j] == '\\' {
                    let width = match rest.get(j + 1) {
                        Some('u') => 4,
                        Some('U') => 8,
                        _ => return Err(err(tline, tcol, "`\\`".into(), "invalid escape in IRI")),
                    };
                    let code: String = rest.get(j + 2..j + 2 + width).map(|s| s.iter().collect()).unwrap_or_default();
                    let ch = u32::from_str_radix(&code, 16).ok().and_then(char::from_u32);
                    value.push(ch.ok_or_else(|| err(tline, tcol, "`\\`".into(), "invalid unicode escape in IRI"))?);
                    j += 2 + width;
                } else {
                    value.push(rest[j]);
                    j += 1;
                }
            }
            (Tok::Iri(value), n)
        } else if c == '"' || c == '\'' {
            let mut value = String::new();
            let mut j = 1;
            loop {
                match rest.get(j) {
                    None | Some('\n') => return Err(err(tline, tcol, format!("`{c}`"), "unterminated string literal")),
                    Some(q) if *q == c => break,
                    Some('\\') => {
                        let e = rest.get(j + 1).copied();
                        let simple = match e {
                            Some('t') => Some('\t'),
                            Some('n') => Some('\n'),
                            Some('r') => Some('\r'),
                            Some('b') => Some('\u{8}'),
                            Some('f') => Some('\u{c}'),
                            Some('"') => Some('"'),
                            Some('\'') => Some('\''),
                            Some('\\') => Some('\\'),
                            _ => None,
                        };
                        if let Some(ch) = simple {
                            value.push(ch);
                            j += 2;
                        } else {
                            let width = match e {
                                Some('u') => 4,
                                Some('U') => 8,
                                _ => return Err(err(tline, tcol + j, "`\\`".into(), "invalid escape sequence")),
                            };
                            let code: String = rest.get(j + 2..j + 2 + width).map(|s| s.iter().collect()).unwrap_or_default();
                            let ch = u32::from_str_radix(&code, 16).ok().and_then(char::from_u32);
                            value.push(ch.ok_or_else(|| err(tline, tcol + j, "`\\`".into(), "invalid unicode escape"))?);
                            j += 2 + width;
                        }
                    }
                    Some(ch) => {
                        value.push(*ch);
                        j += 1;
                    }
                }
            }
            (Tok::Str(value), j + 1)
        } else if c == '@' {
            let n = rest[1..].iter().take_while(|c| c.is_ascii_alphanumeric() || **c == '-').count();
            if n == 0 {
                return Err(err(tline, tcol, "`@`".into(), "expected a language tag"));
            }
            (Tok::LangTag(rest[1..=n].iter().collect()), n + 1)
        } else if c.is_ascii_digit() || (c == '.' && rest.get(1).is_some_and(char::is_ascii_digit)) {
            number(rest)
        } else if c.is_alphabetic() || c == '_' || c == ':' {
            let n = rest
                .iter()
                .enumerate()
                .take_while(|(k, c)| {
                    c.is_alphanumeric()
                        || matches!(c, '_' | '-' | ':' | '%')
                        || (**c == '.' && rest.get(k + 1).is_some_and(|n| n.is_alphanumeric() || matches!(n, '_' | '-' | ':')))
                })
                .count();
            let word: String = rest[..n].iter().collect();
            match word.split_once(':') {
                Some((p, l)) => (Tok::PName(p.to_owned(), l.to_owned()), n),
                None => (Tok::Ident(word), n),
            }
        } else if let Some(p) = PUNCTS.iter().find(|p| rest.iter().take(p.len()).copied().eq(p.chars())) {
            (Tok::Punct(p), p.len())
        } else {
            return Err(err(tline, tcol, format!("`{c}`"), "unexpected character"));
        };
        advance(&mut i, &mut line, &mut col, len);
        out.push(Spanned { tok, line: tline, column: tcol });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// Length of an IRIREF starting at `<`, if the text there is one.
fn iri_ref_len(rest: &[char]) -> Option<usize> {
    for (k, c) in rest.iter().enumerate().skip(1) {
        match c {
            '>' => return Some(k + 1),
            c if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => return None,
            _ => {}
        }
    }
    None
}

fn number(rest: &[char]) -> (Tok, usize) {
    let mut n = rest.iter().take_while(|c| c.is_ascii_digit()).count();
    let mut decimal = false;
    if rest.get(n) == Some(&'.') && rest.get(n + 1).is_some_and(char::is_ascii_digit) {
        decimal = true;
        n += 1;
        n += rest[n..].iter().take_while(|c| c.is_ascii_digit()).count();
    }
    if matches!(rest.get(n), Some('e' | 'E')) {
        let mut m = n + 1;
        if matches!(rest.get(m), Some('+' | '-')) {
            m += 1;
        }
        let digits = rest[m.min(rest.len())..].iter().take_while(|c| c.is_ascii_digit()).count();
        if digits > 0 {
            let text: String = rest[..m + digits].iter().collect();
            return (Tok::Double(text), m + digits);
        }
    }
    let text: String = rest[..n].iter().collect();
    (if decimal { Tok::Decimal(text) } else { Tok::Integer(text) }, n)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, token: s.tok.to_string(), message: message.into() }
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let s = &self.toks[pos];
        ParseError { line: s.line, column: s.column, token: s.tok.to_string(), message: message.into() }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(w) if w.eq_ignore_ascii_case(kw))
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected {kw}")))
        }
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str, context: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{p}' {context}")))
        }
    }

    fn make_iri(&self, value: String, at: usize) -> PResult<Iri> {
        let value = match &self.base {
            Some(base) if !value.contains(':') => format!("{base}{value}"),
            _ => value,
        };
        Iri::new(value).map_err(|e| self.error_at(at, e.to_string()))
    }

    fn resolve_pname(&self, prefix: &str, local: &str, at: usize) -> PResult<Iri> {
        let ns = self.prefixes.get(prefix).ok_or_else(|| self.error_at(at, format!("undeclared prefix '{prefix}:'")))?;
        Iri::new(format!("{ns}{local}")).map_err(|e| self.error_at(at, e.to_string()))
    }

    /// An IRI written either way, if the next token is one.
    fn iri_token(&mut self) -> PResult<Option<Iri>> {
        let at = self.pos;
        match self.peek().clone() {
            Tok::Iri(v) => {
                self.next();
                self.make_iri(v, at).map(Some)
            }
            Tok::PName(p, l) => {
                self.next();
                self.resolve_pname(&p, &l, at).map(Some)
            }
            _ => Ok(None),
        }
    }

    fn query(&mut self) -> PResult<Query> {
        loop {
            if self.eat_keyword("PREFIX") {
                let at = self.pos;
                let Tok::PName(prefix, local) = self.next() else {
                    return Err(self.error_at(at, "expected a prefix name such as 'ex:'"));
                };
                if !local.is_empty() {
                    return Err(self.error_at(at, "prefix name must end with ':'"));
                }
                let at = self.pos;
                let Tok::Iri(ns) = self.next() else {
                    return Err(self.error_at(at, "expected a namespace IRI"));
                };
                let ns = self.make_iri(ns, at)?;
                self.prefixes.insert(prefix, ns.into_string());
            } else if self.eat_keyword("BASE") {
                let at = self.pos;
                let Tok::Iri(b) = self.next() else {
                    return Err(self.error_at(at, "expected a base IRI"));
                };
                self.base = Some(Iri::new(b).map_err(|e| self.error_at(at, e.to_string()))?.into_string());
            } else {
                break;
            }
        }
        for kw in ["ASK", "CONSTRUCT", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR", "DROP", "CREATE"] {
            if self.is_keyword(kw) {
                return Err(self.error(format!("{kw} is not supported; only SELECT queries are")));
            }
        }
        self.expect_keyword("SELECT")?;
        let distinct = if self.eat_keyword("DISTINCT") {
            true
        } else {
            self.eat_keyword("REDUCED");
            false
        };
        let mut projection_positions = Vec::new();
        let projection = if self.eat_punct("*") {
            Projection::All
        } else {
            let mut items = Vec::new();
            loop {
                let at = self.pos;
                match self.peek().clone() {
                    Tok::Var(v) => {
                        self.next();
                        items.push(ProjectionItem::Var(Var(v)));
                        projection_positions.push(at);
                    }
                    Tok::Punct("(") => {
                        self.next();
                        let Some(aggregate) = self.aggregate()? else {
                            return Err(self.error("only aggregates (COUNT, SUM, AVG, MIN, MAX) may be projected with AS"));
                        };
                        self.expect_keyword("AS")?;
                        let alias = self.var()?;
                        self.expect_punct(")", "to close the projection expression")?;
                        items.push(ProjectionItem::Aggregate { aggregate, alias });
                        projection_positions.push(at);
                    }
                    _ => break,
                }
            }
            if items.is_empty() {
                return Err(self.error("expected '*' or projected variables"));
            }
            Projection::Items(items)
        };
        self.eat_keyword("WHERE");
        if !self.is_punct("{") {
            return Err(self.error("expected '{' to open the WHERE clause"));
        }
        let pattern = self.group()?;

        let mut group_by = Vec::new();
        if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            loop {
                match self.peek().clone() {
                    Tok::Var(v) => {
                        self.next();
                        group_by.push(GroupKey { expr: Expr::Var(Var(v)), alias: None });
                    }
                    Tok::Punct("(") => {
                        self.next();
                        let expr = self.expr()?;
                        let alias = if self.eat_keyword("AS") { Some(self.var()?) } else { None };
                        self.expect_punct(")", "to close the grouping expression")?;
                        group_by.push(GroupKey { expr, alias });
                    }
                    Tok::Ident(name) if Function::from_name(&name).is_some() => {
                        let expr = self.primary()?;
                        group_by.push(GroupKey { expr, alias: None });
                    }
                    _ => break,
                }
            }
            if group_by.is_empty() {
                return Err(self.error("expected a grouping variable or expression"));
            }
        }
        if self.is_keyword("HAVING") {
            return Err(self.error("HAVING is not supported"));
        }
        let mut order_by = Vec::new();
        if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                if self.is_keyword("ASC") || self.is_keyword("DESC") {
                    let descending = self.is_keyword("DESC");
                    self.next();
                    if !self.is_punct("(") {
                        return Err(self.error("expected '(' after ASC/DESC"));
                    }
                    let expr = self.primary()?;
                    order_by.push(OrderKey { expr, descending });
                } else if matches!(self.peek(), Tok::Var(_) | Tok::Punct("("))
                    || matches!(self.peek(), Tok::Ident(n) if Function::from_name(n).is_some())
                {
                    let expr = self.primary()?;
                    order_by.push(OrderKey { expr, descending: false });
                } else {
                    break;
                }
            }
            if order_by.is_empty() {
                return Err(self.error("expected an ordering condition"));
            }
        }
        let (mut limit, mut offset) = (None, None);
        loop {
            if limit.is_none() && self.eat_keyword("LIMIT") {
                limit = Some(self.unsigned()?);
            } else if offset.is_none() && self.eat_keyword("OFFSET") {
                offset = Some(self.unsigned()?);
            } else {
                break;
            }
        }
        if *self.peek() != Tok::Eof {
            return Err(self.error("unexpected token after the end of the query"));
        }
        let query = Query {
            prefixes: self.prefixes.clone(),
            distinct,
            projection,
            pattern,
            group_by,
            order_by,
            limit,
            offset,
        };
        self.validate(&query, &projection_positions)?;
        Ok(query)
    }

    fn validate(&self, query: &Query, positions: &[usize]) -> PResult<()> {
        let Projection::Items(items) = &query.projection else {
            if query.is_grouped() {
                return Err(self.error_at(0, "SELECT * cannot be combined with GROUP BY"));
            }
            return Ok(());
        };
        let mut seen = Vec::new();
        for (item, &at) in items.iter().zip(positions) {
            if seen.contains(item.var()) {
                return Err(self.error_at(at, format!("variable {} is projected twice", item.var())));
            }
            seen.push(item.var().clone());
        }
        if query.is_grouped() {
            let grouped: Vec<&Var> = query.group_by.iter().filter_map(GroupKey::output_var).collect();
            for (item, &at) in items.iter().zip(positions) {
                if let ProjectionItem::Var(v) = item {
                    if !grouped.contains(&v) {
                        return Err(self.error_at(at, format!("variable {v} is neither grouped nor aggregated")));
                    }
                }
            }
        } else {
            let bound = query.pattern.variables();
            for (item, &at) in items.iter().zip(positions) {
                if !bound.contains(item.var()) {
                    return Err(self.error_at(at, format!("variable {} does not occur in the pattern", item.var())));
                }
            }
        }
        Ok(())
    }

    fn unsigned(&mut self) -> PResult<usize> {
        let at = self.pos;
        match self.next() {
            Tok::Integer(n) => n.parse().map_err(|_| self.error_at(at, "integer out of range")),
            _ => Err(self.error_at(at, "expected a non-negative integer")),
        }
    }

    fn var(&mut self) -> PResult<Var> {
        let at = self.pos;
        match self.next() {
            Tok::Var(v) => Ok(Var(v)),
            _ => Err(self.error_at(at, "expected a variable")),
        }
    }

    fn group(&mut self) -> PResult<GroupPattern> {
        self.expect_punct("{", "to open a group")?;
        let mut elements: Vec<PatternElement> = Vec::new();
        loop {
            if self.eat_punct("}") {
                break;
            }
            if *self.peek() == Tok::Eof {
                return Err(self.error("unexpected end of input: unclosed group, expected '}'"));
            }
            if self.eat_punct(".") {
                continue;
            }
            if self.eat_keyword("FILTER") {
                let expr = if self.is_punct("(") {
                    self.next();
                    let e = self.expr()?;
                    self.expect_punct(")", "to close FILTER")?;
                    e
                } else {
                    match self.peek() {
                        Tok::Ident(n) if Function::from_name(n).is_some() => self.primary()?,
                        _ => return Err(self.error("expected '(' or a function call after FILTER")),
                    }
                };
                elements.push(PatternElement::Filter(expr));
                continue;
            }
            if self.eat_keyword("OPTIONAL") {
                elements.push(PatternElement::Optional(self.group()?));
                continue;
            }
            if self.eat_keyword("GRAPH") {
                if matches!(self.peek(), Tok::Var(_)) {
                    return Err(self.error("GRAPH with a variable is not supported; name the graph IRI"));
                }
                let Some(g) = self.iri_token()? else {
                    return Err(self.error("expected a graph IRI after GRAPH"));
                };
                elements.push(PatternElement::Graph(g, self.group()?));
                continue;
            }
            if self.is_punct("{") {
                let g = self.group()?;
                if self.is_keyword("UNION") {
                    return Err(self.error("UNION is not supported"));
                }
                elements.push(PatternElement::Group(g));
                continue;
            }
            for kw in ["BIND", "VALUES", "MINUS", "SERVICE", "UNION", "SELECT"] {
                if self.is_keyword(kw) {
                    return Err(self.error(format!("{kw} is not supported")));
                }
            }
            let triples = self.triples_same_subject()?;
            // Triple blocks separated only by filters form one basic graph pattern.
            let last_non_filter = elements.iter_mut().rev().find(|e| !matches!(e, PatternElement::Filter(_)));
            match last_non_filter {
                Some(PatternElement::Triples(existing)) => existing.extend(triples),
                _ => elements.push(PatternElement::Triples(triples)),
            }
            if !self.eat_punct(".") && !self.is_punct("}") && !self.is_keyword("FILTER") && !self.is_keyword("OPTIONAL")
                && !self.is_keyword("GRAPH") && !self.is_punct("{")
            {
                if *self.peek() == Tok::Eof {
                    return Err(self.error("unexpected end of input: unclosed group, expected '}'"));
                }
                return Err(self.error("expected '.' or '}' after triple pattern"));
            }
        }
        Ok(GroupPattern { elements })
    }

    fn var_or_term(&mut self, position: &str) -> PResult<TermPattern> {
        let at = self.pos;
        match self.peek().clone() {
            Tok::Var(v) => {
                self.next();
                Ok(TermPattern::Var(Var(v)))
            }
            Tok::Iri(_) | Tok::PName(..) => Ok(TermPattern::Term(Term::Iri(self.iri_token()?.expect("IRI token")))),
            Tok::Ident(w) if w == "a" && position == "predicate" => {
                self.next();
                Ok(TermPattern::Term(Term::Iri(Iri::from_static(rdf::TYPE))))
            }
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) | Tok::Punct("+" | "-") => {
                if position != "object" {
                    return Err(self.error_at(at, format!("a literal cannot be used in {position} position")));
                }
                Ok(TermPattern::Term(self.literal()?))
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                if position != "object" {
                    return Err(self.error_at(at, format!("a literal cannot be used in {position} position")));
                }
                Ok(TermPattern::Term(self.literal()?))
            }
            Tok::Punct("[") | Tok::Punct("(") => Err(self.error("blank nodes and collections are not supported")),
            Tok::Eof => Err(self.error(format!("unexpected end of input, expected {position}"))),
            _ => Err(self.error(format!("expected {position}"))),
        }
    }

    fn triples_same_subject(&mut self) -> PResult<Vec<TriplePattern>> {
        let subject = self.var_or_term("subject")?;
        let mut out = Vec::new();
        loop {
            let predicate = self.var_or_term("predicate")?;
            loop {
                let object = self.var_or_term("object")?;
                out.push(TriplePattern { subject: subject.clone(), predicate: predicate.clone(), object });
                if !self.eat_punct(",") {
                    break;
                }
            }
            if self.eat_punct(";") {
                while self.eat_punct(";") {}
                if self.is_punct(".") || self.is_punct("}") {
                    break;
                }
            } else {
                break;
            }
        }
        Ok(out)
    }

    /// A literal constant: string (with optional tag or datatype), number or
    /// boolean.
    fn literal(&mut self) -> PResult<Term> {
        let at = self.pos;
        let sign = if self.eat_punct("-") {
            "-"
        } else {
            self.eat_punct("+");
            ""
        };
        let make = |p: &Self, lex: String, dt: &'static str| {
            Literal::typed(lex, Iri::from_static(dt)).map(Term::Literal).map_err(|e| p.error_at(at, e.to_string()))
        };
        match self.next() {
            Tok::Integer(n) => make(self, format!("{sign}{n}"), xsd::INTEGER),
            Tok::Decimal(n) => make(self, format!("{sign}{n}"), xsd::DECIMAL),
            Tok::Double(n) => make(self, format!("{sign}{n}"), xsd::DOUBLE),
            Tok::Str(s) if sign.is_empty() => match self.peek().clone() {
                Tok::LangTag(tag) => {
                    self.next();
                    Literal::lang_string(s, &tag).map(Term::Literal).map_err(|e| self.error_at(at, e.to_string()))
                }
                Tok::Punct("^^") => {
                    self.next();
                    let dt_at = self.pos;
                    let Some(dt) = self.iri_token()? else {
                        return Err(self.error_at(dt_at, "expected a datatype IRI"));
                    };
                    Literal::typed(s, dt).map(Term::Literal).map_err(|e| self.error_at(at, e.to_string()))
                }
                _ => Ok(Term::Literal(Literal::string(s))),
            },
            Tok::Ident(w) if sign.is_empty() && (w == "true" || w == "false") => make(self, w, xsd::BOOLEAN),
            _ => Err(self.error_at(at, "expected a literal")),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while self.eat_punct("||") {
            let rhs = self.and_expr()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.relational()?;
        while self.eat_punct("&&") {
            let rhs = self.relational()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn relational(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct("<") => CompareOp::Lt,
            Tok::Punct("<=") => CompareOp::Le,
            Tok::Punct(">") => CompareOp::Gt,
            Tok::Punct(">=") => CompareOp::Ge,
            _ => return Ok(lhs),
        };
        self.next();
        let rhs = self.additive()?;
        Ok(Expr::Compare(op, Box::new(lhs), Box::new(rhs)))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Punct("+") => ArithOp::Add,
                Tok::Punct("-") => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.multiplicative()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Punct("*") => ArithOp::Mul,
                Tok::Punct("/") => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::Arith(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_punct("!") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.is_punct("-") && !matches!(self.peek_at(1), Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_)) {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_punct("+") && !matches!(self.peek_at(1), Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_)) {
            self.next();
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.pos;
        match self.peek().clone() {
            Tok::Punct("(") => {
                self.next();
                let e = self.expr()?;
                self.expect_punct(")", "to close the parenthesised expression")?;
                Ok(e)
            }
            Tok::Var(v) => {
                self.next();
                Ok(Expr::Var(Var(v)))
            }
            Tok::Iri(_) | Tok::PName(..) => Ok(Expr::Constant(Term::Iri(self.iri_token()?.expect("IRI token")))),
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) | Tok::Punct("-" | "+") => {
                Ok(Expr::Constant(self.literal()?))
            }
            Tok::Ident(w) if w == "true" || w == "false" => Ok(Expr::Constant(self.literal()?)),
            Tok::Ident(name) => {
                if matches!(name.to_ascii_uppercase().as_str(), "COUNT" | "SUM" | "AVG" | "MIN" | "MAX") {
                    return Err(self.error("aggregates are only allowed in the SELECT clause"));
                }
                let Some(function) = Function::from_name(&name) else {
                    return Err(self.error(format!("unknown or unsupported function {name}")));
                };
                self.next();
                self.expect_punct("(", "after function name")?;
                let mut args = Vec::new();
                if !self.is_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                self.expect_punct(")", "to close the argument list")?;
                if !function.arity().contains(&args.len()) {
                    return Err(self.error_at(at, format!("wrong number of arguments for {}", name.to_ascii_uppercase())));
                }
                if function == Function::Bound && !matches!(args[0], Expr::Var(_)) {
                    return Err(self.error_at(at, "BOUND expects a variable"));
                }
                Ok(Expr::Call(function, args))
            }
            Tok::Eof => Err(self.error("unexpected end of input in expression")),
            _ => Err(self.error("expected an expression")),
        }
    }

    /// Parses an aggregate call if one starts here.
    fn aggregate(&mut self) -> PResult<Option<Aggregate>> {
        let function = match self.peek() {
            Tok::Ident(n) => match n.to_ascii_uppercase().as_str() {
                "COUNT" => AggregateFn::Count,
                "SUM" => AggregateFn::Sum,
                "AVG" => AggregateFn::Avg,
                "MIN" => AggregateFn::Min,
                "MAX" => AggregateFn::Max,
                _ => return Ok(None),
            },
            _ => return Ok(None),
        };
        self.next();
        self.expect_punct("(", "after aggregate name")?;
        let distinct = self.eat_keyword("DISTINCT");
        let arg = if self.is_punct("*") {
            if function != AggregateFn::Count {
                return Err(self.error("'*' is only allowed in COUNT"));
            }
            self.next();
            None
        } else {
            Some(self.expr()?)
        };
        self.expect_punct(")", "to close the aggregate")?;
        Ok(Some(Aggregate { function, distinct, arg }))
    }
}

/// Parses a query of the supported subset.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let toks = tokenize(text)?;
    Parser { toks, pos: 0, prefixes: BTreeMap::new(), base: None }.query()
}
