//! Expression evaluation with SPARQL error semantics.
//!
//! `Err(())` is the SPARQL type error: it makes a FILTER reject the row and
//! leaves a grouping key or ORDER BY key unbound.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::HashMap;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use climakg_core::model::{format_double, is_numeric_datatype};
use climakg_core::vocab::{rdf, xsd};
use climakg_core::{Iri, Literal, Term};
use regex::Regex;

use crate::ast::{ArithOp, CompareOp, Expr, Function, Var};

pub(crate) type EvalResult = Result<Term, ()>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum NumKind {
    Integer,
    Decimal,
    Double,
}

pub(crate) fn numeric(term: &Term) -> Option<(NumKind, f64)> {
    let lit = term.as_literal()?;
    let dt = lit.datatype().as_str();
    if !is_numeric_datatype(dt) {
        return None;
    }
    let kind = match dt {
        xsd::DOUBLE | "http://www.w3.org/2001/XMLSchema#float" => NumKind::Double,
        xsd::DECIMAL => NumKind::Decimal,
        _ => NumKind::Integer,
    };
    lit.as_f64().map(|v| (kind, v))
}

pub(crate) fn make_numeric(kind: NumKind, value: f64) -> Term {
    let (lexical, dt) = match kind {
        NumKind::Integer => (format!("{}", value.trunc() as i64), xsd::INTEGER),
        NumKind::Decimal => (format_double(value), xsd::DECIMAL),
        NumKind::Double => (format_double(value), xsd::DOUBLE),
    };
    match Literal::typed(lexical, Iri::from_static(dt)) {
        Ok(lit) => Term::Literal(lit),
        // Non-finite decimals have no lexical form; fall back to double.
        Err(_) => Term::Literal(Literal::double(value)),
    }
}

fn boolean(b: bool) -> Term {
    Term::Literal(Literal::typed(if b { "true" } else { "false" }, Iri::from_static(xsd::BOOLEAN)).expect("valid boolean"))
}

fn is_simple_string(lit: &Literal) -> bool {
    lit.datatype().as_str() == xsd::STRING
}

fn is_string_like(lit: &Literal) -> bool {
    is_simple_string(lit) || lit.lang().is_some()
}

/// A comparable instant for `xsd:dateTime` and `xsd:date` literals.
/// Values without a zone are read as UTC.
pub(crate) fn temporal(term: &Term) -> Option<NaiveDateTime> {
    let lit = term.as_literal()?;
    let s = lit.lexical();
    match lit.datatype().as_str() {
        xsd::DATE_TIME => {
            if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
                return Some(dt.naive_utc());
            }
            let body = s.strip_suffix('Z').unwrap_or(s);
            NaiveDateTime::parse_from_str(body, "%Y-%m-%dT%H:%M:%S%.f").ok()
        }
        xsd::DATE => {
            let body = s.get(..10)?;
            NaiveDate::parse_from_str(body, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0))
        }
        _ => None,
    }
}

/// Effective boolean value.
pub(crate) fn ebv(term: &Term) -> Result<bool, ()> {
    let Term::Literal(lit) = term else { return Err(()) };
    if lit.datatype().as_str() == xsd::BOOLEAN {
        return Ok(matches!(lit.lexical(), "true" | "1"));
    }
    if let Some((_, v)) = numeric(term) {
        return Ok(v != 0.0 && !v.is_nan());
    }
    if is_string_like(lit) {
        return Ok(!lit.lexical().is_empty());
    }
    Err(())
}

fn compare_values(op: CompareOp, a: &Term, b: &Term) -> Result<bool, ()> {
    let ord = value_cmp(a, b);
    let equality = matches!(op, CompareOp::Eq | CompareOp::Ne);
    let ord = match ord {
        Some(o) => o,
        None if equality => {
            // Different value spaces: terms are equal only if identical.
            // Unknown literal types with different forms are an error.
            let same = a == b;
            if !same {
                if let (Term::Literal(x), Term::Literal(y)) = (a, b) {
                    let known = |l: &Literal| {
                        is_string_like(l)
                            || is_numeric_datatype(l.datatype().as_str())
                            || matches!(l.datatype().as_str(), xsd::BOOLEAN | xsd::DATE_TIME | xsd::DATE)
                    };
                    if !known(x) && !known(y) && x.datatype() == y.datatype() {
                        return Err(());
                    }
                }
            }
            return Ok(if op == CompareOp::Eq { same } else { !same });
        }
        None => return Err(()),
    };
    Ok(match op {
        CompareOp::Eq => ord == Ordering::Equal,
        CompareOp::Ne => ord != Ordering::Equal,
        CompareOp::Lt => ord == Ordering::Less,
        CompareOp::Le => ord != Ordering::Greater,
        CompareOp::Gt => ord == Ordering::Greater,
        CompareOp::Ge => ord != Ordering::Less,
    })
}

/// Value comparison where the operands share a comparable value space.
/// IRIs and language-tagged strings only support equality.
fn value_cmp(a: &Term, b: &Term) -> Option<Ordering> {
    if let (Some((_, x)), Some((_, y))) = (numeric(a), numeric(b)) {
        return x.partial_cmp(&y);
    }
    let (Term::Literal(x), Term::Literal(y)) = (a, b) else {
        return match (a, b) {
            (Term::Iri(x), Term::Iri(y)) if x == y => Some(Ordering::Equal),
            _ => None,
        };
    };
    if is_simple_string(x) && is_simple_string(y) {
        return Some(x.lexical().cmp(y.lexical()));
    }
    if x.datatype().as_str() == xsd::BOOLEAN && y.datatype().as_str() == xsd::BOOLEAN {
        let v = |l: &Literal| matches!(l.lexical(), "true" | "1");
        return Some(v(x).cmp(&v(y)));
    }
    if let (Some(p), Some(q)) = (temporal(a), temporal(b)) {
        if x.datatype() == y.datatype() {
            return Some(p.cmp(&q));
        }
    }
    if x == y {
        return Some(Ordering::Equal);
    }
    None
}

/// Total order used by ORDER BY, MIN and MAX: unbound, then IRIs, then
/// numbers by value, then date/times chronologically, then other literals
/// by lexical form, datatype and language.
pub(crate) fn total_cmp(a: Option<&Term>, b: Option<&Term>) -> Ordering {
    fn rank(t: Option<&Term>) -> u8 {
        match t {
            None => 0,
            Some(Term::Iri(_)) => 1,
            Some(t) if numeric(t).is_some() => 2,
            Some(t) if temporal(t).is_some() => 3,
            Some(_) => 4,
        }
    }
    let (ra, rb) = (rank(a), rank(b));
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (a, b) {
        (Some(x), Some(y)) => match ra {
            2 => {
                let (p, q) = (numeric(x).map(|n| n.1).unwrap_or(0.0), numeric(y).map(|n| n.1).unwrap_or(0.0));
                p.total_cmp(&q).then_with(|| x.cmp(y))
            }
            3 => temporal(x).cmp(&temporal(y)).then_with(|| x.cmp(y)),
            4 => {
                let (Term::Literal(l), Term::Literal(m)) = (x, y) else { return x.cmp(y) };
                l.lexical()
                    .cmp(m.lexical())
                    .then_with(|| l.datatype().cmp(m.datatype()))
                    .then_with(|| l.lang().cmp(&m.lang()))
            }
            _ => x.cmp(y),
        },
        _ => Ordering::Equal,
    }
}

fn arith(op: ArithOp, a: &Term, b: &Term) -> EvalResult {
    let ((ka, x), (kb, y)) = (numeric(a).ok_or(())?, numeric(b).ok_or(())?);
    let mut kind = ka.max(kb);
    let value = match op {
        ArithOp::Add => x + y,
        ArithOp::Sub => x - y,
        ArithOp::Mul => x * y,
        ArithOp::Div => {
            if kind == NumKind::Integer {
                kind = NumKind::Decimal;
            }
            if y == 0.0 && kind != NumKind::Double {
                return Err(());
            }
            x / y
        }
    };
    Ok(make_numeric(kind, value))
}

fn date_part(term: &Term, f: Function) -> EvalResult {
    let lit = term.as_literal().ok_or(())?;
    if !matches!(lit.datatype().as_str(), xsd::DATE_TIME | xsd::DATE) {
        return Err(());
    }
    let s = lit.lexical();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let mut parts = body.splitn(3, '-');
    let year: i64 = parts.next().and_then(|p| p.parse().ok()).ok_or(())?;
    let month: i64 = parts.next().and_then(|p| p.parse().ok()).ok_or(())?;
    let day: i64 = parts.next().and_then(|p| p.get(..2)).and_then(|p| p.parse().ok()).ok_or(())?;
    Ok(Term::Literal(Literal::integer(match f {
        Function::Year => if neg { -year } else { year },
        Function::Month => month,
        _ => day,
    })))
}

/// Per-query evaluation context; caches compiled regular expressions.
#[derive(Default)]
pub(crate) struct ExprContext {
    regexes: RefCell<HashMap<(String, String), Option<Regex>>>,
}

impl ExprContext {
    pub(crate) fn eval<'t>(&self, expr: &Expr, lookup: &dyn Fn(&Var) -> Option<&'t Term>) -> EvalResult {
        match expr {
            Expr::Var(v) => lookup(v).cloned().ok_or(()),
            Expr::Constant(t) => Ok(t.clone()),
            Expr::Or(a, b) => {
                let x = self.eval(a, lookup).and_then(|t| ebv(&t));
                let y = self.eval(b, lookup).and_then(|t| ebv(&t));
                match (x, y) {
                    (Ok(true), _) | (_, Ok(true)) => Ok(boolean(true)),
                    (Ok(false), Ok(false)) => Ok(boolean(false)),
                    _ => Err(()),
                }
            }
            Expr::And(a, b) => {
                let x = self.eval(a, lookup).and_then(|t| ebv(&t));
                let y = self.eval(b, lookup).and_then(|t| ebv(&t));
                match (x, y) {
                    (Ok(false), _) | (_, Ok(false)) => Ok(boolean(false)),
                    (Ok(true), Ok(true)) => Ok(boolean(true)),
                    _ => Err(()),
                }
            }
            Expr::Not(a) => Ok(boolean(!ebv(&self.eval(a, lookup)?)?)),
            Expr::Compare(op, a, b) => {
                let (x, y) = (self.eval(a, lookup)?, self.eval(b, lookup)?);
                compare_values(*op, &x, &y).map(boolean)
            }
            Expr::Arith(op, a, b) => arith(*op, &self.eval(a, lookup)?, &self.eval(b, lookup)?),
            Expr::Neg(a) => {
                let t = self.eval(a, lookup)?;
                let (kind, v) = numeric(&t).ok_or(())?;
                Ok(make_numeric(kind, -v))
            }
            Expr::Call(f, args) => self.call(*f, args, lookup),
        }
    }

    pub(crate) fn filter<'t>(&self, expr: &Expr, lookup: &dyn Fn(&Var) -> Option<&'t Term>) -> bool {
        matches!(self.eval(expr, lookup).and_then(|t| ebv(&t)), Ok(true))
    }

    fn call<'t>(&self, f: Function, args: &[Expr], lookup: &dyn Fn(&Var) -> Option<&'t Term>) -> EvalResult {
        if f == Function::Bound {
            let Expr::Var(v) = &args[0] else { return Err(()) };
            return Ok(boolean(lookup(v).is_some()));
        }
        let first = self.eval(&args[0], lookup)?;
        match f {
            Function::Str => Ok(Term::Literal(Literal::string(match &first {
                Term::Iri(iri) => iri.as_str().to_owned(),
                Term::Literal(lit) => lit.lexical().to_owned(),
            }))),
            Function::Lang => {
                let lit = first.as_literal().ok_or(())?;
                Ok(Term::Literal(Literal::string(lit.lang().unwrap_or(""))))
            }
            Function::Datatype => {
                let lit = first.as_literal().ok_or(())?;
                Ok(Term::Iri(if lit.lang().is_some() { Iri::from_static(rdf::LANG_STRING) } else { lit.datatype().clone() }))
            }
            Function::Year | Function::Month | Function::Day => date_part(&first, f),
            Function::Regex => {
                let text = first.as_literal().filter(|l| is_string_like(l)).ok_or(())?;
                let pattern = self.eval(&args[1], lookup)?;
                let pattern = pattern.as_literal().filter(|l| is_simple_string(l)).ok_or(())?;
                let flags = match args.get(2) {
                    Some(e) => {
                        let t = self.eval(e, lookup)?;
                        t.as_literal().filter(|l| is_simple_string(l)).ok_or(())?.lexical().to_owned()
                    }
                    None => String::new(),
                };
                let mut cache = self.regexes.borrow_mut();
                let key = (pattern.lexical().to_owned(), flags);
                let re = cache.entry(key).or_insert_with_key(|(p, fl)| compile_regex(p, fl));
                let re = re.as_ref().ok_or(())?;
                Ok(boolean(re.is_match(text.lexical())))
            }
            Function::Bound => unreachable!("handled above"),
        }
    }
}

fn compile_regex(pattern: &str, flags: &str) -> Option<Regex> {
    if !flags.chars().all(|c| matches!(c, 'i' | 's' | 'm' | 'x')) {
        return None;
    }
    let full = if flags.is_empty() { pattern.to_owned() } else { format!("(?{flags}){pattern}") };
    Regex::new(&full).ok()
}
