//! Random stores, random subset queries and a naive reference evaluator.
//!
//! The reference works directly on the list of triples: every pattern is
//! unified against every triple, OPTIONAL and GRAPH blocks are evaluated on
//! their own and combined with the definitional compatible-merge join.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use climakg_core::model::format_double;
use climakg_core::vocab::{rdf, xsd};
use climakg_core::{Dataset, Iri, Literal, Term, Triple};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

pub type Binding = BTreeMap<String, Term>;

const EX: &str = "http://example.org/";
const VARS: [&str; 5] = ["a", "b", "c", "d", "e"];
/// Intermediate results above this size make the query get regenerated.
const CAP: usize = 4000;

fn ex(local: &str) -> Iri {
    Iri::new(format!("{EX}{local}")).unwrap()
}

fn subjects() -> Vec<Term> {
    (0..6).map(|i| Term::Iri(ex(&format!("s{i}")))).collect()
}

fn predicates() -> Vec<Iri> {
    let mut p: Vec<Iri> = (0..4).map(|i| ex(&format!("p{i}"))).collect();
    p.push(Iri::from_static(rdf::TYPE));
    p
}

fn objects() -> Vec<Term> {
    let mut o = subjects();
    o.push(Term::Iri(ex("C0")));
    o.push(Term::Iri(ex("C1")));
    o.extend((0..6).map(|i| Term::Literal(Literal::integer(i))));
    o.push(Term::Literal(Literal::typed("2.5", Iri::from_static(xsd::DECIMAL)).unwrap()));
    for s in ["a", "b", "ab"] {
        o.push(Term::Literal(Literal::string(s)));
    }
    o.push(Term::Literal(Literal::lang_string("a", "en").unwrap()));
    o
}

fn graphs() -> [Iri; 2] {
    [ex("g0"), ex("g1")]
}

pub fn random_store(rng: &mut StdRng) -> Dataset {
    let (subs, preds, objs) = (subjects(), predicates(), objects());
    let n = rng.random_range(0..=200);
    let mut ds = Dataset::new();
    for _ in 0..n {
        let s = subs.choose(rng).unwrap().as_iri().unwrap().clone();
        let p = preds.choose(rng).unwrap().clone();
        let o = if p.as_str() == rdf::TYPE {
            Term::Iri(ex(if rng.random_bool(0.5) { "C0" } else { "C1" }))
        } else {
            objs.choose(rng).unwrap().clone()
        };
        let g = match rng.random_range(0..10) {
            0 => Some(graphs()[0].clone()),
            1 => Some(graphs()[1].clone()),
            _ => None,
        };
        ds.insert(g.as_ref(), &Triple::new(s, p, o));
    }
    ds
}

#[derive(Debug, Clone)]
pub enum Pos {
    Var(&'static str),
    Const(Term),
}

#[derive(Debug, Clone)]
pub struct Pat(pub Pos, pub Pos, pub Pos);

#[derive(Debug, Clone, Copy)]
pub enum Op {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

#[derive(Debug, Clone)]
pub enum F {
    Cmp(&'static str, Op, i64),
    VarEq(&'static str, &'static str, bool),
    Bound(&'static str),
    Regex(&'static str, &'static str),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
}

#[derive(Debug, Clone)]
pub enum Elem {
    Bgp(Vec<Pat>),
    Graph(Iri, Vec<Pat>),
    Optional { pats: Vec<Pat>, graph: Option<(Iri, Vec<Pat>)>, filter: Option<F> },
    Filter(F),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Agg {
    CountStar,
    Count(bool),
    Sum,
    Avg,
    Min,
    Max,
}

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub elems: Vec<Elem>,
    pub distinct: bool,
    /// `None` renders `SELECT *`.
    pub project: Option<Vec<&'static str>>,
    /// Optional grouping key, aggregate and aggregate argument.
    pub aggregate: Option<(Option<&'static str>, Agg, &'static str)>,
}

fn random_pos_subject(rng: &mut StdRng) -> Pos {
    if rng.random_bool(0.75) {
        Pos::Var(VARS.choose(rng).unwrap())
    } else {
        Pos::Const(subjects().choose(rng).unwrap().clone())
    }
}

fn random_pat(rng: &mut StdRng) -> Pat {
    let s = random_pos_subject(rng);
    let p = if rng.random_bool(0.15) {
        Pos::Var(VARS.choose(rng).unwrap())
    } else {
        Pos::Const(Term::Iri(predicates().choose(rng).unwrap().clone()))
    };
    let o = if rng.random_bool(0.7) {
        Pos::Var(VARS.choose(rng).unwrap())
    } else if matches!(&p, Pos::Const(Term::Iri(i)) if i.as_str() == rdf::TYPE) {
        Pos::Const(Term::Iri(ex(if rng.random_bool(0.5) { "C0" } else { "C1" })))
    } else {
        Pos::Const(objects().choose(rng).unwrap().clone())
    };
    Pat(s, p, o)
}

fn random_filter(rng: &mut StdRng, vars: &[&'static str], depth: u32) -> F {
    let var = |rng: &mut StdRng| {
        if vars.is_empty() || rng.random_bool(0.1) {
            *VARS.choose(rng).unwrap()
        } else {
            *vars.choose(rng).unwrap()
        }
    };
    match rng.random_range(0..if depth > 1 { 4 } else { 7 }) {
        0 => {
            let op = *[Op::Lt, Op::Le, Op::Gt, Op::Ge, Op::Eq, Op::Ne].choose(rng).unwrap();
            F::Cmp(var(rng), op, rng.random_range(-1..7))
        }
        1 => F::VarEq(var(rng), var(rng), rng.random_bool(0.5)),
        2 => F::Bound(var(rng)),
        3 => F::Regex(var(rng), if rng.random_bool(0.5) { "^a" } else { "b$" }),
        4 => F::Not(Box::new(random_filter(rng, vars, depth + 1))),
        5 => F::And(Box::new(random_filter(rng, vars, depth + 1)), Box::new(random_filter(rng, vars, depth + 1))),
        _ => F::Or(Box::new(random_filter(rng, vars, depth + 1)), Box::new(random_filter(rng, vars, depth + 1))),
    }
}

fn pats_vars(pats: &[Pat], out: &mut Vec<&'static str>) {
    for Pat(s, p, o) in pats {
        for pos in [s, p, o] {
            if let Pos::Var(v) = pos {
                if !out.contains(v) {
                    out.push(v);
                }
            }
        }
    }
}

impl QuerySpec {
    pub fn pattern_vars(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        for e in &self.elems {
            match e {
                Elem::Bgp(p) | Elem::Graph(_, p) => pats_vars(p, &mut out),
                Elem::Optional { pats, graph, .. } => {
                    pats_vars(pats, &mut out);
                    if let Some((_, g)) = graph {
                        pats_vars(g, &mut out);
                    }
                }
                Elem::Filter(_) => {}
            }
        }
        out
    }
}

pub fn random_query(rng: &mut StdRng) -> QuerySpec {
    let mut elems = Vec::new();
    let n_base = rng.random_range(1..=3);
    elems.push(Elem::Bgp((0..n_base).map(|_| random_pat(rng)).collect()));
    let mut budget = 5 - n_base;
    if budget > 0 && rng.random_bool(0.2) {
        elems.push(Elem::Graph(graphs().choose(rng).unwrap().clone(), vec![random_pat(rng)]));
        budget -= 1;
    }
    while budget > 0 && rng.random_bool(0.45) {
        let pats = vec![random_pat(rng)];
        budget -= 1;
        let graph = if budget > 0 && rng.random_bool(0.2) {
            budget -= 1;
            Some((graphs().choose(rng).unwrap().clone(), vec![random_pat(rng)]))
        } else {
            None
        };
        let mut scope = Vec::new();
        pats_vars(&pats, &mut scope);
        let filter = rng.random_bool(0.3).then(|| random_filter(rng, &scope, 0));
        elems.push(Elem::Optional { pats, graph, filter });
    }
    if budget > 0 && rng.random_bool(0.3) {
        elems.push(Elem::Bgp(vec![random_pat(rng)]));
    }
    let mut spec = QuerySpec { elems, distinct: rng.random_bool(0.3), project: None, aggregate: None };
    let vars = spec.pattern_vars();
    for _ in 0..*[0, 0, 1, 1, 2].choose(rng).unwrap() {
        let at = rng.random_range(0..=spec.elems.len());
        let f = random_filter(rng, &vars, 0);
        spec.elems.insert(at, Elem::Filter(f));
    }
    if vars.is_empty() {
        // All-constant patterns: an ASK-like query with a COUNT.
        spec.aggregate = None;
        spec.project = None;
        return spec;
    }
    match rng.random_range(0..10) {
        0..=2 => {}
        3..=6 => {
            let mut p: Vec<&'static str> = vars.iter().copied().filter(|_| rng.random_bool(0.6)).collect();
            if p.is_empty() {
                p.push(vars[0]);
            }
            spec.project = Some(p);
        }
        _ => {
            let key = rng.random_bool(0.8).then(|| *vars.choose(rng).unwrap());
            let agg = *[Agg::CountStar, Agg::Count(false), Agg::Count(true), Agg::Sum, Agg::Avg, Agg::Min, Agg::Max]
                .choose(rng)
                .unwrap();
            spec.aggregate = Some((key, agg, vars.choose(rng).unwrap()));
            spec.distinct = false;
        }
    }
    spec
}

fn render_term(t: &Term) -> String {
    match t {
        Term::Iri(i) if i.as_str().starts_with(EX) => format!("ex:{}", &i.as_str()[EX.len()..]),
        other => other.to_string(),
    }
}

fn render_pos(p: &Pos, rng_a: bool) -> String {
    match p {
        Pos::Var(v) => format!("?{v}"),
        Pos::Const(Term::Iri(i)) if i.as_str() == rdf::TYPE && rng_a => "a".to_owned(),
        Pos::Const(t) => render_term(t),
    }
}

fn render_pats(pats: &[Pat]) -> String {
    pats.iter()
        .enumerate()
        .map(|(i, Pat(s, p, o))| format!("{} {} {} .", render_pos(s, false), render_pos(p, i % 2 == 0), render_pos(o, false)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_filter(f: &F) -> String {
    let op = |o: &Op| match o {
        Op::Lt => "<",
        Op::Le => "<=",
        Op::Gt => ">",
        Op::Ge => ">=",
        Op::Eq => "=",
        Op::Ne => "!=",
    };
    match f {
        F::Cmp(v, o, n) => format!("?{v} {} {n}", op(o)),
        F::VarEq(a, b, neg) => format!("?{a} {} ?{b}", if *neg { "!=" } else { "=" }),
        F::Bound(v) => format!("BOUND(?{v})"),
        F::Regex(v, p) => format!("regex(?{v}, \"{p}\")"),
        F::Not(x) => format!("!({})", render_filter(x)),
        F::And(x, y) => format!("({} && {})", render_filter(x), render_filter(y)),
        F::Or(x, y) => format!("({} || {})", render_filter(x), render_filter(y)),
    }
}

impl QuerySpec {
    pub fn render(&self) -> String {
        let mut body = String::new();
        for e in &self.elems {
            match e {
                Elem::Bgp(p) => body.push_str(&render_pats(p)),
                Elem::Graph(g, p) => body.push_str(&format!("GRAPH {} {{ {} }}", render_term(&Term::Iri(g.clone())), render_pats(p))),
                Elem::Optional { pats, graph, filter } => {
                    body.push_str("OPTIONAL { ");
                    body.push_str(&render_pats(pats));
                    if let Some((g, gp)) = graph {
                        body.push_str(&format!(" GRAPH {} {{ {} }}", render_term(&Term::Iri(g.clone())), render_pats(gp)));
                    }
                    if let Some(f) = filter {
                        body.push_str(&format!(" FILTER({})", render_filter(f)));
                    }
                    body.push_str(" }");
                }
                Elem::Filter(f) => body.push_str(&format!("FILTER({})", render_filter(f))),
            }
            body.push('\n');
        }
        let head = match (&self.aggregate, &self.project) {
            (Some((key, agg, arg)), _) => {
                let a = match agg {
                    Agg::CountStar => "COUNT(*)".to_owned(),
                    Agg::Count(false) => format!("COUNT(?{arg})"),
                    Agg::Count(true) => format!("COUNT(DISTINCT ?{arg})"),
                    Agg::Sum => format!("SUM(?{arg})"),
                    Agg::Avg => format!("AVG(?{arg})"),
                    Agg::Min => format!("MIN(?{arg})"),
                    Agg::Max => format!("MAX(?{arg})"),
                };
                match key {
                    Some(k) => format!("SELECT ?{k} ({a} AS ?agg)"),
                    None => format!("SELECT ({a} AS ?agg)"),
                }
            }
            (None, None) => format!("SELECT {}*", if self.distinct { "DISTINCT " } else { "" }),
            (None, Some(p)) => format!(
                "SELECT {}{}",
                if self.distinct { "DISTINCT " } else { "" },
                p.iter().map(|v| format!("?{v}")).collect::<Vec<_>>().join(" ")
            ),
        };
        let tail = match &self.aggregate {
            Some((Some(k), _, _)) => format!(" GROUP BY ?{k}"),
            _ => String::new(),
        };
        format!("PREFIX ex: <{EX}>\n{head}\nWHERE {{\n{body}}}{tail}")
    }
}

fn numeric(t: &Term) -> Option<f64> {
    let l = t.as_literal()?;
    match l.datatype().as_str() {
        xsd::INTEGER | xsd::DECIMAL => l.lexical().parse().ok(),
        _ => None,
    }
}

fn string_like(t: &Term) -> Option<&str> {
    let l = t.as_literal()?;
    (l.datatype().as_str() == xsd::STRING || l.lang().is_some()).then(|| l.lexical())
}

fn eval_filter(f: &F, b: &Binding) -> Result<bool, ()> {
    match f {
        F::Cmp(v, op, n) => {
            let t = b.get(*v).ok_or(())?;
            match numeric(t) {
                Some(x) => {
                    let n = *n as f64;
                    Ok(match op {
                        Op::Lt => x < n,
                        Op::Le => x <= n,
                        Op::Gt => x > n,
                        Op::Ge => x >= n,
                        Op::Eq => x == n,
                        Op::Ne => x != n,
                    })
                }
                None => match op {
                    Op::Eq => Ok(false),
                    Op::Ne => Ok(true),
                    _ => Err(()),
                },
            }
        }
        F::VarEq(a, c, neg) => {
            let (x, y) = (b.get(*a).ok_or(())?, b.get(*c).ok_or(())?);
            let eq = match (numeric(x), numeric(y)) {
                (Some(p), Some(q)) => p == q,
                _ => x == y,
            };
            Ok(eq != *neg)
        }
        F::Bound(v) => Ok(b.contains_key(*v)),
        F::Regex(v, p) => {
            let s = string_like(b.get(*v).ok_or(())?).ok_or(())?;
            Ok(match *p {
                "^a" => s.starts_with('a'),
                _ => s.ends_with('b'),
            })
        }
        F::Not(x) => eval_filter(x, b).map(|v| !v),
        F::And(x, y) => match (eval_filter(x, b), eval_filter(y, b)) {
            (Ok(false), _) | (_, Ok(false)) => Ok(false),
            (Ok(true), Ok(true)) => Ok(true),
            _ => Err(()),
        },
        F::Or(x, y) => match (eval_filter(x, b), eval_filter(y, b)) {
            (Ok(true), _) | (_, Ok(true)) => Ok(true),
            (Ok(false), Ok(false)) => Ok(false),
            _ => Err(()),
        },
    }
}

fn unify(pat: &Pat, t: &Triple, b: &Binding) -> Option<Binding> {
    let mut out = b.clone();
    let terms = [Term::Iri(t.subject.clone()), Term::Iri(t.predicate.clone()), t.object.clone()];
    for (pos, term) in [&pat.0, &pat.1, &pat.2].into_iter().zip(terms) {
        match pos {
            Pos::Const(c) => {
                if *c != term {
                    return None;
                }
            }
            Pos::Var(v) => match out.get(*v) {
                Some(existing) if *existing != term => return None,
                Some(_) => {}
                None => {
                    out.insert((*v).to_owned(), term);
                }
            },
        }
    }
    Some(out)
}

fn scan(pats: &[Pat], triples: &[Triple], seeds: Vec<Binding>) -> Option<Vec<Binding>> {
    let mut rows = seeds;
    for pat in pats {
        let mut next = Vec::new();
        for row in &rows {
            for t in triples {
                if let Some(b) = unify(pat, t, row) {
                    next.push(b);
                }
            }
            if next.len() > CAP {
                return None;
            }
        }
        rows = next;
    }
    Some(rows)
}

fn compatible_merge(a: &Binding, b: &Binding) -> Option<Binding> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(x) if x != v => return None,
            Some(_) => {}
            None => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

fn join(left: &[Binding], right: &[Binding]) -> Option<Vec<Binding>> {
    let mut out = Vec::new();
    for l in left {
        for r in right {
            if let Some(m) = compatible_merge(l, r) {
                out.push(m);
            }
        }
        if out.len() > CAP {
            return None;
        }
    }
    Some(out)
}

fn total_order(a: &Term, b: &Term) -> Ordering {
    let rank = |t: &Term| match t {
        Term::Iri(_) => 0,
        t if numeric(t).is_some() => 1,
        _ => 2,
    };
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Term::Iri(x), Term::Iri(y)) => x.as_str().cmp(y.as_str()),
        _ if rank(a) == 1 => numeric(a).unwrap().partial_cmp(&numeric(b).unwrap()).unwrap(),
        (Term::Literal(x), Term::Literal(y)) => x
            .lexical()
            .cmp(y.lexical())
            .then_with(|| x.datatype().as_str().cmp(y.datatype().as_str()))
            .then_with(|| x.lang().cmp(&y.lang())),
        _ => unreachable!(),
    })
}

fn aggregate(agg: Agg, arg: &str, rows: &[Binding]) -> Option<Term> {
    if agg == Agg::CountStar {
        return Some(Term::Literal(Literal::integer(rows.len() as i64)));
    }
    let mut values: Vec<Term> = rows.iter().filter_map(|r| r.get(arg).cloned()).collect();
    if agg == Agg::Count(true) {
        let set: BTreeSet<Term> = values.iter().cloned().collect();
        values = set.into_iter().collect();
    }
    match agg {
        Agg::Count(_) => Some(Term::Literal(Literal::integer(values.len() as i64))),
        Agg::Sum | Agg::Avg => {
            let mut total = 0.0;
            let mut any_decimal = false;
            for v in &values {
                total += numeric(v)?;
                any_decimal |= v.as_literal().unwrap().datatype().as_str() == xsd::DECIMAL;
            }
            if agg == Agg::Sum {
                return Some(Term::Literal(if any_decimal {
                    Literal::typed(format_double(total), Iri::from_static(xsd::DECIMAL)).unwrap()
                } else {
                    Literal::integer(total as i64)
                }));
            }
            if values.is_empty() {
                return Some(Term::Literal(Literal::integer(0)));
            }
            Some(Term::Literal(
                Literal::typed(format_double(total / values.len() as f64), Iri::from_static(xsd::DECIMAL)).unwrap(),
            ))
        }
        Agg::Min => values.into_iter().min_by(total_order),
        Agg::Max => values.into_iter().max_by(total_order),
        Agg::CountStar => unreachable!(),
    }
}

impl QuerySpec {
    /// Reference answer as a sorted multiset, or `None` if intermediate
    /// results grew past the cap.
    pub fn oracle(&self, ds: &Dataset) -> Option<Vec<Binding>> {
        let quads = ds.quads();
        let union: Vec<Triple> = quads.iter().map(|q| q.triple.clone()).collect::<BTreeSet<_>>().into_iter().collect();
        let named = |g: &Iri| -> Vec<Triple> {
            quads.iter().filter(|q| q.graph.as_ref() == Some(g)).map(|q| q.triple.clone()).collect()
        };
        let mut rows = vec![Binding::new()];
        let mut filters = Vec::new();
        for e in &self.elems {
            match e {
                Elem::Bgp(p) => rows = scan(p, &union, rows)?,
                Elem::Graph(g, p) => {
                    let right = scan(p, &named(g), vec![Binding::new()])?;
                    rows = join(&rows, &right)?;
                }
                Elem::Optional { pats, graph, filter } => {
                    let mut right = scan(pats, &union, vec![Binding::new()])?;
                    if let Some((g, gp)) = graph {
                        let inner = scan(gp, &named(g), vec![Binding::new()])?;
                        right = join(&right, &inner)?;
                    }
                    let mut out = Vec::new();
                    for l in &rows {
                        let before = out.len();
                        for r in &right {
                            if let Some(m) = compatible_merge(l, r) {
                                if filter.as_ref().is_none_or(|f| eval_filter(f, &m) == Ok(true)) {
                                    out.push(m);
                                }
                            }
                        }
                        if out.len() == before {
                            out.push(l.clone());
                        }
                        if out.len() > CAP {
                            return None;
                        }
                    }
                    rows = out;
                }
                Elem::Filter(f) => filters.push(f.clone()),
            }
        }
        rows.retain(|r| filters.iter().all(|f| eval_filter(f, r) == Ok(true)));

        let mut out: Vec<Binding> = if let Some((key, agg, arg)) = &self.aggregate {
            let mut groups: BTreeMap<Option<Term>, Vec<Binding>> = BTreeMap::new();
            if key.is_none() {
                groups.insert(None, Vec::new());
            }
            for r in rows {
                groups.entry(key.and_then(|k| r.get(k).cloned())).or_default().push(r);
            }
            groups
                .into_iter()
                .map(|(k, members)| {
                    let mut b = Binding::new();
                    if let (Some(name), Some(value)) = (key, k) {
                        b.insert((*name).to_owned(), value);
                    }
                    if let Some(v) = aggregate(*agg, arg, &members) {
                        b.insert("agg".to_owned(), v);
                    }
                    b
                })
                .collect()
        } else {
            let keep: Vec<&str> = match &self.project {
                Some(p) => p.clone(),
                None => self.pattern_vars(),
            };
            rows.into_iter()
                .map(|mut r| {
                    r.retain(|k, _| keep.contains(&k.as_str()));
                    r
                })
                .collect()
        };
        if self.distinct {
            let set: BTreeSet<Binding> = out.into_iter().collect();
            out = set.into_iter().collect();
        }
        out.sort();
        Some(out)
    }
}

/// Checks `queries` random queries against one random store. Returns the
/// number of queries compared, or a description of the first mismatch.
pub fn check_seed(seed: u64, queries: usize) -> Result<usize, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let ds = random_store(&mut rng);
    let mut done = 0;
    let mut attempts = 0;
    while done < queries {
        attempts += 1;
        if attempts > queries * 20 {
            return Err(format!("seed {seed}: could not generate {queries} bounded queries"));
        }
        let spec = random_query(&mut rng);
        let Some(expected) = spec.oracle(&ds) else { continue };
        let text = spec.render();
        let results = climakg_sparql::execute(&ds, &text).map_err(|e| format!("seed {seed}: {e}\n{text}"))?;
        let mut got = results.solutions;
        got.sort();
        if got != expected {
            return Err(format!(
                "seed {seed}: mismatch for\n{text}\nexpected {} rows, got {}\nexpected: {:?}\ngot: {:?}",
                expected.len(),
                got.len(),
                expected.iter().take(5).collect::<Vec<_>>(),
                got.iter().take(5).collect::<Vec<_>>()
            ));
        }
        done += 1;
    }
    Ok(done)
}
