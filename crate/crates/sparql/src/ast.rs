//! Query syntax tree.

use std::collections::BTreeMap;
use std::fmt;

use climakg_core::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub prefixes: BTreeMap<String, String>,
    pub distinct: bool,
    pub projection: Projection,
    pub pattern: GroupPattern,
    pub group_by: Vec<GroupKey>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
    pub offset: Option<usize>,
}

impl Query {
    pub fn is_grouped(&self) -> bool {
        !self.group_by.is_empty()
            || matches!(&self.projection, Projection::Items(items) if items.iter().any(|i| matches!(i, ProjectionItem::Aggregate { .. })))
    }

    /// Output variables in projection order; for `SELECT *`, pattern
    /// variables in order of first appearance.
    pub fn output_vars(&self) -> Vec<Var> {
        match &self.projection {
            Projection::All => self.pattern.variables(),
            Projection::Items(items) => items.iter().map(|i| i.var().clone()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    All,
    Items(Vec<ProjectionItem>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProjectionItem {
    Var(Var),
    Aggregate { aggregate: Aggregate, alias: Var },
}

impl ProjectionItem {
    pub fn var(&self) -> &Var {
        match self {
            ProjectionItem::Var(v) => v,
            ProjectionItem::Aggregate { alias, .. } => alias,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateFn {
    Count,
    Sum,
    Avg,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub function: AggregateFn,
    pub distinct: bool,
    /// `None` stands for `*` (COUNT only).
    pub arg: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupKey {
    pub expr: Expr,
    /// Output variable; `GROUP BY ?x` binds `?x` itself.
    pub alias: Option<Var>,
}

impl GroupKey {
    pub fn output_var(&self) -> Option<&Var> {
        match (&self.alias, &self.expr) {
            (Some(v), _) => Some(v),
            (None, Expr::Var(v)) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderKey {
    pub expr: Expr,
    pub descending: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupPattern {
    pub elements: Vec<PatternElement>,
}

impl GroupPattern {
    /// Variables mentioned anywhere in the pattern, in order of first
    /// appearance.
    pub fn variables(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        fn push(out: &mut Vec<Var>, v: &Var) {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        for el in &self.elements {
            match el {
                PatternElement::Triples(tps) => {
                    for tp in tps {
                        for pos in [&tp.subject, &tp.predicate, &tp.object] {
                            if let TermPattern::Var(v) = pos {
                                push(out, v);
                            }
                        }
                    }
                }
                PatternElement::Filter(_) => {}
                PatternElement::Optional(g) | PatternElement::Graph(_, g) | PatternElement::Group(g) => g.collect_vars(out),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PatternElement {
    Triples(Vec<TriplePattern>),
    Filter(Expr),
    Optional(GroupPattern),
    Graph(Iri, GroupPattern),
    Group(GroupPattern),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TermPattern {
    Var(Var),
    Term(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: TermPattern,
    pub predicate: TermPattern,
    pub object: TermPattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Regex,
    Str,
    Lang,
    Datatype,
    Bound,
    Year,
    Month,
    Day,
}

impl Function {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "REGEX" => Function::Regex,
            "STR" => Function::Str,
            "LANG" => Function::Lang,
            "DATATYPE" => Function::Datatype,
            "BOUND" => Function::Bound,
            "YEAR" => Function::Year,
            "MONTH" => Function::Month,
            "DAY" => Function::Day,
            _ => return None,
        })
    }

    pub fn arity(self) -> std::ops::RangeInclusive<usize> {
        match self {
            Function::Regex => 2..=3,
            _ => 1..=1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var(Var),
    Constant(Term),
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Call(Function, Vec<Expr>),
}

impl Expr {
    pub fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Expr::Var(v) => f(v),
            Expr::Constant(_) => {}
            Expr::Or(a, b) | Expr::And(a, b) | Expr::Compare(_, a, b) | Expr::Arith(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
            Expr::Not(a) | Expr::Neg(a) => a.visit_vars(f),
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }
}
