//! Query evaluation against a [`Dataset`].
//!
//! The graph-pattern phase works on rows of interned ids. Basic graph
//! patterns are evaluated as index nested-loop joins seeded with the rows
//! produced so far; grouping, aggregation, ordering and projection then run
//! on decoded terms.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use climakg_core::{Dataset, GraphScope, Literal, Term, TermId};

use crate::ast::*;
use crate::expr::{make_numeric, numeric, total_cmp, ExprContext, NumKind};
use crate::results::{QueryResults, Solution};

type Row = Vec<Option<TermId>>;

/// Evaluates a parsed query. Unnamed triple patterns read the union of all
/// graphs; `GRAPH <g>` restricts to one named graph.
pub fn evaluate(dataset: &Dataset, query: &Query) -> QueryResults {
    let slots = query.pattern.variables();
    let index: HashMap<Var, usize> = slots.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let ev = Evaluator { ds: dataset, slots: &slots, index, ctx: ExprContext::default() };
    let rows = ev.group(&query.pattern, GraphScope::Union, vec![vec![None; slots.len()]]);
    let solutions: Vec<Solution> = rows.into_iter().map(|r| ev.decode(&r)).collect();
    ev.finish(query, solutions)
}

struct Evaluator<'a> {
    ds: &'a Dataset,
    slots: &'a [Var],
    index: HashMap<Var, usize>,
    ctx: ExprContext,
}

enum Slot {
    Fixed(TermId),
    Var(usize),
}

impl<'a> Evaluator<'a> {
    fn decode(&self, row: &Row) -> Solution {
        row.iter()
            .enumerate()
            .filter_map(|(i, id)| id.map(|id| (self.slots[i].name().to_owned(), self.ds.term(id).clone())))
            .collect()
    }

    fn passes(&self, filters: &[&Expr], row: &Row) -> bool {
        let lookup = |v: &Var| self.index.get(v).and_then(|&i| row[i]).map(|id| self.ds.term(id));
        filters.iter().all(|f| self.ctx.filter(f, &lookup))
    }

    fn group(&self, g: &GroupPattern, scope: GraphScope<'_>, seed: Vec<Row>) -> Vec<Row> {
        let rows = self.group_unfiltered(g, scope, seed);
        let filters = filters_of(g);
        if filters.is_empty() {
            return rows;
        }
        rows.into_iter().filter(|r| self.passes(&filters, r)).collect()
    }

    fn group_unfiltered(&self, g: &GroupPattern, scope: GraphScope<'_>, seed: Vec<Row>) -> Vec<Row> {
        let mut rows = seed;
        for el in &g.elements {
            if rows.is_empty() {
                break;
            }
            rows = match el {
                PatternElement::Filter(_) => rows,
                PatternElement::Triples(tps) => self.bgp(tps, scope, rows),
                PatternElement::Optional(inner) => self.optional(inner, scope, rows),
                PatternElement::Group(inner) => self.nested(inner, scope, rows),
                PatternElement::Graph(name, inner) => self.nested(inner, GraphScope::Named(name), rows),
            };
        }
        rows
    }

    fn unit(&self) -> Vec<Row> {
        vec![vec![None; self.slots.len()]]
    }

    fn nested(&self, inner: &GroupPattern, scope: GraphScope<'_>, rows: Vec<Row>) -> Vec<Row> {
        if inner.elements.iter().all(|e| matches!(e, PatternElement::Triples(_))) {
            return self.group(inner, scope, rows);
        }
        let right = self.group(inner, scope, self.unit());
        join(rows, &right)
    }

    fn optional(&self, inner: &GroupPattern, scope: GraphScope<'_>, rows: Vec<Row>) -> Vec<Row> {
        let mut out = Vec::with_capacity(rows.len());
        if inner.elements.iter().all(|e| matches!(e, PatternElement::Triples(_) | PatternElement::Filter(_))) {
            // The group's filters act as the left-join condition, so they
            // see the merged row; seeding each row gives exactly that.
            for row in rows {
                let ext = self.group(inner, scope, vec![row.clone()]);
                if ext.is_empty() {
                    out.push(row);
                } else {
                    out.extend(ext);
                }
            }
            return out;
        }
        let right = self.group_unfiltered(inner, scope, self.unit());
        let filters = filters_of(inner);
        let probe = JoinIndex::new(&rows, &right);
        for row in rows {
            let before = out.len();
            for &r in probe.candidates(&row) {
                if let Some(m) = merge(&row, &right[r]) {
                    if self.passes(&filters, &m) {
                        out.push(m);
                    }
                }
            }
            if out.len() == before {
                out.push(row);
            }
        }
        out
    }

    fn slot(&self, tp: &TermPattern) -> Option<Slot> {
        Some(match tp {
            TermPattern::Var(v) => Slot::Var(self.index[v]),
            TermPattern::Term(t) => Slot::Fixed(self.ds.lookup(t)?),
        })
    }

    fn bgp(&self, tps: &[TriplePattern], scope: GraphScope<'_>, rows: Vec<Row>) -> Vec<Row> {
        let mut compiled = Vec::with_capacity(tps.len());
        for tp in tps {
            match (self.slot(&tp.subject), self.slot(&tp.predicate), self.slot(&tp.object)) {
                (Some(s), Some(p), Some(o)) => compiled.push([s, p, o]),
                // A constant absent from the dataset matches nothing.
                _ => return Vec::new(),
            }
        }
        let order = self.plan(&compiled, scope, &rows);
        let mut rows = rows;
        for i in order {
            let [s, p, o] = &compiled[i];
            let mut next = Vec::new();
            for row in &rows {
                let resolve = |slot: &Slot| match slot {
                    Slot::Fixed(id) => Some(*id),
                    Slot::Var(v) => row[*v],
                };
                let (bs, bp, bo) = (resolve(s), resolve(p), resolve(o));
                for key in self.ds.match_ids(scope, bs, bp, bo) {
                    let mut new = row.clone();
                    let ok = [(s, key[0]), (p, key[1]), (o, key[2])].into_iter().all(|(slot, id)| match slot {
                        Slot::Fixed(_) => true,
                        Slot::Var(v) => match new[*v] {
                            Some(existing) => existing == id,
                            None => {
                                new[*v] = Some(id);
                                true
                            }
                        },
                    });
                    if ok {
                        next.push(new);
                    }
                }
            }
            rows = next;
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    /// Greedy join order: repeatedly pick the pattern with the lowest
    /// estimated cardinality, counting variables bound by the seed rows or
    /// earlier patterns as selective.
    fn plan(&self, compiled: &[[Slot; 3]], scope: GraphScope<'_>, rows: &[Row]) -> Vec<usize> {
        let mut bound: HashSet<usize> =
            (0..self.slots.len()).filter(|&v| !rows.is_empty() && rows.iter().all(|r| r[v].is_some())).collect();
        let mut remaining: Vec<usize> = (0..compiled.len()).collect();
        let mut order = Vec::with_capacity(compiled.len());
        while !remaining.is_empty() {
            let (pos, _) = remaining
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let fixed = |s: &Slot| match s {
                        Slot::Fixed(id) => Some(*id),
                        Slot::Var(_) => None,
                    };
                    let [s, p, o] = &compiled[i];
                    let base = self.ds.estimate(scope, fixed(s), fixed(p), fixed(o));
                    let bound_vars = [s, p, o].iter().filter(|x| matches!(x, Slot::Var(v) if bound.contains(v))).count();
                    (pos, base >> (4 * bound_vars))
                })
                .min_by_key(|&(pos, cost)| (cost, pos))
                .expect("remaining is non-empty");
            let i = remaining.remove(pos);
            for slot in &compiled[i] {
                if let Slot::Var(v) = slot {
                    bound.insert(*v);
                }
            }
            order.push(i);
        }
        order
    }

    fn eval_on(&self, expr: &Expr, sol: &Solution) -> Option<Term> {
        let lookup = |v: &Var| sol.get(v.name());
        self.ctx.eval(expr, &lookup).ok()
    }

    fn finish(&self, query: &Query, solutions: Vec<Solution>) -> QueryResults {
        let mut solutions = if query.is_grouped() { self.aggregate(query, solutions) } else { solutions };
        if !query.order_by.is_empty() {
            let mut keyed: Vec<(Vec<Option<Term>>, Solution)> = solutions
                .into_iter()
                .map(|s| (query.order_by.iter().map(|k| self.eval_on(&k.expr, &s)).collect(), s))
                .collect();
            keyed.sort_by(|(a, _), (b, _)| {
                for ((x, y), key) in a.iter().zip(b).zip(&query.order_by) {
                    let ord = total_cmp(x.as_ref(), y.as_ref());
                    let ord = if key.descending { ord.reverse() } else { ord };
                    if ord != Ordering::Equal {
                        return ord;
                    }
                }
                Ordering::Equal
            });
            solutions = keyed.into_iter().map(|(_, s)| s).collect();
        }
        let vars: Vec<String> = query.output_vars().iter().map(|v| v.name().to_owned()).collect();
        let mut projected: Vec<Solution> = solutions
            .into_iter()
            .map(|mut s| {
                s.retain(|k, _| vars.contains(k));
                s
            })
            .collect();
        if query.distinct {
            let mut seen = HashSet::new();
            projected.retain(|s| seen.insert(s.clone()));
        }
        let offset = query.offset.unwrap_or(0);
        let limit = query.limit.unwrap_or(usize::MAX);
        let solutions = projected.into_iter().skip(offset).take(limit).collect();
        QueryResults { variables: vars, solutions }
    }

    fn aggregate(&self, query: &Query, solutions: Vec<Solution>) -> Vec<Solution> {
        let mut groups: BTreeMap<Vec<Option<Term>>, Vec<Solution>> = BTreeMap::new();
        if query.group_by.is_empty() {
            // Aggregates without GROUP BY form one group, even over no rows.
            groups.insert(Vec::new(), solutions);
        } else {
            for s in solutions {
                let key = query.group_by.iter().map(|k| self.eval_on(&k.expr, &s)).collect();
                groups.entry(key).or_default().push(s);
            }
        }
        let items = match &query.projection {
            Projection::Items(items) => items.as_slice(),
            Projection::All => &[],
        };
        groups
            .into_iter()
            .map(|(key, members)| {
                let mut out = Solution::new();
                for (k, value) in query.group_by.iter().zip(key) {
                    if let (Some(var), Some(value)) = (k.output_var(), value) {
                        out.insert(var.name().to_owned(), value);
                    }
                }
                for item in items {
                    if let ProjectionItem::Aggregate { aggregate, alias } = item {
                        if let Some(v) = self.aggregate_value(aggregate, &members) {
                            out.insert(alias.name().to_owned(), v);
                        }
                    }
                }
                out
            })
            .collect()
    }

    fn aggregate_value(&self, agg: &Aggregate, members: &[Solution]) -> Option<Term> {
        let Some(arg) = &agg.arg else {
            let n = if agg.distinct { members.iter().collect::<HashSet<_>>().len() } else { members.len() };
            return Some(Term::Literal(Literal::integer(n as i64)));
        };
        // Unbound and erroneous values are skipped.
        let mut values: Vec<Term> = members.iter().filter_map(|s| self.eval_on(arg, s)).collect();
        if agg.distinct {
            let mut seen = HashSet::new();
            values.retain(|v| seen.insert(v.clone()));
        }
        match agg.function {
            AggregateFn::Count => Some(Term::Literal(Literal::integer(values.len() as i64))),
            AggregateFn::Sum | AggregateFn::Avg => {
                let mut kind = NumKind::Integer;
                let mut total = 0.0;
                for v in &values {
                    let (k, x) = numeric(v)?;
                    kind = kind.max(k);
                    total += x;
                }
                if agg.function == AggregateFn::Sum {
                    return Some(make_numeric(kind, total));
                }
                if values.is_empty() {
                    return Some(Term::Literal(Literal::integer(0)));
                }
                Some(make_numeric(kind.max(NumKind::Decimal), total / values.len() as f64))
            }
            AggregateFn::Min => values.into_iter().min_by(|a, b| total_cmp(Some(a), Some(b))),
            AggregateFn::Max => values.into_iter().max_by(|a, b| total_cmp(Some(a), Some(b))),
        }
    }
}

fn filters_of(g: &GroupPattern) -> Vec<&Expr> {
    g.elements
        .iter()
        .filter_map(|e| match e {
            PatternElement::Filter(f) => Some(f),
            _ => None,
        })
        .collect()
}

fn merge(a: &Row, b: &Row) -> Option<Row> {
    let mut out = a.clone();
    for (slot, id) in out.iter_mut().zip(b) {
        match (*slot, id) {
            (Some(x), Some(y)) if x != *y => return None,
            (None, Some(y)) => *slot = Some(*y),
            _ => {}
        }
    }
    Some(out)
}

/// Hash index on the right side, keyed by the variables bound in every
/// row of both sides.
struct JoinIndex {
    shared: Vec<usize>,
    buckets: HashMap<Vec<TermId>, Vec<usize>>,
    all: Vec<usize>,
}

impl JoinIndex {
    fn new(left: &[Row], right: &[Row]) -> Self {
        let width = left.first().or(right.first()).map_or(0, Vec::len);
        let shared: Vec<usize> = (0..width)
            .filter(|&v| left.iter().all(|r| r[v].is_some()) && right.iter().all(|r| r[v].is_some()))
            .collect();
        let mut buckets: HashMap<Vec<TermId>, Vec<usize>> = HashMap::new();
        if !shared.is_empty() {
            for (i, r) in right.iter().enumerate() {
                buckets.entry(shared.iter().map(|&v| r[v].expect("shared var")).collect()).or_default().push(i);
            }
        }
        JoinIndex { shared, buckets, all: (0..right.len()).collect() }
    }

    fn candidates(&self, row: &Row) -> &[usize] {
        if self.shared.is_empty() {
            return &self.all;
        }
        let key: Vec<TermId> = self.shared.iter().map(|&v| row[v].expect("shared var")).collect();
        self.buckets.get(&key).map_or(&[], Vec::as_slice)
    }
}

fn join(left: Vec<Row>, right: &[Row]) -> Vec<Row> {
    let probe = JoinIndex::new(&left, right);
    let mut out = Vec::new();
    for row in &left {
        for &r in probe.candidates(row) {
            if let Some(m) = merge(row, &right[r]) {
                out.push(m);
            }
        }
    }
    out
}
