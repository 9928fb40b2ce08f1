//! Index-backed in-memory RDF dataset with set semantics.
//!
//! Terms are interned into a dataset-wide dictionary; every graph keeps the
//! same triples in three orders (subject, predicate and object first) so any
//! pattern with at least one bound position is answered by a range scan.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use crate::model::{Iri, Quad, Term, Triple};

/// Interned term handle; only meaningful for the dataset that issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    const MIN: TermId = TermId(0);
    const MAX: TermId = TermId(u32::MAX);
}

#[derive(Debug, Default, Clone)]
struct TermDict {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
}

impl TermDict {
    fn intern(&mut self, term: &Term) -> TermId {
        if let Some(id) = self.ids.get(term) {
            return *id;
        }
        let id = TermId(u32::try_from(self.terms.len()).expect("term dictionary overflow"));
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }
}

/// Which graphs a lookup reads from.
#[derive(Debug, Clone, Copy)]
pub enum GraphScope<'a> {
    Default,
    Named(&'a Iri),
    /// The set union of the default graph and every named graph.
    Union,
}

impl<'a> From<Option<&'a Iri>> for GraphScope<'a> {
    fn from(graph: Option<&'a Iri>) -> Self {
        match graph {
            Some(iri) => GraphScope::Named(iri),
            None => GraphScope::Default,
        }
    }
}

type Key = [TermId; 3];

#[derive(Debug, Default, Clone)]
struct GraphIndex {
    /// (s, p, o)
    spo: BTreeSet<Key>,
    /// (p, o, s)
    pos: BTreeSet<Key>,
    /// (o, s, p)
    osp: BTreeSet<Key>,
}

fn prefix_range(a: Option<TermId>, b: Option<TermId>) -> RangeInclusive<Key> {
    match (a, b) {
        (Some(a), Some(b)) => [a, b, TermId::MIN]..=[a, b, TermId::MAX],
        (Some(a), None) => [a, TermId::MIN, TermId::MIN]..=[a, TermId::MAX, TermId::MAX],
        _ => [TermId::MIN; 3]..=[TermId::MAX; 3],
    }
}

impl GraphIndex {
    fn insert(&mut self, [s, p, o]: Key) -> bool {
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    fn remove(&mut self, [s, p, o]: Key) -> bool {
        if !self.spo.remove(&[s, p, o]) {
            return false;
        }
        self.pos.remove(&[p, o, s]);
        self.osp.remove(&[o, s, p]);
        true
    }

    fn len(&self) -> usize {
        self.spo.len()
    }

    /// Visits every (s, p, o) agreeing with the bound positions, using the
    /// index whose leading columns are bound.
    fn scan(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>, mut f: impl FnMut(Key)) {
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                if self.spo.contains(&[s, p, o]) {
                    f([s, p, o]);
                }
            }
            (Some(_), _, None) => self.spo.range(prefix_range(s, p)).for_each(|k| f(*k)),
            (Some(_), None, Some(_)) => self.osp.range(prefix_range(o, s)).for_each(|&[o, s, p]| f([s, p, o])),
            (None, Some(_), _) => self.pos.range(prefix_range(p, o)).for_each(|&[p, o, s]| f([s, p, o])),
            (None, None, Some(_)) => self.osp.range(prefix_range(o, None)).for_each(|&[o, s, p]| f([s, p, o])),
            (None, None, None) => self.spo.iter().for_each(|k| f(*k)),
        }
    }

    fn count(&self, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        if s.is_none() && p.is_none() && o.is_none() {
            return self.len();
        }
        let mut n = 0;
        self.scan(s, p, o, |_| n += 1);
        n
    }

    #[cfg(test)]
    fn indexes_agree(&self) -> bool {
        let pos: BTreeSet<Key> = self.pos.iter().map(|&[p, o, s]| [s, p, o]).collect();
        let osp: BTreeSet<Key> = self.osp.iter().map(|&[o, s, p]| [s, p, o]).collect();
        self.spo.len() == self.pos.len() && self.spo.len() == self.osp.len() && pos == self.spo && osp == self.spo
    }
}

/// A default graph plus named graphs, each a set of triples.
#[derive(Debug, Default, Clone)]
pub struct Dataset {
    dict: TermDict,
    default_graph: GraphIndex,
    named: BTreeMap<Iri, GraphIndex>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    fn encode(&mut self, t: &Triple) -> Key {
        let s = self.dict.intern(&Term::Iri(t.subject.clone()));
        let p = self.dict.intern(&Term::Iri(t.predicate.clone()));
        let o = self.dict.intern(&t.object);
        [s, p, o]
    }

    fn decode(&self, [s, p, o]: Key) -> Triple {
        let iri = |id: TermId| match self.term(id) {
            Term::Iri(iri) => iri.clone(),
            Term::Literal(_) => unreachable!("literal stored in subject or predicate position"),
        };
        Triple { subject: iri(s), predicate: iri(p), object: self.term(o).clone() }
    }

    fn graph_mut(&mut self, graph: Option<&Iri>) -> &mut GraphIndex {
        match graph {
            None => &mut self.default_graph,
            Some(name) => self.named.entry(name.clone()).or_default(),
        }
    }

    fn graph(&self, graph: Option<&Iri>) -> Option<&GraphIndex> {
        match graph {
            None => Some(&self.default_graph),
            Some(name) => self.named.get(name),
        }
    }

    /// Adds a triple; returns `true` iff it was not already present.
    /// Inserting into an unknown named graph creates it.
    pub fn insert(&mut self, graph: Option<&Iri>, triple: &Triple) -> bool {
        let key = self.encode(triple);
        self.graph_mut(graph).insert(key)
    }

    /// Inserts many triples, returning how many were new.
    pub fn extend<'t>(&mut self, graph: Option<&Iri>, triples: impl IntoIterator<Item = &'t Triple>) -> usize {
        triples.into_iter().filter(|t| self.insert(graph, t)).count()
    }

    pub fn remove(&mut self, graph: Option<&Iri>, triple: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (
            self.lookup(&Term::Iri(triple.subject.clone())),
            self.lookup(&Term::Iri(triple.predicate.clone())),
            self.lookup(&triple.object),
        ) else {
            return false;
        };
        match graph {
            None => self.default_graph.remove([s, p, o]),
            Some(name) => self.named.get_mut(name).is_some_and(|g| g.remove([s, p, o])),
        }
    }

    pub fn contains(&self, graph: Option<&Iri>, triple: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (
            self.lookup(&Term::Iri(triple.subject.clone())),
            self.lookup(&Term::Iri(triple.predicate.clone())),
            self.lookup(&triple.object),
        ) else {
            return false;
        };
        self.graph(graph).is_some_and(|g| g.spo.contains(&[s, p, o]))
    }

    /// Returns every triple of `graph` agreeing with the bound positions.
    /// An unknown named graph yields nothing.
    pub fn match_triples(
        &self,
        graph: Option<&Iri>,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        self.match_in(GraphScope::from(graph), subject, predicate, object)
    }

    /// Like [`Dataset::match_triples`] over an arbitrary scope.
    pub fn match_in(
        &self,
        scope: GraphScope<'_>,
        subject: Option<&Iri>,
        predicate: Option<&Iri>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        let mut ids = [None; 3];
        for (slot, term) in ids.iter_mut().zip([
            subject.map(|s| Term::Iri(s.clone())),
            predicate.map(|p| Term::Iri(p.clone())),
            object.cloned(),
        ]) {
            if let Some(term) = term {
                match self.lookup(&term) {
                    Some(id) => *slot = Some(id),
                    None => return Vec::new(),
                }
            }
        }
        self.match_ids(scope, ids[0], ids[1], ids[2]).into_iter().map(|k| self.decode(k)).collect()
    }

    pub fn lookup(&self, term: &Term) -> Option<TermId> {
        self.dict.ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.dict.terms[id.0 as usize]
    }

    /// Id-level pattern match used by the query engine.
    pub fn match_ids(&self, scope: GraphScope<'_>, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> Vec<Key> {
        let mut out = Vec::new();
        match scope {
            GraphScope::Default => self.default_graph.scan(s, p, o, |k| out.push(k)),
            GraphScope::Named(name) => {
                if let Some(g) = self.named.get(name) {
                    g.scan(s, p, o, |k| out.push(k));
                }
            }
            GraphScope::Union => {
                let mut graphs = std::iter::once(&self.default_graph).chain(self.named.values()).filter(|g| g.len() > 0);
                let first = graphs.next();
                let rest: Vec<&GraphIndex> = graphs.collect();
                if let Some(first) = first {
                    first.scan(s, p, o, |k| out.push(k));
                }
                if !rest.is_empty() {
                    let mut seen: BTreeSet<Key> = out.iter().copied().collect();
                    for g in rest {
                        g.scan(s, p, o, |k| {
                            if seen.insert(k) {
                                out.push(k);
                            }
                        });
                    }
                }
            }
        }
        out
    }

    /// Number of matches for a pattern; an upper bound for the union scope
    /// (duplicates across graphs are counted once per graph).
    pub fn estimate(&self, scope: GraphScope<'_>, s: Option<TermId>, p: Option<TermId>, o: Option<TermId>) -> usize {
        match scope {
            GraphScope::Default => self.default_graph.count(s, p, o),
            GraphScope::Named(name) => self.named.get(name).map_or(0, |g| g.count(s, p, o)),
            GraphScope::Union => std::iter::once(&self.default_graph)
                .chain(self.named.values())
                .map(|g| g.count(s, p, o))
                .sum(),
        }
    }

    /// Replaces the content of a graph with the given set; returns the
    /// resulting cardinality.
    pub fn replace_graph(&mut self, graph: Option<&Iri>, triples: impl IntoIterator<Item = Triple>) -> usize {
        let mut fresh = GraphIndex::default();
        for t in triples {
            let key = self.encode(&t);
            fresh.insert(key);
        }
        let len = fresh.len();
        *self.graph_mut(graph) = fresh;
        len
    }

    /// Removes a named graph (or clears the default graph). Returns `false`
    /// when the named graph did not exist.
    pub fn drop_graph(&mut self, graph: Option<&Iri>) -> bool {
        match graph {
            None => {
                self.default_graph = GraphIndex::default();
                true
            }
            Some(name) => self.named.remove(name).is_some(),
        }
    }

    pub fn has_graph(&self, graph: Option<&Iri>) -> bool {
        self.graph(graph).is_some()
    }

    pub fn graph_names(&self) -> impl Iterator<Item = &Iri> {
        self.named.keys()
    }

    pub fn graph_len(&self, graph: Option<&Iri>) -> usize {
        self.graph(graph).map_or(0, GraphIndex::len)
    }

    /// Total number of (graph, triple) statements.
    pub fn len(&self) -> usize {
        self.default_graph.len() + self.named.values().map(GraphIndex::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Triples of one graph, in index order.
    pub fn triples(&self, graph: Option<&Iri>) -> Vec<Triple> {
        self.graph(graph).map_or_else(Vec::new, |g| g.spo.iter().map(|k| self.decode(*k)).collect())
    }

    pub fn quads(&self) -> Vec<Quad> {
        let mut out: Vec<Quad> = self.triples(None).into_iter().map(|triple| Quad { triple, graph: None }).collect();
        for name in self.named.keys() {
            out.extend(self.triples(Some(name)).into_iter().map(|triple| Quad { triple, graph: Some(name.clone()) }));
        }
        out
    }

    /// Builds a dataset from quads, e.g. a parsed snapshot.
    pub fn from_quads(quads: impl IntoIterator<Item = Quad>) -> Self {
        let mut ds = Dataset::new();
        for q in quads {
            ds.insert(q.graph.as_ref(), &q.triple);
        }
        ds
    }

    fn graph_set(&self, graph: Option<&Iri>) -> BTreeSet<Triple> {
        self.triples(graph).into_iter().collect()
    }

    #[cfg(test)]
    fn indexes_consistent(&self) -> bool {
        std::iter::once(&self.default_graph).chain(self.named.values()).all(GraphIndex::indexes_agree)
    }
}

/// Per-graph set equality; empty named graphs are not significant.
impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        let names = |d: &Dataset| -> BTreeSet<Iri> {
            d.named.iter().filter(|(_, g)| g.len() > 0).map(|(n, _)| n.clone()).collect()
        };
        let ours = names(self);
        ours == names(other)
            && self.graph_set(None) == other.graph_set(None)
            && ours.iter().all(|n| self.graph_set(Some(n)) == other.graph_set(Some(n)))
    }
}

impl Eq for Dataset {}
