//! Declared class hierarchy with inheritance reasoning and neighborhood
//! queries.
//!
//! Classes are interned to dense ids in lexicographic IRI order, so every
//! adjacency list is sorted by IRI and traversals under a fixed seed do not
//! depend on how the edges were inserted.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::Rng;
use thiserror::Error;

use crate::model::{ClassExpr, Iri, Ontology, RestrictionExpr};
use crate::rng::sample_sorted;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("unknown class {0}")]
    UnknownClass(Iri),
}

/// Direction of a hierarchy walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Toward subclasses.
    Down,
    /// Toward superclasses.
    Up,
}

#[derive(Debug, Clone)]
pub struct ClassHierarchy {
    iris: Vec<Iri>,
    index: HashMap<Iri, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    restrictions: Vec<RestrictionExpr>,
    restriction_ids: HashMap<RestrictionExpr, usize>,
    /// class id -> declared restriction subsumers (restriction ids)
    restriction_index: Vec<Vec<usize>>,
    by_property: BTreeMap<Iri, BTreeSet<usize>>,
    by_filler: BTreeMap<Iri, BTreeSet<usize>>,
    cycles: Vec<Vec<Iri>>,
}

impl ClassHierarchy {
    pub fn new(o: &Ontology) -> Self {
        Self::build(
            o.classes.iter().cloned().collect(),
            o.named_subsumptions.iter().map(|(c, p)| (c, p)),
            o.restriction_axioms.iter().map(|(c, r)| (c, r)),
            o.restriction_inventory().into_iter().collect(),
        )
    }

    fn build<'a>(
        mut iris: Vec<Iri>,
        edges: impl Iterator<Item = (&'a Iri, &'a Iri)>,
        axioms: impl Iterator<Item = (&'a Iri, &'a RestrictionExpr)>,
        mut restrictions: Vec<RestrictionExpr>,
    ) -> Self {
        let edges: Vec<(&Iri, &Iri)> = edges.collect();
        let axioms: Vec<(&Iri, &RestrictionExpr)> = axioms.collect();
        iris.extend(edges.iter().flat_map(|(c, p)| [(*c).clone(), (*p).clone()]));
        iris.extend(axioms.iter().map(|(c, _)| (*c).clone()));
        iris.sort();
        iris.dedup();
        let index: HashMap<Iri, usize> = iris.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();

        let n = iris.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (c, p) in &edges {
            let (c, p) = (index[*c], index[*p]);
            if c != p {
                parents[c].push(p);
                children[p].push(c);
            }
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
            list.dedup();
        }

        restrictions.extend(axioms.iter().map(|(_, r)| (*r).clone()));
        restrictions.sort();
        restrictions.dedup();
        let restriction_ids: HashMap<RestrictionExpr, usize> =
            restrictions.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let mut restriction_index = vec![Vec::new(); n];
        for (c, r) in &axioms {
            restriction_index[index[*c]].push(restriction_ids[*r]);
        }
        for list in &mut restriction_index {
            list.sort_unstable();
            list.dedup();
        }
        let mut by_property: BTreeMap<Iri, BTreeSet<usize>> = BTreeMap::new();
        let mut by_filler: BTreeMap<Iri, BTreeSet<usize>> = BTreeMap::new();
        for (id, r) in restrictions.iter().enumerate() {
            by_property.entry(r.property.clone()).or_default().insert(id);
            for f in r.filler.classes() {
                by_filler.entry(f.clone()).or_default().insert(id);
            }
        }

        let mut h = Self {
            iris,
            index,
            parents,
            children,
            restrictions,
            restriction_ids,
            restriction_index,
            by_property,
            by_filler,
            cycles: Vec::new(),
        };
        h.cycles = h.find_cycles();
        for cycle in &h.cycles {
            log::warn!("cycle in declared subsumptions: {cycle:?}");
        }
        h
    }

    fn find_cycles(&self) -> Vec<Vec<Iri>> {
        let mut graph = DiGraph::<usize, ()>::with_capacity(self.iris.len(), 0);
        let nodes: Vec<_> = (0..self.iris.len()).map(|i| graph.add_node(i)).collect();
        for (c, ps) in self.parents.iter().enumerate() {
            for &p in ps {
                graph.add_edge(nodes[c], nodes[p], ());
            }
        }
        let mut cycles: Vec<Vec<Iri>> = tarjan_scc(&graph)
            .into_iter()
            .filter(|scc| scc.len() > 1)
            .map(|scc| {
                let mut ids: Vec<usize> = scc.into_iter().map(|n| graph[n]).collect();
                ids.sort_unstable();
                ids.into_iter().map(|i| self.iris[i].clone()).collect()
            })
            .collect();
        cycles.sort();
        cycles
    }

    /// Copy of this hierarchy with the given declared edges and restriction
    /// axioms removed. The class set and restriction inventory are kept.
    pub fn without(&self, named: &BTreeSet<(Iri, Iri)>, existential: &BTreeSet<(Iri, RestrictionExpr)>) -> Self {
        let edges: Vec<(Iri, Iri)> = self.declared_edges().filter(|e| !named.contains(e)).collect();
        let axioms: Vec<(Iri, RestrictionExpr)> =
            self.declared_restriction_axioms().filter(|a| !existential.contains(a)).collect();
        Self::build(
            self.iris.clone(),
            edges.iter().map(|(c, p)| (c, p)),
            axioms.iter().map(|(c, r)| (c, r)),
            self.restrictions.clone(),
        )
    }

    pub fn declared_edges(&self) -> impl Iterator<Item = (Iri, Iri)> + '_ {
        self.parents
            .iter()
            .enumerate()
            .flat_map(move |(c, ps)| ps.iter().map(move |&p| (self.iris[c].clone(), self.iris[p].clone())))
    }

    pub fn declared_restriction_axioms(&self) -> impl Iterator<Item = (Iri, RestrictionExpr)> + '_ {
        self.restriction_index
            .iter()
            .enumerate()
            .flat_map(move |(c, rs)| rs.iter().map(move |&r| (self.iris[c].clone(), self.restrictions[r].clone())))
    }

    pub fn classes(&self) -> &[Iri] {
        &self.iris
    }

    pub fn contains(&self, c: &Iri) -> bool {
        self.index.contains_key(c)
    }

    pub fn restriction_inventory(&self) -> &[RestrictionExpr] {
        &self.restrictions
    }

    /// Cycles among declared subsumptions, one sorted member list each.
    pub fn cycles(&self) -> &[Vec<Iri>] {
        &self.cycles
    }

    pub(crate) fn id(&self, c: &Iri) -> Result<usize, HierarchyError> {
        self.index.get(c).copied().ok_or_else(|| HierarchyError::UnknownClass(c.clone()))
    }

    pub(crate) fn iri(&self, id: usize) -> &Iri {
        &self.iris[id]
    }

    pub(crate) fn restriction_id(&self, r: &RestrictionExpr) -> Option<usize> {
        self.restriction_ids.get(r).copied()
    }

    pub(crate) fn restriction(&self, id: usize) -> &RestrictionExpr {
        &self.restrictions[id]
    }

    pub(crate) fn step_ids(&self, id: usize, direction: Direction) -> &[usize] {
        match direction {
            Direction::Up => &self.parents[id],
            Direction::Down => &self.children[id],
        }
    }

    pub fn parents(&self, c: &Iri) -> Result<Vec<&Iri>, HierarchyError> {
        Ok(self.parents[self.id(c)?].iter().map(|&p| &self.iris[p]).collect())
    }

    pub fn children(&self, c: &Iri) -> Result<Vec<&Iri>, HierarchyError> {
        Ok(self.children[self.id(c)?].iter().map(|&p| &self.iris[p]).collect())
    }

    /// Declared restriction subsumers of `c`.
    pub fn restrictions_of(&self, c: &Iri) -> Result<Vec<&RestrictionExpr>, HierarchyError> {
        Ok(self.restriction_index[self.id(c)?].iter().map(|&r| &self.restrictions[r]).collect())
    }

    /// Ids reachable by one or more steps; contains `start` only when a
    /// cycle runs through it.
    pub(crate) fn closure_ids(&self, start: usize, direction: Direction) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = self.step_ids(start, direction).iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            if seen.insert(x) {
                queue.extend(self.step_ids(x, direction).iter().copied().filter(|y| !seen.contains(y)));
            }
        }
        seen
    }

    pub fn entailed_ancestors(&self, c: &Iri) -> Result<BTreeSet<Iri>, HierarchyError> {
        let id = self.id(c)?;
        Ok(self.closure_ids(id, Direction::Up).into_iter().map(|i| self.iris[i].clone()).collect())
    }

    pub fn entailed_descendants(&self, c: &Iri) -> Result<BTreeSet<Iri>, HierarchyError> {
        let id = self.id(c)?;
        Ok(self.closure_ids(id, Direction::Down).into_iter().map(|i| self.iris[i].clone()).collect())
    }

    /// Every declared or inherited subsumer of `child`: named ancestors
    /// plus the restrictions declared on the child or any ancestor.
    pub(crate) fn subsumer_ids(&self, child: usize) -> Subsumers {
        let named = self.closure_ids(child, Direction::Up);
        let mut restrictions: BTreeSet<usize> = self.restriction_index[child].iter().copied().collect();
        for &a in &named {
            restrictions.extend(self.restriction_index[a].iter().copied());
        }
        Subsumers { named, restrictions }
    }

    /// Whether `parent` is a declared or inheritance-entailed subsumer of
    /// `child`. Unknown classes subsume nothing.
    pub fn is_entailed_subsumption(&self, child: &Iri, parent: &ClassExpr) -> bool {
        let Ok(child) = self.id(child) else { return false };
        let subsumers = self.subsumer_ids(child);
        match parent {
            ClassExpr::Named(p) => self.id(p).is_ok_and(|p| subsumers.named.contains(&p)),
            ClassExpr::Restriction(r) => self.restriction_id(r).is_some_and(|r| subsumers.restrictions.contains(&r)),
        }
    }

    /// Restrictions sharing the property or any filler class with `r`.
    pub(crate) fn related_restriction_ids(&self, r: &RestrictionExpr) -> BTreeSet<usize> {
        let mut out = self.by_property.get(&r.property).cloned().unwrap_or_default();
        for f in r.filler.classes() {
            if let Some(ids) = self.by_filler.get(f) {
                out.extend(ids.iter().copied());
            }
        }
        out
    }

    fn one_hop(&self, id: usize) -> impl Iterator<Item = usize> + '_ {
        self.parents[id].iter().chain(self.children[id].iter()).copied()
    }

    pub(crate) fn neighborhood_ids<R: Rng + ?Sized>(
        &self,
        start: usize,
        max_seeds: usize,
        hops: usize,
        rng: &mut R,
    ) -> BTreeSet<usize> {
        let mut layer: BTreeSet<usize> = self.one_hop(start).collect();
        let mut all = layer.clone();
        for _ in 2..=hops {
            if layer.is_empty() {
                break;
            }
            let candidates: Vec<usize> = layer.iter().copied().collect();
            let seeds = sample_sorted(rng, &candidates, max_seeds);
            layer = seeds.into_iter().flat_map(|s| self.one_hop(s)).collect();
            all.extend(layer.iter().copied());
        }
        all.remove(&start);
        all
    }

    /// Classes within `hops` hops of `c`, expanding from at most
    /// `max_seeds` randomly chosen classes of the previous hop.
    pub fn neighborhood<R: Rng + ?Sized>(
        &self,
        c: &Iri,
        max_seeds: usize,
        hops: usize,
        rng: &mut R,
    ) -> Result<BTreeSet<Iri>, HierarchyError> {
        let id = self.id(c)?;
        Ok(self
            .neighborhood_ids(id, max_seeds.max(1), hops.max(1), rng)
            .into_iter()
            .map(|i| self.iris[i].clone())
            .collect())
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Subsumers {
    pub named: BTreeSet<usize>,
    pub restrictions: BTreeSet<usize>,
}
