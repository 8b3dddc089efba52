//! Incremental saturation over k-sets.
//!
//! A k-set is a term set `S` standing for the proven fact `Φ(S)`. The
//! session keeps every k-set it ever created (for proof extraction) and
//! indexes the *active* ones by term. After each hypothesis is asserted, no
//! two active k-sets share `k` or more distinctness classes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::proof::{CheckContext, ProofTerm};
use crate::term::{DistinctnessPartition, Interner, TermId, TermNames, TermSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KSetId(pub u32);

impl KSetId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One substitution step `from := to`, justified by equality `eq`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubstStep {
    pub from: TermId,
    pub to: TermId,
    pub eq: usize,
}

pub(crate) fn apply_steps(t: TermId, steps: &[SubstStep]) -> TermId {
    steps.iter().fold(t, |t, s| if t == s.from { s.to } else { t })
}

/// Provenance of a k-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HistoryNode {
    Assume(usize),
    Merged { left: KSetId, right: KSetId },
    /// Terms of `source` rewritten through `steps`, in order.
    Rewritten { source: KSetId, steps: Vec<SubstStep> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSetRecord {
    pub id: KSetId,
    pub terms: TermSet,
    pub history: HistoryNode,
    pub active: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub hypotheses: usize,
    pub merges: usize,
    pub find_merges_calls: usize,
    pub active: usize,
    pub max_active: usize,
    pub max_kset_size: usize,
    /// Largest number of active parents any term has had.
    pub max_parents: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Entailed(ProofTerm),
    NotEntailed,
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed(_))
    }

    pub fn proof(&self) -> Option<&ProofTerm> {
        match self {
            Verdict::Entailed(p) => Some(p),
            Verdict::NotEntailed => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("atom has {got} terms, expected k + 1 = {expected}")]
    Arity { expected: usize, got: usize },
    #[error("unknown term {0}")]
    UnknownTerm(TermId),
    #[error("query is empty")]
    EmptyQuery,
    #[error("k-function argument has {got} distinct terms, expected k = {expected}")]
    KFunArity { expected: usize, got: usize },
    #[error("distinctness classes must be declared before any hypothesis")]
    PartitionFrozen,
}

/// Engine state for one k-equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    k: usize,
    terms: Interner,
    partition: DistinctnessPartition,
    hypotheses: Vec<Vec<TermId>>,
    ksets: Vec<KSetRecord>,
    term2parents: Vec<BTreeSet<KSetId>>,
    counters: Counters,
}

impl Session {
    pub fn new(k: usize) -> Result<Self, EngineError> {
        Self::with_partition(k, DistinctnessPartition::identity())
    }

    pub fn with_partition(k: usize, partition: DistinctnessPartition) -> Result<Self, EngineError> {
        if k == 0 {
            return Err(EngineError::ZeroK);
        }
        Ok(Session {
            k,
            terms: Interner::new(),
            partition,
            hypotheses: Vec::new(),
            ksets: Vec::new(),
            term2parents: Vec::new(),
            counters: Counters::default(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn intern_term(&mut self, name: &str) -> TermId {
        let id = self.terms.intern(name);
        if self.term2parents.len() <= id.index() {
            self.term2parents.resize_with(id.index() + 1, BTreeSet::new);
            self.partition.ensure(id);
        }
        id
    }

    pub fn lookup_term(&self, name: &str) -> Option<TermId> {
        self.terms.lookup(name)
    }

    pub fn term_name(&self, t: TermId) -> Option<&str> {
        self.terms.name(t)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn interner(&self) -> &Interner {
        &self.terms
    }

    /// Marks `terms` as possibly equal. Only allowed before the first
    /// hypothesis.
    pub fn declare_class(&mut self, terms: &[TermId]) -> Result<(), EngineError> {
        if !self.hypotheses.is_empty() {
            return Err(EngineError::PartitionFrozen);
        }
        for &t in terms {
            self.check_known(t)?;
        }
        self.partition.join(terms);
        Ok(())
    }

    pub fn partition(&self) -> &DistinctnessPartition {
        &self.partition
    }

    pub fn hypotheses(&self) -> &[Vec<TermId>] {
        &self.hypotheses
    }

    pub fn ksets(&self) -> &[KSetRecord] {
        &self.ksets
    }

    pub fn kset(&self, id: KSetId) -> &KSetRecord {
        &self.ksets[id.index()]
    }

    pub fn active_ksets(&self) -> impl Iterator<Item = &KSetRecord> {
        self.ksets.iter().filter(|r| r.active)
    }

    /// Active k-sets containing `t`, in ascending id order.
    pub fn parents(&self, t: TermId) -> impl Iterator<Item = KSetId> + '_ {
        self.term2parents
            .get(t.index())
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn stats(&self) -> Counters {
        self.counters
    }

    /// Context for checking proofs produced by this session, with the
    /// given equality log (empty outside congruence mode).
    pub fn check_context<'a>(&'a self, equalities: &'a [(TermId, TermId)]) -> CheckContext<'a> {
        CheckContext {
            k: self.k,
            hypotheses: &self.hypotheses,
            partition: &self.partition,
            equalities,
        }
    }

    fn check_known(&self, t: TermId) -> Result<(), EngineError> {
        if t.index() < self.terms.len() {
            Ok(())
        } else {
            Err(EngineError::UnknownTerm(t))
        }
    }

    fn check_atom(&self, xs: &[TermId]) -> Result<(), EngineError> {
        if xs.len() != self.k + 1 {
            return Err(EngineError::Arity {
                expected: self.k + 1,
                got: xs.len(),
            });
        }
        xs.iter().try_for_each(|&t| self.check_known(t))
    }

    /// Asserts `R(xs)` and saturates. Returns the hypothesis index.
    pub fn assert_hypothesis(&mut self, xs: &[TermId]) -> Result<usize, EngineError> {
        self.check_atom(xs)?;
        let i = self.log_hypothesis(xs);
        let n = self.new_kset(xs.iter().copied().collect(), HistoryNode::Assume(i));
        self.find_merges(n);
        Ok(i)
    }

    /// Asserts `R(xs)` whose terms are first rewritten through `steps`.
    /// The raw hypothesis k-set is recorded but never activated.
    pub(crate) fn assert_rewritten_hypothesis(
        &mut self,
        xs: &[TermId],
        steps: Vec<SubstStep>,
    ) -> Result<usize, EngineError> {
        if steps.is_empty() {
            return self.assert_hypothesis(xs);
        }
        self.check_atom(xs)?;
        let i = self.log_hypothesis(xs);
        let raw: TermSet = xs.iter().copied().collect();
        let rewritten: TermSet = raw.iter().map(|t| apply_steps(t, &steps)).collect();
        let source = self.push_record(raw, HistoryNode::Assume(i), false);
        let n = self.new_kset(rewritten, HistoryNode::Rewritten { source, steps });
        self.find_merges(n);
        Ok(i)
    }

    /// Replaces every active occurrence of `from` by rewriting the k-sets
    /// that contain it. Returns how many k-sets were rewritten.
    pub(crate) fn rewrite_term(&mut self, from: TermId, steps: &[SubstStep]) -> usize {
        let mut count = 0;
        loop {
            let Some(id) = self.parents(from).next() else {
                break;
            };
            self.deactivate(id);
            let terms: TermSet = self.ksets[id.index()]
                .terms
                .iter()
                .map(|t| apply_steps(t, steps))
                .collect();
            let n = self.new_kset(
                terms,
                HistoryNode::Rewritten {
                    source: id,
                    steps: steps.to_vec(),
                },
            );
            self.find_merges(n);
            count += 1;
        }
        count
    }

    fn log_hypothesis(&mut self, xs: &[TermId]) -> usize {
        self.hypotheses.push(xs.to_vec());
        self.counters.hypotheses += 1;
        self.hypotheses.len() - 1
    }

    fn push_record(&mut self, terms: TermSet, history: HistoryNode, active: bool) -> KSetId {
        let id = KSetId(self.ksets.len() as u32);
        debug_assert!(!terms.is_empty());
        debug_assert!(match &history {
            HistoryNode::Merged { left, right } => *left < id && *right < id,
            HistoryNode::Rewritten { source, .. } => *source < id,
            HistoryNode::Assume(_) => true,
        });
        self.counters.max_kset_size = self.counters.max_kset_size.max(terms.len());
        self.ksets.push(KSetRecord {
            id,
            terms,
            history,
            active,
        });
        id
    }

    /// Appends an active k-set and registers it with each of its terms.
    pub fn new_kset(&mut self, terms: TermSet, history: HistoryNode) -> KSetId {
        let id = self.push_record(terms, history, true);
        for t in self.ksets[id.index()].terms.iter() {
            let parents = &mut self.term2parents[t.index()];
            parents.insert(id);
            self.counters.max_parents = self.counters.max_parents.max(parents.len());
        }
        self.counters.active += 1;
        self.counters.max_active = self.counters.max_active.max(self.counters.active);
        id
    }

    fn deactivate(&mut self, id: KSetId) {
        let rec = &mut self.ksets[id.index()];
        assert!(rec.active, "k-set {} is not active", id.0);
        rec.active = false;
        for t in rec.terms.iter() {
            self.term2parents[t.index()].remove(&id);
        }
        self.counters.active -= 1;
    }

    /// Active k-sets sharing at least `k` distinctness classes with `n`,
    /// ascending. Parents are set-unioned within each class of `n`'s terms
    /// and multiset-unioned across classes.
    fn overlapping(&self, n: KSetId) -> Vec<KSetId> {
        let terms = &self.ksets[n.index()].terms;
        let mut by_class: BTreeMap<_, Vec<TermId>> = BTreeMap::new();
        for t in terms {
            by_class.entry(self.partition.class_of(t)).or_default().push(t);
        }
        let mut counts: HashMap<KSetId, usize> = HashMap::new();
        for members in by_class.values() {
            if let [t] = members.as_slice() {
                for p in self.parents(*t) {
                    *counts.entry(p).or_default() += 1;
                }
            } else {
                let parents: BTreeSet<KSetId> =
                    members.iter().flat_map(|&t| self.parents(t)).collect();
                for p in parents {
                    *counts.entry(p).or_default() += 1;
                }
            }
        }
        let mut matches: Vec<KSetId> = counts
            .into_iter()
            .filter(|&(_, c)| c >= self.k)
            .map(|(id, _)| id)
            .collect();
        matches.sort_unstable();
        matches
    }

    /// Merges everything overlapping `n` into one k-set, repeating on the
    /// result until nothing overlaps.
    ///
    /// The fold starts from `n` and merges the other matches into it in
    /// ascending id order, each as `merge(other, accumulated)`.
    pub fn find_merges(&mut self, n: KSetId) {
        let mut n = n;
        loop {
            self.counters.find_merges_calls += 1;
            let matches = self.overlapping(n);
            if matches.len() < 2 {
                return;
            }
            let start = if matches.contains(&n) { n } else { matches[0] };
            let mut last = start;
            for &m in matches.iter().filter(|&&m| m != start) {
                last = self.merge(m, last);
            }
            n = last;
        }
    }

    /// Deactivates `i1` and `i2` and creates their union.
    pub fn merge(&mut self, i1: KSetId, i2: KSetId) -> KSetId {
        assert_ne!(i1, i2, "cannot merge a k-set with itself");
        self.deactivate(i1);
        self.deactivate(i2);
        let terms = self.ksets[i1.index()]
            .terms
            .union(&self.ksets[i2.index()].terms);
        self.counters.merges += 1;
        self.new_kset(terms, HistoryNode::Merged { left: i1, right: i2 })
    }

    /// Decides `Φ(xs)` and produces a proof when it holds.
    pub fn resolve_query(&self, xs: &[TermId]) -> Result<Verdict, EngineError> {
        let query: TermSet = xs.iter().copied().collect();
        if query.is_empty() {
            return Err(EngineError::EmptyQuery);
        }
        if query.len() <= self.k {
            return Ok(Verdict::Entailed(ProofTerm::SubRefl(query)));
        }
        match self.covering_kset(&query) {
            None => Ok(Verdict::NotEntailed),
            Some(n) => {
                let (proof, conclusion) = self.explain_with_conclusion(n, &query);
                Ok(Verdict::Entailed(if conclusion == query {
                    proof
                } else {
                    ProofTerm::project(proof, query)
                }))
            }
        }
    }

    /// Lowest-id active k-set containing every term of `query`.
    pub fn covering_kset(&self, query: &TermSet) -> Option<KSetId> {
        let mut sets = Vec::with_capacity(query.len());
        for t in query {
            match self.term2parents.get(t.index()) {
                Some(s) if !s.is_empty() => sets.push(s),
                _ => return None,
            }
        }
        sets.sort_by_key(|s| s.len());
        let (smallest, rest) = sets.split_first()?;
        smallest
            .iter()
            .copied()
            .find(|id| rest.iter().all(|s| s.contains(id)))
    }

    /// Decides whether the k-functions of `x1` and `x2` coincide, i.e.
    /// whether `Φ(x1 ∪ x2)` holds.
    pub fn kfun_eq(&self, x1: &[TermId], x2: &[TermId]) -> Result<Verdict, EngineError> {
        for x in [x1, x2] {
            let distinct = x.iter().collect::<BTreeSet<_>>().len();
            if distinct != self.k {
                return Err(EngineError::KFunArity {
                    expected: self.k,
                    got: distinct,
                });
            }
        }
        let union: Vec<TermId> = x1.iter().chain(x2).copied().collect();
        self.resolve_query(&union)
    }

    /// Extracts a proof of a superset of `xs` from the history of `n`.
    ///
    /// # Panics
    ///
    /// If `xs` is not a subset of the terms of `n`.
    pub fn explain(&self, n: KSetId, xs: &TermSet) -> ProofTerm {
        self.explain_with_conclusion(n, xs).0
    }

    fn explain_with_conclusion(&self, n: KSetId, xs: &TermSet) -> (ProofTerm, TermSet) {
        assert!(
            xs.is_subset(&self.ksets[n.index()].terms),
            "explain: query is not contained in k-set {}",
            n.0
        );
        let mut n = n;
        loop {
            match &self.ksets[n.index()].history {
                HistoryNode::Assume(i) => {
                    let concl = self.ksets[n.index()].terms.clone();
                    return (ProofTerm::Assume(*i), concl);
                }
                HistoryNode::Merged { left, right } => {
                    let s1 = &self.ksets[left.index()].terms;
                    let s2 = &self.ksets[right.index()].terms;
                    if xs.is_subset(s1) {
                        n = *left;
                    } else if xs.is_subset(s2) {
                        n = *right;
                    } else {
                        let anchor = s1.intersection(s2);
                        let q1 = anchor.union(&s1.intersection(xs));
                        let q2 = anchor.union(&s2.intersection(xs));
                        let (p1, _) = self.explain_with_conclusion(*left, &q1);
                        let (p2, _) = self.explain_with_conclusion(*right, &q2);
                        return (ProofTerm::project(ProofTerm::trans(p1, p2), xs.clone()), xs.clone());
                    }
                }
                HistoryNode::Rewritten { source, steps } => {
                    return self.explain_rewritten(*source, steps, xs);
                }
            }
        }
    }

    fn explain_rewritten(
        &self,
        source: KSetId,
        steps: &[SubstStep],
        xs: &TermSet,
    ) -> (ProofTerm, TermSet) {
        let src = &self.ksets[source.index()].terms;
        let preimage: TermSet = xs
            .iter()
            .map(|x| {
                if src.contains(x) && apply_steps(x, steps) == x {
                    x
                } else {
                    src.iter()
                        .find(|&y| apply_steps(y, steps) == x)
                        .expect("rewritten k-set term without a preimage")
                }
            })
            .collect();
        let (mut proof, mut concl) = self.explain_with_conclusion(source, &preimage);
        for s in steps {
            if concl.contains(s.from) {
                proof = ProofTerm::subst(proof, s.from, s.to, s.eq);
                concl = concl.replace(s.from, s.to);
            }
        }
        (proof, concl)
    }

    /// The unoptimized proof of k-set `n`: its full history, expanded.
    pub fn naive_proof(&self, n: KSetId) -> ProofTerm {
        match &self.ksets[n.index()].history {
            HistoryNode::Assume(i) => ProofTerm::Assume(*i),
            HistoryNode::Merged { left, right } => {
                ProofTerm::trans(self.naive_proof(*left), self.naive_proof(*right))
            }
            HistoryNode::Rewritten { source, steps } => {
                let mut proof = self.naive_proof(*source);
                let mut concl = self.ksets[source.index()].terms.clone();
                for s in steps {
                    if concl.contains(s.from) {
                        proof = ProofTerm::subst(proof, s.from, s.to, s.eq);
                        concl = concl.replace(s.from, s.to);
                    }
                }
                proof
            }
        }
    }

    /// Verifies the structural invariants of the session. Intended for
    /// tests and fuzzing; returns a description of the first violation.
    pub fn validate(&self) -> Result<(), String> {
        for (t, parents) in self.term2parents.iter().enumerate() {
            let t = TermId(t as u32);
            let expected: BTreeSet<KSetId> = self
                .ksets
                .iter()
                .filter(|r| r.active && r.terms.contains(t))
                .map(|r| r.id)
                .collect();
            if *parents != expected {
                return Err(format!("parents of {t} are {parents:?}, expected {expected:?}"));
            }
        }
        let active: Vec<&KSetRecord> = self.active_ksets().collect();
        for (i, s) in active.iter().enumerate() {
            for t in &active[i + 1..] {
                let shared = self
                    .partition
                    .count_classes(s.terms.intersection(&t.terms).iter());
                if shared >= self.k {
                    return Err(format!(
                        "active k-sets {} and {} share {shared} classes",
                        s.id.0, t.id.0
                    ));
                }
            }
        }
        if active.len() != self.counters.active {
            return Err("active counter out of sync".into());
        }
        Ok(())
    }

    /// Checks the size bounds that hold for plain (non-congruence)
    /// sessions: active ≤ n, merges ≤ n − 1, find_merges calls ≤ 2n and
    /// every k-set has at most k + n terms.
    pub fn check_bounds(&self) -> Result<(), String> {
        let c = self.counters;
        let n = c.hypotheses;
        if c.max_active > n {
            return Err(format!("max active {} > n = {n}", c.max_active));
        }
        if c.merges > n.saturating_sub(1) {
            return Err(format!("merges {} > n - 1 = {}", c.merges, n.saturating_sub(1)));
        }
        if c.find_merges_calls > 2 * n {
            return Err(format!("find_merges calls {} > 2n = {}", c.find_merges_calls, 2 * n));
        }
        if c.max_kset_size > self.k + n {
            return Err(format!("k-set size {} > k + n = {}", c.max_kset_size, self.k + n));
        }
        Ok(())
    }
}

impl TermNames for Session {
    fn term_name(&self, t: TermId) -> Option<&str> {
        self.terms.name(t)
    }
}
