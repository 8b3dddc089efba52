//! Congruence-closure layer over one or more k-equivalence sessions.
//!
//! Point terms are merged by asserted equalities. Active k-sets only ever
//! mention class representatives: when two classes merge, every k-set that
//! mentions the old representative of the smaller class is rewritten to the
//! new representative and re-saturated. Each k-set also carries a canonical
//! k-function application (`φ_R` of its first `k` terms); whenever two
//! k-sets merge, their applications are merged in a separate union-find.

use std::collections::HashMap;

use thiserror::Error;

use crate::engine::{EngineError, HistoryNode, KSetId, Session, SubstStep, Verdict};
use crate::proof::CheckContext;
use crate::term::{DistinctnessPartition, Interner, TermId, TermNames, TermSet};

/// Union-find over dense indices with union by size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self) -> usize {
        let i = self.parent.len();
        self.parent.push(i);
        self.size.push(1);
        i
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.size[self.find(i)]
    }

    /// Joins the classes of `a` and `b`. Returns `(absorbed, root)` where
    /// `absorbed` is the old root of the smaller class, or `None` if they
    /// were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (small, large) = if self.size[ra] < self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = large;
        self.size[large] += self.size[small];
        Some((small, large))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationId(pub usize);

/// A canonical k-function application `φ_R(args)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KFunApp {
    pub relation: RelationId,
    pub args: TermSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("equality between {0} and {1} contradicts the distinctness partition")]
    Inconsistent(TermId, TermId),
    #[error("relation `{0}` declared twice")]
    DuplicateRelation(String),
    #[error("unknown term {0}")]
    UnknownTerm(TermId),
    #[error("distinctness classes must be declared before any atom or equality")]
    PartitionFrozen,
}

#[derive(Debug, Clone)]
struct Relation {
    name: String,
    session: Session,
    app_of: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
struct AppTable {
    apps: Vec<KFunApp>,
    index: HashMap<KFunApp, usize>,
    classes: UnionFind,
}

impl AppTable {
    fn intern(&mut self, app: KFunApp) -> usize {
        if let Some(&i) = self.index.get(&app) {
            return i;
        }
        let i = self.classes.add();
        self.apps.push(app.clone());
        self.index.insert(app, i);
        i
    }
}

/// Shared term universe, equality log and the sessions it feeds.
#[derive(Debug, Clone, Default)]
pub struct Congruence {
    terms: Interner,
    partition: DistinctnessPartition,
    classes: UnionFind,
    /// Proof forest: each term points towards its tree root along an
    /// asserted equality.
    edges: Vec<Option<(TermId, usize)>>,
    equalities: Vec<(TermId, TermId)>,
    relations: Vec<Relation>,
    apps: AppTable,
    frozen: bool,
}

impl Congruence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_relation(&mut self, name: &str, k: usize) -> Result<RelationId, CongruenceError> {
        if self.relation(name).is_some() {
            return Err(CongruenceError::DuplicateRelation(name.to_owned()));
        }
        let mut session = Session::with_partition(k, self.partition.clone())?;
        for n in self.terms.names() {
            session.intern_term(n);
        }
        self.relations.push(Relation {
            name: name.to_owned(),
            session,
            app_of: Vec::new(),
        });
        Ok(RelationId(self.relations.len() - 1))
    }

    pub fn relation(&self, name: &str) -> Option<RelationId> {
        self.relations.iter().position(|r| r.name == name).map(RelationId)
    }

    pub fn relation_name(&self, rel: RelationId) -> &str {
        &self.relations[rel.0].name
    }

    pub fn session(&self, rel: RelationId) -> &Session {
        &self.relations[rel.0].session
    }

    pub fn intern(&mut self, name: &str) -> TermId {
        let before = self.terms.len();
        let id = self.terms.intern(name);
        if self.terms.len() > before {
            self.classes.add();
            self.edges.push(None);
            self.partition.ensure(id);
            for r in &mut self.relations {
                let sid = r.session.intern_term(name);
                debug_assert_eq!(sid, id);
            }
        }
        id
    }

    pub fn lookup(&self, name: &str) -> Option<TermId> {
        self.terms.lookup(name)
    }

    pub fn interner(&self) -> &Interner {
        &self.terms
    }

    pub fn equalities(&self) -> &[(TermId, TermId)] {
        &self.equalities
    }

    pub fn partition(&self) -> &DistinctnessPartition {
        &self.partition
    }

    pub fn check_context(&self, rel: RelationId) -> CheckContext<'_> {
        self.session(rel).check_context(&self.equalities)
    }

    /// Marks `terms` as possibly equal in every session.
    pub fn declare_class(&mut self, terms: &[TermId]) -> Result<(), CongruenceError> {
        if self.frozen {
            return Err(CongruenceError::PartitionFrozen);
        }
        for &t in terms {
            self.check_known(t)?;
        }
        self.partition.join(terms);
        for r in &mut self.relations {
            r.session.declare_class(terms)?;
        }
        Ok(())
    }

    fn check_known(&self, t: TermId) -> Result<(), CongruenceError> {
        if t.index() < self.terms.len() {
            Ok(())
        } else {
            Err(CongruenceError::UnknownTerm(t))
        }
    }

    pub fn find(&self, t: TermId) -> TermId {
        TermId(self.classes.find(t.index()) as u32)
    }

    pub fn query_term_eq(&self, a: TermId, b: TermId) -> bool {
        a == b || (a.index() < self.terms.len() && b.index() < self.terms.len() && self.find(a) == self.find(b))
    }

    fn canonical(&self, t: TermId) -> TermId {
        if t.index() < self.terms.len() {
            self.find(t)
        } else {
            t
        }
    }

    /// Equality steps leading from `x` to `y` through the proof forest.
    fn path(&self, x: TermId, y: TermId) -> Vec<SubstStep> {
        let up = |mut t: TermId| {
            let mut chain = vec![(t, None)];
            while let Some((p, e)) = self.edges[t.index()] {
                chain.last_mut().unwrap().1 = Some(e);
                chain.push((p, None));
                t = p;
            }
            chain
        };
        let xs = up(x);
        let ys = up(y);
        let meet = xs
            .iter()
            .position(|(t, _)| ys.iter().any(|(u, _)| u == t))
            .expect("terms are not in one proof tree");
        let lca = xs[meet].0;
        let ymeet = ys.iter().position(|(u, _)| *u == lca).unwrap();
        let mut steps = Vec::new();
        for w in xs[..=meet].windows(2) {
            steps.push(SubstStep {
                from: w[0].0,
                to: w[1].0,
                eq: w[0].1.unwrap(),
            });
        }
        for w in ys[..=ymeet].windows(2).rev() {
            steps.push(SubstStep {
                from: w[1].0,
                to: w[0].0,
                eq: w[0].1.unwrap(),
            });
        }
        steps
    }

    /// Makes `t` the root of its proof tree.
    fn reroot(&mut self, t: TermId) {
        let mut prev: Option<(TermId, usize)> = None;
        let mut cur = t;
        loop {
            let next = self.edges[cur.index()];
            self.edges[cur.index()] = prev;
            match next {
                Some((p, e)) => {
                    prev = Some((cur, e));
                    cur = p;
                }
                None => break,
            }
        }
    }

    /// Asserts `R(xs)` after rewriting its terms to representatives.
    pub fn assert_atom(&mut self, rel: RelationId, xs: &[TermId]) -> Result<usize, CongruenceError> {
        for &t in xs {
            self.check_known(t)?;
        }
        let mut steps = Vec::new();
        for &x in xs {
            let r = self.find(x);
            if r != x {
                steps.extend(self.path(x, r));
            }
        }
        self.frozen = true;
        let i = self.relations[rel.0]
            .session
            .assert_rewritten_hypothesis(xs, steps)?;
        self.sync_apps(rel);
        Ok(i)
    }

    /// Asserts `a = b`. The equality is logged even when already implied.
    pub fn assert_eq(&mut self, a: TermId, b: TermId) -> Result<usize, CongruenceError> {
        self.check_known(a)?;
        self.check_known(b)?;
        if !self.partition.same_class(a, b) {
            return Err(CongruenceError::Inconsistent(a, b));
        }
        self.frozen = true;
        self.equalities.push((a, b));
        let e = self.equalities.len() - 1;
        let ra = self.find(a);
        let Some((absorbed, root)) = self.classes.union(a.index(), b.index()) else {
            return Ok(e);
        };
        let (absorbed, root) = (TermId(absorbed as u32), TermId(root as u32));
        // hang the absorbed side's proof tree below the other endpoint
        let (inner, outer) = if ra == absorbed { (a, b) } else { (b, a) };
        self.reroot(inner);
        self.edges[inner.index()] = Some((outer, e));
        let steps = self.path(absorbed, root);
        for r in 0..self.relations.len() {
            self.relations[r].session.rewrite_term(absorbed, &steps);
            self.sync_apps(RelationId(r));
        }
        Ok(e)
    }

    fn sync_apps(&mut self, rel: RelationId) {
        let r = &mut self.relations[rel.0];
        let k = r.session.k();
        for id in r.app_of.len()..r.session.ksets().len() {
            let rec = r.session.kset(KSetId(id as u32));
            let args: TermSet = rec.terms.iter().take(k).collect();
            let app = self.apps.intern(KFunApp { relation: rel, args });
            let history = rec.history.clone();
            r.app_of.push(app);
            match history {
                HistoryNode::Assume(_) => {}
                HistoryNode::Merged { left, right } => {
                    Self::on_kset_merge(&mut self.apps, &r.app_of, left, right, KSetId(id as u32));
                }
                HistoryNode::Rewritten { source, .. } => {
                    self.apps.classes.union(r.app_of[source.index()], app);
                }
            }
        }
    }

    /// Merges the application classes of `i1`, `i2` and their union `new`.
    fn on_kset_merge(apps: &mut AppTable, app_of: &[usize], i1: KSetId, i2: KSetId, new: KSetId) {
        apps.classes.union(app_of[i1.index()], app_of[i2.index()]);
        apps.classes.union(app_of[i1.index()], app_of[new.index()]);
    }

    /// Class of the application `φ_rel(args)`, if that application was ever
    /// created as some k-set's canonical application.
    pub fn app_class(&self, rel: RelationId, args: &[TermId]) -> Option<usize> {
        let args: TermSet = args.iter().map(|&t| self.canonical(t)).collect();
        self.apps
            .index
            .get(&KFunApp { relation: rel, args })
            .map(|&i| self.apps.classes.find(i))
    }

    /// The canonical application of every active k-set of `rel`.
    pub fn active_apps(&self, rel: RelationId) -> Vec<(KSetId, &KFunApp)> {
        let r = &self.relations[rel.0];
        r.session
            .active_ksets()
            .map(|rec| (rec.id, &self.apps.apps[r.app_of[rec.id.index()]]))
            .collect()
    }

    /// Decides `Φ(xs)` modulo the asserted equalities. The proof concludes
    /// the set of representatives of `xs`.
    pub fn query(&self, rel: RelationId, xs: &[TermId]) -> Result<Verdict, CongruenceError> {
        let canon: Vec<TermId> = xs.iter().map(|&t| self.canonical(t)).collect();
        Ok(self.relations[rel.0].session.resolve_query(&canon)?)
    }

    pub fn query_kfun_eq(
        &self,
        rel: RelationId,
        x1: &[TermId],
        x2: &[TermId],
    ) -> Result<bool, CongruenceError> {
        let k = self.session(rel).k();
        for x in [x1, x2] {
            let distinct: TermSet = x.iter().copied().collect();
            if distinct.len() != k {
                return Err(EngineError::KFunArity {
                    expected: k,
                    got: distinct.len(),
                }
                .into());
            }
        }
        let union: Vec<TermId> = x1.iter().chain(x2).copied().collect();
        Ok(self.query(rel, &union)?.is_entailed())
    }
}

impl TermNames for Congruence {
    fn term_name(&self, t: TermId) -> Option<&str> {
        self.terms.name(t)
    }
}
