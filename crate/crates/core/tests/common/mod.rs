//! Random instances and helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use kequiv::congruence::Congruence;
use kequiv::oracle;
use kequiv::{check, CheckContext, DistinctnessPartition, ProofTerm, Session, TermId, TermSet};
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone)]
pub struct Instance {
    pub k: usize,
    pub n_terms: usize,
    pub hyps: Vec<Vec<TermId>>,
    pub classes: Vec<Vec<TermId>>,
}

pub fn t(i: usize) -> TermId {
    TermId(i as u32)
}

impl Instance {
    pub fn universe(&self) -> BTreeSet<TermId> {
        (0..self.n_terms).map(t).collect()
    }

    pub fn partition(&self) -> DistinctnessPartition {
        DistinctnessPartition::from_groups(self.classes.iter().map(Vec::as_slice))
    }

    pub fn session(&self) -> Session {
        let mut s = Session::new(self.k).unwrap();
        for i in 0..self.n_terms {
            assert_eq!(s.intern_term(&format!("t{i}")), t(i));
        }
        for c in &self.classes {
            s.declare_class(c).unwrap();
        }
        for h in &self.hyps {
            s.assert_hypothesis(h).unwrap();
        }
        s
    }

    pub fn oracle_atoms(&self) -> oracle::AtomSet {
        oracle::saturate(self.k, &self.hyps, &self.universe(), &self.partition()).unwrap()
    }
}

/// Random instance with `k ∈ {1,2,3}`, at most `max_terms` terms and at
/// most `max_hyps` hypotheses. Hypotheses are drawn from a few hidden
/// "lines" so that merges actually happen.
pub fn random_instance<R: Rng>(rng: &mut R, max_terms: usize, max_hyps: usize, partition_rate: f64) -> Instance {
    let k = rng.gen_range(1..=3);
    let n_terms = rng.gen_range(k + 1..=max_terms.max(k + 1));
    let n_hyps = rng.gen_range(1..=max_hyps);
    let all: Vec<TermId> = (0..n_terms).map(t).collect();
    let n_lines = rng.gen_range(1..=3);
    let lines: Vec<Vec<TermId>> = (0..n_lines)
        .map(|_| {
            let size = rng.gen_range(k + 1..=n_terms);
            all.choose_multiple(rng, size).copied().collect()
        })
        .collect();
    let hyps = (0..n_hyps)
        .map(|_| {
            let pool = if rng.gen_bool(0.8) { &lines[rng.gen_range(0..n_lines)] } else { &all };
            (0..=k)
                .map(|_| {
                    if rng.gen_bool(0.1) {
                        all[rng.gen_range(0..n_terms)]
                    } else {
                        pool[rng.gen_range(0..pool.len())]
                    }
                })
                .collect()
        })
        .collect();
    let mut classes = Vec::new();
    if rng.gen_bool(partition_rate) {
        let mut shuffled = all.clone();
        shuffled.shuffle(rng);
        let groups = rng.gen_range(1..=2);
        let mut it = shuffled.into_iter();
        for _ in 0..groups {
            let size = rng.gen_range(2..=3);
            let g: Vec<TermId> = it.by_ref().take(size).collect();
            if g.len() >= 2 {
                classes.push(g);
            }
        }
    }
    Instance {
        k,
        n_terms,
        hyps,
        classes,
    }
}

pub fn subsets(n: usize, size: usize) -> Vec<Vec<TermId>> {
    fn go(n: usize, size: usize, start: usize, cur: &mut Vec<TermId>, out: &mut Vec<Vec<TermId>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(t(i));
            go(n, size, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, size, 0, &mut Vec::new(), &mut out);
    out
}

/// Plain union-find connectivity, independent of the library.
pub fn connected(n: usize, pairs: &[(usize, usize)], a: usize, b: usize) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(x, y) in pairs {
        let (rx, ry) = (root(&mut parent, x), root(&mut parent, y));
        parent[rx] = ry;
    }
    root(&mut parent, a) == root(&mut parent, b)
}

/// One step of a congruence scenario.
#[derive(Debug, Clone)]
pub enum Step {
    Atom(Vec<TermId>),
    Eq(TermId, TermId),
}

#[derive(Debug, Clone)]
pub struct CongruenceInstance {
    pub k: usize,
    pub n_terms: usize,
    pub classes: Vec<Vec<TermId>>,
    pub steps: Vec<Step>,
}

/// Random interleaving of atoms and equalities. Equalities are only drawn
/// inside declared classes so they are consistent with the partition.
pub fn random_congruence<R: Rng>(rng: &mut R) -> CongruenceInstance {
    let k = rng.gen_range(1..=3);
    let n_terms = rng.gen_range(k + 2..=8);
    let all: Vec<TermId> = (0..n_terms).map(t).collect();
    let mut shuffled = all.clone();
    shuffled.shuffle(rng);
    let mut classes: Vec<Vec<TermId>> = Vec::new();
    let mut it = shuffled.into_iter();
    for _ in 0..rng.gen_range(1..=2) {
        let g: Vec<TermId> = it.by_ref().take(rng.gen_range(2..=3)).collect();
        if g.len() >= 2 {
            classes.push(g);
        }
    }
    let line_size = rng.gen_range(k + 1..=n_terms);
    let line: Vec<TermId> = all.choose_multiple(rng, line_size).copied().collect();
    let mut steps = Vec::new();
    for _ in 0..rng.gen_range(2..=8) {
        if !classes.is_empty() && rng.gen_bool(0.35) {
            let c = &classes[rng.gen_range(0..classes.len())];
            let a = c[rng.gen_range(0..c.len())];
            let b = c[rng.gen_range(0..c.len())];
            steps.push(Step::Eq(a, b));
        } else {
            let pool = if rng.gen_bool(0.7) { &line } else { &all };
            steps.push(Step::Atom((0..=k).map(|_| pool[rng.gen_range(0..pool.len())]).collect()));
        }
    }
    CongruenceInstance {
        k,
        n_terms,
        classes,
        steps,
    }
}

impl CongruenceInstance {
    pub fn build(&self) -> (Congruence, kequiv::RelationId) {
        let mut cc = Congruence::new();
        let rel = cc.add_relation("r", self.k).unwrap();
        for i in 0..self.n_terms {
            cc.intern(&format!("t{i}"));
        }
        for c in &self.classes {
            cc.declare_class(c).unwrap();
        }
        for s in &self.steps {
            match s {
                Step::Atom(xs) => {
                    cc.assert_atom(rel, xs).unwrap();
                }
                Step::Eq(a, b) => {
                    cc.assert_eq(*a, *b).unwrap();
                }
            }
        }
        (cc, rel)
    }

    /// Oracle over the atoms with every term replaced by a representative
    /// of its equality class (computed independently of the library).
    pub fn substitution_oracle(&self) -> (Vec<TermId>, oracle::AtomSet) {
        let mut rep: Vec<usize> = (0..self.n_terms).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        for s in &self.steps {
            if let Step::Eq(a, b) = s {
                let (ra, rb) = (root(&mut rep, a.index()), root(&mut rep, b.index()));
                if ra != rb {
                    rep[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let canon: Vec<TermId> = (0..self.n_terms).map(|i| t(root(&mut rep, i))).collect();
        let hyps: Vec<Vec<TermId>> = self
            .steps
            .iter()
            .filter_map(|s| match s {
                Step::Atom(xs) => Some(xs.iter().map(|x| canon[x.index()]).collect()),
                Step::Eq(..) => None,
            })
            .collect();
        let universe: BTreeSet<TermId> = (0..self.n_terms).map(t).collect();
        let partition = DistinctnessPartition::from_groups(self.classes.iter().map(Vec::as_slice));
        let atoms = oracle::saturate(self.k, &hyps, &universe, &partition).unwrap();
        (canon, atoms)
    }
}

/// Every single-node mutation of `p`: retargeted `assume` indices,
/// over-grown `subrefl` sets, `project` targets outside the premise,
/// replaced `trans` children and retargeted `subst` steps.
/// A single-node mutation: the rebuilt proof plus the node before and
/// after the change.
pub struct Mutant {
    pub proof: ProofTerm,
    pub before: ProofTerm,
    pub after: ProofTerm,
}

/// Every single-node mutation of `p`. Replacing a premise by one that
/// proves the same set is not a mutation and is skipped.
pub fn mutants(p: &ProofTerm, ctx: &CheckContext, n_terms: usize) -> Vec<Mutant> {
    let (hyps, k) = (ctx.hypotheses, ctx.k);
    let hyp_set = |i: usize| -> TermSet { hyps[i].iter().copied().collect() };
    let mut local = Vec::new();
    match p {
        ProofTerm::Assume(i) => {
            for j in 0..hyps.len() {
                if hyp_set(j) != hyp_set(*i) {
                    local.push(ProofTerm::Assume(j));
                }
            }
            local.push(ProofTerm::Assume(hyps.len()));
        }
        ProofTerm::SubRefl(s) => {
            let mut grown = s.clone();
            for x in (0..n_terms).map(t) {
                if grown.len() > k {
                    break;
                }
                grown.insert(x);
            }
            if grown.len() > k {
                local.push(ProofTerm::SubRefl(grown));
            }
        }
        ProofTerm::Trans(..) => {}
        ProofTerm::Project(inner, s) => {
            if let Some(x) = (0..n_terms).map(t).find(|&x| !s.contains(x)) {
                let mut bigger = s.clone();
                bigger.insert(x);
                local.push(ProofTerm::project((**inner).clone(), bigger));
            }
        }
        ProofTerm::Subst { inner, from, to, eq } => {
            local.push(ProofTerm::subst((**inner).clone(), *to, *from, *eq));
            local.push(ProofTerm::subst((**inner).clone(), *from, *to, eq + 1));
        }
    }
    let mut out: Vec<Mutant> = local
        .into_iter()
        .map(|m| Mutant {
            proof: m.clone(),
            before: p.clone(),
            after: m,
        })
        .collect();
    let rebuild = |child: Mutant, wrap: &dyn Fn(ProofTerm) -> ProofTerm| Mutant {
        proof: wrap(child.proof),
        ..child
    };
    match p {
        ProofTerm::Trans(l, r) => {
            // replace the right premise wholesale
            let replacements = (0..hyps.len()).map(ProofTerm::Assume).chain([(**l).clone()]);
            let proves = |x: &ProofTerm| check(x, ctx).ok().map(|j| j.terms);
            let replaced = proves(r);
            for after in replacements.filter(|a| proves(a) != replaced) {
                out.push(Mutant {
                    proof: ProofTerm::trans((**l).clone(), after.clone()),
                    before: (**r).clone(),
                    after,
                });
            }
            for m in mutants(l, ctx, n_terms) {
                out.push(rebuild(m, &|x| ProofTerm::trans(x, (**r).clone())));
            }
            for m in mutants(r, ctx, n_terms) {
                out.push(rebuild(m, &|x| ProofTerm::trans((**l).clone(), x)));
            }
        }
        ProofTerm::Project(inner, s) => {
            for m in mutants(inner, ctx, n_terms) {
                out.push(rebuild(m, &|x| ProofTerm::project(x, s.clone())));
            }
        }
        ProofTerm::Subst { inner, from, to, eq } => {
            for m in mutants(inner, ctx, n_terms) {
                out.push(rebuild(m, &|x| ProofTerm::subst(x, *from, *to, *eq)));
            }
        }
        _ => {}
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct MutationTally {
    pub total: usize,
    pub rejected: usize,
    /// Accepted, and the mutated node concludes something different.
    pub changed: usize,
    /// Accepted with the mutated node concluding what it did before.
    pub same: usize,
    /// Accepted with an unchanged root conclusion (project and trans
    /// ancestors can absorb a changed node).
    pub same_root: usize,
    pub unsound: usize,
}

/// Checks every mutant of a valid proof of `original`. An accepted mutant
/// is unsound when the oracle does not entail its conclusion.
pub fn tally_mutants(
    proof: &ProofTerm,
    original: &TermSet,
    inst: &Instance,
    atoms: &oracle::AtomSet,
    tally: &mut MutationTally,
) {
    let partition = inst.partition();
    let ctx = CheckContext {
        k: inst.k,
        hypotheses: &inst.hyps,
        partition: &partition,
        equalities: &[],
    };
    for m in mutants(proof, &ctx, inst.n_terms) {
        tally.total += 1;
        match check(&m.proof, &ctx) {
            Err(_) => tally.rejected += 1,
            Ok(j) => {
                let q: Vec<TermId> = j.terms.iter().collect();
                let sound = q.len() <= inst.k
                    || subsets_of(&q, inst.k + 1).iter().all(|s| atoms.holds(s));
                if !sound {
                    tally.unsound += 1;
                }
                if &j.terms == original {
                    tally.same_root += 1;
                }
                let before = check(&m.before, &ctx).map(|j| j.terms);
                let after = check(&m.after, &ctx).map(|j| j.terms);
                if before == after {
                    tally.same += 1;
                } else {
                    tally.changed += 1;
                }
            }
        }
    }
}

pub fn subsets_of(items: &[TermId], size: usize) -> Vec<Vec<TermId>> {
    subsets(items.len(), size)
        .into_iter()
        .map(|s| s.into_iter().map(|i| items[i.index()]).collect())
        .collect()
}
