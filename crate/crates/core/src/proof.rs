//! Proof terms for k-predicate facts and an independent checker.
//!
//! A proof concludes `Φ(S)` for a finite term set `S`. The checker only
//! knows the laws of the k-predicate (sub-reflexivity, k-transitivity,
//! projection) plus substitution of equals; it never consults engine state.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{DistinctnessPartition, TermId, TermNames, TermSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ProofTerm {
    Assume(usize),
    SubRefl(TermSet),
    Trans(Box<ProofTerm>, Box<ProofTerm>),
    Project(Box<ProofTerm>, TermSet),
    /// Replace `from` by `to` using equality number `eq`.
    Subst {
        inner: Box<ProofTerm>,
        from: TermId,
        to: TermId,
        eq: usize,
    },
}

impl ProofTerm {
    pub fn trans(left: ProofTerm, right: ProofTerm) -> ProofTerm {
        ProofTerm::Trans(Box::new(left), Box::new(right))
    }

    pub fn project(inner: ProofTerm, terms: TermSet) -> ProofTerm {
        ProofTerm::Project(Box::new(inner), terms)
    }

    pub fn subst(inner: ProofTerm, from: TermId, to: TermId, eq: usize) -> ProofTerm {
        ProofTerm::Subst {
            inner: Box::new(inner),
            from,
            to,
            eq,
        }
    }

    /// Indices of every hypothesis under an `assume` node.
    pub fn used_hypotheses(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(p) = stack.pop() {
            match p {
                ProofTerm::Assume(i) => {
                    out.insert(*i);
                }
                ProofTerm::SubRefl(_) => {}
                ProofTerm::Trans(l, r) => {
                    stack.push(l);
                    stack.push(r);
                }
                ProofTerm::Project(p, _) => stack.push(p),
                ProofTerm::Subst { inner, .. } => stack.push(inner),
            }
        }
        out
    }

    /// Number of nodes in the proof tree.
    pub fn size(&self) -> usize {
        match self {
            ProofTerm::Assume(_) | ProofTerm::SubRefl(_) => 1,
            ProofTerm::Trans(l, r) => 1 + l.size() + r.size(),
            ProofTerm::Project(p, _) => 1 + p.size(),
            ProofTerm::Subst { inner, .. } => 1 + inner.size(),
        }
    }

    /// Renders the proof in the canonical parenthesized form, naming terms
    /// through `names`.
    pub fn render<N: TermNames + ?Sized>(&self, names: &N) -> String {
        let mut out = String::new();
        self.render_into(names, &mut out);
        out
    }

    fn render_into<N: TermNames + ?Sized>(&self, names: &N, out: &mut String) {
        let push_term = |out: &mut String, t: TermId| {
            out.push(' ');
            match names.term_name(t) {
                Some(n) => out.push_str(n),
                None => out.push_str(&t.to_string()),
            }
        };
        match self {
            ProofTerm::Assume(i) => {
                out.push_str("(assume ");
                out.push_str(&i.to_string());
                out.push(')');
            }
            ProofTerm::SubRefl(s) => {
                out.push_str("(subrefl");
                for t in s {
                    push_term(out, t);
                }
                out.push(')');
            }
            ProofTerm::Trans(l, r) => {
                out.push_str("(trans ");
                l.render_into(names, out);
                out.push(' ');
                r.render_into(names, out);
                out.push(')');
            }
            ProofTerm::Project(p, s) => {
                out.push_str("(project ");
                p.render_into(names, out);
                for t in s {
                    push_term(out, t);
                }
                out.push(')');
            }
            ProofTerm::Subst {
                inner,
                from,
                to,
                eq,
            } => {
                out.push_str("(subst ");
                inner.render_into(names, out);
                push_term(out, *from);
                push_term(out, *to);
                out.push(' ');
                out.push_str(&eq.to_string());
                out.push(')');
            }
        }
    }
}

/// The conclusion `Φ(terms)` of a checked proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub terms: TermSet,
}

/// Everything a proof is checked against.
#[derive(Debug, Clone, Copy)]
pub struct CheckContext<'a> {
    pub k: usize,
    pub hypotheses: &'a [Vec<TermId>],
    pub partition: &'a DistinctnessPartition,
    pub equalities: &'a [(TermId, TermId)],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStep {
    TransLeft,
    TransRight,
    ProjectInner,
    SubstInner,
}

impl fmt::Display for PathStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathStep::TransLeft => "trans.0",
            PathStep::TransRight => "trans.1",
            PathStep::ProjectInner => "project.0",
            PathStep::SubstInner => "subst.0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LawViolation {
    #[error("assume: hypothesis index {index} out of range ({count} hypotheses)")]
    HypothesisOutOfRange { index: usize, count: usize },
    #[error("subrefl: set has {size} terms, more than k = {k}")]
    SubReflTooLarge { size: usize, k: usize },
    #[error("subrefl: empty set")]
    EmptySubRefl,
    #[error("trans: overlap spans {classes} distinctness classes, fewer than k = {k}")]
    TransOverlapTooSmall { classes: usize, k: usize },
    #[error("project: target is not a subset of the premise")]
    ProjectNotSubset,
    #[error("project: empty target")]
    EmptyProject,
    #[error("subst: equality index {index} out of range ({count} equalities)")]
    EqualityOutOfRange { index: usize, count: usize },
    #[error("subst: equality {index} does not relate the substituted terms")]
    EqualityMismatch { index: usize },
    #[error("subst: substituted term does not occur in the premise")]
    SubstTermAbsent,
}

/// A failed side condition, located by the path from the root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at {}: {violation}", render_path(.path))]
pub struct CheckError {
    pub path: Vec<PathStep>,
    pub violation: LawViolation,
}

fn render_path(path: &[PathStep]) -> String {
    let mut s = String::from("root");
    for step in path {
        s.push('/');
        s.push_str(&step.to_string());
    }
    s
}

/// Checks `proof` and returns its conclusion.
pub fn check(proof: &ProofTerm, ctx: &CheckContext<'_>) -> Result<Judgment, CheckError> {
    let mut path = Vec::new();
    check_at(proof, ctx, &mut path).map(|terms| Judgment { terms })
}

fn check_at(
    proof: &ProofTerm,
    ctx: &CheckContext<'_>,
    path: &mut Vec<PathStep>,
) -> Result<TermSet, CheckError> {
    let fail = |path: &Vec<PathStep>, violation| {
        Err(CheckError {
            path: path.clone(),
            violation,
        })
    };
    match proof {
        ProofTerm::Assume(i) => match ctx.hypotheses.get(*i) {
            Some(atom) => Ok(atom.iter().copied().collect()),
            None => fail(
                path,
                LawViolation::HypothesisOutOfRange {
                    index: *i,
                    count: ctx.hypotheses.len(),
                },
            ),
        },
        ProofTerm::SubRefl(s) => {
            if s.is_empty() {
                fail(path, LawViolation::EmptySubRefl)
            } else if s.len() > ctx.k {
                fail(path, LawViolation::SubReflTooLarge { size: s.len(), k: ctx.k })
            } else {
                Ok(s.clone())
            }
        }
        ProofTerm::Trans(l, r) => {
            path.push(PathStep::TransLeft);
            let x = check_at(l, ctx, path)?;
            path.pop();
            path.push(PathStep::TransRight);
            let y = check_at(r, ctx, path)?;
            path.pop();
            let classes = ctx.partition.count_classes(x.intersection(&y).iter());
            if classes < ctx.k {
                return fail(path, LawViolation::TransOverlapTooSmall { classes, k: ctx.k });
            }
            Ok(x.union(&y))
        }
        ProofTerm::Project(p, s) => {
            path.push(PathStep::ProjectInner);
            let x = check_at(p, ctx, path)?;
            path.pop();
            if s.is_empty() {
                fail(path, LawViolation::EmptyProject)
            } else if !s.is_subset(&x) {
                fail(path, LawViolation::ProjectNotSubset)
            } else {
                Ok(s.clone())
            }
        }
        ProofTerm::Subst {
            inner,
            from,
            to,
            eq,
        } => {
            path.push(PathStep::SubstInner);
            let x = check_at(inner, ctx, path)?;
            path.pop();
            let Some(&(a, b)) = ctx.equalities.get(*eq) else {
                return fail(
                    path,
                    LawViolation::EqualityOutOfRange {
                        index: *eq,
                        count: ctx.equalities.len(),
                    },
                );
            };
            if !((a, b) == (*from, *to) || (b, a) == (*from, *to)) {
                return fail(path, LawViolation::EqualityMismatch { index: *eq });
            }
            if !x.contains(*from) {
                return fail(path, LawViolation::SubstTermAbsent);
            }
            Ok(x.replace(*from, *to))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: u32) -> TermId {
        TermId(i)
    }

    fn set(ids: &[u32]) -> TermSet {
        ids.iter().map(|&i| TermId(i)).collect()
    }

    // a..g = 0..6
    fn seven_point_hyps() -> Vec<Vec<TermId>> {
        [[0, 1, 2], [2, 3, 4], [4, 5, 6], [0, 3, 6], [1, 2, 3]]
            .iter()
            .map(|h| h.iter().map(|&i| t(i)).collect())
            .collect()
    }

    #[test]
    fn golden_explain_proof_checks() {
        let hyps = seven_point_hyps();
        let part = DistinctnessPartition::identity();
        let ctx = CheckContext {
            k: 2,
            hypotheses: &hyps,
            partition: &part,
            equalities: &[],
        };
        let p = ProofTerm::project(
            ProofTerm::trans(ProofTerm::Assume(0), ProofTerm::Assume(4)),
            set(&[0, 1, 3]),
        );
        assert_eq!(check(&p, &ctx).unwrap().terms, set(&[0, 1, 3]));
        assert_eq!(p.used_hypotheses(), BTreeSet::from([0, 4]));
        let names: Vec<String> = "abcdefg".chars().map(String::from).collect();
        assert_eq!(p.render(&names), "(project (trans (assume 0) (assume 4)) a b d)");
    }

    #[test]
    fn subrefl_boundary() {
        let part = DistinctnessPartition::identity();
        let ctx = CheckContext {
            k: 2,
            hypotheses: &[],
            partition: &part,
            equalities: &[],
        };
        assert!(check(&ProofTerm::SubRefl(set(&[0, 1])), &ctx).is_ok());
        let err = check(&ProofTerm::SubRefl(set(&[0, 1, 2])), &ctx).unwrap_err();
        assert_eq!(err.violation, LawViolation::SubReflTooLarge { size: 3, k: 2 });
        assert!(ProofTerm::SubRefl(set(&[0])).used_hypotheses().is_empty());
    }

    #[test]
    fn trans_needs_k_shared_classes() {
        let hyps = seven_point_hyps();
        let part = DistinctnessPartition::identity();
        let ctx = CheckContext {
            k: 2,
            hypotheses: &hyps,
            partition: &part,
            equalities: &[],
        };
        let p = ProofTerm::trans(ProofTerm::Assume(0), ProofTerm::Assume(1));
        let err = check(&p, &ctx).unwrap_err();
        assert_eq!(err.violation, LawViolation::TransOverlapTooSmall { classes: 1, k: 2 });
        assert!(err.path.is_empty());

        // same overlap size, but the two shared terms are possibly equal
        let hyps = vec![vec![t(0), t(1), t(2)], vec![t(0), t(1), t(3)]];
        let part = DistinctnessPartition::from_groups([&[t(0), t(1)][..]]);
        let ctx = CheckContext {
            k: 2,
            hypotheses: &hyps,
            partition: &part,
            equalities: &[],
        };
        let p = ProofTerm::trans(ProofTerm::Assume(0), ProofTerm::Assume(1));
        assert!(matches!(
            check(&p, &ctx).unwrap_err().violation,
            LawViolation::TransOverlapTooSmall { classes: 1, .. }
        ));
    }

    #[test]
    fn errors_carry_paths() {
        let hyps = seven_point_hyps();
        let part = DistinctnessPartition::identity();
        let ctx = CheckContext {
            k: 2,
            hypotheses: &hyps,
            partition: &part,
            equalities: &[],
        };
        let p = ProofTerm::project(
            ProofTerm::trans(ProofTerm::Assume(0), ProofTerm::Assume(9)),
            set(&[0]),
        );
        let err = check(&p, &ctx).unwrap_err();
        assert_eq!(err.path, vec![PathStep::ProjectInner, PathStep::TransRight]);
        assert_eq!(
            err.to_string(),
            "at root/project.0/trans.1: assume: hypothesis index 9 out of range (5 hypotheses)"
        );

        let p = ProofTerm::project(ProofTerm::Assume(0), set(&[0, 3]));
        assert_eq!(check(&p, &ctx).unwrap_err().violation, LawViolation::ProjectNotSubset);
    }

    #[test]
    fn subst_rules() {
        let hyps = vec![vec![t(0), t(1), t(2)]];
        let eqs = vec![(t(3), t(2))];
        let part = DistinctnessPartition::identity();
        let ctx = CheckContext {
            k: 2,
            hypotheses: &hyps,
            partition: &part,
            equalities: &eqs,
        };
        let p = ProofTerm::subst(ProofTerm::Assume(0), t(2), t(3), 0);
        assert_eq!(check(&p, &ctx).unwrap().terms, set(&[0, 1, 3]));
        let bad = ProofTerm::subst(ProofTerm::Assume(0), t(2), t(4), 0);
        assert_eq!(
            check(&bad, &ctx).unwrap_err().violation,
            LawViolation::EqualityMismatch { index: 0 }
        );
        let absent = ProofTerm::subst(ProofTerm::Assume(0), t(3), t(2), 0);
        assert_eq!(check(&absent, &ctx).unwrap_err().violation, LawViolation::SubstTermAbsent);
        let oob = ProofTerm::subst(ProofTerm::Assume(0), t(2), t(3), 1);
        assert!(matches!(
            check(&oob, &ctx).unwrap_err().violation,
            LawViolation::EqualityOutOfRange { .. }
        ));
    }
}
