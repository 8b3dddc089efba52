//! Brute-force reference semantics.
//!
//! Saturates the set of `(k+1)`-ary atoms over a fixed finite universe with
//! the tuple-level laws: sub-reflexivity, permutation invariance and
//! k-transitivity. Atoms are stored as sorted tuples, which absorbs
//! permutation invariance. Tuples with a repeated term hold by
//! sub-reflexivity and are never stored.
//!
//! Cost is polynomial in the universe size but exponential in `k`; the
//! universe is capped at [`MAX_UNIVERSE`] terms.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::term::{DistinctnessPartition, TermId};

pub const MAX_UNIVERSE: usize = 12;
pub const MAX_SUPPORT_HYPOTHESES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("universe has {0} terms, the oracle accepts at most {MAX_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("{0} hypotheses, support enumeration accepts at most {MAX_SUPPORT_HYPOTHESES}")]
    TooManyHypotheses(usize),
    #[error("hypothesis {index} has {got} terms, expected k + 1 = {expected}")]
    Arity { index: usize, expected: usize, got: usize },
    #[error("term {0} is not in the universe")]
    OutsideUniverse(TermId),
    #[error("k must be at least 1")]
    ZeroK,
}

/// The saturated set of derived atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomSet {
    k: usize,
    derived: HashSet<Vec<TermId>>,
}

fn has_repeat(sorted: &[TermId]) -> bool {
    sorted.windows(2).any(|w| w[0] == w[1])
}

impl AtomSet {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Whether `R(tuple)` is derived. `tuple` must have `k + 1` entries.
    pub fn holds(&self, tuple: &[TermId]) -> bool {
        debug_assert_eq!(tuple.len(), self.k + 1);
        let mut t = tuple.to_vec();
        t.sort_unstable();
        has_repeat(&t) || self.derived.contains(&t)
    }

    /// Duplicate-free derived atoms, as sorted tuples.
    pub fn atoms(&self) -> impl Iterator<Item = &Vec<TermId>> {
        self.derived.iter()
    }

    pub fn len(&self) -> usize {
        self.derived.len()
    }

    pub fn is_empty(&self) -> bool {
        self.derived.is_empty()
    }
}

fn subsets_of_size(items: &[TermId], size: usize, out: &mut Vec<Vec<TermId>>) {
    fn go(items: &[TermId], size: usize, start: usize, cur: &mut Vec<TermId>, out: &mut Vec<Vec<TermId>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, size, i + 1, cur, out);
            cur.pop();
        }
    }
    go(items, size, 0, &mut Vec::with_capacity(size), out);
}

fn check_inputs(
    k: usize,
    hypotheses: &[Vec<TermId>],
    universe: &BTreeSet<TermId>,
) -> Result<(), OracleError> {
    if k == 0 {
        return Err(OracleError::ZeroK);
    }
    if universe.len() > MAX_UNIVERSE {
        return Err(OracleError::UniverseTooLarge(universe.len()));
    }
    for (index, h) in hypotheses.iter().enumerate() {
        if h.len() != k + 1 {
            return Err(OracleError::Arity {
                index,
                expected: k + 1,
                got: h.len(),
            });
        }
        if let Some(&t) = h.iter().find(|t| !universe.contains(t)) {
            return Err(OracleError::OutsideUniverse(t));
        }
    }
    Ok(())
}

/// Least fixpoint of the hypotheses under the k-equivalence laws.
///
/// k-transitivity fires on an anchor of `k` terms only when the anchor's
/// terms lie in pairwise different classes of `partition`.
pub fn saturate(
    k: usize,
    hypotheses: &[Vec<TermId>],
    universe: &BTreeSet<TermId>,
    partition: &DistinctnessPartition,
) -> Result<AtomSet, OracleError> {
    check_inputs(k, hypotheses, universe)?;
    let mut atoms = AtomSet {
        k,
        derived: HashSet::new(),
    };
    for h in hypotheses {
        let mut t = h.clone();
        t.sort_unstable();
        if !has_repeat(&t) {
            atoms.derived.insert(t);
        }
    }
    let terms: Vec<TermId> = universe.iter().copied().collect();
    let mut anchors = Vec::new();
    subsets_of_size(&terms, k, &mut anchors);
    anchors.retain(|a| partition.count_classes(a.iter().copied()) == k);

    let mut tuple = Vec::with_capacity(k + 1);
    loop {
        let mut fresh = Vec::new();
        for anchor in &anchors {
            // completions y with R(anchor, y), excluding anchor members
            let ys: Vec<TermId> = terms
                .iter()
                .copied()
                .filter(|y| !anchor.contains(y))
                .filter(|&y| {
                    tuple.clear();
                    tuple.extend_from_slice(anchor);
                    tuple.push(y);
                    atoms.holds(&tuple)
                })
                .collect();
            for (i, &y1) in ys.iter().enumerate() {
                for &y2 in &ys[i + 1..] {
                    for drop in 0..k {
                        let mut t: Vec<TermId> = anchor
                            .iter()
                            .enumerate()
                            .filter(|&(j, _)| j != drop)
                            .map(|(_, &x)| x)
                            .collect();
                        t.push(y1);
                        t.push(y2);
                        t.sort_unstable();
                        if !atoms.derived.contains(&t) {
                            fresh.push(t);
                        }
                    }
                }
            }
        }
        let before = atoms.derived.len();
        atoms.derived.extend(fresh);
        if atoms.derived.len() == before {
            return Ok(atoms);
        }
    }
}

fn entailed_in(atoms: &AtomSet, query: &[TermId]) -> bool {
    let q: Vec<TermId> = query.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if q.len() <= atoms.k {
        return true;
    }
    let mut subsets = Vec::new();
    subsets_of_size(&q, atoms.k + 1, &mut subsets);
    subsets.iter().all(|s| atoms.holds(s))
}

/// Whether `Φ(query)` follows: every `(k+1)`-subset of the query's
/// distinct terms is derived. Queries with at most `k` distinct terms hold
/// by sub-reflexivity.
pub fn oracle_entailed(
    k: usize,
    hypotheses: &[Vec<TermId>],
    query: &[TermId],
    universe: &BTreeSet<TermId>,
    partition: &DistinctnessPartition,
) -> Result<bool, OracleError> {
    let atoms = saturate(k, hypotheses, universe, partition)?;
    let distinct: BTreeSet<TermId> = query.iter().copied().collect();
    if distinct.len() > k {
        if let Some(&t) = distinct.iter().find(|t| !universe.contains(t)) {
            return Err(OracleError::OutsideUniverse(t));
        }
    }
    Ok(entailed_in(&atoms, query))
}

/// Every inclusion-minimal set of hypothesis indices that entails `query`.
pub fn minimal_supports(
    k: usize,
    hypotheses: &[Vec<TermId>],
    query: &[TermId],
    universe: &BTreeSet<TermId>,
    partition: &DistinctnessPartition,
) -> Result<Vec<BTreeSet<usize>>, OracleError> {
    if hypotheses.len() > MAX_SUPPORT_HYPOTHESES {
        return Err(OracleError::TooManyHypotheses(hypotheses.len()));
    }
    check_inputs(k, hypotheses, universe)?;
    let n = hypotheses.len();
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut found: Vec<u32> = Vec::new();
    for mask in masks {
        if found.iter().any(|&f| f & !mask == 0) {
            continue;
        }
        let subset: Vec<Vec<TermId>> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| hypotheses[i].clone())
            .collect();
        let atoms = saturate(k, &subset, universe, partition)?;
        if entailed_in(&atoms, query) {
            found.push(mask);
        }
    }
    Ok(found
        .into_iter()
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect())
}
