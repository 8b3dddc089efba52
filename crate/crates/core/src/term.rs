//! Term identifiers, sorted term sets and the distinctness partition.

use std::collections::HashMap;
use std::fmt;

/// Interned identifier for a point or term. Ids are dense and start at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(pub u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{}", self.0)
    }
}

/// Identifier of a distinctness class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassId(pub u32);

/// A finite set of terms, stored as a sorted vector without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermSet(Vec<TermId>);

impl TermSet {
    pub fn new() -> Self {
        TermSet(Vec::new())
    }

    pub fn from_sorted_unchecked(terms: Vec<TermId>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0] < w[1]));
        TermSet(terms)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[TermId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = TermId> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<TermId> {
        self.0.first().copied()
    }

    pub fn contains(&self, t: TermId) -> bool {
        self.0.binary_search(&t).is_ok()
    }

    pub fn insert(&mut self, t: TermId) -> bool {
        match self.0.binary_search(&t) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, t);
                true
            }
        }
    }

    pub fn remove(&mut self, t: TermId) -> bool {
        match self.0.binary_search(&t) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn is_subset(&self, other: &TermSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut rest = other.0.iter();
        'outer: for t in &self.0 {
            for u in rest.by_ref() {
                if u == t {
                    continue 'outer;
                }
                if u > t {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn union(&self, other: &TermSet) -> TermSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        TermSet(out)
    }

    pub fn intersection(&self, other: &TermSet) -> TermSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        TermSet(out)
    }

    /// The set with `from` replaced by `to`. Unchanged when `from` is absent.
    pub fn replace(&self, from: TermId, to: TermId) -> TermSet {
        let mut out = self.clone();
        if out.remove(from) {
            out.insert(to);
        }
        out
    }
}

impl FromIterator<TermId> for TermSet {
    fn from_iter<I: IntoIterator<Item = TermId>>(iter: I) -> Self {
        let mut v: Vec<TermId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        TermSet(v)
    }
}

impl<'a> IntoIterator for &'a TermSet {
    type Item = TermId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, TermId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// Partition of terms into classes of possibly-equal terms. Terms in
/// different classes are known to be distinct.
///
/// Terms beyond the explicitly tracked range each sit in their own
/// implicit singleton class, so the default is the identity partition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DistinctnessPartition {
    class_of: Vec<ClassId>,
    next_class: u32,
}

impl DistinctnessPartition {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a partition from explicit groups of possibly-equal terms.
    /// Overlapping groups are joined.
    pub fn from_groups<'a, I>(groups: I) -> Self
    where
        I: IntoIterator<Item = &'a [TermId]>,
    {
        let mut p = Self::identity();
        for g in groups {
            p.join(g);
        }
        p
    }

    pub fn ensure(&mut self, t: TermId) {
        while self.class_of.len() <= t.index() {
            self.class_of.push(ClassId(self.next_class));
            self.next_class += 1;
        }
    }

    pub fn class_of(&self, t: TermId) -> ClassId {
        match self.class_of.get(t.index()) {
            Some(&c) => c,
            None => ClassId(self.next_class + (t.index() - self.class_of.len()) as u32),
        }
    }

    pub fn same_class(&self, a: TermId, b: TermId) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    /// Puts every term of `terms` into one class.
    pub fn join(&mut self, terms: &[TermId]) {
        let Some(&first) = terms.first() else {
            return;
        };
        for &t in terms {
            self.ensure(t);
        }
        let target = self.class_of(first);
        for &t in &terms[1..] {
            let old = self.class_of(t);
            if old == target {
                continue;
            }
            for c in self.class_of.iter_mut() {
                if *c == old {
                    *c = target;
                }
            }
        }
    }

    /// Number of distinct classes among `terms`.
    pub fn count_classes<I: IntoIterator<Item = TermId>>(&self, terms: I) -> usize {
        let mut seen: Vec<ClassId> = terms.into_iter().map(|t| self.class_of(t)).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// True if no class holds more than one of the tracked terms.
    pub fn is_identity(&self) -> bool {
        let mut seen: Vec<ClassId> = self.class_of.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.class_of.len()
    }

    /// The non-singleton classes, each as a sorted list of terms.
    pub fn nontrivial_classes(&self) -> Vec<Vec<TermId>> {
        let mut groups: HashMap<ClassId, Vec<TermId>> = HashMap::new();
        for (i, &c) in self.class_of.iter().enumerate() {
            groups.entry(c).or_default().push(TermId(i as u32));
        }
        let mut out: Vec<Vec<TermId>> = groups.into_values().filter(|g| g.len() > 1).collect();
        out.sort();
        out
    }
}

/// Name lookup used when rendering terms.
pub trait TermNames {
    fn term_name(&self, t: TermId) -> Option<&str>;
}

impl TermNames for [String] {
    fn term_name(&self, t: TermId) -> Option<&str> {
        self.get(t.index()).map(String::as_str)
    }
}

impl TermNames for Vec<String> {
    fn term_name(&self, t: TermId) -> Option<&str> {
        self.as_slice().term_name(t)
    }
}

/// Name/id table with dense id assignment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    names: Vec<String>,
    ids: HashMap<String, TermId>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, name: &str) -> TermId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = TermId(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<TermId> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, t: TermId) -> Option<&str> {
        self.names.get(t.index()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl TermNames for Interner {
    fn term_name(&self, t: TermId) -> Option<&str> {
        self.name(t)
    }
}
