//! Line-oriented problem files.
//!
//! ```text
//! rel coll 2
//! class a b
//! hyp coll a b c
//! eq c d
//! query coll a b d
//! ```

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    Hyp { rel: usize, terms: Vec<String> },
    Eq { a: String, b: String },
    Query { rel: usize, terms: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Located<T> {
    pub line: usize,
    pub item: T,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Problem {
    pub relations: Vec<Relation>,
    pub classes: Vec<Located<Vec<String>>>,
    pub statements: Vec<Located<Statement>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownDirective(String),
    Missing(&'static str),
    BadK(String),
    DuplicateRelation(String),
    UnknownRelation(String),
    Arity { rel: String, expected: usize, got: usize },
    EqArity(usize),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownDirective(d) => write!(f, "unknown directive `{d}`"),
            Self::Missing(what) => write!(f, "missing {what}"),
            Self::BadK(s) => write!(f, "expected a positive integer k, found `{s}`"),
            Self::DuplicateRelation(r) => write!(f, "relation `{r}` declared twice"),
            Self::UnknownRelation(r) => write!(f, "unknown relation `{r}`"),
            Self::Arity { rel, expected, got } => {
                write!(f, "relation `{rel}` takes {expected} terms, got {got}")
            }
            Self::EqArity(n) => write!(f, "`eq` takes 2 terms, got {n}"),
        }
    }
}

/// Whitespace-separated words with their 1-based columns, comments removed.
fn words(line: &str) -> Vec<(usize, &str)> {
    let line = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, w)| (line[..byte].chars().count() + 1, w))
        .collect()
}

impl Problem {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let mut p = Problem::default();
        for (n, raw) in src.lines().enumerate() {
            let line = n + 1;
            let ws = words(raw);
            let Some(&(col, directive)) = ws.first() else {
                continue;
            };
            let err = |col, kind| ParseError { line, col, kind };
            let end_col = raw.split('#').next().unwrap_or("").trim_end().chars().count() + 1;
            let args = &ws[1..];
            let names = |a: &[(usize, &str)]| a.iter().map(|(_, w)| w.to_string()).collect::<Vec<_>>();
            match directive {
                "rel" => {
                    let &(name_col, name) = args.first().ok_or(err(end_col, ParseErrorKind::Missing("relation name")))?;
                    let &(k_col, k) = args.get(1).ok_or(err(end_col, ParseErrorKind::Missing("k")))?;
                    if let Some(&(c, _)) = args.get(2) {
                        return Err(err(c, ParseErrorKind::Missing("end of line")));
                    }
                    let k: usize = match k.parse() {
                        Ok(k) if k > 0 => k,
                        _ => return Err(err(k_col, ParseErrorKind::BadK(k.to_owned()))),
                    };
                    if p.relation(name).is_some() {
                        return Err(err(name_col, ParseErrorKind::DuplicateRelation(name.to_owned())));
                    }
                    p.relations.push(Relation { name: name.to_owned(), k });
                }
                "class" => {
                    if args.is_empty() {
                        return Err(err(end_col, ParseErrorKind::Missing("terms")));
                    }
                    p.classes.push(Located { line, item: names(args) });
                }
                "eq" => {
                    if args.len() != 2 {
                        let c = args.get(2).map_or(end_col, |a| a.0);
                        return Err(err(c, ParseErrorKind::EqArity(args.len())));
                    }
                    p.statements.push(Located {
                        line,
                        item: Statement::Eq {
                            a: args[0].1.to_owned(),
                            b: args[1].1.to_owned(),
                        },
                    });
                }
                "hyp" | "query" => {
                    let &(rel_col, rel_name) = args.first().ok_or(err(end_col, ParseErrorKind::Missing("relation name")))?;
                    let rel = p
                        .relation(rel_name)
                        .ok_or(err(rel_col, ParseErrorKind::UnknownRelation(rel_name.to_owned())))?;
                    let terms = names(&args[1..]);
                    let item = if directive == "hyp" {
                        let expected = p.relations[rel].k + 1;
                        if terms.len() != expected {
                            let c = args.get(expected + 1).map_or(end_col, |a| a.0);
                            return Err(err(
                                c,
                                ParseErrorKind::Arity {
                                    rel: rel_name.to_owned(),
                                    expected,
                                    got: terms.len(),
                                },
                            ));
                        }
                        Statement::Hyp { rel, terms }
                    } else {
                        if terms.is_empty() {
                            return Err(err(end_col, ParseErrorKind::Missing("query terms")));
                        }
                        Statement::Query { rel, terms }
                    };
                    p.statements.push(Located { line, item });
                }
                other => return Err(err(col, ParseErrorKind::UnknownDirective(other.to_owned()))),
            }
        }
        Ok(p)
    }

    pub fn relation(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    /// Every term name in order of first appearance.
    pub fn term_names(&self) -> Vec<&str> {
        let mut in_order: Vec<&str> = Vec::new();
        let mut class_iter = self.classes.iter().peekable();
        for s in &self.statements {
            while let Some(c) = class_iter.next_if(|c| c.line < s.line) {
                in_order.extend(c.item.iter().map(String::as_str));
            }
            match &s.item {
                Statement::Hyp { terms, .. } | Statement::Query { terms, .. } => {
                    in_order.extend(terms.iter().map(String::as_str))
                }
                Statement::Eq { a, b } => in_order.extend([a.as_str(), b.as_str()]),
            }
        }
        class_iter.for_each(|c| in_order.extend(c.item.iter().map(String::as_str)));
        let mut seen = std::collections::HashSet::new();
        in_order.retain(|t| seen.insert(*t));
        in_order
    }

    pub fn queries(&self) -> impl Iterator<Item = &Located<Statement>> {
        self.statements
            .iter()
            .filter(|s| matches!(s.item, Statement::Query { .. }))
    }

    /// Writes the problem back in file syntax.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            out.push_str(&format!("rel {} {}\n", r.name, r.k));
        }
        for c in &self.classes {
            out.push_str(&format!("class {}\n", c.item.join(" ")));
        }
        for s in &self.statements {
            let line = match &s.item {
                Statement::Hyp { rel, terms } => format!("hyp {} {}", self.relations[*rel].name, terms.join(" ")),
                Statement::Eq { a, b } => format!("eq {a} {b}"),
                Statement::Query { rel, terms } => {
                    format!("query {} {}", self.relations[*rel].name, terms.join(" "))
                }
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}
