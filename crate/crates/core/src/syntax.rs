//! Reader for the parenthesized proof syntax produced by
//! [`ProofTerm::render`](crate::proof::ProofTerm::render).

use thiserror::Error;

use crate::proof::ProofTerm;
use crate::term::{TermId, TermSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofSyntaxError {
    #[error("column {col}: unexpected end of input")]
    UnexpectedEnd { col: usize },
    #[error("column {col}: expected `(`")]
    ExpectedOpen { col: usize },
    #[error("column {col}: expected `)`")]
    ExpectedClose { col: usize },
    #[error("column {col}: unknown proof constructor `{name}`")]
    UnknownConstructor { col: usize, name: String },
    #[error("column {col}: expected an index, found `{found}`")]
    BadIndex { col: usize, found: String },
    #[error("column {col}: unknown term `{name}`")]
    UnknownTerm { col: usize, name: String },
    #[error("column {col}: trailing input")]
    Trailing { col: usize },
}

impl ProofSyntaxError {
    pub fn col(&self) -> usize {
        match self {
            Self::UnexpectedEnd { col }
            | Self::ExpectedOpen { col }
            | Self::ExpectedClose { col }
            | Self::UnknownConstructor { col, .. }
            | Self::BadIndex { col, .. }
            | Self::UnknownTerm { col, .. }
            | Self::Trailing { col } => *col,
        }
    }

    /// The same error with its column moved right by `by`, for proofs
    /// embedded in a longer line.
    pub fn shifted(mut self, by: usize) -> Self {
        match &mut self {
            Self::UnexpectedEnd { col }
            | Self::ExpectedOpen { col }
            | Self::ExpectedClose { col }
            | Self::UnknownConstructor { col, .. }
            | Self::BadIndex { col, .. }
            | Self::UnknownTerm { col, .. }
            | Self::Trailing { col } => *col += by,
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

struct Reader<'a, F> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end_col: usize,
    lookup: F,
}

fn tokenize(src: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in src.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, Token::Atom(&src[s..i])));
            }
            if c == '(' {
                out.push((i + 1, Token::Open));
            } else if c == ')' {
                out.push((i + 1, Token::Close));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, Token::Atom(&src[s..])));
    }
    out
}

impl<'a, F: Fn(&str) -> Option<TermId>> Reader<'a, F> {
    fn peek(&self) -> Option<&(usize, Token<'a>)> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Result<(usize, Token<'a>), ProofSyntaxError> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or(ProofSyntaxError::UnexpectedEnd { col: self.end_col })?;
        self.pos += 1;
        Ok(tok)
    }

    fn atom(&mut self) -> Result<(usize, &'a str), ProofSyntaxError> {
        match self.next()? {
            (col, Token::Atom(a)) => Ok((col, a)),
            (col, _) => Err(ProofSyntaxError::UnexpectedEnd { col }),
        }
    }

    fn index(&mut self) -> Result<usize, ProofSyntaxError> {
        let (col, a) = self.atom()?;
        a.parse().map_err(|_| ProofSyntaxError::BadIndex {
            col,
            found: a.to_owned(),
        })
    }

    fn term(&mut self) -> Result<TermId, ProofSyntaxError> {
        let (col, a) = self.atom()?;
        (self.lookup)(a).ok_or_else(|| ProofSyntaxError::UnknownTerm {
            col,
            name: a.to_owned(),
        })
    }

    fn terms_until_close(&mut self) -> Result<TermSet, ProofSyntaxError> {
        let mut out = Vec::new();
        while let Some((_, Token::Atom(_))) = self.peek() {
            out.push(self.term()?);
        }
        Ok(out.into_iter().collect())
    }

    fn close(&mut self) -> Result<(), ProofSyntaxError> {
        match self.next()? {
            (_, Token::Close) => Ok(()),
            (col, _) => Err(ProofSyntaxError::ExpectedClose { col }),
        }
    }

    fn proof(&mut self) -> Result<ProofTerm, ProofSyntaxError> {
        match self.next()? {
            (_, Token::Open) => {}
            (col, _) => return Err(ProofSyntaxError::ExpectedOpen { col }),
        }
        let (col, head) = self.atom()?;
        let p = match head {
            "assume" => ProofTerm::Assume(self.index()?),
            "subrefl" => ProofTerm::SubRefl(self.terms_until_close()?),
            "trans" => {
                let l = self.proof()?;
                let r = self.proof()?;
                ProofTerm::trans(l, r)
            }
            "project" => {
                let p = self.proof()?;
                ProofTerm::project(p, self.terms_until_close()?)
            }
            "subst" => {
                let p = self.proof()?;
                let from = self.term()?;
                let to = self.term()?;
                let eq = self.index()?;
                ProofTerm::subst(p, from, to, eq)
            }
            other => {
                return Err(ProofSyntaxError::UnknownConstructor {
                    col,
                    name: other.to_owned(),
                })
            }
        };
        self.close()?;
        Ok(p)
    }
}

/// Parses one proof, resolving term names with `lookup`.
pub fn parse_proof<F>(src: &str, lookup: F) -> Result<ProofTerm, ProofSyntaxError>
where
    F: Fn(&str) -> Option<TermId>,
{
    let mut r = Reader {
        tokens: tokenize(src),
        pos: 0,
        end_col: src.len() + 1,
        lookup,
    };
    let p = r.proof()?;
    if let Some(&(col, _)) = r.peek() {
        return Err(ProofSyntaxError::Trailing { col });
    }
    Ok(p)
}
