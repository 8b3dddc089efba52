use std::collections::BTreeSet;

use kequiv::congruence::Congruence;
use kequiv::oracle::{self, MAX_UNIVERSE};
use kequiv::syntax::parse_proof;
use kequiv::{check as check_proof, DistinctnessPartition, RelationId, TermId, TermSet, Verdict};

use crate::problem::{Problem, Statement};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Kset,
    Naive,
}

/// Interns every term, installs the classes and declares the relations.
fn setup(problem: &Problem) -> Result<Congruence, CliError> {
    let mut cc = Congruence::new();
    for r in &problem.relations {
        cc.add_relation(&r.name, r.k).map_err(CliError::guard)?;
    }
    for t in problem.term_names() {
        cc.intern(t);
    }
    for c in &problem.classes {
        let ids: Vec<TermId> = c.item.iter().map(|t| cc.intern(t)).collect();
        cc.declare_class(&ids)
            .map_err(|e| CliError::Guard(format!("line {}: {e}", c.line)))?;
    }
    Ok(cc)
}

fn ids(cc: &Congruence, terms: &[String]) -> Vec<TermId> {
    terms.iter().map(|t| cc.lookup(t).expect("interned during setup")).collect()
}

/// Replays the statements in order, calling `on_query` with the state
/// reached at each query.
fn replay(
    problem: &Problem,
    mut on_query: impl FnMut(&Congruence, RelationId, &[TermId], usize) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut cc = setup(problem)?;
    let rel_ids: Vec<_> = problem
        .relations
        .iter()
        .map(|r| cc.relation(&r.name).expect("declared during setup"))
        .collect();
    for s in &problem.statements {
        let at = |e: kequiv::CongruenceError| CliError::Guard(format!("line {}: {e}", s.line));
        match &s.item {
            Statement::Hyp { rel, terms } => {
                let xs = ids(&cc, terms);
                cc.assert_atom(rel_ids[*rel], &xs).map_err(at)?;
            }
            Statement::Eq { a, b } => {
                let (x, y) = (cc.lookup(a).unwrap(), cc.lookup(b).unwrap());
                cc.assert_eq(x, y).map_err(|e| match e {
                    kequiv::CongruenceError::Inconsistent(..) => CliError::Guard(format!(
                        "line {}: `{a}` and `{b}` are in different distinctness classes",
                        s.line
                    )),
                    e => at(e),
                })?;
            }
            Statement::Query { rel, terms } => {
                let xs = ids(&cc, terms);
                on_query(&cc, rel_ids[*rel], &xs, s.line)?;
            }
        }
    }
    Ok(())
}

/// One output line per query, in file order.
pub fn solve(problem: &Problem, engine: Engine) -> Result<Vec<String>, CliError> {
    match engine {
        Engine::Kset => solve_kset(problem),
        Engine::Naive => solve_naive(problem),
    }
}

fn solve_kset(problem: &Problem) -> Result<Vec<String>, CliError> {
    let mut out = Vec::new();
    replay(problem, |cc, rel, xs, line| {
        let v = cc
            .query(rel, xs)
            .map_err(|e| CliError::Guard(format!("line {line}: {e}")))?;
        out.push(match v {
            Verdict::Entailed(p) => format!("entailed {}", p.render(cc.interner())),
            Verdict::NotEntailed => "not-entailed".to_owned(),
        });
        Ok(())
    })?;
    Ok(out)
}

fn solve_naive(problem: &Problem) -> Result<Vec<String>, CliError> {
    if let Some(s) = problem.statements.iter().find(|s| matches!(s.item, Statement::Eq { .. })) {
        return Err(CliError::Guard(format!(
            "line {}: the naive engine does not support `eq`",
            s.line
        )));
    }
    let names = problem.term_names();
    if names.len() > MAX_UNIVERSE {
        return Err(CliError::Guard(format!(
            "the naive engine handles at most {MAX_UNIVERSE} terms, found {}",
            names.len()
        )));
    }
    let id = |t: &str| TermId(names.iter().position(|n| *n == t).unwrap() as u32);
    let universe: BTreeSet<TermId> = (0..names.len() as u32).map(TermId).collect();
    let groups: Vec<Vec<TermId>> = problem
        .classes
        .iter()
        .map(|c| c.item.iter().map(|t| id(t)).collect())
        .collect();
    let partition = DistinctnessPartition::from_groups(groups.iter().map(|g| g.as_slice()));
    let mut hyps: Vec<Vec<Vec<TermId>>> = vec![Vec::new(); problem.relations.len()];
    let mut out = Vec::new();
    for s in &problem.statements {
        match &s.item {
            Statement::Hyp { rel, terms } => hyps[*rel].push(terms.iter().map(|t| id(t)).collect()),
            Statement::Query { rel, terms } => {
                let q: Vec<TermId> = terms.iter().map(|t| id(t)).collect();
                let k = problem.relations[*rel].k;
                let yes = oracle::oracle_entailed(k, &hyps[*rel], &q, &universe, &partition)
                    .map_err(|e| CliError::Guard(format!("line {}: {e}", s.line)))?;
                out.push(if yes { "entailed" } else { "not-entailed" }.to_owned());
            }
            Statement::Eq { .. } => unreachable!("rejected above"),
        }
    }
    Ok(out)
}

/// Outcome of checking one answer line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineCheck {
    Pass,
    Skipped,
    Fail(String),
}

/// Checks a solve transcript against the problem. The transcript must
/// have one line per query.
pub fn check(problem: &Problem, answers: &str) -> Result<Vec<LineCheck>, CliError> {
    let lines: Vec<&str> = answers.lines().collect();
    let n_queries = problem.queries().count();
    if lines.len() != n_queries {
        return Err(CliError::Check(format!(
            "{} answer lines for {n_queries} queries",
            lines.len()
        )));
    }
    let mut out = Vec::new();
    let mut next = 0;
    replay(problem, |cc, rel, xs, query_line| {
        let (n, answer) = (next + 1, lines[next].trim());
        next += 1;
        out.push(check_line(cc, rel, xs, answer).map_or_else(
            |msg| LineCheck::Fail(format!("answer line {n} (query on line {query_line}): {msg}")),
            |checked| if checked { LineCheck::Pass } else { LineCheck::Skipped },
        ));
        Ok(())
    })?;
    Ok(out)
}

/// `Ok(false)` for a `not-entailed` answer, which carries nothing to check.
fn check_line(
    cc: &Congruence,
    rel: RelationId,
    query: &[TermId],
    answer: &str,
) -> Result<bool, String> {
    if answer == "not-entailed" {
        return Ok(false);
    }
    let Some(rest) = answer.strip_prefix("entailed") else {
        return Err(format!("expected `entailed` or `not-entailed`, found `{answer}`"));
    };
    let src = rest.trim_start();
    if src.is_empty() {
        return Err("no proof to check".to_owned());
    }
    let offset = answer.len() - src.len();
    let proof = parse_proof(src, |n| cc.lookup(n)).map_err(|e| e.shifted(offset).to_string())?;
    let j = check_proof(&proof, &cc.check_context(rel)).map_err(|e| e.to_string())?;
    let canon = |s: &mut dyn Iterator<Item = TermId>| s.map(|t| cc.find(t)).collect::<TermSet>();
    let proved = canon(&mut j.terms.iter());
    let wanted = canon(&mut query.iter().copied());
    if proved != wanted {
        let names = |s: &TermSet| {
            s.iter()
                .map(|t| cc.interner().name(t).unwrap_or("?").to_owned())
                .collect::<Vec<_>>()
                .join(" ")
        };
        return Err(format!("proof concludes {{{}}}, query is {{{}}}", names(&proved), names(&wanted)));
    }
    Ok(true)
}
