//! Seeded random instances with planted lines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::problem::{Located, Problem, Relation, Statement};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub k: usize,
    pub terms: usize,
    pub lines: usize,
    pub seed: u64,
    pub partition_rate: f64,
    pub queries: usize,
    /// Probability of keeping each sliding-window hypothesis on a line.
    pub coverage: f64,
}

impl GenParams {
    pub fn new(k: usize, terms: usize, lines: usize, seed: u64) -> Self {
        Self {
            k,
            terms,
            lines,
            seed,
            partition_rate: 0.0,
            queries: 10,
            coverage: 1.0,
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.k == 0 {
            return bad("--k must be positive".into());
        }
        if self.lines == 0 {
            return bad("--lines must be positive".into());
        }
        if self.terms < self.lines * (self.k + 1) {
            return bad(format!(
                "{} lines of at least {} points need {} terms, got {}",
                self.lines,
                self.k + 1,
                self.lines * (self.k + 1),
                self.terms
            ));
        }
        if !(0.0..=1.0).contains(&self.partition_rate) {
            return bad("--partition-rate must lie in [0, 1]".into());
        }
        if !(self.coverage > 0.0 && self.coverage <= 1.0) {
            return bad("--coverage must lie in (0, 1]".into());
        }
        Ok(())
    }
}

/// Conventional relation names for the common arities.
pub fn relation_name(k: usize) -> String {
    match k {
        1 => "equiv".into(),
        2 => "coll".into(),
        3 => "cycl".into(),
        _ => format!("r{k}"),
    }
}

/// Splits the shuffled terms into `lines` chunks, asserts sliding windows
/// of `k + 1` consecutive points on each, and asks queries half inside a
/// single line and half straddling two.
fn build(p: &GenParams) -> Result<Problem, CliError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let k = p.k;
    let name = |i: usize| format!("p{i}");

    let mut order: Vec<usize> = (0..p.terms).collect();
    order.shuffle(&mut rng);
    let base = p.terms / p.lines;
    let mut lines: Vec<Vec<usize>> = Vec::new();
    let mut rest = order.as_slice();
    for l in 0..p.lines {
        let size = base + usize::from(l < p.terms % p.lines);
        let (line, tail) = rest.split_at(size);
        lines.push(line.to_vec());
        rest = tail;
    }

    let mut hyps: Vec<Vec<usize>> = Vec::new();
    for line in &lines {
        for w in line.windows(k + 1) {
            if p.coverage >= 1.0 || rng.gen_bool(p.coverage) {
                hyps.push(w.to_vec());
            }
        }
    }
    hyps.shuffle(&mut rng);

    let mut group_of: Vec<usize> = (0..p.terms).collect();
    for i in 1..p.terms {
        if p.partition_rate > 0.0 && rng.gen_bool(p.partition_rate) {
            group_of[i] = group_of[rng.gen_range(0..i)];
        }
    }
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); p.terms];
    for (t, &g) in group_of.iter().enumerate() {
        classes[g].push(t);
    }

    let mut queries: Vec<Vec<usize>> = Vec::new();
    for q in 0..p.queries {
        let inside = q % 2 == 0 || p.lines < 2;
        let a = rng.gen_range(0..lines.len());
        let mut picked: Vec<usize> = if inside {
            lines[a].choose_multiple(&mut rng, k + 1).copied().collect()
        } else {
            let b = (a + rng.gen_range(1..lines.len())) % lines.len();
            let mut v: Vec<usize> = lines[a].choose_multiple(&mut rng, k).copied().collect();
            v.push(*lines[b].choose(&mut rng).expect("lines are nonempty"));
            v
        };
        picked.shuffle(&mut rng);
        queries.push(picked);
    }

    let names = |ts: &[usize]| ts.iter().map(|&t| name(t)).collect::<Vec<_>>();
    let mut problem = Problem {
        relations: vec![Relation {
            name: relation_name(k),
            k,
        }],
        ..Problem::default()
    };
    problem.classes = classes
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| Located { line: 0, item: names(c) })
        .collect();
    let hyp_lines = hyps.iter().map(|h| Statement::Hyp { rel: 0, terms: names(h) });
    let query_lines = queries.iter().map(|q| Statement::Query { rel: 0, terms: names(q) });
    problem.statements = hyp_lines
        .chain(query_lines)
        .map(|item| Located { line: 0, item })
        .collect();
    Ok(problem)
}

/// The generated problem as it reads back from its file.
pub fn generate(p: &GenParams) -> Result<Problem, CliError> {
    let text = generate_text(p)?;
    Ok(Problem::parse(&text).expect("generated files parse"))
}

pub fn generate_text(p: &GenParams) -> Result<String, CliError> {
    let problem = build(p)?;
    Ok(format!(
        "# k={} terms={} lines={} seed={} partition_rate={} coverage={}\n{}",
        p.k,
        p.terms,
        p.lines,
        p.seed,
        p.partition_rate,
        p.coverage,
        problem.render()
    ))
}
