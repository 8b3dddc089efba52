//! Timing runs over synthetic workloads, reported as CSV.

use std::collections::BTreeSet;
use std::time::Instant;

use kequiv::oracle::{self, MAX_UNIVERSE};
use kequiv::{Session, TermId};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::solve::Engine;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workload {
    /// `n` overlapping windows along one line of `n + k` points.
    Line,
    /// `n` atoms of distinct terms drawn from `n + k` points.
    Random,
}

pub const HEADER: &str = "engine,k,n_hyps,n_terms,seed,wall_time,merges,max_kset,find_merges_calls";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub engine: Engine,
    pub k: usize,
    pub n_hyps: usize,
    pub n_terms: usize,
    pub seed: u64,
    /// Seconds.
    pub wall_time: f64,
    /// Counters from the k-set engine; the naive engine has none.
    pub counters: Option<(usize, usize, usize)>,
}

impl Row {
    pub fn to_csv(&self) -> String {
        let engine = match self.engine {
            Engine::Kset => "kset",
            Engine::Naive => "naive",
        };
        let counters = match self.counters {
            Some((m, s, f)) => format!("{m},{s},{f}"),
            None => ",,".to_owned(),
        };
        format!(
            "{engine},{},{},{},{},{:.6},{counters}",
            self.k, self.n_hyps, self.n_terms, self.seed, self.wall_time
        )
    }
}

pub fn workload(w: Workload, k: usize, n: usize, seed: u64) -> Vec<Vec<TermId>> {
    let points = n + k;
    match w {
        Workload::Line => (0..n)
            .map(|i| (i..i + k + 1).map(|t| TermId(t as u32)).collect())
            .collect(),
        Workload::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pool: Vec<TermId> = (0..points as u32).map(TermId).collect();
            (0..n)
                .map(|_| pool.choose_multiple(&mut rng, k + 1).copied().collect())
                .collect()
        }
    }
}

/// Times one engine on one workload: assert everything, then answer the
/// query spanning the first, middle and last points.
pub fn run(engine: Engine, w: Workload, k: usize, n: usize, seed: u64) -> Result<Row, CliError> {
    if k == 0 || n == 0 {
        return Err(CliError::Usage("bench needs k > 0 and n > 0".into()));
    }
    let hyps = workload(w, k, n, seed);
    let points = n + k;
    let query: Vec<TermId> = (0..=k).map(|i| TermId((i * (points - 1) / k) as u32)).collect();
    let row = |wall_time, counters| Row {
        engine,
        k,
        n_hyps: n,
        n_terms: points,
        seed,
        wall_time,
        counters,
    };
    match engine {
        Engine::Kset => {
            let start = Instant::now();
            let mut s = Session::new(k).map_err(CliError::guard)?;
            for t in 0..points {
                s.intern_term(&format!("p{t}"));
            }
            for h in &hyps {
                s.assert_hypothesis(h).map_err(CliError::guard)?;
            }
            let _ = s.resolve_query(&query).map_err(CliError::guard)?;
            let elapsed = start.elapsed().as_secs_f64();
            let c = s.stats();
            Ok(row(elapsed, Some((c.merges, c.max_kset_size, c.find_merges_calls))))
        }
        Engine::Naive => {
            if points > MAX_UNIVERSE {
                return Err(CliError::Guard(format!(
                    "the naive engine handles at most {MAX_UNIVERSE} terms, this workload has {points}"
                )));
            }
            let universe: BTreeSet<TermId> = (0..points as u32).map(TermId).collect();
            let start = Instant::now();
            let _ = oracle::oracle_entailed(k, &hyps, &query, &universe, &Default::default())
                .map_err(CliError::guard)?;
            Ok(row(start.elapsed().as_secs_f64(), None))
        }
    }
}
