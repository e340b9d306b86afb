use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use supportshape_core::constraints::CoefficientPattern;

use crate::problem::NlpProblem;
use crate::report::{SolveOptions, SolveReport, Status};
use crate::{solve, SolveError};

#[derive(Debug, Clone)]
pub struct StartOutcome {
    pub start: usize,
    pub seed: u64,
    pub result: Result<SolveReport, SolveError>,
}

/// Seed of start `i` in a batch seeded with `seed`.
pub fn start_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

/// Random full start: fixed entries from the pattern, free entries uniform in
/// `[-amplitude, amplitude] · w / (1 + l)²` with `l` the index degree.
pub fn random_start(
    pattern: &CoefficientPattern,
    degree_of: impl Fn(usize) -> usize,
    w: f64,
    amplitude: f64,
    rng: &mut impl Rng,
) -> Vec<f64> {
    let reduced: Vec<f64> = pattern
        .free
        .iter()
        .map(|&i| {
            let l = degree_of(i) as f64;
            amplitude * w * rng.random_range(-1.0..=1.0) / ((1.0 + l) * (1.0 + l))
        })
        .collect();
    pattern.expand(&reduced).expect("matching length")
}

/// Solves `n_starts` problems built from independently seeded generators.
/// Failures stay in the list; results are ordered by value, then seed.
pub fn multistart<F>(factory: F, n_starts: usize, seed: u64, opts: &SolveOptions) -> Vec<StartOutcome>
where
    F: Fn(&mut ChaCha8Rng) -> Result<NlpProblem, SolveError> + Sync,
{
    let mut out: Vec<StartOutcome> = (0..n_starts.max(1))
        .into_par_iter()
        .map(|i| {
            let s = start_seed(seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let result = factory(&mut rng).and_then(|p| solve(&p, &SolveOptions { seed: s, ..opts.clone() }));
            StartOutcome { start: i, seed: s, result }
        })
        .collect();
    out.sort_by(|a, b| {
        let key = |o: &StartOutcome| o.result.as_ref().map_or(f64::INFINITY, |r| if r.value.is_nan() { f64::INFINITY } else { r.value });
        key(a).total_cmp(&key(b)).then(a.seed.cmp(&b.seed))
    });
    out
}

/// Best converged report of a batch, falling back to the best report of any
/// status when no start converged.
pub fn best(outcomes: &[StartOutcome]) -> Option<&SolveReport> {
    let ok = || outcomes.iter().filter_map(|o| o.result.as_ref().ok());
    ok().find(|r| r.status == Status::Converged).or_else(|| ok().next())
}
