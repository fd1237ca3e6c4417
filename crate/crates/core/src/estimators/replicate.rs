use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

/// Random stream handed to each replication.
pub type PathRng = ChaCha8Rng;

const MAX_REJECTIONS: u64 = 1000;

/// Stream for replication `index`: the ChaCha key comes from `seed`, the stream id is the index,
/// so every replication sees the same numbers no matter which worker runs it.
pub fn path_stream(seed: u64, index: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed of an auxiliary stream family (surface sampling, independent FD draws, ...).
pub fn derived_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Runs `f` once per replication on its own stream. A `SingularMatrix` error discards the draw
/// and retries on the same stream; the number of discarded draws is returned.
pub fn run_paths<T, F>(n_reps: usize, seed: u64, workers: usize, f: F) -> Result<(Vec<T>, u64)>
where
    T: Send,
    F: Fn(&mut PathRng) -> Result<T> + Sync + Send,
{
    let body = |i: usize| -> Result<(T, u64)> {
        let mut rng = path_stream(seed, i as u64);
        let mut rejected = 0;
        loop {
            match f(&mut rng) {
                Ok(v) => return Ok((v, rejected)),
                Err(Error::SingularMatrix { .. }) => {
                    rejected += 1;
                    if rejected >= MAX_REJECTIONS {
                        return Err(Error::TooManyRejections(rejected));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    };
    let results: Vec<(T, u64)> = if workers <= 1 {
        (0..n_reps).map(body).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
        pool.install(|| (0..n_reps).into_par_iter().map(body).collect::<Result<_>>())?
    };
    let rejected = results.iter().map(|r| r.1).sum();
    Ok((results.into_iter().map(|r| r.0).collect(), rejected))
}

/// Sample mean and standard error of the mean, accumulated in replication order.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Result of `replicate`.
#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub mean: f64,
    pub std_error: f64,
    pub n_reps: usize,
    pub runtime_s: f64,
    pub rejected_samples: u64,
}

/// Mean and standard error of `path_fn` over `n_reps` replications.
pub fn replicate<F>(path_fn: F, n_reps: usize, seed: u64, workers: usize) -> Result<Replication>
where
    F: Fn(&mut PathRng) -> Result<f64> + Sync + Send,
{
    if n_reps < 2 {
        return Err(Error::InvalidParameter("n_reps must be at least 2".into()));
    }
    let start = Instant::now();
    let (values, rejected_samples) = run_paths(n_reps, seed, workers, path_fn)?;
    let (mean, std_error) = mean_and_se(&values);
    Ok(Replication { mean, std_error, n_reps, runtime_s: start.elapsed().as_secs_f64(), rejected_samples })
}
