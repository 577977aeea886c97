//! Chunked Monte Carlo with counter-based random streams.
//!
//! Work is split into fixed-size chunks. Chunk `i` draws from the ChaCha
//! stream `i` of the caller's seed, and chunk results are merged in index
//! order, so estimates are bit-identical for any executor.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::real::Real;

/// Samples per chunk.
pub const CHUNK: u64 = 1 << 14;

pub type Stream = ChaCha8Rng;

/// Random stream for one chunk of one experiment.
pub fn stream(seed: u64, chunk: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs independent chunk jobs, possibly in parallel.
///
/// Implementations must return results in chunk order.
pub trait Executor: Sync {
    fn map_chunks<T, F>(&self, chunks: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send;
}

/// Runs every chunk on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map_chunks<T, F>(&self, chunks: u64, job: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        (0..chunks).map(job).collect()
    }
}

/// Running mean and second central moment (Chan et al. merge).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Number of chunks and the size of chunk `i` for `n` samples.
pub fn chunk_plan(n: u64) -> (u64, impl Fn(u64) -> u64) {
    let chunks = n.div_ceil(CHUNK);
    (chunks, move |i: u64| {
        if i + 1 < chunks {
            CHUNK
        } else {
            n - CHUNK * (chunks - 1)
        }
    })
}

/// Averages `n` draws of `sample` with per-chunk streams of `seed`.
///
/// `sample` receives the chunk's stream and must produce one observation.
pub fn estimate_mean<E, F>(exec: &E, n: u64, seed: u64, sample: F) -> Result<Moments>
where
    E: Executor,
    F: Fn(&mut Stream) -> Result<f64> + Sync + Send,
{
    let (chunks, size) = chunk_plan(n);
    let parts = exec.map_chunks(chunks, |i| -> Result<Moments> {
        let mut rng = stream(seed, i);
        let mut m = Moments::default();
        for _ in 0..size(i) {
            m.push(sample(&mut rng)?);
        }
        Ok(m)
    });
    let mut total = Moments::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

/// Several observables per draw, averaged jointly.
pub fn estimate_means<E, F, const K: usize>(
    exec: &E,
    n: u64,
    seed: u64,
    sample: F,
) -> Result<[Moments; K]>
where
    E: Executor,
    F: Fn(&mut Stream) -> Result<[f64; K]> + Sync + Send,
{
    let (chunks, size) = chunk_plan(n);
    let parts = exec.map_chunks(chunks, |i| -> Result<[Moments; K]> {
        let mut rng = stream(seed, i);
        let mut m = [Moments::default(); K];
        for _ in 0..size(i) {
            let x = sample(&mut rng)?;
            for k in 0..K {
                m[k].push(x[k]);
            }
        }
        Ok(m)
    });
    let mut total = [Moments::default(); K];
    for p in parts {
        let p = p?;
        for k in 0..K {
            total[k].merge(&p[k]);
        }
    }
    Ok(total)
}
