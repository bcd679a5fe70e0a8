//! Parallel sample generation with order-fixed reduction, and the moment
//! tables built from it.

use gaussian_objects::MomentRow;
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Runs independent samples on a fixed number of workers. Results come
/// back in sample order, so any reduction over them is worker-count free.
pub struct Ensemble {
    pool: ThreadPool,
}

impl Ensemble {
    /// `workers = 0` uses every available core.
    pub fn new(workers: usize) -> Self {
        let pool = ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        Self { pool }
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn map<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(u64) -> R + Sync + Send,
    {
        self.pool
            .install(|| (0..n as u64).into_par_iter().map(&f).collect())
    }
}

impl Default for Ensemble {
    fn default() -> Self {
        Self::new(0)
    }
}

/// First 16 hex digits of the SHA-256 of the JSON of `params` and `seed`.
pub fn fingerprint<P: Serialize>(params: &P, seed: u64) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(params).expect("parameters serialize"));
    h.update(seed.to_le_bytes());
    h.finalize()[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Per-key second moments of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub kind: String,
    pub n_samples: usize,
    pub rows: Vec<MomentRow>,
    pub fingerprint: String,
}

impl EnsembleStats {
    /// `samples[s][i]` is sample `s` of the value at `keys[i]`; keys are
    /// `(mode k, block j)`.
    pub fn from_samples(
        kind: &str,
        keys: &[(Option<usize>, Option<i32>)],
        samples: &[Vec<f64>],
        fingerprint: String,
    ) -> Self {
        let mut column = Vec::with_capacity(samples.len());
        let rows = keys
            .iter()
            .enumerate()
            .map(|(i, &(k, j))| {
                column.clear();
                column.extend(samples.iter().map(|s| s[i]));
                MomentRow::from_samples(kind, k, j, &column)
            })
            .collect();
        Self {
            kind: kind.to_owned(),
            n_samples: samples.len(),
            rows,
            fingerprint,
        }
    }

    /// Mode-indexed table over `k = k_lo..=k_hi`.
    pub fn by_mode(
        kind: &str,
        k_lo: usize,
        k_hi: usize,
        samples: &[Vec<f64>],
        fingerprint: String,
    ) -> Self {
        let keys: Vec<_> = (k_lo..=k_hi).map(|k| (Some(k), None)).collect();
        Self::from_samples(kind, &keys, samples, fingerprint)
    }

    pub fn mode(&self, k: usize) -> Option<&MomentRow> {
        self.rows.iter().find(|r| r.k == Some(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_is_ordered_and_worker_free() {
        let f = |s: u64| (s * 2654435761) % 97;
        let a = Ensemble::new(1).map(50, f);
        let b = Ensemble::new(3).map(50, f);
        assert_eq!(a, b);
        assert_eq!(a[3], f(3));
    }

    #[test]
    fn fingerprint_separates_seeds() {
        let p = ("wick2", 0.6);
        assert_eq!(fingerprint(&p, 1), fingerprint(&p, 1));
        assert_ne!(fingerprint(&p, 1), fingerprint(&p, 2));
        assert_eq!(fingerprint(&p, 1).len(), 16);
    }

    #[test]
    fn stats_columns() {
        let samples = vec![vec![1.0, 10.0], vec![3.0, 10.0]];
        let st = EnsembleStats::by_mode("t", 4, 5, &samples, "f".into());
        assert_eq!(st.mode(4).unwrap().m2, 2.0);
        assert_eq!(st.mode(5).unwrap().stderr, 0.0);
        assert_eq!(st.n_samples, 2);
    }
}
