//! Rayon-backed path runner with the same results as the serial one.

use rayon::prelude::*;

use ultsup::{PathRunner, Result};

/// Runs paths on the global rayon pool. Per-path RNG streams depend only
/// on `(seed, path_index)` and aggregation happens on the index-ordered
/// sample vector, so the estimates are bit-identical to [`ultsup::SerialRunner`]
/// for any thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonRunner;

impl PathRunner for RayonRunner {
    fn map_paths(
        &self,
        n_paths: u64,
        sample: &(dyn Fn(u64) -> Result<f64> + Sync),
    ) -> Result<Vec<f64>> {
        (0..n_paths).into_par_iter().map(sample).collect()
    }
}

/// Honor the `ULTSUP_THREADS` override; any other thread-pool tuning is
/// left to rayon's defaults.
pub fn init_thread_pool() {
    if let Ok(v) = std::env::var("ULTSUP_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n > 0 {
                // fails only if a global pool already exists, which is fine
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ultsup::{simulate_reflected_stop, simulate_reflected_stop_with, LevyModel, SimConfig};

    #[test]
    fn parallel_equals_serial_bitwise() {
        let m = LevyModel::cramer_lundberg(0.5, 1.0, 1.0).unwrap();
        let cfg = SimConfig::new(5_000, 31415);
        let serial = simulate_reflected_stop(&m, 5.0, 0.0, 3.0, &cfg).unwrap();
        let parallel = simulate_reflected_stop_with(&RayonRunner, &m, 5.0, 0.0, 3.0, &cfg).unwrap();
        assert_eq!(serial.mean.to_bits(), parallel.mean.to_bits());
        assert_eq!(serial.std_error.to_bits(), parallel.std_error.to_bits());
    }
}
