//! Execution policy for the data-parallel stages.
//!
//! Per-grid-point work (stage-one level inversions, transport tabulation)
//! fans out through [`map_indexed`]. Results are always collected in index
//! order and each item is computed sequentially, so both policies produce
//! bit-identical output.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecPolicy {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; otherwise
    /// identical to [`ExecPolicy::Sequential`].
    #[default]
    Parallel,
}

/// Evaluate `f(0..n)` and collect in order.
pub fn map_indexed<T, F>(policy: ExecPolicy, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match policy {
        #[cfg(feature = "parallel")]
        ExecPolicy::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Fallible variant of [`map_indexed`]; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(policy: ExecPolicy, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(policy, n, f).into_iter().collect()
}

/// Whether the parallel backend is compiled in.
pub const fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

/// Size the global worker pool. Returns `false` if the pool was already
/// initialised or the parallel backend is not compiled in.
pub fn configure_threads(n: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        false
    }
}
