use rayon::prelude::*;
use semifl_core::protocol::Executor;

/// Runs per-device jobs on the global rayon pool. Results come back in input
/// order, so a parallel round is bit-identical to a sequential one.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        items.par_iter().map(f).collect()
    }
}
