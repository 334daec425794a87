//! Parallel cell evaluation for the adaptive quadrature.

use rayon::prelude::*;
use subriemann_core::quadrature::{CellEstimate, Executor};
use subriemann_core::Result;

/// Evaluates cells on the rayon pool. Results come back in task order, so
/// the integrator's accumulation order, and hence every sum, is the same as
/// with a sequential executor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl Executor for Rayon {
    fn map(&self, tasks: usize, f: &(dyn Fn(usize) -> Result<CellEstimate> + Sync)) -> Vec<Result<CellEstimate>> {
        (0..tasks).into_par_iter().map(f).collect()
    }
}
