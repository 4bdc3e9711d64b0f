//! Benchmark fixtures: deterministic states for the exact kernels.

use pdtoda_core::random::{random_state, rng_from_seed};
use pdtoda_core::TodaState;

pub fn fixture(n: usize, m: usize, seed: u64) -> TodaState {
    random_state(n, m, &mut rng_from_seed(seed)).expect("fixture state")
}
