//! Fixtures shared by the criterion benches.

use hnd_core::{generate, HyperFFParams, Hypernetwork, ModelParams, Readout};

/// Forest-fire hypernetwork of `n` nodes with the timing defaults.
pub fn fixture(n: usize) -> Hypernetwork {
    generate(&HyperFFParams::new(n, 0.25, 0.25, n as u64)).expect("valid generator parameters")
}

/// Untrained model of the default shape.
pub fn model() -> ModelParams {
    ModelParams::init(4, 32, Readout::Identity, 0)
}
