//! The evaluation-oracle contract shared by every optimizer.

use crate::params::{LayerPartition, ParamVector};
use crate::rng::BatchKey;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("objective does not support {0}")]
    CapabilityMissing(&'static str),
    #[error("direction length {dir} does not match dimension {dim}")]
    DimensionMismatch { dir: usize, dim: usize },
    #[error("layer split {k} exceeds layer count {layers}")]
    BadLayerSplit { k: usize, layers: usize },
}

/// Which optional oracles an objective provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Capabilities {
    pub grad: bool,
    pub jvp: bool,
    pub partial_grad: bool,
}

/// A deterministic loss oracle over a flat parameter buffer.
///
/// `eval` must be pure: the same `(params, batch)` pair always returns the
/// same value, which is what makes seed-replay trajectories reproducible.
/// Implementations must be reentrant; concurrent evaluations on distinct
/// parameter buffers are allowed.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn partition(&self) -> &LayerPartition;

    /// Loss at `params` on the mini-batch selected by `batch`.
    fn eval(&self, params: &[f64], batch: BatchKey) -> f64;

    fn capabilities(&self) -> Capabilities {
        Capabilities::default()
    }

    /// Exact gradient of `eval` at fixed batch.
    fn grad(&self, _params: &[f64], _batch: BatchKey) -> Result<Vec<f64>, ObjectiveError> {
        Err(ObjectiveError::CapabilityMissing("grad"))
    }

    /// Directional derivative `dirᵀ ∇f`, computed by a forward pass.
    fn jvp(&self, _params: &[f64], _dir: &[f64], _batch: BatchKey) -> Result<f64, ObjectiveError> {
        Err(ObjectiveError::CapabilityMissing("jvp"))
    }

    /// Exact gradient restricted to layers `k..num_layers`, computed without
    /// touching the gradients of layers `< k`. The returned buffer is aligned
    /// to the offset of layer `k` (length `dim - offset(k)`).
    fn partial_grad_from_layer(
        &self,
        _k: usize,
        _params: &[f64],
        _batch: BatchKey,
    ) -> Result<Vec<f64>, ObjectiveError> {
        Err(ObjectiveError::CapabilityMissing("partial_grad_from_layer"))
    }

    /// True when `eval` ignores the batch key (full-batch or analytic
    /// objectives). Lets drivers reuse loss values across steps.
    fn batch_invariant(&self) -> bool {
        false
    }

    /// Held-out evaluation metric (e.g. test accuracy), if the task has one.
    fn test_metric(&self, _params: &[f64]) -> Option<f64> {
        None
    }

    fn metric_higher_is_better(&self) -> bool {
        true
    }

    /// Deterministic initial parameter vector for this task.
    fn init_params(&self, seed: u64) -> ParamVector;
}
