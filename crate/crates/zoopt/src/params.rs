//! Flat parameter storage with a named layer partition.
//!
//! Every optimizer in this crate works on a single contiguous `f64` buffer.
//! The [`LayerPartition`] carries the per-layer index ranges that the
//! seed-replay machinery iterates over, so that transient buffers never need
//! to grow past the largest layer.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("layer `{0}` has zero length")]
    EmptyLayer(String),
    #[error("partition covers {partition} scalars but buffer holds {buffer}")]
    LengthMismatch { partition: usize, buffer: usize },
    #[error("parameter {index} is not finite")]
    NonFinite { index: usize },
    #[error("partition has no layers")]
    NoLayers,
}

/// One contiguous span of the parameter buffer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSpan {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

/// Ordered, contiguous, non-overlapping cover of `0..dim`.
///
/// Offsets are derived from the layer lengths at construction time, so the
/// contiguity invariant holds by construction; only `len >= 1` needs a check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerPartition {
    spans: Vec<LayerSpan>,
    total: usize,
}

impl LayerPartition {
    pub fn new<S: Into<String>>(layers: Vec<(S, usize)>) -> Result<Self, ParamError> {
        if layers.is_empty() {
            return Err(ParamError::NoLayers);
        }
        let mut spans = Vec::with_capacity(layers.len());
        let mut offset = 0usize;
        for (name, len) in layers {
            let name = name.into();
            if len == 0 {
                return Err(ParamError::EmptyLayer(name));
            }
            spans.push(LayerSpan { name, offset, len });
            offset += len;
        }
        Ok(Self { spans, total: offset })
    }

    /// Partition with a single layer spanning the whole buffer.
    pub fn single(name: &str, dim: usize) -> Result<Self, ParamError> {
        Self::new(vec![(name, dim)])
    }

    /// Split `dim` into `n` near-equal chunks named `prefix.0`, `prefix.1`, ...
    pub fn even_chunks(prefix: &str, dim: usize, n: usize) -> Result<Self, ParamError> {
        if n == 0 || dim < n {
            return Err(ParamError::NoLayers);
        }
        let base = dim / n;
        let extra = dim % n;
        let layers = (0..n)
            .map(|i| (format!("{prefix}.{i}"), base + usize::from(i < extra)))
            .collect();
        Self::new(layers)
    }

    pub fn dim(&self) -> usize {
        self.total
    }

    pub fn num_layers(&self) -> usize {
        self.spans.len()
    }

    pub fn spans(&self) -> &[LayerSpan] {
        &self.spans
    }

    pub fn span(&self, layer: usize) -> &LayerSpan {
        &self.spans[layer]
    }

    pub fn max_layer_len(&self) -> usize {
        self.spans.iter().map(|s| s.len).max().unwrap_or(0)
    }

    /// Index of the layer containing flat coordinate `i`.
    pub fn layer_of(&self, i: usize) -> Option<usize> {
        self.spans
            .iter()
            .position(|s| i >= s.offset && i < s.offset + s.len)
    }
}

/// Precision the parameters would be stored at in a real deployment.
///
/// Arithmetic in this crate is always `f64`; the tag only feeds the memory
/// cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionTag {
    #[default]
    Full,
    Half,
}

/// The optimization variable: a flat buffer plus its layer partition.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    data: Vec<f64>,
    partition: LayerPartition,
    pub precision: PrecisionTag,
}

impl ParamVector {
    pub fn new(data: Vec<f64>, partition: LayerPartition) -> Result<Self, ParamError> {
        if partition.dim() != data.len() {
            return Err(ParamError::LengthMismatch {
                partition: partition.dim(),
                buffer: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(ParamError::NonFinite { index });
        }
        Ok(Self {
            data,
            partition,
            precision: PrecisionTag::Full,
        })
    }

    pub fn zeros(partition: LayerPartition) -> Self {
        let data = vec![0.0; partition.dim()];
        Self {
            data,
            partition,
            precision: PrecisionTag::Full,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn partition(&self) -> &LayerPartition {
        &self.partition
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        let s = self.partition.span(layer);
        &self.data[s.offset..s.offset + s.len]
    }

    pub fn layer_mut(&mut self, layer: usize) -> &mut [f64] {
        let s = self.partition.span(layer);
        &mut self.data[s.offset..s.offset + s.len]
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
