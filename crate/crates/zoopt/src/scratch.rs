//! Transient-allocation accounting for the seed-replay paths.
//!
//! The whole point of storing seeds instead of perturbation vectors is that
//! the working set stays bounded by the largest layer. Every scratch buffer
//! the estimators and updates allocate goes through [`ScratchVec`], which
//! maintains thread-local byte counters that tests can assert against.

use std::cell::Cell;
use std::ops::{Deref, DerefMut};

thread_local! {
    static IN_USE: Cell<usize> = const { Cell::new(0) };
    static PEAK: Cell<usize> = const { Cell::new(0) };
}

/// Reset the peak counter to the currently outstanding amount.
pub fn reset_peak() {
    IN_USE.with(|c| PEAK.with(|p| p.set(c.get())));
}

/// High-water mark of scratch bytes since the last [`reset_peak`].
pub fn peak_bytes() -> usize {
    PEAK.with(|p| p.get())
}

/// Scratch bytes currently outstanding on this thread.
pub fn in_use_bytes() -> usize {
    IN_USE.with(|c| c.get())
}

fn register(bytes: usize) {
    IN_USE.with(|c| {
        let now = c.get() + bytes;
        c.set(now);
        PEAK.with(|p| {
            if now > p.get() {
                p.set(now);
            }
        });
    });
}

fn unregister(bytes: usize) {
    IN_USE.with(|c| c.set(c.get() - bytes));
}

/// A tracked `Vec<f64>` used for per-layer transient buffers.
#[derive(Debug)]
pub struct ScratchVec {
    buf: Vec<f64>,
}

impl ScratchVec {
    pub fn zeros(len: usize) -> Self {
        register(len * std::mem::size_of::<f64>());
        Self { buf: vec![0.0; len] }
    }
}

impl Deref for ScratchVec {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.buf
    }
}

impl DerefMut for ScratchVec {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.buf
    }
}

impl Drop for ScratchVec {
    fn drop(&mut self) {
        unregister(self.buf.len() * std::mem::size_of::<f64>());
    }
}

/// A tracked mask-bit buffer; accounted at one byte per coordinate.
#[derive(Debug)]
pub struct ScratchBits {
    buf: Vec<bool>,
}

impl ScratchBits {
    pub fn falses(len: usize) -> Self {
        register(len);
        Self { buf: vec![false; len] }
    }
}

impl Deref for ScratchBits {
    type Target = [bool];
    fn deref(&self) -> &[bool] {
        &self.buf
    }
}

impl DerefMut for ScratchBits {
    fn deref_mut(&mut self) -> &mut [bool] {
        &mut self.buf
    }
}

impl Drop for ScratchBits {
    fn drop(&mut self) {
        unregister(self.buf.len());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_tracks_nested_buffers() {
        reset_peak();
        let base = in_use_bytes();
        {
            let _a = ScratchVec::zeros(10);
            {
                let _b = ScratchVec::zeros(20);
                assert_eq!(in_use_bytes() - base, 30 * 8);
            }
            assert_eq!(in_use_bytes() - base, 10 * 8);
        }
        assert_eq!(in_use_bytes(), base);
        assert!(peak_bytes() >= base + 30 * 8);
    }

    #[test]
    fn reset_peak_clears_history() {
        {
            let _a = ScratchVec::zeros(100);
        }
        reset_peak();
        assert_eq!(peak_bytes(), in_use_bytes());
    }
}
