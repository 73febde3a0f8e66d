//! Histogram-difference scene cut detection.
//!
//! A hard cut replaces most of the luma distribution at once, while
//! continuous content moves only a small fraction of the histogram mass
//! between adjacent frames. The normalised L1 distance between adjacent
//! luma histograms is 0 for identical frames and 1 for disjoint supports;
//! a fixed threshold between those extremes separates cuts from motion.

use crate::error::{CodecError, Result};
use crate::frame::VideoFrame;

/// Counts of luma samples per 8-bit value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LumaHistogram {
    bins: [u64; 256],
    total: u64,
}

impl LumaHistogram {
    pub fn bin(&self, value: u8) -> u64 {
        self.bins[value as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Histogram of the frame's luma plane.
pub fn histogram256(frame: &VideoFrame) -> LumaHistogram {
    let mut bins = [0u64; 256];
    for &sample in &frame.plane_y {
        bins[sample as usize] += 1;
    }
    LumaHistogram {
        bins,
        total: frame.plane_y.len() as u64,
    }
}

/// Normalised L1 distance between two equal-total histograms, in [0, 1].
pub fn histogram_difference(h1: &LumaHistogram, h2: &LumaHistogram) -> Result<f64> {
    if h1.total != h2.total {
        return Err(CodecError::HistogramTotalMismatch(h1.total, h2.total));
    }
    let moved: u64 = h1
        .bins
        .iter()
        .zip(&h2.bins)
        .map(|(&a, &b)| a.abs_diff(b))
        .sum();
    Ok(moved as f64 / (2 * h1.total) as f64)
}

/// True when the adjacent pair's histogram difference exceeds `threshold`.
pub fn is_cut(prev: &VideoFrame, curr: &VideoFrame, threshold: f64) -> Result<bool> {
    let hd = histogram_difference(&histogram256(prev), &histogram256(curr))?;
    Ok(hd > threshold)
}

/// Flags each display index that starts a new scene. Index 0 is never
/// flagged; the planner treats it as a scene start unconditionally.
pub fn detect_scene_cuts(frames: &[VideoFrame], threshold: f64) -> Result<Vec<bool>> {
    let mut flags = vec![false; frames.len()];
    for i in 1..frames.len() {
        flags[i] = is_cut(&frames[i - 1], &frames[i], threshold)?;
    }
    Ok(flags)
}
