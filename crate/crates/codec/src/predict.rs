//! Block prediction: DC/H/V intra, motion-compensated inter, and the
//! bidirectional rounding average.
//!
//! Intra prediction reads already-reconstructed neighbours of the current
//! picture, so encoder and decoder see identical inputs. Neighbours
//! outside the picture are replaced by the mid-grey 128, matching on both
//! sides by construction.

use crate::motion::{MotionVector, PaddedPlane};

/// Intra sub-modes; DC averages the available neighbours, H extends the
/// left column, V extends the top row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntraMode {
    Dc,
    Horizontal,
    Vertical,
}

impl IntraMode {
    pub const ALL: [IntraMode; 3] = [IntraMode::Dc, IntraMode::Horizontal, IntraMode::Vertical];
}

/// Coding mode of one macroblock, the per-block coding-parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    Skip,
    InterFwd(MotionVector),
    InterBwd(MotionVector),
    InterBi(MotionVector, MotionVector),
    Intra(IntraMode),
}

/// Intra prediction for a bw x bh block at (x0, y0) of a plane under
/// reconstruction. `recon` holds reconstructed samples above and left of
/// the block; samples at and beyond the block are not read.
pub fn intra_predict(
    recon: &[u8],
    stride: usize,
    x0: usize,
    y0: usize,
    bw: usize,
    bh: usize,
    mode: IntraMode,
    out: &mut [u8],
) {
    debug_assert_eq!(out.len(), bw * bh);
    let top_available = y0 > 0;
    let left_available = x0 > 0;
    match mode {
        IntraMode::Dc => {
            let mut sum = 0u32;
            let mut count = 0u32;
            if top_available {
                let top = &recon[(y0 - 1) * stride + x0..][..bw];
                sum += top.iter().map(|&v| v as u32).sum::<u32>();
                count += bw as u32;
            }
            if left_available {
                for row in 0..bh {
                    sum += recon[(y0 + row) * stride + x0 - 1] as u32;
                }
                count += bh as u32;
            }
            let dc = if count == 0 {
                128
            } else {
                ((sum + count / 2) / count) as u8
            };
            out.fill(dc);
        }
        IntraMode::Horizontal => {
            for row in 0..bh {
                let value = if left_available {
                    recon[(y0 + row) * stride + x0 - 1]
                } else {
                    128
                };
                out[row * bw..(row + 1) * bw].fill(value);
            }
        }
        IntraMode::Vertical => {
            for col in 0..bw {
                let value = if top_available {
                    recon[(y0 - 1) * stride + x0 + col]
                } else {
                    128
                };
                for row in 0..bh {
                    out[row * bw + col] = value;
                }
            }
        }
    }
}

/// Motion-compensated prediction from a padded reference.
pub fn inter_predict(
    reference: &PaddedPlane,
    x0: i32,
    y0: i32,
    bw: usize,
    bh: usize,
    mv: MotionVector,
    out: &mut [u8],
) {
    reference.copy_block(x0 + mv.dx, y0 + mv.dy, bw, bh, out);
}

/// Rounding average of two predictions: (a + b + 1) >> 1.
pub fn bi_average(a: &[u8], b: &[u8], out: &mut [u8]) {
    debug_assert!(a.len() == b.len() && a.len() == out.len());
    for ((&x, &y), dst) in a.iter().zip(b).zip(out) {
        *dst = ((x as u16 + y as u16 + 1) >> 1) as u8;
    }
}
