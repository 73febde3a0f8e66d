//! Headerless planar 4:2:0 input.
//!
//! Raw `.yuv` files carry no metadata, so the caller supplies dimensions.
//! The byte length must be an exact multiple of the frame size.

use crate::error::{CodecError, Result};
use crate::frame::VideoFrame;

/// Splits a raw planar 4:2:0 byte buffer into frames.
pub fn read_raw_yuv(data: &[u8], width: u32, height: u32) -> Result<Vec<VideoFrame>> {
    if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
        return Err(CodecError::BadDimensions { width, height });
    }
    let frame_size = VideoFrame::frame_size_bytes(width, height);
    if data.is_empty() || data.len() % frame_size != 0 {
        return Err(CodecError::BadStreamLength {
            len: data.len(),
            frame_size,
        });
    }
    data.chunks_exact(frame_size)
        .enumerate()
        .map(|(index, chunk)| VideoFrame::from_planar(width, height, chunk, index))
        .collect()
}
