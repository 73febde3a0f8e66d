//! Planar 4:2:0 frame buffer and sequence header.

use crate::error::{CodecError, Result};

/// Frame rate as an exact rational (frames per second = num/den).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameRate {
    pub num: u32,
    pub den: u32,
}

impl FrameRate {
    pub fn new(num: u32, den: u32) -> Self {
        Self { num, den }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for FrameRate {
    fn default() -> Self {
        Self { num: 25, den: 1 }
    }
}

/// Sequence-level parameters carried alongside the frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceHeader {
    pub width: u32,
    pub height: u32,
    pub frame_rate: FrameRate,
    /// Number of frames, 0 when unknown until EOF.
    pub frame_count: u32,
}

impl SequenceHeader {
    pub fn new(width: u32, height: u32, frame_rate: FrameRate) -> Self {
        Self {
            width,
            height,
            frame_rate,
            frame_count: 0,
        }
    }
}

/// One planar 4:2:0 picture. Luma is `width * height` samples, each chroma
/// plane `(width/2) * (height/2)`. Dimensions must be even so the
/// subsampling is well defined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoFrame {
    width: u32,
    height: u32,
    pub plane_y: Vec<u8>,
    pub plane_u: Vec<u8>,
    pub plane_v: Vec<u8>,
    /// Display-order index.
    pub index: usize,
}

impl VideoFrame {
    pub fn new(
        width: u32,
        height: u32,
        plane_y: Vec<u8>,
        plane_u: Vec<u8>,
        plane_v: Vec<u8>,
        index: usize,
    ) -> Result<Self> {
        if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
            return Err(CodecError::BadDimensions { width, height });
        }
        let y_len = (width as usize) * (height as usize);
        let c_len = y_len / 4;
        if plane_y.len() != y_len {
            return Err(CodecError::PlaneSizeMismatch {
                expected: y_len,
                got: plane_y.len(),
            });
        }
        if plane_u.len() != c_len {
            return Err(CodecError::PlaneSizeMismatch {
                expected: c_len,
                got: plane_u.len(),
            });
        }
        if plane_v.len() != c_len {
            return Err(CodecError::PlaneSizeMismatch {
                expected: c_len,
                got: plane_v.len(),
            });
        }
        Ok(Self {
            width,
            height,
            plane_y,
            plane_u,
            plane_v,
            index,
        })
    }

    /// A frame with all planes set to a constant value.
    pub fn flat(width: u32, height: u32, y: u8, u: u8, v: u8, index: usize) -> Result<Self> {
        let y_len = (width as usize) * (height as usize);
        Self::new(
            width,
            height,
            vec![y; y_len],
            vec![u; y_len / 4],
            vec![v; y_len / 4],
            index,
        )
    }

    /// Splits one contiguous Y, U, V buffer into a frame.
    pub fn from_planar(width: u32, height: u32, data: &[u8], index: usize) -> Result<Self> {
        if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
            return Err(CodecError::BadDimensions { width, height });
        }
        let expected = Self::frame_size_bytes(width, height);
        if data.len() != expected {
            return Err(CodecError::PlaneSizeMismatch {
                expected,
                got: data.len(),
            });
        }
        let y_len = (width as usize) * (height as usize);
        let c_len = y_len / 4;
        Self::new(
            width,
            height,
            data[..y_len].to_vec(),
            data[y_len..y_len + c_len].to_vec(),
            data[y_len + c_len..].to_vec(),
            index,
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn chroma_width(&self) -> u32 {
        self.width / 2
    }

    pub fn chroma_height(&self) -> u32 {
        self.height / 2
    }

    /// Frame payload size in bytes for planar 4:2:0 (1.5 bytes per pixel).
    pub fn frame_size_bytes(width: u32, height: u32) -> usize {
        (width as usize) * (height as usize) * 3 / 2
    }

    pub fn luma(&self, x: u32, y: u32) -> u8 {
        self.plane_y[(y * self.width + x) as usize]
    }
}

/// Checks all frames share the given dimensions.
pub fn check_uniform_dimensions(frames: &[VideoFrame], width: u32, height: u32) -> Result<()> {
    for f in frames {
        if f.width() != width || f.height() != height {
            return Err(CodecError::DimensionMismatch {
                index: f.index,
                got_w: f.width(),
                got_h: f.height(),
                want_w: width,
                want_h: height,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_dimensions() {
        assert!(matches!(
            VideoFrame::flat(63, 64, 0, 0, 0, 0),
            Err(CodecError::BadDimensions { .. })
        ));
        assert!(matches!(
            VideoFrame::flat(64, 0, 0, 0, 0, 0),
            Err(CodecError::BadDimensions { .. })
        ));
    }

    #[test]
    fn rejects_wrong_plane_sizes() {
        let err = VideoFrame::new(4, 4, vec![0; 15], vec![0; 4], vec![0; 4], 0);
        assert!(matches!(err, Err(CodecError::PlaneSizeMismatch { expected: 16, got: 15 })));
        let err = VideoFrame::new(4, 4, vec![0; 16], vec![0; 3], vec![0; 4], 0);
        assert!(matches!(err, Err(CodecError::PlaneSizeMismatch { expected: 4, got: 3 })));
    }

    #[test]
    fn frame_size_accounting() {
        // 4:2:0 payload is 1.5 bytes per pixel.
        assert_eq!(VideoFrame::frame_size_bytes(64, 64), 6144);
    }
}
