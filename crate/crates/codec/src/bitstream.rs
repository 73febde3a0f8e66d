//! The coded stream container.
//!
//! Layout, all multi-byte fields big-endian:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "LFG1"
//!      4     1  version (currently 1)
//!      5     4  picture width in pixels
//!      9     4  picture height in pixels
//!     13     4  frame count
//!     17     1  qp
//!     18     2  motion search range
//!     20     4  frame rate numerator
//!     24     4  frame rate denominator
//!     28     8  total_bits: exact bit length of the payload
//!     36     -  payload: frame records, bit-packed, zero-padded to a byte
//! ```
//!
//! Frame records follow in coding order with no alignment between them;
//! `total_bits` counts exactly the meaningful payload bits, so the
//! payload occupies `ceil(total_bits / 8)` bytes and decoding must end
//! precisely at `total_bits`.

use crate::bitio::{BitReader, BitWriter};
use crate::entropy::{decode_frame_record, encode_frame_record};
use crate::error::{CodecError, Result};
use crate::frame::FrameRate;
use crate::gop::FrameType;
use crate::predict::BlockMode;
use crate::quant::QP_MAX;

pub const MAGIC: [u8; 4] = *b"LFG1";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 36;

/// Sequence-level fields every decoder needs before the payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub width: u32,
    pub height: u32,
    pub frame_count: u32,
    pub qp: u8,
    pub search_range: u16,
    pub frame_rate: FrameRate,
}

impl StreamHeader {
    /// Macroblock grid dimensions; pictures are padded up to multiples of
    /// 16 internally.
    pub fn mb_cols(&self) -> usize {
        self.width.div_ceil(16) as usize
    }

    pub fn mb_rows(&self) -> usize {
        self.height.div_ceil(16) as usize
    }

    pub fn mbs_per_frame(&self) -> usize {
        self.mb_cols() * self.mb_rows()
    }
}

/// One coded macroblock: its mode and, unless skipped, six 8x8 blocks of
/// quantized levels (four luma, U, V) in raster order within each block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroblockRecord {
    pub mode: BlockMode,
    pub coeffs: Vec<[i32; 64]>,
}

/// One coded frame in coding order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRecord {
    pub display_index: u32,
    pub frame_type: FrameType,
    /// round(lambda * 1000) of the lambda used for this frame; metadata
    /// for analysis, never read back by the decoder's reconstruction.
    pub lambda_milli: u32,
    pub mbs: Vec<MacroblockRecord>,
}

/// A parsed or assembled stream.
#[derive(Debug, Clone)]
pub struct Bitstream {
    pub header: StreamHeader,
    /// Frame records in coding order.
    pub frames: Vec<FrameRecord>,
    /// Exact payload length in bits; the sum of all frame record lengths.
    pub total_bits: u64,
}

impl Bitstream {
    /// Assembles a stream, measuring `total_bits` from the records.
    pub fn from_frames(header: StreamHeader, frames: Vec<FrameRecord>) -> Self {
        let mut writer = BitWriter::new();
        for frame in &frames {
            encode_frame_record(&mut writer, frame);
        }
        Self {
            header,
            frames,
            total_bits: writer.bit_len(),
        }
    }

    /// Serializes header and payload to bytes.
    pub fn write_bytes(&self) -> Vec<u8> {
        let mut writer = BitWriter::new();
        for frame in &self.frames {
            encode_frame_record(&mut writer, frame);
        }
        debug_assert_eq!(writer.bit_len(), self.total_bits);
        let payload = writer.into_bytes();

        let h = &self.header;
        let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len());
        bytes.extend_from_slice(&MAGIC);
        bytes.push(VERSION);
        bytes.extend_from_slice(&h.width.to_be_bytes());
        bytes.extend_from_slice(&h.height.to_be_bytes());
        bytes.extend_from_slice(&h.frame_count.to_be_bytes());
        bytes.push(h.qp);
        bytes.extend_from_slice(&h.search_range.to_be_bytes());
        bytes.extend_from_slice(&h.frame_rate.num.to_be_bytes());
        bytes.extend_from_slice(&h.frame_rate.den.to_be_bytes());
        bytes.extend_from_slice(&self.total_bits.to_be_bytes());
        bytes.extend_from_slice(&payload);
        bytes
    }

    /// Parses and validates a stream, consuming exactly `total_bits` of
    /// payload.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(CodecError::TruncatedBitstream(format!(
                "header needs {HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(CodecError::BadMagic(magic));
        }
        let version = bytes[4];
        if version != VERSION {
            return Err(CodecError::BadVersion(version));
        }
        let read_u32 = |at: usize| u32::from_be_bytes(bytes[at..at + 4].try_into().unwrap());
        let width = read_u32(5);
        let height = read_u32(9);
        let frame_count = read_u32(13);
        let qp = bytes[17];
        let search_range = u16::from_be_bytes(bytes[18..20].try_into().unwrap());
        let frame_rate = FrameRate {
            num: read_u32(20),
            den: read_u32(24),
        };
        let total_bits = u64::from_be_bytes(bytes[28..36].try_into().unwrap());

        if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
            return Err(CodecError::BadDimensions { width, height });
        }
        if frame_count == 0 {
            return Err(CodecError::EmptySequence);
        }
        if qp > QP_MAX {
            return Err(CodecError::QpOutOfRange(qp));
        }
        if frame_rate.num == 0 || frame_rate.den == 0 {
            return Err(CodecError::MalformedPayload(format!(
                "frame rate {}/{}",
                frame_rate.num, frame_rate.den
            )));
        }

        let payload = &bytes[HEADER_LEN..];
        let expected_bytes = total_bits.div_ceil(8) as usize;
        if payload.len() != expected_bytes {
            return Err(CodecError::InconsistentBitCount {
                total_bits,
                payload_bytes: payload.len(),
            });
        }

        let header = StreamHeader {
            width,
            height,
            frame_count,
            qp,
            search_range,
            frame_rate,
        };
        let mbs_per_frame = header.mbs_per_frame();
        let mut reader = BitReader::new(payload);
        let mut frames = Vec::with_capacity(frame_count as usize);
        for _ in 0..frame_count {
            frames.push(decode_frame_record(&mut reader, mbs_per_frame)?);
        }
        if reader.bit_pos() != total_bits {
            return Err(CodecError::InconsistentBitCount {
                total_bits,
                payload_bytes: payload.len(),
            });
        }
        Ok(Self {
            header,
            frames,
            total_bits,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::MotionVector;
    use crate::predict::IntraMode;

    fn tiny_stream() -> Bitstream {
        let header = StreamHeader {
            width: 32,
            height: 32,
            frame_count: 2,
            qp: 32,
            search_range: 16,
            frame_rate: FrameRate::default(),
        };
        let intra_mb = || MacroblockRecord {
            mode: BlockMode::Intra(IntraMode::Dc),
            coeffs: vec![[0i32; 64]; 6],
        };
        let mut coeffs = vec![[0i32; 64]; 6];
        coeffs[0][0] = 12;
        coeffs[5][9] = -3;
        let frames = vec![
            FrameRecord {
                display_index: 0,
                frame_type: FrameType::I,
                lambda_milli: 18_236,
                mbs: (0..4).map(|_| intra_mb()).collect(),
            },
            FrameRecord {
                display_index: 1,
                frame_type: FrameType::P,
                lambda_milli: 27_200,
                mbs: vec![
                    MacroblockRecord {
                        mode: BlockMode::Skip,
                        coeffs: Vec::new(),
                    },
                    MacroblockRecord {
                        mode: BlockMode::InterFwd(MotionVector { dx: 3, dy: -2 }),
                        coeffs,
                    },
                    MacroblockRecord {
                        mode: BlockMode::Intra(IntraMode::Vertical),
                        coeffs: vec![[0i32; 64]; 6],
                    },
                    MacroblockRecord {
                        mode: BlockMode::Skip,
                        coeffs: Vec::new(),
                    },
                ],
            },
        ];
        Bitstream::from_frames(header, frames)
    }

    #[test]
    fn round_trip_preserves_everything() {
        let stream = tiny_stream();
        let bytes = stream.write_bytes();
        assert_eq!(&bytes[0..4], b"LFG1");
        assert_eq!(bytes[4], 1);

        let parsed = Bitstream::parse(&bytes).unwrap();
        assert_eq!(parsed.header, stream.header);
        assert_eq!(parsed.total_bits, stream.total_bits);
        assert_eq!(parsed.frames, stream.frames);
    }

    #[test]
    fn payload_length_matches_bit_count() {
        let stream = tiny_stream();
        let bytes = stream.write_bytes();
        let payload_len = bytes.len() - HEADER_LEN;
        assert_eq!(payload_len as u64, stream.total_bits.div_ceil(8));
    }

    #[test]
    fn corrupt_magic_is_rejected() {
        let mut bytes = tiny_stream().write_bytes();
        bytes[0] = b'X';
        assert!(matches!(
            Bitstream::parse(&bytes),
            Err(CodecError::BadMagic(_))
        ));
    }

    #[test]
    fn unknown_version_is_rejected() {
        let mut bytes = tiny_stream().write_bytes();
        bytes[4] = 9;
        assert!(matches!(
            Bitstream::parse(&bytes),
            Err(CodecError::BadVersion(9))
        ));
    }

    #[test]
    fn truncated_header_is_rejected() {
        let bytes = tiny_stream().write_bytes();
        assert!(matches!(
            Bitstream::parse(&bytes[..20]),
            Err(CodecError::TruncatedBitstream(_))
        ));
    }

    #[test]
    fn total_bits_must_match_payload() {
        let stream = tiny_stream();
        let mut bytes = stream.write_bytes();
        let wrong = stream.total_bits + 64;
        bytes[28..36].copy_from_slice(&wrong.to_be_bytes());
        assert!(matches!(
            Bitstream::parse(&bytes),
            Err(CodecError::InconsistentBitCount { .. })
        ));

        let mut extended = stream.write_bytes();
        extended.push(0);
        assert!(matches!(
            Bitstream::parse(&extended),
            Err(CodecError::InconsistentBitCount { .. })
        ));
    }

    #[test]
    fn bad_header_fields_are_rejected() {
        let stream = tiny_stream();
        let mut bytes = stream.write_bytes();
        bytes[17] = 52; // qp out of range
        assert!(matches!(
            Bitstream::parse(&bytes),
            Err(CodecError::QpOutOfRange(52))
        ));

        let mut bytes = stream.write_bytes();
        bytes[5..9].copy_from_slice(&33u32.to_be_bytes()); // odd width
        assert!(matches!(
            Bitstream::parse(&bytes),
            Err(CodecError::BadDimensions { .. })
        ));
    }
}
