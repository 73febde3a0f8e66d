//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed y4m header: {0}")]
    MalformedHeader(String),

    #[error("unsupported y4m colourspace {0:?} (only the C420 family is accepted)")]
    UnsupportedColorspace(String),

    #[error("truncated frame payload at frame {frame}: expected {expected} bytes, got {got}")]
    TruncatedFrame {
        frame: usize,
        expected: usize,
        got: usize,
    },

    #[error("frame dimensions {width}x{height} must be even and nonzero")]
    BadDimensions { width: u32, height: u32 },

    #[error("raw stream length {len} is not a multiple of the frame size {frame_size}")]
    BadStreamLength { len: usize, frame_size: usize },

    #[error("plane size mismatch: expected {expected} samples, got {got}")]
    PlaneSizeMismatch { expected: usize, got: usize },

    #[error("frame {index} is {got_w}x{got_h} but the sequence is {want_w}x{want_h}")]
    DimensionMismatch {
        index: usize,
        got_w: u32,
        got_h: u32,
        want_w: u32,
        want_h: u32,
    },

    #[error("qp {0} out of range [0, 51]")]
    QpOutOfRange(u8),

    #[error("invalid encoder config: {0}")]
    InvalidConfig(String),

    #[error("cannot encode an empty sequence")]
    EmptySequence,

    #[error("bad bitstream magic {0:02x?}")]
    BadMagic([u8; 4]),

    #[error("unsupported bitstream version {0}")]
    BadVersion(u8),

    #[error("truncated bitstream: {0}")]
    TruncatedBitstream(String),

    #[error("total_bits field ({total_bits}) inconsistent with payload of {payload_bytes} bytes")]
    InconsistentBitCount { total_bits: u64, payload_bytes: usize },

    #[error("malformed bitstream payload: {0}")]
    MalformedPayload(String),

    #[error("distortion for I frames is not recorded by the controller")]
    IntraDistortionRecord,

    #[error("distortion index for B frames is zero while the controller is ready")]
    ZeroDistortionIndex,

    #[error("histogram totals differ: {0} vs {1}")]
    HistogramTotalMismatch(u64, u64),

    #[error("RD curve needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("bad RD point: {0}")]
    BadCurvePoint(String),

    #[error("RD curve is not strictly monotone in {0}")]
    NonMonotoneCurve(&'static str),

    #[error("RD curves do not overlap in {0}")]
    EmptyOverlap(&'static str),

    #[error("mode selection over an empty candidate list")]
    NoCandidates,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CodecError>;
