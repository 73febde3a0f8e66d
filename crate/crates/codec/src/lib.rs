//! A miniature block-based hybrid video codec built to make Lagrange
//! multiplier choices observable as real bits and real distortion.
//!
//! The coding tools are deliberately small: 16x16 blocks with skip,
//! forward/backward/bidirectional inter and DC/H/V intra modes, full-pel
//! motion, an exactly invertible integer transform, uniform quantization
//! with the step doubling every 6 QP, and Exp-Golomb entropy coding.
//! Everything in the reconstruction path is integer arithmetic, so the
//! decoder reproduces the encoder's reconstruction bit for bit.
//!
//! On top of the codec sit the pieces a rate-distortion study needs:
//! the QP-to-lambda formulas for both supported profiles, an in-loop
//! controller that retunes the B-frame lambda from recent P/B distortion
//! statistics, a histogram-based scene cut detector that resets it, and
//! Bjontegaard delta metrics for comparing RD curves.

pub mod adaptive;
pub mod bitio;
pub mod bitstream;
pub mod decoder;
pub mod encoder;
pub mod entropy;
pub mod error;
pub mod frame;
pub mod gop;
pub mod metrics;
pub mod motion;
pub mod predict;
pub mod quant;
pub mod raw;
pub mod rdo;
pub mod scenecut;
pub mod transform;
pub mod y4m;

pub use adaptive::{ControllerParams, ControllerState, LambdaBase};
pub use bitstream::{Bitstream, FrameRecord, MacroblockRecord};
pub use decoder::{decode_sequence, parse_bitstream};
pub use encoder::{encode_sequence, EncoderConfig, FrameStats, Profile, BLOCK_SIZE};
pub use error::CodecError;
pub use frame::{FrameRate, SequenceHeader, VideoFrame};
pub use gop::{plan_coding_order, FrameType, PlannedFrame};
pub use metrics::{bd_psnr, bd_rate, frame_mse_y, psnr_from_mse, RdCurve, RdPoint};
pub use rdo::{lambda_orig, rd_cost, select_mode, LambdaQuery};
