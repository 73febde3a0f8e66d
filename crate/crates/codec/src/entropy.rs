//! Bit-level coding of frame and macroblock records.
//!
//! Everything is Exp-Golomb over the MSB-first bit writer. Motion vectors
//! are coded as differences against a running per-direction predictor,
//! reset to zero at each frame, updated by every macroblock that codes
//! that direction. Coefficients are coded per 8x8 block as a nonzero
//! count followed by (zero run, level) pairs in zigzag order.
//!
//! `mb_record_bits` mirrors the writer exactly so mode decision can price
//! a candidate without serialising it; a drift between the two would
//! break rate accounting, which the round-trip tests pin down.

use crate::bitio::{len_se, len_ue, BitReader, BitWriter};
use crate::bitstream::{FrameRecord, MacroblockRecord};
use crate::error::{CodecError, Result};
use crate::gop::FrameType;
use crate::motion::MotionVector;
use crate::predict::{BlockMode, IntraMode};

/// Raster positions of an 8x8 block in zigzag scan order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// Blocks coded per macroblock: four luma, then U, then V.
pub const BLOCKS_PER_MB: usize = 6;

/// Running motion vector predictors, one per reference direction.
#[derive(Debug, Clone, Copy, Default)]
pub struct MvPredictors {
    pub fwd: MotionVector,
    pub bwd: MotionVector,
}

fn frame_type_code(frame_type: FrameType) -> u64 {
    match frame_type {
        FrameType::I => 0,
        FrameType::P => 1,
        FrameType::B => 2,
    }
}

fn frame_type_from_code(code: u64) -> Result<FrameType> {
    match code {
        0 => Ok(FrameType::I),
        1 => Ok(FrameType::P),
        2 => Ok(FrameType::B),
        other => Err(CodecError::MalformedPayload(format!(
            "frame type code {other}"
        ))),
    }
}

fn intra_mode_code(mode: IntraMode) -> u64 {
    match mode {
        IntraMode::Dc => 0,
        IntraMode::Horizontal => 1,
        IntraMode::Vertical => 2,
    }
}

fn intra_mode_from_code(code: u64) -> Result<IntraMode> {
    match code {
        0 => Ok(IntraMode::Dc),
        1 => Ok(IntraMode::Horizontal),
        2 => Ok(IntraMode::Vertical),
        other => Err(CodecError::MalformedPayload(format!(
            "intra sub-mode code {other}"
        ))),
    }
}

/// Writes one frame record; the caller provides the macroblock count via
/// the record itself (the stream carries no explicit count, picture
/// dimensions determine it).
pub fn encode_frame_record(writer: &mut BitWriter, record: &FrameRecord) {
    writer.put_ue(record.display_index as u64);
    writer.put_bits(frame_type_code(record.frame_type), 2);
    writer.put_bits(record.lambda_milli as u64, 32);
    let mut preds = MvPredictors::default();
    for mb in &record.mbs {
        encode_mb(writer, record.frame_type, mb, &mut preds);
    }
}

/// Reads one frame record with `mb_count` macroblocks.
pub fn decode_frame_record(reader: &mut BitReader<'_>, mb_count: usize) -> Result<FrameRecord> {
    let display_index = reader.get_ue()? as u32;
    let frame_type = frame_type_from_code(reader.get_bits(2)?)?;
    let lambda_milli = reader.get_bits(32)? as u32;
    let mut preds = MvPredictors::default();
    let mut mbs = Vec::with_capacity(mb_count);
    for _ in 0..mb_count {
        mbs.push(decode_mb(reader, frame_type, &mut preds)?);
    }
    Ok(FrameRecord {
        display_index,
        frame_type,
        lambda_milli,
        mbs,
    })
}

pub fn encode_mb(
    writer: &mut BitWriter,
    frame_type: FrameType,
    mb: &MacroblockRecord,
    preds: &mut MvPredictors,
) {
    if frame_type != FrameType::I {
        writer.put_bit(mb.mode == BlockMode::Skip);
    }
    match mb.mode {
        BlockMode::Skip => {
            debug_assert!(frame_type != FrameType::I && mb.coeffs.is_empty());
            return;
        }
        BlockMode::Intra(sub) => {
            match frame_type {
                FrameType::I => {}
                FrameType::P => writer.put_ue(1),
                FrameType::B => writer.put_ue(3),
            }
            writer.put_ue(intra_mode_code(sub));
        }
        BlockMode::InterFwd(mv) => {
            debug_assert!(frame_type != FrameType::I);
            writer.put_ue(0);
            put_mv(writer, mv, &mut preds.fwd);
        }
        BlockMode::InterBwd(mv) => {
            debug_assert_eq!(frame_type, FrameType::B);
            writer.put_ue(1);
            put_mv(writer, mv, &mut preds.bwd);
        }
        BlockMode::InterBi(fwd, bwd) => {
            debug_assert_eq!(frame_type, FrameType::B);
            writer.put_ue(2);
            put_mv(writer, fwd, &mut preds.fwd);
            put_mv(writer, bwd, &mut preds.bwd);
        }
    }
    debug_assert_eq!(mb.coeffs.len(), BLOCKS_PER_MB);
    for block in &mb.coeffs {
        encode_coeff_block(writer, block);
    }
}

pub fn decode_mb(
    reader: &mut BitReader<'_>,
    frame_type: FrameType,
    preds: &mut MvPredictors,
) -> Result<MacroblockRecord> {
    if frame_type != FrameType::I && reader.get_bit()? {
        return Ok(MacroblockRecord {
            mode: BlockMode::Skip,
            coeffs: Vec::new(),
        });
    }
    let mode = match frame_type {
        FrameType::I => BlockMode::Intra(intra_mode_from_code(reader.get_ue()?)?),
        FrameType::P => match reader.get_ue()? {
            0 => BlockMode::InterFwd(get_mv(reader, &mut preds.fwd)?),
            1 => BlockMode::Intra(intra_mode_from_code(reader.get_ue()?)?),
            other => {
                return Err(CodecError::MalformedPayload(format!(
                    "P-frame mode code {other}"
                )))
            }
        },
        FrameType::B => match reader.get_ue()? {
            0 => BlockMode::InterFwd(get_mv(reader, &mut preds.fwd)?),
            1 => BlockMode::InterBwd(get_mv(reader, &mut preds.bwd)?),
            2 => {
                let fwd = get_mv(reader, &mut preds.fwd)?;
                let bwd = get_mv(reader, &mut preds.bwd)?;
                BlockMode::InterBi(fwd, bwd)
            }
            3 => BlockMode::Intra(intra_mode_from_code(reader.get_ue()?)?),
            other => {
                return Err(CodecError::MalformedPayload(format!(
                    "B-frame mode code {other}"
                )))
            }
        },
    };
    let mut coeffs = Vec::with_capacity(BLOCKS_PER_MB);
    for _ in 0..BLOCKS_PER_MB {
        coeffs.push(decode_coeff_block(reader)?);
    }
    Ok(MacroblockRecord { mode, coeffs })
}

/// Exact bit cost of a macroblock record under the given predictors,
/// without writing it. Mirrors `encode_mb`.
pub fn mb_record_bits(frame_type: FrameType, mb: &MacroblockRecord, preds: MvPredictors) -> u64 {
    let skip_flag = u64::from(frame_type != FrameType::I);
    let mut bits = skip_flag;
    match mb.mode {
        BlockMode::Skip => return bits,
        BlockMode::Intra(sub) => {
            bits += match frame_type {
                FrameType::I => 0,
                FrameType::P => len_ue(1),
                FrameType::B => len_ue(3),
            };
            bits += len_ue(intra_mode_code(sub));
        }
        BlockMode::InterFwd(mv) => {
            bits += len_ue(0) + mv_bits(mv, preds.fwd);
        }
        BlockMode::InterBwd(mv) => {
            bits += len_ue(1) + mv_bits(mv, preds.bwd);
        }
        BlockMode::InterBi(fwd, bwd) => {
            bits += len_ue(2) + mv_bits(fwd, preds.fwd) + mv_bits(bwd, preds.bwd);
        }
    }
    for block in &mb.coeffs {
        bits += coeff_block_bits(block);
    }
    bits
}

/// Applies the predictor updates `encode_mb` would perform for this
/// mode, so a caller pricing candidates with `mb_record_bits` can keep
/// its predictor state in lockstep with the eventual serialization.
pub fn advance_predictors(mode: BlockMode, preds: &mut MvPredictors) {
    match mode {
        BlockMode::InterFwd(mv) => preds.fwd = mv,
        BlockMode::InterBwd(mv) => preds.bwd = mv,
        BlockMode::InterBi(fwd, bwd) => {
            preds.fwd = fwd;
            preds.bwd = bwd;
        }
        BlockMode::Skip | BlockMode::Intra(_) => {}
    }
}

fn put_mv(writer: &mut BitWriter, mv: MotionVector, pred: &mut MotionVector) {
    writer.put_se((mv.dx - pred.dx) as i64);
    writer.put_se((mv.dy - pred.dy) as i64);
    *pred = mv;
}

fn get_mv(reader: &mut BitReader<'_>, pred: &mut MotionVector) -> Result<MotionVector> {
    let dx = pred.dx + reader.get_se()? as i32;
    let dy = pred.dy + reader.get_se()? as i32;
    let mv = MotionVector { dx, dy };
    *pred = mv;
    Ok(mv)
}

fn mv_bits(mv: MotionVector, pred: MotionVector) -> u64 {
    len_se((mv.dx - pred.dx) as i64) + len_se((mv.dy - pred.dy) as i64)
}

/// Writes one 8x8 block of quantized levels.
pub fn encode_coeff_block(writer: &mut BitWriter, levels: &[i32; 64]) {
    let nonzero = levels.iter().filter(|&&v| v != 0).count() as u64;
    writer.put_ue(nonzero);
    let mut run = 0u64;
    for &pos in &ZIGZAG {
        let level = levels[pos];
        if level == 0 {
            run += 1;
        } else {
            writer.put_ue(run);
            writer.put_se(level as i64);
            run = 0;
        }
    }
}

/// Reads one 8x8 block of quantized levels.
pub fn decode_coeff_block(reader: &mut BitReader<'_>) -> Result<[i32; 64]> {
    let nonzero = reader.get_ue()?;
    if nonzero > 64 {
        return Err(CodecError::MalformedPayload(format!(
            "coefficient count {nonzero}"
        )));
    }
    let mut levels = [0i32; 64];
    let mut scan = 0usize;
    for _ in 0..nonzero {
        let run = reader.get_ue()? as usize;
        scan += run;
        if scan > 63 {
            return Err(CodecError::MalformedPayload(format!(
                "zero run escapes the block (scan {scan})"
            )));
        }
        let level = reader.get_se()?;
        if level == 0 {
            return Err(CodecError::MalformedPayload(
                "explicit zero level".into(),
            ));
        }
        levels[ZIGZAG[scan]] = level as i32;
        scan += 1;
    }
    Ok(levels)
}

/// Exact bit cost of one coefficient block. Mirrors `encode_coeff_block`.
pub fn coeff_block_bits(levels: &[i32; 64]) -> u64 {
    let nonzero = levels.iter().filter(|&&v| v != 0).count() as u64;
    let mut bits = len_ue(nonzero);
    let mut run = 0u64;
    for &pos in &ZIGZAG {
        let level = levels[pos];
        if level == 0 {
            run += 1;
        } else {
            bits += len_ue(run) + len_se(level as i64);
            run = 0;
        }
    }
    bits
}
