//! Mode and structure decisions on scenes whose optimal coding is known
//! by construction.

mod common;

use common::{encode_at, noise_frame, translating_frame};
use lfx_codec::decoder::parse_bitstream;
use lfx_codec::gop::{plan_coding_order, FrameType};
use lfx_codec::motion::MotionVector;
use lfx_codec::predict::BlockMode;
use lfx_codec::{FrameRecord, VideoFrame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn records_by_display(records: &[FrameRecord]) -> Vec<&FrameRecord> {
    let mut sorted: Vec<&FrameRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.display_index);
    sorted
}

#[test]
fn translating_texture_is_motion_compensated() {
    let frames: Vec<VideoFrame> = (0..13).map(|t| translating_frame(64, 64, t, t)).collect();
    let (stream, stats) = encode_at(&frames, 27);
    let records = records_by_display(&stream.frames);

    let i_bits = stats.iter().find(|s| s.index == 0).unwrap().bits;
    for record in &records {
        let display = record.display_index as usize;
        if record.frame_type == FrameType::I {
            continue;
        }
        // Anchors sit on multiples of the GOP length, so the reference
        // displacement in this left-moving scene is the distance to the
        // bracketing anchors.
        let fwd_dist = (display % 4) as i32;
        let fwd_dist = if fwd_dist == 0 { 4 } else { fwd_dist };
        let bwd_dist = 4 - (display % 4) as i32;
        let fwd_mv = MotionVector { dx: fwd_dist, dy: 0 };
        let bwd_mv = MotionVector { dx: -bwd_dist, dy: 0 };

        let exact = record
            .mbs
            .iter()
            .filter(|mb| match mb.mode {
                BlockMode::InterFwd(mv) => mv == fwd_mv,
                BlockMode::InterBwd(mv) => mv == bwd_mv,
                BlockMode::InterBi(f, b) => f == fwd_mv && b == bwd_mv,
                _ => false,
            })
            .count();
        // Blocks that read past the picture edge see replicated padding
        // instead of the wrapped texture, so only interior blocks are
        // guaranteed an exact match; that is still most of the frame.
        assert!(
            exact >= record.mbs.len() / 2,
            "display {display}: only {exact}/{} blocks ride the true motion",
            record.mbs.len()
        );

        // Edge blocks still pay full price for the unwrappable strip,
        // so inter frames land well under intra cost without being free.
        let bits = stats.iter().find(|s| s.index == display).unwrap().bits;
        assert!(
            bits * 2 < i_bits,
            "display {display}: {bits} bits is too expensive for pure translation (I: {i_bits})"
        );
    }
}

#[test]
fn a_frozen_scene_skips_every_block() {
    let frames: Vec<VideoFrame> =
        (0..13).map(|t| translating_frame(64, 64, 0, t)).collect();
    let (stream, stats) = encode_at(&frames, 27);

    let i_mse = stats.iter().find(|s| s.index == 0).unwrap().mse_y;
    for record in &stream.frames {
        if record.frame_type == FrameType::I {
            continue;
        }
        assert!(
            record.mbs.iter().all(|mb| mb.mode == BlockMode::Skip),
            "display {}: a frozen scene must be all skip",
            record.display_index
        );
        let stat =
            stats.iter().find(|s| s.index == record.display_index as usize).unwrap();
        assert!(
            stat.bits < 200,
            "display {}: {} bits for an all-skip frame",
            record.display_index,
            stat.bits
        );
        assert_eq!(
            stat.mse_y, i_mse,
            "skip chains must carry the intra reconstruction through unchanged"
        );
    }
}

#[test]
fn coding_order_matches_the_plan() {
    let frames: Vec<VideoFrame> = (0..13).map(|t| translating_frame(64, 64, t, t)).collect();
    let (stream, _) = encode_at(&frames, 32);
    let plan = plan_coding_order(13, 4, &[false; 13]).unwrap();
    assert_eq!(stream.frames.len(), plan.len());
    for (record, planned) in stream.frames.iter().zip(&plan) {
        assert_eq!(record.display_index as usize, planned.display_index);
        assert_eq!(record.frame_type, planned.frame_type);
    }
    let mut displays: Vec<u32> = stream.frames.iter().map(|r| r.display_index).collect();
    displays.sort_unstable();
    assert_eq!(displays, (0..13).collect::<Vec<u32>>());
}

#[test]
fn a_hard_cut_restarts_with_an_intra_frame() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut frames: Vec<VideoFrame> =
        (0..7).map(|t| translating_frame(64, 64, t, t)).collect();
    frames.extend((7..16).map(|t| noise_frame(64, 64, 30, 8, &mut rng, t)));

    let (stream, _) = encode_at(&frames, 32);
    let intras: Vec<u32> = stream
        .frames
        .iter()
        .filter(|r| r.frame_type == FrameType::I)
        .map(|r| r.display_index)
        .collect();
    assert_eq!(intras, vec![0, 7], "the cut frame must start a new scene segment");
}
