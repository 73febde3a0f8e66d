//! Sequence encoder: scene-cut aware GOP planning, Lagrangian mode
//! decision per macroblock, and in-loop reconstruction shared with the
//! decoder.
//!
//! Frames are processed in coding order (anchors before the B frames
//! between them). Each macroblock evaluates its legal candidate modes,
//! prices every candidate with exact bit counts, and keeps the one with
//! the lowest `D + lambda * R`. Distortion is luma-only SSD between the
//! candidate's reconstruction and the source.

use crate::adaptive::{ControllerParams, ControllerState, LambdaBase};
use crate::bitio::len_ue;
use crate::bitstream::{Bitstream, FrameRecord, MacroblockRecord, StreamHeader};
use crate::decoder::{
    apply_residual, predict_mb, Geometry, MbContext, MbPixels, ReconPlanes, ReferencePicture,
    LUMA_BLOCK_ORIGINS,
};
use crate::entropy::{advance_predictors, mb_record_bits, MvPredictors, BLOCKS_PER_MB};
use crate::error::{CodecError, Result};
use crate::frame::{check_uniform_dimensions, FrameRate, VideoFrame};
use crate::gop::{plan_coding_order, FrameType, PlannedFrame};
use crate::motion::{motion_search, SearchWindow};
use crate::predict::{BlockMode, IntraMode};
use crate::quant::{quantize, QP_MAX};
use crate::rdo::{lambda_orig, select_mode, LambdaQuery};
pub use crate::rdo::Profile;
use crate::scenecut::detect_scene_cuts;
use crate::transform::fdct8;

/// Macroblock edge length in luma samples. Fixed; each macroblock holds
/// four 8x8 luma transform blocks and one 8x8 block per chroma plane.
pub const BLOCK_SIZE: usize = 16;

/// Everything one encode depends on besides the frames themselves.
#[derive(Debug, Clone)]
pub struct EncoderConfig {
    /// Quantization parameter, 0..=51.
    pub qp: u8,
    /// Anchor spacing; a GOP of length g carries g - 1 B frames.
    pub gop_length: usize,
    /// Which lambda family the rate-distortion decisions use.
    pub profile: Profile,
    /// P-frame weight of the HEVC-like lambda family; ignored under
    /// H264-like.
    pub hevc_p: f64,
    /// Enables the B-frame lambda controller.
    pub adaptive: bool,
    /// Which base the controller modulates when it engages.
    pub lambda_base: LambdaBase,
    /// Scale applied to the B-frame lambda only; the sweep variable.
    pub lambda_scale_k: f64,
    /// Full-pel motion search radius.
    pub search_range: u16,
    /// Luma histogram difference above which a frame starts a new scene.
    pub scene_cut_threshold: f64,
    /// Carried into the stream header for playback timing.
    pub frame_rate: FrameRate,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            qp: 32,
            gop_length: 4,
            profile: Profile::H264Like,
            hevc_p: 0.5,
            adaptive: false,
            lambda_base: LambdaBase::default(),
            lambda_scale_k: 1.0,
            search_range: 16,
            scene_cut_threshold: 0.5,
            frame_rate: FrameRate::default(),
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.qp > QP_MAX {
            return Err(CodecError::QpOutOfRange(self.qp));
        }
        if self.gop_length == 0 {
            return Err(CodecError::InvalidConfig(
                "gop_length must be positive".into(),
            ));
        }
        if !(self.hevc_p > 0.0 && self.hevc_p.is_finite()) {
            return Err(CodecError::InvalidConfig(format!(
                "hevc_p must be positive and finite, got {}",
                self.hevc_p
            )));
        }
        if !(self.lambda_scale_k > 0.0 && self.lambda_scale_k.is_finite()) {
            return Err(CodecError::InvalidConfig(format!(
                "lambda_scale_k must be positive and finite, got {}",
                self.lambda_scale_k
            )));
        }
        if self.search_range == 0 {
            return Err(CodecError::InvalidConfig(
                "search_range must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.scene_cut_threshold) {
            return Err(CodecError::InvalidConfig(format!(
                "scene_cut_threshold must lie in [0, 1], got {}",
                self.scene_cut_threshold
            )));
        }
        if self.frame_rate.num == 0 || self.frame_rate.den == 0 {
            return Err(CodecError::InvalidConfig(format!(
                "frame rate {}/{} has a zero term",
                self.frame_rate.num, self.frame_rate.den
            )));
        }
        Ok(())
    }

    /// B frames per GOP under this configuration.
    pub fn n_b(&self) -> u32 {
        (self.gop_length - 1) as u32
    }
}

/// Per-frame encode outcome, in coding order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    /// Display index.
    pub index: usize,
    pub frame_type: FrameType,
    /// The lambda the mode decisions used.
    pub lambda_used: f64,
    /// Bits this frame contributes to the payload, exact.
    pub bits: u64,
    /// Luma SSD between reconstruction and source over the true picture
    /// area, divided by width * height.
    pub mse_y: f64,
}

/// The three lambdas of one encode. B is pre-scaled by `lambda_scale_k`
/// and serves as the controller's nominal value.
struct LambdaSet {
    i: f64,
    p: f64,
    b_base: f64,
}

impl LambdaSet {
    fn from_config(config: &EncoderConfig) -> Result<Self> {
        let query = |frame_type| LambdaQuery {
            qp: config.qp,
            frame_type,
            profile: config.profile,
            n_b: config.n_b(),
            p: config.hevc_p,
        };
        Ok(Self {
            i: lambda_orig(&query(FrameType::I))?,
            p: lambda_orig(&query(FrameType::P))?,
            b_base: config.lambda_scale_k * lambda_orig(&query(FrameType::B))?,
        })
    }
}

/// Encodes a sequence, returning the stream and per-frame statistics in
/// coding order. The statistics' bit counts sum to the stream's
/// `total_bits` exactly.
pub fn encode_sequence(
    frames: &[VideoFrame],
    config: &EncoderConfig,
) -> Result<(Bitstream, Vec<FrameStats>)> {
    config.validate()?;
    let first = frames.first().ok_or(CodecError::EmptySequence)?;
    let (width, height) = (first.width(), first.height());
    check_uniform_dimensions(frames, width, height)?;

    let cuts = detect_scene_cuts(frames, config.scene_cut_threshold)?;
    let plan = plan_coding_order(frames.len(), config.gop_length, &cuts)?;

    let geo = Geometry::new(width, height);
    let pad = config.search_range as u32;
    let window = SearchWindow::new(config.search_range as u32);
    let lambdas = LambdaSet::from_config(config)?;
    let mut controller = ControllerState::new(
        ControllerParams::for_profile(config.profile),
        config.n_b(),
        config.lambda_base,
        lambdas.b_base,
    )?;

    let mut prev_ref: Option<ReferencePicture> = None;
    let mut curr_ref: Option<ReferencePicture> = None;
    let mut records = Vec::with_capacity(plan.len());
    let mut stats = Vec::with_capacity(plan.len());

    for planned in &plan {
        let source = &frames[planned.display_index];
        let padded = PaddedSource::new(source, &geo);
        let frame_type = planned.frame_type;

        // A fresh scene carries no usable distortion history.
        if frame_type == FrameType::I {
            controller.reset(lambdas.b_base);
        }
        let lambda_used = match frame_type {
            FrameType::I => lambdas.i,
            FrameType::P => lambdas.p,
            FrameType::B if config.adaptive => controller.next_b_lambda(lambdas.b_base)?,
            FrameType::B => lambdas.b_base,
        };

        let (fwd, bwd) = select_references(planned, prev_ref.as_ref(), curr_ref.as_ref());
        let (record, planes, bits) = encode_frame(
            &geo,
            config.qp,
            &padded,
            planned,
            lambda_used,
            fwd,
            bwd,
            &window,
        )?;

        let mse_y = cropped_mse_y(&planes, &geo, source);
        if frame_type != FrameType::I {
            controller.record_distortion(frame_type, mse_y)?;
        }
        stats.push(FrameStats {
            index: planned.display_index,
            frame_type,
            lambda_used,
            bits,
            mse_y,
        });
        records.push(record);

        if frame_type != FrameType::B {
            prev_ref = curr_ref.take();
            curr_ref = Some(ReferencePicture::new(
                planned.display_index,
                &geo,
                &planes,
                pad,
            ));
        }
    }

    let header = StreamHeader {
        width,
        height,
        frame_count: frames.len() as u32,
        qp: config.qp,
        search_range: config.search_range,
        frame_rate: config.frame_rate,
    };
    let stream = Bitstream::from_frames(header, records);
    debug_assert_eq!(
        stream.total_bits,
        stats.iter().map(|s| s.bits).sum::<u64>()
    );
    Ok((stream, stats))
}

fn select_references<'a>(
    planned: &PlannedFrame,
    prev_ref: Option<&'a ReferencePicture>,
    curr_ref: Option<&'a ReferencePicture>,
) -> (Option<&'a ReferencePicture>, Option<&'a ReferencePicture>) {
    match planned.frame_type {
        FrameType::I => (None, None),
        FrameType::P => {
            let anchor = curr_ref.expect("plan emits P frames only after an anchor");
            debug_assert_eq!(planned.prev_anchor, Some(anchor.display_index));
            (Some(anchor), None)
        }
        FrameType::B => {
            let fwd = prev_ref.expect("plan brackets B frames between anchors");
            let bwd = curr_ref.expect("plan brackets B frames between anchors");
            debug_assert_eq!(planned.prev_anchor, Some(fwd.display_index));
            debug_assert_eq!(planned.next_anchor, Some(bwd.display_index));
            (Some(fwd), Some(bwd))
        }
    }
}

/// Source planes padded to the macroblock grid by edge replication.
struct PaddedSource {
    y: Vec<u8>,
    u: Vec<u8>,
    v: Vec<u8>,
}

impl PaddedSource {
    fn new(frame: &VideoFrame, geo: &Geometry) -> Self {
        Self {
            y: pad_plane(&frame.plane_y, geo.width, geo.height, geo.pw, geo.ph),
            u: pad_plane(&frame.plane_u, geo.width / 2, geo.height / 2, geo.pcw, geo.pch),
            v: pad_plane(&frame.plane_v, geo.width / 2, geo.height / 2, geo.pcw, geo.pch),
        }
    }

    fn extract_mb(&self, geo: &Geometry, x0: usize, y0: usize) -> MbPixels {
        let mut px = MbPixels::zeroed();
        for row in 0..16 {
            let src = (y0 + row) * geo.pw + x0;
            px.y[row * 16..(row + 1) * 16].copy_from_slice(&self.y[src..src + 16]);
        }
        let (cx0, cy0) = (x0 / 2, y0 / 2);
        for row in 0..8 {
            let src = (cy0 + row) * geo.pcw + cx0;
            px.u[row * 8..(row + 1) * 8].copy_from_slice(&self.u[src..src + 8]);
            px.v[row * 8..(row + 1) * 8].copy_from_slice(&self.v[src..src + 8]);
        }
        px
    }
}

fn pad_plane(src: &[u8], w: usize, h: usize, pw: usize, ph: usize) -> Vec<u8> {
    let mut out = vec![0u8; pw * ph];
    for y in 0..ph {
        let sy = y.min(h - 1);
        let srow = &src[sy * w..sy * w + w];
        let orow = &mut out[y * pw..y * pw + pw];
        orow[..w].copy_from_slice(srow);
        orow[w..].fill(srow[w - 1]);
    }
    out
}

/// One evaluated coding choice for a macroblock.
struct Candidate {
    record: MacroblockRecord,
    pixels: MbPixels,
    distortion: f64,
    rate_bits: u64,
}

#[allow(clippy::too_many_arguments)]
fn encode_frame(
    geo: &Geometry,
    qp: u8,
    source: &PaddedSource,
    planned: &PlannedFrame,
    lambda: f64,
    fwd: Option<&ReferencePicture>,
    bwd: Option<&ReferencePicture>,
    window: &SearchWindow,
) -> Result<(FrameRecord, ReconPlanes, u64)> {
    let frame_type = planned.frame_type;
    let mut planes = ReconPlanes::new(geo);
    let mut preds = MvPredictors::default();
    let mut mbs = Vec::with_capacity(geo.mb_cols * geo.mb_rows);
    let mut bits = frame_header_bits(planned.display_index as u32);

    for mby in 0..geo.mb_rows {
        for mbx in 0..geo.mb_cols {
            let (x0, y0) = (mbx * BLOCK_SIZE, mby * BLOCK_SIZE);
            let src_mb = source.extract_mb(geo, x0, y0);
            let candidates = build_candidates(
                geo, qp, frame_type, &planes, &src_mb, fwd, bwd, x0, y0, preds, window, lambda,
            );
            let scored: Vec<(usize, f64, f64)> = candidates
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.distortion, c.rate_bits as f64))
                .collect();
            let (pick, _cost) = select_mode(&scored, lambda)?;
            let winner = candidates
                .into_iter()
                .nth(pick)
                .expect("selected index is in range");

            planes.blit(geo, mbx, mby, &winner.pixels);
            advance_predictors(winner.record.mode, &mut preds);
            bits += winner.rate_bits;
            mbs.push(winner.record);
        }
    }

    let record = FrameRecord {
        display_index: planned.display_index as u32,
        frame_type,
        lambda_milli: lambda_to_milli(lambda),
        mbs,
    };
    Ok((record, planes, bits))
}

/// Evaluates every mode legal for this frame type, in the fixed order
/// skip, forward, backward, bidirectional, intra DC/H/V. The order is
/// the tie-breaking order of the mode decision.
#[allow(clippy::too_many_arguments)]
fn build_candidates(
    geo: &Geometry,
    qp: u8,
    frame_type: FrameType,
    planes: &ReconPlanes,
    src_mb: &MbPixels,
    fwd: Option<&ReferencePicture>,
    bwd: Option<&ReferencePicture>,
    x0: usize,
    y0: usize,
    preds: MvPredictors,
    window: &SearchWindow,
    lambda: f64,
) -> Vec<Candidate> {
    let ctx = MbContext {
        geo,
        recon: planes,
        fwd,
        bwd,
        x0,
        y0,
    };
    let mut out = Vec::with_capacity(7);
    if frame_type != FrameType::I {
        out.push(make_candidate(BlockMode::Skip, &ctx, src_mb, qp, frame_type, preds));

        let f = fwd.expect("inter frames carry a forward reference");
        let (mv_fwd, _) = motion_search(
            &src_mb.y, 16, 16, &f.y, x0 as i32, y0 as i32, preds.fwd, window, lambda,
        );
        out.push(make_candidate(
            BlockMode::InterFwd(mv_fwd),
            &ctx,
            src_mb,
            qp,
            frame_type,
            preds,
        ));

        if frame_type == FrameType::B {
            let b = bwd.expect("B frames carry a backward reference");
            let (mv_bwd, _) = motion_search(
                &src_mb.y, 16, 16, &b.y, x0 as i32, y0 as i32, preds.bwd, window, lambda,
            );
            out.push(make_candidate(
                BlockMode::InterBwd(mv_bwd),
                &ctx,
                src_mb,
                qp,
                frame_type,
                preds,
            ));
            out.push(make_candidate(
                BlockMode::InterBi(mv_fwd, mv_bwd),
                &ctx,
                src_mb,
                qp,
                frame_type,
                preds,
            ));
        }
    }
    for sub in IntraMode::ALL {
        out.push(make_candidate(
            BlockMode::Intra(sub),
            &ctx,
            src_mb,
            qp,
            frame_type,
            preds,
        ));
    }
    out
}

fn make_candidate(
    mode: BlockMode,
    ctx: &MbContext<'_>,
    src_mb: &MbPixels,
    qp: u8,
    frame_type: FrameType,
    preds: MvPredictors,
) -> Candidate {
    let mut pixels = predict_mb(ctx, mode);
    let coeffs = if mode == BlockMode::Skip {
        Vec::new()
    } else {
        forward_residual(&pixels, src_mb, qp)
    };
    apply_residual(&mut pixels, &coeffs, qp);
    let distortion = block_ssd(&pixels.y, &src_mb.y) as f64;
    let record = MacroblockRecord { mode, coeffs };
    let rate_bits = mb_record_bits(frame_type, &record, preds);
    Candidate {
        record,
        pixels,
        distortion,
        rate_bits,
    }
}

/// Transforms and quantizes the residual of each of the six 8x8 blocks.
fn forward_residual(pred: &MbPixels, src: &MbPixels, qp: u8) -> Vec<[i32; 64]> {
    let mut coeffs = Vec::with_capacity(BLOCKS_PER_MB);
    for (bx, by) in LUMA_BLOCK_ORIGINS {
        coeffs.push(code_block(&pred.y, &src.y, 16, bx, by, qp));
    }
    coeffs.push(code_block(&pred.u, &src.u, 8, 0, 0, qp));
    coeffs.push(code_block(&pred.v, &src.v, 8, 0, 0, qp));
    coeffs
}

fn code_block(pred: &[u8], src: &[u8], stride: usize, bx: usize, by: usize, qp: u8) -> [i32; 64] {
    let mut residual = [0i32; 64];
    for row in 0..8 {
        for col in 0..8 {
            let i = (by + row) * stride + bx + col;
            residual[row * 8 + col] = src[i] as i32 - pred[i] as i32;
        }
    }
    let freq = fdct8(&residual);
    let mut levels = [0i32; 64];
    for (level, &coeff) in levels.iter_mut().zip(&freq) {
        *level = quantize(coeff, qp);
    }
    levels
}

fn block_ssd(a: &[u8], b: &[u8]) -> u64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum()
}

/// Frame record length outside the macroblock payload: Exp-Golomb coded
/// display index, 2 frame type bits, 32 lambda metadata bits.
fn frame_header_bits(display_index: u32) -> u64 {
    len_ue(display_index as u64) + 34
}

fn lambda_to_milli(lambda: f64) -> u32 {
    (lambda * 1000.0).round().min(u32::MAX as f64) as u32
}

/// Luma MSE between reconstruction and source over the true picture area.
fn cropped_mse_y(planes: &ReconPlanes, geo: &Geometry, source: &VideoFrame) -> f64 {
    let mut ssd = 0u64;
    for row in 0..geo.height {
        let recon = &planes.y[row * geo.pw..row * geo.pw + geo.width];
        let src = &source.plane_y[row * geo.width..(row + 1) * geo.width];
        ssd += block_ssd(recon, src);
    }
    ssd as f64 / (geo.width * geo.height) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::decode_sequence;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frames(count: usize, w: u32, h: u32, seed: u64) -> Vec<VideoFrame> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let y = (0..w * h).map(|_| rng.gen()).collect();
                let c = (w * h / 4) as usize;
                let u = (0..c).map(|_| rng.gen()).collect();
                let v = (0..c).map(|_| rng.gen()).collect();
                VideoFrame::new(w, h, y, u, v, i).unwrap()
            })
            .collect()
    }

    #[test]
    fn config_validation_rejects_bad_fields() {
        let ok = EncoderConfig::default();
        assert!(ok.validate().is_ok());

        let mut bad = EncoderConfig::default();
        bad.qp = 52;
        assert!(matches!(bad.validate(), Err(CodecError::QpOutOfRange(52))));

        let mut bad = EncoderConfig::default();
        bad.gop_length = 0;
        assert!(bad.validate().is_err());

        let mut bad = EncoderConfig::default();
        bad.lambda_scale_k = 0.0;
        assert!(bad.validate().is_err());

        let mut bad = EncoderConfig::default();
        bad.search_range = 0;
        assert!(bad.validate().is_err());

        let mut bad = EncoderConfig::default();
        bad.scene_cut_threshold = 1.5;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_input_is_rejected() {
        let config = EncoderConfig::default();
        assert!(matches!(
            encode_sequence(&[], &config),
            Err(CodecError::EmptySequence)
        ));
    }

    #[test]
    fn pad_plane_replicates_edges() {
        // 2x2 source into 4x4: right column and bottom row replicate.
        let src = [1u8, 2, 3, 4];
        let padded = pad_plane(&src, 2, 2, 4, 4);
        assert_eq!(
            padded,
            vec![1, 2, 2, 2, 3, 4, 4, 4, 3, 4, 4, 4, 3, 4, 4, 4]
        );
    }

    #[test]
    fn stats_bits_sum_to_stream_total() {
        let frames = random_frames(9, 32, 32, 11);
        let config = EncoderConfig::default();
        let (stream, stats) = encode_sequence(&frames, &config).unwrap();
        assert_eq!(stats.len(), 9);
        assert_eq!(
            stats.iter().map(|s| s.bits).sum::<u64>(),
            stream.total_bits
        );

        // Coding order: anchors first.
        let order: Vec<usize> = stats.iter().map(|s| s.index).collect();
        assert_eq!(order, vec![0, 4, 1, 2, 3, 8, 5, 6, 7]);
    }

    #[test]
    fn encoder_mse_matches_decoded_output() {
        let frames = random_frames(5, 32, 16, 23);
        let config = EncoderConfig {
            qp: 40,
            ..EncoderConfig::default()
        };
        let (stream, stats) = encode_sequence(&frames, &config).unwrap();
        let decoded = decode_sequence(&stream).unwrap();
        assert_eq!(decoded.len(), frames.len());
        for stat in &stats {
            let mse = crate::metrics::frame_mse_y(&frames[stat.index], &decoded[stat.index]).unwrap();
            assert_eq!(mse, stat.mse_y);
        }
    }

    #[test]
    fn identical_frames_code_as_skip() {
        let frames: Vec<VideoFrame> = (0..5)
            .map(|i| VideoFrame::flat(32, 32, 128, 128, 128, i).unwrap())
            .collect();
        let (stream, _) = encode_sequence(&frames, &EncoderConfig::default()).unwrap();
        for record in &stream.frames[1..] {
            for mb in &record.mbs {
                assert_eq!(mb.mode, BlockMode::Skip);
            }
        }
    }
}
