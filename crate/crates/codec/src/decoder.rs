//! Stream decoder and the in-loop reconstruction the encoder embeds.
//!
//! Prediction and residual application live here so encoder and decoder
//! run literally the same integer arithmetic; reconstruction equality is
//! then structural rather than numerical. Pictures are processed on a
//! macroblock grid over dimensions padded up to multiples of 16 and
//! cropped to the true picture size on output.

use crate::bitstream::{Bitstream, FrameRecord};
use crate::error::{CodecError, Result};
use crate::frame::VideoFrame;
use crate::gop::FrameType;
use crate::motion::{MotionVector, PaddedPlane};
use crate::predict::{bi_average, inter_predict, intra_predict, BlockMode};
use crate::quant::dequantize;
use crate::transform::idct8;

/// Top-left corners of the four 8x8 luma transform blocks inside a
/// macroblock, in coding order.
pub(crate) const LUMA_BLOCK_ORIGINS: [(usize, usize); 4] = [(0, 0), (8, 0), (0, 8), (8, 8)];

/// Picture dimensions and the padded macroblock grid derived from them.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Geometry {
    pub width: usize,
    pub height: usize,
    /// Luma dimensions padded to multiples of 16.
    pub pw: usize,
    pub ph: usize,
    /// Chroma dimensions padded to multiples of 8.
    pub pcw: usize,
    pub pch: usize,
    pub mb_cols: usize,
    pub mb_rows: usize,
}

impl Geometry {
    pub fn new(width: u32, height: u32) -> Self {
        let (width, height) = (width as usize, height as usize);
        let mb_cols = width.div_ceil(16);
        let mb_rows = height.div_ceil(16);
        Self {
            width,
            height,
            pw: mb_cols * 16,
            ph: mb_rows * 16,
            pcw: mb_cols * 8,
            pch: mb_rows * 8,
            mb_cols,
            mb_rows,
        }
    }
}

/// Reconstructed planes of one picture at padded dimensions.
#[derive(Debug, Clone)]
pub(crate) struct ReconPlanes {
    pub y: Vec<u8>,
    pub u: Vec<u8>,
    pub v: Vec<u8>,
}

impl ReconPlanes {
    pub fn new(geo: &Geometry) -> Self {
        Self {
            y: vec![0; geo.pw * geo.ph],
            u: vec![0; geo.pcw * geo.pch],
            v: vec![0; geo.pcw * geo.pch],
        }
    }

    /// Writes one macroblock's pixels into the planes.
    pub fn blit(&mut self, geo: &Geometry, mbx: usize, mby: usize, px: &MbPixels) {
        let (x0, y0) = (mbx * 16, mby * 16);
        for row in 0..16 {
            let dst = (y0 + row) * geo.pw + x0;
            self.y[dst..dst + 16].copy_from_slice(&px.y[row * 16..(row + 1) * 16]);
        }
        let (cx0, cy0) = (mbx * 8, mby * 8);
        for row in 0..8 {
            let dst = (cy0 + row) * geo.pcw + cx0;
            self.u[dst..dst + 8].copy_from_slice(&px.u[row * 8..(row + 1) * 8]);
            self.v[dst..dst + 8].copy_from_slice(&px.v[row * 8..(row + 1) * 8]);
        }
    }

    /// Crops to the true picture size.
    pub fn crop_to_frame(&self, geo: &Geometry, index: usize) -> Result<VideoFrame> {
        let (w, h) = (geo.width, geo.height);
        let mut y = Vec::with_capacity(w * h);
        for row in 0..h {
            y.extend_from_slice(&self.y[row * geo.pw..row * geo.pw + w]);
        }
        let (cw, ch) = (w / 2, h / 2);
        let mut u = Vec::with_capacity(cw * ch);
        let mut v = Vec::with_capacity(cw * ch);
        for row in 0..ch {
            u.extend_from_slice(&self.u[row * geo.pcw..row * geo.pcw + cw]);
            v.extend_from_slice(&self.v[row * geo.pcw..row * geo.pcw + cw]);
        }
        VideoFrame::new(w as u32, h as u32, y, u, v, index)
    }
}

/// A reconstructed anchor, padded for motion compensation.
#[derive(Debug, Clone)]
pub(crate) struct ReferencePicture {
    pub display_index: usize,
    pub y: PaddedPlane,
    pub u: PaddedPlane,
    pub v: PaddedPlane,
}

impl ReferencePicture {
    pub fn new(display_index: usize, geo: &Geometry, planes: &ReconPlanes, pad: u32) -> Self {
        Self {
            display_index,
            y: PaddedPlane::from_plane(&planes.y, geo.pw as u32, geo.ph as u32, pad),
            u: PaddedPlane::from_plane(&planes.u, geo.pcw as u32, geo.pch as u32, pad),
            v: PaddedPlane::from_plane(&planes.v, geo.pcw as u32, geo.pch as u32, pad),
        }
    }
}

/// One macroblock's worth of pixels: 16x16 luma, 8x8 each chroma plane.
#[derive(Debug, Clone)]
pub(crate) struct MbPixels {
    pub y: [u8; 256],
    pub u: [u8; 64],
    pub v: [u8; 64],
}

impl MbPixels {
    pub fn zeroed() -> Self {
        Self {
            y: [0; 256],
            u: [0; 64],
            v: [0; 64],
        }
    }
}

/// Everything prediction needs for the macroblock at (x0, y0): the
/// current picture's reconstruction so far (intra neighbours) and the
/// reference pictures legal for this frame type.
pub(crate) struct MbContext<'a> {
    pub geo: &'a Geometry,
    pub recon: &'a ReconPlanes,
    pub fwd: Option<&'a ReferencePicture>,
    pub bwd: Option<&'a ReferencePicture>,
    pub x0: usize,
    pub y0: usize,
}

/// Forms the prediction for `mode`. Inter modes read the padded
/// references; intra modes read already-reconstructed neighbours of the
/// current picture.
pub(crate) fn predict_mb(ctx: &MbContext<'_>, mode: BlockMode) -> MbPixels {
    let mut px = MbPixels::zeroed();
    let (x0, y0) = (ctx.x0 as i32, ctx.y0 as i32);
    let (cx0, cy0) = (x0 / 2, y0 / 2);
    match mode {
        BlockMode::Skip => match (ctx.fwd, ctx.bwd) {
            // B frame: zero-vector bidirectional average.
            (Some(f), Some(b)) => {
                bi_predict_mb(&mut px, f, b, MotionVector::ZERO, MotionVector::ZERO, x0, y0);
            }
            // P frame: co-located copy.
            (Some(f), None) => {
                f.y.copy_block(x0, y0, 16, 16, &mut px.y);
                f.u.copy_block(cx0, cy0, 8, 8, &mut px.u);
                f.v.copy_block(cx0, cy0, 8, 8, &mut px.v);
            }
            _ => unreachable!("skip requires a forward reference"),
        },
        BlockMode::InterFwd(mv) => {
            let f = ctx.fwd.expect("forward reference present");
            inter_predict_mb(&mut px, f, mv, x0, y0);
        }
        BlockMode::InterBwd(mv) => {
            let b = ctx.bwd.expect("backward reference present");
            inter_predict_mb(&mut px, b, mv, x0, y0);
        }
        BlockMode::InterBi(mv_fwd, mv_bwd) => {
            let f = ctx.fwd.expect("forward reference present");
            let b = ctx.bwd.expect("backward reference present");
            bi_predict_mb(&mut px, f, b, mv_fwd, mv_bwd, x0, y0);
        }
        BlockMode::Intra(sub) => {
            let geo = ctx.geo;
            intra_predict(&ctx.recon.y, geo.pw, ctx.x0, ctx.y0, 16, 16, sub, &mut px.y);
            let (ux0, uy0) = (ctx.x0 / 2, ctx.y0 / 2);
            intra_predict(&ctx.recon.u, geo.pcw, ux0, uy0, 8, 8, sub, &mut px.u);
            intra_predict(&ctx.recon.v, geo.pcw, ux0, uy0, 8, 8, sub, &mut px.v);
        }
    }
    px
}

fn inter_predict_mb(px: &mut MbPixels, r: &ReferencePicture, mv: MotionVector, x0: i32, y0: i32) {
    let cmv = mv.halved();
    inter_predict(&r.y, x0, y0, 16, 16, mv, &mut px.y);
    inter_predict(&r.u, x0 / 2, y0 / 2, 8, 8, cmv, &mut px.u);
    inter_predict(&r.v, x0 / 2, y0 / 2, 8, 8, cmv, &mut px.v);
}

fn bi_predict_mb(
    px: &mut MbPixels,
    f: &ReferencePicture,
    b: &ReferencePicture,
    mv_fwd: MotionVector,
    mv_bwd: MotionVector,
    x0: i32,
    y0: i32,
) {
    let mut fwd = MbPixels::zeroed();
    let mut bwd = MbPixels::zeroed();
    inter_predict_mb(&mut fwd, f, mv_fwd, x0, y0);
    inter_predict_mb(&mut bwd, b, mv_bwd, x0, y0);
    bi_average(&fwd.y, &bwd.y, &mut px.y);
    bi_average(&fwd.u, &bwd.u, &mut px.u);
    bi_average(&fwd.v, &bwd.v, &mut px.v);
}

/// Adds the dequantized, inverse-transformed residual onto the
/// prediction. An empty coefficient list (skip) leaves it untouched.
pub(crate) fn apply_residual(px: &mut MbPixels, coeffs: &[[i32; 64]], qp: u8) {
    let Some((luma, chroma)) = coeffs.split_at_checked(4) else {
        debug_assert!(coeffs.is_empty());
        return;
    };
    for (levels, &(bx, by)) in luma.iter().zip(&LUMA_BLOCK_ORIGINS) {
        add_block(&mut px.y, 16, bx, by, levels, qp);
    }
    add_block(&mut px.u, 8, 0, 0, &chroma[0], qp);
    add_block(&mut px.v, 8, 0, 0, &chroma[1], qp);
}

fn add_block(plane: &mut [u8], stride: usize, bx: usize, by: usize, levels: &[i32; 64], qp: u8) {
    if levels.iter().all(|&l| l == 0) {
        return;
    }
    let mut deq = [0i64; 64];
    for (d, &l) in deq.iter_mut().zip(levels) {
        *d = dequantize(l, qp);
    }
    let residual = idct8(&deq);
    for row in 0..8 {
        for col in 0..8 {
            let i = (by + row) * stride + bx + col;
            plane[i] = (plane[i] as i32 + residual[row * 8 + col]).clamp(0, 255) as u8;
        }
    }
}

/// Reconstructs one frame from its record.
pub(crate) fn reconstruct_frame(
    record: &FrameRecord,
    geo: &Geometry,
    qp: u8,
    fwd: Option<&ReferencePicture>,
    bwd: Option<&ReferencePicture>,
) -> Result<ReconPlanes> {
    let mb_count = geo.mb_cols * geo.mb_rows;
    if record.mbs.len() != mb_count {
        return Err(CodecError::MalformedPayload(format!(
            "frame {} carries {} macroblocks, geometry needs {mb_count}",
            record.display_index,
            record.mbs.len()
        )));
    }
    let mut planes = ReconPlanes::new(geo);
    for (i, mb) in record.mbs.iter().enumerate() {
        let (mbx, mby) = (i % geo.mb_cols, i / geo.mb_cols);
        let ctx = MbContext {
            geo,
            recon: &planes,
            fwd,
            bwd,
            x0: mbx * 16,
            y0: mby * 16,
        };
        let mut px = predict_mb(&ctx, mb.mode);
        apply_residual(&mut px, &mb.coeffs, qp);
        planes.blit(geo, mbx, mby, &px);
    }
    Ok(planes)
}

/// Parses and validates stream bytes without decoding pixels.
pub fn parse_bitstream(bytes: &[u8]) -> Result<Bitstream> {
    Bitstream::parse(bytes)
}

/// Decodes every frame, returning them in display order.
pub fn decode_sequence(stream: &Bitstream) -> Result<Vec<VideoFrame>> {
    let header = &stream.header;
    let geo = Geometry::new(header.width, header.height);
    let pad = header.search_range.max(1) as u32;
    if stream.frames.len() != header.frame_count as usize {
        return Err(CodecError::MalformedPayload(format!(
            "header announces {} frames, payload holds {}",
            header.frame_count,
            stream.frames.len()
        )));
    }

    let mut prev_ref: Option<ReferencePicture> = None;
    let mut curr_ref: Option<ReferencePicture> = None;
    let mut out: Vec<Option<VideoFrame>> = vec![None; stream.frames.len()];
    for record in &stream.frames {
        let (fwd, bwd) = match record.frame_type {
            FrameType::I => (None, None),
            FrameType::P => {
                let anchor = curr_ref.as_ref().ok_or_else(|| {
                    CodecError::MalformedPayload(format!(
                        "P frame {} precedes any anchor",
                        record.display_index
                    ))
                })?;
                (Some(anchor), None)
            }
            FrameType::B => match (prev_ref.as_ref(), curr_ref.as_ref()) {
                (Some(p), Some(c)) => (Some(p), Some(c)),
                _ => {
                    return Err(CodecError::MalformedPayload(format!(
                        "B frame {} lacks two anchors",
                        record.display_index
                    )))
                }
            },
        };
        let planes = reconstruct_frame(record, &geo, header.qp, fwd, bwd)?;

        let display_index = record.display_index as usize;
        let slot = out.get_mut(display_index).ok_or_else(|| {
            CodecError::MalformedPayload(format!(
                "display index {display_index} outside 0..{}",
                stream.frames.len()
            ))
        })?;
        if slot.is_some() {
            return Err(CodecError::MalformedPayload(format!(
                "display index {display_index} coded twice"
            )));
        }
        *slot = Some(planes.crop_to_frame(&geo, display_index)?);

        if record.frame_type != FrameType::B {
            prev_ref = curr_ref.take();
            curr_ref = Some(ReferencePicture::new(display_index, &geo, &planes, pad));
        }
    }
    // Every slot filled: coding order is a permutation of display order.
    out.into_iter()
        .map(|f| f.ok_or_else(|| CodecError::MalformedPayload("missing display index".into())))
        .collect()
}
