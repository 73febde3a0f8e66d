//! Deterministic scene builders shared by the integration tests.

use lfx_codec::encoder::{encode_sequence, EncoderConfig};
use lfx_codec::frame::VideoFrame;
use lfx_codec::{Bitstream, FrameStats};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Periodic textured scene translating left one pixel per frame, so
/// every block of every frame has an exact full-pel match in any
/// reference frame.
pub fn translating_frame(width: u32, height: u32, shift: usize, index: usize) -> VideoFrame {
    let (w, h) = (width as usize, height as usize);
    let mut y = Vec::with_capacity(w * h);
    for py in 0..h {
        for px in 0..w {
            let x = (px + shift) % w;
            let v = 80.0
                + 50.0 * ((x as f64) * std::f64::consts::TAU / w as f64).sin()
                + 30.0 * ((py as f64) * std::f64::consts::TAU / h as f64).cos()
                + 20.0 * (((x + 3 * py) as f64) * 0.7).sin();
            y.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    let (cw, ch) = (w / 2, h / 2);
    let mut u = Vec::with_capacity(cw * ch);
    let mut v = Vec::with_capacity(cw * ch);
    for cy in 0..ch {
        for cx in 0..cw {
            let x = (cx + shift / 2) % cw;
            u.push((110 + (x * 40 / cw.max(1))) as u8);
            v.push((150 - (cy * 30 / ch.max(1))) as u8);
        }
    }
    VideoFrame::new(width, height, y, u, v, index).unwrap()
}

/// Independent uniform noise in a controllable band around `mid`.
pub fn noise_frame(
    width: u32,
    height: u32,
    mid: u8,
    spread: u8,
    rng: &mut ChaCha8Rng,
    index: usize,
) -> VideoFrame {
    let (w, h) = (width as usize, height as usize);
    let lo = mid.saturating_sub(spread);
    let hi = mid.saturating_add(spread);
    let mut draw = |n: usize| (0..n).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<u8>>();
    let y = draw(w * h);
    let u = draw(w * h / 4);
    let v = draw(w * h / 4);
    VideoFrame::new(width, height, y, u, v, index).unwrap()
}

pub fn encode_at(
    frames: &[VideoFrame],
    qp: u8,
) -> (Bitstream, Vec<FrameStats>) {
    let config = EncoderConfig { qp, ..EncoderConfig::default() };
    encode_sequence(frames, &config).unwrap()
}
