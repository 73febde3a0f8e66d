//! Deterministic synthetic test content in three motion classes.
//!
//! STATIC is a frozen scene from a locked-down camera, DYNTEX redraws a
//! band-limited noise field every frame, and MIXED translates
//! low-contrast rectangles over a still textured background. Generation
//! is a pure function of (class, seed, dims, count); the same spec
//! always yields bit-identical frames.

use lfx_codec::frame::VideoFrame;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};

/// Three GOPs plus the trailing anchor; shorter clips leave the
/// controller no room to act.
pub const MIN_FRAMES: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContentClass {
    /// Frozen scene; no temporal change at all.
    Static,
    /// Dynamic texture: temporally decorrelated band-limited noise.
    Dyntex,
    /// Moving textured objects over a still textured background.
    Mixed,
}

impl ContentClass {
    pub const ALL: [ContentClass; 3] =
        [ContentClass::Static, ContentClass::Dyntex, ContentClass::Mixed];

    pub fn name(self) -> &'static str {
        match self {
            ContentClass::Static => "static",
            ContentClass::Dyntex => "dyntex",
            ContentClass::Mixed => "mixed",
        }
    }
}

impl std::str::FromStr for ContentClass {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(ContentClass::Static),
            "dyntex" => Ok(ContentClass::Dyntex),
            "mixed" => Ok(ContentClass::Mixed),
            other => Err(LabError::Usage(format!(
                "unknown content class {other:?} (expected static, dyntex, or mixed)"
            ))),
        }
    }
}

impl std::fmt::Display for ContentClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub class: ContentClass,
    pub seed: u64,
    pub width: u32,
    pub height: u32,
    pub frames: usize,
}

impl SynthSpec {
    /// Stable identifier used as the `seq` key in experiment CSVs.
    pub fn sequence_id(&self) -> String {
        format!("{}-{}", self.class.name(), self.seed)
    }

    fn validate(&self) -> Result<()> {
        let (w, h) = (self.width, self.height);
        if w == 0 || h == 0 || w % 2 != 0 || h % 2 != 0 {
            return Err(LabError::Data(format!(
                "synthetic dimensions {w}x{h} must be even and nonzero"
            )));
        }
        if self.frames < MIN_FRAMES {
            return Err(LabError::Data(format!(
                "synthetic sequences need at least {MIN_FRAMES} frames, got {}",
                self.frames
            )));
        }
        Ok(())
    }

    /// Classes are salted so equal seeds do not share a noise stream.
    fn rng(&self) -> ChaCha8Rng {
        let salt = match self.class {
            ContentClass::Static => 0x53,
            ContentClass::Dyntex => 0x44,
            ContentClass::Mixed => 0x4d,
        } as u64;
        ChaCha8Rng::seed_from_u64(self.seed ^ (salt << 56))
    }
}

/// Band-limited field: values on a coarse grid, bilinearly interpolated
/// and tiled periodically.
struct Field {
    grid_w: usize,
    grid_h: usize,
    cell: f64,
    values: Vec<f64>,
}

impl Field {
    fn new(rng: &mut ChaCha8Rng, grid_w: usize, grid_h: usize, cell: f64, amp: f64) -> Self {
        let values = (0..grid_w * grid_h)
            .map(|_| rng.gen_range(-amp..=amp))
            .collect();
        Self { grid_w, grid_h, cell, values }
    }

    fn at(&self, gx: usize, gy: usize) -> f64 {
        self.values[(gy % self.grid_h) * self.grid_w + (gx % self.grid_w)]
    }

    /// Periodic bilinear sample at pixel coordinates (x, y).
    fn sample(&self, x: f64, y: f64) -> f64 {
        let u = x / self.cell;
        let v = y / self.cell;
        let iu = u.floor();
        let iv = v.floor();
        let fu = u - iu;
        let fv = v - iv;
        let gx = iu.rem_euclid(self.grid_w as f64) as usize;
        let gy = iv.rem_euclid(self.grid_h as f64) as usize;
        let top = self.at(gx, gy) * (1.0 - fu) + self.at(gx + 1, gy) * fu;
        let bot = self.at(gx, gy + 1) * (1.0 - fu) + self.at(gx + 1, gy + 1) * fu;
        top * (1.0 - fv) + bot * fv
    }
}

fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn synth_sequence(spec: &SynthSpec) -> Result<Vec<VideoFrame>> {
    spec.validate()?;
    let mut rng = spec.rng();
    let frames = match spec.class {
        ContentClass::Static => gen_static(spec, &mut rng),
        ContentClass::Dyntex => gen_dyntex(spec, &mut rng),
        ContentClass::Mixed => gen_mixed(spec, &mut rng),
    };
    Ok(frames)
}

/// A fixed scene (triangle-wave gradients plus a smooth pattern) from a
/// locked-down camera: every frame is identical. The degenerate end of
/// the low-motion class; anchors and B frames are equally predictable.
fn gen_static(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<VideoFrame> {
    let (w, h) = (spec.width as usize, spec.height as usize);
    let pattern = Field::new(rng, w.div_ceil(8).max(2), h.div_ceil(8).max(2), 8.0, 14.0);
    let chroma_u = Field::new(rng, 4, 4, 16.0, 6.0);
    let chroma_v = Field::new(rng, 4, 4, 16.0, 6.0);
    let tri = |u: f64, period: f64| {
        let phase = (u / period).rem_euclid(1.0);
        2.0 * (phase - 0.5).abs()
    };
    let scene = move |x: f64, y: f64, pattern: &Field| {
        90.0 + 70.0 * tri(x, w as f64) + 40.0 * tri(y, h as f64) + pattern.sample(x, y)
    };

    let mut y = Vec::with_capacity(w * h);
    for py in 0..h {
        for px in 0..w {
            y.push(to_u8(scene(px as f64, py as f64, &pattern)));
        }
    }
    let (u, v) = chroma_planes(w, h, |cx, cy| {
        (120.0 + chroma_u.sample(cx, cy), 134.0 + chroma_v.sample(cx, cy))
    });

    (0..spec.frames)
        .map(|t| {
            VideoFrame::new(spec.width, spec.height, y.clone(), u.clone(), v.clone(), t)
                .expect("generated planes match the spec dimensions")
        })
        .collect()
}

/// Fresh band-limited noise every frame; consecutive frames are
/// statistically independent, so motion compensation buys nothing. The
/// field is smooth (cells are close to macroblock size), so any block
/// is cheap to repair once the coder decides to spend bits on it, and
/// churn amplitude ramps across the width, from faint flicker on the
/// left to strong boiling on the right, so that decision flips block by
/// block as the rate budget tightens rather than all at once.
fn gen_dyntex(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<VideoFrame> {
    let (w, h) = (spec.width as usize, spec.height as usize);
    let grid_w = w.div_ceil(12).max(2);
    let grid_h = h.div_ceil(12).max(2);
    let ramp_span = (w.max(2) - 1) as f64;

    (0..spec.frames)
        .map(|t| {
            let field = Field::new(rng, grid_w, grid_h, 12.0, 1.0);
            let chroma = Field::new(rng, grid_w, grid_h, 6.0, 9.0);
            let mut y = Vec::with_capacity(w * h);
            for py in 0..h {
                for px in 0..w {
                    let amp = 12.0 + 58.0 * px as f64 / ramp_span;
                    y.push(to_u8(128.0 + amp * field.sample(px as f64, py as f64)));
                }
            }
            let (u, v) = chroma_planes(w, h, |cx, cy| {
                (128.0 + chroma.sample(cx, cy), 128.0 - chroma.sample(cy, cx))
            });
            VideoFrame::new(spec.width, spec.height, y, u, v, t)
                .expect("generated planes match the spec dimensions")
        })
        .collect()
}

/// A textured rectangle translating with integer velocity, bouncing off
/// the frame edges.
struct MovingRect {
    rw: i64,
    rh: i64,
    x0: i64,
    y0: i64,
    vx: i64,
    vy: i64,
    luma_offset: f64,
    chroma_u: f64,
    chroma_v: f64,
    texture: Field,
}

impl MovingRect {
    /// Top-left corner at frame t, reflecting off the travel limits.
    fn position(&self, t: usize, frame_w: i64, frame_h: i64) -> (i64, i64) {
        let reflect = |start: i64, vel: i64, limit: i64| -> i64 {
            if limit <= 0 {
                return 0;
            }
            let period = 2 * limit;
            let m = (start + vel * t as i64).rem_euclid(period);
            if m <= limit {
                m
            } else {
                period - m
            }
        };
        (
            reflect(self.x0, self.vx, frame_w - self.rw),
            reflect(self.y0, self.vy, frame_h - self.rh),
        )
    }
}

/// A smooth background (gradient plus a faint large-cell texture)
/// crossed by three rigid rectangles at one, two, and three pixels per
/// frame. The background is cheap to repair wherever a rectangle just
/// left, so motion stays trackable at every QP. Speeds, sizes, and
/// contrast magnitudes are fixed so every seed carries the same motion
/// statistics; the seed varies only placement, direction, sign, and
/// texture.
fn gen_mixed(spec: &SynthSpec, rng: &mut ChaCha8Rng) -> Vec<VideoFrame> {
    let (w, h) = (spec.width as usize, spec.height as usize);
    let (wi, hi) = (w as i64, h as i64);
    let background = Field::new(rng, w.div_ceil(16).max(2), h.div_ceil(16).max(2), 16.0, 5.0);

    let rects: Vec<MovingRect> = (0..3)
        .map(|i| {
            let rw = (wi / 5).clamp(8, 16);
            let rh = (hi / 5).clamp(8, 16);
            let speed = i as i64 + 1;
            let sign = if rng.gen::<bool>() { 1 } else { -1 };
            // Axis-aligned motion; rectangle i moves at i + 1 px/frame.
            let (vx, vy) = if rng.gen::<bool>() {
                (sign * speed, 0)
            } else {
                (0, sign * speed)
            };
            let offset_sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            MovingRect {
                rw,
                rh,
                x0: rng.gen_range(0..=(wi - rw).max(0)),
                y0: rng.gen_range(0..=(hi - rh).max(0)),
                vx,
                vy,
                luma_offset: offset_sign * (20.0 + 6.0 * i as f64),
                chroma_u: rng.gen_range(-24.0..=24.0),
                chroma_v: rng.gen_range(-24.0..=24.0),
                texture: Field::new(rng, 8, 8, 4.0, 10.0),
            }
        })
        .collect();

    (0..spec.frames)
        .map(|t| {
            let positions: Vec<(i64, i64)> =
                rects.iter().map(|r| r.position(t, wi, hi)).collect();
            let mut y = Vec::with_capacity(w * h);
            for py in 0..h {
                for px in 0..w {
                    let grad = 70.0 + 70.0 * px as f64 / w as f64 + 40.0 * py as f64 / h as f64;
                    let mut value = grad + background.sample(px as f64, py as f64);
                    // Last rectangle painted wins, a fixed z-order.
                    for (rect, &(rx, ry)) in rects.iter().zip(&positions) {
                        let (dx, dy) = (px as i64 - rx, py as i64 - ry);
                        if (0..rect.rw).contains(&dx) && (0..rect.rh).contains(&dy) {
                            value = grad
                                + rect.luma_offset
                                + rect.texture.sample(dx as f64, dy as f64);
                        }
                    }
                    y.push(to_u8(value));
                }
            }
            let (u, v) = chroma_planes(w, h, |cx, cy| {
                let (px, py) = ((cx * 2.0) as i64, (cy * 2.0) as i64);
                let mut uv = (122.0, 132.0);
                for (rect, &(rx, ry)) in rects.iter().zip(&positions) {
                    if (rx..rx + rect.rw).contains(&px) && (ry..ry + rect.rh).contains(&py) {
                        uv = (128.0 + rect.chroma_u, 128.0 + rect.chroma_v);
                    }
                }
                uv
            });
            VideoFrame::new(spec.width, spec.height, y, u, v, t)
                .expect("generated planes match the spec dimensions")
        })
        .collect()
}

/// Builds half-resolution U and V planes by evaluating `f` at each
/// chroma site's luma coordinates.
fn chroma_planes(w: usize, h: usize, f: impl Fn(f64, f64) -> (f64, f64)) -> (Vec<u8>, Vec<u8>) {
    let (cw, ch) = (w / 2, h / 2);
    let mut u = Vec::with_capacity(cw * ch);
    let mut v = Vec::with_capacity(cw * ch);
    for cy in 0..ch {
        for cx in 0..cw {
            let (uu, vv) = f(cx as f64, cy as f64);
            u.push(to_u8(uu));
            v.push(to_u8(vv));
        }
    }
    (u, v)
}
