//! Luma distortion metrics and Bjontegaard deltas between RD curves.
//!
//! Each curve is fitted with a cubic polynomial by least squares, PSNR
//! over log10(bitrate) for the PSNR delta and log10(bitrate) over PSNR
//! for the rate delta. The delta is the difference of the two fitted
//! means over the curves' overlap interval; the rate delta is mapped back
//! from log domain as a percentage. Abscissae are centred and scaled to
//! [-1, 1] before fitting so the normal equations stay well conditioned.

use crate::error::{CodecError, Result};
use crate::frame::{FrameRate, VideoFrame};

/// Mean squared error between the luma planes of two frames.
pub fn frame_mse_y(a: &VideoFrame, b: &VideoFrame) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(CodecError::DimensionMismatch {
            index: b.index,
            got_w: b.width(),
            got_h: b.height(),
            want_w: a.width(),
            want_h: a.height(),
        });
    }
    let ssd: u64 = a
        .plane_y
        .iter()
        .zip(&b.plane_y)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(ssd as f64 / a.plane_y.len() as f64)
}

/// Near-lossless MSE below which PSNR is reported as the 99 dB cap:
/// 255^2 * 10^(-9.9), the MSE whose exact PSNR is 99.0 dB.
const PSNR_CAP_MSE: f64 = 8.186162490191566e-6;

/// Luma PSNR in dB, capped at 99.0 for (near-)lossless frames.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse < PSNR_CAP_MSE {
        99.0
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// One operating point of an encode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    /// Kilobits per second.
    pub bitrate: f64,
    /// Luma PSNR in dB.
    pub psnr: f64,
}

/// Bitrate in kilobits per second from an exact bit count.
pub fn bitrate_kbps(total_bits: u64, frame_count: usize, frame_rate: FrameRate) -> f64 {
    total_bits as f64 * frame_rate.as_f64() / frame_count as f64 / 1000.0
}

/// A rate-distortion curve: at least four points, strictly increasing in
/// both bitrate and PSNR after sorting by bitrate.
#[derive(Debug, Clone)]
pub struct RdCurve {
    points: Vec<RdPoint>,
}

impl RdCurve {
    pub fn new(mut points: Vec<RdPoint>) -> Result<Self> {
        if points.len() < 4 {
            return Err(CodecError::TooFewPoints(points.len()));
        }
        for p in &points {
            if !(p.bitrate > 0.0 && p.bitrate.is_finite()) {
                return Err(CodecError::BadCurvePoint(format!(
                    "bitrate must be positive and finite, got {}",
                    p.bitrate
                )));
            }
            if !p.psnr.is_finite() {
                return Err(CodecError::BadCurvePoint(format!(
                    "psnr must be finite, got {}",
                    p.psnr
                )));
            }
        }
        points.sort_by(|a, b| a.bitrate.partial_cmp(&b.bitrate).unwrap());
        if points.windows(2).any(|w| w[0].bitrate >= w[1].bitrate) {
            return Err(CodecError::NonMonotoneCurve("bitrate"));
        }
        if points.windows(2).any(|w| w[0].psnr >= w[1].psnr) {
            return Err(CodecError::NonMonotoneCurve("psnr"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[RdPoint] {
        &self.points
    }

    /// PSNR of the fitted rate-quality model at `bitrate`. The query is
    /// clamped into the curve's observed bitrate range first; the cubic
    /// is only trustworthy as an interpolant.
    pub fn psnr_at(&self, bitrate: f64) -> Result<f64> {
        if !(bitrate > 0.0 && bitrate.is_finite()) {
            return Err(CodecError::BadCurvePoint(format!(
                "bitrate must be positive and finite, got {bitrate}"
            )));
        }
        let fit = CubicFit::new(&self.log_rates(), &self.psnrs());
        let x = bitrate.log10().clamp(fit.x_min, fit.x_max);
        Ok(fit.eval(x))
    }

    fn log_rates(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.bitrate.log10()).collect()
    }

    fn psnrs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.psnr).collect()
    }
}

/// Average PSNR gain of `test` over `anchor` at equal bitrate, in dB.
pub fn bd_psnr(anchor: &RdCurve, test: &RdCurve) -> Result<f64> {
    let fa = CubicFit::new(&anchor.log_rates(), &anchor.psnrs());
    let ft = CubicFit::new(&test.log_rates(), &test.psnrs());
    let lo = fa.x_min.max(ft.x_min);
    let hi = fa.x_max.min(ft.x_max);
    if !(lo < hi) {
        return Err(CodecError::EmptyOverlap("bitrate"));
    }
    Ok(ft.mean_over(lo, hi) - fa.mean_over(lo, hi))
}

/// Average bitrate change of `test` over `anchor` at equal PSNR, in
/// percent; negative means `test` spends fewer bits.
pub fn bd_rate(anchor: &RdCurve, test: &RdCurve) -> Result<f64> {
    let fa = CubicFit::new(&anchor.psnrs(), &anchor.log_rates());
    let ft = CubicFit::new(&test.psnrs(), &test.log_rates());
    let lo = fa.x_min.max(ft.x_min);
    let hi = fa.x_max.min(ft.x_max);
    if !(lo < hi) {
        return Err(CodecError::EmptyOverlap("psnr"));
    }
    let delta = ft.mean_over(lo, hi) - fa.mean_over(lo, hi);
    Ok((10f64.powf(delta) - 1.0) * 100.0)
}

/// Least-squares cubic on centred, scaled abscissae.
struct CubicFit {
    x_min: f64,
    x_max: f64,
    centre: f64,
    scale: f64,
    /// Coefficients for 1, u, u^2, u^3.
    coeffs: [f64; 4],
}

impl CubicFit {
    fn new(xs: &[f64], ys: &[f64]) -> Self {
        debug_assert!(xs.len() >= 4 && xs.len() == ys.len());
        let x_min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let x_max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let centre = (x_min + x_max) / 2.0;
        let scale = (x_max - x_min) / 2.0;

        // Normal equations A^T A c = A^T y over the scaled abscissae.
        let mut ata = [[0f64; 4]; 4];
        let mut aty = [0f64; 4];
        for (&x, &y) in xs.iter().zip(ys) {
            let u = (x - centre) / scale;
            let powers = [1.0, u, u * u, u * u * u];
            for i in 0..4 {
                aty[i] += powers[i] * y;
                for j in 0..4 {
                    ata[i][j] += powers[i] * powers[j];
                }
            }
        }
        let coeffs = solve4(ata, aty);
        Self {
            x_min,
            x_max,
            centre,
            scale,
            coeffs,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let u = (x - self.centre) / self.scale;
        let c = &self.coeffs;
        ((c[3] * u + c[2]) * u + c[1]) * u + c[0]
    }

    /// Mean of the fitted polynomial over [lo, hi] in original abscissae.
    fn mean_over(&self, lo: f64, hi: f64) -> f64 {
        let ul = (lo - self.centre) / self.scale;
        let uh = (hi - self.centre) / self.scale;
        let c = &self.coeffs;
        let anti = |u: f64| {
            u * (c[0] + u * (c[1] / 2.0 + u * (c[2] / 3.0 + u * (c[3] / 4.0))))
        };
        (anti(uh) - anti(ul)) / (uh - ul)
    }
}

/// Gaussian elimination with partial pivoting on a 4x4 system.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let factor = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0f64; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}
