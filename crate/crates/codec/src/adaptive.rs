//! In-loop B-frame lambda adaptation.
//!
//! The controller tracks exponentially smoothed distortion indices for P
//! and B frames. Once it has seen a full GOP of records (one P and `n_b`
//! B frames, all with nonzero distortion), each new B frame's lambda is
//! derived from the ratio `r = d_p / d_b`: inside the dead band the last
//! B-frame lambda is reused bitwise, outside it the last lambda is scaled
//! by the power model `a * r^b + c`, and the step is always clipped to
//! within 5 percent of the previous B-frame lambda. A scene cut resets
//! the state, so adaptation pauses for one GOP after every cut.

use crate::error::{CodecError, Result};
use crate::gop::FrameType;
use crate::rdo::Profile;

/// Power-model and dead-band constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub r1: f64,
    pub r2: f64,
}

impl ControllerParams {
    /// Fitted constants for the profile's reference codec.
    pub fn for_profile(profile: Profile) -> Self {
        match profile {
            Profile::H264Like => Self {
                a: 2.696,
                b: 10.06,
                c: 0.367,
                r1: 0.81,
                r2: 0.93,
            },
            Profile::HevcLike => Self {
                a: 2.197,
                b: 5.196,
                c: 0.308,
                r1: 0.73,
                r2: 0.89,
            },
        }
    }

    /// The lambda scale suggested for distortion ratio `r`.
    pub fn factor(&self, r: f64) -> f64 {
        self.a * r.powf(self.b) + self.c
    }
}

/// Which lambda the out-of-band scale factor multiplies.
///
/// The printed update compounds on the previously used B-frame lambda;
/// the alternative reads the factor as a target relative to the
/// unmodified lambda. Both are clipped the same way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaBase {
    #[default]
    Last,
    Orig,
}

/// Per-encode adaptation state, mutated in coding order.
#[derive(Debug, Clone)]
pub struct ControllerState {
    params: ControllerParams,
    n_b: u32,
    base: LambdaBase,
    d_p: f64,
    d_b: f64,
    lambda_last: f64,
    recorded_p: u32,
    recorded_b: u32,
}

impl ControllerState {
    pub fn new(
        params: ControllerParams,
        n_b: u32,
        base: LambdaBase,
        lambda_orig_b: f64,
    ) -> Result<Self> {
        if !(lambda_orig_b > 0.0 && lambda_orig_b.is_finite()) {
            return Err(CodecError::InvalidConfig(format!(
                "initial B-frame lambda must be positive and finite, got {lambda_orig_b}"
            )));
        }
        Ok(Self {
            params,
            n_b,
            base,
            d_p: 0.0,
            d_b: 0.0,
            lambda_last: lambda_orig_b,
            recorded_p: 0,
            recorded_b: 0,
        })
    }

    pub fn d_p(&self) -> f64 {
        self.d_p
    }

    pub fn d_b(&self) -> f64 {
        self.d_b
    }

    pub fn lambda_last(&self) -> f64 {
        self.lambda_last
    }

    /// Folds one encoded frame's luma MSE into the matching index.
    pub fn record_distortion(&mut self, frame_type: FrameType, mse_t: f64) -> Result<()> {
        let (index, counter) = match frame_type {
            FrameType::P => (&mut self.d_p, &mut self.recorded_p),
            FrameType::B => (&mut self.d_b, &mut self.recorded_b),
            FrameType::I => return Err(CodecError::IntraDistortionRecord),
        };
        *index = if *index == 0.0 {
            mse_t
        } else {
            0.2 * *index + 0.8 * mse_t
        };
        *counter += 1;
        Ok(())
    }

    /// True once a full GOP of usable records has accumulated: at least
    /// one P and `n_b` B frames, with both indices nonzero so the ratio
    /// is well defined.
    pub fn ready(&self) -> bool {
        self.recorded_p >= 1 && self.recorded_b >= self.n_b && self.d_p > 0.0 && self.d_b > 0.0
    }

    /// Lambda for the next B frame. Before warm-up this passes
    /// `lambda_orig_b` through; afterwards it applies the dead band, the
    /// power model, and the 5 percent clip.
    pub fn next_b_lambda(&mut self, lambda_orig_b: f64) -> Result<f64> {
        if !self.ready() {
            self.lambda_last = lambda_orig_b;
            return Ok(lambda_orig_b);
        }
        if self.d_b == 0.0 {
            return Err(CodecError::ZeroDistortionIndex);
        }
        let r = self.d_p / self.d_b;
        let mdf = if self.params.r1 < r && r < self.params.r2 {
            self.lambda_last
        } else {
            let base = match self.base {
                LambdaBase::Last => self.lambda_last,
                LambdaBase::Orig => lambda_orig_b,
            };
            base * self.params.factor(r)
        };
        let clipped = mdf.clamp(0.95 * self.lambda_last, 1.05 * self.lambda_last);
        self.lambda_last = clipped;
        Ok(clipped)
    }

    /// Scene cut or stream start: drop all records and restart from the
    /// unmodified lambda.
    pub fn reset(&mut self, lambda_orig_b: f64) {
        debug_assert!(lambda_orig_b > 0.0);
        self.d_p = 0.0;
        self.d_b = 0.0;
        self.recorded_p = 0;
        self.recorded_b = 0;
        self.lambda_last = lambda_orig_b;
    }
}
