//! Lagrangian rate-distortion primitives.
//!
//! `lambda_orig` evaluates the QP-to-lambda mapping for both supported
//! profiles and frame types; `rd_cost` and `select_mode` implement the
//! cost `D + lambda * R` and its argmin over candidate modes. Mode
//! selection keeps the first minimum, so the caller's enumeration order
//! is the tie-breaking order.

use crate::error::{CodecError, Result};
use crate::gop::FrameType;
use crate::quant::QP_MAX;

/// Which lambda formula family the encoder runs under. The profile only
/// changes lambda constants, never the coding tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    H264Like,
    HevcLike,
}

/// Inputs the lambda formulas depend on.
#[derive(Debug, Clone, Copy)]
pub struct LambdaQuery {
    pub qp: u8,
    pub frame_type: FrameType,
    pub profile: Profile,
    /// B frames per GOP; enters the HEVC-style I-frame term.
    pub n_b: u32,
    /// HEVC-style P/B constant.
    pub p: f64,
}

/// The unmodified Lagrange multiplier for one frame.
pub fn lambda_orig(query: &LambdaQuery) -> Result<f64> {
    if query.qp > QP_MAX {
        return Err(CodecError::QpOutOfRange(query.qp));
    }
    if !(query.p > 0.0 && query.p.is_finite()) {
        return Err(CodecError::InvalidConfig(format!(
            "lambda constant p must be positive and finite, got {}",
            query.p
        )));
    }
    let base = 2f64.powf((query.qp as f64 - 12.0) / 3.0);
    let b_weight = ((query.qp as f64 - 12.0) / 6.0).clamp(2.0, 4.0);
    let lambda = match (query.profile, query.frame_type) {
        (Profile::H264Like, FrameType::I) => 0.57 * base,
        (Profile::H264Like, FrameType::P) => 0.85 * base,
        (Profile::H264Like, FrameType::B) => 0.68 * b_weight * base,
        (Profile::HevcLike, FrameType::I) => {
            (1.0 - (0.05 * query.n_b as f64).clamp(0.0, 0.5)) * 0.57 * base
        }
        (Profile::HevcLike, FrameType::P) => query.p * base,
        (Profile::HevcLike, FrameType::B) => query.p * b_weight * base,
    };
    Ok(lambda)
}

/// Lagrangian cost `D + lambda * R`.
pub fn rd_cost(distortion: f64, rate_bits: f64, lambda: f64) -> f64 {
    distortion + lambda * rate_bits
}

/// Picks the candidate minimising `rd_cost`; the first minimum wins, so
/// ties go to the earliest candidate in the given order.
pub fn select_mode<M: Copy>(candidates: &[(M, f64, f64)], lambda: f64) -> Result<(M, f64)> {
    let mut best: Option<(M, f64)> = None;
    for &(mode, distortion, rate_bits) in candidates {
        let cost = rd_cost(distortion, rate_bits, lambda);
        match best {
            Some((_, best_cost)) if cost >= best_cost => {}
            _ => best = Some((mode, cost)),
        }
    }
    best.ok_or(CodecError::NoCandidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn q(qp: u8, frame_type: FrameType, profile: Profile) -> LambdaQuery {
        LambdaQuery {
            qp,
            frame_type,
            profile,
            n_b: 3,
            p: 0.5,
        }
    }

    fn assert_close(got: f64, want: f64) {
        let rel = (got - want).abs() / want.abs().max(1e-300);
        assert!(rel < 1e-12, "got {got}, want {want}, rel {rel}");
    }

    #[test]
    fn h264_values() {
        assert_eq!(
            lambda_orig(&q(12, FrameType::I, Profile::H264Like)).unwrap(),
            0.57
        );
        assert_eq!(
            lambda_orig(&q(27, FrameType::P, Profile::H264Like)).unwrap(),
            27.2
        );
        assert_close(
            lambda_orig(&q(27, FrameType::B, Profile::H264Like)).unwrap(),
            54.400000000000006,
        );
        assert_close(
            lambda_orig(&q(42, FrameType::B, Profile::H264Like)).unwrap(),
            2785.28,
        );
    }

    #[test]
    fn hevc_values() {
        assert_close(
            lambda_orig(&q(32, FrameType::I, Profile::HevcLike)).unwrap(),
            49.22213181942993,
        );
        assert_close(
            lambda_orig(&q(32, FrameType::P, Profile::HevcLike)).unwrap(),
            50.796833662982394,
        );
        assert_close(
            lambda_orig(&q(32, FrameType::B, Profile::HevcLike)).unwrap(),
            169.322778876608,
        );
    }

    #[test]
    fn b_weight_clamps_at_both_ends() {
        // (QP-12)/6 hits 2 at QP 24 and 4 at QP 36.
        for qp in [0, 12, 24] {
            let lb = lambda_orig(&q(qp, FrameType::B, Profile::H264Like)).unwrap();
            let lp = lambda_orig(&q(qp, FrameType::P, Profile::H264Like)).unwrap();
            assert_close(lb / lp, 0.68 / 0.85 * 2.0);
        }
        for qp in [36, 42, 51] {
            let lb = lambda_orig(&q(qp, FrameType::B, Profile::H264Like)).unwrap();
            let lp = lambda_orig(&q(qp, FrameType::P, Profile::H264Like)).unwrap();
            assert_close(lb / lp, 0.68 / 0.85 * 4.0);
        }
    }

    #[test]
    fn b_to_p_ratio_identity() {
        for qp in 0..=51u8 {
            let lb = lambda_orig(&q(qp, FrameType::B, Profile::H264Like)).unwrap();
            let lp = lambda_orig(&q(qp, FrameType::P, Profile::H264Like)).unwrap();
            let weight = ((qp as f64 - 12.0) / 6.0).clamp(2.0, 4.0);
            assert_close(lb / lp, 0.68 / 0.85 * weight);
        }
    }

    #[test]
    fn lambda_increases_with_qp() {
        for profile in [Profile::H264Like, Profile::HevcLike] {
            for frame_type in [FrameType::I, FrameType::P, FrameType::B] {
                for qp in 0..51u8 {
                    let lo = lambda_orig(&q(qp, frame_type, profile)).unwrap();
                    let hi = lambda_orig(&q(qp + 1, frame_type, profile)).unwrap();
                    assert!(lo < hi, "{profile:?} {frame_type:?} qp {qp}");
                }
            }
        }
    }

    #[test]
    fn hevc_i_discount_saturates() {
        let mut query = q(32, FrameType::I, Profile::HevcLike);
        query.n_b = 0;
        let no_b = lambda_orig(&query).unwrap();
        query.n_b = 10;
        let capped = lambda_orig(&query).unwrap();
        query.n_b = 30;
        let beyond = lambda_orig(&query).unwrap();
        assert_close(capped / no_b, 0.5);
        assert_eq!(capped, beyond);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            lambda_orig(&q(52, FrameType::I, Profile::H264Like)),
            Err(CodecError::QpOutOfRange(52))
        ));
        let mut query = q(32, FrameType::P, Profile::HevcLike);
        query.p = 0.0;
        assert!(matches!(
            lambda_orig(&query),
            Err(CodecError::InvalidConfig(_))
        ));
    }

    #[test]
    fn rd_cost_arithmetic() {
        assert_eq!(rd_cost(100.0, 10.0, 5.0), 150.0);
        assert_eq!(rd_cost(123.0, 77.0, 0.0), 123.0);
        assert_eq!(rd_cost(0.0, 8.0, 2.5), 20.0);
    }

    #[test]
    fn select_mode_basics() {
        let only = [(7u8, 10.0, 5.0)];
        assert_eq!(select_mode(&only, 1.0).unwrap(), (7, 15.0));

        // Equal costs keep the earlier candidate.
        let tied = [(0u8, 10.0, 0.0), (1u8, 0.0, 10.0)];
        assert_eq!(select_mode(&tied, 1.0).unwrap().0, 0);

        let empty: [(u8, f64, f64); 0] = [];
        assert!(matches!(
            select_mode(&empty, 1.0),
            Err(CodecError::NoCandidates)
        ));
    }

    #[test]
    fn select_mode_matches_exhaustive_min() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let lambda = rng.gen_range(0.0..100.0);
            let n = rng.gen_range(1..12);
            let candidates: Vec<(usize, f64, f64)> = (0..n)
                .map(|i| (i, rng.gen_range(0.0..1e4), rng.gen_range(0.0..500.0)))
                .collect();
            let (mode, cost) = select_mode(&candidates, lambda).unwrap();
            for &(_, d, r) in &candidates {
                assert!(cost <= rd_cost(d, r, lambda) + 1e-9);
            }
            let oracle = candidates
                .iter()
                .map(|&(i, d, r)| (i, rd_cost(d, r, lambda)))
                .fold((usize::MAX, f64::INFINITY), |acc, (i, c)| {
                    if c < acc.1 {
                        (i, c)
                    } else {
                        acc
                    }
                });
            assert_eq!(mode, oracle.0);
        }
    }

    #[test]
    fn scaling_candidates_keeps_the_choice() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..50 {
            let lambda = rng.gen_range(0.1..100.0);
            let candidates: Vec<(usize, f64, f64)> = (0..6)
                .map(|i| (i, rng.gen_range(1.0..1e4), rng.gen_range(1.0..500.0)))
                .collect();
            let scale = rng.gen_range(0.25..8.0);
            let scaled: Vec<(usize, f64, f64)> = candidates
                .iter()
                .map(|&(i, d, r)| (i, d * scale, r * scale))
                .collect();
            let pick = select_mode(&candidates, lambda).unwrap().0;
            let pick_scaled = select_mode(&scaled, lambda).unwrap().0;
            assert_eq!(pick, pick_scaled);
        }
    }
}
