//! Scalar quantization with a Q16 fixed-point step table.
//!
//! Step sizes follow the doubling-every-six convention with step 1.0 at
//! QP 4, stored as Q16 integers so the reconstruction path needs no
//! floating point. Dequantization returns the Q16 product unrounded; the
//! inverse transform folds the Q16 scale into its final shift. Kept exact,
//! this makes the coefficient error bound `2 * |error| <= step` an integer
//! identity rather than a float approximation.

pub const QP_MAX: u8 = 51;

/// Q16 steps for QP 0..=5; each later octave doubles.
const BASE_Q16: [u32; 6] = [41285, 46341, 52016, 58386, 65536, 73562];

const STEP_Q16: [u32; 52] = build_table();

const fn build_table() -> [u32; 52] {
    let mut table = [0u32; 52];
    let mut qp = 0;
    while qp < 52 {
        table[qp] = BASE_Q16[qp % 6] << (qp / 6);
        qp += 1;
    }
    table
}

/// Quantizer step for `qp` in Q16 fixed point.
pub fn step_q16(qp: u8) -> u32 {
    assert!(qp <= QP_MAX, "qp {qp} out of range");
    STEP_Q16[qp as usize]
}

/// Rounds `coeff / step` to the nearest integer, ties away from zero.
pub fn quantize(coeff: i32, qp: u8) -> i32 {
    let step = step_q16(qp) as i64;
    let scaled = (coeff.unsigned_abs() as i64) << 16;
    let level = (scaled + step / 2) / step;
    if coeff < 0 {
        -(level as i32)
    } else {
        level as i32
    }
}

/// Reconstructed coefficient `level * step` in Q16, with no rounding.
pub fn dequantize(level: i32, qp: u8) -> i64 {
    level as i64 * step_q16(qp) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn table_endpoints_and_unity() {
        assert_eq!(step_q16(0), 41285);
        assert_eq!(step_q16(4), 65536);
        assert_eq!(step_q16(5), 73562);
        assert_eq!(step_q16(51), 14_946_816);
    }

    #[test]
    fn step_doubles_every_six() {
        for qp in 0..=45u8 {
            assert_eq!(step_q16(qp + 6), 2 * step_q16(qp), "qp {qp}");
        }
    }

    #[test]
    fn steps_are_strictly_increasing() {
        for qp in 0..QP_MAX {
            assert!(step_q16(qp) < step_q16(qp + 1), "qp {qp}");
        }
    }

    #[test]
    fn ties_round_away_from_zero() {
        // QP 10 has step 2.0 exactly, so odd coefficients sit on ties.
        assert_eq!(step_q16(10), 131_072);
        assert_eq!(quantize(1, 10), 1);
        assert_eq!(quantize(-1, 10), -1);
        assert_eq!(quantize(3, 10), 2);
        assert_eq!(quantize(-3, 10), -2);
    }

    #[test]
    fn unit_step_is_lossless() {
        for c in [-16320, -255, -1, 0, 1, 77, 16320] {
            assert_eq!(quantize(c, 4), c);
            assert_eq!(dequantize(quantize(c, 4), 4), (c as i64) << 16);
        }
    }

    #[test]
    fn reconstruction_error_is_within_half_step() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for qp in 0..=QP_MAX {
            let step = step_q16(qp) as i64;
            for _ in 0..200 {
                let coeff = rng.gen_range(-16320..=16320);
                let err = dequantize(quantize(coeff, qp), qp) - ((coeff as i64) << 16);
                assert!(2 * err.abs() <= step, "qp {qp} coeff {coeff} err {err}");
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        for qp in [0, 25, 51] {
            assert_eq!(quantize(0, qp), 0);
            assert_eq!(dequantize(0, qp), 0);
        }
    }
}
