//! 8x8 sequency-ordered Walsh-Hadamard transform.
//!
//! The basis matrix `H` has entries of plus or minus one, ordered by the
//! number of sign changes per row, so coefficient (0,0) is the DC term and
//! frequency grows along each axis. Forward is `H * X * H^T` with no
//! scaling; the matrix satisfies `H * H^T = 8 I`, so the exact inverse
//! divides by 64.
//!
//! The inverse here takes coefficients in Q16 fixed point, as produced by
//! dequantization, and folds the division and the Q16 scale into a single
//! rounding shift of 22 bits. Feeding it forward coefficients shifted left
//! by 16 reproduces the input block exactly.

/// Sequency-ordered rows: row `i` crosses zero exactly `i` times.
const H: [[i32; 8]; 8] = [
    [1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, -1, -1, -1, -1],
    [1, 1, -1, -1, -1, -1, 1, 1],
    [1, 1, -1, -1, 1, 1, -1, -1],
    [1, -1, -1, 1, 1, -1, -1, 1],
    [1, -1, -1, 1, -1, 1, 1, -1],
    [1, -1, 1, -1, -1, 1, -1, 1],
    [1, -1, 1, -1, 1, -1, 1, -1],
];

/// Forward transform of a row-major 8x8 residual block: `H * X * H^T`.
///
/// Residuals in [-255, 255] give coefficients in [-16320, 16320].
pub fn fdct8(block: &[i32; 64]) -> [i32; 64] {
    let mut tmp = [0i32; 64];
    for u in 0..8 {
        for j in 0..8 {
            let mut acc = 0;
            for i in 0..8 {
                acc += H[u][i] * block[i * 8 + j];
            }
            tmp[u * 8 + j] = acc;
        }
    }
    let mut out = [0i32; 64];
    for u in 0..8 {
        for v in 0..8 {
            let mut acc = 0;
            for j in 0..8 {
                acc += tmp[u * 8 + j] * H[v][j];
            }
            out[u * 8 + v] = acc;
        }
    }
    out
}

/// Inverse transform from Q16 coefficients: `H^T * Y * H`, then one
/// rounding shift by 22 bits (6 for the basis norm, 16 for Q16).
pub fn idct8(coeffs_q16: &[i64; 64]) -> [i32; 64] {
    let mut tmp = [0i64; 64];
    for i in 0..8 {
        for v in 0..8 {
            let mut acc = 0;
            for u in 0..8 {
                acc += H[u][i] as i64 * coeffs_q16[u * 8 + v];
            }
            tmp[i * 8 + v] = acc;
        }
    }
    let mut out = [0i32; 64];
    for i in 0..8 {
        for j in 0..8 {
            let mut acc = 0;
            for v in 0..8 {
                acc += tmp[i * 8 + v] * H[v][j] as i64;
            }
            out[i * 8 + j] = ((acc + (1 << 21)) >> 22) as i32;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn rows_are_in_sequency_order() {
        for (i, row) in H.iter().enumerate() {
            let changes = row.windows(2).filter(|w| w[0] != w[1]).count();
            assert_eq!(changes, i, "row {i}");
        }
    }

    #[test]
    fn basis_is_orthogonal_with_norm_eight() {
        for a in 0..8 {
            for b in 0..8 {
                let dot: i32 = (0..8).map(|i| H[a][i] * H[b][i]).sum();
                assert_eq!(dot, if a == b { 8 } else { 0 });
            }
        }
    }

    #[test]
    fn flat_block_is_pure_dc() {
        let block = [3i32; 64];
        let coeffs = fdct8(&block);
        assert_eq!(coeffs[0], 3 * 64);
        assert!(coeffs[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn unit_impulse_spreads_evenly() {
        let mut block = [0i32; 64];
        block[0] = 1;
        let coeffs = fdct8(&block);
        // Column 0 of the basis is all ones, so every coefficient is one.
        assert!(coeffs.iter().all(|&c| c == 1));
    }

    #[test]
    fn q16_inverse_is_exact_on_unquantized_coefficients() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let mut block = [0i32; 64];
            for b in block.iter_mut() {
                *b = rng.gen_range(-255..=255);
            }
            let coeffs = fdct8(&block);
            let mut q16 = [0i64; 64];
            for (dst, &c) in q16.iter_mut().zip(&coeffs) {
                *dst = (c as i64) << 16;
            }
            assert_eq!(idct8(&q16), block);
        }
    }

    #[test]
    fn extreme_inputs_do_not_overflow() {
        let block = [255i32; 64];
        let coeffs = fdct8(&block);
        assert_eq!(coeffs[0], 255 * 64);
        let mut q16 = [0i64; 64];
        for (dst, &c) in q16.iter_mut().zip(&coeffs) {
            *dst = (c as i64) << 16;
        }
        assert_eq!(idct8(&q16), block);
    }
}
