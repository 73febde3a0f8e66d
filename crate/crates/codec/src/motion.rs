//! Full-pel motion search over edge-padded reference planes.
//!
//! References are padded by the search range with edge replication, so
//! every candidate vector in the window addresses valid samples and no
//! per-candidate clipping is needed. Candidates are visited in increasing
//! (|dx| + |dy|, dy, dx) order and only a strictly cheaper cost replaces
//! the incumbent, which makes that ordering the tie-breaking rule.

use crate::bitio::len_se;

/// Full-pel displacement into a reference picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    /// Chroma displacement for 4:2:0, truncating toward zero.
    pub fn halved(self) -> MotionVector {
        MotionVector {
            dx: self.dx / 2,
            dy: self.dy / 2,
        }
    }
}

/// Signed Exp-Golomb bit cost of coding `mv` against `pred`.
pub fn mv_rate_bits(mv: MotionVector, pred: MotionVector) -> u64 {
    len_se((mv.dx - pred.dx) as i64) + len_se((mv.dy - pred.dy) as i64)
}

/// A plane padded on all sides by edge replication.
#[derive(Debug, Clone)]
pub struct PaddedPlane {
    data: Vec<u8>,
    stride: usize,
    pad: i32,
    width: i32,
    height: i32,
}

impl PaddedPlane {
    pub fn from_plane(plane: &[u8], width: u32, height: u32, pad: u32) -> Self {
        let (w, h, p) = (width as usize, height as usize, pad as usize);
        debug_assert_eq!(plane.len(), w * h);
        let stride = w + 2 * p;
        let mut data = vec![0u8; stride * (h + 2 * p)];
        for y in 0..h + 2 * p {
            let sy = y.saturating_sub(p).min(h - 1);
            let src = &plane[sy * w..sy * w + w];
            let dst = &mut data[y * stride..(y + 1) * stride];
            dst[..p].fill(src[0]);
            dst[p..p + w].copy_from_slice(src);
            dst[p + w..].fill(src[w - 1]);
        }
        Self {
            data,
            stride,
            pad: pad as i32,
            width: width as i32,
            height: height as i32,
        }
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    /// Sample at plane coordinates; valid for x in [-pad, width + pad).
    pub fn sample(&self, x: i32, y: i32) -> u8 {
        debug_assert!((-self.pad..self.width + self.pad).contains(&x));
        debug_assert!((-self.pad..self.height + self.pad).contains(&y));
        let row = (y + self.pad) as usize;
        let col = (x + self.pad) as usize;
        self.data[row * self.stride + col]
    }

    /// Copies a bw x bh block whose top-left maps to plane coords (x, y).
    pub fn copy_block(&self, x: i32, y: i32, bw: usize, bh: usize, out: &mut [u8]) {
        debug_assert_eq!(out.len(), bw * bh);
        for row in 0..bh {
            let src_row = (y + self.pad + row as i32) as usize;
            let src_col = (x + self.pad) as usize;
            let src = &self.data[src_row * self.stride + src_col..][..bw];
            out[row * bw..(row + 1) * bw].copy_from_slice(src);
        }
    }

    /// SSD between `block` and the plane at (x, y), aborting once the
    /// running sum exceeds `cap` (the returned value is then only a lower
    /// bound, but still > cap).
    fn block_ssd_capped(&self, block: &[u8], bw: usize, bh: usize, x: i32, y: i32, cap: u64) -> u64 {
        let mut acc = 0u64;
        for row in 0..bh {
            let src_row = (y + self.pad + row as i32) as usize;
            let src_col = (x + self.pad) as usize;
            let src = &self.data[src_row * self.stride + src_col..][..bw];
            let cur = &block[row * bw..(row + 1) * bw];
            let mut row_acc = 0u64;
            for (&a, &b) in cur.iter().zip(src) {
                let d = a as i64 - b as i64;
                row_acc += (d * d) as u64;
            }
            acc += row_acc;
            if acc > cap {
                return acc;
            }
        }
        acc
    }

    /// Exact SSD between `block` and the plane at (x, y).
    pub fn block_ssd(&self, block: &[u8], bw: usize, bh: usize, x: i32, y: i32) -> u64 {
        self.block_ssd_capped(block, bw, bh, x, y, u64::MAX)
    }
}

/// Search offsets in tie-break order, shared across all blocks of an
/// encode.
#[derive(Debug, Clone)]
pub struct SearchWindow {
    offsets: Vec<(i32, i32)>,
}

impl SearchWindow {
    pub fn new(range: u32) -> Self {
        let r = range as i32;
        let mut offsets = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
        for dy in -r..=r {
            for dx in -r..=r {
                offsets.push((dx, dy));
            }
        }
        offsets.sort_by_key(|&(dx, dy)| (dx.abs() + dy.abs(), dy, dx));
        Self { offsets }
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }
}

/// Finds the vector minimising `SSD + lambda * mv_rate_bits` for the
/// block whose top-left sits at (x0, y0) in the current picture.
pub fn motion_search(
    block: &[u8],
    bw: usize,
    bh: usize,
    reference: &PaddedPlane,
    x0: i32,
    y0: i32,
    pred: MotionVector,
    window: &SearchWindow,
    lambda: f64,
) -> (MotionVector, f64) {
    let mut best_mv = MotionVector::ZERO;
    let mut best_cost = f64::INFINITY;
    for &(dx, dy) in window.offsets() {
        let mv = MotionVector { dx, dy };
        let rate_cost = lambda * mv_rate_bits(mv, pred) as f64;
        if rate_cost >= best_cost {
            continue;
        }
        // SSD beyond this cap cannot beat the incumbent.
        let cap = (best_cost - rate_cost).min(u64::MAX as f64) as u64;
        let ssd = reference.block_ssd_capped(block, bw, bh, x0 + dx, y0 + dy, cap);
        let cost = ssd as f64 + rate_cost;
        if cost < best_cost {
            best_cost = cost;
            best_mv = mv;
        }
    }
    (best_mv, best_cost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(w: u32, h: u32, rng: &mut ChaCha8Rng) -> Vec<u8> {
        (0..w * h).map(|_| rng.gen()).collect()
    }

    fn extract(plane: &[u8], w: usize, x0: usize, y0: usize, bw: usize, bh: usize) -> Vec<u8> {
        let mut out = vec![0u8; bw * bh];
        for r in 0..bh {
            out[r * bw..(r + 1) * bw]
                .copy_from_slice(&plane[(y0 + r) * w + x0..(y0 + r) * w + x0 + bw]);
        }
        out
    }

    #[test]
    fn padding_replicates_edges() {
        let plane: Vec<u8> = (0..16u8).collect();
        let padded = PaddedPlane::from_plane(&plane, 4, 4, 3);
        assert_eq!(padded.sample(0, 0), 0);
        assert_eq!(padded.sample(-3, -3), 0);
        assert_eq!(padded.sample(6, -1), 3);
        assert_eq!(padded.sample(-1, 6), 12);
        assert_eq!(padded.sample(6, 6), 15);
        assert_eq!(padded.sample(2, 3), 14);
    }

    #[test]
    fn window_order_prefers_short_then_low_then_left() {
        let window = SearchWindow::new(2);
        assert_eq!(window.offsets().len(), 25);
        assert_eq!(window.offsets()[0], (0, 0));
        assert_eq!(&window.offsets()[1..5], [(0, -1), (-1, 0), (1, 0), (0, 1)]);
        let keys: Vec<(i32, i32, i32)> = window
            .offsets()
            .iter()
            .map(|&(dx, dy)| (dx.abs() + dy.abs(), dy, dx))
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn identical_block_stays_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let plane = random_plane(32, 32, &mut rng);
        let padded = PaddedPlane::from_plane(&plane, 32, 32, 4);
        let block = extract(&plane, 32, 8, 8, 16, 16);
        let window = SearchWindow::new(4);
        let (mv, cost) = motion_search(
            &block,
            16,
            16,
            &padded,
            8,
            8,
            MotionVector::ZERO,
            &window,
            10.0,
        );
        assert_eq!(mv, MotionVector::ZERO);
        // Only the zero-mvd rate remains: two one-bit codes.
        assert_eq!(cost, 20.0);
    }

    #[test]
    fn recovers_a_pure_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let prev = random_plane(48, 48, &mut rng);
        // Current frame content at x equals previous content at x + 3.
        let mut curr = vec![0u8; 48 * 48];
        for y in 0..48usize {
            for x in 0..48usize {
                curr[y * 48 + x] = prev[y * 48 + (x + 3).min(47)];
            }
        }
        let padded = PaddedPlane::from_plane(&prev, 48, 48, 16);
        let window = SearchWindow::new(16);
        let block = extract(&curr, 48, 16, 16, 16, 16);
        let (mv, cost) = motion_search(
            &block,
            16,
            16,
            &padded,
            16,
            16,
            MotionVector::ZERO,
            &window,
            0.0,
        );
        assert_eq!(mv, MotionVector { dx: 3, dy: 0 });
        assert_eq!(cost, 0.0);
    }

    #[test]
    fn lambda_zero_prefers_shortest_among_equal_ssd() {
        // Period-4 horizontal stripes: SSD is zero at dx multiples of 4.
        let mut plane = vec![0u8; 32 * 32];
        for y in 0..32usize {
            for x in 0..32usize {
                plane[y * 32 + x] = ((x % 4) * 60) as u8;
            }
        }
        let padded = PaddedPlane::from_plane(&plane, 32, 32, 8);
        let window = SearchWindow::new(8);
        let block = extract(&plane, 32, 8, 8, 16, 16);
        let (mv, cost) = motion_search(
            &block,
            16,
            16,
            &padded,
            8,
            8,
            MotionVector { dx: 4, dy: 0 },
            &window,
            0.0,
        );
        assert_eq!((mv, cost), (MotionVector::ZERO, 0.0));

        // With a rate term the predicted (4, 0) candidate is cheaper.
        let (mv, _) = motion_search(
            &block,
            16,
            16,
            &padded,
            8,
            8,
            MotionVector { dx: 4, dy: 0 },
            &window,
            5.0,
        );
        assert_eq!(mv, MotionVector { dx: 4, dy: 0 });
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let window = SearchWindow::new(3);
        for _ in 0..50 {
            let plane = random_plane(24, 24, &mut rng);
            let padded = PaddedPlane::from_plane(&plane, 24, 24, 3);
            let block: Vec<u8> = (0..64).map(|_| rng.gen()).collect();
            let x0 = rng.gen_range(0..17);
            let y0 = rng.gen_range(0..17);
            let pred = MotionVector {
                dx: rng.gen_range(-3..=3),
                dy: rng.gen_range(-3..=3),
            };
            let lambda = rng.gen_range(0.0..30.0);

            let got = motion_search(&block, 8, 8, &padded, x0, y0, pred, &window, lambda);

            let mut best: Option<(f64, i32, i32, i32)> = None;
            let mut best_mv = MotionVector::ZERO;
            for dy in -3..=3 {
                for dx in -3..=3 {
                    let mv = MotionVector { dx, dy };
                    let ssd = padded.block_ssd(&block, 8, 8, x0 + dx, y0 + dy);
                    let cost = ssd as f64 + lambda * mv_rate_bits(mv, pred) as f64;
                    let key = (cost, dx.abs() + dy.abs(), dy, dx);
                    if best.map_or(true, |b| key < b) {
                        best = Some(key);
                        best_mv = mv;
                    }
                }
            }
            assert_eq!(got.0, best_mv);
            assert_eq!(got.1, best.unwrap().0);
        }
    }
}
