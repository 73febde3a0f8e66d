//! MSB-first bit packing and Exp-Golomb codes.
//!
//! The writer counts every bit it emits; the reader refuses to run past the
//! end of its buffer. Both are used by the entropy coder and the bitstream
//! container, which require exact bit accounting.

use crate::error::{CodecError, Result};

/// Appends bits MSB-first into a byte vector.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Bits used in the final partial byte (0..8).
    used: u32,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total bits written so far.
    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    pub fn put_bit(&mut self, bit: bool) {
        if self.used == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.last_mut().unwrap();
            *last |= 1 << (7 - self.used);
        }
        self.used = (self.used + 1) % 8;
        self.bit_len += 1;
    }

    /// Writes the low `n` bits of `value`, most significant first.
    pub fn put_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.put_bit((value >> i) & 1 == 1);
        }
    }

    /// Unsigned Exp-Golomb: 0 -> `1`, 1 -> `010`, 2 -> `011`, 3 -> `00100`, ...
    pub fn put_ue(&mut self, value: u64) {
        let v = value + 1;
        let len = 64 - v.leading_zeros();
        self.put_bits(0, len - 1);
        self.put_bits(v, len);
    }

    /// Signed Exp-Golomb with the mapping 0, 1, -1, 2, -2, ...
    pub fn put_se(&mut self, value: i64) {
        self.put_ue(se_to_ue(value));
    }

    /// Zero-pads to a byte boundary and returns the bytes.
    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Code length in bits of the unsigned Exp-Golomb code for `value`.
pub fn len_ue(value: u64) -> u64 {
    let len = 64 - (value + 1).leading_zeros() as u64;
    2 * len - 1
}

/// Code length in bits of the signed Exp-Golomb code for `value`.
pub fn len_se(value: i64) -> u64 {
    len_ue(se_to_ue(value))
}

fn se_to_ue(value: i64) -> u64 {
    if value > 0 {
        (value as u64) * 2 - 1
    } else {
        (-value as u64) * 2
    }
}

fn ue_to_se(index: u64) -> i64 {
    if index % 2 == 1 {
        ((index + 1) / 2) as i64
    } else {
        -((index / 2) as i64)
    }
}

/// Reads bits MSB-first from a byte slice, tracking the consumed count.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    /// Bits consumed so far.
    pub fn bit_pos(&self) -> u64 {
        self.pos
    }

    pub fn get_bit(&mut self) -> Result<bool> {
        let byte = (self.pos / 8) as usize;
        if byte >= self.bytes.len() {
            return Err(CodecError::TruncatedBitstream(format!(
                "bit read past end at bit {}",
                self.pos
            )));
        }
        let bit = (self.bytes[byte] >> (7 - (self.pos % 8))) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    pub fn get_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.get_bit()? as u64;
        }
        Ok(v)
    }

    pub fn get_ue(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        while !self.get_bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(CodecError::MalformedPayload(
                    "exp-golomb prefix longer than 63 zeros".into(),
                ));
            }
        }
        let suffix = self.get_bits(zeros)?;
        Ok((1 << zeros) + suffix - 1)
    }

    pub fn get_se(&mut self) -> Result<i64> {
        Ok(ue_to_se(self.get_ue()?))
    }
}
