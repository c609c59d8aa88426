//! MSB-first bit packing over byte buffers.
//!
//! The first bit written lands in the most significant bit of byte 0; rows
//! written back to back are bit-contiguous with no padding between them.

use crate::error::{Error, Result};

/// Bit writer accumulating into a byte buffer, MSB-first.
#[derive(Debug, Default)]
pub struct BitWriter {
    buf: Vec<u8>,
    acc: u8,
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        Self {
            buf: Vec::with_capacity(bytes),
            acc: 0,
            used: 0,
        }
    }

    /// Number of bits written so far.
    pub fn bit_len(&self) -> usize {
        self.buf.len() * 8 + self.used as usize
    }

    /// Append the `count` low bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 32);
        debug_assert!(count == 32 || value < (1u64 << count) as u32);
        let mut remaining = count;
        while remaining > 0 {
            let space = 8 - self.used;
            let take = space.min(remaining);
            let shift = remaining - take;
            let chunk = ((value >> shift) as u8) & (((1u16 << take) - 1) as u8);
            self.acc = ((u16::from(self.acc) << take) as u8) | chunk;
            self.used += take;
            remaining -= take;
            if self.used == 8 {
                self.buf.push(self.acc);
                self.acc = 0;
                self.used = 0;
            }
        }
    }

    /// Zero-pad to a byte boundary and return the buffer.
    pub fn finish(mut self) -> Vec<u8> {
        if self.used > 0 {
            self.buf.push(self.acc << (8 - self.used));
        }
        self.buf
    }
}

/// Bit reader over a byte slice, MSB-first.
#[derive(Debug)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    /// Current position in bits from the start of the buffer.
    pub fn bit_pos(&self) -> usize {
        self.pos
    }

    /// Bits left before the end of the buffer.
    pub fn remaining(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    /// Read `count` bits, most significant first.
    pub fn read_bits(&mut self, count: u32) -> Result<u32> {
        if self.remaining() < count as usize {
            return Err(Error::TruncatedStream(format!(
                "needed {count} bits, {} left",
                self.remaining()
            )));
        }
        let value = extract_bits(self.data, self.pos, count);
        self.pos += count as usize;
        Ok(value)
    }
}

/// Random-access extraction of `count` bits starting at `bit_pos`.
///
/// Caller guarantees `bit_pos + count <= 8 * data.len()`. Each call is
/// independent of any cursor state, so extractions at distinct positions can
/// run in any order.
pub fn extract_bits(data: &[u8], bit_pos: usize, count: u32) -> u32 {
    debug_assert!(bit_pos + count as usize <= data.len() * 8);
    let mut value = 0u32;
    let mut pos = bit_pos;
    let mut remaining = count;
    while remaining > 0 {
        let avail = 8 - (pos % 8) as u32;
        let take = avail.min(remaining);
        let byte = data[pos / 8];
        let chunk = (byte >> (avail - take)) & (((1u16 << take) - 1) as u8);
        value = (value << take) | u32::from(chunk);
        pos += take as usize;
        remaining -= take;
    }
    value
}
