//! Dense bit-packed matrices over GF(2).
//!
//! Rows are stored as contiguous runs of `u64` words, least significant bit
//! first. Row reduction works a word at a time, which is what keeps the
//! entropy computations cheap for a few hundred qubits.

use std::fmt;

pub(crate) const WORD_BITS: usize = 64;

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub(crate) fn get_bit(words: &[u64], i: usize) -> bool {
    (words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], i: usize, value: bool) {
    let mask = 1u64 << (i % WORD_BITS);
    if value {
        words[i / WORD_BITS] |= mask;
    } else {
        words[i / WORD_BITS] &= !mask;
    }
}

/// Reads `len <= 64` consecutive bits starting at bit `start`.
#[inline]
pub(crate) fn get_bits(words: &[u64], start: usize, len: usize) -> u64 {
    debug_assert!(len <= 64 && len > 0);
    let w = start / WORD_BITS;
    let off = start % WORD_BITS;
    let mut v = words[w] >> off;
    if off + len > WORD_BITS {
        v |= words[w + 1] << (WORD_BITS - off);
    }
    if len == 64 {
        v
    } else {
        v & ((1u64 << len) - 1)
    }
}

/// Overwrites `len <= 64` consecutive bits starting at bit `start`.
#[inline]
pub(crate) fn set_bits(words: &mut [u64], start: usize, len: usize, value: u64) {
    debug_assert!(len <= 64 && len > 0);
    let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
    let value = value & mask;
    let w = start / WORD_BITS;
    let off = start % WORD_BITS;
    words[w] = (words[w] & !(mask << off)) | (value << off);
    if off + len > WORD_BITS {
        let spill = WORD_BITS - off;
        let hi_mask = mask >> spill;
        words[w + 1] = (words[w + 1] & !hi_mask) | (value >> spill);
    }
}

#[inline]
pub(crate) fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

/// A row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols).max(1);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        get_bit(self.row(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let stride = self.stride;
        set_bit(&mut self.data[r * stride..(r + 1) * stride], c, value);
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (lo, hi) = self.data.split_at_mut(dst.max(src) * s);
        if dst < src {
            xor_into(&mut lo[dst * s..(dst + 1) * s], &hi[..s]);
        } else {
            xor_into(&mut hi[..s], &lo[src * s..(src + 1) * s]);
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in GF(2) product");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let stride = out.stride;
                    xor_into(&mut out.data[r * stride..(r + 1) * stride], rhs.row(k));
                }
            }
        }
        out
    }

    /// Rank over GF(2) by word-parallel forward elimination.
    pub fn rank(&self) -> usize {
        self.clone().rank_in_place()
    }

    /// Row-reduces `self` into echelon form and returns the rank.
    pub fn rank_in_place(&mut self) -> usize {
        let mut rank = 0;
        let stride = self.stride;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let w = c / WORD_BITS;
            let mask = 1u64 << (c % WORD_BITS);
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * stride + w] & mask != 0) else {
                continue;
            };
            self.swap_rows(p, rank);
            for r in rank + 1..self.rows {
                if self.data[r * stride + w] & mask != 0 {
                    for k in w..stride {
                        let v = self.data[rank * stride + k];
                        self.data[r * stride + k] ^= v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse over GF(2), or `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| a.get(r, c))?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            for r in 0..n {
                if r != c && a.get(r, c) {
                    a.xor_row(r, c);
                    inv.xor_row(r, c);
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: String = (0..self.cols).map(|c| if self.get(r, c) { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}
