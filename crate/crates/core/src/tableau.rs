//! Stabilizer tableau with destabilizers.
//!
//! Besides the usual Aaronson–Gottesman bookkeeping, the generators are kept
//! in *right-echelon gauge*: ordering bit columns as `x_0 < z_0 < x_1 < z_1 <
//! ...`, every generator has a distinct highest nonzero column (its pivot).
//! In that gauge the stabilizers supported on the prefix `[0, i)` are spanned
//! by the generators whose pivot lies below column `2i`, so the prefix entropy
//! is `S_[0,i) = i - #{pivots < 2i}` and the whole height profile costs one
//! pass over the pivot table.
//!
//! Generator row operations `g_a <- g_a g_b` are always paired with
//! `d_b <- d_b d_a` so that `g_i` anticommutes exactly with `d_i`.
//! Destabilizer signs carry no physical meaning and are not tracked.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{get_bit, get_bits, set_bits, words_for, xor_into, BitMatrix, WORD_BITS};
use crate::clifford::CliffordOperation;
use crate::error::{Error, Result};
use crate::pauli::{anticommute, product_phase, PauliString};
use crate::rng::RandomStream;

const NONE: u32 = u32::MAX;

/// Result of a single-qubit `Z` measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementOutcome {
    /// `0` for the `+1` eigenvalue, `1` for `-1`.
    pub value: u8,
    /// Whether the outcome was forced by the state.
    pub deterministic: bool,
}

/// A pure stabilizer state on `n` qubits.
#[derive(Clone, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    // rows 0..n are generators, rows n..2n destabilizers
    x: Vec<u64>,
    z: Vec<u64>,
    sign: Vec<bool>,
    pivot_owner: Vec<u32>,
    pivot_of: Vec<u32>,
}

impl StabilizerTableau {
    /// The product state `|0...0>`: generators `Z_i`, destabilizers `X_i`.
    pub fn new_product_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyState);
        }
        let words = words_for(n);
        let mut t = Self {
            n,
            words,
            x: vec![0; 2 * n * words],
            z: vec![0; 2 * n * words],
            sign: vec![false; n],
            pivot_owner: vec![NONE; 2 * n],
            pivot_of: vec![NONE; n],
        };
        for i in 0..n {
            t.z[i * words + i / WORD_BITS] |= 1 << (i % WORD_BITS);
            t.x[(n + i) * words + i / WORD_BITS] |= 1 << (i % WORD_BITS);
            t.pivot_owner[2 * i + 1] = i as u32;
            t.pivot_of[i] = (2 * i + 1) as u32;
        }
        Ok(t)
    }

    /// Builds a tableau from explicit rows, validating every invariant.
    pub fn from_rows(generators: &[PauliString], destabilizers: &[PauliString]) -> Result<Self> {
        let t = Self::from_rows_unchecked(generators, destabilizers)?;
        t.check_invariants()?;
        Ok(t)
    }

    pub(crate) fn from_rows_unchecked(generators: &[PauliString], destabilizers: &[PauliString]) -> Result<Self> {
        let n = generators.len();
        if n == 0 {
            return Err(Error::EmptyState);
        }
        if destabilizers.len() != n {
            return Err(Error::Invariant(format!("{n} generators but {} destabilizers", destabilizers.len())));
        }
        if let Some(p) = generators.iter().chain(destabilizers).find(|p| p.len() != n) {
            return Err(Error::Invariant(format!("row {p} has width {} instead of {n}", p.len())));
        }
        let words = words_for(n);
        let mut t = Self {
            n,
            words,
            x: Vec::with_capacity(2 * n * words),
            z: Vec::with_capacity(2 * n * words),
            sign: generators.iter().map(|g| g.is_negative()).collect(),
            pivot_owner: vec![NONE; 2 * n],
            pivot_of: vec![NONE; n],
        };
        for p in generators.iter().chain(destabilizers) {
            t.x.extend_from_slice(&p.x);
            t.z.extend_from_slice(&p.z);
        }
        for r in 0..n {
            if t.pivot_col(r).is_none() {
                return Err(Error::Invariant(format!("generator {r} is the identity")));
            }
        }
        t.rebuild_gauge()?;
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generator(&self, i: usize) -> PauliString {
        let w = self.words;
        PauliString::from_parts(self.n, self.x[i * w..(i + 1) * w].to_vec(), self.z[i * w..(i + 1) * w].to_vec(), self.sign[i])
    }

    pub fn destabilizer(&self, i: usize) -> PauliString {
        let r = self.n + i;
        let w = self.words;
        PauliString::from_parts(self.n, self.x[r * w..(r + 1) * w].to_vec(), self.z[r * w..(r + 1) * w].to_vec(), false)
    }

    pub fn generators(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.generator(i)).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        (0..self.n).map(|i| self.destabilizer(i)).collect()
    }

    #[inline]
    fn row_x(&self, r: usize) -> &[u64] {
        &self.x[r * self.words..(r + 1) * self.words]
    }

    #[inline]
    fn row_z(&self, r: usize) -> &[u64] {
        &self.z[r * self.words..(r + 1) * self.words]
    }

    /// Highest nonzero bit column of row `r` in `x_0 < z_0 < x_1 < ...` order.
    #[inline]
    fn pivot_col(&self, r: usize) -> Option<usize> {
        let base = r * self.words;
        for w in (0..self.words).rev() {
            let m = self.x[base + w] | self.z[base + w];
            if m != 0 {
                let bit = WORD_BITS - 1 - m.leading_zeros() as usize;
                let q = w * WORD_BITS + bit;
                let zb = (self.z[base + w] >> bit) & 1;
                return Some(2 * q + zb as usize);
            }
        }
        None
    }

    /// `g_t <- g_t · g_s` with sign tracking, and the compensating
    /// `d_s <- d_s · d_t`.
    #[inline]
    fn gen_mul(&mut self, t: usize, s: usize) {
        let w = self.words;
        let e = product_phase(
            &self.x[t * w..(t + 1) * w],
            &self.z[t * w..(t + 1) * w],
            &self.x[s * w..(s + 1) * w],
            &self.z[s * w..(s + 1) * w],
        );
        debug_assert!(e % 2 == 0, "generators must commute");
        self.sign[t] ^= self.sign[s] ^ (e == 2);
        for i in 0..w {
            self.x[t * w + i] ^= self.x[s * w + i];
            self.z[t * w + i] ^= self.z[s * w + i];
        }
        let (dt, ds) = (self.n + t, self.n + s);
        for i in 0..w {
            self.x[ds * w + i] ^= self.x[dt * w + i];
            self.z[ds * w + i] ^= self.z[dt * w + i];
        }
    }

    /// Reduces generator `r` against settled generators until its pivot is
    /// unclaimed, then claims it.
    fn settle(&mut self, r: usize) {
        loop {
            let p = self.pivot_col(r).expect("generators are independent");
            let owner = self.pivot_owner[p];
            if owner == NONE {
                self.pivot_owner[p] = r as u32;
                self.pivot_of[r] = p as u32;
                return;
            }
            self.gen_mul(r, owner as usize);
        }
    }

    fn rebuild_gauge(&mut self) -> Result<()> {
        self.pivot_owner.iter_mut().for_each(|o| *o = NONE);
        for r in 0..self.n {
            loop {
                let Some(p) = self.pivot_col(r) else {
                    return Err(Error::Invariant("generators are not independent".into()));
                };
                let owner = self.pivot_owner[p];
                if owner == NONE {
                    self.pivot_owner[p] = r as u32;
                    self.pivot_of[r] = p as u32;
                    break;
                }
                self.gen_mul(r, owner as usize);
            }
        }
        Ok(())
    }

    /// Conjugates every row by `op` acting on qubits `start..start + width`.
    pub fn apply_clifford(&mut self, op: &CliffordOperation, start: usize) -> Result<()> {
        let k = op.width();
        if k > 64 {
            return Err(Error::WidthTooLarge(k));
        }
        if start + k > self.n {
            return Err(Error::WindowOutOfBounds { start, width: k, n: self.n });
        }
        let w = self.words;
        for r in 0..2 * self.n {
            let row = r * w..(r + 1) * w;
            let bx = get_bits(&self.x[row.clone()], start, k);
            let bz = get_bits(&self.z[row.clone()], start, k);
            if bx | bz == 0 {
                continue;
            }
            let (ox, oz, flip) = op.conjugate_local(bx, bz);
            set_bits(&mut self.x[row.clone()], start, k, ox);
            set_bits(&mut self.z[row], start, k, oz);
            if r < self.n {
                self.sign[r] ^= flip;
            }
        }
        // Only generators whose pivot sits inside the window can have moved.
        let lo = 2 * start;
        let hi = 2 * (start + k);
        let mut moved = [0u32; 128];
        let mut count = 0;
        for c in lo..hi {
            let owner = self.pivot_owner[c];
            if owner != NONE {
                moved[count] = owner;
                count += 1;
                self.pivot_owner[c] = NONE;
            }
        }
        for &r in &moved[..count] {
            self.settle(r as usize);
        }
        Ok(())
    }

    /// Projective measurement of `Z` on qubit `q` (0-based).
    ///
    /// A forced outcome is returned without drawing from `rng`.
    pub fn measure_z(&mut self, q: usize, rng: &mut RandomStream) -> Result<MeasurementOutcome> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        let w = self.words;
        let word = q / WORD_BITS;
        let mask = 1u64 << (q % WORD_BITS);
        let mut pick: Option<usize> = None;
        for r in 0..self.n {
            if self.x[r * w + word] & mask != 0 && pick.is_none_or(|p| self.pivot_of[r] < self.pivot_of[p]) {
                pick = Some(r);
            }
        }
        let Some(p) = pick else {
            return Ok(MeasurementOutcome { value: self.forced_z_sign(q) as u8, deterministic: true });
        };
        let value = rng.bit();
        // The pick has the lowest pivot among anticommuting generators, so
        // multiplying it into the others leaves their pivots in place.
        for r in 0..self.n {
            if r != p && self.x[r * w + word] & mask != 0 {
                let e = product_phase(self.row_x(r), self.row_z(r), self.row_x(p), self.row_z(p));
                debug_assert!(e % 2 == 0);
                self.sign[r] ^= self.sign[p] ^ (e == 2);
                for i in 0..w {
                    self.x[r * w + i] ^= self.x[p * w + i];
                    self.z[r * w + i] ^= self.z[p * w + i];
                }
            }
        }
        let dp = self.n + p;
        for r in self.n..2 * self.n {
            if r != dp && self.x[r * w + word] & mask != 0 {
                for i in 0..w {
                    self.x[r * w + i] ^= self.x[p * w + i];
                    self.z[r * w + i] ^= self.z[p * w + i];
                }
            }
        }
        for i in 0..w {
            self.x[dp * w + i] = self.x[p * w + i];
            self.z[dp * w + i] = self.z[p * w + i];
            self.x[p * w + i] = 0;
            self.z[p * w + i] = 0;
        }
        self.z[p * w + word] = mask;
        self.sign[p] = value;
        self.pivot_owner[self.pivot_of[p] as usize] = NONE;
        self.settle(p);
        Ok(MeasurementOutcome { value: value as u8, deterministic: false })
    }

    /// Sign of `±Z_q` when it lies in the stabilizer group.
    fn forced_z_sign(&self, q: usize) -> bool {
        let w = self.words;
        let mut sx = vec![0u64; w];
        let mut sz = vec![0u64; w];
        let mut negative = false;
        for i in 0..self.n {
            if get_bit(self.row_x(self.n + i), q) {
                let e = product_phase(&sx, &sz, self.row_x(i), self.row_z(i));
                negative ^= self.sign[i] ^ (e == 2);
                xor_into(&mut sx, self.row_x(i));
                xor_into(&mut sz, self.row_z(i));
            }
        }
        debug_assert!(sx.iter().all(|&v| v == 0));
        negative
    }

    /// Entanglement entropy (in bits) of an arbitrary qubit subset:
    /// `rank(generators restricted to A) - |A|`.
    pub fn subset_entropy(&self, subset: &[usize]) -> Result<usize> {
        let mut seen = vec![false; self.n];
        for &q in subset {
            if q >= self.n {
                return Err(Error::QubitOutOfRange { index: q, n: self.n });
            }
            seen[q] = true;
        }
        let qubits: Vec<usize> = (0..self.n).filter(|&q| seen[q]).collect();
        if qubits.is_empty() || qubits.len() == self.n {
            return Ok(0);
        }
        let a = qubits.len();
        let mut m = BitMatrix::zeros(self.n, 2 * a);
        for r in 0..self.n {
            let (rx, rz) = (self.row_x(r), self.row_z(r));
            for (c, &q) in qubits.iter().enumerate() {
                if get_bit(rx, q) {
                    m.set(r, 2 * c, true);
                }
                if get_bit(rz, q) {
                    m.set(r, 2 * c + 1, true);
                }
            }
        }
        Ok(m.rank_in_place() - a)
    }

    /// `S` of the prefix `[0, i)`, read from the echelon pivots.
    pub fn prefix_entropy(&self, i: usize) -> usize {
        let i = i.min(self.n);
        let settled = self.pivot_owner[..2 * i].iter().filter(|&&o| o != NONE).count();
        i - settled
    }

    /// The three prefix entropies `(h_{c-1}, h_c, h_{c+1})` around cut `c`.
    pub fn prefix_triple(&self, c: usize) -> (usize, usize, usize) {
        debug_assert!(c >= 1 && c < self.n);
        let below = self.pivot_owner[..2 * (c - 1)].iter().filter(|&&o| o != NONE).count();
        let slot = |col: usize| (self.pivot_owner[col] != NONE) as usize;
        let s0 = below;
        let s1 = s0 + slot(2 * c - 2) + slot(2 * c - 1);
        let s2 = s1 + slot(2 * c) + slot(2 * c + 1);
        (c - 1 - s0, c - s1, c + 1 - s2)
    }

    /// All prefix entropies `h_0..h_n`.
    pub fn prefix_profile(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(0);
        let mut settled = 0;
        for i in 0..self.n {
            settled += (self.pivot_owner[2 * i] != NONE) as usize + (self.pivot_owner[2 * i + 1] != NONE) as usize;
            out.push(i + 1 - settled);
        }
        out
    }

    /// Verifies commutation, independence, destabilizer pairing and the
    /// echelon gauge.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let anti = anticommute(self.row_x(a), self.row_z(a), self.row_x(b), self.row_z(b));
                let expected = a + n == b;
                if anti != expected {
                    let kind = |r: usize| if r < n { ("g", r) } else { ("d", r - n) };
                    let (ka, ia) = kind(a);
                    let (kb, ib) = kind(b);
                    return Err(Error::Invariant(format!(
                        "{ka}{ia} and {kb}{ib} {}",
                        if anti { "anticommute" } else { "commute" }
                    )));
                }
            }
        }
        let mut gm = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for q in 0..n {
                gm.set(r, 2 * q, get_bit(self.row_x(r), q));
                gm.set(r, 2 * q + 1, get_bit(self.row_z(r), q));
            }
        }
        if gm.rank_in_place() != n {
            return Err(Error::Invariant("generators are not independent".into()));
        }
        for r in 0..n {
            let p = self.pivot_col(r).ok_or_else(|| Error::Invariant(format!("generator {r} is the identity")))?;
            if self.pivot_of[r] as usize != p || self.pivot_owner[p] as usize != r {
                return Err(Error::Invariant(format!("generator {r} is out of echelon gauge")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for StabilizerTableau {
    /// Checkpoint text: `n` generator lines followed by `n` destabilizer
    /// lines, each a sign character and one letter per qubit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            writeln!(f, "{}", self.generator(i))?;
        }
        for i in 0..self.n {
            writeln!(f, "{}", self.destabilizer(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StabilizerTableau(n={})\n{self}", self.n)
    }
}

impl FromStr for StabilizerTableau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows: Vec<PauliString> =
            s.lines().map(str::trim).filter(|l| !l.is_empty()).map(str::parse).collect::<Result<_>>()?;
        if rows.is_empty() || rows.len() % 2 != 0 {
            return Err(Error::Parse(format!("expected 2n rows, found {}", rows.len())));
        }
        let n = rows.len() / 2;
        if let Some(bad) = rows.iter().find(|p| p.len() != n) {
            return Err(Error::Parse(format!("row {bad} does not have {n} qubits")));
        }
        let (g, d) = rows.split_at(n);
        let d: Vec<PauliString> = d
            .iter()
            .cloned()
            .map(|mut p| {
                p.set_negative(false);
                p
            })
            .collect();
        Self::from_rows(g, &d)
    }
}
