//! Clifford operations described by their action on Pauli generators.

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::pauli::product_phase_word;

/// A `k`-qubit Clifford operation, modulo global phase.
///
/// Row `r` of the symplectic matrix is the image of the `r`-th basis Pauli,
/// where rows `0..k` are `X_0..X_{k-1}` and rows `k..2k` are `Z_0..Z_{k-1}`.
/// Columns follow the same layout (`x` bits then `z` bits). Phase bit `r`
/// set means the image carries a minus sign.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CliffordOperation {
    width: usize,
    matrix: BitMatrix,
    phases: Vec<bool>,
    // (x, z, negative) images packed into u64 when width <= 64
    packed: Vec<(u64, u64, bool)>,
    // For width <= SPLIT_MAX: images of X^x (first 2^k entries) and Z^z
    // (next 2^k) as (x, z, i-exponent).
    split: Vec<(u64, u64, u8)>,
}

const SPLIT_MAX: usize = 6;

impl std::fmt::Debug for CliffordOperation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CliffordOperation").field("width", &self.width).field("phases", &self.phases).finish()
    }
}

impl CliffordOperation {
    /// Builds an operation from its symplectic matrix and phase bits, checking
    /// that the matrix preserves the symplectic form.
    pub fn new(matrix: BitMatrix, phases: Vec<bool>) -> Result<Self> {
        let two_k = matrix.rows();
        if two_k == 0 || two_k % 2 != 0 || matrix.cols() != two_k || phases.len() != two_k {
            return Err(Error::NotSymplectic);
        }
        if !is_symplectic(&matrix) {
            return Err(Error::NotSymplectic);
        }
        Ok(Self::new_unchecked(matrix, phases))
    }

    pub(crate) fn new_unchecked(matrix: BitMatrix, phases: Vec<bool>) -> Self {
        let width = matrix.rows() / 2;
        let packed = if width <= 64 {
            (0..2 * width)
                .map(|r| {
                    let mut x = 0u64;
                    let mut z = 0u64;
                    for q in 0..width {
                        x |= (matrix.get(r, q) as u64) << q;
                        z |= (matrix.get(r, width + q) as u64) << q;
                    }
                    (x, z, phases[r])
                })
                .collect()
        } else {
            Vec::new()
        };
        let split = if width <= SPLIT_MAX { split_tables(width, &packed) } else { Vec::new() };
        Self { width, matrix, phases, packed, split }
    }

    /// Builds an operation from rows holding `x` bits in `0..k` and `z` bits
    /// in `k..2k` of one word each.
    pub(crate) fn from_packed_rows(width: usize, rows: &[u64], phases: Vec<bool>) -> Self {
        debug_assert!(2 * width <= 64 && rows.len() == 2 * width);
        let matrix = BitMatrix::from_fn(2 * width, 2 * width, |r, c| rows[r] >> c & 1 == 1);
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let packed: Vec<(u64, u64, bool)> =
            rows.iter().zip(&phases).map(|(&row, &neg)| (row & mask, row >> width & mask, neg)).collect();
        let split = if width <= SPLIT_MAX { split_tables(width, &packed) } else { Vec::new() };
        Self { width, matrix, phases, packed, split }
    }

    /// Builds an operation from the signed images of `X_q` and `Z_q` written as
    /// Pauli strings, e.g. `(["+XX", "+IX"], ["+ZI", "+ZZ"])` for CNOT.
    pub fn from_images(x_images: &[&str], z_images: &[&str]) -> Result<Self> {
        let k = x_images.len();
        if z_images.len() != k || k == 0 {
            return Err(Error::NotSymplectic);
        }
        let mut m = BitMatrix::zeros(2 * k, 2 * k);
        let mut phases = vec![false; 2 * k];
        for (r, img) in x_images.iter().chain(z_images).enumerate() {
            let p: crate::pauli::PauliString = img.parse()?;
            if p.len() != k {
                return Err(Error::Parse(format!("image {img:?} has wrong width")));
            }
            for q in 0..k {
                m.set(r, q, p.x_bit(q));
                m.set(r, k + q, p.z_bit(q));
            }
            phases[r] = p.is_negative();
        }
        Self::new(m, phases)
    }

    pub fn identity(k: usize) -> Self {
        Self::new_unchecked(BitMatrix::identity(2 * k), vec![false; 2 * k])
    }

    pub fn hadamard() -> Self {
        Self::from_images(&["+Z"], &["+X"]).expect("valid gate")
    }

    /// The phase gate `S = diag(1, i)`.
    pub fn phase() -> Self {
        Self::from_images(&["+Y"], &["+Z"]).expect("valid gate")
    }

    /// CNOT with control on the first qubit of its window.
    pub fn cnot() -> Self {
        Self::from_images(&["+XX", "+IX"], &["+ZI", "+ZZ"]).expect("valid gate")
    }

    pub fn swap() -> Self {
        Self::from_images(&["+IX", "+XI"], &["+IZ", "+ZI"]).expect("valid gate")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn symplectic_matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    pub fn phase_bits(&self) -> &[bool] {
        &self.phases
    }

    /// Conjugates a local Pauli `±P(x, z)` on the operation's `k <= 64` qubits,
    /// returning the image bits and whether the sign flips.
    #[inline]
    pub fn conjugate_local(&self, x: u64, z: u64) -> (u64, u64, bool) {
        debug_assert!(self.width <= 64);
        if !self.split.is_empty() {
            // P(x,z) = i^{|x&z|} · X^x · Z^z
            let (ax, az, ea) = self.split[x as usize];
            let (bx, bz, eb) = self.split[(1usize << self.width) + z as usize];
            let e = (x & z).count_ones() + ea as u32 + eb as u32 + product_phase_word(ax, az, bx, bz);
            debug_assert!(e % 2 == 0, "image of a Hermitian Pauli must be Hermitian");
            return (ax ^ bx, az ^ bz, e & 3 == 2);
        }
        // P(x,z) = i^{|x&z|} · prod_q X_q^{x_q} Z_q^{z_q}
        let mut e: u32 = (x & z).count_ones();
        let mut ax = 0u64;
        let mut az = 0u64;
        let mut bits_x = x;
        let mut bits_z = z;
        let k = self.width;
        while bits_x | bits_z != 0 {
            let q = (bits_x | bits_z).trailing_zeros() as usize;
            let bit = 1u64 << q;
            if bits_x & bit != 0 {
                let (ix, iz, neg) = self.packed[q];
                e = e.wrapping_add(product_phase_word(ax, az, ix, iz)).wrapping_add(2 * neg as u32);
                ax ^= ix;
                az ^= iz;
            }
            if bits_z & bit != 0 {
                let (ix, iz, neg) = self.packed[k + q];
                e = e.wrapping_add(product_phase_word(ax, az, ix, iz)).wrapping_add(2 * neg as u32);
                ax ^= ix;
                az ^= iz;
            }
            bits_x &= !bit;
            bits_z &= !bit;
        }
        e &= 3;
        debug_assert!(e % 2 == 0, "image of a Hermitian Pauli must be Hermitian");
        (ax, az, e == 2)
    }

    /// The operation `then ∘ self`: apply `self` first, then `then`.
    pub fn then(&self, then: &CliffordOperation) -> Result<CliffordOperation> {
        if self.width != then.width {
            return Err(Error::WidthMismatch { op: then.width, window: self.width });
        }
        if self.width > 64 {
            return Err(Error::WidthTooLarge(self.width));
        }
        let k = self.width;
        let mut m = BitMatrix::zeros(2 * k, 2 * k);
        let mut phases = vec![false; 2 * k];
        for r in 0..2 * k {
            let (x, z, neg) = self.packed[r];
            let (ox, oz, flip) = then.conjugate_local(x, z);
            for q in 0..k {
                m.set(r, q, (ox >> q) & 1 == 1);
                m.set(r, k + q, (oz >> q) & 1 == 1);
            }
            phases[r] = neg ^ flip;
        }
        Ok(Self::new_unchecked(m, phases))
    }
}

/// Signed images of every `X^x` and every `Z^z`, built by adding one factor
/// at a time.
fn split_tables(width: usize, packed: &[(u64, u64, bool)]) -> Vec<(u64, u64, u8)> {
    let size = 1usize << width;
    let mut out = vec![(0u64, 0u64, 0u8); 2 * size];
    for half in 0..2 {
        let base = half * size;
        for m in 1..size {
            let q = m.trailing_zeros() as usize;
            let (px, pz, pe) = out[base + (m & (m - 1))];
            let (ix, iz, neg) = packed[half * width + q];
            let e = pe as u32 + 2 * neg as u32 + product_phase_word(px, pz, ix, iz);
            out[base + m] = (px ^ ix, pz ^ iz, (e & 3) as u8);
        }
    }
    out
}

/// Checks `M Λ Mᵀ = Λ` with `Λ = [[0, I], [I, 0]]`.
pub fn is_symplectic(m: &BitMatrix) -> bool {
    let two_k = m.rows();
    if two_k % 2 != 0 || m.cols() != two_k {
        return false;
    }
    let k = two_k / 2;
    for a in 0..two_k {
        for b in 0..two_k {
            let mut form = false;
            for q in 0..k {
                form ^= (m.get(a, q) & m.get(b, k + q)) ^ (m.get(a, k + q) & m.get(b, q));
            }
            let expected = a != b && a % k == b % k;
            if form != expected {
                return false;
            }
        }
    }
    true
}
