//! Uniform sampling of Clifford operations and random stabilizer states.
//!
//! The sampler draws from the canonical form `F1 · H · S · F2` of a
//! symplectic matrix, where `H·S` (Hadamard layer and qubit permutation) is
//! drawn from the quantum Mallows distribution and `F1`, `F2` are
//! Hadamard-free layers built from random symmetric and unit lower-triangular
//! matrices. Combined with independent uniform phase bits this yields every
//! element of the Clifford group (modulo global phase) with equal probability
//! in `O(k^2)` random bits.

use crate::bits::BitMatrix;
use crate::clifford::CliffordOperation;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::RandomStream;
use crate::tableau::StabilizerTableau;

/// Hadamard mask and qubit permutation from the quantum Mallows distribution.
fn sample_quantum_mallows(k: usize, rng: &mut RandomStream) -> (Vec<bool>, Vec<usize>) {
    let mut hadamard = vec![false; k];
    let mut perm = vec![0usize; k];
    let mut remaining: Vec<usize> = (0..k).collect();
    for i in 0..k {
        let m = k - i;
        let eps = 4f64.powi(-(m as i32));
        let r = rng.uniform_open_closed();
        let index = -((r + (1.0 - r) * eps).log2().ceil()) as i64;
        let index = index.clamp(0, 2 * m as i64 - 1) as usize;
        hadamard[i] = index < m;
        let pos = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = remaining.remove(pos);
    }
    (hadamard, perm)
}

fn random_lower(k: usize, unit_diagonal: bool, symmetric: bool, rng: &mut RandomStream) -> BitMatrix {
    let mut m = BitMatrix::zeros(k, k);
    for i in 0..k {
        let d = if unit_diagonal { true } else { rng.bit() };
        m.set(i, i, d);
    }
    for i in 0..k {
        for j in 0..i {
            let b = rng.bit();
            m.set(i, j, b);
            if symmetric {
                m.set(j, i, b);
            }
        }
    }
    m
}

/// `[[delta, 0], [gamma·delta, (delta^{-1})ᵀ]]`, a Hadamard-free symplectic layer.
fn hadamard_free_layer(k: usize, rng: &mut RandomStream) -> BitMatrix {
    let gamma = random_lower(k, false, true, rng);
    let delta = random_lower(k, true, false, rng);
    let prod = gamma.mul(&delta);
    let inv_t = delta.inverse().expect("unit lower-triangular matrices are invertible").transpose();
    let mut out = BitMatrix::zeros(2 * k, 2 * k);
    for r in 0..k {
        for c in 0..k {
            out.set(r, c, delta.get(r, c));
            out.set(k + r, c, prod.get(r, c));
            out.set(k + r, k + c, inv_t.get(r, c));
        }
    }
    out
}

/// Uniformly random symplectic matrix together with uniform phase bits.
pub(crate) fn random_symplectic(k: usize, rng: &mut RandomStream) -> (BitMatrix, Vec<bool>) {
    if 2 * k <= 64 {
        let (rows, phases) = random_symplectic_small(k, rng);
        let m = BitMatrix::from_fn(2 * k, 2 * k, |r, c| rows[r] >> c & 1 == 1);
        return (m, phases);
    }
    random_symplectic_wide(k, rng)
}

fn random_symplectic_wide(k: usize, rng: &mut RandomStream) -> (BitMatrix, Vec<bool>) {
    let (hadamard, perm) = sample_quantum_mallows(k, rng);
    let layer1 = hadamard_free_layer(k, rng);
    let layer2 = hadamard_free_layer(k, rng);

    let mut middle = BitMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        middle.row_mut(i).copy_from_slice(layer2.row(perm[i]));
        middle.row_mut(k + i).copy_from_slice(layer2.row(k + perm[i]));
    }
    for (i, &h) in hadamard.iter().enumerate() {
        if h {
            middle.swap_rows(i, k + i);
        }
    }
    let symplectic = layer1.mul(&middle);
    let phases = (0..2 * k).map(|_| rng.bit()).collect();
    (symplectic, phases)
}

// Same draws as the wide path, with every matrix row held in one word.

type Rows = [u64; 64];

fn mul_small(a: &[u64], b: &[u64], out: &mut [u64]) {
    for (o, &row) in out.iter_mut().zip(a) {
        let mut acc = 0u64;
        let mut bits = row;
        while bits != 0 {
            acc ^= b[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        *o = acc;
    }
}

fn random_lower_small(k: usize, unit_diagonal: bool, symmetric: bool, rng: &mut RandomStream) -> Rows {
    let mut m = [0u64; 64];
    for (i, row) in m.iter_mut().enumerate().take(k) {
        let d = if unit_diagonal { true } else { rng.bit() };
        *row |= (d as u64) << i;
    }
    for i in 0..k {
        for j in 0..i {
            let b = rng.bit() as u64;
            m[i] |= b << j;
            if symmetric {
                m[j] |= b << i;
            }
        }
    }
    m
}

fn hadamard_free_layer_small(k: usize, rng: &mut RandomStream) -> Rows {
    let gamma = random_lower_small(k, false, true, rng);
    let delta = random_lower_small(k, true, false, rng);
    let mut prod = [0u64; 64];
    mul_small(&gamma[..k], &delta[..k], &mut prod[..k]);
    // Forward substitution inverts the unit lower-triangular delta.
    let mut inv = [0u64; 64];
    for i in 0..k {
        let mut row = 1u64 << i;
        let mut below = delta[i] & !(1u64 << i);
        while below != 0 {
            row ^= inv[below.trailing_zeros() as usize];
            below &= below - 1;
        }
        inv[i] = row;
    }
    let mut out = [0u64; 64];
    for r in 0..k {
        out[r] = delta[r];
        let mut inv_t = 0u64;
        for (c, &row) in inv[..k].iter().enumerate() {
            inv_t |= (row >> r & 1) << c;
        }
        out[k + r] = prod[r] | inv_t << k;
    }
    out
}

fn random_symplectic_small(k: usize, rng: &mut RandomStream) -> (Vec<u64>, Vec<bool>) {
    let (hadamard, perm) = sample_quantum_mallows(k, rng);
    let layer1 = hadamard_free_layer_small(k, rng);
    let layer2 = hadamard_free_layer_small(k, rng);
    let mut middle = [0u64; 64];
    for i in 0..k {
        middle[i] = layer2[perm[i]];
        middle[k + i] = layer2[k + perm[i]];
    }
    for (i, &h) in hadamard.iter().enumerate() {
        if h {
            middle.swap(i, k + i);
        }
    }
    let mut rows = vec![0u64; 2 * k];
    mul_small(&layer1[..2 * k], &middle[..2 * k], &mut rows);
    let phases = (0..2 * k).map(|_| rng.bit()).collect();
    (rows, phases)
}

/// Draws a `k`-qubit Clifford operation uniformly from the Clifford group.
pub fn random_clifford(k: usize, rng: &mut RandomStream) -> Result<CliffordOperation> {
    if k == 0 {
        return Err(Error::EmptyState);
    }
    if 2 * k <= 64 {
        let (rows, phases) = random_symplectic_small(k, rng);
        return Ok(CliffordOperation::from_packed_rows(k, &rows, phases));
    }
    let (m, phases) = random_symplectic(k, rng);
    Ok(CliffordOperation::new_unchecked(m, phases))
}

/// A uniform `n`-qubit Clifford applied to `|0...0>`.
pub fn random_stabilizer_state(n: usize, rng: &mut RandomStream) -> Result<StabilizerTableau> {
    if n == 0 {
        return Err(Error::EmptyState);
    }
    let (m, phases) = random_symplectic(n, rng);
    let row = |r: usize, negative: bool| {
        let mut p = PauliString::identity(n);
        for q in 0..n {
            p.set(q, crate::pauli::Pauli::from_bits(m.get(r, q), m.get(r, n + q)));
        }
        p.set_negative(negative);
        p
    };
    let generators: Vec<PauliString> = (0..n).map(|i| row(n + i, phases[n + i])).collect();
    let destabilizers: Vec<PauliString> = (0..n).map(|i| row(i, false)).collect();
    StabilizerTableau::from_rows_unchecked(&generators, &destabilizers)
}
