//! Hermitian Pauli strings with a ±1 sign.
//!
//! A single-qubit factor is encoded by the bit pair `(x, z)`:
//! `(0,0) = I`, `(1,0) = X`, `(0,1) = Z`, `(1,1) = Y`. Note that `Y` is the
//! Hermitian operator, so `Y = i·X·Z`.

use std::fmt;
use std::str::FromStr;

use crate::bits::{get_bit, set_bit, words_for};
use crate::error::{Error, Result};

/// Exponent `e` (mod 4) such that `P(x1,z1)·P(x2,z2) = i^e · P(x1^x2, z1^z2)`
/// for one word of packed factors.
#[inline]
pub(crate) fn product_phase_word(x1: u64, z1: u64, x2: u64, z2: u64) -> u32 {
    let plus = (x1 & z1 & z2 & !x2) | (x1 & !z1 & z2 & x2) | (!x1 & z1 & x2 & !z2);
    let minus = (x1 & z1 & x2 & !z2) | (x1 & !z1 & z2 & !x2) | (!x1 & z1 & x2 & z2);
    (plus.count_ones().wrapping_sub(minus.count_ones())) & 3
}

/// Same as [`product_phase_word`] summed over whole rows.
#[inline]
pub(crate) fn product_phase(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> u32 {
    let mut e = 0u32;
    for i in 0..x1.len() {
        e = e.wrapping_add(product_phase_word(x1[i], z1[i], x2[i], z2[i]));
    }
    e & 3
}

/// Symplectic inner product of two packed rows: `true` when they anticommute.
#[inline]
pub(crate) fn anticommute(x1: &[u64], z1: &[u64], x2: &[u64], z2: &[u64]) -> bool {
    let mut acc = 0u32;
    for i in 0..x1.len() {
        acc ^= ((x1[i] & z2[i]) ^ (z1[i] & x2[i])).count_ones();
    }
    acc & 1 == 1
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A Hermitian Pauli operator on `n` qubits with sign ±1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    pub(crate) x: Vec<u64>,
    pub(crate) z: Vec<u64>,
    pub(crate) negative: bool,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = words_for(n).max(1);
        Self { n, x: vec![0; w], z: vec![0; w], negative: false }
    }

    /// `P` acting on qubit `q` (0-based), identity elsewhere.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set(q, p);
        s
    }

    pub(crate) fn from_parts(n: usize, x: Vec<u64>, z: Vec<u64>, negative: bool) -> Self {
        Self { n, x, z, negative }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn set_negative(&mut self, negative: bool) {
        self.negative = negative;
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(get_bit(&self.x, q), get_bit(&self.z, q))
    }

    pub fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub fn x_bit(&self, q: usize) -> bool {
        get_bit(&self.x, q)
    }

    pub fn z_bit(&self, q: usize) -> bool {
        get_bit(&self.z, q)
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        !anticommute(&self.x, &self.z, &other.x, &other.z)
    }

    /// Replaces `self` with `self · other`. Both operands must commute so the
    /// product stays Hermitian.
    pub fn mul_assign_commuting(&mut self, other: &PauliString) -> Result<()> {
        let e = product_phase(&self.x, &self.z, &other.x, &other.z);
        if e & 1 == 1 {
            return Err(Error::Invariant("product of anticommuting Paulis is not Hermitian".into()));
        }
        self.negative ^= other.negative ^ (e == 2);
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
        Ok(())
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for q in 0..self.n {
            write!(f, "{}", self.get(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let negative = match chars.next() {
            Some('+') => false,
            Some('-') => true,
            _ => return Err(Error::Parse(format!("missing sign in {s:?}"))),
        };
        let letters: Vec<char> = chars.collect();
        if letters.is_empty() {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        let mut p = PauliString::identity(letters.len());
        p.negative = negative;
        for (q, c) in letters.into_iter().enumerate() {
            let letter =
                Pauli::from_letter(c).ok_or_else(|| Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}")))?;
            p.set(q, letter);
        }
        Ok(p)
    }
}
