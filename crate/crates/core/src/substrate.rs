//! The entanglement height profile and the local block taxonomy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::{get_bit, WORD_BITS};
use crate::error::{Error, Result};
use crate::tableau::StabilizerTableau;

/// Prefix entropies `h_0..h_L` of a chain of `L` qubits.
///
/// Always satisfies `h_0 = h_L = 0`, `|h_{i+1} - h_i| <= 1` and
/// `h_i <= min(i, L - i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct HeightProfile {
    heights: Vec<usize>,
}

impl TryFrom<Vec<usize>> for HeightProfile {
    type Error = Error;

    fn try_from(heights: Vec<usize>) -> Result<Self> {
        Self::new(heights)
    }
}

impl From<HeightProfile> for Vec<usize> {
    fn from(p: HeightProfile) -> Self {
        p.heights
    }
}

impl HeightProfile {
    pub fn new(heights: Vec<usize>) -> Result<Self> {
        let l = heights.len().checked_sub(1).ok_or_else(|| Error::Invariant("empty profile".into()))?;
        if heights[0] != 0 || heights[l] != 0 {
            return Err(Error::Invariant("profile must vanish at both boundaries".into()));
        }
        for (i, w) in heights.windows(2).enumerate() {
            if w[0].abs_diff(w[1]) > 1 {
                return Err(Error::Invariant(format!("RSOS violated between cuts {i} and {}", i + 1)));
            }
        }
        if let Some(i) = (0..=l).find(|&i| heights[i] > i.min(l - i)) {
            return Err(Error::Invariant(format!("h_{i} = {} exceeds min(i, L - i)", heights[i])));
        }
        Ok(Self { heights })
    }

    /// `h_i = S_[0,i)` for every cut of `state`.
    pub fn from_state(state: &StabilizerTableau) -> Self {
        let heights = state.prefix_profile();
        debug_assert!(Self::new(heights.clone()).is_ok());
        Self { heights }
    }

    /// Number of qubits `L` (one less than the number of cuts).
    pub fn sites(&self) -> usize {
        self.heights.len() - 1
    }

    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    pub fn height(&self, i: usize) -> usize {
        self.heights[i]
    }

    pub fn half_cut(&self) -> usize {
        self.heights[self.sites() / 2]
    }

    /// Mirror image `h_i -> h_{L-i}`.
    pub fn reflected(&self) -> Self {
        let mut heights = self.heights.clone();
        heights.reverse();
        Self { heights }
    }
}

/// Block classes of three consecutive heights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockClass {
    I,
    T,
    U,
    L,
    P,
    W,
}

impl BlockClass {
    pub const ALL: [BlockClass; 6] = [BlockClass::I, BlockClass::T, BlockClass::U, BlockClass::L, BlockClass::P, BlockClass::W];

    pub fn letter(self) -> char {
        match self {
            BlockClass::I => 'I',
            BlockClass::T => 'T',
            BlockClass::U => 'U',
            BlockClass::L => 'L',
            BlockClass::P => 'P',
            BlockClass::W => 'W',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BlockClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for BlockClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" => Ok(BlockClass::I),
            "T" => Ok(BlockClass::T),
            "U" => Ok(BlockClass::U),
            "L" => Ok(BlockClass::L),
            "P" => Ok(BlockClass::P),
            "W" => Ok(BlockClass::W),
            other => Err(Error::Config(format!("unknown block class {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    /// The variant whose nonzero slopes rise to the right.
    Left,
    Right,
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub class: BlockClass,
    pub orientation: Orientation,
}

/// Which one-sided slope pattern is called `L` and which `P`.
///
/// `LP` assigns `L = {(0,+1), (-1,0)}` and `P = {(+1,0), (0,-1)}` in terms of
/// the slope pair `(h_j - h_{j-1}, h_{j+1} - h_j)`; `PL` swaps the letters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum BlockConvention {
    #[default]
    LP,
    PL,
}

impl BlockConvention {
    pub fn tag(self) -> &'static str {
        match self {
            BlockConvention::LP => "LP",
            BlockConvention::PL => "PL",
        }
    }
}

impl fmt::Display for BlockConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BlockConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "LP" => Ok(BlockConvention::LP),
            "PL" => Ok(BlockConvention::PL),
            other => Err(Error::Config(format!("unknown block convention {other:?} (expected LP or PL)"))),
        }
    }
}

/// Classifies the slope pair `(d1, d2)`, each in `{-1, 0, 1}`.
pub fn classify_slopes(d1: i8, d2: i8, convention: BlockConvention) -> Block {
    use BlockClass::*;
    use Orientation::*;
    let (class, orientation) = match (d1, d2) {
        (0, 0) => (I, Symmetric),
        (1, -1) => (T, Symmetric),
        (-1, 1) => (U, Symmetric),
        (1, 1) => (W, Left),
        (-1, -1) => (W, Right),
        (0, 1) => (L, Left),
        (-1, 0) => (L, Right),
        (1, 0) => (P, Left),
        (0, -1) => (P, Right),
        _ => panic!("slopes must lie in {{-1, 0, 1}}, got ({d1}, {d2})"),
    };
    let class = match (convention, class) {
        (BlockConvention::PL, L) => P,
        (BlockConvention::PL, P) => L,
        (_, c) => c,
    };
    Block { class, orientation }
}

/// Classifies three consecutive heights `(h_{j-1}, h_j, h_{j+1})`.
#[inline]
pub fn classify_heights(triple: (usize, usize, usize), convention: BlockConvention) -> Block {
    let (a, b, c) = triple;
    classify_slopes((b as i64 - a as i64) as i8, (c as i64 - b as i64) as i8, convention)
}

/// Block at interior cut `j`, `1 <= j <= L - 1`.
pub fn classify_block(profile: &HeightProfile, j: usize, convention: BlockConvention) -> Result<Block> {
    let l = profile.sites();
    if j < 1 || j + 1 > l {
        return Err(Error::SiteOutOfRange { site: j, lo: 1, hi: l.saturating_sub(1) });
    }
    let h = profile.heights();
    Ok(classify_heights((h[j - 1], h[j], h[j + 1]), convention))
}

/// What produced an impact record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImpactCause {
    /// A measurement step at the given site.
    Measurement { site: usize },
    /// Profiles supplied directly by the caller.
    External,
}

/// Total absolute change of the profile caused by one event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactRecord {
    pub total_change: usize,
    pub sigma: f64,
    pub caused_by: ImpactCause,
    pub time: u64,
}

/// `s = Σ_i |h_i^after - h_i^before|` and `σ = s / L`.
pub fn impact(before: &HeightProfile, after: &HeightProfile) -> Result<ImpactRecord> {
    if before.heights.len() != after.heights.len() {
        return Err(Error::LengthMismatch(before.heights.len(), after.heights.len()));
    }
    let s = total_change(before.heights(), after.heights());
    Ok(ImpactRecord { total_change: s, sigma: s as f64 / before.sites() as f64, caused_by: ImpactCause::External, time: 0 })
}

pub(crate) fn total_change(before: &[usize], after: &[usize]) -> usize {
    before.iter().zip(after).map(|(a, b)| a.abs_diff(*b)).sum()
}

/// Lengths of the maximal-slope staircases anchored at each boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProtectedLength {
    pub left: usize,
    pub right: usize,
}

impl ProtectedLength {
    pub fn mean(&self) -> f64 {
        (self.left + self.right) as f64 / 2.0
    }
}

pub fn protected_length(profile: &HeightProfile) -> ProtectedLength {
    let h = profile.heights();
    let l = profile.sites();
    let left = (1..=l).take_while(|&i| h[i] == i).count();
    let right = (1..=l).take_while(|&i| h[l - i] == i).count();
    ProtectedLength { left, right }
}

/// Generators in clipped gauge, reduced to their support endpoints.
///
/// Each prefix entropy equals half the number of generators whose support
/// straddles the cut.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClippedGauge {
    sites: usize,
    /// Inclusive `(leftmost, rightmost)` qubit of every generator.
    endpoints: Vec<(usize, usize)>,
}

impl ClippedGauge {
    pub fn endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    /// Number of generators straddling cut `i` (between qubits `i-1` and `i`).
    pub fn straddling(&self, cut: usize) -> usize {
        self.endpoints.iter().filter(|&&(a, b)| a < cut && b >= cut).count()
    }

    pub fn profile(&self) -> Vec<usize> {
        let mut delta = vec![0i64; self.sites + 2];
        for &(a, b) in &self.endpoints {
            delta[a + 1] += 1;
            delta[b + 1] -= 1;
        }
        let mut out = Vec::with_capacity(self.sites + 1);
        let mut run = 0i64;
        for d in delta.iter().take(self.sites + 1) {
            run += d;
            debug_assert!(run % 2 == 0, "straddling count must be even in clipped gauge");
            out.push((run / 2) as usize);
        }
        out
    }
}

/// Brings the generators of `state` into clipped gauge.
///
/// Left endpoints are fixed first by forward elimination; right endpoints are
/// then made distinct by always multiplying into the generator with the
/// smaller left pivot, which leaves every left pivot in place.
pub fn clipped_gauge(state: &StabilizerTableau) -> ClippedGauge {
    let n = state.num_qubits();
    let mut rows: Vec<(Vec<u64>, Vec<u64>)> = state.generators().into_iter().map(|g| (g.x, g.z)).collect();
    let left_pivot = |row: &(Vec<u64>, Vec<u64>)| -> usize {
        for (w, (x, z)) in row.0.iter().zip(&row.1).enumerate() {
            let m = x | z;
            if m != 0 {
                let q = w * WORD_BITS + m.trailing_zeros() as usize;
                return 2 * q + usize::from(!get_bit(&row.0, q));
            }
        }
        unreachable!("generators are never the identity")
    };
    let right_pivot = |row: &(Vec<u64>, Vec<u64>)| -> usize {
        for w in (0..row.0.len()).rev() {
            let m = row.0[w] | row.1[w];
            if m != 0 {
                let q = w * WORD_BITS + (WORD_BITS - 1 - m.leading_zeros() as usize);
                return 2 * q + usize::from(get_bit(&row.1, q));
            }
        }
        unreachable!("generators are never the identity")
    };
    let mul = |rows: &mut Vec<(Vec<u64>, Vec<u64>)>, dst: usize, src: usize| {
        let (sx, sz) = rows[src].clone();
        for (d, s) in rows[dst].0.iter_mut().zip(&sx) {
            *d ^= s;
        }
        for (d, s) in rows[dst].1.iter_mut().zip(&sz) {
            *d ^= s;
        }
    };

    let mut owner: Vec<Option<usize>> = vec![None; 2 * n];
    for r in 0..rows.len() {
        loop {
            let p = left_pivot(&rows[r]);
            match owner[p] {
                None => {
                    owner[p] = Some(r);
                    break;
                }
                Some(o) => mul(&mut rows, r, o),
            }
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; 2 * n];
    let mut work: Vec<usize> = (0..rows.len()).rev().collect();
    while let Some(r) = work.pop() {
        let p = right_pivot(&rows[r]);
        match owner[p] {
            None => owner[p] = Some(r),
            Some(o) => {
                if left_pivot(&rows[r]) < left_pivot(&rows[o]) {
                    mul(&mut rows, r, o);
                    work.push(r);
                } else {
                    mul(&mut rows, o, r);
                    owner[p] = Some(r);
                    work.push(o);
                }
            }
        }
    }

    let endpoints = rows.iter().map(|row| (left_pivot(row) / 2, right_pivot(row) / 2)).collect();
    ClippedGauge { sites: n, endpoints }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordOperation;

    fn profile(h: &[usize]) -> HeightProfile {
        HeightProfile::new(h.to_vec()).unwrap()
    }

    #[test]
    fn profile_invariants_enforced() {
        assert!(HeightProfile::new(vec![0, 1, 0]).is_ok());
        assert!(HeightProfile::new(vec![0, 1, 1]).is_err());
        assert!(HeightProfile::new(vec![0, 2, 1, 0]).is_err());
        assert!(HeightProfile::new(vec![0, 1, 2, 1, 0]).is_ok());
        assert!(HeightProfile::new(vec![0, 1, 2, 0]).is_err());
        assert!(HeightProfile::new(vec![]).is_err());
    }

    #[test]
    fn block_table() {
        use BlockClass::*;
        use Orientation::*;
        let lp = BlockConvention::LP;
        let b = |h: (usize, usize, usize)| classify_heights(h, lp);
        assert_eq!(b((2, 2, 2)), Block { class: I, orientation: Symmetric });
        assert_eq!(b((1, 2, 1)).class, T);
        assert_eq!(b((2, 1, 2)).class, U);
        assert_eq!(b((1, 2, 3)), Block { class: W, orientation: Left });
        assert_eq!(b((2, 2, 3)), Block { class: L, orientation: Left });
        assert_eq!(b((2, 3, 3)), Block { class: P, orientation: Left });
        assert_eq!(b((3, 2, 1)), Block { class: W, orientation: Right });
        assert_eq!(b((3, 2, 2)), Block { class: L, orientation: Right });
        assert_eq!(b((3, 3, 2)), Block { class: P, orientation: Right });
        assert_eq!(classify_heights((2, 2, 3), BlockConvention::PL).class, P);
        assert_eq!(classify_heights((2, 3, 3), BlockConvention::PL).class, L);
    }

    #[test]
    fn classification_is_reflection_covariant() {
        for d1 in -1i8..=1 {
            for d2 in -1i8..=1 {
                for conv in [BlockConvention::LP, BlockConvention::PL] {
                    let a = classify_slopes(d1, d2, conv);
                    let b = classify_slopes(-d2, -d1, conv);
                    assert_eq!(a.class, b.class);
                    let flipped = match a.orientation {
                        Orientation::Left => Orientation::Right,
                        Orientation::Right => Orientation::Left,
                        Orientation::Symmetric => Orientation::Symmetric,
                    };
                    assert_eq!(b.orientation, flipped);
                }
            }
        }
    }

    #[test]
    fn block_site_range() {
        let p = profile(&[0, 1, 1, 0]);
        assert!(classify_block(&p, 0, BlockConvention::LP).is_err());
        assert!(classify_block(&p, 3, BlockConvention::LP).is_err());
        assert_eq!(classify_block(&p, 1, BlockConvention::LP).unwrap().class, BlockClass::P);
    }

    #[test]
    fn impact_examples() {
        let ghz = profile(&[0, 1, 1, 1, 1, 0]);
        let flat = profile(&[0; 6]);
        let rec = impact(&ghz, &flat).unwrap();
        assert_eq!(rec.total_change, 4);
        assert!((rec.sigma - 0.8).abs() < 1e-12);
        assert_eq!(impact(&ghz, &ghz).unwrap().total_change, 0);
        assert!(impact(&ghz, &profile(&[0, 0])).is_err());
    }

    #[test]
    fn protected_examples() {
        assert_eq!(protected_length(&profile(&[0; 7])), ProtectedLength { left: 0, right: 0 });
        let pyramid: Vec<usize> = (0..=8).map(|i: usize| i.min(8 - i)).collect();
        assert_eq!(protected_length(&profile(&pyramid)), ProtectedLength { left: 4, right: 4 });
        assert_eq!(protected_length(&profile(&[0, 1, 2, 2, 1, 0])), ProtectedLength { left: 2, right: 2 });
    }

    #[test]
    fn clipped_gauge_small_states() {
        let mut t = StabilizerTableau::new_product_state(2).unwrap();
        t.apply_clifford(&CliffordOperation::hadamard(), 0).unwrap();
        t.apply_clifford(&CliffordOperation::cnot(), 0).unwrap();
        let g = clipped_gauge(&t);
        assert_eq!(g.straddling(1), 2);
        assert_eq!(g.profile(), vec![0, 1, 0]);

        let mut ghz = StabilizerTableau::new_product_state(4).unwrap();
        ghz.apply_clifford(&CliffordOperation::hadamard(), 0).unwrap();
        for q in 0..3 {
            ghz.apply_clifford(&CliffordOperation::cnot(), q).unwrap();
        }
        assert_eq!(clipped_gauge(&ghz).profile(), ghz.prefix_profile());
    }
}
