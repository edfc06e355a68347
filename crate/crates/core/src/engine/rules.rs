//! Update rules and the catalog of nontrivial rule sets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::substrate::BlockClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Unitary,
    Measure,
}

/// Total mapping from block class to action, stored as the set of classes
/// that receive a unitary.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RuleSet {
    unitary: u8,
}

impl RuleSet {
    pub fn from_unitary_blocks(blocks: &[BlockClass]) -> Self {
        let unitary = blocks.iter().fold(0u8, |m, b| m | (1 << b.index()));
        Self { unitary }
    }

    #[inline]
    pub fn action(&self, class: BlockClass) -> Action {
        if self.unitary & (1 << class.index()) != 0 {
            Action::Unitary
        } else {
            Action::Measure
        }
    }

    pub fn is_unitary(&self, class: BlockClass) -> bool {
        self.action(class) == Action::Unitary
    }

    pub fn unitary_blocks(&self) -> Vec<BlockClass> {
        BlockClass::ALL.into_iter().filter(|&b| self.is_unitary(b)).collect()
    }

    pub fn measure_blocks(&self) -> Vec<BlockClass> {
        BlockClass::ALL.into_iter().filter(|&b| !self.is_unitary(b)).collect()
    }

    /// Phase-diagram class in `{1, 2, 3, 4}`; only defined when `I` receives
    /// a unitary.
    pub fn phase_class(&self) -> Result<PhaseClass> {
        classify_phase_diagram(self)
    }
}

fn join(blocks: &[BlockClass]) -> String {
    blocks.iter().map(|b| b.letter().to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.unitary_blocks()))
    }
}

impl fmt::Debug for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unitary{{{self}}}")
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    /// Parses a comma-separated list of unitary blocks, e.g. `"I,U,L"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches("unitary").trim_matches(|c| c == '{' || c == '}');
        let blocks: Vec<BlockClass> =
            s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect::<Result<_>>()?;
        Ok(Self::from_unitary_blocks(&blocks))
    }
}

impl TryFrom<String> for RuleSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<RuleSet> for String {
    fn from(r: RuleSet) -> Self {
        r.to_string()
    }
}

/// The four phase-diagram families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseClass {
    /// Area law → fluctuating volume law (W measured).
    One,
    /// Area law → frozen volume law (P, W unitary; L measured).
    Two,
    /// Area law → fluctuating → frozen (W unitary; P measured).
    Three,
    /// Frozen for every u > 0 (L, P, W unitary).
    Four,
}

impl PhaseClass {
    pub fn number(self) -> u8 {
        match self {
            PhaseClass::One => 1,
            PhaseClass::Two => 2,
            PhaseClass::Three => 3,
            PhaseClass::Four => 4,
        }
    }
}

pub fn classify_phase_diagram(rules: &RuleSet) -> Result<PhaseClass> {
    use BlockClass::*;
    if !rules.is_unitary(I) {
        return Err(Error::Config(format!("rule set {rules:?} does not apply unitaries to I")));
    }
    let (l, p, w) = (rules.is_unitary(L), rules.is_unitary(P), rules.is_unitary(W));
    Ok(match (w, p, l) {
        (false, _, _) => PhaseClass::One,
        (true, false, _) => PhaseClass::Three,
        (true, true, false) => PhaseClass::Two,
        (true, true, true) => PhaseClass::Four,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub index: usize,
    pub rules: RuleSet,
    pub class: PhaseClass,
}

/// The 30 nontrivial rule sets with `I → unitary`.
#[derive(Debug, Clone)]
pub struct ModelCatalog {
    entries: Vec<CatalogEntry>,
}

/// Optional blocks in significance order: reading membership of
/// `(T, U, L, P, W)` as a 5-bit binary number gives the catalog index.
const OPTIONAL: [BlockClass; 5] = [BlockClass::T, BlockClass::U, BlockClass::L, BlockClass::P, BlockClass::W];

/// Named representatives of the four families.
pub const ANCHORS: [(&str, &str); 4] = [("model1", "I,U,L"), ("model2", "I,T,P,W"), ("model3", "I,T,L,W"), ("model4", "I,U,L,P,W")];

pub fn enumerate_models() -> ModelCatalog {
    let entries = (1..31)
        .map(|index: usize| {
            let mut blocks = vec![BlockClass::I];
            for (bit, &b) in OPTIONAL.iter().enumerate() {
                if index & (1 << (4 - bit)) != 0 {
                    blocks.push(b);
                }
            }
            let rules = RuleSet::from_unitary_blocks(&blocks);
            let class = classify_phase_diagram(&rules).expect("catalog entries apply unitaries to I");
            CatalogEntry { index, rules, class }
        })
        .collect();
    ModelCatalog { entries }
}

impl ModelCatalog {
    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    pub fn index_of(&self, rules: &RuleSet) -> Option<usize> {
        self.entries.iter().find(|e| e.rules == *rules).map(|e| e.index)
    }

    pub fn anchor(&self, name: &str) -> Option<&CatalogEntry> {
        let (_, blocks) = ANCHORS.iter().find(|(n, _)| *n == name)?;
        let rules: RuleSet = blocks.parse().ok()?;
        self.entries.iter().find(|e| e.rules == rules)
    }

    /// Resolves `model1`..`model4`, a catalog index, or an explicit unitary
    /// block list such as `I,T,P,W`.
    pub fn resolve(&self, selector: &str) -> Result<RuleSet> {
        let s = selector.trim();
        if let Some(e) = self.anchor(s) {
            return Ok(e.rules);
        }
        if let Ok(i) = s.parse::<usize>() {
            return self.get(i).map(|e| e.rules).ok_or_else(|| Error::Config(format!("no catalog entry {i}")));
        }
        s.parse::<RuleSet>().map_err(|_| Error::Config(format!("unknown model selector {selector:?}")))
    }
}
