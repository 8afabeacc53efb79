//! Column mapping between CSV headers and the letter-tagged feature set.
//!
//! Seven original columns (A–G) are read straight from the input file and
//! three derived columns (H–J) are computed from them. The default mapping
//! targets the standard USAspending contract-download headers and can be
//! overridden per run.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Letter tag for a feature column.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

impl Letter {
    /// All ten letters in order.
    pub const ALL: [Letter; 10] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::H,
        Letter::I,
        Letter::J,
    ];

    /// The seven letters read directly from the input file.
    pub const ORIGINAL: [Letter; 7] = [
        Letter::A,
        Letter::B,
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
    ];

    /// The three computed letters.
    pub const DERIVED: [Letter; 3] = [Letter::H, Letter::I, Letter::J];

    pub fn as_str(self) -> &'static str {
        match self {
            Letter::A => "A",
            Letter::B => "B",
            Letter::C => "C",
            Letter::D => "D",
            Letter::E => "E",
            Letter::F => "F",
            Letter::G => "G",
            Letter::H => "H",
            Letter::I => "I",
            Letter::J => "J",
        }
    }

    pub fn is_original(self) -> bool {
        !self.is_derived()
    }

    pub fn is_derived(self) -> bool {
        matches!(self, Letter::H | Letter::I | Letter::J)
    }
}

impl std::fmt::Display for Letter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Whether a derived column adds or subtracts its second operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Add,
    Sub,
}

/// A derived column defined as `lhs sign rhs`, e.g. H = A − D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "(Letter, Letter, Sign)", into = "(Letter, Letter, Sign)")]
pub struct DerivedFormula {
    pub lhs: Letter,
    pub rhs: Letter,
    pub sign: Sign,
}

impl DerivedFormula {
    pub fn sub(lhs: Letter, rhs: Letter) -> Self {
        DerivedFormula {
            lhs,
            rhs,
            sign: Sign::Sub,
        }
    }

    pub fn apply(&self, lhs: f64, rhs: f64) -> f64 {
        match self.sign {
            Sign::Add => lhs + rhs,
            Sign::Sub => lhs - rhs,
        }
    }
}

impl From<(Letter, Letter, Sign)> for DerivedFormula {
    fn from((lhs, rhs, sign): (Letter, Letter, Sign)) -> Self {
        DerivedFormula { lhs, rhs, sign }
    }
}

impl From<DerivedFormula> for (Letter, Letter, Sign) {
    fn from(f: DerivedFormula) -> Self {
        (f.lhs, f.rhs, f.sign)
    }
}

/// Maps the record-identifier column and letters A–G onto CSV headers, and
/// letters H–J onto derived formulas over A–G.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub id_column: String,
    pub original: BTreeMap<Letter, String>,
    pub derived: BTreeMap<Letter, DerivedFormula>,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        let original = [
            (Letter::A, "federal_action_obligation"),
            (Letter::B, "total_dollars_obligated"),
            (Letter::C, "total_outlayed_amount_for_overall_award"),
            (Letter::D, "base_and_exercised_options_value"),
            (Letter::E, "current_total_value_of_award"),
            (Letter::F, "base_and_all_options_value"),
            (Letter::G, "potential_total_value_of_award"),
        ]
        .into_iter()
        .map(|(l, h)| (l, h.to_string()))
        .collect();
        let derived = [
            (Letter::H, DerivedFormula::sub(Letter::A, Letter::D)),
            (Letter::I, DerivedFormula::sub(Letter::E, Letter::A)),
            (Letter::J, DerivedFormula::sub(Letter::G, Letter::F)),
        ]
        .into_iter()
        .collect();
        ColumnMapping {
            id_column: "contract_award_unique_key".to_string(),
            original,
            derived,
        }
    }
}

impl ColumnMapping {
    /// Check structural invariants: all of A–G mapped to distinct headers,
    /// derived formulas keyed by H–J and referencing only A–G.
    pub fn validate(&self) -> Result<()> {
        for letter in Letter::ORIGINAL {
            if !self.original.contains_key(&letter) {
                return Err(Error::InvalidConfig {
                    message: format!("column mapping is missing letter {letter}"),
                });
            }
        }
        for letter in self.original.keys() {
            if letter.is_derived() {
                return Err(Error::InvalidConfig {
                    message: format!("letter {letter} cannot map to an input header"),
                });
            }
        }
        let mut headers: Vec<&str> = self.original.values().map(String::as_str).collect();
        headers.sort_unstable();
        headers.dedup();
        if headers.len() != self.original.len() {
            return Err(Error::InvalidConfig {
                message: "column mapping assigns the same header to two letters".into(),
            });
        }
        for (letter, formula) in &self.derived {
            if !letter.is_derived() {
                return Err(Error::InvalidConfig {
                    message: format!("{letter} is not a derived letter"),
                });
            }
            if formula.lhs.is_derived() || formula.rhs.is_derived() {
                return Err(Error::InvalidConfig {
                    message: format!("derived column {letter} must reference only A\u{2013}G"),
                });
            }
        }
        Ok(())
    }

    /// CSV header mapped to `letter`, if it is an original letter.
    pub fn header_for(&self, letter: Letter) -> Option<&str> {
        self.original.get(&letter).map(String::as_str)
    }
}
