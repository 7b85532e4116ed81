//! Reference values the checks compare against, loaded from TOML.
//!
//! The built-in copy is `data/expected.toml`; `check --expected FILE`
//! substitutes another file with the same schema.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BUILTIN: &str = include_str!("../data/expected.toml");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expected {
    pub hexagon: HexagonCounts,
    pub doily: DoilyCounts,
    pub table1: Vec<Table1Row>,
    pub hyperplanes: HyperplaneTotals,
    pub table2: Vec<Table2Row>,
    pub singular: SingularExpect,
    pub embedding: EmbeddingDims,
    pub subhex: SubhexExpect,
    pub h1_complement: H1Complement,
    pub pairing: Pairing,
    pub veldkamp: VeldkampCounts,
    pub automorphisms: AutomorphismCounts,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HexagonCounts {
    pub points: usize,
    pub lines: usize,
    pub lines_per_point: usize,
    pub diameter: usize,
    pub type_one_lines: usize,
    pub type_two_lines: usize,
    pub grid_quads: usize,
    pub doily_quads: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DoilyCounts {
    pub hyperplanes: usize,
    pub perps: usize,
    pub grids: usize,
    pub ovoids: usize,
    pub ovoids_stated: usize,
    pub veldkamp_lines: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table1Row {
    #[serde(rename = "type")]
    pub line_type: String,
    pub core: String,
    pub perps: usize,
    pub ovoids: usize,
    pub grids: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneTotals {
    pub total: usize,
    pub first_family: usize,
    pub second_family: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table2Row {
    pub label: String,
    pub family: u8,
    pub pt: usize,
    pub ln: usize,
    pub orders: Vec<usize>,
    pub grid: [usize; 3],
    pub doily: [usize; 4],
    pub cd: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularExpect {
    #[serde(rename = "type")]
    pub label: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDims {
    pub grid: usize,
    pub doily: usize,
    pub hexagon: usize,
    pub subhex: usize,
    pub h2_h5_h6_span: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubhexExpect {
    pub points: usize,
    pub lines: usize,
    pub hyperplanes: usize,
    pub classes: usize,
    pub sources: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H1Complement {
    pub points: usize,
    pub components: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub per_line: usize,
    /// Hexagon type label to doily line type.
    #[serde(flatten)]
    pub types: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VeldkampCounts {
    pub hexagon_points: u64,
    pub hexagon_lines: u64,
    pub subhex_points: u64,
    pub subhex_lines: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismCounts {
    pub line3: u64,
    pub grid: u64,
    pub doily: u64,
    pub hexagon: u64,
}

impl Expected {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in expected table parses")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ExpectedData(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn table2_row(&self, label: &str) -> Option<&Table2Row> {
        self.table2.iter().find(|r| r.label == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses() {
        let e = Expected::builtin();
        assert_eq!(e.table2.len(), 8);
        assert_eq!(e.table1.len(), 5);
        assert_eq!(e.pairing.types.len(), 5);
        assert_eq!(e.pairing.types["H7"], "IV");
        let cd: usize = e.table2.iter().map(|r| r.cd).sum();
        assert_eq!(cd, e.hyperplanes.total);
    }

    #[test]
    fn malformed_is_reported() {
        assert!(matches!(
            Expected::parse("hexagon = 3"),
            Err(Error::ExpectedData(_))
        ));
    }
}
