//! Published eigenvalue tables shipped with the crate (`data/*.csv`).

use crate::error::{Error, Result};
use crate::models::ModelKind;

pub const AHO_TABLE_CSV: &str = include_str!("../data/aho_table.csv");
pub const DWP_TABLE_CSV: &str = include_str!("../data/dwp_table.csv");

/// One published eigenvalue, with the value of the flow method and the
/// independent reference value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub g: f64,
    pub level: usize,
    pub flow: f64,
    pub reference: f64,
}

pub fn reference_table(kind: ModelKind) -> Vec<ReferenceValue> {
    let src = match kind {
        ModelKind::Aho => AHO_TABLE_CSV,
        ModelKind::Dwp => DWP_TABLE_CSV,
    };
    parse_table(src).expect("bundled tables are well formed")
}

/// Parses `g,level,flow,reference` rows; `#` lines and the header are skipped.
pub fn parse_table(src: &str) -> Result<Vec<ReferenceValue>> {
    let bad = |line: &str| Error::InvalidArgument(format!("malformed table row: {line}"));
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("g,"))
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(line));
            }
            Ok(ReferenceValue {
                g: f[0].parse().map_err(|_| bad(line))?,
                level: f[1].parse().map_err(|_| bad(line))?,
                flow: f[2].parse().map_err(|_| bad(line))?,
                reference: f[3].parse().map_err(|_| bad(line))?,
            })
        })
        .collect()
}

/// Distinct couplings of a table, ascending.
pub fn table_couplings(table: &[ReferenceValue]) -> Vec<f64> {
    let mut g: Vec<f64> = table.iter().map(|r| r.g).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}
