//! JSON layout and state files, CSV distributions.
//!
//! Complex numbers are `[re, im]` pairs throughout.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::{build_periodic_layout, make_named_coin, Coin2x2, CoinLayout};
use crate::error::{Error, Result};
use crate::linalg::CVector;
use crate::walk::StateVector;

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One coin in a layout file: a named family or explicit entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum SiteSpec {
    Named {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
    Matrix {
        matrix: [[Pair; 2]; 2],
    },
}

impl SiteSpec {
    pub fn to_coin(&self) -> Result<Coin2x2> {
        match self {
            SiteSpec::Named { name, params } => make_named_coin(name, params),
            SiteSpec::Matrix { matrix } => Coin2x2::new(matrix.map(|row| row.map(from_pair))),
        }
    }

    pub fn from_coin(c: &Coin2x2) -> Self {
        SiteSpec::Matrix {
            matrix: c.entries().map(|row| row.map(to_pair)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSpec {
    pub coin: SiteSpec,
    pub l: usize,
    pub coin2: SiteSpec,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<Vec<SiteSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternSpec>,
}

impl LayoutFile {
    pub fn to_layout(&self) -> Result<CoinLayout> {
        match (&self.sites, &self.pattern) {
            (Some(sites), None) => {
                if sites.len() != self.n {
                    return Err(Error::LayoutLength {
                        n: self.n,
                        got: sites.len(),
                    });
                }
                CoinLayout::new(sites.iter().map(SiteSpec::to_coin).collect::<Result<_>>()?)
            }
            (None, Some(p)) => build_periodic_layout(p.coin.to_coin()?, p.l, p.coin2.to_coin()?, p.m, self.n),
            _ => Err(Error::Invalid(
                "layout file needs exactly one of \"sites\" and \"pattern\"".into(),
            )),
        }
    }

    pub fn from_layout(layout: &CoinLayout) -> Self {
        LayoutFile {
            n: layout.n(),
            sites: Some(layout.coins().iter().map(SiteSpec::from_coin).collect()),
            pattern: None,
        }
    }
}

pub fn parse_layout(json: &str) -> Result<CoinLayout> {
    serde_json::from_str::<LayoutFile>(json)?.to_layout()
}

pub fn read_layout(path: &Path) -> Result<CoinLayout> {
    parse_layout(&std::fs::read_to_string(path)?)
}

pub fn layout_to_json(layout: &CoinLayout) -> Result<String> {
    Ok(serde_json::to_string_pretty(&LayoutFile::from_layout(layout))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<Pair>,
}

impl StateFile {
    pub fn to_state(&self) -> Result<StateVector> {
        if self.amplitudes.len() != 2 * self.n {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.n,
                got: self.amplitudes.len(),
            });
        }
        StateVector::new(CVector::from_iterator(
            self.amplitudes.len(),
            self.amplitudes.iter().copied().map(from_pair),
        ))
    }

    pub fn from_state(psi: &StateVector) -> Self {
        StateFile {
            n: psi.n(),
            amplitudes: psi.amplitudes().iter().copied().map(to_pair).collect(),
        }
    }
}

pub fn parse_state(json: &str) -> Result<StateVector> {
    serde_json::from_str::<StateFile>(json)?.to_state()
}

pub fn read_state(path: &Path) -> Result<StateVector> {
    parse_state(&std::fs::read_to_string(path)?)
}

/// `vertex,probability` rows under a header line.
pub fn distribution_csv(probabilities: &[f64]) -> String {
    let mut out = String::from("vertex,probability\n");
    for (v, p) in probabilities.iter().enumerate() {
        let _ = writeln!(out, "{v},{}", format_float(*p));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_sites() {
        let lay = parse_layout(
            r#"{"n": 3, "sites": [{"name": "hadamard"}, {"name": "rotation", "params": [0.5]}, {"name": "identity", "params": []}]}"#,
        )
        .unwrap();
        assert_eq!(lay.coin(0), &Coin2x2::hadamard());
        assert_eq!(lay.coin(1), &Coin2x2::rotation(0.5));
    }

    #[test]
    fn matrix_sites_and_round_trip() {
        let lay = CoinLayout::new(vec![Coin2x2::general(0.1, 0.2, 0.3, 0.4), Coin2x2::hadamard_phase(1.1)]).unwrap();
        let back = parse_layout(&layout_to_json(&lay).unwrap()).unwrap();
        assert_eq!(back, lay);
        let explicit = parse_layout(r#"{"n": 1, "sites": [{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]]}]}"#).unwrap();
        assert_eq!(explicit.coin(0), &Coin2x2::pauli_x());
    }

    #[test]
    fn pattern_expands() {
        let lay = parse_layout(
            r#"{"n": 6, "pattern": {"coin": {"name": "x"}, "l": 1, "coin2": {"name": "identity"}, "m": 2}}"#,
        )
        .unwrap();
        let x: Vec<bool> = lay.coins().iter().map(|c| *c == Coin2x2::pauli_x()).collect();
        assert_eq!(x, [true, false, false, true, false, false]);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(parse_layout("{"), Err(Error::Json(_))));
        assert!(matches!(parse_layout(r#"{"n": 2, "sites": [{"name": "hadamard"}]}"#), Err(Error::LayoutLength { .. })));
        assert!(parse_layout(r#"{"n": 1, "sites": [{"name": "h"}], "extra": 1}"#).is_err());
        assert!(parse_layout(r#"{"n": 1}"#).is_err());
        assert!(matches!(parse_layout(r#"{"n": 1, "sites": [{"name": "nope"}]}"#), Err(Error::UnknownCoin(_))));
        assert!(matches!(
            parse_layout(r#"{"n": 1, "sites": [{"matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}]}"#),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            parse_layout(r#"{"n": 5, "pattern": {"coin": {"name": "h"}, "l": 1, "coin2": {"name": "i"}, "m": 1}}"#),
            Err(Error::Divisibility { .. })
        ));
    }

    #[test]
    fn states_and_csv() {
        let psi = parse_state(r#"{"n": 2, "amplitudes": [[0.6,0],[0,0.8],[0,0],[0,0]]}"#).unwrap();
        assert_eq!(StateFile::from_state(&psi).amplitudes[1], [0.0, 0.8]);
        assert!(matches!(parse_state(r#"{"n": 2, "amplitudes": [[1,0]]}"#), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            parse_state(r#"{"n": 1, "amplitudes": [[1,0],[1,0]]}"#),
            Err(Error::NotNormalized { .. })
        ));
        let csv = distribution_csv(&[0.25, 0.75]);
        assert_eq!(csv, "vertex,probability\n0,2.5000000000000000e-1\n1,7.5000000000000000e-1\n");
    }
}
