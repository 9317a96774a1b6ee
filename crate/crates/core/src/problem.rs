//! Problem files: JSON descriptions of an interaction.
//!
//! ```json
//! {
//!   "blocks": [1, 1],
//!   "V": [[0, 1], [0, 1]],
//!   "H": [[1, 0], [1, 0]]
//! }
//! ```
//!
//! Maps are `dim × dim` matrices acting on matrix-unit coordinates (block
//! by block, row-major inside a block); entries are numbers or `[re, im]`
//! pairs.  `"mode": "endo_transfer"` takes `alpha` and `L` instead of `V` and
//! `H`; `"mode": "partial_isometry"` takes `ambient_blocks`, `a_basis` (the
//! images of the matrix units of `A`) and `S`, where elements are lists of
//! square block matrices.  Optional: `tolerance`, `samples`, `seed`, `name`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fdstar::{AlgebraDescriptor, Element};
use crate::interaction::PartialIsometryData;
use crate::linalg::{CMat, C64};
use crate::posmap::LinMap;

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Interaction,
    EndoTransfer,
    PartialIsometry,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Scalar> for C64 {
    fn from(s: Scalar) -> C64 {
        match s {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

type MatrixJson = Vec<Vec<Scalar>>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    #[serde(default)]
    name: Option<String>,
    blocks: Vec<usize>,
    #[serde(default)]
    mode: Mode,
    #[serde(rename = "V", default)]
    v: Option<MatrixJson>,
    #[serde(rename = "H", default)]
    h: Option<MatrixJson>,
    #[serde(default)]
    alpha: Option<MatrixJson>,
    #[serde(rename = "L", default)]
    l: Option<MatrixJson>,
    #[serde(default)]
    ambient_blocks: Option<Vec<usize>>,
    #[serde(default)]
    a_basis: Option<Vec<Vec<MatrixJson>>>,
    #[serde(rename = "S", default)]
    s: Option<Vec<MatrixJson>>,
    #[serde(default)]
    tolerance: Option<f64>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Where the interaction comes from.
#[derive(Clone, Debug)]
pub enum Source {
    Maps { v: LinMap, h: LinMap },
    EndoTransfer { alpha: LinMap, l: LinMap },
    PartialIsometry(PartialIsometryData),
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub name: Option<String>,
    pub algebra: AlgebraDescriptor,
    pub source: Source,
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Problem(msg.into())
}

fn matrix(m: &MatrixJson, rows: usize, cols: usize, what: &str) -> Result<CMat> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(schema(format!("{what} must be {rows}×{cols}")));
    }
    let mut out = CMat::zeros(rows, cols);
    for (i, r) in m.iter().enumerate() {
        for (j, &z) in r.iter().enumerate() {
            let z: C64 = z.into();
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(schema(format!("{what} has a non-finite entry")));
            }
            out[(i, j)] = z;
        }
    }
    Ok(out)
}

fn map(desc: &AlgebraDescriptor, m: &Option<MatrixJson>, what: &str) -> Result<LinMap> {
    let m = m.as_ref().ok_or_else(|| schema(format!("missing field {what}")))?;
    LinMap::new(desc, matrix(m, desc.dim(), desc.dim(), what)?)
}

fn element(desc: &AlgebraDescriptor, blocks: &[MatrixJson], what: &str) -> Result<Element> {
    if blocks.len() != desc.blocks().len() {
        return Err(schema(format!("{what} must have {} blocks", desc.blocks().len())));
    }
    let mats = blocks.iter().zip(desc.blocks()).map(|(b, &d)| matrix(b, d, d, what)).collect::<Result<Vec<_>>>()?;
    Element::from_blocks(desc, mats)
}

impl Problem {
    pub fn from_json(text: &str) -> Result<Problem> {
        let f: ProblemFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
        let algebra = AlgebraDescriptor::new(f.blocks.clone()).map_err(|e| schema(e.to_string()))?;
        if let Some(t) = f.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(schema("tolerance must be positive"));
            }
        }
        let present = |name: &str, field: bool| if field { Err(schema(format!("field {name} does not belong to mode {:?}", f.mode))) } else { Ok(()) };
        let source = match f.mode {
            Mode::Interaction => {
                present("alpha/L", f.alpha.is_some() || f.l.is_some())?;
                present("S", f.s.is_some())?;
                Source::Maps { v: map(&algebra, &f.v, "V")?, h: map(&algebra, &f.h, "H")? }
            }
            Mode::EndoTransfer => {
                present("V/H", f.v.is_some() || f.h.is_some())?;
                present("S", f.s.is_some())?;
                Source::EndoTransfer { alpha: map(&algebra, &f.alpha, "alpha")?, l: map(&algebra, &f.l, "L")? }
            }
            Mode::PartialIsometry => {
                present("V/H", f.v.is_some() || f.h.is_some())?;
                present("alpha/L", f.alpha.is_some() || f.l.is_some())?;
                let blocks = f.ambient_blocks.clone().ok_or_else(|| schema("missing field ambient_blocks"))?;
                let b = AlgebraDescriptor::new(blocks).map_err(|e| schema(e.to_string()))?;
                let basis = f.a_basis.as_ref().ok_or_else(|| schema("missing field a_basis"))?;
                if basis.len() != algebra.dim() {
                    return Err(schema(format!("a_basis needs {} elements", algebra.dim())));
                }
                let embed = basis.iter().map(|x| element(&b, x, "a_basis element")).collect::<Result<Vec<_>>>()?;
                let s = element(&b, f.s.as_ref().ok_or_else(|| schema("missing field S"))?, "S")?;
                Source::PartialIsometry(PartialIsometryData { a: algebra.clone(), b, embed, s })
            }
        };
        Ok(Problem { name: f.name, algebra, source, tolerance: f.tolerance, samples: f.samples, seed: f.seed })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Problem> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
        Problem::from_json(&text)
    }

    pub fn mode(&self) -> Mode {
        match self.source {
            Source::Maps { .. } => Mode::Interaction,
            Source::EndoTransfer { .. } => Mode::EndoTransfer,
            Source::PartialIsometry(_) => Mode::PartialIsometry,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLIP: &str = r#"{"blocks": [1, 1], "V": [[0, 1], [0, 1]], "H": [[1, 0], [1, 0]]}"#;

    #[test]
    fn parses_flip() {
        let p = Problem::from_json(FLIP).unwrap();
        assert_eq!(p.mode(), Mode::Interaction);
        let Source::Maps { v, .. } = &p.source else { panic!() };
        let x = Element::diagonal(&p.algebra, &[C64::new(2.0, 0.0), C64::new(5.0, 0.0)]).unwrap();
        assert_eq!(v.apply(&x).coords().as_slice(), &[C64::new(5.0, 0.0), C64::new(5.0, 0.0)]);
    }

    #[test]
    fn complex_entries_and_partial_isometry() {
        let text = r#"{
            "blocks": [1, 1], "mode": "partial_isometry", "ambient_blocks": [2],
            "a_basis": [[[[1, 0], [0, 0]]], [[[0, 0], [0, [1, 0]]]]],
            "S": [[[0, [1, 0]], [0, 0]]]
        }"#;
        let p = Problem::from_json(text).unwrap();
        let Source::PartialIsometry(d) = &p.source else { panic!() };
        assert_eq!(d.b.dim(), 4);
        assert_eq!(d.s.coords()[1], C64::new(1.0, 0.0));
    }

    #[test]
    fn schema_errors() {
        for bad in [
            "not json",
            r#"{"blocks": [1, 1], "V": [[0, 1]], "H": [[1, 0], [1, 0]]}"#,
            r#"{"blocks": [0], "V": [], "H": []}"#,
            r#"{"blocks": [1], "V": [[1]], "H": [[1]], "tolerance": -1}"#,
            r#"{"blocks": [1], "V": [[1]], "H": [[1]], "colour": 3}"#,
            r#"{"blocks": [1], "mode": "endo_transfer", "alpha": [[1]]}"#,
            r#"{"blocks": [1], "V": [[1]], "H": [[1]], "S": [[[1]]]}"#,
        ] {
            assert!(matches!(Problem::from_json(bad), Err(Error::Problem(_))), "{bad}");
        }
    }
}
