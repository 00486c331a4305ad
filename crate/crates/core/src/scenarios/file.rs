//! JSON scenario files.
//!
//! ```text
//! {"name": ..., "dim": n,
//!  "state": {"type": "pure", "vector": [[re, im], ...]}
//!         | {"type": "density", "matrix": [[[re, im], ...], ...]},
//!  "observables": {"E": matrix, ...},
//!  "claims": [{"kind": "commute" | "detect" | "constraints", ...}]}
//! ```
//!
//! Numbers are written with 17 significant digits so that a save/load cycle
//! reproduces every matrix entry bit for bit.

use std::fmt;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Claim, Scenario};
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, Tolerance, C64};
use crate::observables::{DensityOperator, Projection};

/// A double written as `d.ddddddddddddddddde±x`.
struct Digits17(f64);

impl Serialize for Digits17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// Complex number as a `[re, im]` pair.
#[derive(Clone, Copy, Debug)]
struct Entry(C64);

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (Digits17(self.0.re), Digits17(self.0.im)).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(deserializer)?;
        Ok(Entry(C64::new(re, im)))
    }
}

type MatrixRows = Vec<Vec<Entry>>;

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum StateFile {
    Pure {
        vector: Vec<Entry>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Density {
        matrix: MatrixRows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

/// Observable table that rejects duplicate keys instead of keeping the last.
struct ObservableTable(IndexMap<String, MatrixRows>);

impl Serialize for ObservableTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ObservableTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct TableVisitor;

        impl<'de> Visitor<'de> for TableVisitor {
            type Value = ObservableTable;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from observable names to matrices")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut map = IndexMap::new();
                while let Some((k, v)) = access.next_entry::<String, MatrixRows>()? {
                    if map.contains_key(&k) {
                        return Err(serde::de::Error::custom(format!("duplicate observable name `{k}`")));
                    }
                    map.insert(k, v);
                }
                Ok(ObservableTable(map))
            }
        }

        deserializer.deserialize_map(TableVisitor)
    }
}

#[derive(Serialize, Deserialize)]
struct ScenarioFile {
    name: String,
    dim: usize,
    state: StateFile,
    observables: ObservableTable,
    #[serde(default)]
    claims: Vec<Claim>,
}

fn to_rows(m: &CMatrix) -> MatrixRows {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(Entry).collect())
        .collect()
}

fn from_rows(rows: &MatrixRows, dim: usize) -> Result<CMatrix> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: rows.len(),
        });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: r.len(),
        });
    }
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|e| e.0).collect()).collect();
    CMatrix::from_rows(&rows)
}

pub fn scenario_to_json(scn: &Scenario) -> Result<String> {
    let label = Some(scn.state().name().to_string());
    let state = match scn.state_vector() {
        Some(v) => StateFile::Pure {
            vector: v.iter().copied().map(Entry).collect(),
            label,
        },
        None => StateFile::Density {
            matrix: to_rows(scn.state().matrix()),
            label,
        },
    };
    let file = ScenarioFile {
        name: scn.name.clone(),
        dim: scn.dim(),
        state,
        observables: ObservableTable(
            scn.observables()
                .map(|p| (p.name().to_string(), to_rows(p.matrix())))
                .collect(),
        ),
        claims: scn.claims.clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parses and validates a scenario; every matrix must pass the projection or
/// density-operator checks at `tol`.
pub fn parse_scenario(text: &str, tol: &Tolerance) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text)?;
    let dim = file.dim;
    if dim == 0 {
        return Err(Error::Shape("dim must be positive".into()));
    }
    let (state, vector) = match file.state {
        StateFile::Pure { vector, label } => {
            if vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: vector.len(),
                });
            }
            let psi: Vec<C64> = vector.into_iter().map(|e| e.0).collect();
            let rho = DensityOperator::pure(label.unwrap_or_else(|| "rho".into()), &psi, tol)?;
            (rho, Some(psi))
        }
        StateFile::Density { matrix, label } => {
            let m = from_rows(&matrix, dim)?;
            (
                DensityOperator::new(label.unwrap_or_else(|| "rho".into()), m, tol)?,
                None,
            )
        }
    };
    let mut scn = Scenario::new(file.name, state);
    if let Some(v) = vector {
        scn = scn.with_state_vector(v);
    }
    for (name, rows) in file.observables.0 {
        let m = from_rows(&rows, dim)?;
        scn.add(Projection::new(name, m, tol)?)?;
    }
    scn.claims = file.claims;
    Ok(scn)
}

pub fn load_scenario(path: impl AsRef<Path>, tol: &Tolerance) -> Result<Scenario> {
    parse_scenario(&fs::read_to_string(path)?, tol)
}

pub fn save_scenario(scn: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, scenario_to_json(scn)? + "\n")?;
    Ok(())
}
