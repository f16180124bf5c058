//! JSON theory configuration.
//!
//! ```json
//! {
//!   "name": "gbit",
//!   "measurements": [
//!     {"label": "Z", "outcomes": 2, "role": "branch"},
//!     {"label": "X", "outcomes": 2, "role": "fiducial"}
//!   ],
//!   "state_space": {"type": "polytope_v",
//!                   "vertices": [["1/1","1/1","1/1"], ["1/1","1/1","0/1"],
//!                                ["1/1","0/1","1/1"], ["1/1","0/1","0/1"]]}
//! }
//! ```
//!
//! Other state spaces: `{"type": "polytope_h", "halfspaces": [{"a": [...], "b": "p/q"}]}`
//! and `{"type": "ball"}`. A `polytope_v` space may carry an optional
//! `"halfspaces"` list, which is required when d > 7.

use std::path::Path;

use serde::Deserialize;

use super::{MeasurementSpec, Role, StateSpaceSpec, TheorySpec};
use crate::error::{Error, Result};
use crate::exact::{Halfspace, RVec};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTheory {
    #[serde(default)]
    name: Option<String>,
    measurements: Vec<RawMeasurement>,
    state_space: RawStateSpace,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeasurement {
    label: String,
    outcomes: usize,
    role: Role,
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RawStateSpace {
    PolytopeV {
        vertices: Vec<RVec>,
        #[serde(default)]
        halfspaces: Option<Vec<Halfspace>>,
    },
    PolytopeH {
        halfspaces: Vec<Halfspace>,
    },
    Ball,
}

/// Parses and validates a theory config.
pub fn load_theory(text: &str) -> Result<TheorySpec> {
    load_named(text, "theory")
}

/// Reads a config file; the file stem names the theory unless the config does.
pub fn load_theory_file(path: impl AsRef<Path>) -> Result<TheorySpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("theory");
    load_named(&text, stem)
}

fn load_named(text: &str, default_name: &str) -> Result<TheorySpec> {
    let raw: RawTheory = serde_json::from_str(text)?;
    if raw.measurements.is_empty() {
        let (line, column) = locate(text, "\"measurements\"");
        return Err(Error::Parse {
            line,
            column,
            message: "\"measurements\" must list at least one measurement".into(),
        });
    }
    let measurements = raw
        .measurements
        .into_iter()
        .map(|m| MeasurementSpec::new(m.label, m.outcomes, m.role))
        .collect();
    let space = match raw.state_space {
        RawStateSpace::PolytopeV { vertices, halfspaces } => StateSpaceSpec::PolytopeV { vertices, halfspaces },
        RawStateSpace::PolytopeH { halfspaces } => StateSpaceSpec::PolytopeH { halfspaces },
        RawStateSpace::Ball => StateSpaceSpec::Ball,
    };
    TheorySpec::new(
        raw.name.unwrap_or_else(|| default_name.to_string()),
        measurements,
        space,
    )
}

/// 1-based line and column of the first occurrence of `needle`.
fn locate(text: &str, needle: &str) -> (usize, usize) {
    for (i, line) in text.lines().enumerate() {
        if let Some(col) = line.find(needle) {
            return (i + 1, col + 1);
        }
    }
    (1, 1)
}
