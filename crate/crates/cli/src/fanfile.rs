//! Fan input files.
//!
//! A fan file is one JSON object:
//!
//! ```json
//! {
//!   "rank": 3,
//!   "rays": [[0, 0, 1], [1, 0, 1], [0, 1, 1], [-1, -1, 1]],
//!   "max_cones": [[0, 1, 2], [0, 2, 3], [0, 3, 1]],
//!   "polytope_constants": ["0", "0", "0", "-1"]
//! }
//! ```
//!
//! `polytope_constants` is optional; its entries are exact rationals written
//! as `"p/q"` or `"p"`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use syz_core::toric_cy::Fan;
use syz_series::rational::parse_rational;
use syz_series::Rational;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polytope_constants: Option<Vec<String>>,
}

/// A parsed fan file.
#[derive(Clone, Debug)]
pub struct FanInput {
    pub fan: Fan,
    pub polytope_constants: Option<Vec<Rational>>,
}

pub fn parse_fan(text: &str) -> Result<FanInput, CliError> {
    let file: FanFile =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("fan file: {e}")))?;
    let polytope_constants = file
        .polytope_constants
        .as_ref()
        .map(|cs| {
            cs.iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(|e| CliError::Parse(format!("fan file: {e}")))?;
    Ok(FanInput {
        fan: Fan::new(file.rank, file.rays, file.max_cones),
        polytope_constants,
    })
}

pub fn read_fan(path: &Path) -> Result<FanInput, CliError> {
    parse_fan(&crate::read_file(path)?)
}
