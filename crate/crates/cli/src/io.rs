//! File loading with format autodetection, and output helpers.

use std::fs;
use std::path::Path;

use fleetassign_distsim::{parse_topology_json, NetworkTopology};
use fleetassign_dynamic::{parse_scenario_json, Scenario};
use fleetassign_model::format::{parse_demand_text, parse_instance_json, parse_instance_text, parse_resources_text};
use fleetassign_model::{AssignmentInstance, SideConstraintSet};
use sha2::{Digest, Sha256};

use crate::error::{CliError, ErrorClass};

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new(ErrorClass::Io, format!("{}: {e}", path.display())))
}

pub fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::new(ErrorClass::Io, format!("{}: {e}", path.display())))
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// `.json` files are structured documents; anything else is the text format.
pub fn load_instance(path: &Path) -> Result<AssignmentInstance, CliError> {
    let text = read(path)?;
    let parsed = if is_json(path) {
        parse_instance_json(&text)
    } else {
        parse_instance_text(&text)
    };
    parsed.map_err(|e| CliError::from(e).context(path.display()))
}

pub fn load_demand(path: &Path) -> Result<Vec<usize>, CliError> {
    parse_demand_text(&read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn load_resources(path: &Path, n: usize, m: usize) -> Result<SideConstraintSet, CliError> {
    parse_resources_text(&read(path)?, n, m).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn load_scenario(path: &Path) -> Result<Scenario, CliError> {
    parse_scenario_json(&read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

pub fn load_topology(path: &Path) -> Result<NetworkTopology, CliError> {
    parse_topology_json(&read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

/// Hex SHA-256 of the concatenated parts.
pub fn digest<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update(part.as_bytes());
        hasher.update([0u8]);
    }
    hex::encode(hasher.finalize())
}
