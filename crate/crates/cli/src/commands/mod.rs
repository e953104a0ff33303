pub mod dataset;
pub mod evaluate;
pub mod generate;
pub mod plot;
pub mod predict;
pub mod simulate;
pub mod train;

use ctrlrob_core::attack::AttackStrategy;
use ctrlrob_core::control::ControllabilityKind;
use ctrlrob_core::netgen::Topology;

use crate::errors::CliError;

pub(crate) fn parse_topology(raw: &str) -> Result<Topology, CliError> {
    raw.parse().map_err(CliError::usage)
}

pub(crate) fn parse_strategy(raw: &str) -> Result<AttackStrategy, CliError> {
    raw.parse().map_err(CliError::usage)
}

pub(crate) fn parse_kind(raw: &str, tol: f64) -> Result<ControllabilityKind, CliError> {
    match raw.to_ascii_lowercase().as_str() {
        "structural" => Ok(ControllabilityKind::Structural),
        "state" => {
            if !(tol > 0.0) {
                return Err(CliError::usage(format!(
                    "rank tolerance must be positive, got {tol}"
                )));
            }
            Ok(ControllabilityKind::State { rank_tol: tol })
        }
        other => Err(CliError::usage(format!(
            "unknown kind `{other}` (expected structural|state)"
        ))),
    }
}

pub(crate) fn parse_topology_list(raw: &str) -> Result<Vec<Topology>, CliError> {
    raw.split(',')
        .map(|part| parse_topology(part.trim()))
        .collect()
}

pub(crate) fn parse_degree_list(raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|e| CliError::usage(format!("bad degree `{part}`: {e}")))
        })
        .collect()
}
