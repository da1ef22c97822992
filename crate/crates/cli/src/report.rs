//! Machine-readable run reports emitted under `--json`.

use std::collections::BTreeMap;

use achr_core::search::PruneRule;
use achr_core::{ColorMatrix, SearchOutcome};
use serde::Serialize;
use serde_json::Value;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub p: usize,
    pub q: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub wall_time_secs: f64,
    pub prunes: BTreeMap<String, u64>,
}

impl Stats {
    pub fn of(outcome: &SearchOutcome) -> Self {
        Self::total([outcome])
    }

    /// Sums several search runs.
    pub fn total<'a>(outcomes: impl IntoIterator<Item = &'a SearchOutcome>) -> Self {
        let mut stats = Stats {
            nodes: 0,
            wall_time_secs: 0.0,
            prunes: PruneRule::ALL.iter().map(|r| (r.to_string(), 0)).collect(),
        };
        for o in outcomes {
            stats.nodes += o.nodes_expanded;
            stats.wall_time_secs += o.wall_time.as_secs_f64();
            for r in PruneRule::ALL {
                *stats.prunes.entry(r.to_string()).or_default() += o.prunes.get(r);
            }
        }
        stats
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    pub status: String,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<Vec<u16>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
    pub result: Value,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64, status: impl Into<String>) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            instance: None,
            status: status.into(),
            exit_code: 0,
            witness_path: None,
            witness: None,
            stats: None,
            result: Value::Null,
        }
    }

    pub fn with_witness(mut self, m: Option<&ColorMatrix>) -> Self {
        self.witness = m.map(|m| (0..m.rows()).map(|i| m.row(i).to_vec()).collect());
        self
    }
}
