//! Machine-readable reports. Every subcommand prints exactly one JSON
//! document on stdout; `schemas/report.schema.json` describes the shape.
//! Serialization uses ordered maps throughout, so identical inputs produce
//! byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;

use coweak_core::bisim::Witness;
use coweak_core::fixpoint::{BehaviorTable, SolveMeta};
use coweak_core::pattern::PatternAutomaton;
use coweak_core::system::Partition;

/// Exit status convention shared by all subcommands.
pub mod exit_code {
    /// Property holds / result computed.
    pub const OK: i32 = 0;
    /// Property fails; the report carries a witness.
    pub const FAILS: i32 = 1;
    /// Input or validation error.
    pub const INPUT: i32 = 2;
    /// Approximate or partial result refused.
    pub const INEXACT: i32 = 3;
}

#[derive(Serialize)]
pub struct MetaDoc {
    pub strategy: String,
    pub iterations: usize,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub convergence_bound: Option<f64>,
}

impl From<&SolveMeta> for MetaDoc {
    fn from(meta: &SolveMeta) -> Self {
        MetaDoc {
            strategy: meta.strategy_used.clone(),
            iterations: meta.iterations,
            exact: meta.exact,
            fallback: meta.fallback.clone(),
            convergence_bound: meta.convergence_bound,
        }
    }
}

#[derive(Serialize)]
pub struct WitnessDoc {
    pub left: String,
    pub right: String,
    pub pattern: String,
    pub key: String,
    pub left_value: String,
    pub right_value: String,
}

impl WitnessDoc {
    pub fn new(
        witness: &Witness,
        states: &[String],
        pattern: &PatternAutomaton,
        key_names: &[String],
    ) -> Self {
        WitnessDoc {
            left: states[witness.left_state].clone(),
            right: states[witness.right_state].clone(),
            pattern: pattern.state_name(witness.pattern_state).to_string(),
            key: key_names[witness.key].clone(),
            left_value: witness.left_value.render(),
            right_value: witness.right_value.render(),
        }
    }
}

#[derive(Serialize)]
pub struct EntryDoc {
    pub state: String,
    pub pattern: String,
    pub value: BTreeMap<String, String>,
}

/// Renders a behaviour table as entry docs; empty rows are kept so the
/// table shape is explicit.
pub fn table_entries(
    table: &BehaviorTable,
    states: &[String],
    pattern: &PatternAutomaton,
    key_names: &[String],
) -> Vec<EntryDoc> {
    let mut out = Vec::new();
    for x in 0..table.n_states() {
        for b in pattern.reachable_from_observables() {
            let row = table.row(x, b);
            let mut value = BTreeMap::new();
            for (key, v) in row.iter() {
                value.insert(key_names[*key].clone(), v.render());
            }
            out.push(EntryDoc {
                state: states[x].clone(),
                pattern: pattern.state_name(b).to_string(),
                value,
            });
        }
    }
    out
}

/// Key names for a quotient target: `B0`, `B1`, ... in canonical block
/// order.
pub fn class_names(partition: &Partition) -> Vec<String> {
    (0..partition.block_count())
        .map(|i| format!("B{i}"))
        .collect()
}

#[derive(Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Report {
    Check {
        system: String,
        pattern: String,
        oplus: String,
        holds: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<WitnessDoc>,
        meta: MetaDoc,
    },
    Largest {
        system: String,
        pattern: String,
        oplus: String,
        blocks: Vec<Vec<String>>,
    },
    Saturate {
        system: String,
        pattern: String,
        oplus: String,
        strategy: String,
        entries: Vec<EntryDoc>,
        meta: MetaDoc,
    },
    Oracle {
        system: String,
        pattern: String,
        depth: usize,
        entries: Vec<EntryDoc>,
    },
    Compare {
        system: String,
        pattern: String,
        mode: String,
        oplus: String,
        bisim_holds: bool,
        kernel_holds: bool,
        agree: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        largest_agrees: Option<bool>,
    },
    Segala {
        system: String,
        mode: String,
        verdict: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<SegalaWitnessDoc>,
        iterations: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        pattern_verdict: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        agree: Option<bool>,
    },
    Error {
        message: String,
    },
}

#[derive(Serialize)]
pub struct SegalaWitnessDoc {
    pub left: String,
    pub right: String,
    pub label: String,
}

impl Report {
    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("reports serialize")
        } else {
            serde_json::to_string(self).expect("reports serialize")
        }
    }
}
