//! Rule tables and per-tick evaluation.

mod command;
mod config;
mod eval;
mod lower;

pub use command::{merge, ActuationCommand, ClauseRef, Fault, SoundCue};
pub use config::{ConfigError, MonitorConfig, DEFAULT_CAP, DEFAULT_NOMINAL_SPEED};
pub use eval::evaluate;
pub use lower::{lower, EntryScope, RuleEntry, RuleTable};

use crate::sensors::SensorSnapshot;

/// A lowered rule table plus the evaluation entry point.
#[derive(Debug, Clone)]
pub struct Monitor {
    table: RuleTable,
}

impl Monitor {
    pub fn new(table: RuleTable) -> Self {
        Monitor { table }
    }

    pub fn table(&self) -> &RuleTable {
        &self.table
    }

    pub fn step(&self, snapshot: &SensorSnapshot) -> ActuationCommand {
        evaluate(&self.table, snapshot)
    }
}
