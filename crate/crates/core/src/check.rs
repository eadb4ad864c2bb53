//! Outcome type for exact identity checks.

use serde::Serialize;

/// Number of checked instances and a description of each violated one.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ExactCheck {
    pub instances: usize,
    pub failures: Vec<String>,
}

impl ExactCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failures.push(describe());
        }
    }

    pub fn merge(&mut self, other: ExactCheck) {
        self.instances += other.instances;
        self.failures.extend(other.failures);
    }
}
