//! Line-oriented run reports: `key: value` pairs in insertion order, with
//! exact decimal count rendering. Byte-stable for fixed inputs except the
//! wall-clock field.

use num_bigint::BigUint;
use sha2::{Digest, Sha256};

pub const WALL_CLOCK_KEY: &str = "wall-seconds";

#[derive(Debug, Clone, Default)]
pub struct RunReport {
    fields: Vec<(String, String)>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        let mut r = RunReport::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn push_count(&mut self, key: &str, count: &BigUint) {
        // decimal, never scientific notation
        self.fields.push((key.to_string(), count.to_str_radix(10)));
    }

    pub fn push_digest(&mut self, key: &str, data: &[u8]) {
        let mut hasher = Sha256::new();
        hasher.update(data);
        let hex: String = hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.fields.push((key.to_string(), format!("sha256:{hex}")));
    }

    pub fn push_wall_clock(&mut self, seconds: f64) {
        self.fields
            .push((WALL_CLOCK_KEY.to_string(), format!("{seconds:.6}")));
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}
