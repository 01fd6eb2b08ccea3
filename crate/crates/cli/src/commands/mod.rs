pub mod check;
pub mod demo;
pub mod riemann;
pub mod simulate;
pub mod transform;

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    /// False when an enabled check failed its tolerance.
    pub pass: bool,
    pub warnings: Vec<String>,
    /// Human-readable summary, one line each.
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn passed(lines: Vec<String>, warnings: Vec<String>) -> Self {
        Self { pass: true, warnings, lines }
    }

    /// Exit status: 0 on success, 1 when a check failed (or, with `strict`, warned).
    pub fn exit_code(&self, strict: bool) -> i32 {
        if !self.pass || (strict && !self.warnings.is_empty()) {
            1
        } else {
            0
        }
    }
}
