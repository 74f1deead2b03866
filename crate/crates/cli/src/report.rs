use sha2::{Digest, Sha256};
use std::fmt::Display;
use std::path::Path;
use std::time::Instant;
use svt_core::{Error, Result};

/// Line-oriented `key=value` report. Keys keep insertion order, so identical
/// runs print identical bytes; wall time is only added on request.
pub struct Report {
    lines: Vec<String>,
    digest: Sha256,
    inputs: usize,
    started: Instant,
    timing: bool,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, timing: bool) -> Self {
        let mut r = Self {
            lines: Vec::new(),
            digest: Sha256::new(),
            inputs: 0,
            started: Instant::now(),
            timing,
            warnings: Vec::new(),
        };
        r.put("command", command);
        r
    }

    pub fn put(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}={value}"));
    }

    /// Result line printed ahead of the key=value block, e.g. `re im`.
    pub fn headline(&mut self, line: impl Into<String>) {
        self.lines.insert(0, line.into());
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        log::warn!("{msg}");
        self.warnings.push(msg);
    }

    /// Reads an input file and folds its bytes into the inputs digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        self.digest.update((text.len() as u64).to_le_bytes());
        self.digest.update(text.as_bytes());
        self.inputs += 1;
        Ok(text)
    }

    pub fn render(mut self) -> String {
        if self.inputs > 0 {
            let hex: String = self.digest.finalize().iter().map(|b| format!("{b:02x}")).collect();
            self.lines.push(format!("inputs_sha256={hex}"));
        }
        for (k, w) in self.warnings.iter().enumerate() {
            self.lines.push(format!("warning.{}={w}", k + 1));
        }
        self.lines.push(format!("warnings={}", self.warnings.len()));
        if self.timing {
            self.lines.push(format!("wall_time_ms={:.3}", self.started.elapsed().as_secs_f64() * 1e3));
        }
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}
