//! Deterministic emission: fixed 12-decimal formatting, plain CSV with a
//! mandatory header row, and JSON with values rounded to the same digits.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Fixed-point formatting with 12 decimal places, negative zero folded
/// into zero so reruns are byte-identical.
pub fn fmt12(value: f64) -> String {
    let s = format!("{value:.12}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Rounds to 12 decimal places for JSON output, mirroring the CSV digits.
pub fn round12(value: f64) -> f64 {
    (value * 1e12).round() / 1e12 + 0.0
}

pub enum Sink {
    Stdout(std::io::Stdout),
    File(File),
}

impl Sink {
    pub fn create(out: Option<&Path>) -> Result<Self, CliError> {
        match out {
            None => Ok(Sink::Stdout(std::io::stdout())),
            Some(path) => File::create(path)
                .map(Sink::File)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        }
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.flush_all()
    }

    fn flush_all(&mut self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f) => f.flush(),
        }
        .map_err(|e| CliError::Io(format!("write failed: {e}")))
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match self {
            Sink::Stdout(s) => s.write(buf),
            Sink::File(f) => f.write(buf),
        }
    }

    fn flush(&mut self) -> std::io::Result<()> {
        match self {
            Sink::Stdout(s) => s.flush(),
            Sink::File(f) => f.flush(),
        }
    }
}

/// Writes one CSV line; fields are plain numerics or simple labels, so no
/// RFC-4180 quoting is ever required.
pub fn csv_line(sink: &mut Sink, fields: &[&str]) -> Result<(), CliError> {
    debug_assert!(fields.iter().all(|f| !f.contains([',', '"', '\n', '\r'])));
    writeln!(sink, "{}", fields.join(",")).map_err(|e| CliError::Io(format!("write failed: {e}")))
}

pub fn write_json(sink: &mut Sink, value: &serde_json::Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *sink, value)
        .map_err(|e| CliError::Io(format!("write failed: {e}")))?;
    writeln!(sink).map_err(|e| CliError::Io(format!("write failed: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_to_twelve_decimals() {
        assert_eq!(fmt12(2.0 * std::f64::consts::SQRT_2), "2.828427124746");
        assert_eq!(fmt12(std::f64::consts::SQRT_2), "1.414213562373");
        assert_eq!(fmt12(1.0), "1.000000000000");
        assert_eq!(fmt12(0.5), "0.500000000000");
    }

    #[test]
    fn negative_zero_is_normalized() {
        assert_eq!(fmt12(-1e-15), "0.000000000000");
        assert_eq!(fmt12(-0.0), "0.000000000000");
        assert_eq!(fmt12(-1e-9), "-0.000000001000");
        assert_eq!(round12(-1e-15), 0.0);
        assert!(round12(-1e-15).is_sign_positive());
    }
}
