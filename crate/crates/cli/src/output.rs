use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use tempfile::NamedTempFile;

/// Writes `contents` to `path` through a sibling temporary file, so the
/// destination either holds the complete output or is left untouched.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).with_context(|| format!("cannot create a file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|()| tmp.as_file().sync_all())
        .with_context(|| format!("cannot write {}", path.display()))?;
    tmp.persist(path)
        .with_context(|| format!("cannot move output into {}", path.display()))?;
    Ok(())
}

/// Emits to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Pretty JSON with struct field order preserved and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Two-column `field,value` table.
#[derive(Debug, Default)]
pub struct FieldTable {
    body: String,
}

impl FieldTable {
    pub fn new() -> Self {
        Self {
            body: String::from("field,value\n"),
        }
    }

    pub fn row(&mut self, field: &str, value: impl AsRef<str>) -> &mut Self {
        self.body.push_str(field);
        self.body.push(',');
        self.body.push_str(value.as_ref());
        self.body.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.body
    }
}
