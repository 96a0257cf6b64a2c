//! Small filesystem helpers shared by the commands.

use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

/// Writes a file atomically: the bytes go to a temporary file in the target
/// directory which is then renamed over the destination, so an interrupted
/// run never leaves a partial artifact at the target path.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Round-trippable float formatting for CSV cells (`{:?}` on floats prints
/// the shortest decimal that parses back to the same bits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Provenance comment placed at the top of every output CSV.
pub fn provenance(command: &str, seed: Option<u64>) -> String {
    match seed {
        Some(s) => format!("# mvgb {} {command} seed={s}", crate::VERSION),
        None => format!("# mvgb {} {command}", crate::VERSION),
    }
}
