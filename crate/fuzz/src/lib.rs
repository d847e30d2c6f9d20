//! Shared scaffolding for the fuzz targets.
//!
//! Every target asserts the same contract: arbitrary input bytes may be
//! rejected with an error, but must never panic, hang, or corrupt memory.

use std::path::PathBuf;
use std::sync::OnceLock;

/// Write `data` to a reusable per-process temp file with the given
/// extension (several loaders dispatch on the extension) and return its
/// path. The file is overwritten on every call, so each fuzz iteration
/// sees exactly the current input.
pub fn temp_input(name: &str, ext: &str, data: &[u8]) -> PathBuf {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    let dir = DIR.get_or_init(|| tempfile::tempdir().expect("create fuzz temp dir"));
    let path = dir.path().join(format!("{name}.{ext}"));
    std::fs::write(&path, data).expect("write fuzz input");
    path
}

/// Split off a one-byte format selector (even first byte → CSV, odd →
/// JSON), letting one target cover both branches of an extension-sniffing
/// loader.
pub fn select_format(data: &[u8]) -> Option<(&'static str, &[u8])> {
    let (&first, rest) = data.split_first()?;
    Some(if first % 2 == 0 { ("csv", rest) } else { ("json", rest) })
}
