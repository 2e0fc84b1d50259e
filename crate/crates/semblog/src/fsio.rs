//! Crash-safe filesystem primitives shared by the store and the registry.
//!
//! Writers follow the write-to-temp-then-rename contract: a reader never
//! observes a partially written document, and a rename that completed before
//! a crash survives it.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Suffix marker for in-flight temp files, cleaned up on startup.
const TMP_MARKER: &str = ".tmp-";

/// Atomically replaces `path` with `bytes`: write to a sibling temp file,
/// fsync it, rename over the target, then fsync the directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let parent = path.parent().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "path has no parent directory")
    })?;
    let file_name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = parent.join(format!(
        ".{file_name}{TMP_MARKER}{}.{}",
        std::process::id(),
        TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let mut file = File::create(&tmp)?;
    file.write_all(bytes)?;
    file.sync_all()?;
    drop(file);
    if let Err(e) = fs::rename(&tmp, path) {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    sync_dir(parent)
}

/// Appends one line to a log file and syncs it before returning.
pub fn append_line_durable(path: &Path, line: &str) -> io::Result<()> {
    debug_assert!(!line.contains('\n'));
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(line.as_bytes())?;
    file.write_all(b"\n")?;
    file.sync_all()?;
    Ok(())
}

/// Flushes directory metadata so a completed rename survives a crash.
pub fn sync_dir(dir: &Path) -> io::Result<()> {
    File::open(dir)?.sync_all()
}

/// Removes temp files left behind by a crashed writer.
pub fn clean_temp_files(dir: &Path) -> io::Result<()> {
    if !dir.is_dir() {
        return Ok(());
    }
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if let Some(name) = entry.file_name().to_str() {
            if name.contains(TMP_MARKER) {
                let _ = fs::remove_file(entry.path());
            }
        }
    }
    Ok(())
}
