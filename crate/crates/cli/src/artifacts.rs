//! Atomic artifact writing with a config echo beside every output.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Writes an artifact plus `<path>.config.json` echoing the resolved
/// configuration that produced it.
pub fn write_with_config<C: Serialize>(path: &Path, contents: &str, config: &C) -> Result<()> {
    write_atomic(path, contents)?;
    let mut echo = path.as_os_str().to_owned();
    echo.push(".config.json");
    let text = serde_json::to_string_pretty(config)?;
    write_atomic(Path::new(&echo), &text)
}
