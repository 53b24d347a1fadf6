//! Problem files: JSON with a top-level `"kind"` of `"dag"` or `"quadratic"`.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::Instance;
use crate::error::Result;

pub fn to_json(instance: &Instance) -> Result<String> {
    let mut s = serde_json::to_string_pretty(instance)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Instance> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    from_json(&fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    write_atomic(path, to_json(instance)?.as_bytes())
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{file_name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}
