use std::fs;
use std::path::{Path, PathBuf};

use fillrad_core::metric::load_csv;
use fillrad_core::{FiniteMetricSpace, SampleMeta};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::CliError;

fn io_error(path: &Path, e: impl ToString) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Writes `contents` next to `path` and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    let mut tmp_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{} is not a file path", path.display())))?
        .to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_error(path, e)
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// Writes JSON to `out`, or to stdout when no path is given.
pub fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let text = to_json(value);
    match out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::core(
            path.display().to_string(),
            fillrad_core::Error::Parse(e.to_string()),
        )
    })
}

pub fn read_space(path: &Path) -> Result<FiniteMetricSpace, CliError> {
    if !path.exists() {
        return Err(io_error(path, "no such file"));
    }
    load_csv(path).map_err(|e| CliError::core(path.display().to_string(), e))
}

pub fn read_meta(path: &Path) -> Result<SampleMeta, CliError> {
    read_json(path)
}
