//! Tab-separated output files and the per-run manifest.
//!
//! Every experiment writes into `<out>/<arithmetic short name>/<suite>/`,
//! where `<out>` defaults to `Output` and can be overridden by the
//! `PRECISION_OUT_DIR` environment variable. Numbers serialize with 17
//! significant digits so identical runs produce identical bytes.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

pub const OUT_DIR_ENV: &str = "PRECISION_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Root output directory: explicit override, else the environment
/// variable, else `Output` in the working directory.
pub fn output_root(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir),
        None => PathBuf::from("Output"),
    }
}

/// Directory `<root>/<short name>/<suite>`, created on demand.
pub fn suite_dir(root: &Path, short_name: &str, suite: &str) -> Result<PathBuf, ReportError> {
    let dir = root.join(short_name).join(suite);
    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    Ok(dir)
}

/// Serializes a float with full round-trip precision.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.17e}")
}

/// Writes one TSV file with a header row.
pub fn write_tsv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), ReportError> {
    let mut text = String::new();
    text.push_str(&header.join("\t"));
    text.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        text.push_str(&row.join("\t"));
        text.push('\n');
    }
    fs::write(path, text).map_err(io_err(path))
}

/// Writes the run manifest: sorted `key: value` lines recording every
/// parameter needed to regenerate the run.
pub fn write_manifest(dir: &Path, entries: &[(String, String)]) -> Result<PathBuf, ReportError> {
    let mut sorted: Vec<&(String, String)> = entries.iter().collect();
    sorted.sort();
    let mut text = String::new();
    for (k, v) in sorted {
        text.push_str(k);
        text.push_str(": ");
        text.push_str(v);
        text.push('\n');
    }
    let path = dir.join("run_manifest.txt");
    let mut file = fs::File::create(&path).map_err(io_err(&path))?;
    file.write_all(text.as_bytes()).map_err(io_err(&path))?;
    Ok(path)
}

/// Standard manifest entries shared by all suites.
pub fn base_manifest(short_name: &str, suite: &str, seed: u64) -> Vec<(String, String)> {
    vec![
        ("arithmetic".into(), short_name.to_string()),
        ("suite".into(), suite.to_string()),
        ("seed".into(), seed.to_string()),
        ("version".into(), env!("CARGO_PKG_VERSION").to_string()),
    ]
}
