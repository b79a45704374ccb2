//! Output files. JSON reports carry a `provenance` object inline; JSONL
//! outputs get a `<file>.provenance.json` sidecar so every line stays a
//! plain record.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
}

impl<'a> Provenance<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig) -> Self {
        Self {
            tool: "chapterkit",
            version: VERSION,
            command,
            config,
        }
    }
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    provenance: &'a Provenance<'a>,
    #[serde(flatten)]
    body: &'a T,
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Pretty JSON with a trailing newline; `body` fields sit next to
/// `provenance` at the top level.
pub fn write_report<T: Serialize>(
    path: &Path,
    provenance: &Provenance<'_>,
    body: &T,
) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Wrapped { provenance, body })?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance.json");
    path.with_file_name(name)
}

/// One JSON value per line plus the provenance sidecar.
pub fn write_jsonl<T: Serialize>(
    path: &Path,
    provenance: &Provenance<'_>,
    rows: &[T],
) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    write_sidecar(path, provenance)
}

pub fn write_sidecar(path: &Path, provenance: &Provenance<'_>) -> Result<()> {
    let side = sidecar_path(path);
    let mut text = serde_json::to_string_pretty(provenance)?;
    text.push('\n');
    fs::write(&side, text).with_context(|| format!("writing {}", side.display()))
}

/// Plain-text log whose first two lines are `#` comments naming the tool
/// version and the resolved config.
pub fn write_log(path: &Path, provenance: &Provenance<'_>, lines: &[String]) -> Result<()> {
    let mut text = format!(
        "# {} {} {}\n# config {}\n",
        provenance.tool,
        provenance.version,
        provenance.command,
        serde_json::to_string(provenance.config)?
    );
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
