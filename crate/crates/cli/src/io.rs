//! Dataset parsing and output documents.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use isus_core::stats::Ecdf;
use isus_core::Dataset;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const FORMAT_VERSION: u32 = 1;

/// Parse one numeric column. Blank lines and `#` comments are skipped; a
/// single non-numeric first line is taken as the header and names the
/// variable.
pub fn parse_column(text: &str, fallback_name: &str) -> anyhow::Result<Dataset> {
    let mut name = fallback_name.to_string();
    let mut values = Vec::new();
    let mut header_taken = false;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split([',', ';', '\t', ' ']).filter(|f| !f.is_empty()).collect();
        if fields.len() != 1 {
            bail!("line {}: expected one column, found {}", line_no + 1, fields.len());
        }
        match fields[0].parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => bail!("line {}: non-finite value {v}", line_no + 1),
            Err(_) if values.is_empty() && !header_taken => {
                name = fields[0].trim_matches('"').to_string();
                header_taken = true;
            }
            Err(_) => bail!("line {}: '{}' is not a number", line_no + 1, fields[0]),
        }
    }
    Ok(Dataset::new(name, values)?)
}

pub fn read_dataset(path: &Path) -> anyhow::Result<Dataset> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("x");
    parse_column(&text, stem).with_context(|| format!("parsing {}", path.display()))
}

/// One numeric column with a `#` provenance line and a header.
pub fn dataset_text(data: &Dataset, seed: u64) -> String {
    let mut out = format!("# synthetic dataset, seed {seed}\n{}\n", data.name);
    for v in &data.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

/// Every JSON document written by the tool.
#[derive(Debug, Serialize, Deserialize)]
pub struct Document<T> {
    pub format_version: u32,
    pub kind: String,
    pub config: RunConfig,
    pub body: T,
}

pub fn write_document<T: Serialize>(path: &Path, kind: &str, config: &RunConfig, body: &T) -> anyhow::Result<()> {
    let doc = Document {
        format_version: FORMAT_VERSION,
        kind: kind.to_string(),
        config: config.clone(),
        body,
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Document<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: Document<T> = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if doc.format_version != FORMAT_VERSION {
        bail!("{}: unsupported format version {}", path.display(), doc.format_version);
    }
    Ok(doc)
}

/// Read only the `kind` tag of a document.
pub fn document_kind(path: &Path) -> anyhow::Result<String> {
    #[derive(Deserialize)]
    struct Head {
        kind: String,
    }
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let head: Head = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(head.kind)
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// ECDF step table `pf,ecdf` with `#` comments.
pub fn ecdf_table(label: &str, ecdf: &Ecdf, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let _ = writeln!(out, "# {label}: {} values", ecdf.len());
    out.push_str("pf,ecdf\n");
    for (x, f) in ecdf.steps() {
        let _ = writeln!(out, "{x:e},{f}");
    }
    out
}

pub fn output_path(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}
