pub mod attention;
pub mod link;
pub mod outcomes;
pub mod simulate;
pub mod stats;
pub mod synth;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use retraction_core::ingest::{
    load_corpus, load_mentions, Format, MentionEvent, PaperRecord, SchemaViolation,
};

const MAX_VIOLATIONS_SHOWN: usize = 20;

fn report_violations(path: &Path, violations: &[SchemaViolation]) {
    for v in violations.iter().take(MAX_VIOLATIONS_SHOWN) {
        eprintln!(
            "warning: {}: row {}, field {}: {}",
            path.display(),
            v.row,
            v.field,
            v.reason
        );
    }
    if violations.len() > MAX_VIOLATIONS_SHOWN {
        eprintln!(
            "warning: {}: {} further malformed rows not shown",
            path.display(),
            violations.len() - MAX_VIOLATIONS_SHOWN
        );
    }
}

/// Load a corpus, print any per-row schema violations to stderr, and keep
/// going with the valid rows.
pub fn load_corpus_reporting(path: &Path) -> Result<Vec<PaperRecord>> {
    let load = load_corpus(path, Format::from_path(path))
        .with_context(|| format!("loading corpus {}", path.display()))?;
    report_violations(path, &load.violations);
    Ok(load.records)
}

pub fn load_mentions_reporting(path: &Path) -> Result<Vec<MentionEvent>> {
    let load = load_mentions(path, Format::from_path(path))
        .with_context(|| format!("loading mentions {}", path.display()))?;
    report_violations(path, &load.violations);
    Ok(load.events)
}

/// Write one output file through a buffered writer and return its path.
pub fn write_output<E: Into<anyhow::Error>>(
    dir: &Path,
    name: &str,
    write: impl FnOnce(&mut BufWriter<File>) -> Result<(), E>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    write(&mut out).map_err(Into::into)?;
    use std::io::Write as _;
    out.flush().with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json(dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<PathBuf> {
    write_output(dir, name, |out| -> Result<()> {
        use std::io::Write as _;
        serde_json::to_writer_pretty(&mut *out, value)?;
        out.write_all(b"\n")?;
        Ok(())
    })
}
