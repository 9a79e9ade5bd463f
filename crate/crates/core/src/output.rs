//! Output files: run manifest, CSV tables and JSON results.
//!
//! Every table starts with a comment line `# manifest=manifest.json` naming
//! the manifest of the run that wrote it. All writers are deterministic;
//! only the manifest's `wall_time_s` varies between identical runs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{BoxRecord, DiameterRecord, ExponentResult, ObservableRow, SampleOutput};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_HEADER: &str = "# manifest=manifest.json";

pub fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Domain(format!("i/o: {e}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(command: &str, config: &impl Serialize, seed: Option<u64>) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config).map_err(io_err)?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
            wall_time_s: 0.0,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }
}

/// Collects written files relative to an output directory.
pub struct OutDir {
    pub root: PathBuf,
    pub written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(io_err)?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    /// Absolute path of `rel`, recorded as an output.
    pub fn file(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.root.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).map_err(io_err)?;
        }
        self.written.push(rel.to_string());
        Ok(p)
    }
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io_err)?;
    text.push('\n');
    fs::write(path, text).map_err(io_err)
}

/// CSV writer positioned after the manifest comment line.
pub fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let mut f = fs::File::create(path).map_err(io_err)?;
    writeln!(f, "{MANIFEST_HEADER}").map_err(io_err)?;
    Ok(csv::Writer::from_writer(f))
}

fn write_rows<R, I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub const OBSERVABLE_COLUMNS: [&str; 8] = ["seed", "trial", "n", "variant", "k", "loop_size", "cross_n", "n_loops"];

pub fn write_observables<'a>(path: &Path, rows: impl IntoIterator<Item = &'a ObservableRow>) -> Result<()> {
    write_rows(
        path,
        &OBSERVABLE_COLUMNS,
        rows.into_iter().map(|r| {
            [
                r.seed.to_string(),
                r.trial.to_string(),
                r.n.to_string(),
                r.variant.clone(),
                r.k.to_string(),
                r.loop_size.to_string(),
                r.cross_n.to_string(),
                r.n_loops.to_string(),
            ]
        }),
    )
}

pub const GAMMA_COLUMNS: [&str; 6] = ["trial", "length", "terminal", "closed", "negative_hits", "positive_hits"];

/// One row per pointed window: the path from 0.
pub fn write_gamma(path: &Path, outputs: &[SampleOutput]) -> Result<()> {
    write_rows(
        path,
        &GAMMA_COLUMNS,
        outputs.iter().enumerate().filter_map(|(t, o)| {
            o.gamma.as_ref().map(|g| {
                [
                    t.to_string(),
                    g.vertices.len().to_string(),
                    serde_json::to_value(g.terminal.kind).unwrap().as_str().unwrap().to_string(),
                    g.closed.to_string(),
                    g.negative_hits.to_string(),
                    g.positive_hits.to_string(),
                ]
            })
        }),
    )
}

pub const DIAMETER_COLUMNS: [&str; 8] =
    ["seed", "trial", "n", "diameter_lb", "method", "loop_rank", "loop_diameter_lb", "map_kind"];

pub fn write_diameters(path: &Path, recs: &[DiameterRecord]) -> Result<()> {
    write_rows(
        path,
        &DIAMETER_COLUMNS,
        recs.iter().map(|r| {
            [
                r.seed.to_string(),
                r.trial.to_string(),
                r.n.to_string(),
                r.diameter_lb.to_string(),
                r.method.as_str().to_string(),
                opt(r.loop_rank),
                opt(r.loop_diameter_lb),
                r.map_kind.as_str().to_string(),
            ]
        }),
    )
}

pub const BOX_COLUMNS: [&str; 4] = ["root", "size", "outcome", "decidable"];

pub fn write_boxes(path: &Path, recs: &[BoxRecord]) -> Result<()> {
    write_rows(
        path,
        &BOX_COLUMNS,
        recs.iter().map(|r| {
            let outcome = r.outcome.map(|o| serde_json::to_value(o).unwrap().as_str().unwrap().to_string());
            [r.root.to_string(), r.size.to_string(), opt(outcome), r.decidable.to_string()]
        }),
    )
}

/// `result.json`, `medians.csv` (n, x = 2n, median) and `values.csv` (n,
/// trial, value); diameter runs add `diameters.csv`.
pub fn write_exponent(out: &mut OutDir, r: &ExponentResult) -> Result<()> {
    write_json(&out.file("result.json")?, r)?;
    write_rows(
        &out.file("medians.csv")?,
        &["n", "x", "median"],
        r.sizes.iter().zip(&r.medians).map(|(&n, m)| [n.to_string(), (2 * n).to_string(), m.to_string()]),
    )?;
    write_rows(
        &out.file("values.csv")?,
        &["n", "trial", "value"],
        r.sizes
            .iter()
            .zip(&r.values)
            .flat_map(|(&n, vs)| vs.iter().enumerate().map(move |(t, v)| [n.to_string(), t.to_string(), v.to_string()])),
    )?;
    if !r.diameters.is_empty() {
        write_diameters(&out.file("diameters.csv")?, &r.diameters)?;
    }
    Ok(())
}
