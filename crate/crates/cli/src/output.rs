use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use mlab_core::ScalarField;
use serde::Serialize;
use serde_json::Value;

use crate::CliResult;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: &'static str,
    pub params: BTreeMap<String, Value>,
    pub inputs: Vec<String>,
    pub files: Vec<String>,
    pub wall_time_s: f64,
    pub result: Value,
}

/// Collects output files for one run. Without an output directory nothing is
/// written and the manifest carries the result only.
pub struct Run {
    subcommand: String,
    dir: Option<PathBuf>,
    params: BTreeMap<String, Value>,
    inputs: Vec<String>,
    files: Vec<String>,
    started: Instant,
}

impl Run {
    pub fn new(subcommand: &str, dir: Option<&Path>) -> CliResult<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self {
            subcommand: subcommand.into(),
            dir: dir.map(Path::to_path_buf),
            params: BTreeMap::new(),
            inputs: Vec::new(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) -> &mut Self {
        self.params
            .insert(key.into(), serde_json::to_value(v).unwrap_or(Value::Null));
        self
    }

    pub fn input(&mut self, path: &Path) {
        self.inputs.push(path.display().to_string());
    }

    /// Opens `name` in the output directory, or returns `None` without one.
    fn create(&mut self, name: &str) -> CliResult<Option<BufWriter<File>>> {
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        let path = dir.join(name);
        let f = File::create(&path)?;
        self.files.push(path.display().to_string());
        Ok(Some(BufWriter::new(f)))
    }

    pub fn field(&mut self, name: &str, f: &ScalarField) -> CliResult<()> {
        if let Some(w) = self.create(name)? {
            f.write_csv(w)?;
        }
        Ok(())
    }

    pub fn json(&mut self, name: &str, v: &impl Serialize) -> CliResult<()> {
        if let Some(mut w) = self.create(name)? {
            serde_json::to_writer_pretty(&mut w, v)?;
            writeln!(w)?;
            w.flush()?;
        }
        Ok(())
    }

    /// Column CSV; `None` entries are written as `nan`.
    pub fn columns(&mut self, name: &str, header: &[&str], cols: &[Vec<Option<f64>>]) -> CliResult<()> {
        let Some(w) = self.create(name)? else {
            return Ok(());
        };
        write_columns(w, header, cols)
    }

    pub fn with_writer(&mut self, name: &str, f: impl FnOnce(BufWriter<File>) -> CliResult<()>) -> CliResult<()> {
        match self.create(name)? {
            Some(w) => f(w),
            None => Ok(()),
        }
    }

    /// Prints the manifest and stores a copy next to the outputs.
    pub fn finish(self, result: impl Serialize) -> CliResult<()> {
        let manifest = RunManifest {
            subcommand: self.subcommand,
            version: env!("CARGO_PKG_VERSION"),
            params: self.params,
            inputs: self.inputs,
            files: self.files,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            result: serde_json::to_value(result)?,
        };
        let text = serde_json::to_string_pretty(&manifest)?;
        if let Some(dir) = &self.dir {
            fs::write(dir.join("manifest.json"), format!("{text}\n"))?;
        }
        println!("{text}");
        Ok(())
    }
}

pub fn write_columns<W: Write>(w: W, header: &[&str], cols: &[Vec<Option<f64>>]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    let rows = cols.iter().map(Vec::len).min().unwrap_or(0);
    for r in 0..rows {
        out.write_record(cols.iter().map(|c| match c[r] {
            Some(v) => format!("{v:.17e}"),
            None => "nan".to_string(),
        }))?;
    }
    out.flush()?;
    Ok(())
}

pub fn some(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|&x| x.is_finite().then_some(x)).collect()
}

/// Reads named numeric columns from a headed CSV file.
pub fn read_columns(path: &Path, names: &[&str]) -> CliResult<Vec<Vec<f64>>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let idx: Vec<usize> = names
        .iter()
        .map(|n| {
            header.iter().position(|h| h.trim() == *n).ok_or_else(|| {
                crate::CliError::Usage(format!("{} has no column '{n}'", path.display()))
            })
        })
        .collect::<CliResult<_>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        for (c, &i) in idx.iter().enumerate() {
            let raw = rec.get(i).unwrap_or("");
            let v: f64 = raw.trim().parse().map_err(|_| {
                crate::CliError::Core(mlab_core::Error::Parse(format!(
                    "{}: row {} column '{}': '{raw}' is not a number",
                    path.display(),
                    line + 2,
                    names[c]
                )))
            })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}
