//! CSV and JSON emission with run metadata.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use nilcorr::correlator::CorrelationSeries;
use nilcorr::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Sink {
    pub format: Format,
    pub reproducible: bool,
    pub seed: u64,
    pub threads: Option<usize>,
    out: Box<dyn Write>,
}

impl Sink {
    pub fn new(format: Format, output: Option<&Path>, reproducible: bool, seed: u64, threads: Option<usize>) -> Result<Sink> {
        let out: Box<dyn Write> = match output {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::BufWriter::new(io::stdout())),
        };
        Ok(Sink {
            format,
            reproducible,
            seed,
            threads,
            out,
        })
    }

    fn metadata(&self, command: &str, params: Value) -> Value {
        let mut meta = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "git_describe": env!("NILCORR_GIT_DESCRIBE"),
            "seed": self.seed,
            "threads": self.threads,
            "parameters": params,
        });
        if !self.reproducible {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            meta["timestamp_unix"] = json!(secs);
        }
        meta
    }

    pub fn json<T: Serialize>(&mut self, command: &str, params: Value, result: &T) -> Result<()> {
        let doc = json!({
            "metadata": self.metadata(command, params),
            "result": serde_json::to_value(result).map_err(|e| Error::Format(e.to_string()))?,
        });
        serde_json::to_writer_pretty(&mut self.out, &doc).map_err(|e| Error::Format(e.to_string()))?;
        writeln!(self.out)?;
        self.out.flush()?;
        Ok(())
    }

    /// Rows of string cells, comma separated, LF terminated.
    pub fn csv(&mut self, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .flexible(true)
            .from_writer(&mut self.out);
        let csv_err = |e: csv::Error| Error::Format(e.to_string());
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        drop(w);
        self.out.flush()?;
        Ok(())
    }

    pub fn emit<T: Serialize>(
        &mut self,
        command: &str,
        params: Value,
        result: &T,
        header: &[&str],
        rows: &[Vec<String>],
    ) -> Result<()> {
        match self.format {
            Format::Json => self.json(command, params, result),
            Format::Csv => self.csv(header, rows),
        }
    }

    pub fn text(&mut self, line: &str) -> Result<()> {
        writeln!(self.out, "{line}")?;
        self.out.flush()?;
        Ok(())
    }
}

/// Shortest text that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub const SERIES_HEADER: [&str; 5] = ["N", "re", "im", "abs", "fitted_exponent"];

/// One row per rung and a footer `fit,,,,<exponent>`.
pub fn series_rows(s: &CorrelationSeries) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = s
        .ns
        .iter()
        .zip(&s.normalized)
        .map(|(n, z)| vec![n.to_string(), num(z.re), num(z.im), num(z.norm()), String::new()])
        .collect();
    rows.push(vec![
        "fit".into(),
        String::new(),
        String::new(),
        String::new(),
        s.fitted_exponent.map_or(String::new(), num),
    ]);
    rows
}
