//! Path CSV (`t,x`) and JSON artifacts.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use fsdiff_core::diffusion::{Origin, SamplePath};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct PathRow {
    t: f64,
    x: f64,
}

/// Full double precision: 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |source| CliError::Csv { path: path.display().to_string(), source }
}

pub fn read_path_csv(path: &Path) -> CliResult<SamplePath> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<PathRow>() {
        let row = row.map_err(csv_err(path))?;
        times.push(row.t);
        values.push(row.x);
    }
    let origin = Origin::Ingested { file: path.display().to_string() };
    Ok(SamplePath::new(times, values, origin)?)
}

pub fn write_path_csv<W: Write>(out: W, path: &SamplePath) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "t,x")?;
    for (t, x) in path.times.iter().zip(&path.values) {
        writeln!(w, "{},{}", fmt_f64(*t), fmt_f64(*x))?;
    }
    w.flush()
}

/// Table with a header row; `int_cols` leading columns are written as integers.
pub fn write_table<W: Write>(out: W, header: &[String], rows: &[Vec<f64>], int_cols: usize) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, v)| if i < int_cols { format!("{}", *v as i64) } else { fmt_f64(*v) })
            .collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

pub fn write_json<W: Write, T: Serialize>(out: W, value: &T) -> CliResult<()> {
    let mut w = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|source| CliError::Io { path: "<output>".into(), source })
}

/// Opens `path` for writing, or standard output when absent.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        Some(p) => Ok(Box::new(File::create(p).map_err(io_err(p))?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn wrap_io(path: Option<&Path>) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.map(|p| p.display().to_string()).unwrap_or_else(|| "<stdout>".into()),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0e-300, 123456.789, f64::MAX] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }
}
