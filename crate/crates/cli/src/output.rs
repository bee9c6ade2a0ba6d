use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::args::{Format, OutputArgs};

/// Opens `--out`, or stdout.
pub fn sink(args: &OutputArgs) -> Result<Box<dyn Write>> {
    Ok(match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(args: &OutputArgs, report: &T) -> Result<()> {
    let mut w = sink(args)?;
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a header and rows as CSV.
pub fn write_csv(args: &OutputArgs, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(args)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<T: Serialize>(args: &OutputArgs, report: &T, header: &[&str], rows: impl FnOnce() -> Vec<Vec<String>>) -> Result<()> {
    match args.format {
        Format::Json => write_json(args, report),
        Format::Csv => write_csv(args, header, &rows()),
    }
}

/// Reads a file, or stdin for `-`.
pub fn read_input(path: &std::path::Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::Read::read_to_string(&mut io::stdin(), &mut s).context("cannot read stdin")?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
    }
}
