//! CSV and JSON emission.
//!
//! CSV starts with a `# config-sha256: ...` comment line and ends with one
//! `# ...` line per summary entry, so readers that skip `#` comments see a
//! plain table.

use std::io::Write;

use crate::sweep::SweepOutput;
use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

pub fn write_csv<W: Write>(mut out: W, result: &SweepOutput) -> Result<(), CliError> {
    writeln!(out, "# config-sha256: {}", result.config_sha256)?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for rec in &result.records {
            w.serialize(rec)?;
        }
        w.flush()?;
    }
    for line in &result.summary {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, result: &SweepOutput) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, result)?;
    writeln!(out)?;
    Ok(())
}

pub fn write<W: Write>(out: W, result: &SweepOutput, format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, result),
        Format::Json => write_json(out, result),
    }
}
