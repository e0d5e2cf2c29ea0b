use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ensreach::{InputSequence, PiecewiseConstantInput, C64};

use crate::CliError;

/// Input read from or written to a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub enum InputFile {
    /// Rows `t,re,im`.
    Discrete(Vec<C64>),
    /// `tau=<value>` line, then rows `l,re,im`.
    PiecewiseConstant { tau: f64, values: Vec<C64> },
}

impl From<&InputSequence> for InputFile {
    fn from(u: &InputSequence) -> Self {
        InputFile::Discrete(u.values().iter().map(|v| v[0]).collect())
    }
}

impl From<&PiecewiseConstantInput> for InputFile {
    fn from(u: &PiecewiseConstantInput) -> Self {
        InputFile::PiecewiseConstant { tau: u.tau(), values: u.values().to_vec() }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {e}", path.display()))
}

impl InputFile {
    pub fn write(&self, out: impl Write) -> csv::Result<()> {
        let mut out = out;
        let (index, values) = match self {
            InputFile::Discrete(values) => ("t", values),
            InputFile::PiecewiseConstant { tau, values } => {
                writeln!(out, "tau={tau}")?;
                ("l", values)
            }
        };
        let mut w = csv::Writer::from_writer(out);
        w.write_record([index, "re", "im"])?;
        for (i, u) in values.iter().enumerate() {
            w.write_record([i.to_string(), u.re.to_string(), u.im.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| io_err(path, e))?;
        self.write(file).map_err(|e| io_err(path, e))
    }

    pub fn read(input: impl Read) -> Result<Self, String> {
        let mut reader = BufReader::new(input);
        let mut first = String::new();
        reader.read_line(&mut first).map_err(|e| e.to_string())?;
        let first = first.trim_end();
        let (tau, header) = match first.strip_prefix("tau=") {
            Some(v) => {
                let tau: f64 = v.trim().parse().map_err(|_| format!("bad step length `{v}`"))?;
                let mut header = String::new();
                reader.read_line(&mut header).map_err(|e| e.to_string())?;
                (Some(tau), header.trim_end().to_string())
            }
            None => (None, first.to_string()),
        };
        let expected = if tau.is_some() { "l,re,im" } else { "t,re,im" };
        if header != expected {
            return Err(format!("expected header `{expected}`, found `{header}`"));
        }
        let mut rows = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut values = Vec::new();
        for (i, row) in rows.deserialize::<(usize, f64, f64)>().enumerate() {
            let (idx, re, im) = row.map_err(|e| format!("row {}: {e}", i + 1))?;
            if idx != i {
                return Err(format!("row {} has index {idx}, expected {i}", i + 1));
            }
            values.push(C64::new(re, im));
        }
        if values.is_empty() {
            return Err("input file has no rows".into());
        }
        Ok(match tau {
            Some(tau) => InputFile::PiecewiseConstant { tau, values },
            None => InputFile::Discrete(values),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = File::open(path).map_err(|e| io_err(path, e))?;
        Self::read(file).map_err(|e| parse_err(path, e))
    }
}

/// Per-sample error profile with a trailing `# sup_error=` line.
pub fn write_profile(out: impl Write, errors: &[f64], sup: f64) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta_index", "err"])?;
    for (i, e) in errors.iter().enumerate() {
        w.write_record([i.to_string(), e.to_string()])?;
    }
    let mut out = w.into_inner().map_err(|e| e.into_error())?;
    writeln!(out, "# sup_error={sup}")?;
    Ok(())
}
