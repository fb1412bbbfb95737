use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use voltspec::Error;

use crate::Format;

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 1.
    Config(String),
    /// A computation ran but a check failed or a mode could not be solved: exit code 2.
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Verify(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => CliError::Config(m),
            Error::InvalidKernel(_)
            | Error::InvalidParameter(_)
            | Error::TooManyTerms { .. }
            | Error::SectorViolation { .. }
            | Error::IndexOutOfRange { .. }
            | Error::StepTooLarge { .. } => CliError::Config(e.to_string()),
            _ => CliError::Verify(e.to_string()),
        }
    }
}

/// Routes documents to files under `--out` or to stdout.
pub struct Output {
    dir: Option<PathBuf>,
    format: Format,
}

impl Output {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Result<Self, CliError> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::Config(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(Self { dir, format })
    }

    pub fn has_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// With `--out`, writes every supplied document. Otherwise prints the one
    /// matching `--format`, falling back to whichever exists.
    pub fn emit(&self, stem: &str, csv: Option<String>, json: Option<String>) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                for (ext, body) in [("csv", &csv), ("json", &json)] {
                    if let Some(body) = body {
                        let path = dir.join(format!("{stem}.{ext}"));
                        std::fs::write(&path, body)
                            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
                    }
                }
                Ok(())
            }
            None => {
                let body = match self.format {
                    Format::Csv => csv.or(json),
                    Format::Json => json.or(csv),
                };
                if let Some(body) = body {
                    let mut out = std::io::stdout().lock();
                    out.write_all(body.as_bytes())
                        .and_then(|_| out.flush())
                        .map_err(|e| CliError::Config(format!("cannot write to stdout: {e}")))?;
                }
                Ok(())
            }
        }
    }

    pub fn write_extra(&self, name: &str, body: &str) -> Result<(), CliError> {
        if let Some(dir) = &self.dir {
            let path = dir.join(name);
            std::fs::write(&path, body)
                .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}
