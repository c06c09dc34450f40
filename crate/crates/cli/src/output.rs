use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// CSV destination: a `# config: ...` line, a header row, then records.
pub struct CsvSink {
    writer: csv::Writer<Box<dyn Write>>,
    path: Option<PathBuf>,
}

impl CsvSink {
    pub fn create(path: Option<&Path>, config_line: &str, header: &[&str]) -> CliResult<Self> {
        let mut raw: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(
                File::create(p).map_err(|source| CliError::Write { path: p.to_path_buf(), source })?,
            )),
            None => Box::new(io::stdout().lock()),
        };
        let write_err = |source| CliError::Write { path: path.map_or_else(|| "stdout".into(), Path::to_path_buf), source };
        writeln!(raw, "# config: {config_line}").map_err(write_err)?;
        let mut writer = csv::Writer::from_writer(raw);
        writer.write_record(header)?;
        Ok(CsvSink { writer, path: path.map(Path::to_path_buf) })
    }

    pub fn row<I, S>(&mut self, fields: I) -> CliResult<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.writer
            .flush()
            .map_err(|source| CliError::Write { path: self.path.unwrap_or_else(|| "stdout".into()), source })
    }
}
