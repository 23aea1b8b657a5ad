//! Line-oriented input and output with `-` meaning stdin/stdout.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Result, ToolError};

pub fn open(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| ToolError::io(path, e))?;
    Ok(Box::new(BufReader::with_capacity(1 << 16, f)))
}

pub fn create(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) if p == Path::new("-") => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|e| ToolError::io(p, e))?;
            Ok(Box::new(BufWriter::with_capacity(1 << 16, f)))
        }
    }
}

/// Numbered lines (1-based) with the trailing `\n` or `\r\n` removed.
pub struct Lines {
    path: PathBuf,
    inner: Box<dyn BufRead + Send>,
    line: usize,
    buf: String,
}

impl Lines {
    pub fn open(path: &Path) -> Result<Self> {
        Ok(Lines { path: path.to_path_buf(), inner: open(path)?, line: 0, buf: String::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Iterator for Lines {
    type Item = Result<(usize, String)>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.inner.read_line(&mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line += 1;
                let trimmed = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
                let trimmed = trimmed.strip_suffix('\r').unwrap_or(trimmed);
                Some(Ok((self.line, trimmed.to_string())))
            }
            Err(e) if e.kind() == io::ErrorKind::InvalidData => {
                Some(Err(ToolError::data(&self.path, self.line + 1, "invalid UTF-8")))
            }
            Err(e) => Some(Err(ToolError::io(&self.path, e))),
        }
    }
}

pub fn write_line(out: &mut dyn Write, path: Option<&Path>, line: &str) -> Result<()> {
    out.write_all(line.as_bytes())
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| ToolError::io(path.unwrap_or(Path::new("-")), e))
}
