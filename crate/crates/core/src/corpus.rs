//! Line-oriented corpus reading.
//!
//! One utterance per line. Only the `\n` terminator is stripped, so a file
//! read and written back line by line is reproduced exactly.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_LINE_CHARS: usize = 8192;

/// Streams utterances from a reader, rejecting over-long or non-UTF-8 lines.
pub struct LineReader<R> {
    reader: R,
    max_chars: usize,
    line: usize,
    buf: Vec<u8>,
    failed: bool,
}

impl<R: BufRead> LineReader<R> {
    pub fn new(reader: R, max_chars: usize) -> Self {
        LineReader {
            reader,
            max_chars,
            line: 0,
            buf: Vec::new(),
            failed: false,
        }
    }

    /// 1-based number of the last line returned.
    pub fn line_number(&self) -> usize {
        self.line
    }
}

impl LineReader<BufReader<File>> {
    pub fn open(path: impl AsRef<Path>, max_chars: usize) -> Result<Self> {
        Ok(LineReader::new(
            BufReader::new(File::open(path)?),
            max_chars,
        ))
    }
}

impl<R: BufRead> Iterator for LineReader<R> {
    type Item = Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        self.buf.clear();
        let result = match self.reader.read_until(b'\n', &mut self.buf) {
            Ok(0) => return None,
            Ok(_) => {
                self.line += 1;
                if self.buf.last() == Some(&b'\n') {
                    self.buf.pop();
                }
                match std::str::from_utf8(&self.buf) {
                    Err(_) => Err(Error::InvalidUtf8 { line: self.line }),
                    Ok(s) => {
                        let chars = s.chars().count();
                        if chars > self.max_chars {
                            Err(Error::LineTooLong {
                                line: self.line,
                                chars,
                                max: self.max_chars,
                            })
                        } else {
                            Ok(s.to_string())
                        }
                    }
                }
            }
            Err(e) => Err(e.into()),
        };
        self.failed = result.is_err();
        Some(result)
    }
}

/// Reads a whole corpus file into memory.
pub fn read_lines(path: impl AsRef<Path>, max_chars: usize) -> Result<Vec<String>> {
    LineReader::open(path, max_chars)?.collect()
}
