//! Plain-text model file.
//!
//! ```text
//! bbpe16-model 1
//! byte_domain utf16le
//! target_vocab_size 3000
//! specials 1
//! <unk>
//! merges 2
//! Ġ Ā
//! ĠĀ W
//! ```
//!
//! Each merge line holds the left and right token bytes in the display
//! alphabet, separated by one space. Ids are implied by position, so the
//! file is the full model. Saving is deterministic and loading then saving
//! reproduces the input byte for byte.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::bpe::TokenizerModel;
use crate::codec::{bytes_to_display, display_to_bytes, ByteDomain};
use crate::error::{Error, Result};

pub const MAGIC: &str = "bbpe16-model";
pub const FORMAT_VERSION: u32 = 1;

pub fn to_string(model: &TokenizerModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("{MAGIC} {FORMAT_VERSION}\n"));
    out.push_str(&format!("byte_domain {}\n", model.domain()));
    out.push_str(&format!(
        "target_vocab_size {}\n",
        model.target_vocab_size()
    ));
    out.push_str(&format!("specials {}\n", model.vocab().specials().len()));
    for name in model.vocab().specials() {
        out.push_str(name);
        out.push('\n');
    }
    out.push_str(&format!("merges {}\n", model.merges().len()));
    for rule in model.merges() {
        let vocab = model.vocab();
        let left = vocab.bytes(rule.left).expect("merge refers to known token");
        let right = vocab
            .bytes(rule.right)
            .expect("merge refers to known token");
        out.push_str(&bytes_to_display(left));
        out.push(' ');
        out.push_str(&bytes_to_display(right));
        out.push('\n');
    }
    out
}

pub fn write<W: Write>(model: &TokenizerModel, mut w: W) -> io::Result<()> {
    w.write_all(to_string(model).as_bytes())?;
    w.flush()
}

pub fn save(model: &TokenizerModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_string(model))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<TokenizerModel> {
    let text = fs::read_to_string(path)?;
    from_str(&text)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, line)) => {
                self.last = i + 1;
                Ok(line)
            }
            None => Err(Error::format(self.last + 1, format!("missing {what}"))),
        }
    }

    fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next(key)?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| Error::format(self.last, format!("expected `{key} <value>`")))
    }

    fn count(&mut self, key: &str) -> Result<usize> {
        let value = self.field(key)?;
        parse_decimal(value)
            .ok_or_else(|| Error::format(self.last, format!("bad {key} value {value:?}")))
    }
}

/// Plain decimal without sign or leading zeros, so that saving round-trips.
fn parse_decimal(s: &str) -> Option<usize> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    canonical.then(|| s.parse().ok()).flatten()
}

pub fn from_str(text: &str) -> Result<TokenizerModel> {
    let Some(body) = text.strip_suffix('\n') else {
        return Err(Error::format(
            text.lines().count().max(1),
            "file must end with a newline",
        ));
    };
    let mut lines = Lines {
        inner: body.split('\n').enumerate(),
        last: 0,
    };

    let version = lines.field(MAGIC)?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::format(
            1,
            format!("unsupported format version {version:?}"),
        ));
    }
    let domain_text = lines.field("byte_domain")?;
    let domain = match domain_text {
        "utf8" => ByteDomain::Utf8,
        "utf16le" => ByteDomain::Utf16Le,
        other => {
            return Err(Error::format(
                lines.last,
                format!("unknown byte domain {other:?}"),
            ))
        }
    };
    let target = lines.count("target_vocab_size")?;

    let n_specials = lines.count("specials")?;
    let mut specials = Vec::with_capacity(n_specials);
    for _ in 0..n_specials {
        specials.push(lines.next("special token name")?.to_string());
    }
    let mut model = TokenizerModel::base(domain, target, specials)
        .map_err(|e| Error::format(lines.last, e.to_string()))?;

    let n_merges = lines.count("merges")?;
    for _ in 0..n_merges {
        let line = lines.next("merge")?;
        let at = lines.last;
        let (left, right) = line
            .split_once(' ')
            .ok_or_else(|| Error::format(at, "merge needs two space-separated tokens"))?;
        let lookup = |s: &str| {
            let bytes = display_to_bytes(s).map_err(|e| Error::format(at, e.to_string()))?;
            model
                .vocab()
                .id_of(&bytes)
                .filter(|_| !bytes.is_empty())
                .ok_or_else(|| {
                    Error::format(at, format!("token {s:?} is not defined before this merge"))
                })
        };
        let (l, r) = (lookup(left)?, lookup(right)?);
        model
            .push_merge(l, r)
            .map_err(|e| Error::format(at, e.to_string()))?;
    }
    if let Some((i, _)) = lines.inner.next() {
        return Err(Error::format(i + 1, "unexpected content after merges"));
    }
    Ok(model)
}
