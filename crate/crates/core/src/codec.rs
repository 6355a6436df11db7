//! Text ↔ byte conversion for the two byte domains, plus the printable
//! display alphabet used in model files.
//!
//! UTF-16 is always little-endian and never carries a byte-order mark.
//! Decoding is total: malformed input is replaced with U+FFFD, one
//! replacement per malformed unit, and the number of replacements is
//! reported back to the caller.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Which encoding supplies the bytes that BPE merges operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ByteDomain {
    Utf8,
    Utf16Le,
}

impl ByteDomain {
    pub const ALL: [ByteDomain; 2] = [ByteDomain::Utf8, ByteDomain::Utf16Le];

    pub fn as_str(self) -> &'static str {
        match self {
            ByteDomain::Utf8 => "utf8",
            ByteDomain::Utf16Le => "utf16le",
        }
    }
}

impl fmt::Display for ByteDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ByteDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "utf8" | "utf-8" => Ok(ByteDomain::Utf8),
            "utf16le" | "utf-16le" => Ok(ByteDomain::Utf16Le),
            _ => Err(Error::UnknownDomain(s.to_string())),
        }
    }
}

/// Result of decoding an arbitrary byte sequence.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decoded {
    pub text: String,
    /// Number of U+FFFD substitutions made for malformed input.
    pub replacements: usize,
}

/// Encodes `text` into the bytes of `domain`.
pub fn text_to_bytes(text: &str, domain: ByteDomain) -> Vec<u8> {
    match domain {
        ByteDomain::Utf8 => text.as_bytes().to_vec(),
        ByteDomain::Utf16Le => {
            let mut out = Vec::with_capacity(text.len() * 2);
            for unit in text.encode_utf16() {
                out.extend_from_slice(&unit.to_le_bytes());
            }
            out
        }
    }
}

/// Appends the encoding of `text` to `out` without allocating a new buffer.
pub(crate) fn extend_text_bytes(out: &mut Vec<u8>, text: &str, domain: ByteDomain) {
    match domain {
        ByteDomain::Utf8 => out.extend_from_slice(text.as_bytes()),
        ByteDomain::Utf16Le => {
            for unit in text.encode_utf16() {
                out.extend_from_slice(&unit.to_le_bytes());
            }
        }
    }
}

/// Decodes bytes of `domain` back to text, replacing malformed units.
///
/// For UTF-8 each maximal invalid subpart becomes one U+FFFD. For UTF-16LE
/// each unpaired surrogate becomes one U+FFFD, and so does a trailing odd
/// byte.
pub fn bytes_to_text(bytes: &[u8], domain: ByteDomain) -> Decoded {
    match domain {
        ByteDomain::Utf8 => decode_utf8(bytes),
        ByteDomain::Utf16Le => decode_utf16le(bytes),
    }
}

fn decode_utf8(bytes: &[u8]) -> Decoded {
    let mut text = String::with_capacity(bytes.len());
    let mut replacements = 0;
    for chunk in bytes.utf8_chunks() {
        text.push_str(chunk.valid());
        if !chunk.invalid().is_empty() {
            text.push(char::REPLACEMENT_CHARACTER);
            replacements += 1;
        }
    }
    Decoded { text, replacements }
}

fn decode_utf16le(bytes: &[u8]) -> Decoded {
    let units = bytes
        .chunks_exact(2)
        .map(|pair| u16::from_le_bytes([pair[0], pair[1]]));
    let mut text = String::with_capacity(bytes.len());
    let mut replacements = 0;
    for decoded in char::decode_utf16(units) {
        match decoded {
            Ok(c) => text.push(c),
            Err(_) => {
                text.push(char::REPLACEMENT_CHARACTER);
                replacements += 1;
            }
        }
    }
    if bytes.len() % 2 == 1 {
        text.push(char::REPLACEMENT_CHARACTER);
        replacements += 1;
    }
    Decoded { text, replacements }
}

const fn is_self_displayed(b: u8) -> bool {
    b >= b'!' && b <= b'~'
}

const fn build_byte_to_display() -> [char; 256] {
    let mut table = ['\0'; 256];
    let mut shifted = 0u32;
    let mut b = 0usize;
    while b < 256 {
        table[b] = if is_self_displayed(b as u8) {
            b as u8 as char
        } else {
            let c = match char::from_u32(0x100 + shifted) {
                Some(c) => c,
                None => panic!("display table out of range"),
            };
            shifted += 1;
            c
        };
        b += 1;
    }
    table
}

static BYTE_TO_DISPLAY: [char; 256] = build_byte_to_display();

/// Printable stand-in for a raw byte.
///
/// `!`..=`~` show as themselves. Every other byte, in ascending order, is
/// assigned the next scalar from U+0100, so space is `Ġ` and NUL is `Ā`.
pub fn byte_to_display(b: u8) -> char {
    BYTE_TO_DISPLAY[b as usize]
}

/// Inverse of [`byte_to_display`].
pub fn display_to_byte(c: char) -> Result<u8, Error> {
    let code = c as u32;
    if code <= 0xFF {
        let b = code as u8;
        return if is_self_displayed(b) {
            Ok(b)
        } else {
            Err(Error::UnknownDisplaySymbol(c))
        };
    }
    let offset = code.checked_sub(0x100).filter(|&k| k < 162);
    let Some(offset) = offset else {
        return Err(Error::UnknownDisplaySymbol(c));
    };
    (0u8..=255)
        .filter(|&b| !is_self_displayed(b))
        .nth(offset as usize)
        .ok_or(Error::UnknownDisplaySymbol(c))
}

/// Renders a byte string in the display alphabet.
pub fn bytes_to_display(bytes: &[u8]) -> String {
    bytes.iter().map(|&b| byte_to_display(b)).collect()
}

/// Parses a display-alphabet string back to bytes.
pub fn display_to_bytes(s: &str) -> Result<Vec<u8>, Error> {
    s.chars().map(display_to_byte).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hangul_matches_reference_bytes() {
        assert_eq!(text_to_bytes("한", ByteDomain::Utf16Le), vec![0x5C, 0xD5]);
        assert_eq!(
            text_to_bytes("한", ByteDomain::Utf8),
            vec![0xED, 0x95, 0x9C]
        );
    }

    #[test]
    fn ascii_is_little_endian() {
        assert_eq!(text_to_bytes("A", ByteDomain::Utf16Le), vec![0x41, 0x00]);
    }

    #[test]
    fn supplementary_plane_uses_surrogates() {
        // oracle: the surrogate-pair formula, independent of encode_utf16
        let cp = 0x1D11Eu32 - 0x10000;
        let high = 0xD800 + (cp >> 10);
        let low = 0xDC00 + (cp & 0x3FF);
        let expected = vec![
            (high & 0xFF) as u8,
            (high >> 8) as u8,
            (low & 0xFF) as u8,
            (low >> 8) as u8,
        ];
        assert_eq!(expected, vec![0x34, 0xD8, 0x1E, 0xDD]);
        assert_eq!(text_to_bytes("\u{1D11E}", ByteDomain::Utf16Le), expected);
    }

    #[test]
    fn no_bom_is_emitted() {
        let bytes = text_to_bytes("abc", ByteDomain::Utf16Le);
        assert_ne!(&bytes[..2], &[0xFF, 0xFE]);
        let bytes = text_to_bytes("\u{FEFF}x", ByteDomain::Utf16Le);
        assert_eq!(&bytes[..2], &[0xFF, 0xFE]);
    }

    #[test]
    fn decode_valid_and_empty() {
        let d = bytes_to_text(&[0x5C, 0xD5], ByteDomain::Utf16Le);
        assert_eq!(d.text, "한");
        assert_eq!(d.replacements, 0);
        assert_eq!(bytes_to_text(&[], ByteDomain::Utf16Le), Decoded::default());
        assert_eq!(bytes_to_text(&[], ByteDomain::Utf8), Decoded::default());
    }

    #[test]
    fn lone_high_surrogate_is_replaced() {
        let d = bytes_to_text(&[0x34, 0xD8], ByteDomain::Utf16Le);
        assert_eq!(d.text, "\u{FFFD}");
        assert_eq!(d.replacements, 1);
    }

    #[test]
    fn trailing_odd_byte_is_replaced() {
        let d = bytes_to_text(&[0x41], ByteDomain::Utf16Le);
        assert_eq!(d.text, "\u{FFFD}");
        assert_eq!(d.replacements, 1);

        let d = bytes_to_text(&[0x41, 0x00, 0x42], ByteDomain::Utf16Le);
        assert_eq!(d.text, "A\u{FFFD}");
        assert_eq!(d.replacements, 1);
    }

    #[test]
    fn malformed_utf8_keeps_surroundings() {
        // truncated 한 between two ASCII letters
        let d = bytes_to_text(&[b'a', 0xED, 0x95, b'b'], ByteDomain::Utf8);
        assert_eq!(d.text, "a\u{FFFD}b");
        assert_eq!(d.replacements, 1);

        let d = bytes_to_text(&[0xFF, 0xFF], ByteDomain::Utf8);
        assert_eq!(d.text, "\u{FFFD}\u{FFFD}");
        assert_eq!(d.replacements, 2);
    }

    #[test]
    fn low_surrogate_first_is_replaced() {
        // low surrogate then high surrogate: both unpaired
        let d = bytes_to_text(&[0x1E, 0xDD, 0x34, 0xD8, 0x41, 0x00], ByteDomain::Utf16Le);
        assert_eq!(d.text, "\u{FFFD}\u{FFFD}A");
        assert_eq!(d.replacements, 2);
    }

    #[test]
    fn display_known_symbols() {
        assert_eq!(byte_to_display(0x20), 'Ġ');
        assert_eq!(byte_to_display(0x00), 'Ā');
        assert_eq!(byte_to_display(0x41), 'A');
        assert_eq!(bytes_to_display(&[0x20, 0x00, 0x57]), "ĠĀW");
    }

    #[test]
    fn display_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for b in 0u8..=255 {
            let c = byte_to_display(b);
            assert!(!c.is_whitespace() && !c.is_control(), "{b:#x} -> {c:?}");
            assert!(seen.insert(c));
            assert_eq!(display_to_byte(c).unwrap(), b);
        }
    }

    #[test]
    fn display_rejects_foreign_symbols() {
        for c in [' ', '\n', '\u{7F}', '\u{A1}', '\u{1A2}', '한'] {
            assert!(display_to_byte(c).is_err(), "{c:?}");
        }
    }

    #[test]
    fn domain_parsing() {
        assert_eq!(
            "utf16le".parse::<ByteDomain>().unwrap(),
            ByteDomain::Utf16Le
        );
        assert_eq!("UTF-8".parse::<ByteDomain>().unwrap(), ByteDomain::Utf8);
        assert!("utf16be".parse::<ByteDomain>().is_err());
    }
}
