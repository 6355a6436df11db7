/// Splits text into the pieces that merges are confined to.
///
/// Each run of non-whitespace characters is one piece, and a single U+0020
/// directly in front of the run is attached to it. Every other whitespace
/// character stands alone. Concatenating the pieces gives back `text`.
pub fn pre_tokenize(text: &str) -> Vec<&str> {
    PieceIter { text, pos: 0 }.collect()
}

pub(crate) struct PieceIter<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> PieceIter<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        PieceIter { text, pos: 0 }
    }
}

impl<'a> Iterator for PieceIter<'a> {
    type Item = &'a str;

    fn next(&mut self) -> Option<&'a str> {
        let rest = &self.text[self.pos..];
        let mut chars = rest.char_indices();
        let (_, first) = chars.next()?;

        let end = if first.is_whitespace() {
            let next_is_word = rest[first.len_utf8()..]
                .chars()
                .next()
                .is_some_and(|c| !c.is_whitespace());
            if first == ' ' && next_is_word {
                word_end(rest, 1)
            } else {
                first.len_utf8()
            }
        } else {
            word_end(rest, 0)
        };

        self.pos += end;
        Some(&rest[..end])
    }
}

fn word_end(s: &str, from: usize) -> usize {
    s[from..]
        .char_indices()
        .find(|(_, c)| c.is_whitespace())
        .map_or(s.len(), |(i, _)| from + i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basic_splits() {
        assert_eq!(pre_tokenize("hello world"), vec!["hello", " world"]);
        assert!(pre_tokenize("").is_empty());
        assert_eq!(pre_tokenize(" 한국"), vec![" 한국"]);
    }

    #[test]
    fn only_one_space_attaches() {
        assert_eq!(pre_tokenize("a  b"), vec!["a", " ", " b"]);
        assert_eq!(pre_tokenize("a "), vec!["a", " "]);
        assert_eq!(pre_tokenize("  "), vec![" ", " "]);
    }

    #[test]
    fn other_whitespace_stands_alone() {
        assert_eq!(pre_tokenize("a\tb"), vec!["a", "\t", "b"]);
        assert_eq!(pre_tokenize("x\r\n y"), vec!["x", "\r", "\n", " y"]);
        assert_eq!(pre_tokenize("\u{3000}中"), vec!["\u{3000}", "中"]);
    }

    proptest! {
        #[test]
        fn pieces_concatenate_to_input(s in "\\PC{0,40}|[ a\t한\u{3000}]{0,20}") {
            let pieces = pre_tokenize(&s);
            prop_assert_eq!(pieces.concat(), s.clone());
            prop_assert!(pieces.iter().all(|p| !p.is_empty()));
        }
    }
}
