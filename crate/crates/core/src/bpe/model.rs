use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::bpe::pretokenize::PieceIter;
use crate::codec::{self, ByteDomain, Decoded};
use crate::error::{Error, Result};

/// Number of base byte tokens; ids `0..256` are the raw bytes.
pub const BASE_TOKENS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenId(pub u32);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn is_base(self) -> bool {
        self.index() < BASE_TOKENS
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u8> for TokenId {
    fn from(b: u8) -> Self {
        TokenId(b as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MergeRule {
    pub left: TokenId,
    pub right: TokenId,
    pub result: TokenId,
    pub rank: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct MergeTarget {
    pub rank: u32,
    pub result: TokenId,
}

/// Id ↔ byte-string table.
///
/// Layout: 256 base bytes, then the specials, then one token per merge.
/// Specials carry no bytes and are not part of the byte lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    pieces: Vec<Arc<[u8]>>,
    by_bytes: HashMap<Arc<[u8]>, TokenId>,
    specials: Vec<String>,
}

impl Vocabulary {
    fn with_specials(specials: Vec<String>) -> Self {
        let mut pieces: Vec<Arc<[u8]>> = Vec::with_capacity(BASE_TOKENS + specials.len());
        let mut by_bytes = HashMap::with_capacity(BASE_TOKENS);
        for b in 0..=255u8 {
            let piece: Arc<[u8]> = Arc::from(&[b][..]);
            by_bytes.insert(piece.clone(), TokenId::from(b));
            pieces.push(piece);
        }
        pieces.extend(specials.iter().map(|_| Arc::from(&[][..])));
        Vocabulary {
            pieces,
            by_bytes,
            specials,
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Number of tokens that carry bytes, i.e. everything but the specials.
    pub fn content_len(&self) -> usize {
        self.pieces.len() - self.specials.len()
    }

    pub fn specials(&self) -> &[String] {
        &self.specials
    }

    pub fn special_id(&self, name: &str) -> Option<TokenId> {
        self.specials
            .iter()
            .position(|s| s == name)
            .map(|i| TokenId((BASE_TOKENS + i) as u32))
    }

    pub fn is_special(&self, id: TokenId) -> bool {
        (BASE_TOKENS..BASE_TOKENS + self.specials.len()).contains(&id.index())
    }

    pub fn contains(&self, id: TokenId) -> bool {
        id.index() < self.pieces.len()
    }

    /// Bytes of `id`; empty for specials.
    pub fn bytes(&self, id: TokenId) -> Option<&[u8]> {
        self.pieces.get(id.index()).map(|p| &p[..])
    }

    pub(crate) fn shared_bytes(&self, id: TokenId) -> &Arc<[u8]> {
        &self.pieces[id.index()]
    }

    pub fn id_of(&self, bytes: &[u8]) -> Option<TokenId> {
        self.by_bytes.get(bytes).copied()
    }

    /// All ids that carry bytes, in id order.
    pub fn content_ids(&self) -> impl Iterator<Item = TokenId> + '_ {
        (0..self.pieces.len())
            .map(|i| TokenId(i as u32))
            .filter(|&id| !self.is_special(id))
    }

    fn push(&mut self, bytes: Vec<u8>) -> Result<TokenId> {
        if self.by_bytes.contains_key(&bytes[..]) {
            return Err(Error::DuplicateToken);
        }
        let id = TokenId(self.pieces.len() as u32);
        let piece: Arc<[u8]> = bytes.into();
        self.by_bytes.insert(piece.clone(), id);
        self.pieces.push(piece);
        Ok(id)
    }
}

/// A trained tokenizer: byte domain, vocabulary and ordered merges.
#[derive(Debug, Clone)]
pub struct TokenizerModel {
    domain: ByteDomain,
    target_vocab_size: usize,
    vocab: Vocabulary,
    merges: Vec<MergeRule>,
    lookup: HashMap<(TokenId, TokenId), MergeTarget>,
}

impl PartialEq for TokenizerModel {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain
            && self.target_vocab_size == other.target_vocab_size
            && self.vocab == other.vocab
            && self.merges == other.merges
    }
}

impl Eq for TokenizerModel {}

impl TokenizerModel {
    /// A model holding only the base bytes and `specials`.
    pub fn base(
        domain: ByteDomain,
        target_vocab_size: usize,
        specials: Vec<String>,
    ) -> Result<Self> {
        let minimum = BASE_TOKENS + specials.len();
        if target_vocab_size < minimum {
            return Err(Error::VocabTooSmall {
                target: target_vocab_size,
                minimum,
            });
        }
        for (i, name) in specials.iter().enumerate() {
            if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c.is_control()) {
                return Err(Error::InvalidSpecial(name.clone()));
            }
            if specials[..i].contains(name) {
                return Err(Error::DuplicateTag(name.clone()));
            }
        }
        Ok(TokenizerModel {
            domain,
            target_vocab_size,
            vocab: Vocabulary::with_specials(specials),
            merges: Vec::new(),
            lookup: HashMap::new(),
        })
    }

    /// Appends a merge of two existing content tokens.
    ///
    /// Fails if either side is unknown or a special, if the vocabulary is
    /// already at its target size, or if the concatenation already exists.
    pub fn push_merge(&mut self, left: TokenId, right: TokenId) -> Result<TokenId> {
        for id in [left, right] {
            if !self.vocab.contains(id) || self.vocab.is_special(id) {
                return Err(Error::UnknownTokenId(id));
            }
        }
        if self.vocab.len() >= self.target_vocab_size {
            return Err(Error::VocabTooSmall {
                target: self.target_vocab_size,
                minimum: self.vocab.len() + 1,
            });
        }
        let mut bytes = self.vocab.shared_bytes(left).to_vec();
        bytes.extend_from_slice(self.vocab.shared_bytes(right));
        let result = self.vocab.push(bytes)?;
        let rank = self.merges.len() as u32;
        self.merges.push(MergeRule {
            left,
            right,
            result,
            rank,
        });
        self.lookup
            .insert((left, right), MergeTarget { rank, result });
        Ok(result)
    }

    pub fn domain(&self) -> ByteDomain {
        self.domain
    }

    pub fn target_vocab_size(&self) -> usize {
        self.target_vocab_size
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    pub(crate) fn merge_for(&self, left: TokenId, right: TokenId) -> Option<MergeTarget> {
        self.lookup.get(&(left, right)).copied()
    }

    /// Tokenizes `text`. Never fails: every byte has a base token.
    pub fn encode(&self, text: &str) -> Vec<TokenId> {
        let mut out = Vec::new();
        let mut buf = Vec::new();
        for piece in PieceIter::new(text) {
            buf.clear();
            codec::extend_text_bytes(&mut buf, piece, self.domain);
            self.encode_bytes_into(&buf, &mut out);
        }
        out
    }

    /// Applies the merges to one pre-token's bytes, lowest rank first.
    pub fn encode_bytes(&self, bytes: &[u8]) -> Vec<TokenId> {
        let mut out = Vec::with_capacity(bytes.len());
        self.encode_bytes_into(bytes, &mut out);
        out
    }

    fn encode_bytes_into(&self, bytes: &[u8], out: &mut Vec<TokenId>) {
        let mut ids: Vec<TokenId> = bytes.iter().map(|&b| TokenId::from(b)).collect();
        while ids.len() > 1 {
            let best = ids
                .windows(2)
                .filter_map(|w| self.merge_for(w[0], w[1]).map(|t| (t, w[0], w[1])))
                .min_by_key(|(t, _, _)| t.rank);
            let Some((target, left, right)) = best else {
                break;
            };
            ids = apply_merge(&ids, left, right, target.result);
        }
        out.extend_from_slice(&ids);
    }

    /// Concatenates the bytes of `ids` and decodes them in the model's domain.
    pub fn decode(&self, ids: &[TokenId]) -> Result<Decoded> {
        let bytes = self.token_bytes(ids)?;
        Ok(codec::bytes_to_text(&bytes, self.domain))
    }

    pub fn token_bytes(&self, ids: &[TokenId]) -> Result<Vec<u8>> {
        let mut bytes = Vec::with_capacity(ids.len() * 2);
        for &id in ids {
            let piece = self.vocab.bytes(id).ok_or(Error::UnknownTokenId(id))?;
            bytes.extend_from_slice(piece);
        }
        Ok(bytes)
    }

    /// The token's bytes written in the display alphabet, e.g. `ĠĀW`.
    pub fn token_display(&self, id: TokenId) -> Result<String> {
        if let Some(pos) = id.index().checked_sub(BASE_TOKENS) {
            if let Some(name) = self.vocab.specials.get(pos) {
                return Ok(name.clone());
            }
        }
        self.vocab
            .bytes(id)
            .map(codec::bytes_to_display)
            .ok_or(Error::UnknownTokenId(id))
    }
}

/// Replaces every non-overlapping `(left, right)` pair, scanning left to right.
pub(crate) fn apply_merge(
    ids: &[TokenId],
    left: TokenId,
    right: TokenId,
    result: TokenId,
) -> Vec<TokenId> {
    let mut out = Vec::with_capacity(ids.len());
    let mut i = 0;
    while i < ids.len() {
        if i + 1 < ids.len() && ids[i] == left && ids[i + 1] == right {
            out.push(result);
            i += 2;
        } else {
            out.push(ids[i]);
            i += 1;
        }
    }
    out
}
