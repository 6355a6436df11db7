//! Byte-level BPE over a selectable byte substrate.
//!
//! Text is converted to bytes either as UTF-8 (classic byte-level BPE) or as
//! UTF-16 little-endian without a byte-order mark. Merges are learned and
//! applied on those bytes, and decoding converts back to text, replacing
//! malformed sequences with U+FFFD.
//!
//! ```
//! use bbpe16::{train, ByteDomain, TrainerConfig};
//!
//! let corpus = ["한국어 문장", "中文 句子", "AN ENGLISH SENTENCE"];
//! let model = train(&TrainerConfig::new(300, ByteDomain::Utf16Le), &corpus).unwrap();
//! let ids = model.encode("한국어");
//! assert_eq!(model.decode(&ids).unwrap().text, "한국어");
//! ```

pub mod analytics;
pub mod bpe;
pub mod codec;
pub mod corpus;
pub mod error;
pub mod model_file;

pub use bpe::{
    pre_tokenize, train, train_stream, MergeRule, TokenId, TokenizerModel, TrainerConfig,
    Vocabulary,
};
pub use codec::{
    byte_to_display, bytes_to_text, display_to_byte, text_to_bytes, ByteDomain, Decoded,
};
pub use error::{Error, Result};
