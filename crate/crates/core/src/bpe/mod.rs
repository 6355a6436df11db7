mod model;
mod pretokenize;
mod train;

pub use model::{MergeRule, TokenId, TokenizerModel, Vocabulary, BASE_TOKENS};
pub use pretokenize::pre_tokenize;
pub use train::{train, train_stream, TrainerConfig};
