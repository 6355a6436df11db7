#![allow(dead_code)]

pub mod reference;

use bbpe16::TokenizerModel;

/// Merge list of a model as (left bytes, right bytes).
pub fn merge_bytes(model: &TokenizerModel) -> Vec<(Vec<u8>, Vec<u8>)> {
    model
        .merges()
        .iter()
        .map(|m| {
            (
                model.vocab().bytes(m.left).unwrap().to_vec(),
                model.vocab().bytes(m.right).unwrap().to_vec(),
            )
        })
        .collect()
}
