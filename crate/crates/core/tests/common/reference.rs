//! Quadratic-time reference trainer.
//!
//! Works on byte strings rather than ids and recounts every adjacent pair
//! from scratch on each iteration. Shares nothing with the production
//! trainer except the pre-tokenizer.

use std::collections::{BTreeMap, HashSet};

use bbpe16::{pre_tokenize, ByteDomain};

type Merge = (Vec<u8>, Vec<u8>);

pub fn encode(text: &str, domain: ByteDomain) -> Vec<u8> {
    match domain {
        ByteDomain::Utf8 => text.as_bytes().to_vec(),
        ByteDomain::Utf16Le => text
            .encode_utf16()
            .flat_map(|u| [u as u8, (u >> 8) as u8])
            .collect(),
    }
}

pub fn train(
    corpus: &[String],
    target_vocab_size: usize,
    n_specials: usize,
    domain: ByteDomain,
    min_freq: u64,
) -> Vec<(Vec<u8>, Vec<u8>)> {
    let mut words: Vec<Vec<Vec<u8>>> = Vec::new();
    for line in corpus {
        for piece in pre_tokenize(line) {
            words.push(encode(piece, domain).into_iter().map(|b| vec![b]).collect());
        }
    }
    let mut vocab: HashSet<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
    let mut merges = Vec::new();

    while 256 + n_specials + merges.len() < target_vocab_size {
        let mut counts: BTreeMap<(Vec<u8>, Vec<u8>), u64> = BTreeMap::new();
        for word in &words {
            for w in word.windows(2) {
                *counts.entry((w[0].clone(), w[1].clone())).or_default() += 1;
            }
        }
        // BTreeMap order is (left, right) ascending, so the first maximum wins ties
        let mut best: Option<(&Merge, u64)> = None;
        for (pair, &n) in &counts {
            let concat = [pair.0.clone(), pair.1.clone()].concat();
            if vocab.contains(&concat) {
                continue;
            }
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((pair, n));
            }
        }
        let Some(((left, right), n)) = best else {
            break;
        };
        if n < min_freq {
            break;
        }
        let (left, right) = (left.clone(), right.clone());
        let joined = [left.clone(), right.clone()].concat();
        vocab.insert(joined.clone());
        for word in &mut words {
            let mut out = Vec::with_capacity(word.len());
            let mut i = 0;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == left && word[i + 1] == right {
                    out.push(joined.clone());
                    i += 2;
                } else {
                    out.push(word[i].clone());
                    i += 1;
                }
            }
            *word = out;
        }
        merges.push((left, right));
    }
    merges
}

/// Reference encoder: repeatedly merge the lowest-ranked adjacent pair.
pub fn encode_piece(bytes: &[u8], merges: &[(Vec<u8>, Vec<u8>)]) -> Vec<Vec<u8>> {
    let mut parts: Vec<Vec<u8>> = bytes.iter().map(|&b| vec![b]).collect();
    loop {
        let best = (0..parts.len().saturating_sub(1))
            .filter_map(|i| {
                merges
                    .iter()
                    .position(|(l, r)| *l == parts[i] && *r == parts[i + 1])
                    .map(|rank| (rank, i))
            })
            .min();
        let Some((_, i)) = best else { return parts };
        let right = parts.remove(i + 1);
        parts[i].extend(right);
    }
}
