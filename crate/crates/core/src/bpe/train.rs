//! Greedy BPE training over pre-token byte sequences.
//!
//! The corpus is reduced to a table of distinct pre-token byte strings with
//! their frequencies, then merged incrementally: each merge only revisits
//! the words that contain the chosen pair. Counting is sharded across a
//! thread pool, but shard results are summed and words are sorted by bytes
//! before merging starts, so the result does not depend on the shard count.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::io;
use std::sync::Arc;

use rayon::prelude::*;

use crate::bpe::model::{apply_merge, TokenId, TokenizerModel};
use crate::bpe::pretokenize::PieceIter;
use crate::codec::{self, ByteDomain};
use crate::error::{Error, Result};

const BATCH_LINES: usize = 8192;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainerConfig {
    pub vocab_size: usize,
    pub domain: ByteDomain,
    pub specials: Vec<String>,
    /// Training stops once the best pair occurs fewer times than this.
    pub min_pair_freq: u64,
    /// Number of parallel counting shards (and worker threads).
    pub shards: usize,
}

impl TrainerConfig {
    pub fn new(vocab_size: usize, domain: ByteDomain) -> Self {
        TrainerConfig {
            vocab_size,
            domain,
            specials: Vec::new(),
            min_pair_freq: 2,
            shards: 1,
        }
    }

    pub fn with_specials(mut self, specials: Vec<String>) -> Self {
        self.specials = specials;
        self
    }

    pub fn with_min_pair_freq(mut self, min: u64) -> Self {
        self.min_pair_freq = min;
        self
    }

    pub fn with_shards(mut self, shards: usize) -> Self {
        self.shards = shards.max(1);
        self
    }
}

/// Trains on an in-memory list of utterances.
pub fn train<S: AsRef<str> + Sync>(config: &TrainerConfig, corpus: &[S]) -> Result<TokenizerModel> {
    train_stream(config, corpus.iter().map(Ok::<_, io::Error>))
}

/// Trains on a stream of utterances, failing on the first read error.
pub fn train_stream<I, S, E>(config: &TrainerConfig, corpus: I) -> Result<TokenizerModel>
where
    I: IntoIterator<Item = Result<S, E>>,
    S: AsRef<str> + Send + Sync,
    Error: From<E>,
{
    let mut model =
        TokenizerModel::base(config.domain, config.vocab_size, config.specials.clone())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.shards.max(1))
        .build()
        .map_err(|e| io::Error::other(e.to_string()))?;

    let words = count_words(config, &pool, corpus)?;
    if model.vocab().len() < config.vocab_size {
        let mut state = pool.install(|| MergeState::new(words, config.shards.max(1)));
        state.run(&mut model, config.min_pair_freq.max(1));
    }
    Ok(model)
}

type WordCounts = HashMap<Vec<u8>, u64>;

fn count_words<I, S, E>(
    config: &TrainerConfig,
    pool: &rayon::ThreadPool,
    corpus: I,
) -> Result<Vec<(Vec<u8>, u64)>>
where
    I: IntoIterator<Item = Result<S, E>>,
    S: AsRef<str> + Send + Sync,
    Error: From<E>,
{
    let shards = config.shards.max(1);
    let mut total = WordCounts::new();
    let mut batch: Vec<S> = Vec::with_capacity(BATCH_LINES);
    let mut lines = corpus.into_iter();
    loop {
        batch.clear();
        for line in lines.by_ref().take(BATCH_LINES) {
            batch.push(line?);
        }
        if batch.is_empty() {
            break;
        }
        let chunk = batch.len().div_ceil(shards);
        let partials: Vec<WordCounts> = pool.install(|| {
            batch
                .par_chunks(chunk)
                .map(|lines| {
                    let mut counts = WordCounts::new();
                    for line in lines {
                        for piece in PieceIter::new(line.as_ref()) {
                            let bytes = codec::text_to_bytes(piece, config.domain);
                            *counts.entry(bytes).or_default() += 1;
                        }
                    }
                    counts
                })
                .collect()
        });
        for partial in partials {
            for (word, n) in partial {
                *total.entry(word).or_default() += n;
            }
        }
    }
    let mut words: Vec<(Vec<u8>, u64)> = total.into_iter().collect();
    words.sort_unstable();
    Ok(words)
}

type Pair = (TokenId, TokenId);
/// Pair counts and pair -> word occurrences for one shard.
type ShardCounts = (HashMap<Pair, u64>, HashMap<Pair, Vec<usize>>);

/// Heap entry; the maximum is the most frequent pair, ties going to the
/// lexicographically smallest (left bytes, right bytes).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Candidate {
    count: u64,
    left: Arc<[u8]>,
    right: Arc<[u8]>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Word {
    ids: Vec<TokenId>,
    count: u64,
}

struct MergeState {
    words: Vec<Word>,
    counts: HashMap<Pair, u64>,
    /// Words that contained the pair at some point; may hold stale entries.
    occurs_in: HashMap<Pair, Vec<usize>>,
}

impl MergeState {
    fn new(raw: Vec<(Vec<u8>, u64)>, shards: usize) -> Self {
        let words: Vec<Word> = raw
            .into_iter()
            .map(|(bytes, count)| Word {
                ids: bytes.into_iter().map(TokenId::from).collect(),
                count,
            })
            .collect();

        let chunk = words.len().div_ceil(shards).max(1);
        let partials: Vec<ShardCounts> = words
            .par_chunks(chunk)
            .enumerate()
            .map(|(c, slice)| {
                let mut counts = HashMap::new();
                let mut occurs: HashMap<Pair, Vec<usize>> = HashMap::new();
                for (i, word) in slice.iter().enumerate() {
                    let idx = c * chunk + i;
                    for w in word.ids.windows(2) {
                        let pair = (w[0], w[1]);
                        *counts.entry(pair).or_default() += word.count;
                        let list = occurs.entry(pair).or_default();
                        if list.last() != Some(&idx) {
                            list.push(idx);
                        }
                    }
                }
                (counts, occurs)
            })
            .collect();

        let mut counts: HashMap<Pair, u64> = HashMap::new();
        let mut occurs_in: HashMap<Pair, Vec<usize>> = HashMap::new();
        for (c, o) in partials {
            for (pair, n) in c {
                *counts.entry(pair).or_default() += n;
            }
            for (pair, list) in o {
                occurs_in.entry(pair).or_default().extend(list);
            }
        }
        MergeState {
            words,
            counts,
            occurs_in,
        }
    }

    fn candidate(&self, model: &TokenizerModel, pair: Pair, count: u64) -> Candidate {
        Candidate {
            count,
            left: model.vocab().shared_bytes(pair.0).clone(),
            right: model.vocab().shared_bytes(pair.1).clone(),
            pair,
        }
    }

    fn run(&mut self, model: &mut TokenizerModel, min_pair_freq: u64) {
        let mut heap: BinaryHeap<Candidate> = self
            .counts
            .iter()
            .filter(|(_, &n)| n > 0)
            .map(|(&pair, &n)| self.candidate(model, pair, n))
            .collect();
        let mut blocked: HashSet<Pair> = HashSet::new();

        while model.vocab().len() < model.target_vocab_size() {
            let Some(top) = heap.pop() else { break };
            if self.counts.get(&top.pair).copied().unwrap_or(0) != top.count
                || blocked.contains(&top.pair)
            {
                continue;
            }
            if top.count < min_pair_freq {
                break;
            }
            let (left, right) = top.pair;
            let result = match model.push_merge(left, right) {
                Ok(id) => id,
                Err(Error::DuplicateToken) => {
                    blocked.insert(top.pair);
                    continue;
                }
                Err(e) => unreachable!("merge of live pair failed: {e}"),
            };

            let mut touched: HashSet<Pair> = HashSet::new();
            let mut affected = self.occurs_in.remove(&top.pair).unwrap_or_default();
            affected.sort_unstable();
            affected.dedup();
            for idx in affected {
                self.rewrite_word(idx, top.pair, result, &mut touched);
            }
            for pair in touched {
                let n = self.counts.get(&pair).copied().unwrap_or(0);
                if n > 0 && !blocked.contains(&pair) {
                    heap.push(self.candidate(model, pair, n));
                }
            }
        }
    }

    fn rewrite_word(
        &mut self,
        idx: usize,
        pair: Pair,
        result: TokenId,
        touched: &mut HashSet<Pair>,
    ) {
        let word = &self.words[idx];
        if !word.ids.windows(2).any(|w| (w[0], w[1]) == pair) {
            return;
        }
        let count = word.count;
        let merged = apply_merge(&word.ids, pair.0, pair.1, result);

        for w in word.ids.windows(2) {
            let p = (w[0], w[1]);
            if let Entry::Occupied(mut e) = self.counts.entry(p) {
                *e.get_mut() -= count;
                if *e.get() == 0 {
                    e.remove();
                }
            }
            touched.insert(p);
        }
        for w in merged.windows(2) {
            let p = (w[0], w[1]);
            *self.counts.entry(p).or_default() += count;
            let list = self.occurs_in.entry(p).or_default();
            if list.last() != Some(&idx) {
                list.push(idx);
            }
            touched.insert(p);
        }
        self.words[idx].ids = merged;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(model: &TokenizerModel) -> Vec<(Vec<u8>, Vec<u8>)> {
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

    #[test]
    fn picks_most_frequent_pair() {
        // hand count: (a,a) 2+1 = 3, (a,b) 1+1 = 2
        let model = train(&TrainerConfig::new(257, ByteDomain::Utf8), &["aaab", "aab"]).unwrap();
        assert_eq!(ids(&model), vec![(b"a".to_vec(), b"a".to_vec())]);
        let aa = model.merges()[0].result;
        assert_eq!(
            model.encode("aaab"),
            vec![aa, TokenId::from(b'a'), TokenId::from(b'b')]
        );
    }

    #[test]
    fn empty_corpus_gives_base_model() {
        let empty: [&str; 0] = [];
        let model = train(&TrainerConfig::new(256, ByteDomain::Utf8), &empty).unwrap();
        assert_eq!(model.vocab().len(), 256);
        assert!(model.merges().is_empty());
        let model = train(&TrainerConfig::new(1000, ByteDomain::Utf16Le), &empty).unwrap();
        assert!(model.merges().is_empty());
    }

    #[test]
    fn hangul_first_merge_in_utf16() {
        // pieces: [5C D5] and [20 00 5C D5]; (5C,D5) occurs twice, all others once
        let model = train(&TrainerConfig::new(260, ByteDomain::Utf16Le), &["한 한"]).unwrap();
        assert_eq!(ids(&model)[0], (vec![0x5C], vec![0xD5]));
    }

    #[test]
    fn ties_break_on_byte_order() {
        // (x,y) and (a,b) both occur twice; (a,b) sorts first
        let model = train(
            &TrainerConfig::new(258, ByteDomain::Utf8),
            &["xy ab", "ab xy"],
        )
        .unwrap();
        assert_eq!(ids(&model)[0], (b"a".to_vec(), b"b".to_vec()));
        assert_eq!(ids(&model)[1], (b"x".to_vec(), b"y".to_vec()));
    }

    #[test]
    fn stops_below_min_frequency() {
        let model = train(&TrainerConfig::new(1000, ByteDomain::Utf8), &["abcdef"]).unwrap();
        assert!(model.merges().is_empty());
        let cfg = TrainerConfig::new(1000, ByteDomain::Utf8).with_min_pair_freq(1);
        let model = train(&cfg, &["abcdef"]).unwrap();
        assert_eq!(model.merges().len(), 5);
    }

    #[test]
    fn rejects_small_target() {
        let cfg = TrainerConfig::new(256, ByteDomain::Utf8).with_specials(vec!["<unk>".into()]);
        assert!(matches!(
            train(&cfg, &["a"]),
            Err(Error::VocabTooSmall {
                target: 256,
                minimum: 257
            })
        ));
    }

    #[test]
    fn stream_errors_propagate() {
        let lines = vec![Ok("ab".to_string()), Err(io::Error::other("disk gone"))];
        let err = train_stream(&TrainerConfig::new(300, ByteDomain::Utf8), lines).unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn specials_shift_merge_ids() {
        let cfg = TrainerConfig::new(300, ByteDomain::Utf8)
            .with_specials(vec!["<unk>".into(), "<pad>".into()]);
        let model = train(&cfg, &["aaab", "aab"]).unwrap();
        assert_eq!(model.merges()[0].result, TokenId(258));
    }

    #[test]
    fn shard_count_does_not_change_merges() {
        let corpus: Vec<String> = (0..300)
            .map(|i| format!("w{} 한국어 {} 中文{}", i % 17, i % 5, i % 3))
            .collect();
        let base = train(&TrainerConfig::new(400, ByteDomain::Utf16Le), &corpus).unwrap();
        for shards in [2, 3, 8] {
            let cfg = TrainerConfig::new(400, ByteDomain::Utf16Le).with_shards(shards);
            assert_eq!(train(&cfg, &corpus).unwrap(), base);
        }
    }

    #[test]
    fn larger_target_extends_smaller() {
        let corpus = ["the cat sat on the mat", "that hat is the best hat"];
        let small = train(&TrainerConfig::new(262, ByteDomain::Utf8), &corpus).unwrap();
        let large = train(&TrainerConfig::new(300, ByteDomain::Utf8), &corpus).unwrap();
        assert_eq!(small.merges(), &large.merges()[..small.merges().len()]);
    }
}
