//! Corpus-level tokenizer measurements: used-token sets, shared tokens
//! between languages, mean tokens per utterance and vocabulary coverage.
//!
//! Every measurement is built from a [`LanguageTally`], which consumes one
//! utterance at a time so callers can stream corpora from disk.

mod report;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::bpe::{TokenId, TokenizerModel};
use crate::error::{Error, Result};

pub use report::{ComparisonReport, ModelStats, Reduction, CSV_HEADER};

/// A named corpus for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguagePartition {
    pub tag: String,
    pub utterances: Vec<String>,
}

impl LanguagePartition {
    pub fn new<S: Into<String>>(
        tag: impl Into<String>,
        utterances: impl IntoIterator<Item = S>,
    ) -> Self {
        LanguagePartition {
            tag: tag.into(),
            utterances: utterances.into_iter().map(Into::into).collect(),
        }
    }
}

/// Token ids emitted while encoding a partition.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct UsedTokenSet {
    pub tag: String,
    pub ids: BTreeSet<TokenId>,
}

impl UsedTokenSet {
    /// Ids at or above 256, i.e. tokens produced by merges.
    pub fn merged(&self) -> impl Iterator<Item = TokenId> + '_ {
        self.ids.iter().copied().filter(|id| !id.is_base())
    }
}

/// Running totals for one language under one model.
#[derive(Debug, Clone)]
pub struct LanguageTally {
    tag: String,
    utterances: usize,
    total_tokens: u64,
    used: BTreeSet<TokenId>,
}

impl LanguageTally {
    pub fn new(tag: impl Into<String>) -> Self {
        LanguageTally {
            tag: tag.into(),
            utterances: 0,
            total_tokens: 0,
            used: BTreeSet::new(),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn add(&mut self, model: &TokenizerModel, utterance: &str) {
        let ids = model.encode(utterance);
        self.utterances += 1;
        self.total_tokens += ids.len() as u64;
        let vocab = model.vocab();
        self.used
            .extend(ids.into_iter().filter(|&id| !vocab.is_special(id)));
    }

    pub fn utterances(&self) -> usize {
        self.utterances
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn used(&self) -> UsedTokenSet {
        UsedTokenSet {
            tag: self.tag.clone(),
            ids: self.used.clone(),
        }
    }

    pub fn mean_tokens(&self) -> Result<f64> {
        if self.utterances == 0 {
            return Err(Error::EmptyPartition(self.tag.clone()));
        }
        Ok(self.total_tokens as f64 / self.utterances as f64)
    }

    pub fn coverage(&self, model: &TokenizerModel) -> f64 {
        coverage_percent(self.used.len(), model)
    }

    pub fn finish(self, model: &TokenizerModel) -> Result<LanguageStats> {
        let mean_tokens_per_utterance = self.mean_tokens()?;
        let coverage_percent = self.coverage(model);
        Ok(LanguageStats {
            utterances: self.utterances,
            total_tokens: self.total_tokens,
            mean_tokens_per_utterance,
            coverage_percent,
            used: UsedTokenSet {
                tag: self.tag.clone(),
                ids: self.used,
            },
            tag: self.tag,
        })
    }
}

fn coverage_percent(used: usize, model: &TokenizerModel) -> f64 {
    let denom = model.vocab().content_len();
    if denom == 0 {
        return 0.0;
    }
    100.0 * used as f64 / denom as f64
}

fn tally(model: &TokenizerModel, part: &LanguagePartition) -> LanguageTally {
    let mut t = LanguageTally::new(part.tag.clone());
    for u in &part.utterances {
        t.add(model, u);
    }
    t
}

/// Union of the ids emitted for every utterance; specials excluded.
pub fn used_tokens(model: &TokenizerModel, part: &LanguagePartition) -> UsedTokenSet {
    tally(model, part).used()
}

/// Arithmetic mean of encoded lengths. Fails on an empty partition.
pub fn tokens_per_utterance(model: &TokenizerModel, part: &LanguagePartition) -> Result<f64> {
    tally(model, part).mean_tokens()
}

/// Share of the non-special vocabulary that the partition uses, in percent.
pub fn coverage(model: &TokenizerModel, part: &LanguagePartition) -> f64 {
    tally(model, part).coverage(model)
}

/// Percent change from `a` to `b`; negative when `b` is smaller.
pub fn relative_reduction(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 {
        return Err(Error::NonPositiveBaseline(a));
    }
    Ok(100.0 * (b - a) / a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SharedCount {
    /// Shared ids at or above 256 (merged tokens only).
    pub merged: usize,
    /// Shared ids including base bytes.
    pub all: usize,
}

impl SharedCount {
    fn of(ids: &BTreeSet<TokenId>) -> Self {
        SharedCount {
            merged: ids.iter().filter(|id| !id.is_base()).count(),
            all: ids.len(),
        }
    }
}

/// Pairwise and all-way intersections of used-token sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedTokens {
    /// Keyed by tag pair with the smaller tag first.
    pub pairwise: BTreeMap<(String, String), SharedCount>,
    pub all: SharedCount,
    /// Tags in the intersection, sorted.
    pub tags: Vec<String>,
}

impl SharedTokens {
    pub fn pair(&self, a: &str, b: &str) -> Option<SharedCount> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.pairwise
            .get(&(key.0.to_string(), key.1.to_string()))
            .copied()
    }

    pub fn from_used(sets: &[UsedTokenSet]) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::TooFewPartitions {
                needed: 2,
                got: sets.len(),
            });
        }
        check_tags(sets.iter().map(|s| s.tag.as_str()))?;
        let mut sorted: Vec<&UsedTokenSet> = sets.iter().collect();
        sorted.sort_by(|a, b| a.tag.cmp(&b.tag));

        let mut pairwise = BTreeMap::new();
        for (i, a) in sorted.iter().enumerate() {
            for b in &sorted[i + 1..] {
                let common: BTreeSet<TokenId> = a.ids.intersection(&b.ids).copied().collect();
                pairwise.insert((a.tag.clone(), b.tag.clone()), SharedCount::of(&common));
            }
        }
        let mut all = sorted[0].ids.clone();
        for s in &sorted[1..] {
            all.retain(|id| s.ids.contains(id));
        }
        Ok(SharedTokens {
            pairwise,
            all: SharedCount::of(&all),
            tags: sorted.iter().map(|s| s.tag.clone()).collect(),
        })
    }
}

/// Shared-token counts across partitions. Needs at least two.
pub fn shared_tokens(model: &TokenizerModel, parts: &[LanguagePartition]) -> Result<SharedTokens> {
    if parts.len() < 2 {
        return Err(Error::TooFewPartitions {
            needed: 2,
            got: parts.len(),
        });
    }
    let used: Vec<UsedTokenSet> = parts.iter().map(|p| used_tokens(model, p)).collect();
    SharedTokens::from_used(&used)
}

/// Per-language measurements under one model.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageStats {
    pub tag: String,
    pub utterances: usize,
    pub total_tokens: u64,
    pub mean_tokens_per_utterance: f64,
    pub coverage_percent: f64,
    pub used: UsedTokenSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusStats {
    /// Sorted by tag.
    pub per_language: Vec<LanguageStats>,
    /// Present when there are at least two languages.
    pub shared: Option<SharedTokens>,
}

impl CorpusStats {
    pub fn from_tallies(model: &TokenizerModel, tallies: Vec<LanguageTally>) -> Result<Self> {
        if tallies.is_empty() {
            return Err(Error::TooFewPartitions { needed: 1, got: 0 });
        }
        check_tags(tallies.iter().map(|t| t.tag()))?;
        let mut per_language = tallies
            .into_iter()
            .map(|t| t.finish(model))
            .collect::<Result<Vec<_>>>()?;
        per_language.sort_by(|a, b| a.tag.cmp(&b.tag));
        let shared = if per_language.len() >= 2 {
            let used: Vec<UsedTokenSet> = per_language.iter().map(|s| s.used.clone()).collect();
            Some(SharedTokens::from_used(&used)?)
        } else {
            None
        };
        Ok(CorpusStats {
            per_language,
            shared,
        })
    }

    pub fn language(&self, tag: &str) -> Option<&LanguageStats> {
        self.per_language.iter().find(|s| s.tag == tag)
    }
}

pub fn corpus_stats(model: &TokenizerModel, parts: &[LanguagePartition]) -> Result<CorpusStats> {
    check_tags(parts.iter().map(|p| p.tag.as_str()))?;
    let tallies = parts.iter().map(|p| tally(model, p)).collect();
    CorpusStats::from_tallies(model, tallies)
}

/// Runs every model over the same partitions and tabulates the results.
pub fn compare_models(
    models: &[(&str, &TokenizerModel)],
    parts: &[LanguagePartition],
) -> Result<ComparisonReport> {
    let stats = models
        .iter()
        .map(|&(name, model)| Ok((name.to_string(), corpus_stats(model, parts)?)))
        .collect::<Result<Vec<_>>>()?;
    ComparisonReport::new(stats)
}

pub(crate) fn check_tags<'a>(tags: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for tag in tags {
        if tag.is_empty() || !seen.insert(tag) {
            return Err(Error::DuplicateTag(tag.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpe::{train, TrainerConfig};
    use crate::codec::ByteDomain;

    fn base(domain: ByteDomain) -> TokenizerModel {
        TokenizerModel::base(domain, 256, vec![]).unwrap()
    }

    #[test]
    fn used_tokens_examples() {
        let empty = LanguagePartition::new("x", Vec::<String>::new());
        assert!(used_tokens(&base(ByteDomain::Utf8), &empty).ids.is_empty());

        let a = LanguagePartition::new("en", ["A"]);
        let used = used_tokens(&base(ByteDomain::Utf8), &a);
        assert_eq!(used.ids, BTreeSet::from([TokenId(0x41)]));

        let han = LanguagePartition::new("ko", ["한"]);
        let used = used_tokens(&base(ByteDomain::Utf16Le), &han);
        assert_eq!(used.ids, BTreeSet::from([TokenId(0x5C), TokenId(0xD5)]));
    }

    #[test]
    fn specials_never_counted() {
        let model = TokenizerModel::base(ByteDomain::Utf8, 300, vec!["<unk>".into()]).unwrap();
        let part = LanguagePartition::new("en", ["<unk>"]);
        let used = used_tokens(&model, &part);
        assert!(used.ids.iter().all(|id| !model.vocab().is_special(*id)));
        // coverage denominator is the 256 content tokens
        assert_eq!(
            coverage(&model, &part),
            100.0 * used.ids.len() as f64 / 256.0
        );
    }

    #[test]
    fn mean_tokens_examples() {
        let m8 = base(ByteDomain::Utf8);
        let m16 = base(ByteDomain::Utf16Le);
        let p = LanguagePartition::new("a", ["aa", "aaaa"]);
        assert_eq!(tokens_per_utterance(&m8, &p).unwrap(), 3.0);

        let han = LanguagePartition::new("ko", ["한"]);
        assert_eq!(tokens_per_utterance(&m16, &han).unwrap(), 2.0);
        assert_eq!(tokens_per_utterance(&m8, &han).unwrap(), 3.0);

        let empty = LanguagePartition::new("x", Vec::<String>::new());
        assert!(matches!(
            tokens_per_utterance(&m8, &empty),
            Err(Error::EmptyPartition(_))
        ));
    }

    #[test]
    fn relative_reduction_examples() {
        let r = relative_reduction(19.5, 18.6).unwrap();
        assert_eq!(format!("{r:.1}"), "-4.6");
        let r = relative_reduction(28.9, 25.9).unwrap();
        assert_eq!(format!("{r:.1}"), "-10.4");
        assert_eq!(relative_reduction(7.25, 7.25).unwrap(), 0.0);
        assert!(relative_reduction(0.0, 1.0).is_err());
        assert!(relative_reduction(-1.0, 1.0).is_err());
        assert!(relative_reduction(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn coverage_examples() {
        let m = base(ByteDomain::Utf8);
        let empty = LanguagePartition::new("x", Vec::<String>::new());
        assert_eq!(coverage(&m, &empty), 0.0);

        let part = LanguagePartition::new("en", ["abc"]);
        assert_eq!(coverage(&m, &part), 100.0 * 3.0 / 256.0);
    }

    #[test]
    fn coverage_is_full_when_every_token_is_used() {
        let m = base(ByteDomain::Utf16Le);
        // every byte value appears as a low byte of some BMP code unit
        let text: String = (0u32..256)
            .map(|lo| char::from_u32(0x4E00 + lo).unwrap())
            .collect();
        let part = LanguagePartition::new("zh", [text]);
        assert_eq!(coverage(&m, &part), 100.0);
    }

    #[test]
    fn shared_tokens_examples() {
        let m = base(ByteDomain::Utf8);
        let a = LanguagePartition::new("a", ["a"]);
        let b = LanguagePartition::new("b", ["b"]);
        let shared = shared_tokens(&m, &[a.clone(), b]).unwrap();
        assert_eq!(shared.pair("a", "b").unwrap().all, 0);

        let twin = LanguagePartition::new("a2", ["a"]);
        let shared = shared_tokens(&m, &[a.clone(), twin]).unwrap();
        assert_eq!(
            shared.pair("a2", "a").unwrap().all,
            used_tokens(&m, &a).ids.len()
        );

        assert!(matches!(
            shared_tokens(&m, std::slice::from_ref(&a)),
            Err(Error::TooFewPartitions { needed: 2, got: 1 })
        ));
        assert!(matches!(
            shared_tokens(&m, &[a.clone(), a]),
            Err(Error::DuplicateTag(_))
        ));
    }

    #[test]
    fn merged_only_excludes_base_bytes() {
        let model = train(&TrainerConfig::new(300, ByteDomain::Utf8), &["ab ab", "ab"]).unwrap();
        let p = LanguagePartition::new("p", ["ab x"]);
        let q = LanguagePartition::new("q", ["ab y"]);
        let shared = shared_tokens(&model, &[p, q]).unwrap();
        let c = shared.pair("p", "q").unwrap();
        assert!(c.merged >= 1);
        assert!(c.all > c.merged);
        assert_eq!(shared.all, c);
    }

    #[test]
    fn stats_with_single_language_has_no_shared_block() {
        let m = base(ByteDomain::Utf8);
        let stats = corpus_stats(&m, &[LanguagePartition::new("en", ["hi"])]).unwrap();
        assert!(stats.shared.is_none());
        assert_eq!(stats.per_language[0].mean_tokens_per_utterance, 2.0);
    }
}
