use std::fmt::Write as _;

use super::{check_tags, relative_reduction, CorpusStats, SharedCount};
use crate::error::{Error, Result};

/// Header of the comma-separated report. The column set never changes;
/// cells that do not apply to a row kind are left empty.
pub const CSV_HEADER: &str = "kind,model,language,utterances,total_tokens,mean_tokens,coverage_pct,used_tokens,shared_merged,shared_all,baseline,reduction_pct";

#[derive(Debug, Clone, PartialEq)]
pub struct ModelStats {
    pub name: String,
    pub stats: CorpusStats,
}

/// Change in mean tokens per utterance of `model` relative to `baseline`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub model: String,
    pub baseline: String,
    pub tag: String,
    /// `None` when the baseline mean is zero.
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Sorted by model name.
    pub models: Vec<ModelStats>,
    /// One entry per (earlier model, later model, language), in that order.
    pub reductions: Vec<Reduction>,
}

impl ComparisonReport {
    pub fn new(stats: Vec<(String, CorpusStats)>) -> Result<Self> {
        check_tags(stats.iter().map(|(name, _)| name.as_str()))?;
        let mut models: Vec<ModelStats> = stats
            .into_iter()
            .map(|(name, stats)| ModelStats { name, stats })
            .collect();
        models.sort_by(|a, b| a.name.cmp(&b.name));

        if let Some(first) = models.first() {
            let tags: Vec<&str> = first
                .stats
                .per_language
                .iter()
                .map(|s| s.tag.as_str())
                .collect();
            for m in &models[1..] {
                let other: Vec<&str> = m
                    .stats
                    .per_language
                    .iter()
                    .map(|s| s.tag.as_str())
                    .collect();
                if other != tags {
                    return Err(Error::format(
                        0,
                        "models were measured on different partitions",
                    ));
                }
            }
        }

        let mut reductions = Vec::new();
        for (i, base) in models.iter().enumerate() {
            for m in &models[i + 1..] {
                for (b, s) in base.stats.per_language.iter().zip(&m.stats.per_language) {
                    reductions.push(Reduction {
                        model: m.name.clone(),
                        baseline: base.name.clone(),
                        tag: b.tag.clone(),
                        percent: relative_reduction(
                            b.mean_tokens_per_utterance,
                            s.mean_tokens_per_utterance,
                        )
                        .ok(),
                    });
                }
            }
        }
        Ok(ComparisonReport { models, reductions })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for m in &self.models {
            for s in &m.stats.per_language {
                let _ = writeln!(
                    out,
                    "language,{},{},{},{},{:?},{:?},{},,,,",
                    csv_field(&m.name),
                    csv_field(&s.tag),
                    s.utterances,
                    s.total_tokens,
                    s.mean_tokens_per_utterance,
                    s.coverage_percent,
                    s.used.ids.len(),
                );
            }
        }
        for m in &self.models {
            for (label, count) in shared_rows(&m.stats) {
                let _ = writeln!(
                    out,
                    "shared,{},{},,,,,,{},{},,",
                    csv_field(&m.name),
                    csv_field(&label),
                    count.merged,
                    count.all,
                );
            }
        }
        for r in &self.reductions {
            let pct = r.percent.map(|p| format!("{p:?}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "reduction,{},{},,,,,,,,{},{}",
                csv_field(&r.model),
                csv_field(&r.tag),
                csv_field(&r.baseline),
                pct,
            );
        }
        out
    }

    /// Aligned plain-text tables: mean tokens (with reduction columns),
    /// coverage, and shared tokens as `merged / all`.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let names: Vec<&str> = self.models.iter().map(|m| m.name.as_str()).collect();
        let tags: Vec<&str> = self
            .models
            .first()
            .map(|m| {
                m.stats
                    .per_language
                    .iter()
                    .map(|s| s.tag.as_str())
                    .collect()
            })
            .unwrap_or_default();

        let mut header = vec!["language".to_string()];
        header.extend(names.iter().map(|n| n.to_string()));
        let pairs: Vec<(&str, &str)> = self
            .reductions
            .iter()
            .map(|r| (r.model.as_str(), r.baseline.as_str()))
            .fold(Vec::new(), |mut acc, p| {
                if !acc.contains(&p) {
                    acc.push(p);
                }
                acc
            });
        header.extend(pairs.iter().map(|(m, b)| format!("{m} vs {b}")));

        let mut rows = vec![header.clone()];
        for (t, tag) in tags.iter().enumerate() {
            let mut row = vec![tag.to_string()];
            for m in &self.models {
                row.push(format!(
                    "{:.1}",
                    m.stats.per_language[t].mean_tokens_per_utterance
                ));
            }
            for (model, baseline) in &pairs {
                let cell = self
                    .reductions
                    .iter()
                    .find(|r| r.model == *model && r.baseline == *baseline && r.tag == *tag)
                    .and_then(|r| r.percent)
                    .map_or_else(|| "n/a".to_string(), format_percent);
                row.push(cell);
            }
            rows.push(row);
        }
        out.push_str("Mean tokens per utterance\n");
        render(&mut out, &rows);

        let mut rows = vec![header[..=names.len()].to_vec()];
        for (t, tag) in tags.iter().enumerate() {
            let mut row = vec![tag.to_string()];
            for m in &self.models {
                row.push(format!("{:.1}", m.stats.per_language[t].coverage_percent));
            }
            rows.push(row);
        }
        out.push_str("\nVocabulary coverage (%)\n");
        render(&mut out, &rows);

        if self.models.iter().any(|m| m.stats.shared.is_some()) {
            let mut head = vec!["languages".to_string()];
            head.extend(names.iter().map(|n| n.to_string()));
            let mut rows = vec![head];
            let labels: Vec<String> = shared_rows(&self.models[0].stats)
                .into_iter()
                .map(|(l, _)| l)
                .collect();
            for (i, label) in labels.iter().enumerate() {
                let mut row = vec![label.clone()];
                for m in &self.models {
                    let (_, c) = &shared_rows(&m.stats)[i];
                    row.push(format!("{} / {}", c.merged, c.all));
                }
                rows.push(row);
            }
            out.push_str("\nShared tokens (merged only / all tokens)\n");
            render(&mut out, &rows);
        }
        out
    }
}

/// Pairwise rows, then the all-language row when there are three or more.
fn shared_rows(stats: &CorpusStats) -> Vec<(String, SharedCount)> {
    let Some(shared) = &stats.shared else {
        return Vec::new();
    };
    let mut rows: Vec<(String, SharedCount)> = shared
        .pairwise
        .iter()
        .map(|((a, b), c)| (format!("{a}+{b}"), *c))
        .collect();
    if shared.tags.len() > 2 {
        rows.push((shared.tags.join("+"), shared.all));
    }
    rows
}

fn format_percent(p: f64) -> String {
    let s = format!("{p:.1}%");
    // -0.04 rounds to "-0.0%"
    if s == "-0.0%" {
        "0.0%".to_string()
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render(out: &mut String, rows: &[Vec<String>]) {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.extend(std::iter::repeat_n(' ', pad));
            } else {
                line.extend(std::iter::repeat_n(' ', pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
}
