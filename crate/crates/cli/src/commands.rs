use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use bbpe16::analytics::{ComparisonReport, CorpusStats, LanguageTally};
use bbpe16::corpus::LineReader;
use bbpe16::{model_file, train_stream, TokenId, TokenizerModel, TrainerConfig};

use crate::{CodecArgs, CompareArgs, ReportArgs, ReportFormat, StatsArgs, TrainArgs};

struct TaggedPath {
    tag: String,
    path: PathBuf,
}

fn parse_tagged(specs: &[String], require_tag: bool) -> Result<Vec<TaggedPath>> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let (tag, path) = match spec.split_once('=') {
            Some((tag, path)) => (tag.to_string(), PathBuf::from(path)),
            None if require_tag => bail!("expected TAG=PATH, got {spec:?}"),
            None => (stem(Path::new(spec)), PathBuf::from(spec)),
        };
        ensure!(!tag.is_empty(), "empty tag in {spec:?}");
        ensure!(seen.insert(tag.clone()), "duplicate tag {tag:?}");
        out.push(TaggedPath { tag, path });
    }
    Ok(out)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn open_lines(path: &Path, max_chars: usize) -> Result<LineReader<BufReader<File>>> {
    LineReader::open(path, max_chars).with_context(|| format!("cannot read {}", path.display()))
}

fn input_lines(path: Option<&Path>, max_chars: usize) -> Result<LineReader<Box<dyn BufRead>>> {
    let reader: Box<dyn BufRead> = match path {
        Some(p) => Box::new(BufReader::new(
            File::open(p).with_context(|| format!("cannot read {}", p.display()))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    Ok(LineReader::new(reader, max_chars))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_model(path: &Path) -> Result<TokenizerModel> {
    model_file::load(path).with_context(|| format!("cannot load model {}", path.display()))
}

pub fn train(args: TrainArgs) -> Result<()> {
    let corpora = parse_tagged(&args.corpora, false)?;
    let config = TrainerConfig::new(args.vocab_size, args.byte_domain.into())
        .with_specials(args.specials)
        .with_min_pair_freq(args.min_pair_freq)
        .with_shards(args.shards);

    let mut readers = Vec::with_capacity(corpora.len());
    for c in &corpora {
        readers.push((c.path.clone(), open_lines(&c.path, args.max_line_chars)?));
    }
    let lines = readers.into_iter().flat_map(|(path, reader)| {
        reader.map(move |line| line.with_context(|| format!("in {}", path.display())))
    });

    let started = Instant::now();
    let model = train_stream(&config, lines.map(|r| r.map_err(to_io)))?;
    let elapsed = started.elapsed();

    model_file::save(&model, &args.model)
        .with_context(|| format!("cannot write {}", args.model.display()))?;
    println!(
        "vocab size {} (target {}), {} merges, trained in {:.2}s",
        model.vocab().len(),
        model.target_vocab_size(),
        model.merges().len(),
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn to_io(e: anyhow::Error) -> io::Error {
    io::Error::other(format!("{e:#}"))
}

pub fn encode(args: CodecArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let mut out = output(args.output.as_deref())?;
    let mut reader = input_lines(args.input.as_deref(), args.max_line_chars)?;
    for line in reader.by_ref() {
        let line = line?;
        let ids = model.encode(&line);
        let mut first = true;
        for id in ids {
            if !first {
                out.write_all(b" ")?;
            }
            first = false;
            if args.display {
                out.write_all(model.token_display(id)?.as_bytes())?;
            } else {
                write!(out, "{id}")?;
            }
        }
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn decode(args: CodecArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let symbols: HashMap<String, TokenId> = if args.display {
        (0..model.vocab().len() as u32)
            .map(TokenId)
            .map(|id| Ok((model.token_display(id)?, id)))
            .collect::<Result<_>>()?
    } else {
        HashMap::new()
    };
    let mut out = output(args.output.as_deref())?;
    let reader = input_lines(args.input.as_deref(), usize::MAX)?;
    for (n, line) in reader.enumerate() {
        let line = line?;
        let ids = line
            .split_whitespace()
            .map(|tok| {
                if args.display {
                    symbols
                        .get(tok)
                        .copied()
                        .with_context(|| format!("line {}: unknown token {tok:?}", n + 1))
                } else {
                    tok.parse::<u32>()
                        .map(TokenId)
                        .with_context(|| format!("line {}: bad token id {tok:?}", n + 1))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let decoded = model
            .decode(&ids)
            .with_context(|| format!("line {}", n + 1))?;
        if decoded.replacements > 0 {
            eprintln!("line {}: {} replacement(s)", n + 1, decoded.replacements);
        }
        out.write_all(decoded.text.as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Streams every corpus once, feeding each line to every model.
fn measure(models: &[(String, TokenizerModel)], report: &ReportArgs) -> Result<ComparisonReport> {
    let corpora = parse_tagged(&report.corpora, true)?;
    let mut tallies: Vec<Vec<LanguageTally>> = models.iter().map(|_| Vec::new()).collect();
    for c in &corpora {
        let mut current: Vec<LanguageTally> = models
            .iter()
            .map(|_| LanguageTally::new(c.tag.clone()))
            .collect();
        for line in open_lines(&c.path, report.max_line_chars)? {
            let line = line.with_context(|| format!("in {}", c.path.display()))?;
            for ((_, model), tally) in models.iter().zip(current.iter_mut()) {
                tally.add(model, &line);
            }
        }
        for (dst, t) in tallies.iter_mut().zip(current) {
            dst.push(t);
        }
    }
    let stats = models
        .iter()
        .zip(tallies)
        .map(|((name, model), t)| Ok((name.clone(), CorpusStats::from_tallies(model, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport::new(stats)?)
}

fn write_report(report: &ComparisonReport, args: &ReportArgs) -> Result<()> {
    let text = match args.format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Table => report.to_table(),
    };
    let mut out = output(args.output.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

pub fn stats(args: StatsArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let models = vec![(stem(&args.model), model)];
    let report = measure(&models, &args.report)?;
    write_report(&report, &args.report)
}

pub fn compare(args: CompareArgs) -> Result<()> {
    let specs = parse_tagged(&args.models, false)?;
    ensure!(specs.len() >= 2, "compare needs at least two models");
    let models = specs
        .iter()
        .map(|s| Ok((s.tag.clone(), load_model(&s.path)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = measure(&models, &args.report)?;
    write_report(&report, &args.report)
}
