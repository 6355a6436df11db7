mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bbpe16::corpus::DEFAULT_MAX_LINE_CHARS;
use bbpe16::ByteDomain;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bbpe16",
    version,
    about = "Byte-level BPE over UTF-8 or UTF-16LE bytes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model over the concatenation of all corpus files
    Train(TrainArgs),
    /// Encode text lines into token id lines
    Encode(CodecArgs),
    /// Decode token id lines back into text
    Decode(CodecArgs),
    /// Per-language statistics for one model
    Stats(StatsArgs),
    /// Side-by-side statistics for two or more models
    Compare(CompareArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Utf8,
    Utf16le,
}

impl From<DomainArg> for ByteDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Utf8 => ByteDomain::Utf8,
            DomainArg::Utf16le => ByteDomain::Utf16Le,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_enum, default_value = "utf16le")]
    byte_domain: DomainArg,
    #[arg(long, default_value_t = 7000)]
    vocab_size: usize,
    /// Corpus file as TAG=PATH or PATH; repeatable
    #[arg(long = "corpus", required = true)]
    corpora: Vec<String>,
    /// Where to write the model
    #[arg(long)]
    model: PathBuf,
    /// Special token name, placed right after the byte tokens; repeatable
    #[arg(long = "special")]
    specials: Vec<String>,
    #[arg(long, default_value_t = 2)]
    min_pair_freq: u64,
    /// Counting shards; the trained model does not depend on this
    #[arg(long, default_value_t = 1)]
    shards: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_LINE_CHARS)]
    max_line_chars: usize,
}

#[derive(Args, Debug)]
struct CodecArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input file; standard input when omitted
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Use display-symbol tokens instead of numeric ids
    #[arg(long)]
    display: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_LINE_CHARS)]
    max_line_chars: usize,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Tagged corpus as TAG=PATH; repeatable
    #[arg(long = "corpus", required = true)]
    corpora: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_LINE_CHARS)]
    max_line_chars: usize,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args, Debug)]
struct CompareArgs {
    /// Model as NAME=PATH or PATH (named after the file stem); at least two
    #[arg(long = "model", required = true, num_args = 1)]
    models: Vec<String>,
    #[command(flatten)]
    report: ReportArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Encode(args) => commands::encode(args),
        Command::Decode(args) => commands::decode(args),
        Command::Stats(args) => commands::stats(args),
        Command::Compare(args) => commands::compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
