//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dancer_core::stats::StatsAccumulator;
use dancer_core::{
    generate_examples, Denominator, Document, GenConfig, KeywordTable, RougeVariant, SectionType,
    SummarizerSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{load_keyword_table, resolve_workers, PipelineConfig, WORKERS_ENV};
use crate::dataset::{load_dataset, write_native, DatasetFormat, RecordError};
use crate::eval::{eval_tokens, evaluate, evaluate_tokens, EvalOptions};
use crate::jsonl::{read_hypotheses, write_jsonl};
use crate::predict::{summarize_corpus, CorpusItem, Diagnostic, SummarizerSettings};

#[derive(Debug, Parser)]
#[command(
    name = "dancer",
    version,
    about = "Section-level divide-and-conquer summarization toolkit"
)]
pub struct Cli {
    /// Pipeline config file (TOML); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a dataset and rewrite it in the native layout.
    Ingest(IngestArgs),
    /// Emit section-level training examples.
    Split(SplitArgs),
    /// Corpus statistics, copied n-gram fractions and the section distribution.
    Stats(StatsArgs),
    /// Summarize every document section by section.
    Summarize(SummarizeArgs),
    /// Score hypotheses against the reference abstracts.
    Evaluate(EvaluateArgs),
    /// ROUGE of one candidate text file against one reference text file.
    Score(ScoreArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input JSONL dataset.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    /// Input layout [default: arxiv-pubmed].
    #[arg(long, value_enum)]
    pub format: Option<DatasetFormat>,
    /// Keyword table file replacing the built-in section keywords.
    #[arg(long, value_name = "FILE")]
    pub keywords: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Source cap in words [default: 500].
    #[arg(long, value_name = "N")]
    pub max_source: Option<usize>,
    /// Target cap in words [default: 100].
    #[arg(long, value_name = "N")]
    pub max_target: Option<usize>,
    /// Section types to keep, comma separated
    /// [default: introduction,methods,results,conclusion].
    #[arg(long, value_delimiter = ',', value_name = "TYPES", value_parser = parse_section_type)]
    pub sections: Option<Vec<SectionType>>,
    /// Which sentence length divides the LCS when aligning [default: summary].
    #[arg(long, value_enum, value_name = "WHICH")]
    pub align_denominator: Option<DenominatorArg>,
    /// Leave summary sentences with no word overlap out of the targets.
    #[arg(long)]
    pub drop_zero_overlap: bool,
    /// Truncate at sentence boundaries instead of mid-sentence.
    #[arg(long)]
    pub sentence_truncation: bool,
    /// Treat the first K sections as introductions when none is selected.
    #[arg(long, value_name = "K")]
    pub fallback_first_k: Option<usize>,
}

fn parse_section_type(s: &str) -> Result<SectionType, String> {
    s.parse()
        .map_err(|e: dancer_core::section::UnknownSectionType| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DenominatorArg {
    Summary,
    Doc,
}

impl From<DenominatorArg> for Denominator {
    fn from(d: DenominatorArg) -> Self {
        match d {
            DenominatorArg::Summary => Denominator::Summary,
            DenominatorArg::Doc => Denominator::Document,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Output file in the native layout.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub gen: GenArgs,
    /// Output JSONL of training examples.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CopyCountingArg {
    Distinct,
    Multiset,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub gen: GenArgs,
    /// How target n-grams are counted for the copy analysis.
    #[arg(long, value_enum, default_value = "distinct")]
    pub copy_counting: CopyCountingArg,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Parallel workers [env: DANCER_WORKERS].
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub gen: GenArgs,
    /// Output JSONL of hypotheses.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// lead[:N], lexrank[:K], sumbasic[:K] or external:CMD [default: lead:10].
    #[arg(long, value_name = "SPEC")]
    pub summarizer: Option<String>,
    /// Parallel workers; each owns one adapter process [env: DANCER_WORKERS].
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
    /// Skip sentences that would repeat a trigram (built-in summarizers).
    #[arg(long, overrides_with = "no_block_trigrams")]
    pub block_trigrams: bool,
    /// Turn trigram blocking off.
    #[arg(long)]
    pub no_block_trigrams: bool,
    /// Cap on each built-in partial summary in words [default: 120].
    #[arg(long, value_name = "N")]
    pub max_summary_words: Option<usize>,
    /// Per-request adapter timeout in milliseconds [default: 60000].
    #[arg(long, value_name = "MS")]
    pub timeout_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Stem tokens before scoring.
    #[arg(long)]
    pub stem: bool,
    /// Bootstrap resamples [default: 1000].
    #[arg(long, value_name = "N")]
    pub resamples: Option<usize>,
    /// Confidence level of the interval [default: 0.95].
    #[arg(long, value_name = "C")]
    pub confidence: Option<f64>,
    /// Bootstrap seed.
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Hypotheses JSONL written by `summarize`.
    #[arg(long = "hyp", value_name = "FILE")]
    pub hypotheses: PathBuf,
    /// Reference dataset.
    #[arg(long = "ref", value_name = "FILE")]
    pub references: PathBuf,
    /// Reference dataset layout [default: arxiv-pubmed].
    #[arg(long, value_enum)]
    pub format: Option<DatasetFormat>,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long, value_name = "FILE")]
    pub candidate: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub reference: PathBuf,
    /// Stem tokens before scoring.
    #[arg(long)]
    pub stem: bool,
    /// Print JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

/// Parses `argv` and runs it, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    match cli.command {
        Command::Ingest(a) => ingest(a, &config),
        Command::Split(a) => split(a, &config),
        Command::Stats(a) => stats(a, &config),
        Command::Summarize(a) => summarize(a, &config),
        Command::Evaluate(a) => evaluate_cmd(a, &config),
        Command::Score(a) => score(a),
    }
}

fn format_of(flag: Option<DatasetFormat>, config: &PipelineConfig) -> DatasetFormat {
    flag.or(config.format).unwrap_or_default()
}

fn keyword_table(input: &InputArgs, config: &PipelineConfig) -> Result<KeywordTable> {
    match input.keywords.as_ref().or(config.keyword_table.as_ref()) {
        Some(p) => Ok(load_keyword_table(p)?),
        None => Ok(KeywordTable::default()),
    }
}

fn gen_config(args: &GenArgs, config: &PipelineConfig) -> Result<GenConfig> {
    let mut g = config.generation.clone();
    if let Some(n) = args.max_source {
        g.max_source_words = n;
    }
    if let Some(n) = args.max_target {
        g.max_target_words = n;
    }
    if let Some(types) = &args.sections {
        g.selected_types = types.clone();
    }
    if let Some(d) = args.align_denominator {
        g.align.denominator = d.into();
    }
    g.align.drop_zero_overlap |= args.drop_zero_overlap;
    g.sentence_truncation |= args.sentence_truncation;
    if args.fallback_first_k.is_some() {
        g.fallback_first_k = args.fallback_first_k;
    }
    g.validate()?;
    Ok(g)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn report_skipped(err: &RecordError) {
    eprintln!("warning: {}", Diagnostic::for_record(err));
}

/// Reads every valid document, reporting the invalid ones.
fn read_documents(input: &InputArgs, config: &PipelineConfig) -> Result<(Vec<Document>, usize)> {
    let reader = load_dataset(&input.input, format_of(input.format, config))?;
    let mut docs = Vec::new();
    let mut skipped = 0;
    for record in reader {
        match record {
            Ok(d) => docs.push(d),
            Err(e) => {
                report_skipped(&e);
                skipped += 1;
            }
        }
    }
    Ok((docs, skipped))
}

fn ingest(args: IngestArgs, config: &PipelineConfig) -> Result<()> {
    let reader = load_dataset(&args.input.input, format_of(args.input.format, config))?;
    let mut out = create(&args.out)?;
    let (mut written, mut skipped) = (0usize, 0usize);
    for record in reader {
        match record {
            Ok(d) => {
                write_native(&mut out, &d)?;
                written += 1;
            }
            Err(e) => {
                report_skipped(&e);
                skipped += 1;
            }
        }
    }
    out.flush()?;
    eprintln!("ingested {written} documents, skipped {skipped}");
    Ok(())
}

fn split(args: SplitArgs, config: &PipelineConfig) -> Result<()> {
    let table = keyword_table(&args.input, config)?;
    let gen = gen_config(&args.gen, config)?;
    let reader = load_dataset(&args.input.input, format_of(args.input.format, config))?;
    let mut out = create(&args.out)?;
    let (mut docs, mut examples, mut skipped) = (0usize, 0usize, 0usize);
    for record in reader {
        match record {
            Ok(d) => {
                docs += 1;
                examples += write_jsonl(&mut out, generate_examples(&d, &gen, &table))?;
            }
            Err(e) => {
                report_skipped(&e);
                skipped += 1;
            }
        }
    }
    out.flush()?;
    eprintln!("{examples} examples from {docs} documents, skipped {skipped}");
    Ok(())
}

#[derive(Debug, Serialize)]
struct StatsReport {
    corpus: dancer_core::CorpusStats,
    copy: dancer_core::CopyStats,
    skipped_records: usize,
}

fn stats(args: StatsArgs, config: &PipelineConfig) -> Result<()> {
    let table = keyword_table(&args.input, config)?;
    let gen = gen_config(&args.gen, config)?;
    let counting = match args.copy_counting {
        CopyCountingArg::Distinct => dancer_core::CopyCounting::Distinct,
        CopyCountingArg::Multiset => dancer_core::CopyCounting::Multiset,
    };
    let (docs, skipped) = read_documents(&args.input, config)?;
    let workers = resolve_workers(args.workers, config.workers);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    let acc = pool.install(|| {
        docs.par_iter()
            .fold(StatsAccumulator::new, |mut acc, d| {
                acc.add_document(d, &table, &gen, counting);
                acc
            })
            .reduce(StatsAccumulator::new, StatsAccumulator::merge)
    });
    let (corpus, copy) = acc.finish();
    let report = StatsReport {
        corpus,
        copy,
        skipped_records: skipped,
    };
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(p) = &args.out {
        let mut f = create(p)?;
        writeln!(f, "{json}")?;
        f.flush()?;
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.json {
        writeln!(out, "{json}")?;
    } else {
        write_stats_table(&mut out, &report)?;
    }
    Ok(())
}

fn write_stats_table(out: &mut impl Write, r: &StatsReport) -> io::Result<()> {
    let c = &r.corpus;
    writeln!(out, "{:<28} {:>12}", "documents", c.n_documents)?;
    writeln!(out, "{:<28} {:>12}", "examples", c.n_examples)?;
    for (name, v) in [
        ("avg document words", c.avg_document_words),
        ("avg summary words", c.avg_summary_words),
        ("avg summary sentences", c.avg_summary_sentences),
        ("avg example words", c.avg_example_words),
        ("avg target words", c.avg_target_words),
    ] {
        writeln!(out, "{name:<28} {v:>12.2}")?;
    }
    writeln!(out)?;
    writeln!(out, "{:<28} {:>12}", "section type", "share")?;
    for (t, v) in &c.section_distribution {
        writeln!(out, "{:<28} {:>12.4}", t.as_str(), v)?;
    }
    writeln!(out)?;
    writeln!(out, "{:<28} {:>12}", "copied n-grams", "fraction")?;
    for (n, v) in &r.copy.per_n {
        writeln!(out, "{:<28} {:>12.4}", format!("n = {n}"), v)?;
    }
    Ok(())
}

fn summarize(args: SummarizeArgs, config: &PipelineConfig) -> Result<()> {
    let table = keyword_table(&args.input, config)?;
    let mut gen = gen_config(&args.gen, config)?;
    if let Some(n) = args.max_summary_words {
        gen.max_summary_words = n;
    }
    if gen.max_summary_words == 0 {
        bail!("--max-summary-words must be at least 1");
    }
    let spec_text = args
        .summarizer
        .as_deref()
        .or(config.summarizer.as_deref())
        .unwrap_or("lead:10");
    let mut spec: SummarizerSpec = spec_text
        .parse()
        .with_context(|| format!("invalid summarizer {spec_text:?}"))?;
    if let SummarizerSpec::External { timeout_ms, .. } = &mut spec {
        if let Some(t) = args.timeout_ms.or(config.timeout_ms) {
            *timeout_ms = t;
        }
    }
    let block_trigrams = if args.no_block_trigrams {
        false
    } else {
        args.block_trigrams || config.block_trigrams.unwrap_or(false)
    };
    let settings = SummarizerSettings {
        spec,
        block_trigrams,
        max_words: gen.max_summary_words,
    };
    let workers = resolve_workers(args.workers, config.workers);
    log::info!("summarizing with {workers} workers ({WORKERS_ENV} sets the default)");

    let reader = load_dataset(&args.input.input, format_of(args.input.format, config))?;
    let mut out = create(&args.out)?;
    let (mut docs, mut skipped, mut failed_sections) = (0usize, 0usize, 0usize);
    for item in summarize_corpus(reader, settings, table, gen, workers) {
        match item {
            CorpusItem::Summary {
                hypothesis,
                diagnostics,
            } => {
                for d in &diagnostics {
                    eprintln!("warning: {d}");
                }
                failed_sections += diagnostics
                    .iter()
                    .filter(|d| d.section_index.is_some())
                    .count();
                serde_json::to_writer(&mut out, &hypothesis)?;
                out.write_all(b"\n")?;
                docs += 1;
            }
            CorpusItem::Skipped(d) => {
                eprintln!("warning: {d}");
                skipped += 1;
            }
        }
    }
    out.flush()?;
    eprintln!("summarized {docs} documents, skipped {skipped}, {failed_sections} failed sections");
    Ok(())
}

fn eval_options(args: &EvalArgs, config: &PipelineConfig) -> EvalOptions {
    let mut o = config.eval.clone();
    o.stem |= args.stem;
    if let Some(n) = args.resamples {
        o.resamples = n;
    }
    if let Some(c) = args.confidence {
        o.confidence = c;
    }
    if let Some(s) = args.seed {
        o.seed = s;
    }
    o
}

fn evaluate_cmd(args: EvaluateArgs, config: &PipelineConfig) -> Result<()> {
    let options = eval_options(&args.eval, config);
    let hyps = read_hypotheses(&args.hypotheses)
        .with_context(|| format!("cannot read {}", args.hypotheses.display()))?;
    let mut refs = Vec::new();
    for record in load_dataset(&args.references, format_of(args.format, config))? {
        match record {
            Ok(d) => refs.push(d),
            Err(e) => report_skipped(&e),
        }
    }
    let report = evaluate(hyps, refs, &options)?;
    for id in &report.unmatched_hypotheses {
        eprintln!("warning: hypothesis {id} has no reference");
    }
    for id in &report.unmatched_references {
        eprintln!("warning: reference {id} has no hypothesis");
    }
    let json = serde_json::to_string_pretty(&report)?;
    if let Some(p) = &args.out {
        let mut f = create(p)?;
        writeln!(f, "{json}")?;
        f.flush()?;
    }
    if args.eval.json {
        println!("{json}");
    } else {
        print!("{}", report.to_table());
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScoreLine {
    variant: String,
    precision: f64,
    recall: f64,
    f1: f64,
}

fn score(args: ScoreArgs) -> Result<()> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))
    };
    let cand = eval_tokens(&read(&args.candidate)?, args.stem);
    let reference = eval_tokens(&read(&args.reference)?, args.stem);
    let reports = evaluate_tokens(&[(cand, reference)], &EvalOptions::default())?;
    let lines: Vec<ScoreLine> = reports
        .into_iter()
        .map(|r| ScoreLine {
            variant: r.variant,
            precision: r.mean.precision,
            recall: r.mean.recall,
            f1: r.mean.f1,
        })
        .collect();
    debug_assert_eq!(lines.len(), RougeVariant::REPORT.len());
    if args.json {
        println!("{}", serde_json::to_string_pretty(&lines)?);
    } else {
        println!(
            "{:<8} {:>9} {:>9} {:>9}",
            "metric", "precision", "recall", "f1"
        );
        for l in &lines {
            println!(
                "{:<8} {:>9.4} {:>9.4} {:>9.4}",
                l.variant, l.precision, l.recall, l.f1
            );
        }
    }
    Ok(())
}
