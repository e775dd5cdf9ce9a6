use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ner_transfer::corpus_io::{parse_conll, serialize_conll, tag_histogram, Corpus, ExpectedCounts, Language};
use ner_transfer::error::{Error, Result};
use ner_transfer::evaluation::{score, METRIC_DEFINITION};
use ner_transfer::experiment::{
    list_runs, read_corpus, render_published_comparison, render_report, resolve_tag_map, run_experiment,
    DataFormat, ExperimentConfig, ReportStyle, RunOptions,
};
use ner_transfer::harmonize::{harmonize, make_split, merge_corpora, SplitSpec};
use ner_transfer::modeling::{list_encoders, load_tagger, train, ModelContext, Schedule, TrainConfig};

/// Harmonize Hindi/Marathi NER corpora, fine-tune encoders and compare
/// mono vs merged training.
#[derive(Parser)]
#[command(name = "ner-xfer", version)]
struct Cli {
    /// Seed for splitting, merging and training.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Never touch the network; only local checkpoints and tiny-test.
    #[arg(long, global = true)]
    offline: bool,
    /// Overwrite existing outputs and re-run existing cells.
    #[arg(long, global = true)]
    force: bool,
    /// Run store directory.
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// On-disk format of the input.
    #[arg(long, default_value = "conll")]
    format: String,
    /// Language code: hi, mr or mixed.
    #[arg(long, default_value = "mixed")]
    language: Language,
    /// Built-in tag map (iitb_iob, ijcnlp_flat, wikiann_iob) or a map file.
    #[arg(long)]
    tag_map: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Map a corpus onto {NEP, NEO, NEL, O}.
    Harmonize {
        input: PathBuf,
        #[command(flatten)]
        source: Source,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Cut a corpus into train/test/tune files.
    Split {
        input: PathBuf,
        #[arg(long, default_value = "70-15-15")]
        spec: SplitSpec,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        source: Source,
    },
    /// Merge harmonized corpora, each given as LANG=PATH.
    Merge {
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Tag histogram, optionally checked against an expected-counts file.
    Stats {
        input: PathBuf,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        expected: Option<PathBuf>,
    },
    /// Fine-tune an encoder on harmonized train/tune files.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        tune: PathBuf,
        #[arg(long, default_value = "tiny-test")]
        encoder: String,
        /// Directory the tagger is saved to.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        #[arg(long)]
        max_sequence_length: Option<usize>,
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Score a saved tagger on a harmonized test file.
    Eval {
        #[arg(long)]
        tagger: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Also write the predictions as a two-column file.
        #[arg(long)]
        predictions: Option<PathBuf>,
    },
    /// Run every cell of an experiment config.
    Run { config: PathBuf },
    /// Render stored runs as a comparison table.
    Report {
        /// e.g. `encoder=tiny-test,regime=mono,test=iitb`.
        #[arg(long, default_value = "")]
        filter: String,
        #[arg(long, default_value = "text")]
        style: ReportStyle,
        /// Append measured-vs-published scores for matching cells.
        #[arg(long)]
        published: bool,
    },
    /// List the encoder registry.
    Encoders,
}

fn parse_format(s: &str) -> Result<DataFormat> {
    match s {
        "conll" => Ok(DataFormat::Conll),
        "wikiann" => Ok(DataFormat::Wikiann),
        other => Err(Error::Experiment(format!("unknown format `{other}` (conll or wikiann)"))),
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or("corpus".into(), |s| s.to_string_lossy().into_owned())
}

/// Reads `path`, harmonizing it when a tag map is given.
fn load(path: &Path, source: &Source) -> Result<Corpus> {
    let raw = read_corpus(path, parse_format(&source.format)?, source.language, &stem(path))?;
    match &source.tag_map {
        Some(m) => harmonize(&raw, &resolve_tag_map(m)?).map_err(|e| e.in_file(path)),
        None => Ok(raw),
    }
}

fn read_harmonized(path: &Path, language: Language) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_conll(BufReader::new(file), &stem(path), language).map_err(|e| e.in_file(path))
}

fn write_corpus(corpus: &Corpus, path: &Path, force: bool) -> Result<()> {
    if path.exists() && !force {
        return Err(Error::Experiment(format!("{} exists; pass --force to overwrite", path.display())));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    serialize_conll(corpus, &mut out)?;
    out.flush()?;
    Ok(())
}

fn context(offline: bool) -> ModelContext {
    if offline {
        return ModelContext::offline();
    }
    #[cfg(feature = "hub-download")]
    {
        if let Some(cache) = ner_transfer::modeling::LocalCacheProvider::default_hub_cache() {
            return ModelContext::new(
                ner_transfer::modeling::EncoderRegistry::builtin(),
                std::sync::Arc::new(ner_transfer::modeling::HubProvider::new(cache.root)),
            );
        }
    }
    ModelContext::local_cache()
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let store = cli.store.clone().unwrap_or_else(|| PathBuf::from("runs"));
    match cli.command {
        Command::Harmonize { input, source, output } => {
            if source.tag_map.is_none() {
                return Err(Error::Experiment("--tag-map is required".into()));
            }
            let corpus = load(&input, &source)?;
            write_corpus(&corpus, &output, cli.force)?;
            println!("{} sentences, {} tokens -> {}", corpus.len(), corpus.token_count(), output.display());
        }
        Command::Split {
            input,
            mut spec,
            out_dir,
            source,
        } => {
            spec.seed = seed;
            let corpus = load(&input, &source)?;
            let parts = make_split(&corpus, &spec)?;
            let name = stem(&input);
            for (part, c) in [("train", &parts.train), ("test", &parts.test), ("tune", &parts.tune)] {
                let path = out_dir.join(format!("{name}.{part}.txt"));
                write_corpus(c, &path, cli.force)?;
                println!("{part}\t{}\t{}", c.len(), path.display());
            }
        }
        Command::Merge { inputs, output } => {
            let corpora = inputs
                .iter()
                .map(|arg| {
                    let (lang, path) = arg
                        .split_once('=')
                        .ok_or_else(|| Error::Experiment(format!("`{arg}`: expected LANG=PATH")))?;
                    read_harmonized(Path::new(path), lang.parse()?)
                })
                .collect::<Result<Vec<_>>>()?;
            let merged = merge_corpora(&corpora, seed)?;
            write_corpus(&merged, &output, cli.force)?;
            println!("{} sentences -> {}", merged.len(), output.display());
        }
        Command::Stats { input, source, expected } => {
            let corpus = load(&input, &source)?;
            let stats = tag_histogram(&corpus);
            print!("{stats}");
            if let Some(path) = expected {
                let file = File::open(&path).map_err(|e| Error::from(e).in_file(&path))?;
                let want = ExpectedCounts::parse(BufReader::new(file)).map_err(|e| e.in_file(&path))?;
                let mismatches = stats.check(&want);
                if !mismatches.is_empty() {
                    for m in &mismatches {
                        eprintln!("mismatch {}: expected {}, found {}", m.key, m.expected, m.actual);
                    }
                    return Err(Error::Experiment(format!(
                        "{} count(s) differ from {}",
                        mismatches.len(),
                        path.display()
                    )));
                }
                println!("matches {}", path.display());
            }
        }
        Command::Train {
            train: train_path,
            tune,
            encoder,
            output,
            epochs,
            learning_rate,
            batch_size,
            max_sequence_length,
            schedule,
        } => {
            if output.exists() && !cli.force {
                return Err(Error::Experiment(format!("{} exists; pass --force", output.display())));
            }
            let ctx = context(cli.offline);
            let mut config = TrainConfig::defaults_for(ctx.registry.get(&encoder)?);
            config.seed = seed;
            config.epochs = epochs.unwrap_or(config.epochs);
            config.learning_rate = learning_rate.unwrap_or(config.learning_rate);
            config.batch_size = batch_size.unwrap_or(config.batch_size);
            config.max_sequence_length = max_sequence_length.unwrap_or(config.max_sequence_length);
            if let Some(s) = schedule {
                config.schedule = match s.as_str() {
                    "constant" => Schedule::Constant,
                    "linear" => Schedule::Linear,
                    other => return Err(Error::InvalidConfig(format!("unknown schedule `{other}`"))),
                };
            }
            let train_set = read_harmonized(&train_path, Language::Mixed)?;
            let tune_set = read_harmonized(&tune, Language::Mixed)?;
            let tagger = train(&train_set, &tune_set, &config, &ctx)?;
            tagger.save(&output)?;
            for e in tagger.history() {
                let f1 = e.tune_micro_f1.map_or("n/a".into(), |f| format!("{f:.4}"));
                println!("epoch {}\tloss {:.4}\ttune_micro_f1 {f1}", e.epoch, e.train_loss);
            }
            println!("saved {} (best epoch {:?})", output.display(), tagger.best_epoch());
        }
        Command::Eval {
            tagger,
            test,
            predictions,
        } => {
            let ctx = context(true);
            let tagger = load_tagger(&tagger, &ctx.registry)?;
            let test_set = read_harmonized(&test, Language::Mixed)?;
            let predicted = tagger.predict(&test_set.sentences)?;
            let report = score(&test_set, &predicted)?;
            println!("micro_f1\t{:.4}", report.micro_f1);
            println!("macro_f1\t{:.4}", report.macro_f1);
            println!("token_accuracy\t{:.4}", report.token_accuracy);
            for (tag, m) in &report.per_tag {
                println!("{tag}\tP {:.4}\tR {:.4}\tF1 {:.4}\tsupport {}", m.precision, m.recall, m.f1, report.support[tag]);
            }
            println!("# {METRIC_DEFINITION}");
            if let Some(path) = predictions {
                let tagged = test_set.sentences.iter().zip(&predicted).map(|(s, tags)| {
                    let words: Vec<&str> = s.words().collect();
                    ner_transfer::corpus_io::Sentence::from_pairs(&words, tags)
                });
                let out = test_set.with_sentences(format!("{}.predicted", test_set.name), tagged.collect());
                write_corpus(&out, &path, cli.force)?;
            }
        }
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let ctx = context(cli.offline);
            let opts = RunOptions {
                seed: cli.seed,
                store: cli.store.clone(),
                force: cli.force,
            };
            let outcome = run_experiment(&cfg, &ctx, &opts)?;
            print!("{}", render_report(&outcome.records, ReportStyle::Text)?);
            println!("{} records written, {} already present", outcome.created, outcome.skipped);
        }
        Command::Report {
            filter,
            style,
            published,
        } => {
            let records = list_runs(&store, &filter)?;
            print!("{}", render_report(&records, style)?);
            if published {
                print!("{}", render_published_comparison(&records));
            }
        }
        Command::Encoders => {
            println!("key\tfamily\tmultilingual\tcheckpoint\tdescription");
            for e in list_encoders() {
                println!(
                    "{}\t{}\t{}\t{}\t{}",
                    e.key,
                    e.family,
                    e.multilingual,
                    e.checkpoint.as_deref().unwrap_or("-"),
                    e.description
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // bad arguments are validation errors; --help and --version are not errors
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
