//! Config-driven mono-vs-merged experiments.
//!
//! An [`ExperimentConfig`] (one TOML file) names datasets, training regimes
//! and encoders. [`run_experiment`] trains one tagger per (regime, encoder)
//! cell, scores it on each of the regime's test sets and persists one
//! [`RunRecord`] per (regime, encoder, test set) in a content-addressed
//! [`RunStore`]. Cells whose records already exist are skipped.

mod config;
mod data;
mod published;
mod report;
mod store;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

pub use config::{DataFormat, DatasetSource, ExperimentConfig, RegimeSpec, TrainOverrides};
pub use data::{load_dataset, read_corpus, resolve_tag_map, LoadedDataset};
pub use published::{published_score, published_scores, PublishedScore};
pub use report::{render_published_comparison, render_report, ReportStyle};
pub use store::{list_runs, run_id, CellSnapshot, RunFilter, RunRecord, RunStore, RECORD_FILE, TAGGER_DIR};

use crate::corpus_io::{fingerprint, Corpus};
use crate::error::{Error, Result};
use crate::evaluation::{score, RegimeKind};
use crate::harmonize::merge_corpora;
use crate::harmonize::shuffle::SHUFFLE_ALGORITHM;
use crate::modeling::{train, ModelContext};

/// Tune-set protocol recorded in every run.
pub const MERGED_TUNE_PROTOCOL: &str = "merged regimes tune on the merge of their members' tune sets";

pub const BACKEND: &str = "candle-cpu-f32";

/// One (regime, encoder) training job and the test sets it is scored on.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPlan {
    pub regime: RegimeSpec,
    pub label: String,
    pub encoder: String,
    pub tests: Vec<String>,
}

/// Every cell of `config`, encoder-major in config order.
pub fn plan_cells(config: &ExperimentConfig) -> Vec<CellPlan> {
    let mut out = Vec::new();
    for encoder in &config.encoders {
        for regime in &config.regimes {
            out.push(CellPlan {
                regime: regime.clone(),
                label: regime.label(),
                encoder: encoder.clone(),
                tests: regime.tests().to_vec(),
            });
        }
    }
    out
}

/// Records a complete run of `config` produces.
pub fn planned_record_count(config: &ExperimentConfig) -> usize {
    plan_cells(config).iter().map(|c| c.tests.len()).sum()
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Replaces the config's seed.
    pub seed: Option<u64>,
    /// Replaces the config's `output_dir`.
    pub store: Option<PathBuf>,
    /// Re-run cells whose records already exist.
    pub force: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// One per planned (regime, encoder, test set), in plan order.
    pub records: Vec<RunRecord>,
    pub created: usize,
    pub skipped: usize,
}

struct Prepared<'a> {
    plan: CellPlan,
    snapshot: CellSnapshot,
    train: Corpus,
    tune: Corpus,
    tests: Vec<(String, &'a Corpus, String)>,
}

fn cell_error(plan: &CellPlan, e: Error) -> Error {
    Error::Cell {
        regime: plan.label.clone(),
        encoder: plan.encoder.clone(),
        source: Box::new(e),
    }
}

/// Validates the whole config (datasets readable, encoders available)
/// before training anything, then runs every missing cell, at most
/// `parallelism` at a time.
pub fn run_experiment(config: &ExperimentConfig, ctx: &ModelContext, opts: &RunOptions) -> Result<RunOutcome> {
    let mut config = config.clone();
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    let store = RunStore::new(opts.store.clone().unwrap_or_else(|| config.output_dir.clone()));
    config.validate(&ctx.registry)?;
    for key in &config.encoders {
        ctx.check_available(key)?;
    }
    let mut datasets = BTreeMap::new();
    for regime in &config.regimes {
        for name in regime.members.iter().chain(regime.tests()) {
            if !datasets.contains_key(name) {
                let loaded = load_dataset(name, &config.datasets[name], config.seed)?;
                datasets.insert(name.clone(), loaded);
            }
        }
    }
    let config_fp = config.fingerprint();

    let mut prepared = Vec::new();
    for plan in plan_cells(&config) {
        let members: Vec<&LoadedDataset> = plan.regime.members.iter().map(|m| &datasets[m]).collect();
        let (train_set, tune_set) = if plan.regime.kind == RegimeKind::Mono {
            (members[0].train.clone(), members[0].tune.clone())
        } else {
            let trains: Vec<Corpus> = members.iter().map(|d| d.train.clone()).collect();
            let tunes: Vec<Corpus> = members.iter().map(|d| d.tune.clone()).collect();
            let mut train = merge_corpora(&trains, config.seed).map_err(|e| cell_error(&plan, e))?;
            let mut tune = merge_corpora(&tunes, config.seed).map_err(|e| cell_error(&plan, e))?;
            train.name = format!("{}.train", plan.label);
            tune.name = format!("{}.tune", plan.label);
            (train, tune)
        };
        let spec = ctx.registry.get(&plan.encoder)?.clone();
        let sources = plan
            .regime
            .members
            .iter()
            .chain(&plan.tests)
            .map(|n| (n.clone(), config.datasets[n].clone()))
            .collect();
        let snapshot = CellSnapshot {
            experiment: config.name.clone(),
            config_fingerprint: config_fp.clone(),
            regime: plan.regime.clone(),
            regime_label: plan.label.clone(),
            datasets: sources,
            encoder_hash: spec.content_hash(),
            train: config.train_config(&spec)?,
            encoder: spec,
            seed: config.seed,
            shuffle_algorithm: SHUFFLE_ALGORITHM.into(),
            tune_protocol: MERGED_TUNE_PROTOCOL.into(),
        };
        let (train_fp, tune_fp) = (fingerprint(&train_set), fingerprint(&tune_set));
        let tests = plan
            .tests
            .iter()
            .map(|t| {
                let test = &datasets[t].test;
                (t.clone(), test, run_id(&snapshot, &train_fp, &tune_fp, t, &fingerprint(test)))
            })
            .collect();
        prepared.push(Prepared {
            plan,
            snapshot,
            train: train_set,
            tune: tune_set,
            tests,
        });
    }

    let pending: Vec<usize> = (0..prepared.len())
        .filter(|i| opts.force || prepared[*i].tests.iter().any(|(_, _, id)| !store.contains(id)))
        .collect();
    log::info!(
        "{}: {} cells planned, {} to run, store {}",
        config.name,
        prepared.len(),
        pending.len(),
        store.root.display()
    );

    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let results: Mutex<BTreeMap<usize, Result<usize>>> = Mutex::new(BTreeMap::new());
    let workers = config.parallelism.min(pending.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failed.load(Ordering::SeqCst) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(&i) = pending.get(k) else { break };
                let cell = &prepared[i];
                let result = run_cell(cell, ctx, &store, opts.force).map_err(|e| cell_error(&cell.plan, e));
                if result.is_err() {
                    failed.store(true, Ordering::SeqCst);
                }
                results.lock().expect("no worker panicked").insert(i, result);
            });
        }
    });
    let mut created = 0;
    for (_, r) in results.into_inner().expect("no worker panicked") {
        created += r?;
    }

    let mut records = Vec::new();
    for cell in &prepared {
        for (_, _, id) in &cell.tests {
            let path = store.run_dir(id).join(RECORD_FILE);
            let text = std::fs::read_to_string(&path)?;
            records.push(serde_json::from_str(&text).map_err(|e| Error::CorruptStore {
                path,
                reason: e.to_string(),
            })?);
        }
    }
    let skipped = records.len() - created;
    Ok(RunOutcome {
        records,
        created,
        skipped,
    })
}

/// Trains one cell, scores every test set and writes the records. Returns
/// how many records were newly written.
fn run_cell(cell: &Prepared, ctx: &ModelContext, store: &RunStore, force: bool) -> Result<usize> {
    let started = Instant::now();
    log::info!("training {} on {}", cell.plan.encoder, cell.plan.label);
    let tagger = train(&cell.train, &cell.tune, &cell.snapshot.train, ctx)?;
    std::fs::create_dir_all(&store.root)?;
    let staging = store.staging_dir("tagger");
    let result = (|| {
        tagger.save(&staging)?;
        let mut written = 0;
        for (test_name, test, id) in &cell.tests {
            let predicted = tagger.predict(&test.sentences)?;
            let metrics = score(test, &predicted)?;
            log::info!(
                "{} / {} / {test_name}: micro F1 {:.4}",
                cell.plan.encoder,
                cell.plan.label,
                metrics.micro_f1
            );
            let record = RunRecord {
                format_version: store::RECORD_FORMAT_VERSION,
                run_id: id.clone(),
                created_unix_ms: store::now_unix_ms(),
                snapshot: cell.snapshot.clone(),
                encoder: cell.plan.encoder.clone(),
                regime: cell.plan.regime.kind,
                regime_label: cell.plan.label.clone(),
                test_dataset: test_name.clone(),
                train_fingerprint: fingerprint(&cell.train),
                tune_fingerprint: fingerprint(&cell.tune),
                test_fingerprint: fingerprint(test),
                train_sentences: cell.train.len(),
                metrics,
                history: tagger.history().to_vec(),
                best_epoch: tagger.best_epoch(),
                wall_time_secs: started.elapsed().as_secs_f64(),
                backend: BACKEND.into(),
            };
            if store.insert(&record, &staging, force)? {
                written += 1;
            }
        }
        Ok(written)
    })();
    let _ = std::fs::remove_dir_all(&staging);
    result
}
