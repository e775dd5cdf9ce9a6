//! Run the fixture-sized mono/merged grid from `configs/fixtures.toml` into a
//! scratch store and print the report. A second run finds every cell done.
//!
//!     cargo run --example run_experiment

use std::path::Path;

use ner_transfer::experiment::{
    planned_record_count, render_report, run_experiment, ExperimentConfig, ReportStyle, RunOptions,
};
use ner_transfer::modeling::ModelContext;

fn main() -> ner_transfer::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/fixtures.toml");
    let config = ExperimentConfig::load(&path)?;
    println!("{}: {} records planned", config.name, planned_record_count(&config));

    let store = std::env::temp_dir().join(format!("ner-xfer-runs-{}", std::process::id()));
    let opts = RunOptions {
        store: Some(store.clone()),
        ..Default::default()
    };
    let ctx = ModelContext::offline();
    let first = run_experiment(&config, &ctx, &opts)?;
    let second = run_experiment(&config, &ctx, &opts)?;
    println!("first run created {}, second run skipped {}", first.created, second.skipped);
    print!("{}", render_report(&second.records, ReportStyle::Text)?);
    std::fs::remove_dir_all(&store)?;
    Ok(())
}
