//! Train a small tagger, save it, load it back and check it tags the same.
//!
//!     cargo run --example save_and_load

use ner_transfer::corpus_io::Language;
use ner_transfer::modeling::{load_tagger, train, EncoderRegistry, ModelContext, TrainConfig, TINY_TEST};
use ner_transfer::synthetic::synthetic_corpus;

fn main() -> ner_transfer::Result<()> {
    let ctx = ModelContext::offline();
    let train_set = synthetic_corpus("hi.train", Language::Hindi, 120, 5);
    let tune = synthetic_corpus("hi.tune", Language::Hindi, 30, 6);
    let mut config = TrainConfig::defaults_for(ctx.registry.get(TINY_TEST)?);
    config.epochs = 3;
    let tagger = train(&train_set, &tune, &config, &ctx)?;

    let dir = std::env::temp_dir().join(format!("ner-xfer-tagger-{}", std::process::id()));
    tagger.save(&dir)?;
    for entry in std::fs::read_dir(&dir)? {
        println!("  {}", entry?.file_name().to_string_lossy());
    }
    let loaded = load_tagger(&dir, &EncoderRegistry::builtin())?;
    let same = loaded.predict(&tune.sentences)? == tagger.predict(&tune.sentences)?;
    println!(
        "{} parameters, best epoch {:?}, identical predictions after reload: {same}",
        loaded.parameter_count(),
        loaded.best_epoch()
    );

    // flipping a byte in any artifact file is caught on load
    let labels = dir.join("labels.txt");
    std::fs::write(&labels, std::fs::read_to_string(&labels)?.replace("NEP", "NEX"))?;
    match load_tagger(&dir, &EncoderRegistry::builtin()) {
        Err(e) => println!("tampered load: {e}"),
        Ok(_) => println!("tampered load unexpectedly succeeded"),
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
