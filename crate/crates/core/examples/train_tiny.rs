//! Fine-tune the tiny CPU encoder on synthetic Marathi and tag new sentences.
//!
//!     cargo run --example train_tiny

use ner_transfer::corpus_io::Language;
use ner_transfer::evaluation::score;
use ner_transfer::modeling::{train, ModelContext, TrainConfig, TINY_TEST};
use ner_transfer::synthetic::synthetic_corpus;

fn main() -> ner_transfer::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let ctx = ModelContext::offline();
    let train_set = synthetic_corpus("mr.train", Language::Marathi, 200, 1);
    let tune = synthetic_corpus("mr.tune", Language::Marathi, 40, 2);
    let test = synthetic_corpus("mr.test", Language::Marathi, 40, 3);

    let mut config = TrainConfig::defaults_for(ctx.registry.get(TINY_TEST)?);
    config.epochs = 5;
    let tagger = train(&train_set, &tune, &config, &ctx)?;

    let predicted = tagger.predict(&test.sentences)?;
    let report = score(&test, &predicted)?;
    println!("test micro F1 {:.4} (best epoch {:?})", report.micro_f1, tagger.best_epoch());
    for (s, tags) in test.sentences.iter().zip(&predicted).take(3) {
        let line: Vec<String> = s.words().zip(tags).map(|(w, t)| format!("{w}/{t}")).collect();
        println!("{}", line.join(" "));
    }
    Ok(())
}
