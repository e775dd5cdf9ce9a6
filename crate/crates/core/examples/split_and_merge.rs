//! Cut a corpus 70-15-15, hold out a tune set, and merge a Hindi and a
//! Marathi train set the way the merged regimes do.
//!
//!     cargo run --example split_and_merge

use ner_transfer::corpus_io::{tag_histogram, Language};
use ner_transfer::harmonize::shuffle::SHUFFLE_ALGORITHM;
use ner_transfer::harmonize::{hold_out_tune, make_split, merge_corpora, SplitSpec};
use ner_transfer::synthetic::synthetic_corpus;

fn main() -> ner_transfer::Result<()> {
    let hindi = synthetic_corpus("hi", Language::Hindi, 1000, 1);
    let marathi = synthetic_corpus("mr", Language::Marathi, 450, 2);

    let spec: SplitSpec = "70-15-15".parse()?;
    let parts = make_split(&hindi, &SplitSpec { seed: 42, ..spec })?;
    println!(
        "hi: train {} / test {} / tune {} ({SHUFFLE_ALGORITHM})",
        parts.train.len(),
        parts.test.len(),
        parts.tune.len()
    );

    let (mr_train, mr_tune) = hold_out_tune(&marathi, 42)?;
    println!("mr: train {} / tune {} (10% held out)", mr_train.len(), mr_tune.len());

    let merged = merge_corpora(&[parts.train.clone(), mr_train.clone()], 42)?;
    let sum = tag_histogram(&parts.train).merged(&tag_histogram(&mr_train));
    assert_eq!(tag_histogram(&merged).per_tag, sum.per_tag);
    println!("merged: {} sentences, language {}", merged.len(), merged.language);
    print!("{}", tag_histogram(&merged));
    Ok(())
}
