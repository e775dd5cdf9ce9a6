//! Score predictions token by token and build a mono-vs-merged table.
//!
//!     cargo run --example score_predictions

use ner_transfer::corpus_io::{Corpus, Language, Sentence};
use ner_transfer::evaluation::{compare, confusion, score, RegimeKind, ScoredRun};

fn main() -> ner_transfer::Result<()> {
    let gold = Corpus::from_sentences(
        "gold",
        Language::Marathi,
        vec![
            Sentence::from_pairs(&["सचिन", "पुण्यात", "आला"], &["NEP", "NEL", "O"]),
            Sentence::from_pairs(&["इसरो", "ने", "सांगितले"], &["NEO", "O", "O"]),
        ],
    );
    let predicted = vec![vec!["NEP", "O", "O"], vec!["NEO", "O", "NEP"]];
    let report = score(&gold, &predicted)?;
    println!("micro F1 {:.4}, macro F1 {:.4}, accuracy {:.4}", report.micro_f1, report.macro_f1, report.token_accuracy);
    for (tag, m) in &report.per_tag {
        println!("  {tag}: P {:.2} R {:.2} F1 {:.2}", m.precision, m.recall, m.f1);
    }
    let cm = confusion(&gold, &predicted)?;
    println!("gold NEL predicted O: {}", cm.get("NEL", "O"));

    // two cells of one table block
    let run = |id: &str, regime, label: &str, f1| ScoredRun {
        run_id: id.into(),
        encoder: "mahabert".into(),
        regime,
        regime_label: label.into(),
        test_dataset: "iitb".into(),
        micro_f1: f1,
        macro_f1: f1,
        token_accuracy: 0.95,
    };
    let table = compare(&[
        run("a", RegimeKind::Mono, "mono(iitb)", 0.6207),
        run("b", RegimeKind::MergedPair, "merged-pair(ijcnlp+iitb)", 0.6529),
    ])?;
    print!("{}", table.render_text(&[]));
    Ok(())
}
