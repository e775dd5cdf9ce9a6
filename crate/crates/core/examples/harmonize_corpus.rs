//! Read the three source formats, map them onto NEP/NEO/NEL/O and print
//! the tag histograms next to the raw ones.
//!
//!     cargo run --example harmonize_corpus

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use ner_transfer::corpus_io::{parse_conll, parse_wikiann, tag_histogram, validate_corpus, Corpus, Language};
use ner_transfer::harmonize::{builtin_map, harmonize};

fn open(name: &str) -> ner_transfer::Result<BufReader<File>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    Ok(BufReader::new(File::open(path)?))
}

fn show(raw: &Corpus, map: &str) -> ner_transfer::Result<()> {
    let flat = harmonize(raw, &builtin_map(map).expect("built-in map"))?;
    println!("== {} ({}, {})", raw.name, raw.scheme.kind, map);
    println!("raw:        {:?}", tag_histogram(raw).per_tag);
    print!("harmonized: {}", tag_histogram(&flat));
    // dangling I- tags survive as warnings; they harmonize like B-
    for v in validate_corpus(raw).iter().take(2) {
        println!("  warning: {v}");
    }
    Ok(())
}

fn main() -> ner_transfer::Result<()> {
    let iitb = parse_conll(open("iitb_mr.train.txt")?, "iitb", Language::Marathi)?;
    show(&iitb, "iitb_iob")?;
    let ijcnlp = parse_conll(open("ijcnlp_hi.train.txt")?, "ijcnlp", Language::Hindi)?;
    show(&ijcnlp, "ijcnlp_flat")?;
    let wiki = parse_wikiann(open("wikiann_hi.txt")?, "wikiann-hi", Language::Hindi)?;
    show(&wiki, "wikiann_iob")?;
    Ok(())
}
