//! Sentence and token counts per file, as printed by `auxcorpus stats`.
//!
//! Run with `cargo run --example corpus_stats -- FILE...`; without arguments
//! it counts its own source.

use auxcorpus::corpus_stats;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut files: Vec<String> = std::env::args().skip(1).collect();
    if files.is_empty() {
        files.push(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/corpus_stats.rs").to_string());
    }
    for s in corpus_stats(&files)? {
        println!("{}\t{}\t{}", s.path, s.sentences, s.tokens);
    }
    Ok(())
}
