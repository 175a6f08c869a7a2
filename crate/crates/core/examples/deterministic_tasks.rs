//! Deterministic tasks on a German-English pair with its source-to-target
//! alignment.
//!
//! Run with `cargo run --example deterministic_tasks`.

use auxcorpus::transform::{copy_source, monotone_reorder, reverse};
use auxcorpus::{parse_alignment_line, SentencePair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pair = SentencePair::from_text(
        "Es gibt andere Möglichkeiten , die Pyramide zu durchbrechen .",
        "There 's other ways of breaking the pyramid .",
    );
    let s2t = parse_alignment_line("0-1 1-0 2-2 3-3 5-6 6-7 7-4 8-5 9-8", 1, false)?;
    let (mono, multi) = monotone_reorder(&pair, &s2t)?;

    println!("source   {}", pair.src_text());
    println!("main     {}", pair.tgt_text());
    println!("reverse  {}", reverse(&pair).tgt_text());
    println!("source   {}", copy_source(&pair).tgt_text());
    println!("mono     {}", mono.tgt_text());
    println!("({multi} target words had several source links)");
    Ok(())
}
