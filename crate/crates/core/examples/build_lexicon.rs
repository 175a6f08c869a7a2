//! Intersects directional alignments and builds a bilingual lexicon from the
//! one-to-one links.
//!
//! Run with `cargo run --example build_lexicon`.

use auxcorpus::{build_lexicon, intersect, parse_alignment_line, SentencePair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (source, target, s2t in src-tgt order, t2s in tgt-src order)
    let corpus = [
        (
            "das Haus ist klein",
            "the house is small",
            "0-0 1-1 2-2 3-3",
            "0-0 1-1 2-2 3-3",
        ),
        (
            "das Haus ist groß",
            "the house is big",
            "0-0 1-1 2-2 3-3",
            "0-0 1-1 2-2 3-3",
        ),
        ("ein Haus", "a home", "0-0 1-1", "0-0 1-1"),
        (
            "die Bank ist alt",
            "the bank is old",
            "0-0 1-1 1-2 3-3",
            "0-0 1-1 3-3",
        ),
    ];
    let mut rows = Vec::new();
    for (n, (src, tgt, s2t, t2s)) in corpus.iter().enumerate() {
        let s2t = parse_alignment_line(s2t, n + 1, false)?;
        let t2s = parse_alignment_line(t2s, n + 1, true)?;
        let x = intersect(&s2t, &t2s);
        println!(
            "line {}: {} one-to-one links ({} conflicts)",
            n + 1,
            x.alignment.to_pharaoh(),
            x.conflicts
        );
        rows.push((SentencePair::from_text(src, tgt), x.alignment));
    }
    let lexicon = build_lexicon(rows.iter().map(|(p, a)| (p, a)))?;
    println!();
    lexicon.write_tsv(std::io::stdout().lock())?;
    Ok(())
}
