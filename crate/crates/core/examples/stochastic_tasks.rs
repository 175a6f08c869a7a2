//! Token masking, swapping and lexical replacement with per-line generators.
//!
//! The same seed, task index and line index always give the same output,
//! whatever the thread count.
//!
//! Run with `cargo run --example stochastic_tasks`.

use auxcorpus::align::{intersect, BilingualLexicon, LexiconEntry};
use auxcorpus::{
    apply_task, line_rng, parse_alignment_line, SentencePair, TaskContext, TaskKind, TaskSpec,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pair = SentencePair::from_text(
        "Es gibt andere Möglichkeiten , die Pyramide zu durchbrechen .",
        "There 's other ways of breaking the pyramid .",
    );
    let s2t = parse_alignment_line("0-1 1-0 2-2 3-3 5-6 6-7 7-4 8-5 9-8", 1, false)?;
    // the target-to-source file lists items as tgt-src
    let t2s = parse_alignment_line("1-0 0-1 2-2 3-3 6-5 7-6 4-7 5-8 8-9", 1, true)?;
    let o2o = intersect(&s2t, &t2s).alignment;
    let lexicon = BilingualLexicon::from_entries(vec![
        LexiconEntry {
            source: "Haus".into(),
            target: "house".into(),
            count: 12,
        },
        LexiconEntry {
            source: "Baum".into(),
            target: "tree".into(),
            count: 7,
        },
        LexiconEntry {
            source: "Stadt".into(),
            target: "city".into(),
            count: 5,
        },
    ])?;
    let ctx = TaskContext {
        s2t: Some(&s2t),
        o2o: Some(&o2o),
        lexicon: Some(&lexicon),
    };

    let tasks = [
        TaskSpec::new(TaskKind::Token).with_alpha(0.4),
        TaskSpec::new(TaskKind::Swap).with_alpha(0.5),
        TaskSpec::new(TaskKind::Replace).with_alpha(0.3),
    ];
    let seed = 42;
    for (task_index, task) in tasks.iter().enumerate() {
        for line in 0..2 {
            let mut rng = line_rng(seed, task_index + 1, line);
            let out = apply_task(task, &pair, &ctx, &mut rng)?;
            println!(
                "{:<8} line {line}: {} ||| {}",
                task.kind,
                out.pair.src_text(),
                out.pair.tgt_text()
            );
        }
    }
    Ok(())
}
