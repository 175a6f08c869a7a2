//! Scores two systems against references with adjusted sentence BLEU,
//! counts hallucinations unique to each and bins system A's scores.
//!
//! Run with `cargo run --example hallucination_audit`.

use auxcorpus::metrics::{score_histogram, write_histogram_tsv, BleuOptions};
use auxcorpus::{adjusted_bleu_text, hallucination_report, HallucinationParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let refs = [
        "the cat sat on the mat",
        "it is raining in the city today",
        "he bought a new car last week",
        "we will meet again tomorrow morning",
    ];
    let sys_a = [
        "the cat sat on the mat",
        "the the the the the the",
        "he bought a new car last week",
        "please note that the committee has adjourned",
    ];
    let sys_b = [
        "a cat sat on a mat",
        "it rains in the city today",
        "she sold an old boat",
        "we meet again tomorrow",
    ];

    let s = adjusted_bleu_text(sys_b[0], refs[0], BleuOptions::default())?;
    println!(
        "example score {:.2} (p1 {:.3}, p2 {:.3}, bp {:.3})\n",
        s.score, s.p1, s.p2_smoothed, s.brevity_penalty
    );

    let report = hallucination_report(&refs, &sys_a, Some(&sys_b), HallucinationParams::default())?;
    report.write_tsv(std::io::stdout().lock())?;
    for (k, v) in report.summary() {
        println!("# {k}\t{v}");
    }

    println!();
    let bins = score_histogram(&report.scores_a, 25.0)?;
    write_histogram_tsv(&bins, std::io::stdout().lock())?;
    Ok(())
}
