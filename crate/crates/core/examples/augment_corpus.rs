//! Writes a small aligned corpus to a scratch directory and runs every task
//! over it, then prints the manifest.
//!
//! Run with `cargo run --example augment_corpus`.

use std::fs;

use auxcorpus::pipeline::{build_lexicon_from_files, AlignmentFiles};
use auxcorpus::{augment_corpus, AugmentConfig, TaskKind, TaskSpec};

const SRC: &str = "\
das Haus ist klein und alt .
der Baum im Garten ist sehr groß .
wir gehen morgen in die Stadt .
die Kinder spielen im Garten .
";
const TGT: &str = "\
the house is small and old .
the tree in the garden is very big .
we go to town tomorrow .
the children play in the garden .
";
const S2T: &str = "\
0-0 1-1 2-2 3-3 4-4 5-5 6-6
0-0 1-1 2-2 3-4 4-5 5-6 6-7 7-8
0-0 1-1 2-4 4-2 5-3 6-5
0-0 1-1 2-2 3-3 3-4 4-6
";
// target-source order, as the reverse aligner writes it
const T2S: &str = "\
0-0 1-1 2-2 3-3 4-4 5-5 6-6
0-0 1-1 2-2 3-2 4-3 5-4 6-5 7-6 8-7
0-0 1-1 2-4 3-5 4-2 5-6
0-0 1-1 2-2 3-3 4-3 5-3 6-4
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("auxcorpus-example-{}", std::process::id()));
    fs::create_dir_all(&dir)?;
    for (name, text) in [("src", SRC), ("tgt", TGT), ("s2t", S2T), ("t2s", T2S)] {
        fs::write(dir.join(name), text)?;
    }

    let files = AlignmentFiles {
        s2t: dir.join("s2t"),
        t2s: dir.join("t2s"),
        t2s_reversed: true,
    };
    let (lexicon, _) = build_lexicon_from_files(&dir.join("src"), &dir.join("tgt"), &files)?;
    lexicon.write_tsv(fs::File::create(dir.join("lex.tsv"))?)?;

    let mut config = AugmentConfig::new(dir.join("src"), dir.join("tgt"), dir.join("aug"));
    config.s2t = Some(files.s2t.clone());
    config.t2s = Some(files.t2s.clone());
    config.lexicon = Some(dir.join("lex.tsv"));
    config.seed = 1;
    config.concatenate = true;
    config.tasks.extend([
        TaskSpec::new(TaskKind::Swap).with_alpha(0.3),
        TaskSpec::new(TaskKind::Token).with_alpha(0.3),
        TaskSpec::new(TaskKind::Source),
        TaskSpec::new(TaskKind::Reverse),
        TaskSpec::new(TaskKind::Mono),
        TaskSpec::new(TaskKind::Replace).with_alpha(0.3),
    ]);
    let manifest = augment_corpus(&config)?;
    print!("{}", manifest.to_json());

    let (_, mono_tgt) = config.output_paths("mono");
    println!(
        "\n{}:\n{}",
        mono_tgt.display(),
        fs::read_to_string(&mono_tgt)?
    );
    fs::remove_dir_all(&dir)?;
    Ok(())
}
