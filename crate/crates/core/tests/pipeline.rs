mod common;

use std::fs;
use std::process::Command;

use auxcorpus::{augment_corpus, corpus_stats, AugmentConfig, Error, TaskKind, TaskSpec};
use common::{write_synthetic_corpus, EXAMPLE_S2T, EXAMPLE_SRC, EXAMPLE_TGT};

fn kept_pairs(src: &str, tgt: &str, min: usize, max: usize) -> (Vec<String>, Vec<String>) {
    let ok = |l: &str| (min..=max).contains(&l.split_whitespace().count());
    src.lines()
        .zip(tgt.lines())
        .filter(|(s, t)| ok(s) && ok(t))
        .map(|(s, t)| (format!("{s}\n"), format!("{t}\n")))
        .unzip()
}

#[test]
fn untagged_main_is_filtered_input_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path(), 800, 3);
    let mut c = AugmentConfig::new(
        dir.path().join("src"),
        dir.path().join("tgt"),
        dir.path().join("out"),
    );
    c.tasks = vec![TaskSpec::new(TaskKind::Main).untagged()];
    let m = augment_corpus(&c).unwrap();

    let src = fs::read_to_string(dir.path().join("src")).unwrap();
    let tgt = fs::read_to_string(dir.path().join("tgt")).unwrap();
    let (es, et) = kept_pairs(&src, &tgt, 5, 100);
    let (ps, pt) = c.output_paths("main");
    assert_eq!(fs::read_to_string(ps).unwrap(), es.concat());
    assert_eq!(fs::read_to_string(pt).unwrap(), et.concat());
    assert_eq!(m.kept_lines, es.len());
    assert_eq!(m.input_lines, 800);
    assert!(!m.config.main_tagged);
}

#[test]
fn line_count_mismatch_fails_before_writing() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("src"), "a b c d e\na b c d e\n").unwrap();
    fs::write(dir.path().join("tgt"), "a b c d e\n").unwrap();
    let c = AugmentConfig::new(
        dir.path().join("src"),
        dir.path().join("tgt"),
        dir.path().join("out"),
    );
    let err = augment_corpus(&c).unwrap_err();
    assert!(
        matches!(
            err,
            Error::LineCount {
                got: 1,
                expected: 2,
                ..
            }
        ),
        "{err}"
    );
    assert!(!err.is_config());
    assert!(!c.output_paths("main").0.exists());
    assert!(!c.manifest_path().exists());
}

#[test]
fn empty_task_list_is_config_error() {
    let mut c = AugmentConfig::new("src", "tgt", "out");
    c.tasks.clear();
    let err = augment_corpus(&c).unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains("at least the main task required"));
}

#[test]
fn missing_inputs_are_named_together() {
    let mut c = AugmentConfig::new("src", "tgt", "out");
    c.tasks
        .push(TaskSpec::new(TaskKind::Replace).with_alpha(0.2));
    let msg = augment_corpus(&c).unwrap_err().to_string();
    assert!(
        msg.contains("--lexicon") && msg.contains("--s2t") && msg.contains("--t2s"),
        "{msg}"
    );
}

#[test]
fn worked_example_through_files() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("src"), format!("{EXAMPLE_SRC}\n")).unwrap();
    fs::write(dir.path().join("tgt"), format!("{EXAMPLE_TGT}\n")).unwrap();
    fs::write(dir.path().join("s2t"), format!("{EXAMPLE_S2T}\n")).unwrap();
    let mut c = AugmentConfig::new(
        dir.path().join("src"),
        dir.path().join("tgt"),
        dir.path().join("out"),
    );
    c.s2t = Some(dir.path().join("s2t"));
    c.tasks
        .extend([TaskKind::Reverse, TaskKind::Source, TaskKind::Mono].map(TaskSpec::new));
    c.concatenate = true;
    let m = augment_corpus(&c).unwrap();
    assert_eq!(m.tasks.len(), 4);

    let read = |task: &str| {
        let (s, t) = c.output_paths(task);
        (
            fs::read_to_string(s).unwrap(),
            fs::read_to_string(t).unwrap(),
        )
    };
    assert_eq!(
        read("main"),
        (
            format!("<task:main> {EXAMPLE_SRC}\n"),
            format!("{EXAMPLE_TGT}\n")
        )
    );
    assert_eq!(
        read("reverse").1,
        ". pyramid the breaking of ways other 's There\n"
    );
    assert_eq!(read("source").1, format!("{EXAMPLE_SRC}\n"));
    assert_eq!(
        read("mono").1,
        "'s There other ways the pyramid of breaking .\n"
    );
    assert_eq!(read("reverse").0, format!("<task:reverse> {EXAMPLE_SRC}\n"));

    let (all_src, all_tgt) = c.output_paths("all");
    let all_src = fs::read_to_string(all_src).unwrap();
    let all_tgt = fs::read_to_string(all_tgt).unwrap();
    let tasks = ["main", "reverse", "source", "mono"];
    assert_eq!(all_src, tasks.map(|t| read(t).0).concat());
    assert_eq!(all_tgt, tasks.map(|t| read(t).1).concat());
}

#[test]
fn manifest_is_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path(), 300, 11);
    let run = |prefix: &str| {
        let mut c = AugmentConfig::new(
            dir.path().join("src"),
            dir.path().join("tgt"),
            dir.path().join(prefix),
        );
        c.tasks.push(TaskSpec::new(TaskKind::Token).with_alpha(0.5));
        c.seed = 5;
        augment_corpus(&c).unwrap();
        fs::read_to_string(c.manifest_path()).unwrap()
    };
    let a: serde_json::Value = serde_json::from_str(&run("a")).unwrap();
    let b: serde_json::Value = serde_json::from_str(&run("b")).unwrap();
    for i in 0..2 {
        assert_eq!(
            a["tasks"][i]["src"]["sha256"],
            b["tasks"][i]["src"]["sha256"]
        );
        assert_eq!(
            a["tasks"][i]["tgt"]["sha256"],
            b["tasks"][i]["tgt"]["sha256"]
        );
    }
    assert_eq!(a["tasks"][1]["kind"], "token");
    assert_eq!(a["tasks"][1]["unk"], "UNK");
    assert!(a["config"].get("threads").is_none());
}

#[test]
fn stats_match_wc() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path(), 10_000, 21);
    let paths = [dir.path().join("src"), dir.path().join("tgt")];
    let stats = corpus_stats(&paths).unwrap();
    for (p, s) in paths.iter().zip(&stats) {
        let out = match Command::new("wc").arg("-l").arg("-w").arg(p).output() {
            Ok(o) if o.status.success() => o,
            _ => return,
        };
        let text = String::from_utf8(out.stdout).unwrap();
        let nums: Vec<u64> = text
            .split_whitespace()
            .take(2)
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!((s.sentences, s.tokens), (nums[0], nums[1]));
    }
}

#[test]
fn stats_count_unterminated_last_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("f");
    fs::write(&p, "a b\nc").unwrap();
    let s = &corpus_stats(&[&p]).unwrap()[0];
    assert_eq!((s.sentences, s.tokens), (2, 3));
}
