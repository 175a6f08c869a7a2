//! Command-line front end. [`run`] returns the process exit status:
//! 0 on success, 1 for configuration errors, 2 for data errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::metrics::{
    hallucination_report, score_histogram, write_histogram_tsv, HallucinationParams,
};
use crate::pipeline::{
    augment_corpus, build_lexicon_from_files, corpus_stats, intersect_files, AlignmentFiles,
    AugmentConfig, DEFAULT_MAX_LEN, DEFAULT_MIN_LEN,
};
use crate::transform::{TaskKind, TaskSpec, DEFAULT_TAG_FORMAT, DEFAULT_UNK};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "AUXCORPUS_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "auxcorpus",
    version,
    about = "Multi-task corpus augmentation and hallucination auditing for NMT"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write one tagged, transformed copy of the corpus per task.
    Augment(AugmentArgs),
    /// Build a bilingual lexicon from intersected alignments.
    Lexicon(LexiconArgs),
    /// Intersect two directional alignment files.
    AlignIntersect(IntersectArgs),
    /// Score outputs with adjusted sentence BLEU and count hallucinations.
    Hallucinate(HallucinateArgs),
    /// Count sentences and tokens per file.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct AlignArgs {
    /// Source-to-target alignments, Pharaoh format.
    #[arg(long)]
    s2t: PathBuf,
    /// Target-to-source alignments, Pharaoh format.
    #[arg(long)]
    t2s: PathBuf,
    /// The --t2s file already lists items as source-target.
    #[arg(long)]
    t2s_normalized: bool,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    /// Comma-separated tasks; main is always included and written first.
    #[arg(long, value_delimiter = ',', default_value = "main")]
    tasks: Vec<TaskKind>,
    /// Per-task alpha, e.g. `--alpha replace=0.2 --alpha token=0.8`.
    #[arg(long = "alpha", value_parser = parse_alpha)]
    alphas: Vec<(TaskKind, f64)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
    #[arg(long)]
    s2t: Option<PathBuf>,
    #[arg(long)]
    t2s: Option<PathBuf>,
    #[arg(long)]
    t2s_normalized: bool,
    #[arg(long)]
    lexicon: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_LEN)]
    min_len: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_LEN)]
    max_len: usize,
    #[arg(long, default_value = DEFAULT_UNK)]
    unk: String,
    /// Tag template; `{kind}` is replaced by the task name.
    #[arg(long, default_value = DEFAULT_TAG_FORMAT)]
    tag_format: String,
    /// Leave the main-task copy untagged.
    #[arg(long)]
    no_main_tag: bool,
    /// Also write `<prefix>.all.{src,tgt}` with every task in order.
    #[arg(long)]
    concat: bool,
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct LexiconArgs {
    #[arg(long)]
    src: PathBuf,
    #[arg(long)]
    tgt: PathBuf,
    #[command(flatten)]
    align: AlignArgs,
    /// Output TSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct IntersectArgs {
    #[command(flatten)]
    align: AlignArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct HallucinateArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    hyp_a: PathBuf,
    #[arg(long)]
    hyp_b: Option<PathBuf>,
    #[arg(long, default_value_t = crate::metrics::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = crate::metrics::DEFAULT_MARGIN)]
    margin: f64,
    /// Score without the brevity penalty.
    #[arg(long)]
    no_brevity_penalty: bool,
    /// Per-sentence TSV; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a normalized histogram of system A scores here.
    #[arg(long)]
    histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 5.0)]
    bin_width: f64,
    #[arg(long, env = THREADS_ENV, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

fn parse_alpha(s: &str) -> std::result::Result<(TaskKind, f64), String> {
    let (task, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected TASK=VALUE, got {s:?}"))?;
    let kind: TaskKind = task.parse()?;
    let alpha: f64 = value
        .parse()
        .map_err(|_| format!("alpha {value:?} is not a number"))?;
    Ok((kind, alpha))
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_DATA
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Augment(a) => augment(a),
        Command::Lexicon(a) => lexicon(a),
        Command::AlignIntersect(a) => align_intersect(a),
        Command::Hallucinate(a) => hallucinate(a),
        Command::Stats(a) => stats(a),
    }
}

fn echo(pairs: &[(&str, String)]) {
    let mut err = io::stderr().lock();
    for (k, v) in pairs {
        let _ = writeln!(err, "# {k} = {v}");
    }
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map_or_else(|| "-".to_string(), |p| p.display().to_string())
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    pool.install(f)
}

fn build_tasks(a: &AugmentArgs) -> Result<Vec<TaskSpec>> {
    let mut kinds = vec![TaskKind::Main];
    for &k in &a.tasks {
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    for (kind, _) in &a.alphas {
        if !kinds.contains(kind) {
            return Err(Error::config(format!(
                "--alpha given for task {kind}, which is not in --tasks"
            )));
        }
    }
    kinds
        .into_iter()
        .map(|kind| {
            let mut t = TaskSpec::new(kind).with_tag(kind.tag(&a.tag_format));
            if let Some((_, alpha)) = a.alphas.iter().rev().find(|(k, _)| *k == kind) {
                t = t.with_alpha(*alpha);
            }
            if kind == TaskKind::Token {
                t = t.with_unk(a.unk.clone());
            }
            if kind == TaskKind::Main && a.no_main_tag {
                t = t.untagged();
            }
            Ok(t)
        })
        .collect()
}

fn augment(a: AugmentArgs) -> Result<()> {
    let tasks = build_tasks(&a)?;
    let config = AugmentConfig {
        src: a.src,
        tgt: a.tgt,
        s2t: a.s2t,
        t2s: a.t2s,
        t2s_reversed: !a.t2s_normalized,
        lexicon: a.lexicon,
        out_prefix: a.out_prefix,
        tasks,
        seed: a.seed,
        min_len: a.min_len,
        max_len: a.max_len,
        concatenate: a.concat,
        threads: a.threads,
    };
    let task_desc: Vec<String> = config
        .tasks
        .iter()
        .map(|t| {
            let mut s = t.kind.to_string();
            if let Some(alpha) = t.alpha {
                s.push_str(&format!("(alpha={alpha})"));
            }
            s.push_str(&format!("[{}]", t.tag.as_deref().unwrap_or("untagged")));
            s
        })
        .collect();
    echo(&[
        ("command", "augment".into()),
        ("src", config.src.display().to_string()),
        ("tgt", config.tgt.display().to_string()),
        ("s2t", opt_path(&config.s2t)),
        ("t2s", opt_path(&config.t2s)),
        ("t2s_reversed", config.t2s_reversed.to_string()),
        ("lexicon", opt_path(&config.lexicon)),
        ("tasks", task_desc.join(",")),
        ("unk", a.unk),
        ("seed", config.seed.to_string()),
        ("min_len", config.min_len.to_string()),
        ("max_len", config.max_len.to_string()),
        ("out_prefix", config.out_prefix.display().to_string()),
        ("concat", config.concatenate.to_string()),
        ("threads", config.threads.to_string()),
    ]);
    config.validate()?;
    let manifest = augment_corpus(&config)?;
    eprintln!(
        "kept {} of {} lines; wrote {} tasks; manifest {}",
        manifest.kept_lines,
        manifest.input_lines,
        manifest.tasks.len(),
        config.manifest_path().display()
    );
    if manifest.warnings.intersection_conflicts > 0 {
        eprintln!(
            "warning: dropped {} conflicting links while intersecting alignments",
            manifest.warnings.intersection_conflicts
        );
    }
    if manifest.warnings.multi_source_targets > 0 {
        eprintln!(
            "warning: {} target words were linked to several source words; mono used the smallest source index",
            manifest.warnings.multi_source_targets
        );
    }
    Ok(())
}

fn alignment_files(a: &AlignArgs) -> AlignmentFiles {
    AlignmentFiles {
        s2t: a.s2t.clone(),
        t2s: a.t2s.clone(),
        t2s_reversed: !a.t2s_normalized,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn lexicon(a: LexiconArgs) -> Result<()> {
    echo(&[
        ("command", "lexicon".into()),
        ("src", a.src.display().to_string()),
        ("tgt", a.tgt.display().to_string()),
        ("s2t", a.align.s2t.display().to_string()),
        ("t2s", a.align.t2s.display().to_string()),
        ("t2s_reversed", (!a.align.t2s_normalized).to_string()),
        ("out", opt_path(&a.out)),
        ("threads", a.threads.to_string()),
    ]);
    let files = alignment_files(&a.align);
    let (lex, stats) = with_pool(a.threads, || {
        build_lexicon_from_files(&a.src, &a.tgt, &files)
    })?;
    let out_name = opt_path(&a.out);
    let mut w = output(&a.out)?;
    lex.write_tsv(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&out_name, e))?;
    eprintln!(
        "{} entries from {} links over {} lines",
        lex.len(),
        stats.links,
        stats.lines
    );
    if stats.conflicts > 0 {
        eprintln!(
            "warning: dropped {} conflicting links while intersecting",
            stats.conflicts
        );
    }
    Ok(())
}

fn align_intersect(a: IntersectArgs) -> Result<()> {
    echo(&[
        ("command", "align-intersect".into()),
        ("s2t", a.align.s2t.display().to_string()),
        ("t2s", a.align.t2s.display().to_string()),
        ("t2s_reversed", (!a.align.t2s_normalized).to_string()),
        ("out", opt_path(&a.out)),
        ("threads", a.threads.to_string()),
    ]);
    let files = alignment_files(&a.align);
    let out = output(&a.out)?;
    let stats = with_pool(a.threads, move || intersect_files(&files, out))?;
    eprintln!("{} lines, {} links kept", stats.lines, stats.links);
    if stats.conflicts > 0 {
        eprintln!("warning: dropped {} conflicting links", stats.conflicts);
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(f)
        .lines()
        .collect::<io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

fn hallucinate(a: HallucinateArgs) -> Result<()> {
    echo(&[
        ("command", "hallucinate".into()),
        ("ref", a.reference.display().to_string()),
        ("hyp_a", a.hyp_a.display().to_string()),
        ("hyp_b", opt_path(&a.hyp_b)),
        ("threshold", a.threshold.to_string()),
        ("margin", a.margin.to_string()),
        ("brevity_penalty", (!a.no_brevity_penalty).to_string()),
        ("lowercase", "true".into()),
        ("out", opt_path(&a.out)),
        ("histogram", opt_path(&a.histogram)),
        ("bin_width", a.bin_width.to_string()),
        ("threads", a.threads.to_string()),
    ]);
    if a.bin_width.is_nan() || a.bin_width <= 0.0 {
        return Err(Error::config(format!(
            "--bin-width must be positive, got {}",
            a.bin_width
        )));
    }
    if !a.threshold.is_finite() || !a.margin.is_finite() {
        return Err(Error::config("--threshold and --margin must be finite"));
    }
    let refs = read_lines(&a.reference)?;
    let sys_a = read_lines(&a.hyp_a)?;
    let sys_b = a.hyp_b.as_deref().map(read_lines).transpose()?;
    let params = HallucinationParams {
        threshold: a.threshold,
        margin: a.margin,
        brevity_penalty: !a.no_brevity_penalty,
    };
    let report = with_pool(a.threads, || {
        hallucination_report(&refs, &sys_a, sys_b.as_deref(), params).map_err(Error::from)
    })?;

    let out_name = opt_path(&a.out);
    let mut w = output(&a.out)?;
    report
        .write_tsv(&mut w)
        .map_err(|e| Error::io(&out_name, e))?;
    let summary: Vec<String> = report
        .summary()
        .iter()
        .map(|(k, v)| format!("# {k}\t{v}"))
        .collect();
    if a.out.is_some() {
        w.flush().map_err(|e| Error::io(&out_name, e))?;
        let mut stdout = io::stdout().lock();
        for line in &summary {
            writeln!(stdout, "{line}").map_err(|e| Error::io("<stdout>", e))?;
        }
    } else {
        for line in &summary {
            writeln!(w, "{line}").map_err(|e| Error::io("<stdout>", e))?;
        }
        w.flush().map_err(|e| Error::io("<stdout>", e))?;
    }

    if let Some(path) = &a.histogram {
        if !report.is_empty() {
            let bins = score_histogram(&report.scores_a, a.bin_width)?;
            let mut hw = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
            write_histogram_tsv(&bins, &mut hw)
                .and_then(|_| hw.flush())
                .map_err(|e| Error::io(path, e))?;
        }
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    echo(&[(
        "command",
        format!(
            "stats {}",
            a.files
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ),
    )]);
    let stats = corpus_stats(&a.files)?;
    let mut out = io::stdout().lock();
    for s in stats {
        writeln!(out, "{}\t{}\t{}", s.path, s.sentences, s.tokens)
            .map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}
