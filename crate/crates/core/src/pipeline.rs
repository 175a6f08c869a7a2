//! Streaming corpus augmentation.
//!
//! Inputs are read in fixed-size chunks. Within a chunk, lines are processed
//! in parallel and written back in input order. Each (task, line) gets its own
//! generator derived from the global seed, so outputs do not depend on the
//! number of worker threads.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::align::{
    intersect, parse_alignment_line, BilingualLexicon, LexiconCounts, OneToOneAlignment,
    WordAlignment,
};
use crate::error::{Error, Result};
use crate::transform::{apply_task, SentencePair, TaskContext, TaskKind, TaskSpec};

pub const DEFAULT_MIN_LEN: usize = 5;
pub const DEFAULT_MAX_LEN: usize = 100;

const CHUNK_LINES: usize = 8192;

/// Generator used for every random draw of one task on one line.
pub type TaskRng = ChaCha8Rng;

/// Derives the generator for `(seed, task, line)`.
///
/// The seed keys a ChaCha8 stream cipher; the task index selects the top 16
/// bits of the stream id and the line index the low 48 bits, so every triple
/// maps to its own independent stream.
pub fn line_rng(seed: u64, task_index: usize, line_index: u64) -> TaskRng {
    debug_assert!(task_index < 1 << 16 && line_index < 1 << 48);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((task_index as u64) << 48) | (line_index & ((1 << 48) - 1)));
    rng
}

/// True iff both sides have between `min_len` and `max_len` tokens inclusive.
pub fn filter_pair(pair: &SentencePair, min_len: usize, max_len: usize) -> bool {
    let ok = |n: usize| (min_len..=max_len).contains(&n);
    ok(pair.src.len()) && ok(pair.tgt.len())
}

#[derive(Clone, Debug)]
pub struct AugmentConfig {
    pub src: PathBuf,
    pub tgt: PathBuf,
    /// Source→target Pharaoh alignments (mono, replace).
    pub s2t: Option<PathBuf>,
    /// Target→source alignments (replace).
    pub t2s: Option<PathBuf>,
    /// Whether `t2s` lists items as `tgt-src`, the aligner's native order for
    /// that direction.
    pub t2s_reversed: bool,
    /// Lexicon TSV (replace).
    pub lexicon: Option<PathBuf>,
    /// Outputs go to `<out_prefix>.<task>.{src,tgt}` and `<out_prefix>.manifest`.
    pub out_prefix: PathBuf,
    /// Main task first.
    pub tasks: Vec<TaskSpec>,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
    /// Also write `<out_prefix>.all.{src,tgt}`, tasks in order.
    pub concatenate: bool,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
}

impl AugmentConfig {
    pub fn new(
        src: impl Into<PathBuf>,
        tgt: impl Into<PathBuf>,
        out_prefix: impl Into<PathBuf>,
    ) -> Self {
        AugmentConfig {
            src: src.into(),
            tgt: tgt.into(),
            s2t: None,
            t2s: None,
            t2s_reversed: true,
            lexicon: None,
            out_prefix: out_prefix.into(),
            tasks: vec![TaskSpec::new(TaskKind::Main)],
            seed: 0,
            min_len: DEFAULT_MIN_LEN,
            max_len: DEFAULT_MAX_LEN,
            concatenate: false,
            threads: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.tasks.first() {
            None => return Err(Error::config("at least the main task required")),
            Some(t) if t.kind != TaskKind::Main => {
                return Err(Error::config(
                    "at least the main task required, listed first",
                ))
            }
            _ => {}
        }
        for (i, task) in self.tasks.iter().enumerate() {
            task.validate().map_err(Error::Config)?;
            for other in &self.tasks[..i] {
                if other.kind == task.kind {
                    return Err(Error::config(format!("task {} listed twice", task.kind)));
                }
                if task.tag.is_some() && other.tag == task.tag {
                    return Err(Error::config(format!(
                        "tasks {} and {} share the tag {}",
                        other.kind,
                        task.kind,
                        task.tag.as_deref().unwrap_or_default()
                    )));
                }
            }
        }
        if self.min_len > self.max_len {
            return Err(Error::config(format!(
                "min length {} exceeds max length {}",
                self.min_len, self.max_len
            )));
        }
        for task in &self.tasks {
            let mut missing = Vec::new();
            if task.kind.needs_intersection() && self.lexicon.is_none() {
                missing.push("a lexicon file (--lexicon)");
            }
            if (task.kind.needs_s2t() || task.kind.needs_intersection()) && self.s2t.is_none() {
                missing.push("a source-to-target alignment file (--s2t)");
            }
            if task.kind.needs_intersection() && self.t2s.is_none() {
                missing.push("a target-to-source alignment file (--t2s)");
            }
            if !missing.is_empty() {
                return Err(Error::config(format!(
                    "task {} requires {}",
                    task.kind,
                    missing.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn needs_s2t(&self) -> bool {
        self.tasks
            .iter()
            .any(|t| t.kind.needs_s2t() || t.kind.needs_intersection())
    }

    fn needs_intersection(&self) -> bool {
        self.tasks.iter().any(|t| t.kind.needs_intersection())
    }

    pub fn output_paths(&self, name: &str) -> (PathBuf, PathBuf) {
        (
            self.output_path(&format!("{name}.src")),
            self.output_path(&format!("{name}.tgt")),
        )
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.output_path("manifest")
    }

    fn output_path(&self, suffix: &str) -> PathBuf {
        let mut s = self.out_prefix.clone().into_os_string();
        s.push(".");
        s.push(suffix);
        PathBuf::from(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskManifest {
    #[serde(flatten)]
    pub spec: TaskSpec,
    pub lines: usize,
    pub src_tokens: u64,
    pub tgt_tokens: u64,
    pub src: FileDigest,
    pub tgt: FileDigest,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Warnings {
    /// Links dropped while intersecting to restore one-to-one.
    pub intersection_conflicts: u64,
    /// Target positions linked to several source words seen by mono.
    pub multi_source_targets: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub src: String,
    pub tgt: String,
    pub s2t: Option<String>,
    pub t2s: Option<String>,
    pub t2s_reversed: bool,
    pub lexicon: Option<String>,
    pub seed: u64,
    pub min_len: usize,
    pub max_len: usize,
    pub concatenate: bool,
    /// Whether the main-task copy carries its tag.
    pub main_tagged: bool,
}

/// Summary written next to the outputs. Field order is fixed, so two runs
/// with the same configuration produce identical manifests.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub input_lines: usize,
    pub kept_lines: usize,
    pub tasks: Vec<TaskManifest>,
    pub concatenated: Option<[FileDigest; 2]>,
    pub warnings: Warnings,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

/// Counts lines the way [`BufRead::lines`] does: a trailing segment without
/// a newline is a line, an empty file has none.
pub fn count_lines(path: &Path) -> Result<usize> {
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = vec![0u8; 1 << 16];
    let mut lines = 0;
    let mut last = b'\n';
    loop {
        let n = f.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        lines += buf[..n].iter().filter(|&&b| b == b'\n').count();
        last = buf[n - 1];
    }
    Ok(lines + usize::from(last != b'\n'))
}

struct LineSource {
    path: PathBuf,
    reader: BufReader<File>,
}

impl LineSource {
    fn open(path: &Path) -> Result<Self> {
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        Ok(LineSource {
            path: path.to_path_buf(),
            reader: BufReader::with_capacity(1 << 16, f),
        })
    }

    fn next_chunk(&mut self, max: usize) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(max.min(1024));
        for _ in 0..max {
            let mut line = String::new();
            let n = self
                .reader
                .read_line(&mut line)
                .map_err(|e| Error::io(&self.path, e))?;
            if n == 0 {
                break;
            }
            if line.ends_with('\n') {
                line.pop();
                if line.ends_with('\r') {
                    line.pop();
                }
            }
            out.push(line);
        }
        Ok(out)
    }
}

/// `Write` adapter that hashes everything passing through it.
struct HashingWriter<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> HashingWriter<W> {
    fn new(inner: W) -> Self {
        HashingWriter {
            inner,
            hasher: Sha256::new(),
        }
    }

    fn finish(mut self) -> io::Result<String> {
        self.inner.flush()?;
        Ok(hex(&self.hasher.finalize()))
    }
}

impl<W: Write> Write for HashingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write as _;
    bytes
        .iter()
        .fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

type OutputWriter = HashingWriter<BufWriter<File>>;

fn create_output(path: &Path) -> Result<OutputWriter> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(HashingWriter::new(BufWriter::with_capacity(1 << 16, f)))
}

struct LineResult {
    outputs: Vec<(String, String)>,
    src_tokens: Vec<usize>,
    tgt_tokens: Vec<usize>,
    conflicts: usize,
    multi_source: usize,
}

struct Job<'a> {
    config: &'a AugmentConfig,
    lexicon: Option<&'a BilingualLexicon>,
}

impl Job<'_> {
    fn process(
        &self,
        line_index: usize,
        src: &str,
        tgt: &str,
        s2t: Option<&str>,
        t2s: Option<&str>,
    ) -> Result<Option<LineResult>> {
        let cfg = self.config;
        let pair = SentencePair::from_text(src, tgt);
        if !filter_pair(&pair, cfg.min_len, cfg.max_len) {
            return Ok(None);
        }
        let line_no = line_index + 1;
        let align_err = |path: &Option<PathBuf>, source| Error::Align {
            path: path.clone().unwrap_or_default(),
            source,
        };
        let s2t = s2t
            .map(|l| {
                let a =
                    parse_alignment_line(l, line_no, false).map_err(|e| align_err(&cfg.s2t, e))?;
                a.check_bounds(pair.src.len(), pair.tgt.len(), line_no)
                    .map_err(|e| align_err(&cfg.s2t, e))?;
                Ok::<_, Error>(a)
            })
            .transpose()?;
        let mut conflicts = 0;
        let o2o: Option<OneToOneAlignment> = match (&s2t, t2s) {
            (Some(s2t), Some(l)) => {
                let t2s = parse_alignment_line(l, line_no, cfg.t2s_reversed)
                    .map_err(|e| align_err(&cfg.t2s, e))?;
                t2s.check_bounds(pair.src.len(), pair.tgt.len(), line_no)
                    .map_err(|e| align_err(&cfg.t2s, e))?;
                let inter = intersect(s2t, &t2s);
                conflicts = inter.conflicts;
                Some(inter.alignment)
            }
            _ => None,
        };
        let ctx = TaskContext {
            s2t: s2t.as_ref(),
            o2o: o2o.as_ref(),
            lexicon: self.lexicon,
        };
        let n = cfg.tasks.len();
        let mut res = LineResult {
            outputs: Vec::with_capacity(n),
            src_tokens: Vec::with_capacity(n),
            tgt_tokens: Vec::with_capacity(n),
            conflicts,
            multi_source: 0,
        };
        for (k, task) in cfg.tasks.iter().enumerate() {
            if task.kind == TaskKind::Main && task.tag.is_none() {
                // untagged main copy reproduces the input byte for byte
                res.outputs.push((src.to_string(), tgt.to_string()));
                res.src_tokens.push(pair.src.len());
                res.tgt_tokens.push(pair.tgt.len());
                continue;
            }
            let mut rng = line_rng(cfg.seed, k, line_index as u64);
            let out =
                apply_task(task, &pair, &ctx, &mut rng).map_err(|source| Error::Transform {
                    line: line_no,
                    source,
                })?;
            res.multi_source += out.multi_source;
            res.src_tokens.push(out.pair.src.len());
            res.tgt_tokens.push(out.pair.tgt.len());
            res.outputs.push((out.pair.src_text(), out.pair.tgt_text()));
        }
        Ok(Some(res))
    }
}

fn load_lexicon(path: &Path) -> Result<BilingualLexicon> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let lex = BilingualLexicon::read_tsv(BufReader::new(f))
        .map_err(|e| Error::io(path, e))?
        .map_err(|source| Error::Align {
            path: path.to_path_buf(),
            source,
        })?;
    if lex.is_empty() {
        return Err(Error::config(format!(
            "lexicon {} is empty",
            path.display()
        )));
    }
    Ok(lex)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))
}

fn check_line_counts(inputs: &[&Path]) -> Result<usize> {
    let expected = count_lines(inputs[0])?;
    for path in &inputs[1..] {
        let got = count_lines(path)?;
        if got != expected {
            return Err(Error::LineCount {
                path: path.to_path_buf(),
                got,
                expected,
            });
        }
    }
    Ok(expected)
}

/// Filters the corpus, applies every task to every surviving pair and writes
/// one file pair per task plus a manifest.
pub fn augment_corpus(config: &AugmentConfig) -> Result<Manifest> {
    config.validate()?;
    let s2t_path = config.s2t.as_deref().filter(|_| config.needs_s2t());
    let t2s_path = config
        .t2s
        .as_deref()
        .filter(|_| config.needs_intersection());
    let mut inputs = vec![config.src.as_path(), config.tgt.as_path()];
    inputs.extend(s2t_path);
    inputs.extend(t2s_path);
    let input_lines = check_line_counts(&inputs)?;
    let lexicon = match config
        .lexicon
        .as_deref()
        .filter(|_| config.needs_intersection())
    {
        Some(p) => Some(load_lexicon(p)?),
        None => None,
    };

    let mut src_in = LineSource::open(&config.src)?;
    let mut tgt_in = LineSource::open(&config.tgt)?;
    let mut s2t_in = s2t_path.map(LineSource::open).transpose()?;
    let mut t2s_in = t2s_path.map(LineSource::open).transpose()?;

    let mut writers = Vec::with_capacity(config.tasks.len());
    for task in &config.tasks {
        let (s, t) = config.output_paths(task.kind.name());
        writers.push((create_output(&s)?, create_output(&t)?));
    }

    let pool = thread_pool(config.threads)?;
    let job = Job {
        config,
        lexicon: lexicon.as_ref(),
    };
    let n_tasks = config.tasks.len();
    let mut kept = 0usize;
    let mut src_tokens = vec![0u64; n_tasks];
    let mut tgt_tokens = vec![0u64; n_tasks];
    let mut warnings = Warnings::default();
    let mut offset = 0usize;
    loop {
        let src = src_in.next_chunk(CHUNK_LINES)?;
        if src.is_empty() {
            break;
        }
        let tgt = tgt_in.next_chunk(CHUNK_LINES)?;
        let s2t = s2t_in
            .as_mut()
            .map(|r| r.next_chunk(CHUNK_LINES))
            .transpose()?;
        let t2s = t2s_in
            .as_mut()
            .map(|r| r.next_chunk(CHUNK_LINES))
            .transpose()?;
        let results: Vec<Result<Option<LineResult>>> = pool.install(|| {
            (0..src.len())
                .into_par_iter()
                .map(|i| {
                    job.process(
                        offset + i,
                        &src[i],
                        &tgt[i],
                        s2t.as_ref().map(|v| v[i].as_str()),
                        t2s.as_ref().map(|v| v[i].as_str()),
                    )
                })
                .collect()
        });
        for r in results {
            let Some(r) = r? else { continue };
            kept += 1;
            warnings.intersection_conflicts += r.conflicts as u64;
            warnings.multi_source_targets += r.multi_source as u64;
            for (k, (s, t)) in r.outputs.iter().enumerate() {
                let (ws, wt) = &mut writers[k];
                let (ps, pt) = config.output_paths(config.tasks[k].kind.name());
                writeln!(ws, "{s}").map_err(|e| Error::io(&ps, e))?;
                writeln!(wt, "{t}").map_err(|e| Error::io(&pt, e))?;
                src_tokens[k] += r.src_tokens[k] as u64;
                tgt_tokens[k] += r.tgt_tokens[k] as u64;
            }
        }
        offset += src.len();
    }

    let mut tasks = Vec::with_capacity(n_tasks);
    for (k, (ws, wt)) in writers.into_iter().enumerate() {
        let spec = config.tasks[k].clone();
        let (ps, pt) = config.output_paths(spec.kind.name());
        let src_digest = ws.finish().map_err(|e| Error::io(&ps, e))?;
        let tgt_digest = wt.finish().map_err(|e| Error::io(&pt, e))?;
        tasks.push(TaskManifest {
            spec,
            lines: kept,
            src_tokens: src_tokens[k],
            tgt_tokens: tgt_tokens[k],
            src: FileDigest {
                path: display(&ps),
                sha256: src_digest,
            },
            tgt: FileDigest {
                path: display(&pt),
                sha256: tgt_digest,
            },
        });
    }

    let concatenated = if config.concatenate {
        Some(concatenate_outputs(config)?)
    } else {
        None
    };

    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            src: display(&config.src),
            tgt: display(&config.tgt),
            s2t: s2t_path.map(display),
            t2s: t2s_path.map(display),
            t2s_reversed: config.t2s_reversed,
            lexicon: config
                .lexicon
                .as_deref()
                .filter(|_| config.needs_intersection())
                .map(display),
            seed: config.seed,
            min_len: config.min_len,
            max_len: config.max_len,
            concatenate: config.concatenate,
            main_tagged: config.tasks[0].tag.is_some(),
        },
        input_lines,
        kept_lines: kept,
        tasks,
        concatenated,
        warnings,
    };
    let path = config.manifest_path();
    fs::write(&path, manifest.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn concatenate_outputs(config: &AugmentConfig) -> Result<[FileDigest; 2]> {
    let (all_src, all_tgt) = config.output_paths("all");
    let mut digests = Vec::with_capacity(2);
    for (side, out_path) in [(0, all_src), (1, all_tgt)] {
        let mut w = create_output(&out_path)?;
        for task in &config.tasks {
            let (s, t) = config.output_paths(task.kind.name());
            let part = if side == 0 { s } else { t };
            let mut f = File::open(&part).map_err(|e| Error::io(&part, e))?;
            io::copy(&mut f, &mut w).map_err(|e| Error::io(&out_path, e))?;
        }
        let sha256 = w.finish().map_err(|e| Error::io(&out_path, e))?;
        digests.push(FileDigest {
            path: display(&out_path),
            sha256,
        });
    }
    let tgt = digests.pop().expect("two digests");
    let src = digests.pop().expect("two digests");
    Ok([src, tgt])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileStats {
    pub path: String,
    pub sentences: u64,
    pub tokens: u64,
}

/// Line and whitespace-token counts for each file.
pub fn corpus_stats<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<FileStats>> {
    paths
        .iter()
        .map(|p| {
            let path = p.as_ref();
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            let mut reader = BufReader::with_capacity(1 << 16, f);
            let mut buf = Vec::new();
            let (mut sentences, mut tokens) = (0u64, 0u64);
            loop {
                buf.clear();
                let n = reader
                    .read_until(b'\n', &mut buf)
                    .map_err(|e| Error::io(path, e))?;
                if n == 0 {
                    break;
                }
                sentences += 1;
                let text = std::str::from_utf8(&buf)
                    .map_err(|e| Error::io(path, io::Error::new(io::ErrorKind::InvalidData, e)))?;
                tokens += text.split_whitespace().count() as u64;
            }
            Ok(FileStats {
                path: display(path),
                sentences,
                tokens,
            })
        })
        .collect()
}

/// Inputs for building a lexicon or intersected alignments from files.
#[derive(Clone, Debug)]
pub struct AlignmentFiles {
    pub s2t: PathBuf,
    pub t2s: PathBuf,
    pub t2s_reversed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntersectStats {
    pub lines: usize,
    pub links: u64,
    pub conflicts: u64,
}

/// Writes the one-to-one intersection of each line pair in Pharaoh format.
pub fn intersect_files<W: Write>(files: &AlignmentFiles, mut out: W) -> Result<IntersectStats> {
    let lines = check_line_counts(&[&files.s2t, &files.t2s])?;
    let mut s2t_in = LineSource::open(&files.s2t)?;
    let mut t2s_in = LineSource::open(&files.t2s)?;
    let mut stats = IntersectStats {
        lines,
        ..Default::default()
    };
    let mut offset = 0;
    loop {
        let a = s2t_in.next_chunk(CHUNK_LINES)?;
        if a.is_empty() {
            break;
        }
        let b = t2s_in.next_chunk(CHUNK_LINES)?;
        let chunk: Vec<Result<(OneToOneAlignment, usize)>> = (0..a.len())
            .into_par_iter()
            .map(|i| parse_and_intersect(files, offset + i + 1, &a[i], &b[i]))
            .collect();
        for r in chunk {
            let (o2o, conflicts) = r?;
            stats.links += o2o.len() as u64;
            stats.conflicts += conflicts as u64;
            writeln!(out, "{o2o}").map_err(|e| Error::io("<output>", e))?;
        }
        offset += a.len();
    }
    out.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(stats)
}

fn parse_and_intersect(
    files: &AlignmentFiles,
    line_no: usize,
    a: &str,
    b: &str,
) -> Result<(OneToOneAlignment, usize)> {
    let s2t = parse_alignment_line(a, line_no, false).map_err(|source| Error::Align {
        path: files.s2t.clone(),
        source,
    })?;
    let t2s =
        parse_alignment_line(b, line_no, files.t2s_reversed).map_err(|source| Error::Align {
            path: files.t2s.clone(),
            source,
        })?;
    let r = intersect(&s2t, &t2s);
    Ok((r.alignment, r.conflicts))
}

/// Builds the lexicon from a corpus and its two directional alignments.
/// Partial counts per chunk are merged, so the result does not depend on
/// chunking or thread count.
pub fn build_lexicon_from_files(
    src: &Path,
    tgt: &Path,
    files: &AlignmentFiles,
) -> Result<(BilingualLexicon, IntersectStats)> {
    let lines = check_line_counts(&[src, tgt, &files.s2t, &files.t2s])?;
    let mut src_in = LineSource::open(src)?;
    let mut tgt_in = LineSource::open(tgt)?;
    let mut s2t_in = LineSource::open(&files.s2t)?;
    let mut t2s_in = LineSource::open(&files.t2s)?;
    let mut counts = LexiconCounts::new();
    let mut stats = IntersectStats {
        lines,
        ..Default::default()
    };
    let mut offset = 0;
    loop {
        let s = src_in.next_chunk(CHUNK_LINES)?;
        if s.is_empty() {
            break;
        }
        let t = tgt_in.next_chunk(CHUNK_LINES)?;
        let a = s2t_in.next_chunk(CHUNK_LINES)?;
        let b = t2s_in.next_chunk(CHUNK_LINES)?;
        let partial = (0..s.len())
            .into_par_iter()
            .try_fold(
                || (LexiconCounts::new(), 0u64, 0u64),
                |(mut acc, links, conflicts), i| {
                    let line_no = offset + i + 1;
                    let (o2o, c) = parse_and_intersect(files, line_no, &a[i], &b[i])?;
                    let pair = SentencePair::from_text(&s[i], &t[i]);
                    acc.add(&pair, &o2o, line_no)
                        .map_err(|source| Error::Align {
                            path: files.s2t.clone(),
                            source,
                        })?;
                    Ok::<_, Error>((acc, links + o2o.len() as u64, conflicts + c as u64))
                },
            )
            .try_reduce(
                || (LexiconCounts::new(), 0, 0),
                |x, y| Ok((x.0.merge(y.0), x.1 + y.1, x.2 + y.2)),
            )?;
        counts = counts.merge(partial.0);
        stats.links += partial.1;
        stats.conflicts += partial.2;
        offset += s.len();
    }
    Ok((counts.into_lexicon(), stats))
}

/// Collects alignment lines for callers that want them in memory.
pub fn read_alignments(path: &Path, reversed: bool) -> Result<Vec<WordAlignment>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(f)
        .lines()
        .enumerate()
        .map(|(n, line)| {
            let line = line.map_err(|e| Error::io(path, e))?;
            parse_alignment_line(&line, n + 1, reversed).map_err(|source| Error::Align {
                path: path.to_path_buf(),
                source,
            })
        })
        .collect()
}
