//! Target-side transformations that turn a sentence pair into an auxiliary
//! task sample, and the tag dispatch that marks which task a sample belongs to.
//!
//! Every function here is pure: randomness comes only from the generator
//! passed in, so the same pair, task and generator state always give the
//! same output.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::align::{BilingualLexicon, OneToOneAlignment, WordAlignment};
use crate::error::TransformError;

/// Tag template used when a task does not specify its own tag.
pub const DEFAULT_TAG_FORMAT: &str = "<task:{kind}>";

/// Placeholder written by `token` masking unless configured otherwise.
pub const DEFAULT_UNK: &str = "UNK";

/// Consecutive draws of two equal words tolerated per swap before the swap
/// is accepted anyway.
const MAX_SWAP_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SentencePair {
    pub src: Vec<String>,
    pub tgt: Vec<String>,
}

impl SentencePair {
    pub fn new(src: Vec<String>, tgt: Vec<String>) -> Self {
        SentencePair { src, tgt }
    }

    /// Splits both sides on whitespace.
    pub fn from_text(src: &str, tgt: &str) -> Self {
        SentencePair {
            src: tokens(src),
            tgt: tokens(tgt),
        }
    }

    pub fn src_text(&self) -> String {
        self.src.join(" ")
    }

    pub fn tgt_text(&self) -> String {
        self.tgt.join(" ")
    }
}

fn tokens(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Main,
    Swap,
    Token,
    Source,
    Reverse,
    Mono,
    Replace,
}

impl TaskKind {
    pub const ALL: [TaskKind; 7] = [
        TaskKind::Main,
        TaskKind::Swap,
        TaskKind::Token,
        TaskKind::Source,
        TaskKind::Reverse,
        TaskKind::Mono,
        TaskKind::Replace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Main => "main",
            TaskKind::Swap => "swap",
            TaskKind::Token => "token",
            TaskKind::Source => "source",
            TaskKind::Reverse => "reverse",
            TaskKind::Mono => "mono",
            TaskKind::Replace => "replace",
        }
    }

    pub fn takes_alpha(self) -> bool {
        matches!(self, TaskKind::Swap | TaskKind::Token | TaskKind::Replace)
    }

    pub fn needs_s2t(self) -> bool {
        self == TaskKind::Mono
    }

    /// Replace works on the intersection of both directions plus a lexicon.
    pub fn needs_intersection(self) -> bool {
        self == TaskKind::Replace
    }

    pub fn tag(self, format: &str) -> String {
        format.replace("{kind}", self.name())
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = TaskKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown task {s:?} (expected one of {})", names.join(", "))
            })
    }
}

/// One task of an augmentation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// Fraction of target words affected; only swap, token and replace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Mask symbol for `token`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unk: Option<String>,
    /// Token prepended to the source side; `None` leaves the source untagged.
    pub tag: Option<String>,
}

impl TaskSpec {
    /// A task with the default tag and no alpha.
    pub fn new(kind: TaskKind) -> Self {
        TaskSpec {
            kind,
            alpha: None,
            unk: (kind == TaskKind::Token).then(|| DEFAULT_UNK.to_string()),
            tag: Some(kind.tag(DEFAULT_TAG_FORMAT)),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }

    pub fn with_unk(mut self, unk: impl Into<String>) -> Self {
        self.unk = Some(unk.into());
        self
    }

    pub fn untagged(mut self) -> Self {
        self.tag = None;
        self
    }

    pub fn validate(&self) -> Result<(), String> {
        match (self.kind.takes_alpha(), self.alpha) {
            (true, None) => return Err(format!("task {} needs an alpha value", self.kind)),
            (false, Some(_)) => {
                return Err(format!("task {} does not take an alpha value", self.kind))
            }
            (true, Some(a)) if !(0.0..=1.0).contains(&a) => {
                return Err(format!(
                    "alpha for {} must lie in [0, 1], got {a}",
                    self.kind
                ))
            }
            _ => {}
        }
        if self.kind == TaskKind::Token {
            match &self.unk {
                Some(u) if is_single_token(u) => {}
                Some(u) => {
                    return Err(format!("unk symbol {u:?} must be a single non-empty token"))
                }
                None => return Err("task token needs an unk symbol".to_string()),
            }
        }
        if let Some(tag) = &self.tag {
            if !is_single_token(tag) {
                return Err(format!("tag {tag:?} must be a single non-empty token"));
            }
        }
        Ok(())
    }

    fn alpha_or_zero(&self) -> f64 {
        self.alpha.unwrap_or(0.0)
    }
}

fn is_single_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

/// `floor(alpha * t)`, robust to products like `0.29 * 100 = 28.999…`.
pub fn affected_count(alpha: f64, t: usize) -> usize {
    let k = (alpha * t as f64 + 1e-9).floor();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(t)
    }
}

pub fn reverse(pair: &SentencePair) -> SentencePair {
    SentencePair {
        src: pair.src.clone(),
        tgt: pair.tgt.iter().rev().cloned().collect(),
    }
}

pub fn copy_source(pair: &SentencePair) -> SentencePair {
    SentencePair {
        src: pair.src.clone(),
        tgt: pair.src.clone(),
    }
}

/// Replaces `floor(alpha * t)` distinct target positions with `unk`.
pub fn token_mask<R: Rng + ?Sized>(
    pair: &SentencePair,
    alpha: f64,
    unk: &str,
    rng: &mut R,
) -> SentencePair {
    let t = pair.tgt.len();
    let mut tgt = pair.tgt.clone();
    for i in index::sample(rng, t, affected_count(alpha, t)) {
        tgt[i] = unk.to_string();
    }
    SentencePair {
        src: pair.src.clone(),
        tgt,
    }
}

/// Swaps pairs of target words that are still in their original position
/// until `2 * floor(floor(alpha * t) / 2)` positions have been displaced.
pub fn swap<R: Rng + ?Sized>(pair: &SentencePair, alpha: f64, rng: &mut R) -> SentencePair {
    let t = pair.tgt.len();
    let swaps = affected_count(alpha, t) / 2;
    let mut tgt = pair.tgt.clone();
    let mut in_place: Vec<usize> = (0..t).collect();
    for _ in 0..swaps {
        if in_place.len() < 2 {
            break;
        }
        let mut attempts = 0;
        loop {
            attempts += 1;
            let picked = index::sample(rng, in_place.len(), 2);
            let (a, b) = (picked.index(0), picked.index(1));
            let (i, j) = (in_place[a], in_place[b]);
            if tgt[i] != tgt[j] {
                tgt.swap(i, j);
                in_place.remove(a.max(b));
                in_place.remove(a.min(b));
                break;
            }
            // equal words stay "in place" after swapping, so there is nothing to do
            if attempts >= MAX_SWAP_ATTEMPTS {
                break;
            }
        }
    }
    SentencePair {
        src: pair.src.clone(),
        tgt,
    }
}

/// Reorders target words so they follow the order of their aligned source
/// words.
///
/// Each target position is keyed by its linked source index. Unaligned
/// positions inherit the key of the closest aligned position to their left
/// (or -1 at the start). The sort is stable. Returns the reordered pair and
/// the number of target positions linked to more than one source word, for
/// which the smallest source index was used.
pub fn monotone_reorder(
    pair: &SentencePair,
    s2t: &WordAlignment,
) -> Result<(SentencePair, usize), TransformError> {
    let t = pair.tgt.len();
    let mut linked: Vec<Option<usize>> = vec![None; t];
    let mut multi = vec![false; t];
    for l in s2t.links() {
        if l.src >= pair.src.len() || l.tgt >= t {
            return Err(TransformError::OutOfBounds {
                src: l.src,
                tgt: l.tgt,
                src_len: pair.src.len(),
                tgt_len: t,
            });
        }
        match &mut linked[l.tgt] {
            Some(s) => {
                multi[l.tgt] = true;
                *s = (*s).min(l.src);
            }
            slot => *slot = Some(l.src),
        }
    }
    let mut carry: i64 = -1;
    let keys: Vec<i64> = linked
        .iter()
        .map(|k| {
            if let Some(s) = k {
                carry = *s as i64;
            }
            carry
        })
        .collect();
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by_key(|&i| keys[i]);
    let tgt = order.into_iter().map(|i| pair.tgt[i].clone()).collect();
    let warnings = multi.iter().filter(|&&m| m).count();
    Ok((
        SentencePair {
            src: pair.src.clone(),
            tgt,
        },
        warnings,
    ))
}

/// Picks `min(floor(alpha * t), |o2o|)` one-to-one links and overwrites both
/// ends with a uniformly drawn lexicon entry.
pub fn replace_aligned<R: Rng + ?Sized>(
    pair: &SentencePair,
    alpha: f64,
    o2o: &OneToOneAlignment,
    lexicon: &BilingualLexicon,
    rng: &mut R,
) -> Result<SentencePair, TransformError> {
    if lexicon.is_empty() {
        return Err(TransformError::EmptyLexicon);
    }
    if let Some(l) = o2o
        .links()
        .iter()
        .find(|l| l.src >= pair.src.len() || l.tgt >= pair.tgt.len())
    {
        return Err(TransformError::OutOfBounds {
            src: l.src,
            tgt: l.tgt,
            src_len: pair.src.len(),
            tgt_len: pair.tgt.len(),
        });
    }
    let k = affected_count(alpha, pair.tgt.len()).min(o2o.len());
    let mut out = pair.clone();
    let entries = lexicon.entries();
    for n in index::sample(rng, o2o.len(), k) {
        let link = o2o.links()[n];
        let entry = &entries[rng.gen_range(0..entries.len() as u32) as usize];
        out.src[link.src] = entry.source.clone();
        out.tgt[link.tgt] = entry.target.clone();
    }
    Ok(out)
}

/// Alignment and lexicon data a task may need. Only mono and replace read it.
#[derive(Clone, Copy, Debug, Default)]
pub struct TaskContext<'a> {
    pub s2t: Option<&'a WordAlignment>,
    pub o2o: Option<&'a OneToOneAlignment>,
    pub lexicon: Option<&'a BilingualLexicon>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskOutput {
    pub pair: SentencePair,
    /// Target positions with several source links (mono only).
    pub multi_source: usize,
}

/// Applies the task's transformation and prepends its tag to the source.
pub fn apply_task<R: Rng + ?Sized>(
    task: &TaskSpec,
    pair: &SentencePair,
    ctx: &TaskContext<'_>,
    rng: &mut R,
) -> Result<TaskOutput, TransformError> {
    let missing = |what| TransformError::MissingContext {
        task: task.kind.name(),
        what,
    };
    let mut multi_source = 0;
    let mut out = match task.kind {
        TaskKind::Main => pair.clone(),
        TaskKind::Reverse => reverse(pair),
        TaskKind::Source => copy_source(pair),
        TaskKind::Token => {
            let unk = task.unk.as_deref().unwrap_or(DEFAULT_UNK);
            token_mask(pair, task.alpha_or_zero(), unk, rng)
        }
        TaskKind::Swap => swap(pair, task.alpha_or_zero(), rng),
        TaskKind::Mono => {
            let s2t = ctx
                .s2t
                .ok_or_else(|| missing("a source-to-target alignment"))?;
            let (p, w) = monotone_reorder(pair, s2t)?;
            multi_source = w;
            p
        }
        TaskKind::Replace => {
            let o2o = ctx.o2o.ok_or_else(|| missing("a one-to-one alignment"))?;
            let lexicon = ctx.lexicon.ok_or_else(|| missing("a bilingual lexicon"))?;
            replace_aligned(pair, task.alpha_or_zero(), o2o, lexicon, rng)?
        }
    };
    if let Some(tag) = &task.tag {
        out.src.insert(0, tag.clone());
    }
    Ok(TaskOutput {
        pair: out,
        multi_source,
    })
}
