#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE_SRC: &str = "Es gibt andere Möglichkeiten , die Pyramide zu durchbrechen .";
pub const EXAMPLE_TGT: &str = "There 's other ways of breaking the pyramid .";
/// Source→target links read off the alignment drawing of the worked example.
pub const EXAMPLE_S2T: &str = "0-1 1-0 2-2 3-3 5-6 6-7 7-4 8-5 9-8";

/// Files of a synthetic aligned corpus.
pub struct SyntheticCorpus {
    pub lines: usize,
    /// Lines with both sides in [5, 100] tokens.
    pub kept: usize,
}

/// Writes `src`, `tgt`, `s2t` (source-target) and `t2s` (native target-source
/// order) for `n` random sentence pairs. Targets are a noisy permutation of
/// the source vocabulary so alignments are plausible.
pub fn write_synthetic_corpus(dir: &Path, n: usize, seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut src, mut tgt, mut s2t, mut t2s) =
        (String::new(), String::new(), String::new(), String::new());
    let mut kept = 0;
    for _ in 0..n {
        let slen = rng.gen_range(3..=30);
        let tlen = (slen as i64 + rng.gen_range(-2..=2)).max(1) as usize;
        let s: Vec<String> = (0..slen)
            .map(|_| format!("s{}", rng.gen_range(0..400)))
            .collect();
        let t: Vec<String> = (0..tlen)
            .map(|_| format!("t{}", rng.gen_range(0..400)))
            .collect();
        if (5..=100).contains(&slen) && (5..=100).contains(&tlen) {
            kept += 1;
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..tlen {
            if rng.gen_bool(0.85) {
                let i = (j + rng.gen_range(0..3)).min(slen - 1);
                a.push(format!("{i}-{j}"));
                if rng.gen_bool(0.8) {
                    b.push(format!("{j}-{i}"));
                }
            }
        }
        writeln!(src, "{}", s.join(" ")).unwrap();
        writeln!(tgt, "{}", t.join(" ")).unwrap();
        writeln!(s2t, "{}", a.join(" ")).unwrap();
        writeln!(t2s, "{}", b.join(" ")).unwrap();
    }
    fs::write(dir.join("src"), src).unwrap();
    fs::write(dir.join("tgt"), tgt).unwrap();
    fs::write(dir.join("s2t"), s2t).unwrap();
    fs::write(dir.join("t2s"), t2s).unwrap();
    SyntheticCorpus { lines: n, kept }
}

/// Adjusted BLEU computed the slow way: explicit n-gram lists, clipping by
/// counting occurrences in the reference for every hypothesis n-gram.
pub fn oracle_bleu(hyp: &str, reference: &str) -> f64 {
    let h: Vec<String> = hyp
        .to_lowercase()
        .split_whitespace()
        .map(String::from)
        .collect();
    let r: Vec<String> = reference
        .to_lowercase()
        .split_whitespace()
        .map(String::from)
        .collect();
    if h.is_empty() {
        return 0.0;
    }
    let grams = |v: &[String], n: usize| -> Vec<Vec<String>> {
        if v.len() < n {
            return vec![];
        }
        (0..=v.len() - n).map(|i| v[i..i + n].to_vec()).collect()
    };
    let clipped = |n: usize| -> usize {
        let hg = grams(&h, n);
        let rg = grams(&r, n);
        let mut distinct: BTreeMap<Vec<String>, usize> = BTreeMap::new();
        for g in &hg {
            *distinct.entry(g.clone()).or_default() += 1;
        }
        distinct
            .iter()
            .map(|(g, c)| (*c).min(rg.iter().filter(|x| *x == g).count()))
            .sum()
    };
    let p1 = clipped(1) as f64 / h.len() as f64;
    if p1 == 0.0 {
        return 0.0;
    }
    let p2 = (clipped(2) as f64 + 0.1) / ((h.len() - 1) as f64 + 0.1);
    let bp = if h.len() >= r.len() {
        1.0
    } else {
        (1.0 - r.len() as f64 / h.len() as f64).exp()
    };
    100.0 * bp * p1.powf(0.8) * p2.powf(0.2)
}
