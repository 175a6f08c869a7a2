//! Pharaoh alignment parsing, bidirectional intersection and lexicon extraction.
//!
//! Alignments are always stored source→target. A file produced by the
//! target→source run of an aligner lists `j-i` items and is read with
//! `reversed = true`.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, BufRead, Write};

use crate::error::AlignError;
use crate::transform::SentencePair;

/// One alignment link between a source position and a target position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub src: usize,
    pub tgt: usize,
}

impl Link {
    pub fn new(src: usize, tgt: usize) -> Self {
        Link { src, tgt }
    }
}

impl From<(usize, usize)> for Link {
    fn from((src, tgt): (usize, usize)) -> Self {
        Link { src, tgt }
    }
}

/// A set of source→target links, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WordAlignment {
    links: Vec<Link>,
}

impl WordAlignment {
    pub fn new<I, L>(links: I) -> Self
    where
        I: IntoIterator<Item = L>,
        L: Into<Link>,
    {
        let mut links: Vec<Link> = links.into_iter().map(Into::into).collect();
        links.sort_unstable();
        links.dedup();
        WordAlignment { links }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, link: Link) -> bool {
        self.links.binary_search(&link).is_ok()
    }

    /// Checks every link against the lengths of the pair it annotates.
    pub fn check_bounds(
        &self,
        src_len: usize,
        tgt_len: usize,
        line: usize,
    ) -> Result<(), AlignError> {
        check_links(&self.links, src_len, tgt_len, line)
    }

    /// Pharaoh text, links in ascending (src, tgt) order.
    pub fn to_pharaoh(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for WordAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_links(f, &self.links)
    }
}

fn write_links(f: &mut fmt::Formatter<'_>, links: &[Link]) -> fmt::Result {
    for (n, link) in links.iter().enumerate() {
        if n > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{}-{}", link.src, link.tgt)?;
    }
    Ok(())
}

fn check_links(
    links: &[Link],
    src_len: usize,
    tgt_len: usize,
    line: usize,
) -> Result<(), AlignError> {
    match links.iter().find(|l| l.src >= src_len || l.tgt >= tgt_len) {
        Some(l) => Err(AlignError::OutOfBounds {
            line,
            src: l.src,
            tgt: l.tgt,
            src_len,
            tgt_len,
        }),
        None => Ok(()),
    }
}

/// Parses one line of a Pharaoh file (`"0-0 1-2 1-3"`). `line_no` is only used
/// in error messages. With `reversed`, each `i-j` is stored as `(j, i)`.
pub fn parse_alignment_line(
    line: &str,
    line_no: usize,
    reversed: bool,
) -> Result<WordAlignment, AlignError> {
    let mut links = Vec::new();
    for item in line.split_ascii_whitespace() {
        let bad = || AlignError::Parse {
            line: line_no,
            item: item.to_string(),
        };
        let (a, b) = item.split_once('-').ok_or_else(bad)?;
        let a: usize = parse_index(a).ok_or_else(bad)?;
        let b: usize = parse_index(b).ok_or_else(bad)?;
        links.push(if reversed {
            Link::new(b, a)
        } else {
            Link::new(a, b)
        });
    }
    Ok(WordAlignment::new(links))
}

// usize::from_str accepts a leading '+', Pharaoh does not.
fn parse_index(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// An alignment where every source index and every target index occurs in
/// at most one link.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OneToOneAlignment {
    links: Vec<Link>,
}

impl OneToOneAlignment {
    pub fn from_links<I, L>(links: I) -> Result<Self, AlignError>
    where
        I: IntoIterator<Item = L>,
        L: Into<Link>,
    {
        let set = WordAlignment::new(links);
        let (o2o, dropped) = resolve_conflicts(set.links);
        match dropped.first() {
            Some(l) => Err(AlignError::NotOneToOne {
                src: l.src,
                tgt: l.tgt,
            }),
            None => Ok(o2o),
        }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn check_bounds(
        &self,
        src_len: usize,
        tgt_len: usize,
        line: usize,
    ) -> Result<(), AlignError> {
        check_links(&self.links, src_len, tgt_len, line)
    }

    pub fn to_pharaoh(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for OneToOneAlignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_links(f, &self.links)
    }
}

/// Result of intersecting two directional alignments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Intersection {
    pub alignment: OneToOneAlignment,
    /// Links present in both inputs that were dropped to restore one-to-one.
    pub conflicts: usize,
}

/// Keeps the links present in both directional alignments.
///
/// Well-formed aligner output always yields a one-to-one set. If it does not,
/// links are visited in ascending (src, tgt) order and any link whose source
/// or target is already taken is dropped and counted.
pub fn intersect(s2t: &WordAlignment, t2s: &WordAlignment) -> Intersection {
    let common: Vec<Link> = s2t
        .links
        .iter()
        .copied()
        .filter(|l| t2s.contains(*l))
        .collect();
    let (alignment, dropped) = resolve_conflicts(common);
    Intersection {
        alignment,
        conflicts: dropped.len(),
    }
}

// `links` must be sorted.
fn resolve_conflicts(links: Vec<Link>) -> (OneToOneAlignment, Vec<Link>) {
    let mut used_src = std::collections::HashSet::new();
    let mut used_tgt = std::collections::HashSet::new();
    let mut kept = Vec::with_capacity(links.len());
    let mut dropped = Vec::new();
    for l in links {
        if used_src.contains(&l.src) || used_tgt.contains(&l.tgt) {
            dropped.push(l);
        } else {
            used_src.insert(l.src);
            used_tgt.insert(l.tgt);
            kept.push(l);
        }
    }
    (OneToOneAlignment { links: kept }, dropped)
}

/// Raw (source word, target word) co-occurrence counts over one-to-one links.
///
/// Partial counts from disjoint slices of a corpus can be merged in any order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconCounts {
    counts: HashMap<String, HashMap<String, u64>>,
}

impl LexiconCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        pair: &SentencePair,
        o2o: &OneToOneAlignment,
        line: usize,
    ) -> Result<(), AlignError> {
        o2o.check_bounds(pair.src.len(), pair.tgt.len(), line)?;
        for l in o2o.links() {
            let by_target = match self.counts.get_mut(pair.src[l.src].as_str()) {
                Some(m) => m,
                None => self.counts.entry(pair.src[l.src].clone()).or_default(),
            };
            match by_target.get_mut(pair.tgt[l.tgt].as_str()) {
                Some(c) => *c += 1,
                None => {
                    by_target.insert(pair.tgt[l.tgt].clone(), 1);
                }
            }
        }
        Ok(())
    }

    pub fn merge(mut self, other: LexiconCounts) -> LexiconCounts {
        for (s, targets) in other.counts {
            let mine = self.counts.entry(s).or_default();
            for (t, c) in targets {
                *mine.entry(t).or_insert(0) += c;
            }
        }
        self
    }

    pub fn count(&self, source: &str, target: &str) -> u64 {
        self.counts
            .get(source)
            .and_then(|m| m.get(target))
            .copied()
            .unwrap_or(0)
    }

    /// Picks, for each source word, the most frequent target; ties go to the
    /// lexicographically smallest target.
    pub fn into_lexicon(self) -> BilingualLexicon {
        let entries = self
            .counts
            .into_iter()
            .filter_map(|(source, targets)| {
                targets
                    .into_iter()
                    .max_by(|(ta, ca), (tb, cb)| ca.cmp(cb).then_with(|| tb.cmp(ta)))
                    .map(|(target, count)| LexiconEntry {
                        source,
                        target,
                        count,
                    })
            })
            .collect();
        BilingualLexicon::from_entries(entries).expect("sources are unique map keys")
    }
}

/// Counts every one-to-one link of the corpus and reduces to a lexicon.
/// Line numbers in errors are 1-based positions in the iterator.
pub fn build_lexicon<'a, I>(pairs: I) -> Result<BilingualLexicon, AlignError>
where
    I: IntoIterator<Item = (&'a SentencePair, &'a OneToOneAlignment)>,
{
    let mut counts = LexiconCounts::new();
    for (n, (pair, o2o)) in pairs.into_iter().enumerate() {
        counts.add(pair, o2o, n + 1)?;
    }
    Ok(counts.into_lexicon())
}

/// Parallel variant of [`build_lexicon`] over an in-memory corpus.
pub fn build_lexicon_par(
    pairs: &[(SentencePair, OneToOneAlignment)],
) -> Result<BilingualLexicon, AlignError> {
    use rayon::prelude::*;
    pairs
        .par_iter()
        .enumerate()
        .try_fold(LexiconCounts::new, |mut acc, (n, (pair, o2o))| {
            acc.add(pair, o2o, n + 1)?;
            Ok(acc)
        })
        .try_reduce(LexiconCounts::new, |a, b| Ok(a.merge(b)))
        .map(LexiconCounts::into_lexicon)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    pub source: String,
    pub target: String,
    pub count: u64,
}

/// Source word → most frequently aligned target word.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BilingualLexicon {
    // sorted by source, sources unique
    entries: Vec<LexiconEntry>,
}

impl BilingualLexicon {
    pub fn from_entries(mut entries: Vec<LexiconEntry>) -> Result<Self, AlignError> {
        entries.sort_by(|a, b| a.source.cmp(&b.source));
        if let Some(w) = entries.windows(2).find(|w| w[0].source == w[1].source) {
            return Err(AlignError::Lexicon {
                line: 0,
                reason: format!("duplicate source word {:?}", w[0].source),
            });
        }
        Ok(BilingualLexicon { entries })
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.entry(source).map(|e| e.target.as_str())
    }

    pub fn entry(&self, source: &str) -> Option<&LexiconEntry> {
        self.entries
            .binary_search_by(|e| e.source.as_str().cmp(source))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Entries in ascending source order. Index `i` is stable for a given
    /// lexicon, which is what random draws use.
    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `source<TAB>target<TAB>count`, one entry per line, sorted by source.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for e in &self.entries {
            writeln!(w, "{}\t{}\t{}", e.source, e.target, e.count)?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> io::Result<Result<Self, AlignError>> {
        let mut entries = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let err = |reason: &str| AlignError::Lexicon {
                line: n + 1,
                reason: reason.to_string(),
            };
            let mut fields = line.split('\t');
            let (Some(source), Some(target), Some(count), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Ok(Err(err("expected three tab-separated fields")));
            };
            if source.is_empty() || target.is_empty() {
                return Ok(Err(err("empty word")));
            }
            let Ok(count) = count.trim().parse::<u64>() else {
                return Ok(Err(err("count is not a non-negative integer")));
            };
            entries.push(LexiconEntry {
                source: source.to_string(),
                target: target.to_string(),
                count,
            });
        }
        Ok(Self::from_entries(entries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn wa(links: &[(usize, usize)]) -> WordAlignment {
        WordAlignment::new(links.iter().copied())
    }

    fn pair(src: &str, tgt: &str) -> SentencePair {
        SentencePair::from_text(src, tgt)
    }

    #[test]
    fn parses_pharaoh() {
        let a = parse_alignment_line("0-0 1-2 1-3", 1, false).unwrap();
        assert_eq!(a, wa(&[(0, 0), (1, 2), (1, 3)]));
        assert!(parse_alignment_line("", 1, false).unwrap().is_empty());
        assert!(parse_alignment_line("   ", 1, false).unwrap().is_empty());
    }

    #[test]
    fn parses_reversed() {
        let a = parse_alignment_line("0-1 2-0", 1, true).unwrap();
        assert_eq!(a, wa(&[(1, 0), (0, 2)]));
    }

    #[test]
    fn parse_errors_name_line_and_item() {
        for bad in ["0-0 12", "0-a", "-1", "1-", "+1-2", "1-2-3", "0–1"] {
            let err = parse_alignment_line(bad, 7, false).unwrap_err();
            match err {
                AlignError::Parse { line, ref item } => {
                    assert_eq!(line, 7);
                    assert!(bad.contains(item.as_str()), "{bad}: {item}");
                }
                e => panic!("unexpected {e:?}"),
            }
            assert!(err.to_string().contains("line 7"));
        }
    }

    #[test]
    fn pharaoh_roundtrip() {
        let a = wa(&[(3, 1), (0, 0), (1, 2)]);
        assert_eq!(a.to_pharaoh(), "0-0 1-2 3-1");
        assert_eq!(parse_alignment_line(&a.to_pharaoh(), 1, false).unwrap(), a);
    }

    #[test]
    fn intersect_examples() {
        let r = intersect(&wa(&[(0, 0), (1, 2), (1, 3)]), &wa(&[(0, 0), (1, 2)]));
        assert_eq!(r.alignment.links(), &[Link::new(0, 0), Link::new(1, 2)]);
        assert_eq!(r.conflicts, 0);

        let x = wa(&[(0, 1), (1, 0), (2, 2)]);
        assert_eq!(intersect(&x, &x).alignment.links(), x.links());

        assert!(intersect(&wa(&[(0, 1)]), &wa(&[(1, 0)]))
            .alignment
            .is_empty());
    }

    #[test]
    fn intersect_drops_conflicts_smallest_first() {
        // both inputs malformed: source 0 linked to 1 and 2 in both
        let a = wa(&[(0, 1), (0, 2), (1, 2)]);
        let r = intersect(&a, &a);
        assert_eq!(r.alignment.links(), &[Link::new(0, 1), Link::new(1, 2)]);
        assert_eq!(r.conflicts, 1);
    }

    #[test]
    fn one_to_one_rejects_conflicts() {
        assert!(OneToOneAlignment::from_links([(0, 0), (1, 1)]).is_ok());
        assert_eq!(
            OneToOneAlignment::from_links([(0, 0), (1, 0)]),
            Err(AlignError::NotOneToOne { src: 1, tgt: 0 })
        );
    }

    fn brute_force_counts(
        corpus: &[(SentencePair, OneToOneAlignment)],
    ) -> Vec<(String, String, u64)> {
        let mut seen: Vec<(String, String)> = Vec::new();
        for (p, a) in corpus {
            for l in a.links() {
                seen.push((p.src[l.src].clone(), p.tgt[l.tgt].clone()));
            }
        }
        let sources: BTreeSet<&String> = seen.iter().map(|(s, _)| s).collect();
        let mut out = Vec::new();
        for s in sources {
            let targets: BTreeSet<&String> = seen
                .iter()
                .filter(|(a, _)| a == s)
                .map(|(_, t)| t)
                .collect();
            let counted: Vec<(&String, u64)> = targets
                .into_iter()
                .map(|t| {
                    (
                        t,
                        seen.iter().filter(|(a, b)| a == s && b == t).count() as u64,
                    )
                })
                .collect();
            let best = counted.iter().map(|(_, c)| *c).max().unwrap();
            // all max-count candidates, in lexicographic order
            let winner = counted.iter().find(|(_, c)| *c == best).unwrap().0;
            out.push((s.clone(), winner.clone(), best));
        }
        out
    }

    #[test]
    fn lexicon_majority_and_ties() {
        let mut corpus = Vec::new();
        for tgt in ["house", "house", "home", "house"] {
            corpus.push((
                pair("das Haus", &format!("the {tgt}")),
                OneToOneAlignment::from_links([(0, 0), (1, 1)]).unwrap(),
            ));
        }
        for tgt in ["bench", "bank", "bench", "bank"] {
            corpus.push((
                pair("Bank", tgt),
                OneToOneAlignment::from_links([(0, 0)]).unwrap(),
            ));
        }
        let lex = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap();
        assert_eq!(lex.get("Haus"), Some("house"));
        assert_eq!(lex.entry("Haus").unwrap().count, 3);
        assert_eq!(lex.get("Bank"), Some("bank"));
        assert_eq!(lex.get("das"), Some("the"));
        let expected = brute_force_counts(&corpus);
        let got: Vec<_> = lex
            .entries()
            .iter()
            .map(|e| (e.source.clone(), e.target.clone(), e.count))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn lexicon_single_link() {
        let corpus = [(
            pair("Pyramide", "pyramid"),
            OneToOneAlignment::from_links([(0, 0)]).unwrap(),
        )];
        let lex = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap();
        assert_eq!(lex.get("Pyramide"), Some("pyramid"));
        assert_eq!(lex.len(), 1);
    }

    #[test]
    fn lexicon_out_of_bounds_names_line() {
        let corpus = [
            (
                pair("a", "b"),
                OneToOneAlignment::from_links([(0, 0)]).unwrap(),
            ),
            (
                pair("a", "b"),
                OneToOneAlignment::from_links([(0, 3)]).unwrap(),
            ),
        ];
        let err = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap_err();
        assert!(
            matches!(err, AlignError::OutOfBounds { line: 2, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn unaligned_words_have_no_entry() {
        let corpus = [(
            pair("a b", "x y"),
            OneToOneAlignment::from_links([(0, 0)]).unwrap(),
        )];
        let lex = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap();
        assert_eq!(lex.get("b"), None);
    }

    #[test]
    fn tsv_roundtrip_and_errors() {
        let lex = BilingualLexicon::from_entries(vec![
            LexiconEntry {
                source: "b".into(),
                target: "y".into(),
                count: 2,
            },
            LexiconEntry {
                source: "a".into(),
                target: "x".into(),
                count: 5,
            },
        ])
        .unwrap();
        let mut buf = Vec::new();
        lex.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "a\tx\t5\nb\ty\t2\n"
        );
        let back = BilingualLexicon::read_tsv(&buf[..]).unwrap().unwrap();
        assert_eq!(back, lex);

        let bad = BilingualLexicon::read_tsv(&b"a\tx\t5\nb\ty\n"[..]).unwrap();
        assert!(matches!(bad, Err(AlignError::Lexicon { line: 2, .. })));
        let dup = BilingualLexicon::read_tsv(&b"a\tx\t5\na\ty\t1\n"[..]).unwrap();
        assert!(dup.is_err());
    }

    fn small_links() -> impl Strategy<Value = Vec<(usize, usize)>> {
        proptest::collection::vec((0usize..5, 0usize..5), 0..12)
    }

    proptest! {
        #[test]
        fn intersection_is_subset_of_both(a in small_links(), b in small_links()) {
            let (a, b) = (WordAlignment::new(a), WordAlignment::new(b));
            let r = intersect(&a, &b);
            let brute: BTreeSet<Link> = a.links().iter().filter(|l| b.links().contains(l)).copied().collect();
            for l in r.alignment.links() {
                prop_assert!(a.contains(*l) && b.contains(*l));
            }
            prop_assert_eq!(r.alignment.len() + r.conflicts, brute.len());
            let srcs: BTreeSet<_> = r.alignment.links().iter().map(|l| l.src).collect();
            let tgts: BTreeSet<_> = r.alignment.links().iter().map(|l| l.tgt).collect();
            prop_assert_eq!(srcs.len(), r.alignment.len());
            prop_assert_eq!(tgts.len(), r.alignment.len());
        }

        #[test]
        fn lexicon_is_order_independent(
            raw in proptest::collection::vec((0usize..4, 0usize..4), 1..40),
            rot in 0usize..40,
        ) {
            let words_s = ["a", "b", "c", "d"];
            let words_t = ["w", "x", "y", "z"];
            let mut corpus: Vec<(SentencePair, OneToOneAlignment)> = raw
                .iter()
                .map(|&(s, t)| (pair(words_s[s], words_t[t]), OneToOneAlignment::from_links([(0, 0)]).unwrap()))
                .collect();
            let forward = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap();
            let n = corpus.len();
            corpus.rotate_left(rot % n);
            corpus.reverse();
            let shuffled = build_lexicon(corpus.iter().map(|(p, a)| (p, a))).unwrap();
            prop_assert_eq!(&forward, &shuffled);
            prop_assert_eq!(&forward, &build_lexicon_par(&corpus).unwrap());
            let expected = brute_force_counts(&corpus);
            let got: Vec<_> = forward.entries().iter().map(|e| (e.source.clone(), e.target.clone(), e.count)).collect();
            prop_assert_eq!(got, expected);
        }
    }
}
