//! Fuzzy deduplication, quota refill and export to training records.
//!
//! Similarity is `1 - levenshtein(a, b) / max(|a|, |b|)` over Unicode
//! scalar values. A tuple is a duplicate when its question or its code
//! reaches the threshold against an earlier kept tuple or a benchmark entry.

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds::SeedType;
use crate::snapshot::read_json;
use crate::synth::{QuestionCodeTuple, Synthesizer};

pub const DEFAULT_THRESHOLD: f64 = 0.85;
pub const DEFAULT_MAX_ROUNDS: usize = 10;

/// Pattern bitmasks for one string, 64 positions per word.
struct Peq {
    words: usize,
    ascii: Vec<u64>,
    other: HashMap<char, Vec<u64>>,
}

impl Peq {
    fn new(chars: &[char]) -> Self {
        let words = chars.len().div_ceil(64).max(1);
        let mut ascii = vec![0u64; 128 * words];
        let mut other: HashMap<char, Vec<u64>> = HashMap::new();
        for (i, &c) in chars.iter().enumerate() {
            let (w, bit) = (i / 64, 1u64 << (i % 64));
            if c.is_ascii() {
                ascii[c as usize * words + w] |= bit;
            } else {
                other.entry(c).or_insert_with(|| vec![0; words])[w] |= bit;
            }
        }
        Peq { words, ascii, other }
    }

    fn get(&self, c: char, w: usize) -> u64 {
        if c.is_ascii() {
            self.ascii[c as usize * self.words + w]
        } else {
            self.other.get(&c).map_or(0, |v| v[w])
        }
    }
}

/// Block-wise bit-vector edit distance (Myers/Hyyrö) of `pattern` vs `text`.
fn bit_parallel(pattern: &[char], peq: &Peq, text: &[char]) -> usize {
    let m = pattern.len();
    if m == 0 {
        return text.len();
    }
    let words = peq.words;
    let last = 1u64 << ((m - 1) % 64);
    let mut vp = vec![!0u64; words];
    let mut vn = vec![0u64; words];
    let mut score = m;
    for &c in text {
        // the top boundary row grows by one per text character
        let mut hp_carry = 1u64;
        let mut hn_carry = 0u64;
        for w in 0..words {
            let pm = peq.get(c, w);
            let x = pm | hn_carry;
            let d0 = (((x & vp[w]).wrapping_add(vp[w])) ^ vp[w]) | x | vn[w];
            let mut hp = vn[w] | !(d0 | vp[w]);
            let mut hn = d0 & vp[w];
            if w == words - 1 {
                if hp & last != 0 {
                    score += 1;
                } else if hn & last != 0 {
                    score -= 1;
                }
            }
            let (hp_in, hn_in) = (hp_carry, hn_carry);
            hp_carry = hp >> 63;
            hn_carry = hn >> 63;
            hp = (hp << 1) | hp_in;
            hn = (hn << 1) | hn_in;
            vp[w] = hn | !(d0 | hp);
            vn[w] = hp & d0;
        }
    }
    score
}

/// Unit-cost insert/delete/substitute distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (p, t) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    bit_parallel(p, &Peq::new(p), t)
}

fn ratio(d: usize, longest: usize) -> f64 {
    if longest == 0 {
        1.0
    } else {
        1.0 - d as f64 / longest as f64
    }
}

pub fn similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    ratio(levenshtein(a, b), longest)
}

const BUCKETS: usize = 128;

/// A string with its pattern masks and character histogram built once for
/// many comparisons.
pub struct Prepared {
    chars: Vec<char>,
    peq: Peq,
    histogram: [u32; BUCKETS],
}

impl Prepared {
    pub fn new(s: &str) -> Self {
        let chars: Vec<char> = s.chars().collect();
        let peq = Peq::new(&chars);
        let mut histogram = [0u32; BUCKETS];
        for &c in &chars {
            histogram[c as usize % BUCKETS] += 1;
        }
        Prepared { chars, peq, histogram }
    }

    /// Lower bound on the edit distance: every edit fixes at most one
    /// surplus and one deficit in the (bucketed) character counts.
    pub fn distance_lower_bound(&self, other: &Prepared) -> usize {
        let (mut surplus, mut deficit) = (0u32, 0u32);
        for (a, b) in self.histogram.iter().zip(&other.histogram) {
            if a > b {
                surplus += a - b;
            } else {
                deficit += b - a;
            }
        }
        surplus.max(deficit) as usize
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn similarity(&self, other: &Prepared) -> f64 {
        let (p, t) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        ratio(bit_parallel(&p.chars, &p.peq, &t.chars), t.len())
    }

    /// Similarity if it can reach `threshold`. With `prefilter`, pairs whose
    /// length ratio is below the threshold are skipped (the distance is at
    /// least the length difference), as are pairs whose histogram bound
    /// already rules them out. Both checks only skip pairs that cannot
    /// qualify.
    pub fn similarity_at_least(&self, other: &Prepared, threshold: f64, prefilter: bool) -> Option<f64> {
        if prefilter {
            let (lo, hi) = (self.len().min(other.len()), self.len().max(other.len()));
            if hi > 0 && (lo as f64) < threshold * hi as f64 {
                return None;
            }
            if ratio(self.distance_lower_bound(other), hi) < threshold {
                return None;
            }
        }
        let s = self.similarity(other);
        (s >= threshold).then_some(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchmarkEntry {
    pub question: String,
    pub code: String,
}

pub fn load_benchmark(path: &Path) -> Result<Vec<BenchmarkEntry>> {
    read_json(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarPair {
    pub index_a: usize,
    pub index_b: usize,
    pub question_similarity: f64,
    pub code_similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkHit {
    pub index: usize,
    pub benchmark_index: usize,
    pub question_similarity: f64,
    pub code_similarity: f64,
}

/// Why each removed tuple went: the first kept tuple (or benchmark entry)
/// it matched. Indices are positions in the order tuples were offered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub threshold: f64,
    pub pairs: Vec<SimilarPair>,
    pub benchmark_hits: Vec<BenchmarkHit>,
}

struct PreparedTuple {
    question: Prepared,
    code: Prepared,
}

impl PreparedTuple {
    fn new(question: &str, code: &str) -> Self {
        PreparedTuple {
            question: Prepared::new(question),
            code: Prepared::new(code),
        }
    }

    /// (question, code) similarity when either reaches the threshold.
    fn matches(&self, other: &PreparedTuple, t: f64, prefilter: bool) -> Option<(f64, f64)> {
        let q = self.question.similarity_at_least(&other.question, t, prefilter);
        let c = self.code.similarity_at_least(&other.code, t, prefilter);
        if q.is_none() && c.is_none() {
            return None;
        }
        let q = q.unwrap_or_else(|| self.question.similarity(&other.question));
        let c = c.unwrap_or_else(|| self.code.similarity(&other.code));
        Some((q, c))
    }
}

enum Verdict {
    Benchmark(usize, (f64, f64)),
    /// Earlier offered tuples this one matches, ascending.
    Earlier(Vec<(usize, (f64, f64))>),
}

/// Incremental deduplicator. Every offered tuple gets the next stable
/// index; keep/remove decisions follow that index order, so the outcome
/// does not depend on how the pairwise work is scheduled.
pub struct Deduper {
    threshold: f64,
    prefilter: bool,
    benchmark: Vec<PreparedTuple>,
    kept: Vec<(usize, PreparedTuple)>,
    offered: usize,
    report: SimilarityReport,
}

impl Deduper {
    pub fn new(threshold: f64, benchmark: &[BenchmarkEntry]) -> Result<Self> {
        if !(threshold > 0.0 && threshold <= 1.0) {
            return Err(Error::Config(format!("dedup threshold {threshold} outside (0, 1]")));
        }
        Ok(Deduper {
            threshold,
            prefilter: true,
            benchmark: benchmark.iter().map(|b| PreparedTuple::new(&b.question, &b.code)).collect(),
            kept: Vec::new(),
            offered: 0,
            report: SimilarityReport {
                threshold,
                pairs: Vec::new(),
                benchmark_hits: Vec::new(),
            },
        })
    }

    pub fn with_prefilter(mut self, on: bool) -> Self {
        self.prefilter = on;
        self
    }

    pub fn report(&self) -> &SimilarityReport {
        &self.report
    }

    pub fn into_report(self) -> SimilarityReport {
        self.report
    }

    pub fn kept_len(&self) -> usize {
        self.kept.len()
    }

    /// Offer a batch; returns `(stable index, tuple)` for the survivors.
    pub fn offer(&mut self, batch: Vec<QuestionCodeTuple>) -> Vec<(usize, QuestionCodeTuple)> {
        let base = self.offered;
        self.offered += batch.len();
        let prepared: Vec<PreparedTuple> = batch
            .par_iter()
            .map(|t| PreparedTuple::new(&t.question, &t.code))
            .collect();
        let (t, pf) = (self.threshold, self.prefilter);
        let verdicts: Vec<Verdict> = prepared
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                if let Some((bi, s)) =
                    self.benchmark.iter().enumerate().find_map(|(bi, b)| p.matches(b, t, pf).map(|s| (bi, s)))
                {
                    return Verdict::Benchmark(bi, s);
                }
                let mut hits: Vec<(usize, (f64, f64))> = self
                    .kept
                    .iter()
                    .filter_map(|(k, kp)| kp.matches(p, t, pf).map(|s| (*k, s)))
                    .collect();
                hits.extend(
                    prepared[..i]
                        .iter()
                        .enumerate()
                        .filter_map(|(j, q)| q.matches(p, t, pf).map(|s| (base + j, s))),
                );
                Verdict::Earlier(hits)
            })
            .collect();

        let mut survivors = Vec::new();
        let mut kept_now = std::collections::BTreeSet::new();
        for ((i, (tuple, p)), verdict) in batch.into_iter().zip(prepared).enumerate().zip(verdicts) {
            let index = base + i;
            match verdict {
                Verdict::Benchmark(bi, (q, c)) => self.report.benchmark_hits.push(BenchmarkHit {
                    index,
                    benchmark_index: bi,
                    question_similarity: q,
                    code_similarity: c,
                }),
                Verdict::Earlier(hits) => {
                    let blocker = hits.into_iter().find(|(j, _)| *j < base || kept_now.contains(j));
                    match blocker {
                        Some((j, (q, c))) => self.report.pairs.push(SimilarPair {
                            index_a: j,
                            index_b: index,
                            question_similarity: q,
                            code_similarity: c,
                        }),
                        None => {
                            kept_now.insert(index);
                            self.kept.push((index, p));
                            survivors.push((index, tuple));
                        }
                    }
                }
            }
        }
        survivors
    }
}

/// One-shot dedup of `tuples`: survivors, removed, and the report.
pub fn dedup(
    tuples: Vec<QuestionCodeTuple>,
    benchmark: &[BenchmarkEntry],
    threshold: f64,
    prefilter: bool,
) -> Result<(Vec<QuestionCodeTuple>, Vec<QuestionCodeTuple>, SimilarityReport)> {
    let mut d = Deduper::new(threshold, benchmark)?.with_prefilter(prefilter);
    let all = tuples.clone();
    let kept = d.offer(tuples);
    let mut keep_mask = vec![false; all.len()];
    for (i, _) in &kept {
        keep_mask[*i] = true;
    }
    let removed = all.into_iter().zip(keep_mask).filter(|(_, k)| !k).map(|(t, _)| t).collect();
    Ok((kept.into_iter().map(|(_, t)| t).collect(), removed, d.into_report()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shortfall {
    pub seed_type: SeedType,
    pub wanted: usize,
    pub got: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostprocReport {
    pub offered: usize,
    pub kept: usize,
    pub removed_within_dataset: usize,
    pub removed_benchmark: usize,
    pub regeneration_rounds: usize,
    pub single: usize,
    pub multi: usize,
    pub shortfalls: Vec<Shortfall>,
    pub similarity: SimilarityReport,
}

pub struct Refilled {
    /// Survivors in stable-index order.
    pub tuples: Vec<QuestionCodeTuple>,
    pub rounds: usize,
    pub shortfalls: Vec<Shortfall>,
}

/// Top each seed type back up to its quota with fresh tuples, deduplicating
/// every batch against everything kept so far. Gives up after `max_rounds`
/// and reports what is missing.
pub fn regenerate_to_size(
    deduper: &mut Deduper,
    kept: Vec<(usize, QuestionCodeTuple)>,
    quotas: crate::synth::Quotas,
    synth: &mut Synthesizer<'_>,
    max_rounds: usize,
) -> Result<Refilled> {
    let mut tuples = kept;
    let mut rounds = 0;
    let mut stalled: Vec<(SeedType, String)> = Vec::new();
    let count = |ts: &[(usize, QuestionCodeTuple)], t: SeedType| ts.iter().filter(|(_, x)| x.seed_type == t).count();
    while rounds < max_rounds {
        let mut batch = Vec::new();
        for t in [SeedType::Single, SeedType::Multi] {
            let missing = quotas.get(t).saturating_sub(count(&tuples, t));
            if missing == 0 || stalled.iter().any(|(s, _)| *s == t) {
                continue;
            }
            match synth.generate(t, missing) {
                Ok(mut fresh) => batch.append(&mut fresh),
                Err(e @ Error::Stall { .. }) => stalled.push((t, e.to_string())),
                Err(e) => return Err(e),
            }
        }
        if batch.is_empty() {
            break;
        }
        rounds += 1;
        tuples.extend(deduper.offer(batch));
    }
    let mut shortfalls = Vec::new();
    for t in [SeedType::Single, SeedType::Multi] {
        let got = count(&tuples, t);
        let wanted = quotas.get(t);
        if got < wanted {
            let reason = stalled
                .iter()
                .find(|(s, _)| *s == t)
                .map(|(_, r)| r.clone())
                .unwrap_or_else(|| format!("quota not met after {rounds} regeneration rounds"));
            shortfalls.push(Shortfall {
                seed_type: t,
                wanted,
                got,
                reason,
            });
        }
    }
    tuples.sort_by_key(|(i, _)| *i);
    Ok(Refilled {
        tuples: tuples.into_iter().map(|(_, t)| t).collect(),
        rounds,
        shortfalls,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub api_nodes: Vec<String>,
    pub seed_type: SeedType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingRecord {
    pub instruction: String,
    pub input: String,
    pub output: String,
    pub meta: RecordMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reject {
    pub index: usize,
    pub reason: String,
    pub tuple: QuestionCodeTuple,
}

impl TrainingRecord {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.instruction.trim().is_empty() {
            return Err("empty instruction".into());
        }
        if self.output.trim().is_empty() {
            return Err("empty output".into());
        }
        if self.meta.api_nodes.is_empty() || self.meta.api_nodes.iter().any(|n| n.trim().is_empty()) {
            return Err("missing api_nodes".into());
        }
        Ok(())
    }
}

/// Convert tuples to records ordered by (seed type, position). Records
/// failing validation are returned separately instead of aborting.
pub fn standardize(tuples: &[QuestionCodeTuple]) -> (Vec<TrainingRecord>, Vec<Reject>) {
    let mut order: Vec<usize> = (0..tuples.len()).collect();
    order.sort_by_key(|&i| (tuples[i].seed_type, i));
    let mut records = Vec::with_capacity(tuples.len());
    let mut rejects = Vec::new();
    for i in order {
        let t = &tuples[i];
        let record = TrainingRecord {
            instruction: t.question.clone(),
            input: String::new(),
            output: t.code.clone(),
            meta: RecordMeta {
                api_nodes: t.api_nodes.clone(),
                seed_type: t.seed_type,
            },
        };
        match record.validate() {
            Ok(()) => records.push(record),
            Err(reason) => rejects.push(Reject {
                index: i,
                reason,
                tuple: t.clone(),
            }),
        }
    }
    (records, rejects)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::GenMeta;

    fn dp(a: &str, b: &str) -> usize {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for (i, row) in d.iter_mut().enumerate() {
            row[0] = i;
        }
        for (j, cell) in d[0].iter_mut().enumerate() {
            *cell = j;
        }
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
                d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
            }
        }
        d[a.len()][b.len()]
    }

    fn tuple(q: &str, c: &str, t: SeedType) -> QuestionCodeTuple {
        QuestionCodeTuple {
            question: q.into(),
            code: c.into(),
            api_nodes: vec!["ns.A".into()],
            seed_type: t,
            gen_meta: GenMeta {
                model: "m".into(),
                temperature: 0.7,
                question_prompt_hash: String::new(),
                code_prompt_hash: String::new(),
                bundle_index: 0,
                reuse_index: 0,
            },
        }
    }

    #[test]
    fn classic_distances() {
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("", "abc"), 3);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("flaw", "lawn"), 2);
        assert_eq!(levenshtein("héllo", "hello"), 1);
        assert!((similarity("kitten", "sitting") - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("abcd", "wxyz"), 0.0);
    }

    #[test]
    fn long_strings_cross_word_boundaries() {
        let a: String = (0..300).map(|i| char::from(b'a' + (i * 7 % 26) as u8)).collect();
        let mut b = a.clone();
        b.replace_range(60..70, "ZZZ");
        b.insert_str(130, "qq");
        b.push_str("tail");
        assert_eq!(levenshtein(&a, &b), dp(&a, &b));
        assert_eq!(levenshtein(&b, &a), dp(&a, &b));
    }

    #[test]
    fn identical_questions_drop_the_later() {
        let ts = vec![
            tuple("How to sort a list?", "code one", SeedType::Single),
            tuple("How to sort a list?", "something else entirely", SeedType::Single),
        ];
        let (kept, removed, report) = dedup(ts, &[], 0.85, true).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(removed[0].code, "something else entirely");
        assert_eq!(report.pairs[0].index_a, 0);
        assert_eq!(report.pairs[0].index_b, 1);
    }

    #[test]
    fn benchmark_match_removes() {
        let code = "abcdefghij";
        let near = "abcdefghiX"; // similarity 0.9
        assert!((similarity(code, near) - 0.9).abs() < 1e-12);
        let bench = [BenchmarkEntry {
            question: "unrelated benchmark task".into(),
            code: code.into(),
        }];
        let (kept, _, report) = dedup(vec![tuple("q", near, SeedType::Multi)], &bench, 0.85, true).unwrap();
        assert!(kept.is_empty());
        assert_eq!(report.benchmark_hits.len(), 1);
    }

    #[test]
    fn planted_near_duplicates() {
        let base: Vec<String> = (0..7)
            .map(|i| format!("{}{i}", ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf"][i].repeat(3)))
            .collect();
        let mut ts: Vec<_> = base
            .iter()
            .enumerate()
            .map(|(i, q)| tuple(q, &format!("code-{i}-{}", "x".repeat(i * 5)), SeedType::Single))
            .collect();
        for q in base.iter().take(3) {
            let mut near: Vec<char> = q.chars().collect();
            let n = near.len();
            near[n - 2] = '#';
            let near: String = near.into_iter().collect();
            assert!(similarity(q, &near) >= 0.9);
            ts.push(tuple(&near, "totally different code body", SeedType::Single));
        }
        let (kept, removed, _) = dedup(ts, &[], 0.85, true).unwrap();
        assert_eq!((kept.len(), removed.len()), (7, 3));
    }

    #[test]
    fn prefilter_changes_nothing() {
        let ts: Vec<_> = (0..40)
            .map(|i| {
                let q = format!("question {} about {}", i % 7, "topic ".repeat(i % 5));
                let c = format!("fn f{}() {{ {} }}", i % 9, "x;".repeat(i % 11));
                tuple(&q, &c, SeedType::Single)
            })
            .collect();
        let on = dedup(ts.clone(), &[], 0.8, true).unwrap();
        let off = dedup(ts, &[], 0.8, false).unwrap();
        assert_eq!(on.0, off.0);
        assert_eq!(on.2, off.2);
    }

    #[test]
    fn threshold_must_be_in_range() {
        assert!(Deduper::new(0.0, &[]).is_err());
        assert!(Deduper::new(1.5, &[]).is_err());
        assert!(Deduper::new(1.0, &[]).is_ok());
    }

    #[test]
    fn standardize_orders_and_quarantines() {
        let ts = vec![
            tuple("m1", "c", SeedType::Multi),
            tuple("s1", "c", SeedType::Single),
            tuple("s2", "", SeedType::Single),
            tuple("s3", "c", SeedType::Single),
        ];
        let (records, rejects) = standardize(&ts);
        let order: Vec<_> = records.iter().map(|r| r.instruction.as_str()).collect();
        assert_eq!(order, ["s1", "s3", "m1"]);
        assert_eq!(rejects.len(), 1);
        assert_eq!(rejects[0].index, 2);
        assert!(records.iter().all(|r| r.input.is_empty()));
        let text = serde_json::to_string(&records).unwrap();
        let back: Vec<TrainingRecord> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn histogram_bound_never_exceeds_distance() {
        for (a, b) in [("kitten", "sitting"), ("", "abc"), ("abcabc", "cbacba"), ("héllo wörld", "hello world")] {
            let (pa, pb) = (Prepared::new(a), Prepared::new(b));
            assert!(pa.distance_lower_bound(&pb) <= levenshtein(a, b));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn matches_dp(a in "[ab\u{e9}c]{0,150}", b in "[abc\u{e9}d]{0,150}") {
                prop_assert_eq!(levenshtein(&a, &b), dp(&a, &b));
            }

            #[test]
            fn lower_bound_is_sound(a in "[abc\u{e9}\u{169}]{0,60}", b in "[abcd\u{e9}]{0,60}") {
                let (pa, pb) = (Prepared::new(&a), Prepared::new(&b));
                prop_assert!(pa.distance_lower_bound(&pb) <= dp(&a, &b));
            }

            #[test]
            fn metric(a in "[abc]{0,40}", b in "[abc]{0,40}", c in "[abc]{0,40}") {
                prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
                prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
                prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
            }

            #[test]
            fn dedup_is_sound(qs in proptest::collection::vec("[ab]{1,12}", 1..30)) {
                let ts: Vec<_> = qs.iter().map(|q| tuple(q, q, SeedType::Single)).collect();
                let (kept, _, report) = dedup(ts, &[], 0.7, true).unwrap();
                for i in 0..kept.len() {
                    for j in i + 1..kept.len() {
                        prop_assert!(similarity(&kept[i].question, &kept[j].question) < 0.7);
                    }
                }
                for p in &report.pairs {
                    prop_assert!(p.index_a < p.index_b);
                    prop_assert!(p.question_similarity.max(p.code_similarity) >= 0.7);
                }
            }
        }
    }
}
