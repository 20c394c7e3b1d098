//! Record linkage across two bibliographic sets: exact join on normalized
//! DOI, then fuzzy title matching for the remainder, year-blocked and
//! greedily assigned one-to-one.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::ingest::PaperRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Minimum combined title similarity for a fuzzy pair.
    pub sim_threshold: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig { sim_threshold: 0.90 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMethod {
    Doi,
    Fuzzy,
}

impl std::fmt::Display for MatchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatchMethod::Doi => "doi",
            MatchMethod::Fuzzy => "fuzzy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkPair {
    pub left_id: String,
    pub right_id: String,
    pub method: MatchMethod,
    pub similarity: f64,
}

/// One-to-one linkage outcome; unmatched ids keep their input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkResult {
    pub pairs: Vec<LinkPair>,
    pub unmatched_left: Vec<String>,
    pub unmatched_right: Vec<String>,
}

/// Canonical title form: Unicode-decomposed with combining marks (accents)
/// dropped, lowercased, punctuation removed outright (so "cow-bell" joins
/// to "cowbell"), whitespace collapsed and trimmed.
pub fn normalize_title(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in s.nfkd() {
        if is_combining_mark(c) {
            continue;
        }
        for lc in c.to_lowercase() {
            if lc.is_alphanumeric() {
                if pending_space && !out.is_empty() {
                    out.push(' ');
                }
                pending_space = false;
                out.push(lc);
            } else if lc.is_whitespace() {
                pending_space = true;
            }
        }
    }
    out
}

/// Minimum insert/delete/substitute edits between the two strings,
/// counted over Unicode scalar values.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitute.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

/// 1 − distance / max(char length); 1 when both strings are empty.
pub fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// Jaccard overlap of whitespace tokens of the *normalized* strings;
/// 1 when both token sets are empty.
pub fn jaccard_tokens(a: &str, b: &str) -> f64 {
    jaccard_raw_tokens(&normalize_title(a), &normalize_title(b))
}

/// Canonical DOI: trimmed, lowercased, resolver prefixes stripped.
pub fn normalize_doi(s: &str) -> Option<String> {
    let mut d = s.trim().to_lowercase();
    for prefix in [
        "https://dx.doi.org/",
        "http://dx.doi.org/",
        "https://doi.org/",
        "http://doi.org/",
        "doi:",
    ] {
        if let Some(rest) = d.strip_prefix(prefix) {
            d = rest.trim_start().to_string();
            break;
        }
    }
    (!d.is_empty()).then_some(d)
}

fn combined_similarity(norm_a: &str, norm_b: &str) -> f64 {
    levenshtein_similarity(norm_a, norm_b).max(jaccard_raw_tokens(norm_a, norm_b))
}

/// Jaccard over already-normalized strings (skips re-normalizing).
fn jaccard_raw_tokens(a: &str, b: &str) -> f64 {
    let ta: std::collections::HashSet<&str> = a.split_whitespace().collect();
    let tb: std::collections::HashSet<&str> = b.split_whitespace().collect();
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    let intersection = ta.intersection(&tb).count();
    let union = ta.len() + tb.len() - intersection;
    intersection as f64 / union as f64
}

struct Candidate {
    similarity: f64,
    left_idx: usize,
    right_idx: usize,
}

/// Link two record sets one-to-one. Phase 1 joins on normalized DOI
/// (similarity 1). Phase 2 scores DOI-unmatched pairs within the same
/// pub_year by max(Levenshtein similarity, Jaccard) over normalized
/// titles, then assigns greedily best-first; ties break on (left_id,
/// right_id) so the result is deterministic.
pub fn link_records(
    left: &[PaperRecord],
    right: &[PaperRecord],
    config: &LinkConfig,
) -> LinkResult {
    let mut left_used = vec![false; left.len()];
    let mut right_used = vec![false; right.len()];
    let mut pairs = Vec::new();

    let mut right_by_doi: HashMap<String, VecDeque<usize>> = HashMap::new();
    for (j, r) in right.iter().enumerate() {
        if let Some(doi) = r.doi.as_deref().and_then(normalize_doi) {
            right_by_doi.entry(doi).or_default().push_back(j);
        }
    }
    for (i, l) in left.iter().enumerate() {
        let Some(doi) = l.doi.as_deref().and_then(normalize_doi) else {
            continue;
        };
        let Some(queue) = right_by_doi.get_mut(&doi) else {
            continue;
        };
        if let Some(j) = queue.pop_front() {
            left_used[i] = true;
            right_used[j] = true;
            pairs.push(LinkPair {
                left_id: l.paper_id.clone(),
                right_id: right[j].paper_id.clone(),
                method: MatchMethod::Doi,
                similarity: 1.0,
            });
        }
    }

    let norm_left: Vec<String> = left.iter().map(|r| normalize_title(&r.title)).collect();
    let norm_right: Vec<String> = right.iter().map(|r| normalize_title(&r.title)).collect();
    let mut blocks: BTreeMap<i32, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, l) in left.iter().enumerate() {
        if !left_used[i] {
            blocks.entry(l.pub_year).or_default().0.push(i);
        }
    }
    for (j, r) in right.iter().enumerate() {
        if !right_used[j] {
            blocks.entry(r.pub_year).or_default().1.push(j);
        }
    }

    let block_list: Vec<&(Vec<usize>, Vec<usize>)> = blocks.values().collect();
    let mut candidates: Vec<Candidate> = block_list
        .par_iter()
        .map(|(lefts, rights)| {
            let mut found = Vec::new();
            for &i in lefts {
                for &j in rights {
                    let similarity = combined_similarity(&norm_left[i], &norm_right[j]);
                    if similarity >= config.sim_threshold {
                        found.push(Candidate {
                            similarity,
                            left_idx: i,
                            right_idx: j,
                        });
                    }
                }
            }
            found
        })
        .flatten()
        .collect();

    candidates.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then_with(|| left[a.left_idx].paper_id.cmp(&left[b.left_idx].paper_id))
            .then_with(|| right[a.right_idx].paper_id.cmp(&right[b.right_idx].paper_id))
    });
    for c in candidates {
        if !left_used[c.left_idx] && !right_used[c.right_idx] {
            left_used[c.left_idx] = true;
            right_used[c.right_idx] = true;
            pairs.push(LinkPair {
                left_id: left[c.left_idx].paper_id.clone(),
                right_id: right[c.right_idx].paper_id.clone(),
                method: MatchMethod::Fuzzy,
                similarity: c.similarity,
            });
        }
    }

    let unmatched_left = left
        .iter()
        .zip(&left_used)
        .filter(|(_, &used)| !used)
        .map(|(r, _)| r.paper_id.clone())
        .collect();
    let unmatched_right = right
        .iter()
        .zip(&right_used)
        .filter(|(_, &used)| !used)
        .map(|(r, _)| r.paper_id.clone())
        .collect();
    LinkResult {
        pairs,
        unmatched_left,
        unmatched_right,
    }
}
