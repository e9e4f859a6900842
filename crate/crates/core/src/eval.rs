//! Coverage and resolution-precision evaluation against gold annotations.
//!
//! Counts are integers; every percentage is computed from the exact ratio
//! and rounded half-up to one decimal.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::identifier::ResourceType;
use crate::resolver::Resolver;
use crate::wikifier::{extract_mentions, generate_short_form, scan_mentions, ForumPost};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("gold annotations reference unknown post `{0}`")]
    MissingPost(String),
    #[error("gold span [{start}, {end}) is outside post `{post_id}`")]
    BadSpan { post_id: String, start: usize, end: usize },
    #[error("gold url `{0}` is not in the catalog")]
    UnknownGoldUrl(String),
}

/// `num / den` as a percentage in tenths, rounded half-up. Zero when `den`
/// is zero.
pub fn percent_tenths(num: u64, den: u64) -> u64 {
    if den == 0 {
        return 0;
    }
    let (num, den) = (num as u128, den as u128);
    ((2000 * num + den) / (2 * den)) as u64
}

/// `num / den` as a percentage with one decimal, e.g. `"18.0"`.
pub fn format_percent(num: u64, den: u64) -> String {
    let t = percent_tenths(num, den);
    format!("{}.{}", t / 10, t % 10)
}

fn percent_value(num: u64, den: u64) -> f64 {
    percent_tenths(num, den) as f64 / 10.0
}

/// Gold mention spans: annotator name → post id → `[start, end]` pairs.
pub type GoldMentions = BTreeMap<String, BTreeMap<String, Vec<[usize; 2]>>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub annotator: String,
    pub posts: u64,
    pub posts_with_mentions: u64,
    pub gold_mentions: u64,
    pub extracted: u64,
    pub extracted_correct: u64,
    pub posts_with_mentions_pct: f64,
    pub wikifier_recall_pct: f64,
}

impl CoverageRow {
    pub fn from_counts(
        annotator: impl Into<String>,
        posts: u64,
        posts_with_mentions: u64,
        gold_mentions: u64,
        extracted: u64,
        extracted_correct: u64,
    ) -> CoverageRow {
        CoverageRow {
            annotator: annotator.into(),
            posts,
            posts_with_mentions,
            gold_mentions,
            extracted,
            extracted_correct,
            posts_with_mentions_pct: percent_value(posts_with_mentions, posts),
            wikifier_recall_pct: percent_value(extracted_correct, gold_mentions),
        }
    }
}

/// One coverage row per annotator plus a `union` row.
///
/// A predicted span is correct only when it equals a gold span exactly.
pub fn eval_coverage(posts: &[ForumPost], gold: &GoldMentions) -> Result<Vec<CoverageRow>, EvalError> {
    let known: HashMap<&str, &ForumPost> = posts.iter().map(|p| (p.post_id.as_str(), p)).collect();
    for per_post in gold.values() {
        if let Some(id) = per_post.keys().find(|id| !known.contains_key(id.as_str())) {
            return Err(EvalError::MissingPost(id.clone()));
        }
    }

    let predicted: HashMap<&str, Vec<(usize, usize)>> = posts
        .iter()
        .map(|p| {
            let spans = extract_mentions(p).into_iter().map(|m| (m.start, m.end)).collect();
            (p.post_id.as_str(), spans)
        })
        .collect();
    let extracted: u64 = predicted.values().map(|v| v.len() as u64).sum();
    let total_posts = posts.len() as u64;

    let row = |name: &str, spans: &BTreeMap<&str, BTreeSet<(usize, usize)>>| {
        let with_mentions = spans.values().filter(|s| !s.is_empty()).count() as u64;
        let gold_mentions = spans.values().map(|s| s.len() as u64).sum();
        let correct = spans
            .iter()
            .map(|(id, set)| {
                predicted
                    .get(id)
                    .map(|p| p.iter().filter(|span| set.contains(span)).count() as u64)
                    .unwrap_or(0)
            })
            .sum();
        CoverageRow::from_counts(name, total_posts, with_mentions, gold_mentions, extracted, correct)
    };

    let mut rows = Vec::new();
    let mut union: BTreeMap<&str, BTreeSet<(usize, usize)>> = BTreeMap::new();
    for (annotator, per_post) in gold {
        let mut spans: BTreeMap<&str, BTreeSet<(usize, usize)>> = BTreeMap::new();
        for (id, list) in per_post {
            let set: BTreeSet<(usize, usize)> = list.iter().map(|[s, e]| (*s, *e)).collect();
            union.entry(id.as_str()).or_default().extend(set.iter().copied());
            spans.insert(id.as_str(), set);
        }
        rows.push(row(annotator, &spans));
    }
    rows.push(row("union", &union));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldLink {
    pub start: usize,
    pub end: usize,
    pub url: String,
}

/// Gold links: post id → linked spans with their target URL.
pub type GoldLinks = BTreeMap<String, Vec<GoldLink>>;

/// Which post context a mention is resolved with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextMode {
    /// Only the post's own metadata.
    MentionOnly,
    /// The post's metadata, with a missing forum taken from the first post in
    /// the same thread that has one.
    Thread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionRow {
    /// A resource type name, or `Total`.
    pub resource: String,
    pub instances: u64,
    pub correct: u64,
    pub precision_pct: f64,
}

impl ResolutionRow {
    pub fn from_counts(resource: impl Into<String>, instances: u64, correct: u64) -> ResolutionRow {
        ResolutionRow {
            resource: resource.into(),
            instances,
            correct,
            precision_pct: percent_value(correct, instances),
        }
    }
}

/// Rows for each type with at least one instance, then a `Total` row that
/// sums them.
pub fn resolution_rows(counts: &BTreeMap<ResourceType, (u64, u64)>) -> Vec<ResolutionRow> {
    let mut rows: Vec<ResolutionRow> = counts
        .iter()
        .filter(|(_, (n, _))| *n > 0)
        .map(|(t, (n, c))| ResolutionRow::from_counts(t.as_str(), *n, *c))
        .collect();
    let instances = rows.iter().map(|r| r.instances).sum();
    let correct = rows.iter().map(|r| r.correct).sum();
    rows.push(ResolutionRow::from_counts("Total", instances, correct));
    rows
}

/// Resolves every gold-linked span and compares the URL with the gold one.
///
/// Rows are grouped by the resource type of the gold target. A gold span that
/// the mention grammar cannot read counts as an incorrect instance.
pub fn eval_resolution(
    posts: &[ForumPost],
    catalog: &Catalog,
    gold: &GoldLinks,
    mode: ContextMode,
    resolver_host: &str,
) -> Result<Vec<ResolutionRow>, EvalError> {
    let by_id: HashMap<&str, &ForumPost> = posts.iter().map(|p| (p.post_id.as_str(), p)).collect();
    let mut thread_forum: HashMap<&str, &str> = HashMap::new();
    for p in posts {
        if let (Some(t), Some(f)) = (p.thread_id.as_deref(), p.context.forum.as_deref()) {
            thread_forum.entry(t).or_insert(f);
        }
    }
    let resolver = Resolver::default();

    let mut counts: BTreeMap<ResourceType, (u64, u64)> = BTreeMap::new();
    for (post_id, links) in gold {
        let post = by_id
            .get(post_id.as_str())
            .ok_or_else(|| EvalError::MissingPost(post_id.clone()))?;
        let mut post = (*post).clone();
        if mode == ContextMode::Thread && post.context.forum.is_none() {
            if let Some(f) = post.thread_id.as_deref().and_then(|t| thread_forum.get(t)) {
                post.context.forum = Some(f.to_string());
            }
        }
        let chars: Vec<char> = post.body.chars().collect();

        for link in links {
            if link.start >= link.end || link.end > chars.len() {
                return Err(EvalError::BadSpan {
                    post_id: post_id.clone(),
                    start: link.start,
                    end: link.end,
                });
            }
            let target = catalog
                .lookup_url(&link.url)
                .ok_or_else(|| EvalError::UnknownGoldUrl(link.url.clone()))?;
            let surface: String = chars[link.start..link.end].iter().collect();
            let resolved = scan_mentions(&surface)
                .into_iter()
                .find(|m| !m.is_unit())
                .and_then(|m| generate_short_form(&m, &post, resolver_host).ok())
                .and_then(|sf| resolver.resolve_to_url(&sf, &post.context, catalog).ok());

            let slot = counts.entry(target.resource.resource_type).or_default();
            slot.0 += 1;
            if resolved.as_deref() == Some(link.url.as_str()) {
                slot.1 += 1;
            }
        }
    }
    Ok(resolution_rows(&counts))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub coverage: Vec<CoverageRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution_mention_only: Option<Vec<ResolutionRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution_thread: Option<Vec<ResolutionRow>>,
}
