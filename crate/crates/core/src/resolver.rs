//! Best-effort resolution of short forms to canonical forms and platform URLs.
//!
//! Candidates come from the course context of the post that carried the
//! mention. Each is scored as
//!
//! ```text
//! score = 1/2 * type + 2/5 * block + 1/10 * overlap
//! ```
//!
//! where `type` is 1 when the hint's type equals the resource's type, `block`
//! is 1 for a contiguous run of the block tokens in the slug (1/2 when they
//! all appear but apart), and `overlap` is the share of hint and block tokens
//! found in the slug or title. The best candidate must reach 1/2.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Catalog, CatalogError, Entry, LearningResource};
use crate::identifier::{normalize_tokens, CanonicalForm, ShortForm};

/// Peripheral facts about the post a short form came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostContext {
    pub platform: String,
    pub course: String,
    /// Epoch milliseconds UTC; `None` matches every session.
    pub session: Option<u64>,
    /// Empty means no instructor filter.
    pub instructors: Vec<String>,
    pub forum: Option<String>,
}

/// An exact score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(Ratio<u64>);

impl Score {
    pub const ZERO: Score = Score(Ratio::new_raw(0, 1));
    pub const ONE: Score = Score(Ratio::new_raw(1, 1));

    pub fn new(numer: u64, denom: u64) -> Score {
        Score(Ratio::new(numer, denom))
    }

    pub fn ratio(self) -> Ratio<u64> {
        self.0
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.to_f64())
    }
}

const TYPE_WEIGHT: Ratio<u64> = Ratio::new_raw(1, 2);
const BLOCK_WEIGHT: Ratio<u64> = Ratio::new_raw(2, 5);
const OVERLAP_WEIGHT: Ratio<u64> = Ratio::new_raw(1, 10);

pub const DEFAULT_THRESHOLD: Score = Score(Ratio::new_raw(1, 2));

/// How well `resource` matches the hint and block of `sf`.
pub fn score_candidate(resource: &LearningResource, sf: &ShortForm) -> Score {
    let type_score = if sf.hinted_type() == resource.resource_type {
        Ratio::from_integer(1)
    } else {
        Ratio::from_integer(0)
    };

    let block_tokens = sf.block().map(normalize_tokens).unwrap_or_default();
    let slug_tokens = normalize_tokens(&resource.slug);
    let block_score = if block_tokens.is_empty() {
        Ratio::from_integer(0)
    } else if slug_tokens
        .windows(block_tokens.len())
        .any(|w| w == block_tokens.as_slice())
    {
        Ratio::from_integer(1)
    } else if block_tokens.iter().all(|t| slug_tokens.contains(t)) {
        Ratio::new(1, 2)
    } else {
        Ratio::from_integer(0)
    };

    let query: BTreeSet<String> = normalize_tokens(sf.resource_type_hint())
        .into_iter()
        .chain(block_tokens)
        .collect();
    let overlap = if query.is_empty() {
        Ratio::from_integer(0)
    } else {
        let doc: BTreeSet<String> = resource.search_tokens().into_iter().collect();
        let shared = query.intersection(&doc).count() as u64;
        Ratio::new(shared, query.len() as u64)
    };

    Score(TYPE_WEIGHT * type_score + BLOCK_WEIGHT * block_score + OVERLAP_WEIGHT * overlap)
}

#[derive(Debug, Clone)]
pub struct ScoredCandidate<'a> {
    pub entry: &'a Entry,
    pub score: Score,
    /// Whether the resource's week label equals the short form's or post's
    /// forum.
    pub forum_match: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionResult {
    pub canonical: CanonicalForm,
    pub platform_url: String,
    pub score: Score,
    /// Two or more candidates shared the top score before tie-breaking.
    pub ambiguous: bool,
}

#[derive(Debug, Error)]
pub enum ResolveError {
    #[error("no candidate resources for {platform}/{course}")]
    NoCandidates { platform: String, course: String },
    #[error("best candidate scored {best}, below the acceptance threshold")]
    NoPlausibleMatch { best: Score },
    #[error("resolved canonical form has no platform url: {0}")]
    Inconsistent(String),
}

/// Orders candidates best first: score, then forum agreement, then slug,
/// then URL.
fn rank_order(a: &ScoredCandidate<'_>, b: &ScoredCandidate<'_>) -> Ordering {
    b.score
        .cmp(&a.score)
        .then_with(|| b.forum_match.cmp(&a.forum_match))
        .then_with(|| a.entry.resource.slug.cmp(&b.entry.resource.slug))
        .then_with(|| a.entry.resource.platform_url.cmp(&b.entry.resource.platform_url))
}

#[derive(Debug, Clone, Copy)]
pub struct Resolver {
    threshold: Score,
}

impl Default for Resolver {
    fn default() -> Self {
        Resolver {
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl Resolver {
    pub fn with_threshold(threshold: Score) -> Resolver {
        Resolver { threshold }
    }

    pub fn threshold(&self) -> Score {
        self.threshold
    }

    /// The course context of the short form, best candidate first.
    ///
    /// The short form's course wins over the post's. If the session filter
    /// leaves nothing, the lookup is retried once across all sessions.
    pub fn rank<'a>(
        &self,
        sf: &ShortForm,
        ctx: &PostContext,
        catalog: &'a Catalog,
    ) -> Result<Vec<ScoredCandidate<'a>>, ResolveError> {
        let course = sf.course();
        let no_candidates = || ResolveError::NoCandidates {
            platform: ctx.platform.clone(),
            course: course.to_string(),
        };
        let instructors = Some(ctx.instructors.as_slice());
        let lookup = |session| match catalog.course_context(&ctx.platform, course, session, instructors) {
            Ok(v) => Ok(v),
            Err(CatalogError::NotFound(_)) => Err(no_candidates()),
            Err(e) => Err(ResolveError::Inconsistent(e.to_string())),
        };
        let mut entries = lookup(ctx.session)?;
        if entries.is_empty() && ctx.session.is_some() {
            entries = lookup(None)?;
        }
        if entries.is_empty() {
            return Err(no_candidates());
        }

        let forums: Vec<&str> = sf.forum().into_iter().chain(ctx.forum.as_deref()).collect();
        let mut scored: Vec<ScoredCandidate<'a>> = entries
            .into_iter()
            .map(|entry| ScoredCandidate {
                entry,
                score: score_candidate(&entry.resource, sf),
                forum_match: entry
                    .resource
                    .forum_week
                    .as_deref()
                    .is_some_and(|w| forums.contains(&w)),
            })
            .collect();
        scored.sort_by(rank_order);
        Ok(scored)
    }

    pub fn resolve(
        &self,
        sf: &ShortForm,
        ctx: &PostContext,
        catalog: &Catalog,
    ) -> Result<ResolutionResult, ResolveError> {
        let ranked = self.rank(sf, ctx, catalog)?;
        let best = &ranked[0];
        if best.score < self.threshold {
            return Err(ResolveError::NoPlausibleMatch { best: best.score });
        }
        let ambiguous = ranked.get(1).is_some_and(|c| c.score == best.score);
        Ok(ResolutionResult {
            canonical: best.entry.canonical.clone(),
            platform_url: best.entry.resource.platform_url.clone(),
            score: best.score,
            ambiguous,
        })
    }

    /// Resolves and then follows the canonical form to its platform URL.
    pub fn resolve_to_url(&self, sf: &ShortForm, ctx: &PostContext, catalog: &Catalog) -> Result<String, ResolveError> {
        let result = self.resolve(sf, ctx, catalog)?;
        catalog
            .lookup_canonical(&result.canonical)
            .map(str::to_string)
            .map_err(|_| ResolveError::Inconsistent(result.canonical.to_string()))
    }
}

pub fn resolve(sf: &ShortForm, ctx: &PostContext, catalog: &Catalog) -> Result<ResolutionResult, ResolveError> {
    Resolver::default().resolve(sf, ctx, catalog)
}

pub fn resolve_to_url(sf: &ShortForm, ctx: &PostContext, catalog: &Catalog) -> Result<String, ResolveError> {
    Resolver::default().resolve_to_url(sf, ctx, catalog)
}
