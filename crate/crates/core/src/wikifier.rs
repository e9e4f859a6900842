//! Forum wikification: find resource mentions in post bodies, turn each into
//! a short form, and optionally resolve it.
//!
//! A mention is a keyword followed by whitespace and a numeric designator of
//! one or two 1-3 digit components joined by `.` or `-` ("Quiz 2",
//! "lecture 2.4"). Spans are character offsets, half-open, into the body.

use std::collections::HashSet;
use std::io::BufRead;
use std::sync::LazyLock;

use num_rational::Ratio;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;
use crate::identifier::{hint_keywords, IdentifierError, ShortForm, UNIT_KEYWORDS};
use crate::resolver::{resolve, PostContext, ResolutionResult};

static MENTION: LazyLock<Regex> = LazyLock::new(|| {
    let mut words: Vec<&str> = hint_keywords().collect();
    // longest first so `slides` is tried before `slide`
    words.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
    Regex::new(&format!(
        r"(?i)\b({})\s+([0-9]{{1,3}})(?:[.-]([0-9]{{1,3}}))?\b",
        words.join("|")
    ))
    .expect("mention pattern compiles")
});

#[derive(Debug, Error)]
pub enum PostError {
    #[error("line {line}: malformed post: {message}")]
    Malformed { line: usize, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForumPost {
    pub post_id: String,
    pub body: String,
    pub context: PostContext,
    pub thread_id: Option<String>,
}

/// One line of a forum post dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostRecord {
    pub post_id: String,
    pub body: String,
    pub platform: String,
    pub course: String,
    pub session_ms: u64,
    pub instructors: Vec<String>,
    #[serde(default)]
    pub forum: Option<String>,
    #[serde(default)]
    pub thread_id: Option<String>,
}

impl ForumPost {
    pub fn from_record(r: PostRecord) -> Result<ForumPost, String> {
        if r.body.is_empty() {
            return Err("body is empty".into());
        }
        if r.platform.is_empty() || r.course.is_empty() {
            return Err("platform and course must be non-empty".into());
        }
        Ok(ForumPost {
            post_id: r.post_id,
            body: r.body,
            context: PostContext {
                platform: r.platform,
                course: r.course,
                session: Some(r.session_ms),
                instructors: r.instructors,
                forum: r.forum,
            },
            thread_id: r.thread_id,
        })
    }
}

/// Reads a JSON Lines post dump, skipping blank lines.
pub fn read_posts<R: BufRead>(reader: R) -> Result<Vec<ForumPost>, PostError> {
    let mut posts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| PostError::Malformed { line: i + 1, message };
        let record: PostRecord = serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
        posts.push(ForumPost::from_record(record).map_err(malformed)?);
    }
    Ok(posts)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    /// Character offset of the first character.
    pub start: usize,
    /// Character offset one past the last character.
    pub end: usize,
    pub surface: String,
    /// Lowercased keyword.
    pub keyword: String,
    pub numeric: Vec<u32>,
}

impl Mention {
    pub fn is_unit(&self) -> bool {
        UNIT_KEYWORDS.contains(&self.keyword.as_str())
    }
}

/// `5:00` after a keyword is a timestamp, not a designator.
fn is_clock_time(rest: &str) -> bool {
    let mut chars = rest.chars();
    chars.next() == Some(':') && chars.next().is_some_and(|c| c.is_ascii_digit())
}

/// Every match of the mention grammar in `text`, in document order,
/// including unit references such as "week 3".
pub fn scan_mentions(text: &str) -> Vec<Mention> {
    let mut out = Vec::new();
    let (mut byte_pos, mut char_pos) = (0usize, 0usize);
    for caps in MENTION.captures_iter(text) {
        let whole = caps.get(0).expect("group 0 always matches");
        char_pos += text[byte_pos..whole.start()].chars().count();
        let start = char_pos;
        char_pos += whole.as_str().chars().count();
        byte_pos = whole.end();
        if is_clock_time(&text[whole.end()..]) {
            continue;
        }

        let numeric = [caps.get(2), caps.get(3)]
            .into_iter()
            .flatten()
            .map(|m| m.as_str().parse::<u32>().expect("at most three ascii digits"))
            .collect();
        out.push(Mention {
            start,
            end: char_pos,
            surface: whole.as_str().to_string(),
            keyword: caps[1].to_lowercase(),
            numeric,
        });
    }
    out
}

/// Single, concrete, within-course resource mentions in the post body.
///
/// Unit references ("week 3", "module 2") name a collection of resources, not
/// one resource, and are left out.
pub fn extract_mentions(post: &ForumPost) -> Vec<Mention> {
    scan_mentions(&post.body).into_iter().filter(|m| !m.is_unit()).collect()
}

fn join_numeric(numeric: &[u32]) -> String {
    numeric.iter().map(u32::to_string).collect::<Vec<_>>().join("-")
}

/// Builds the short form for a mention, filling course and forum from the
/// post. Unit mentions name the forum (`Week N`) instead of a block.
pub fn generate_short_form(
    mention: &Mention,
    post: &ForumPost,
    resolver_host: &str,
) -> Result<ShortForm, IdentifierError> {
    let (forum, block) = if mention.is_unit() {
        (Some(format!("Week {}", join_numeric(&mention.numeric))), None)
    } else {
        (post.context.forum.clone(), Some(join_numeric(&mention.numeric)))
    };
    ShortForm::new(
        resolver_host,
        post.context.course.clone(),
        forum,
        mention.keyword.clone(),
        block,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedMention {
    pub mention: Mention,
    pub short_form: ShortForm,
    /// `None` when linking was deferred or the short form did not resolve.
    pub resolution: Option<ResolutionResult>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedPost {
    pub post_id: String,
    pub body: String,
    pub mentions: Vec<LinkedMention>,
}

/// Extracts mentions and mints a short form for each. With `link_now`, each
/// short form is also resolved; resolution failures leave that mention
/// unlinked.
pub fn wikify_post(
    post: &ForumPost,
    catalog: &Catalog,
    resolver_host: &str,
    link_now: bool,
) -> Result<AnnotatedPost, IdentifierError> {
    let mentions = extract_mentions(post)
        .into_iter()
        .map(|mention| {
            let short_form = generate_short_form(&mention, post, resolver_host)?;
            let resolution = if link_now {
                resolve(&short_form, &post.context, catalog).ok()
            } else {
                None
            };
            Ok(LinkedMention {
                mention,
                short_form,
                resolution,
            })
        })
        .collect::<Result<Vec<_>, IdentifierError>>()?;
    Ok(AnnotatedPost {
        post_id: post.post_id.clone(),
        body: post.body.clone(),
        mentions,
    })
}

/// One line of annotated output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedRecord {
    pub post_id: String,
    pub mentions: Vec<AnnotatedMentionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedMentionRecord {
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub short_form: String,
    pub resolved_url: Option<String>,
    pub ambiguous: Option<bool>,
}

impl From<&AnnotatedPost> for AnnotatedRecord {
    fn from(post: &AnnotatedPost) -> Self {
        AnnotatedRecord {
            post_id: post.post_id.clone(),
            mentions: post
                .mentions
                .iter()
                .map(|m| AnnotatedMentionRecord {
                    start: m.mention.start,
                    end: m.mention.end,
                    surface: m.mention.surface.clone(),
                    short_form: m.short_form.to_string(),
                    resolved_url: m.resolution.as_ref().map(|r| r.platform_url.clone()),
                    ambiguous: m.resolution.as_ref().map(|r| r.ambiguous),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prevalence {
    pub matching_posts: u64,
    pub total_posts: u64,
}

impl Prevalence {
    /// `matching / total`, zero for an empty stream.
    pub fn fraction(&self) -> Ratio<u64> {
        if self.total_posts == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.matching_posts, self.total_posts)
        }
    }
}

/// Counts posts that contain a lexicon keyword as a whole word, skipping
/// posts in the excluded forums (compared case-insensitively).
///
/// A word is a maximal run of letters, so "week3" contains the word "week"
/// while "questions" does not contain "question".
pub fn estimate_keyword_prevalence<'a, I>(posts: I, exclude_forums: &[String]) -> Prevalence
where
    I: IntoIterator<Item = &'a ForumPost>,
{
    let excluded: HashSet<String> = exclude_forums.iter().map(|f| f.to_lowercase()).collect();
    let keywords: HashSet<&str> = hint_keywords().collect();
    let mut prevalence = Prevalence {
        matching_posts: 0,
        total_posts: 0,
    };
    for post in posts {
        let skip = post
            .context
            .forum
            .as_ref()
            .is_some_and(|f| excluded.contains(&f.to_lowercase()));
        if skip {
            continue;
        }
        prevalence.total_posts += 1;
        let lower = post.body.to_lowercase();
        let hit = lower.split(|c: char| !c.is_alphabetic()).any(|w| keywords.contains(w));
        if hit {
            prevalence.matching_posts += 1;
        }
    }
    prevalence
}
