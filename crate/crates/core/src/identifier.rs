//! The threefold identifier scheme: short forms, canonical forms and opaque ids.
//!
//! Wire syntax is `host "/" seg ("/" seg)*`. Segment values are UTF-8 and
//! percent-encoded on the wire (space as `%20`, `&` as `%26`, `/` as `%2F`);
//! in memory every field holds the literal, decoded text.

use std::fmt;
use std::str::FromStr;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Characters escaped inside a path segment.
const SEGMENT: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'&')
    .add(b'/')
    .add(b'?');

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentifierError {
    #[error("malformed short form: {0}")]
    MalformedShortForm(String),
    #[error("malformed canonical form: {0}")]
    MalformedCanonical(String),
    #[error("malformed opaque id: {0}")]
    MalformedOpaque(String),
    #[error("unknown resource type `{0}`")]
    UnknownResourceType(String),
}

/// The seven resource categories every learning resource is filed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResourceType {
    Videos,
    Slides,
    Transcripts,
    Assessments,
    Exams,
    Readings,
    AdditionalResources,
}

impl ResourceType {
    pub const ALL: [ResourceType; 7] = [
        ResourceType::Videos,
        ResourceType::Slides,
        ResourceType::Transcripts,
        ResourceType::Assessments,
        ResourceType::Exams,
        ResourceType::Readings,
        ResourceType::AdditionalResources,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceType::Videos => "Videos",
            ResourceType::Slides => "Slides",
            ResourceType::Transcripts => "Transcripts",
            ResourceType::Assessments => "Assessments",
            ResourceType::Exams => "Exams",
            ResourceType::Readings => "Readings",
            ResourceType::AdditionalResources => "AdditionalResources",
        }
    }
}

impl fmt::Display for ResourceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ResourceType {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ResourceType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| IdentifierError::UnknownResourceType(s.to_string()))
    }
}

/// Keywords a short form's resource-type hint may carry, with the type each
/// one denotes.
const TYPE_KEYWORDS: &[(&str, ResourceType)] = &[
    ("lecture", ResourceType::Videos),
    ("video", ResourceType::Videos),
    ("slide", ResourceType::Slides),
    ("slides", ResourceType::Slides),
    ("transcript", ResourceType::Transcripts),
    ("quiz", ResourceType::Exams),
    ("exam", ResourceType::Exams),
    ("test", ResourceType::Exams),
    ("question", ResourceType::Exams),
    ("assignment", ResourceType::Assessments),
    ("homework", ResourceType::Assessments),
    ("exercise", ResourceType::Assessments),
    ("assessment", ResourceType::Assessments),
    ("problem", ResourceType::Assessments),
    ("reading", ResourceType::Readings),
    ("article", ResourceType::Readings),
];

/// Words that designate a course unit (a collection of resources).
pub const UNIT_KEYWORDS: &[&str] = &["week", "module"];

/// Mention words with no resource type of their own.
const OTHER_KEYWORDS: &[&str] = &["lesson"];

/// Every resource-type keyword in the hint lexicon, lowercase.
pub fn type_keywords() -> impl Iterator<Item = &'static str> {
    TYPE_KEYWORDS.iter().map(|(k, _)| *k)
}

/// The full hint vocabulary: type keywords, unit keywords and `lesson`.
pub fn hint_keywords() -> impl Iterator<Item = &'static str> {
    type_keywords()
        .chain(UNIT_KEYWORDS.iter().copied())
        .chain(OTHER_KEYWORDS.iter().copied())
}

/// Maps a short-form hint to the resource type it names. Unknown hints fall
/// into [`ResourceType::AdditionalResources`].
pub fn hint_resource_type(hint: &str) -> ResourceType {
    let hint = hint.to_lowercase();
    TYPE_KEYWORDS
        .iter()
        .find(|(k, _)| *k == hint)
        .map(|(_, t)| *t)
        .unwrap_or(ResourceType::AdditionalResources)
}

/// Whether `segment` reads as a hint keyword (used to tell a forum segment
/// from a type segment in four-segment short forms).
pub fn is_hint_keyword(segment: &str) -> bool {
    let lower = segment.to_lowercase();
    hint_keywords().any(|k| k == lower)
}

/// Percent-encodes one identifier segment for the wire.
pub fn encode_segment(value: &str) -> String {
    utf8_percent_encode(value, SEGMENT).to_string()
}

/// Percent-decodes one segment, rejecting stray `%` and non-UTF-8 results.
pub(crate) fn decode_segment(raw: &str) -> Result<String, String> {
    let bytes = raw.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let ok = bytes.len() > i + 2 && bytes[i + 1].is_ascii_hexdigit() && bytes[i + 2].is_ascii_hexdigit();
            if !ok {
                return Err(format!("invalid percent-escape in `{raw}`"));
            }
            i += 3;
        } else {
            i += 1;
        }
    }
    percent_decode_str(raw)
        .decode_utf8()
        .map(|s| s.into_owned())
        .map_err(|_| format!("segment `{raw}` does not decode to UTF-8"))
}

fn split_segments(text: &str) -> Result<Vec<String>, String> {
    if text.is_empty() {
        return Err("empty identifier".into());
    }
    text.split('/')
        .enumerate()
        .map(|(i, raw)| {
            let seg = decode_segment(raw)?;
            if seg.is_empty() {
                Err(format!("segment {} is empty", i + 1))
            } else {
                Ok(seg)
            }
        })
        .collect()
}

/// A partial, human-guessable identifier that resolves by search.
///
/// Serialized as `host/course[/forum]/hint[/block]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShortForm {
    host: String,
    course: String,
    forum: Option<String>,
    resource_type_hint: String,
    block: Option<String>,
}

impl ShortForm {
    /// Builds a short form, rejecting values whose serialization would parse
    /// back differently.
    pub fn new(
        host: impl Into<String>,
        course: impl Into<String>,
        forum: Option<String>,
        resource_type_hint: impl Into<String>,
        block: Option<String>,
    ) -> Result<Self, IdentifierError> {
        let sf = ShortForm {
            host: host.into(),
            course: course.into(),
            forum,
            resource_type_hint: resource_type_hint.into(),
            block,
        };
        sf.validate()?;
        Ok(sf)
    }

    fn validate(&self) -> Result<(), IdentifierError> {
        let bad = |m: &str| Err(IdentifierError::MalformedShortForm(m.to_string()));
        if self.host.is_empty() {
            return bad("host is empty");
        }
        if self.course.is_empty() {
            return bad("course is empty");
        }
        if self.resource_type_hint.is_empty() {
            return bad("resource type hint is empty");
        }
        if self.forum.as_deref() == Some("") || self.block.as_deref() == Some("") {
            return bad("optional fields must be absent rather than empty");
        }
        match (&self.forum, &self.block) {
            (Some(forum), None) if is_hint_keyword(forum) => {
                bad("forum name collides with a type keyword and would read back as the hint")
            }
            (None, Some(_)) if !is_hint_keyword(&self.resource_type_hint) => {
                bad("hint is not a known keyword and would read back as the forum")
            }
            _ => Ok(()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, IdentifierError> {
        let segs = split_segments(text).map_err(IdentifierError::MalformedShortForm)?;
        let mut it = segs.into_iter();
        let (host, course, forum, hint, block) = match it.len() {
            3 => {
                let (h, c, t) = (it.next(), it.next(), it.next());
                (h, c, None, t, None)
            }
            4 => {
                let (h, c, third, fourth) = (it.next(), it.next(), it.next(), it.next());
                if third.as_deref().is_some_and(is_hint_keyword) {
                    (h, c, None, third, fourth)
                } else {
                    (h, c, third, fourth, None)
                }
            }
            5 => (it.next(), it.next(), it.next(), it.next(), it.next()),
            n => {
                return Err(IdentifierError::MalformedShortForm(format!(
                    "expected 3 to 5 segments, found {n}"
                )))
            }
        };
        Ok(ShortForm {
            host: host.unwrap_or_default(),
            course: course.unwrap_or_default(),
            forum,
            resource_type_hint: hint.unwrap_or_default(),
            block,
        })
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn course(&self) -> &str {
        &self.course
    }

    pub fn forum(&self) -> Option<&str> {
        self.forum.as_deref()
    }

    pub fn resource_type_hint(&self) -> &str {
        &self.resource_type_hint
    }

    pub fn block(&self) -> Option<&str> {
        self.block.as_deref()
    }

    pub fn hinted_type(&self) -> ResourceType {
        hint_resource_type(&self.resource_type_hint)
    }
}

impl fmt::Display for ShortForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", encode_segment(&self.host), encode_segment(&self.course))?;
        if let Some(forum) = &self.forum {
            write!(f, "/{}", encode_segment(forum))?;
        }
        write!(f, "/{}", encode_segment(&self.resource_type_hint))?;
        if let Some(block) = &self.block {
            write!(f, "/{}", encode_segment(block))?;
        }
        Ok(())
    }
}

impl FromStr for ShortForm {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ShortForm::parse(s)
    }
}

/// A fully specified identifier, one-to-one with a platform resource.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    host: String,
    platform: String,
    course: String,
    session: u64,
    instructors: Vec<String>,
    resource_type: ResourceType,
    slug: String,
}

impl CanonicalForm {
    pub fn new(
        host: impl Into<String>,
        platform: impl Into<String>,
        course: impl Into<String>,
        session: u64,
        instructors: Vec<String>,
        resource_type: ResourceType,
        slug: impl Into<String>,
    ) -> Result<Self, IdentifierError> {
        let c = CanonicalForm {
            host: host.into(),
            platform: platform.into(),
            course: course.into(),
            session,
            instructors,
            resource_type,
            slug: slug.into(),
        };
        let bad = |m: &str| Err(IdentifierError::MalformedCanonical(m.to_string()));
        if c.host.is_empty() || c.platform.is_empty() || c.course.is_empty() || c.slug.is_empty() {
            return bad("host, platform, course and slug must be non-empty");
        }
        if c.instructors.is_empty() {
            return bad("at least one instructor is required");
        }
        if c.instructors.iter().any(|i| i.is_empty() || i.contains('&')) {
            return bad("instructor names must be non-empty and must not contain `&`");
        }
        Ok(c)
    }

    pub fn parse(text: &str) -> Result<Self, IdentifierError> {
        let bad = |m: String| IdentifierError::MalformedCanonical(m);
        let segs = split_segments(text).map_err(bad)?;
        let [host, platform, course, session, instructors, rtype, slug]: [String; 7] = segs
            .try_into()
            .map_err(|v: Vec<String>| bad(format!("expected 7 segments, found {}", v.len())))?;
        let canonical_digits = !session.is_empty()
            && session.bytes().all(|b| b.is_ascii_digit())
            && (session == "0" || !session.starts_with('0'));
        if !canonical_digits {
            return Err(bad(format!("session `{session}` is not a decimal integer")));
        }
        let session = session
            .parse::<u64>()
            .map_err(|_| bad(format!("session `{session}` is out of range")))?;
        let resource_type = rtype
            .parse::<ResourceType>()
            .map_err(|_| bad(format!("unknown resource type `{rtype}`")))?;
        let instructors = instructors.split('&').map(str::to_string).collect();
        CanonicalForm::new(host, platform, course, session, instructors, resource_type, slug)
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn platform(&self) -> &str {
        &self.platform
    }

    pub fn course(&self) -> &str {
        &self.course
    }

    /// Session start, epoch milliseconds UTC.
    pub fn session(&self) -> u64 {
        self.session
    }

    pub fn instructors(&self) -> &[String] {
        &self.instructors
    }

    pub fn resource_type(&self) -> ResourceType {
        self.resource_type
    }

    pub fn slug(&self) -> &str {
        &self.slug
    }

    pub fn mint_opaque(&self) -> OpaqueId {
        OpaqueId::mint(self)
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}/{}/{}/{}/{}",
            encode_segment(&self.host),
            encode_segment(&self.platform),
            encode_segment(&self.course),
            self.session,
            encode_segment(&self.instructors.join("&")),
            self.resource_type,
            encode_segment(&self.slug),
        )
    }
}

impl FromStr for CanonicalForm {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CanonicalForm::parse(s)
    }
}

/// Succinct serial identifier: 16 characters over `[a-z0-9]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct OpaqueId(String);

impl OpaqueId {
    pub const LEN: usize = 16;

    /// Derives the id from the canonical serialization: the 128-bit prefix of
    /// its SHA-256 digest, written in base 36 zero-padded to 25 digits, cut
    /// to the leading 16.
    pub fn mint(canonical: &CanonicalForm) -> OpaqueId {
        const ALPHABET: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";
        // 36^25 > 2^128, so 25 digits hold any u128.
        const WIDTH: usize = 25;

        let digest = Sha256::digest(canonical.to_string().as_bytes());
        let mut prefix = [0u8; 16];
        prefix.copy_from_slice(&digest[..16]);
        let mut n = u128::from_be_bytes(prefix);

        let mut digits = [b'0'; WIDTH];
        for slot in digits.iter_mut().rev() {
            *slot = ALPHABET[(n % 36) as usize];
            n /= 36;
        }
        OpaqueId(String::from_utf8_lossy(&digits[..Self::LEN]).into_owned())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for OpaqueId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for OpaqueId {
    type Err = IdentifierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ok = s.len() == Self::LEN && s.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit());
        if ok {
            Ok(OpaqueId(s.to_string()))
        } else {
            Err(IdentifierError::MalformedOpaque(s.to_string()))
        }
    }
}

impl TryFrom<String> for OpaqueId {
    type Error = IdentifierError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<OpaqueId> for String {
    fn from(id: OpaqueId) -> String {
        id.0
    }
}

/// Lowercases `text` and splits it on every non-alphanumeric character.
pub fn normalize_tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}
