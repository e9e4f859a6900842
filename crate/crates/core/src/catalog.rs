//! Harvested learning resources and the lookup tables built over them.
//!
//! A [`Catalog`] is an immutable snapshot. Re-ingesting produces a new value;
//! nothing mutates one after [`Catalog::build`] returns.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identifier::{normalize_tokens, CanonicalForm, IdentifierError, OpaqueId, ResourceType};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown platform resource label `{0}`")]
    UnknownLabel(String),
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: platform url `{url}` already ingested")]
    DuplicateUrl { line: usize, url: String },
    #[error("line {line}: canonical form `{canonical}` already ingested")]
    DuplicateCanonical { line: usize, canonical: String },
    #[error("opaque id {id} minted for both `{first}` and `{second}`")]
    OpaqueCollision {
        id: OpaqueId,
        first: String,
        second: String,
    },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Maps a platform's resource label onto the seven canonical types.
pub fn map_resource_type(platform_label: &str) -> Result<ResourceType, CatalogError> {
    let t = match platform_label.trim().to_lowercase().as_str() {
        "videos" => ResourceType::Videos,
        "slides" => ResourceType::Slides,
        "exams" | "quizzes" => ResourceType::Exams,
        "transcript" => ResourceType::Transcripts,
        "homeworks" | "assignments" | "assessments" | "exercises" => ResourceType::Assessments,
        "readings" | "articles" => ResourceType::Readings,
        "programming scripts" | "additional materials" => ResourceType::AdditionalResources,
        _ => return Err(CatalogError::UnknownLabel(platform_label.to_string())),
    };
    Ok(t)
}

/// A platform label that maps back onto `t`.
pub fn label_for(t: ResourceType) -> &'static str {
    match t {
        ResourceType::Videos => "videos",
        ResourceType::Slides => "slides",
        ResourceType::Transcripts => "transcript",
        ResourceType::Assessments => "assessments",
        ResourceType::Exams => "exams",
        ResourceType::Readings => "readings",
        ResourceType::AdditionalResources => "additional materials",
    }
}

/// One line of a resource dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub platform: String,
    pub course: String,
    pub session_ms: u64,
    pub instructors: Vec<String>,
    #[serde(default)]
    pub institution: Option<String>,
    pub type_label: String,
    pub slug: String,
    #[serde(default)]
    pub title: Option<String>,
    pub url: String,
    #[serde(default)]
    pub forum_week: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearningResource {
    pub platform: String,
    pub course: String,
    /// Epoch milliseconds UTC.
    pub session: u64,
    pub instructors: Vec<String>,
    pub institution: Option<String>,
    pub resource_type: ResourceType,
    pub slug: String,
    pub title: Option<String>,
    pub platform_url: String,
    pub forum_week: Option<String>,
}

impl LearningResource {
    pub fn from_record(record: ResourceRecord) -> Result<Self, CatalogError> {
        let resource_type = map_resource_type(&record.type_label)?;
        Ok(LearningResource {
            platform: record.platform,
            course: record.course,
            session: record.session_ms,
            instructors: record.instructors,
            institution: record.institution,
            resource_type,
            slug: record.slug,
            title: record.title,
            platform_url: record.url,
            forum_week: record.forum_week,
        })
    }

    pub fn to_record(&self) -> ResourceRecord {
        ResourceRecord {
            platform: self.platform.clone(),
            course: self.course.clone(),
            session_ms: self.session,
            instructors: self.instructors.clone(),
            institution: self.institution.clone(),
            type_label: label_for(self.resource_type).to_string(),
            slug: self.slug.clone(),
            title: self.title.clone(),
            url: self.platform_url.clone(),
            forum_week: self.forum_week.clone(),
        }
    }

    pub fn canonical(&self, host: &str) -> Result<CanonicalForm, IdentifierError> {
        CanonicalForm::new(
            host,
            self.platform.clone(),
            self.course.clone(),
            self.session,
            self.instructors.clone(),
            self.resource_type,
            self.slug.clone(),
        )
    }

    /// Tokens of the slug followed by the title.
    pub fn search_tokens(&self) -> Vec<String> {
        let mut tokens = normalize_tokens(&self.slug);
        if let Some(title) = &self.title {
            tokens.extend(normalize_tokens(title));
        }
        tokens
    }
}

/// A cataloged resource with its identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub resource: LearningResource,
    pub canonical: CanonicalForm,
    pub opaque: OpaqueId,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    host: String,
    entries: Vec<Entry>,
    by_canonical: HashMap<String, usize>,
    by_opaque: HashMap<OpaqueId, usize>,
    by_url: HashMap<String, usize>,
    course_index: HashMap<(String, String), BTreeMap<u64, Vec<usize>>>,
    token_index: HashMap<String, Vec<usize>>,
}

impl Catalog {
    pub fn empty(host: impl Into<String>) -> Catalog {
        Catalog {
            host: host.into(),
            ..Catalog::default()
        }
    }

    /// Parses a JSON Lines resource dump and builds a catalog from it. Blank
    /// lines are skipped; any bad line rejects the whole batch.
    pub fn ingest<R: BufRead>(host: &str, reader: R) -> Result<Catalog, CatalogError> {
        let mut resources = Vec::new();
        let mut lines = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line_no = i + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ResourceRecord = serde_json::from_str(&line).map_err(|e| CatalogError::MalformedRecord {
                line: line_no,
                message: e.to_string(),
            })?;
            let resource = LearningResource::from_record(record).map_err(|e| CatalogError::MalformedRecord {
                line: line_no,
                message: e.to_string(),
            })?;
            resources.push(resource);
            lines.push(line_no);
        }
        Self::build_with_lines(host, resources, &lines)
    }

    /// Builds a catalog from already-parsed resources. Error line numbers are
    /// 1-based positions in `resources`.
    pub fn build(host: &str, resources: Vec<LearningResource>) -> Result<Catalog, CatalogError> {
        let lines: Vec<usize> = (1..=resources.len()).collect();
        Self::build_with_lines(host, resources, &lines)
    }

    fn build_with_lines(
        host: &str,
        resources: Vec<LearningResource>,
        lines: &[usize],
    ) -> Result<Catalog, CatalogError> {
        let mut catalog = Catalog::empty(host);
        for (resource, &line) in resources.into_iter().zip(lines) {
            let malformed = |message: String| CatalogError::MalformedRecord { line, message };
            if resource.platform_url.is_empty() {
                return Err(malformed("url is empty".into()));
            }
            let canonical = resource.canonical(host).map_err(|e| malformed(e.to_string()))?;
            let canonical_text = canonical.to_string();
            let opaque = canonical.mint_opaque();
            let idx = catalog.entries.len();

            if catalog.by_url.contains_key(&resource.platform_url) {
                return Err(CatalogError::DuplicateUrl {
                    line,
                    url: resource.platform_url,
                });
            }
            if catalog.by_canonical.contains_key(&canonical_text) {
                return Err(CatalogError::DuplicateCanonical {
                    line,
                    canonical: canonical_text,
                });
            }
            if let Some(&other) = catalog.by_opaque.get(&opaque) {
                return Err(CatalogError::OpaqueCollision {
                    id: opaque,
                    first: catalog.entries[other].canonical.to_string(),
                    second: canonical_text,
                });
            }

            catalog.by_url.insert(resource.platform_url.clone(), idx);
            catalog.by_canonical.insert(canonical_text, idx);
            catalog.by_opaque.insert(opaque.clone(), idx);
            catalog
                .course_index
                .entry((resource.platform.clone(), resource.course.clone()))
                .or_default()
                .entry(resource.session)
                .or_default()
                .push(idx);
            let mut tokens = resource.search_tokens();
            tokens.sort();
            tokens.dedup();
            for token in tokens {
                catalog.token_index.entry(token).or_default().push(idx);
            }
            catalog.entries.push(Entry {
                resource,
                canonical,
                opaque,
            });
        }
        Ok(catalog)
    }

    /// The resolver authority every canonical form in this catalog carries.
    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn resources(&self) -> impl Iterator<Item = &LearningResource> {
        self.entries.iter().map(|e| &e.resource)
    }

    /// The platform URL a canonical form names.
    pub fn lookup_canonical(&self, canonical: &CanonicalForm) -> Result<&str, CatalogError> {
        let key = canonical.to_string();
        self.by_canonical
            .get(&key)
            .map(|&i| self.entries[i].resource.platform_url.as_str())
            .ok_or(CatalogError::NotFound(key))
    }

    pub fn lookup_opaque(&self, id: &OpaqueId) -> Result<&CanonicalForm, CatalogError> {
        self.by_opaque
            .get(id)
            .map(|&i| &self.entries[i].canonical)
            .ok_or_else(|| CatalogError::NotFound(id.to_string()))
    }

    pub fn lookup_url(&self, url: &str) -> Option<&Entry> {
        self.by_url.get(url).map(|&i| &self.entries[i])
    }

    /// Resources whose slug or title contains `token` (already normalized).
    pub fn lookup_token(&self, token: &str) -> impl Iterator<Item = &Entry> {
        self.token_index
            .get(token)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
    }

    /// Platforms offering a course of this name, sorted.
    pub fn platforms_for_course(&self, course: &str) -> Vec<&str> {
        let mut platforms: Vec<&str> = self
            .course_index
            .keys()
            .filter(|(_, c)| c == course)
            .map(|(p, _)| p.as_str())
            .collect();
        platforms.sort_unstable();
        platforms
    }

    /// Resources of one course offering, narrowed by session and instructors
    /// when given, ordered by `(resource_type, slug, platform_url)`.
    ///
    /// Fails only when the platform/course pair is unknown; filters that
    /// exclude everything yield an empty list.
    pub fn course_context(
        &self,
        platform: &str,
        course: &str,
        session: Option<u64>,
        instructors: Option<&[String]>,
    ) -> Result<Vec<&Entry>, CatalogError> {
        let sessions = self
            .course_index
            .get(&(platform.to_string(), course.to_string()))
            .ok_or_else(|| CatalogError::NotFound(format!("course {platform}/{course}")))?;
        let indices: Box<dyn Iterator<Item = &usize>> = match session {
            Some(s) => Box::new(sessions.get(&s).into_iter().flatten()),
            None => Box::new(sessions.values().flatten()),
        };
        let mut out: Vec<&Entry> = indices
            .map(|&i| &self.entries[i])
            .filter(|e| match instructors {
                Some(names) if !names.is_empty() => e.resource.instructors.iter().any(|n| names.contains(n)),
                _ => true,
            })
            .collect();
        out.sort_by(|a, b| {
            (a.resource.resource_type, &a.resource.slug, &a.resource.platform_url).cmp(&(
                b.resource.resource_type,
                &b.resource.slug,
                &b.resource.platform_url,
            ))
        });
        Ok(out)
    }
}
