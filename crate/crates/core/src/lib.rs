//! Uniform identifiers for MOOC learning resources, and the forum
//! wikification pipeline built on them.
//!
//! Every resource has three kinds of identifier:
//!
//! * a **short form** (`host/course[/forum]/hint[/block]`) that a person can
//!   guess and that resolves by best-effort search,
//! * a **canonical form** (`host/platform/course/session/instructors/type/slug`)
//!   that maps one-to-one onto the platform URL,
//! * an **opaque id**, a 16-character digest of the canonical form.
//!
//! [`catalog`] holds harvested resources, [`resolver`] maps short forms to
//! canonical forms, [`wikifier`] finds mentions in forum posts, and [`eval`]
//! scores the pipeline against gold annotations.

pub mod catalog;
pub mod eval;
pub mod identifier;
pub mod resolver;
pub mod sample;
pub mod store;
pub mod synth;
pub mod wikifier;

pub use catalog::{map_resource_type, Catalog, CatalogError, Entry, LearningResource, ResourceRecord};
pub use identifier::{normalize_tokens, CanonicalForm, IdentifierError, OpaqueId, ResourceType, ShortForm};
pub use resolver::{
    resolve, resolve_to_url, score_candidate, PostContext, ResolutionResult, ResolveError, Resolver, Score,
};
pub use wikifier::{
    estimate_keyword_prevalence, extract_mentions, generate_short_form, wikify_post, AnnotatedPost, ForumPost, Mention,
};
