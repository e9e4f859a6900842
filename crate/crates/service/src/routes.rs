// Handlers bail out early with a ready-made error response.
#![allow(clippy::result_large_err)]

use std::sync::Arc;

use axum::body::Body;
use axum::extract::{RawQuery, State};
use axum::http::{header, HeaderValue, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use muir_core::catalog::{Catalog, CatalogError};
use muir_core::identifier::{encode_segment, is_hint_keyword, CanonicalForm, OpaqueId, ShortForm};
use muir_core::normalize_tokens;
use muir_core::resolver::{PostContext, ResolveError, Resolver};
use serde::Serialize;

use crate::AppState;

pub const CANONICAL_HEADER: &str = "x-muir-canonical";
pub const AMBIGUOUS_HEADER: &str = "x-muir-ambiguous";

const NEAR_MISSES: usize = 3;
const DEFAULT_K: usize = 10;

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/search", get(search))
        .fallback(resolve_path)
        .with_state(state)
}

#[derive(Debug, Serialize)]
struct ScoredRow {
    canonical: String,
    url: String,
    score: f64,
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    near_misses: Option<Vec<ScoredRow>>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    let body = ErrorBody {
        error: message.into(),
        near_misses: None,
    };
    (status, Json(body)).into_response()
}

fn not_found(message: impl Into<String>, near_misses: Vec<ScoredRow>) -> Response {
    let body = ErrorBody {
        error: message.into(),
        near_misses: Some(near_misses),
    };
    (StatusCode::NOT_FOUND, Json(body)).into_response()
}

fn redirect(url: &str, canonical: &CanonicalForm, ambiguous: Option<bool>) -> Response {
    let (Ok(location), Ok(canonical)) = (
        HeaderValue::from_str(url),
        HeaderValue::from_str(&canonical.to_string()),
    ) else {
        return error(
            StatusCode::INTERNAL_SERVER_ERROR,
            format!("url `{url}` is not a valid header value"),
        );
    };
    let mut builder = Response::builder()
        .status(StatusCode::FOUND)
        .header(header::LOCATION, location)
        .header(CANONICAL_HEADER, canonical);
    if let Some(a) = ambiguous {
        builder = builder.header(AMBIGUOUS_HEADER, if a { "true" } else { "false" });
    }
    builder.body(Body::empty()).expect("static header names are valid")
}

async fn healthz() -> &'static str {
    "ok"
}

/// Decoded query pairs, in order.
struct Query(Vec<(String, String)>);

impl Query {
    fn parse(raw: Option<&str>) -> Query {
        Query(
            form_urlencoded::parse(raw.unwrap_or("").as_bytes())
                .into_owned()
                .collect(),
        )
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a str> {
        self.0.iter().filter(move |(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn session(&self) -> Result<Option<u64>, Response> {
        match self.get("session_ms") {
            None | Some("") => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| error(StatusCode::BAD_REQUEST, format!("session_ms `{s}` is not an integer"))),
        }
    }

    /// `instructors` may repeat and each value may hold several names joined
    /// with `&`.
    fn instructors(&self) -> Option<Vec<String>> {
        let names: Vec<String> = self
            .all("instructors")
            .flat_map(|v| v.split('&'))
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(str::to_string)
            .collect();
        (self.get("instructors").is_some()).then_some(names)
    }
}

fn scored_rows(catalog: &Catalog, sf: &ShortForm, ctx: &PostContext, k: usize) -> Vec<ScoredRow> {
    Resolver::default()
        .rank(sf, ctx, catalog)
        .map(|ranked| {
            ranked
                .into_iter()
                .take(k)
                .map(|c| ScoredRow {
                    canonical: c.entry.canonical.to_string(),
                    url: c.entry.resource.platform_url.clone(),
                    score: c.score.to_f64(),
                })
                .collect()
        })
        .unwrap_or_default()
}

async fn resolve_path(
    State(state): State<Arc<AppState>>,
    method: Method,
    uri: Uri,
    RawQuery(raw): RawQuery,
) -> Response {
    if method != Method::GET && method != Method::HEAD {
        return error(StatusCode::METHOD_NOT_ALLOWED, "only GET is supported");
    }
    let catalog = state.catalog();
    let host = state.host();
    let path = uri.path().trim_start_matches('/');
    let segments: Vec<&str> = path.split('/').collect();

    match segments.as_slice() {
        ["id", id] => handle_opaque(&catalog, id),
        _ if segments.len() == 7 => handle_canonical(&catalog, path),
        [first, rest @ ..] if *first == host && (2..=4).contains(&rest.len()) => {
            handle_short_form(&state, &catalog, rest, &Query::parse(raw.as_deref()))
        }
        _ if (2..=4).contains(&segments.len()) && segments[0] != host => {
            handle_short_form(&state, &catalog, &segments, &Query::parse(raw.as_deref()))
        }
        _ => error(
            StatusCode::BAD_REQUEST,
            format!("`/{path}` is neither /id/<opaque>, a 7-segment canonical form nor a short form"),
        ),
    }
}

fn handle_opaque(catalog: &Catalog, raw: &str) -> Response {
    let id: OpaqueId = match raw.parse() {
        Ok(id) => id,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let canonical = match catalog.lookup_opaque(&id) {
        Ok(c) => c,
        Err(e) => return not_found(e.to_string(), Vec::new()),
    };
    match catalog.lookup_canonical(canonical) {
        Ok(url) => redirect(url, canonical, None),
        Err(e) => not_found(e.to_string(), Vec::new()),
    }
}

fn handle_canonical(catalog: &Catalog, path: &str) -> Response {
    let canonical = match CanonicalForm::parse(path) {
        Ok(c) => c,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    match catalog.lookup_canonical(&canonical) {
        Ok(url) => redirect(url, &canonical, None),
        Err(CatalogError::NotFound(m)) => not_found(format!("not found: {m}"), Vec::new()),
        Err(e) => not_found(e.to_string(), Vec::new()),
    }
}

/// Post context from `post_id` (when the service knows the post) overlaid
/// with explicit query parameters.
fn post_context(state: &AppState, course: &str, query: &Query) -> Result<PostContext, Response> {
    let mut ctx = query
        .get("post_id")
        .and_then(|id| state.post_context(id))
        .unwrap_or_else(|| PostContext {
            platform: String::new(),
            course: course.to_string(),
            session: None,
            instructors: Vec::new(),
            forum: None,
        });
    if let Some(p) = query.get("platform").filter(|p| !p.is_empty()) {
        ctx.platform = p.to_string();
    }
    if let Some(s) = query.session()? {
        ctx.session = Some(s);
    }
    if let Some(names) = query.instructors() {
        ctx.instructors = names;
    }
    if let Some(f) = query.get("forum").filter(|f| !f.is_empty()) {
        ctx.forum = Some(f.to_string());
    }
    ctx.course = course.to_string();
    Ok(ctx)
}

/// Fills in the platform from the catalog when the course is offered on
/// exactly one.
fn infer_platform(catalog: &Catalog, ctx: &mut PostContext) -> Result<(), Response> {
    if !ctx.platform.is_empty() {
        return Ok(());
    }
    match catalog.platforms_for_course(&ctx.course).as_slice() {
        [] => Err(not_found(
            format!("no resources for course `{}`", ctx.course),
            Vec::new(),
        )),
        [only] => {
            ctx.platform = only.to_string();
            Ok(())
        }
        many => Err(error(
            StatusCode::BAD_REQUEST,
            format!("course `{}` runs on {}; pass platform=", ctx.course, many.join(", ")),
        )),
    }
}

fn handle_short_form(state: &AppState, catalog: &Catalog, segments: &[&str], query: &Query) -> Response {
    // `/lecture/2-5?course=x` leaves the course to the query string.
    let mut parts: Vec<String> = vec![state.host().to_string()];
    if let Some(course) = query.get("course").filter(|c| !c.is_empty()) {
        if is_hint_keyword(segments[0]) {
            parts.push(encode_segment(course));
        }
    }
    parts.extend(segments.iter().map(|s| s.to_string()));
    if !(3..=5).contains(&parts.len()) {
        return error(StatusCode::BAD_REQUEST, "a short form has three to five segments");
    }
    let sf = match ShortForm::parse(&parts.join("/")) {
        Ok(sf) => sf,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let mut ctx = match post_context(state, sf.course(), query) {
        Ok(ctx) => ctx,
        Err(r) => return r,
    };
    if let Err(r) = infer_platform(catalog, &mut ctx) {
        return r;
    }

    let resolver = Resolver::default();
    match resolver.resolve(&sf, &ctx, catalog) {
        Ok(result) => match catalog.lookup_canonical(&result.canonical) {
            Ok(url) => redirect(url, &result.canonical, Some(result.ambiguous)),
            Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        },
        Err(e @ ResolveError::NoCandidates { .. }) => not_found(e.to_string(), Vec::new()),
        Err(e @ ResolveError::NoPlausibleMatch { .. }) => {
            not_found(e.to_string(), scored_rows(catalog, &sf, &ctx, NEAR_MISSES))
        }
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn search(State(state): State<Arc<AppState>>, RawQuery(raw): RawQuery) -> Response {
    let query = Query::parse(raw.as_deref());
    let (Some(platform), Some(course)) = (
        query.get("platform").filter(|p| !p.is_empty()),
        query.get("course").filter(|c| !c.is_empty()),
    ) else {
        return error(StatusCode::BAD_REQUEST, "search needs platform= and course=");
    };
    let k = match query.get("k").map(str::parse::<usize>) {
        None => DEFAULT_K,
        Some(Ok(k)) => k,
        Some(Err(_)) => return error(StatusCode::BAD_REQUEST, "k must be a non-negative integer"),
    };
    let session = match query.session() {
        Ok(s) => s,
        Err(r) => return r,
    };

    // The first keyword in the query is the type hint; its numbers form the
    // block. Without a keyword the hint falls back to `lesson`.
    let tokens = normalize_tokens(query.get("q").unwrap_or(""));
    let hint = tokens
        .iter()
        .find(|t| is_hint_keyword(t))
        .cloned()
        .unwrap_or_else(|| "lesson".to_string());
    let numbers: Vec<&str> = tokens
        .iter()
        .filter(|t| t.bytes().all(|b| b.is_ascii_digit()))
        .map(String::as_str)
        .collect();
    let block = (!numbers.is_empty()).then(|| numbers.join("-"));
    let sf = match ShortForm::new(state.host(), course, None, hint, block) {
        Ok(sf) => sf,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.to_string()),
    };
    let ctx = PostContext {
        platform: platform.to_string(),
        course: course.to_string(),
        session,
        instructors: query.instructors().unwrap_or_default(),
        forum: query.get("forum").map(str::to_string),
    };
    let catalog = state.catalog();
    Json(scored_rows(&catalog, &sf, &ctx, k)).into_response()
}
