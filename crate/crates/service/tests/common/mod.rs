//! Golden request/response checks over the bundled running example, shared
//! by the service tests and the workspace acceptance target.

#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use muir_core::catalog::{Catalog, LearningResource};
use muir_core::identifier::ResourceType;
use muir_core::resolver::resolve_to_url;
use muir_core::sample::{self, FORM_I, FORM_II, FORM_IV, HOST, RESOURCES_JSONL, SESSION_MS};
use muir_core::{extract_mentions, generate_short_form, synth};
use muir_service::{router, AppState, AMBIGUOUS_HEADER, CANONICAL_HEADER};
use tower::ServiceExt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub status: StatusCode,
    pub location: Option<String>,
    pub canonical: Option<String>,
    pub ambiguous: Option<String>,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).unwrap_or(serde_json::Value::Null)
    }
}

pub async fn get(state: &Arc<AppState>, uri: &str) -> Reply {
    let response = router(Arc::clone(state))
        .oneshot(Request::get(uri).body(Body::empty()).expect("valid request"))
        .await
        .expect("router is infallible");
    let header = |name: &str| {
        response
            .headers()
            .get(name)
            .map(|v| v.to_str().expect("ascii header").to_string())
    };
    let (status, location, canonical, ambiguous) = (
        response.status(),
        header("location"),
        header(CANONICAL_HEADER),
        header(AMBIGUOUS_HEADER),
    );
    let bytes = response.into_body().collect().await.expect("body").to_bytes();
    Reply {
        status,
        location,
        canonical,
        ambiguous,
        body: String::from_utf8(bytes.to_vec()).expect("utf-8 body"),
    }
}

pub fn example_state() -> Arc<AppState> {
    Arc::new(AppState::new(HOST, sample::running_example_catalog()))
}

/// Two week-4 lectures whose slugs both end in `4-5`.
pub fn ambiguous_state() -> Arc<AppState> {
    let lecture = |slug: &str| LearningResource {
        platform: "Coursera".into(),
        course: "pricing".into(),
        session: 1_000,
        instructors: vec!["A".into()],
        institution: None,
        resource_type: ResourceType::Videos,
        slug: slug.into(),
        title: None,
        platform_url: format!("https://www.coursera.org/learn/pricing/lecture/{slug}"),
        forum_week: Some("Week 4".into()),
    };
    let catalog = Catalog::build(HOST, vec![lecture("discounts-4-5"), lecture("bundling-4-5")]).unwrap();
    Arc::new(AppState::new(HOST, catalog))
}

fn short_path() -> String {
    let rest = FORM_I.strip_prefix(HOST).expect("form I starts with the host");
    format!("{rest}?platform=Coursera&session_ms={SESSION_MS}")
}

fn opaque_of_example() -> String {
    sample::running_example_catalog().entries()[0].opaque.to_string()
}

macro_rules! check {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn expect_redirect(r: &Reply, location: &str, canonical: &str) -> Result<(), String> {
    check!(r.status == StatusCode::FOUND, "status {} body {}", r.status, r.body);
    check!(r.location.as_deref() == Some(location), "Location {:?}", r.location);
    check!(
        r.canonical.as_deref() == Some(canonical),
        "X-MUIR-Canonical {:?}",
        r.canonical
    );
    Ok(())
}

pub async fn healthz() -> Result<(), String> {
    let r = get(&example_state(), "/healthz").await;
    check!(r.status == StatusCode::OK && r.body == "ok", "{r:?}");
    Ok(())
}

pub async fn short_form_redirects() -> Result<(), String> {
    let state = example_state();
    let r = get(&state, &short_path()).await;
    expect_redirect(&r, FORM_IV, FORM_II)?;
    check!(
        r.ambiguous.as_deref() == Some("false"),
        "X-MUIR-Ambiguous {:?}",
        r.ambiguous
    );

    // host segment in the path, and platform inferred from the course
    let r = get(&state, &format!("/{FORM_I}")).await;
    expect_redirect(&r, FORM_IV, FORM_II)?;

    // course given in the query
    let r = get(&state, "/lecture/2-5?course=accounting-analytics&forum=Week%202").await;
    expect_redirect(&r, FORM_IV, FORM_II)
}

pub async fn short_form_errors() -> Result<(), String> {
    let empty = Arc::new(AppState::new(HOST, Catalog::empty(HOST)));
    let r = get(&empty, "/nope/lecture/1").await;
    check!(r.status == StatusCode::NOT_FOUND, "empty catalog: {r:?}");
    check!(
        r.json()["near_misses"] == serde_json::json!([]),
        "empty catalog body {}",
        r.body
    );

    let state = example_state();
    let r = get(&state, "/accounting-analytics/quiz?platform=Coursera").await;
    check!(r.status == StatusCode::NOT_FOUND, "implausible: {r:?}");
    let misses = r.json()["near_misses"].as_array().cloned().unwrap_or_default();
    check!(misses.len() == 1, "near misses {}", r.body);
    check!(
        misses[0]["canonical"] == FORM_II && misses[0]["url"] == FORM_IV,
        "near miss {}",
        r.body
    );

    let r = get(&state, "/accounting-analytics/lecture/2%ZZ?platform=Coursera").await;
    check!(r.status == StatusCode::BAD_REQUEST, "bad escape: {r:?}");
    let r = get(
        &state,
        "/accounting-analytics/lecture/2-5?platform=Coursera&session_ms=soon",
    )
    .await;
    check!(r.status == StatusCode::BAD_REQUEST, "bad session: {r:?}");
    let r = get(&state, "/a/b/c/d/e").await;
    check!(r.status == StatusCode::BAD_REQUEST, "five bare segments: {r:?}");
    Ok(())
}

pub async fn ambiguous_flag() -> Result<(), String> {
    let r = get(&ambiguous_state(), "/pricing/Week%204/lecture/4-5?platform=Coursera").await;
    check!(r.status == StatusCode::FOUND, "{r:?}");
    check!(
        r.ambiguous.as_deref() == Some("true"),
        "X-MUIR-Ambiguous {:?}",
        r.ambiguous
    );
    // `bundling-…` sorts first
    check!(
        r.location.as_deref() == Some("https://www.coursera.org/learn/pricing/lecture/bundling-4-5"),
        "tie-break picked {:?}",
        r.location
    );
    Ok(())
}

pub async fn opaque_routes() -> Result<(), String> {
    let state = example_state();
    let r = get(&state, &format!("/id/{}", opaque_of_example())).await;
    expect_redirect(&r, FORM_IV, FORM_II)?;
    let r = get(&state, "/id/short").await;
    check!(r.status == StatusCode::BAD_REQUEST, "short id: {r:?}");
    let r = get(&state, "/id/aaaaaaaaaaaaaaaa").await;
    check!(r.status == StatusCode::NOT_FOUND, "absent id: {r:?}");
    Ok(())
}

pub async fn canonical_routes() -> Result<(), String> {
    let state = example_state();
    let r = get(&state, &format!("/{FORM_II}")).await;
    expect_redirect(&r, FORM_IV, FORM_II)?;
    let six = FORM_II.rsplit_once('/').expect("has segments").0;
    let r = get(&state, &format!("/{six}")).await;
    check!(r.status == StatusCode::BAD_REQUEST, "six segments: {r:?}");
    let unknown = FORM_II.replace("2-5", "2-6");
    let r = get(&state, &format!("/{unknown}")).await;
    check!(r.status == StatusCode::NOT_FOUND, "unknown canonical: {r:?}");
    Ok(())
}

pub async fn search_route() -> Result<(), String> {
    let state = example_state();
    let r = get(&state, "/search?q=lecture+2.5").await;
    check!(r.status == StatusCode::BAD_REQUEST, "missing context: {r:?}");
    let r = get(
        &state,
        "/search?q=lecture+2.5&platform=Coursera&course=accounting-analytics",
    )
    .await;
    check!(r.status == StatusCode::OK, "{r:?}");
    let rows = r.json();
    check!(
        rows[0]["canonical"] == FORM_II && rows[0]["url"] == FORM_IV,
        "rows {}",
        r.body
    );
    check!(rows[0]["score"].as_f64().is_some_and(|s| s > 0.9), "score {}", r.body);
    let r = get(&state, "/search?q=lecture&platform=Coursera&course=unknown").await;
    check!(
        r.status == StatusCode::OK && r.json() == serde_json::json!([]),
        "unknown course {r:?}"
    );
    let r = get(
        &state,
        "/search?q=lecture&platform=Coursera&course=accounting-analytics&k=0",
    )
    .await;
    check!(r.json() == serde_json::json!([]), "k=0 {}", r.body);
    Ok(())
}

/// Repeated requests give byte-identical replies.
pub async fn stateless() -> Result<(), String> {
    let state = example_state();
    for uri in [short_path(), format!("/{FORM_II}"), "/id/short".to_string()] {
        let a = get(&state, &uri).await;
        let b = get(&state, &uri).await;
        check!(a == b, "{uri} differs between calls");
    }
    Ok(())
}

/// A fresh process built from the same resource dump mints the same ids.
pub async fn restart_stability() -> Result<(), String> {
    let boot = || {
        Arc::new(AppState::new(
            HOST,
            Catalog::ingest(HOST, RESOURCES_JSONL.as_bytes()).unwrap(),
        ))
    };
    let (first, second) = (boot(), boot());
    let id_a = first.catalog().entries()[0].opaque.to_string();
    let id_b = second.catalog().entries()[0].opaque.to_string();
    check!(id_a == id_b, "ids differ across restarts: {id_a} vs {id_b}");
    let a = get(&first, &format!("/id/{id_a}")).await;
    let b = get(&second, &format!("/id/{id_a}")).await;
    check!(a == b, "replies differ across restarts");
    expect_redirect(&b, FORM_IV, FORM_II)
}

/// The service answers exactly what the library resolves, on every mention
/// of a synthetic corpus.
pub async fn agrees_with_library() -> Result<(), String> {
    let world = synth::generate(11, 140, 7, 7);
    let state = Arc::new(AppState::new(HOST, world.catalog.clone()));
    for case in &world.cases {
        let ctx = &case.post.context;
        let mention = &extract_mentions(&case.post)[0];
        let sf = generate_short_form(mention, &case.post, HOST).map_err(|e| e.to_string())?;
        let expected = resolve_to_url(&sf, ctx, &world.catalog).map_err(|e| e.to_string())?;
        let path = sf.to_string().strip_prefix(HOST).expect("host").to_string();
        let uri = format!(
            "{path}?platform={}&session_ms={}&instructors={}",
            ctx.platform,
            ctx.session.expect("synthetic posts carry sessions"),
            ctx.instructors.join("%26").replace(' ', "+")
        );
        let r = get(&state, &uri).await;
        check!(r.location.as_deref() == Some(expected.as_str()), "{uri}: {r:?}");
        check!(
            r.ambiguous.as_deref() == Some(if case.ambiguous { "true" } else { "false" }),
            "{uri}"
        );
    }
    Ok(())
}

pub async fn catalog_swap() -> Result<(), String> {
    let state = Arc::new(AppState::new(HOST, Catalog::empty(HOST)));
    let r = get(&state, &format!("/{FORM_II}")).await;
    check!(r.status == StatusCode::NOT_FOUND, "before swap {r:?}");
    let old = state.swap_catalog(sample::running_example_catalog());
    check!(old.is_empty(), "swap returns the previous catalog");
    let r = get(&state, &format!("/{FORM_II}")).await;
    expect_redirect(&r, FORM_IV, FORM_II)
}

pub async fn all_checks() -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("healthz", healthz().await),
        ("short form redirect", short_form_redirects().await),
        ("short form errors", short_form_errors().await),
        ("ambiguous flag", ambiguous_flag().await),
        ("opaque routes", opaque_routes().await),
        ("canonical routes", canonical_routes().await),
        ("search", search_route().await),
        ("stateless replies", stateless().await),
        ("opaque ids stable across restart", restart_stability().await),
        ("agrees with library resolution", agrees_with_library().await),
        ("catalog swap", catalog_swap().await),
    ]
}
