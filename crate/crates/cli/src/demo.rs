//! The bundled example, end to end: forum mention, short form, canonical
//! form, opaque id and platform URL.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use muir_core::catalog::Catalog;
use muir_core::identifier::{CanonicalForm, ShortForm};
use muir_core::resolver::Resolver;
use muir_core::sample::{self, FORM_I, FORM_II, FORM_IV, HOST};
use muir_core::wikifier::{extract_mentions, generate_short_form};
use serde::Serialize;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    ok: bool,
}

#[derive(Debug, Default, Serialize)]
struct Trace {
    post_id: String,
    mention: Option<String>,
    short_form: Option<String>,
    canonical: Option<String>,
    score: Option<String>,
    score_exact: Option<String>,
    ambiguous: Option<bool>,
    opaque: Option<String>,
    platform_url: Option<String>,
    error: Option<String>,
    checks: Vec<Check>,
    ok: bool,
}

impl Trace {
    fn check(&mut self, name: &'static str, ok: bool) {
        self.checks.push(Check { name, ok });
    }
}

fn walk(catalog: &Catalog, trace: &mut Trace) {
    let post = sample::forum_post();
    trace.post_id = post.post_id.clone();
    let Some(mention) = extract_mentions(&post).into_iter().next() else {
        trace.error = Some("no mention found in the example post".into());
        return;
    };
    trace.mention = Some(mention.surface.clone());

    let sf = match generate_short_form(&mention, &post, HOST) {
        Ok(sf) => sf,
        Err(e) => {
            trace.error = Some(e.to_string());
            return;
        }
    };
    trace.short_form = Some(sf.to_string());
    trace.check("short form equals form I", ShortForm::parse(FORM_I).as_ref() == Ok(&sf));

    let result = match Resolver::default().resolve(&sf, &post.context, catalog) {
        Ok(r) => r,
        Err(e) => {
            trace.error = Some(e.to_string());
            return;
        }
    };
    trace.canonical = Some(result.canonical.to_string());
    trace.score = Some(result.score.to_string());
    trace.score_exact = Some(result.score.ratio().to_string());
    trace.ambiguous = Some(result.ambiguous);
    trace.check(
        "canonical form equals form II",
        CanonicalForm::parse(FORM_II).as_ref() == Ok(&result.canonical),
    );

    let opaque = result.canonical.mint_opaque();
    trace.opaque = Some(opaque.to_string());
    trace.check(
        "opaque id maps back to the canonical form",
        catalog.lookup_opaque(&opaque).ok() == Some(&result.canonical),
    );

    match catalog.lookup_canonical(&result.canonical) {
        Ok(url) => {
            trace.platform_url = Some(url.to_string());
            trace.check("platform url equals form IV", url == FORM_IV);
        }
        Err(e) => trace.error = Some(e.to_string()),
    }
}

pub fn run(json: bool, fixture: Option<&Path>) -> Result<ExitCode> {
    let catalog = match fixture {
        None => sample::running_example_catalog(),
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            Catalog::ingest(HOST, text.as_bytes()).with_context(|| format!("cannot ingest {}", path.display()))?
        }
    };

    let mut trace = Trace::default();
    walk(&catalog, &mut trace);
    trace.ok = trace.error.is_none() && trace.checks.len() == 4 && trace.checks.iter().all(|c| c.ok);

    if json {
        println!("{}", serde_json::to_string(&trace)?);
    } else {
        let show = |label: &str, v: &Option<String>| println!("{label:<14} {}", v.as_deref().unwrap_or("-"));
        println!("{:<14} {}", "post", trace.post_id);
        show("mention", &trace.mention);
        show("I   short", &trace.short_form);
        show("II  canonical", &trace.canonical);
        show("III opaque", &trace.opaque.as_ref().map(|id| format!("{HOST}/id/{id}")));
        show("IV  url", &trace.platform_url);
        show("score", &trace.score);
        if let Some(e) = &trace.error {
            println!("{:<14} {e}", "error");
        }
        for c in &trace.checks {
            println!("[{}] {}", if c.ok { "ok" } else { "FAIL" }, c.name);
        }
    }
    Ok(if trace.ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
