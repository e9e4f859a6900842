//! Property suites and brute-force oracles shared by the core property tests
//! and the workspace acceptance target.
//!
//! The oracles here deliberately re-derive scoring, context filtering and
//! ranking from the written rules, in integer arithmetic, without calling the
//! resolver's internals.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use muir_core::catalog::{Catalog, Entry, LearningResource};
use muir_core::identifier::{hint_keywords, CanonicalForm, OpaqueId, ResourceType, ShortForm};
use muir_core::normalize_tokens;
use muir_core::resolver::{score_candidate, PostContext, ResolveError, Resolver, Score};
use muir_core::wikifier::{scan_mentions, Mention};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub const HOST: &str = "www.example.org";

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        max_global_rejects: cases * 20,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------------------
// strategies

fn segment() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 &/%?#.é_:-]{1,12}"
}

fn instructor() -> impl Strategy<Value = String> {
    "[a-zA-Z .é/%-]{1,10}"
}

fn hint() -> impl Strategy<Value = String> {
    let keywords: Vec<String> = hint_keywords().map(str::to_string).collect();
    prop_oneof![prop::sample::select(keywords), segment()]
}

fn short_form() -> impl Strategy<Value = Option<ShortForm>> {
    (
        segment(),
        segment(),
        prop::option::of(segment()),
        hint(),
        prop::option::of(segment()),
    )
        .prop_map(|(h, c, f, t, b)| ShortForm::new(h, c, f, t, b).ok())
}

fn resource_type() -> impl Strategy<Value = ResourceType> {
    prop::sample::select(ResourceType::ALL.to_vec())
}

fn canonical() -> impl Strategy<Value = CanonicalForm> {
    (
        segment(),
        segment(),
        segment(),
        any::<u64>(),
        prop::collection::vec(instructor(), 1..4),
        resource_type(),
        segment(),
    )
        .prop_map(|(h, p, c, s, i, t, slug)| {
            CanonicalForm::new(h, p, c, s, i, t, slug).expect("strategy yields valid fields")
        })
}

// ---------------------------------------------------------------------------
// identifier properties

pub fn short_form_round_trip(cases: u32) -> Result<(), String> {
    run(cases, short_form(), |sf| {
        prop_assume!(sf.is_some());
        let sf = sf.unwrap();
        let text = sf.to_string();
        prop_assert!(text.is_ascii());
        prop_assert_eq!(ShortForm::parse(&text).unwrap(), sf);
        Ok(())
    })
}

pub fn canonical_round_trip(cases: u32) -> Result<(), String> {
    run(cases, canonical(), |c| {
        let text = c.to_string();
        prop_assert_eq!(text.split('/').count(), 7);
        prop_assert_eq!(CanonicalForm::parse(&text).unwrap(), c);
        Ok(())
    })
}

/// Whatever parses re-serializes to something that parses to the same value;
/// any arity other than seven is rejected.
pub fn canonical_closure(cases: u32) -> Result<(), String> {
    let text = prop_oneof![
        any::<String>(),
        "[a-zA-Z0-9%/&. ]{0,60}",
        prop::collection::vec("[a-z0-9]{1,5}", 1..12).prop_map(|v| v.join("/")),
    ];
    run(cases, text, |s| {
        if let Ok(c) = CanonicalForm::parse(&s) {
            prop_assert_eq!(CanonicalForm::parse(&c.to_string()).unwrap(), c);
        }
        let arity = s.split('/').count();
        if arity != 7 {
            prop_assert!(CanonicalForm::parse(&s).is_err());
        }
        Ok(())
    })
}

pub fn normalize_idempotent(cases: u32) -> Result<(), String> {
    run(cases, any::<String>(), |s| {
        let tokens = normalize_tokens(&s);
        for t in &tokens {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(char::is_alphanumeric), "{:?}", t);
            prop_assert_eq!(&t.to_lowercase(), t);
        }
        prop_assert_eq!(normalize_tokens(&tokens.join(" ")), tokens);
        Ok(())
    })
}

pub fn mint_deterministic(cases: u32) -> Result<(), String> {
    run(cases, canonical(), |c| {
        let a = c.mint_opaque();
        prop_assert_eq!(&a, &OpaqueId::mint(&c.clone()));
        prop_assert_eq!(a.as_str().len(), 16);
        prop_assert!(a.as_str().bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()));
        Ok(())
    })
}

/// Mints `n` distinct canonical forms and checks every id is distinct.
pub fn mint_no_collisions(n: usize) -> Result<(), String> {
    let mut seen = HashSet::with_capacity(n);
    for i in 0..n {
        let c = CanonicalForm::new(
            HOST,
            ["Coursera", "edX", "FutureLearn"][i % 3],
            format!("course-{}", i % 97),
            1_480_320_000_000 + (i as u64 % 13) * 86_400_000,
            vec![format!("Instructor {}", i % 31)],
            ResourceType::ALL[i % 7],
            format!("resource-{i}"),
        )
        .map_err(|e| e.to_string())?;
        if !seen.insert(c.mint_opaque()) {
            return Err(format!("collision at form {i}: {c}"));
        }
    }
    Ok(())
}

/// Forms that differ only in slug get different ids, over a whole catalog.
pub fn slug_variants_distinct(catalog: &Catalog) -> Result<(), String> {
    let ids: HashSet<&OpaqueId> = catalog.entries().iter().map(|e| &e.opaque).collect();
    if ids.len() != catalog.len() {
        return Err("catalog ids are not unique".into());
    }
    for e in catalog.entries() {
        let c = &e.canonical;
        let variant = CanonicalForm::new(
            c.host(),
            c.platform(),
            c.course(),
            c.session(),
            c.instructors().to_vec(),
            c.resource_type(),
            format!("{}-v2", c.slug()),
        )
        .map_err(|e| e.to_string())?;
        if variant.mint_opaque() == e.opaque || ids.contains(&variant.mint_opaque()) {
            return Err(format!("slug variant of {c} collides"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// small random catalogs

const PLATFORMS: [&str; 2] = ["Coursera", "edX"];
const COURSES: [&str; 3] = ["algo", "finance", "ml"];
const SESSIONS: [u64; 2] = [1_000, 2_000];
const NAMES: [&str; 3] = ["Ada", "Grace", "Alan"];
const SLUG_WORDS: [&str; 10] = [
    "intro", "quiz", "lecture", "review", "2", "3", "4", "5", "week", "notes",
];
const HINTS: [&str; 7] = [
    "lecture",
    "quiz",
    "slides",
    "reading",
    "lesson",
    "assignment",
    "transcript",
];

#[derive(Debug, Clone)]
pub struct SmallWorld {
    pub resources: Vec<LearningResource>,
    pub sf: ShortForm,
    pub ctx: PostContext,
}

fn small_resource() -> impl Strategy<Value = LearningResource> {
    (
        0..PLATFORMS.len(),
        0..COURSES.len(),
        0..SESSIONS.len(),
        prop::sample::subsequence(NAMES.to_vec(), 1..=2),
        resource_type(),
        prop::collection::vec(prop::sample::select(SLUG_WORDS.to_vec()), 1..5),
        prop::option::of(prop::collection::vec(prop::sample::select(SLUG_WORDS.to_vec()), 1..3)),
        prop::option::of(2u32..5),
    )
        .prop_map(|(p, c, s, names, t, slug, title, week)| LearningResource {
            platform: PLATFORMS[p].into(),
            course: COURSES[c].into(),
            session: SESSIONS[s],
            instructors: names.into_iter().map(str::to_string).collect(),
            institution: None,
            resource_type: t,
            slug: slug.join("-"),
            title: title.map(|w| w.join(" ")),
            platform_url: String::new(),
            forum_week: week.map(|w| format!("Week {w}")),
        })
}

fn dedup(mut resources: Vec<LearningResource>) -> Vec<LearningResource> {
    let mut seen = HashSet::new();
    resources.retain(|r| {
        seen.insert((
            r.platform.clone(),
            r.course.clone(),
            r.session,
            r.instructors.clone(),
            r.resource_type,
            r.slug.clone(),
        ))
    });
    for (i, r) in resources.iter_mut().enumerate() {
        r.platform_url = format!("https://platform.example/{}/{i}", r.slug);
    }
    resources
}

pub fn small_world(max_resources: usize) -> impl Strategy<Value = SmallWorld> {
    (
        prop::collection::vec(small_resource(), 0..=max_resources),
        0..COURSES.len(),
        prop::sample::select(HINTS.to_vec()),
        prop::option::of(prop_oneof![
            (2u32..6).prop_map(|a| a.to_string()),
            (2u32..6, 2u32..6).prop_map(|(a, b)| format!("{a}-{b}"))
        ]),
        prop::option::of(2u32..5),
        0..PLATFORMS.len(),
        prop::option::of(0..SESSIONS.len() + 1),
        prop::sample::subsequence(NAMES.to_vec(), 0..=1),
        prop::option::of(2u32..5),
    )
        .prop_map(
            |(resources, course, hint, block, sf_week, platform, session, names, ctx_week)| {
                let sf = ShortForm::new(HOST, COURSES[course], sf_week.map(|w| format!("Week {w}")), hint, block)
                    .expect("hints are keywords");
                let ctx = PostContext {
                    platform: PLATFORMS[platform].into(),
                    course: "ignored-course".into(),
                    // index == len picks a session with no resources
                    session: session.map(|i| SESSIONS.get(i).copied().unwrap_or(9_999)),
                    instructors: names.into_iter().map(str::to_string).collect(),
                    forum: ctx_week.map(|w| format!("Week {w}")),
                };
                SmallWorld {
                    resources: dedup(resources),
                    sf,
                    ctx,
                }
            },
        )
}

// ---------------------------------------------------------------------------
// scoring oracle, in sixtieths

fn oracle_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            cur.push(ch.to_ascii_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn oracle_hint_type(hint: &str) -> ResourceType {
    match hint {
        "lecture" | "video" => ResourceType::Videos,
        "slide" | "slides" => ResourceType::Slides,
        "transcript" => ResourceType::Transcripts,
        "quiz" | "exam" | "test" | "question" => ResourceType::Exams,
        "assignment" | "homework" | "exercise" | "assessment" | "problem" => ResourceType::Assessments,
        "reading" | "article" => ResourceType::Readings,
        _ => ResourceType::AdditionalResources,
    }
}

/// `(type, block, overlap)` components, each scaled: type in {0, 30},
/// block in {0, 12, 24}, overlap in 0..=6.
pub fn oracle_components(r: &LearningResource, sf: &ShortForm) -> (u64, u64, u64) {
    let type_part = if oracle_hint_type(sf.resource_type_hint()) == r.resource_type {
        30
    } else {
        0
    };
    let block = sf.block().map(oracle_tokens).unwrap_or_default();
    let slug = oracle_tokens(&r.slug);
    let mut contiguous = false;
    if !block.is_empty() && block.len() <= slug.len() {
        for start in 0..=slug.len() - block.len() {
            if (0..block.len()).all(|k| slug[start + k] == block[k]) {
                contiguous = true;
            }
        }
    }
    let block_part = if block.is_empty() {
        0
    } else if contiguous {
        24
    } else if block.iter().all(|t| slug.contains(t)) {
        12
    } else {
        0
    };
    let query: BTreeSet<String> = oracle_tokens(sf.resource_type_hint())
        .into_iter()
        .chain(block)
        .collect();
    let mut doc: BTreeSet<String> = slug.into_iter().collect();
    if let Some(t) = &r.title {
        doc.extend(oracle_tokens(t));
    }
    let shared = query.iter().filter(|t| doc.contains(*t)).count() as u64;
    let overlap_part = if query.is_empty() {
        0
    } else {
        6 * shared / query.len() as u64
    };
    assert!(
        query.is_empty() || (6 * shared).is_multiple_of(query.len() as u64),
        "query sizes stay in 1..=3"
    );
    (type_part, block_part, overlap_part)
}

pub fn oracle_score(r: &LearningResource, sf: &ShortForm) -> u64 {
    let (a, b, c) = oracle_components(r, sf);
    a + b + c
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    NoCandidates,
    NoPlausibleMatch,
    Winner { url: String, score60: u64, ambiguous: bool },
}

/// Linear-scan resolution: filter, score every candidate, take the argmax.
pub fn oracle_resolve(resources: &[LearningResource], sf: &ShortForm, ctx: &PostContext) -> OracleOutcome {
    let filter = |session: Option<u64>| -> Vec<&LearningResource> {
        resources
            .iter()
            .filter(|r| r.platform == ctx.platform && r.course == sf.course())
            .filter(|r| session.is_none_or(|s| r.session == s))
            .filter(|r| ctx.instructors.is_empty() || r.instructors.iter().any(|n| ctx.instructors.contains(n)))
            .collect()
    };
    let mut candidates = filter(ctx.session);
    if candidates.is_empty() {
        candidates = filter(None);
    }
    if candidates.is_empty() {
        return OracleOutcome::NoCandidates;
    }
    let forum_match = |r: &LearningResource| {
        r.forum_week
            .as_deref()
            .is_some_and(|w| Some(w) == sf.forum() || Some(w) == ctx.forum.as_deref())
    };
    let mut best: Option<(&LearningResource, u64)> = None;
    for r in &candidates {
        let s = oracle_score(r, sf);
        let better = match best {
            None => true,
            Some((b, bs)) => {
                s > bs
                    || (s == bs
                        && (forum_match(r) && !forum_match(b)
                            || forum_match(r) == forum_match(b)
                                && (r.slug < b.slug || r.slug == b.slug && r.platform_url < b.platform_url)))
            }
        };
        if better {
            best = Some((r, s));
        }
    }
    let (winner, score60) = best.expect("non-empty candidates");
    if score60 < 30 {
        return OracleOutcome::NoPlausibleMatch;
    }
    let ties = candidates.iter().filter(|r| oracle_score(r, sf) == score60).count();
    OracleOutcome::Winner {
        url: winner.platform_url.clone(),
        score60,
        ambiguous: ties >= 2,
    }
}

fn outcome_of(catalog: &Catalog, sf: &ShortForm, ctx: &PostContext) -> OracleOutcome {
    match Resolver::default().resolve(sf, ctx, catalog) {
        Ok(r) => OracleOutcome::Winner {
            url: r.platform_url,
            score60: {
                let ratio = r.score.ratio();
                assert_eq!(60 % ratio.denom(), 0, "score denominators divide 60");
                ratio.numer() * (60 / ratio.denom())
            },
            ambiguous: r.ambiguous,
        },
        Err(ResolveError::NoCandidates { .. }) => OracleOutcome::NoCandidates,
        Err(ResolveError::NoPlausibleMatch { .. }) => OracleOutcome::NoPlausibleMatch,
        Err(e) => panic!("unexpected resolver error {e}"),
    }
}

// ---------------------------------------------------------------------------
// catalog and resolver properties

fn brute_context<'a>(catalog: &'a Catalog, platform: &str, course: &str, session: Option<u64>) -> Vec<&'a Entry> {
    let mut v: Vec<&Entry> = catalog
        .entries()
        .iter()
        .filter(|e| e.resource.platform == platform && e.resource.course == course)
        .filter(|e| session.is_none_or(|s| e.resource.session == s))
        .collect();
    v.sort_by(|a, b| {
        (a.resource.resource_type, &a.resource.slug, &a.resource.platform_url).cmp(&(
            b.resource.resource_type,
            &b.resource.slug,
            &b.resource.platform_url,
        ))
    });
    v
}

pub fn catalog_bijection(cases: u32) -> Result<(), String> {
    run(cases, small_world(30), |w| {
        let catalog = Catalog::build(HOST, w.resources.clone()).unwrap();
        prop_assert_eq!(catalog.len(), w.resources.len());
        let ids: HashSet<&OpaqueId> = catalog.entries().iter().map(|e| &e.opaque).collect();
        prop_assert_eq!(ids.len(), catalog.len());
        for (e, r) in catalog.entries().iter().zip(&w.resources) {
            let c = r.canonical(HOST).unwrap();
            prop_assert_eq!(catalog.lookup_canonical(&c).unwrap(), r.platform_url.as_str());
            prop_assert_eq!(catalog.lookup_opaque(&c.mint_opaque()).unwrap(), &c);
            prop_assert_eq!(&e.canonical, &c);
        }
        for p in PLATFORMS {
            for c in COURSES {
                for s in [None, Some(SESSIONS[0]), Some(SESSIONS[1])] {
                    let expected = brute_context(&catalog, p, c, s);
                    match catalog.course_context(p, c, s, None) {
                        Ok(got) => prop_assert_eq!(got, expected),
                        Err(_) => prop_assert!(brute_context(&catalog, p, c, None).is_empty()),
                    }
                }
            }
        }
        Ok(())
    })
}

pub fn resolve_matches_oracle(cases: u32) -> Result<(), String> {
    run(cases, small_world(50), |w| {
        let catalog = Catalog::build(HOST, w.resources.clone()).unwrap();
        let expected = oracle_resolve(&w.resources, &w.sf, &w.ctx);
        let got = outcome_of(&catalog, &w.sf, &w.ctx);
        prop_assert_eq!(got, expected);
        Ok(())
    })
}

pub fn resolve_deterministic(cases: u32) -> Result<(), String> {
    run(cases, small_world(50), |w| {
        let a = Catalog::build(HOST, w.resources.clone()).unwrap();
        let b = Catalog::build(HOST, w.resources.clone()).unwrap();
        let r1 = Resolver::default().resolve(&w.sf, &w.ctx, &a).ok();
        let r2 = Resolver::default().resolve(&w.sf, &w.ctx, &a).ok();
        let r3 = Resolver::default().resolve(&w.sf, &w.ctx, &b).ok();
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(&r1, &r3);
        if let Some(r) = &r1 {
            // within-course by construction
            prop_assert_eq!(r.canonical.course(), w.sf.course());
            prop_assert_eq!(r.canonical.platform(), w.ctx.platform.as_str());
            prop_assert!(r.score >= Score::ZERO && r.score <= Score::ONE);
        }
        Ok(())
    })
}

pub fn threshold_monotone(cases: u32) -> Result<(), String> {
    let thresholds = prop::sample::select(vec![(1u64, 2u64), (3, 5), (7, 10), (9, 10), (1, 1)]);
    run(cases, (small_world(40), thresholds), |(w, (n, d))| {
        let catalog = Catalog::build(HOST, w.resources.clone()).unwrap();
        let base = Resolver::default().resolve(&w.sf, &w.ctx, &catalog);
        let strict = Resolver::with_threshold(Score::new(n, d)).resolve(&w.sf, &w.ctx, &catalog);
        if let (Ok(a), Ok(b)) = (&base, &strict) {
            prop_assert_eq!(a, b);
        }
        if base.is_err() {
            prop_assert!(strict.is_err());
        }
        Ok(())
    })
}

/// With equal type and overlap parts, a contiguous block outranks any other.
pub fn exact_match_dominance(cases: u32) -> Result<(), String> {
    run(
        cases,
        (small_world(2), small_resource(), small_resource()),
        |(w, a, b)| {
            let (ta, ba, oa) = oracle_components(&a, &w.sf);
            let (tb, bb, ob) = oracle_components(&b, &w.sf);
            let sa = score_candidate(&a, &w.sf);
            let sb = score_candidate(&b, &w.sf);
            prop_assert_eq!(sa, Score::new(ta + ba + oa, 60));
            prop_assert_eq!(sb, Score::new(tb + bb + ob, 60));
            if ta == tb && oa == ob && ba == 24 && bb < 24 {
                prop_assert!(sa > sb);
            }
            Ok(())
        },
    )
}

// ---------------------------------------------------------------------------
// extraction

fn body() -> impl Strategy<Value = String> {
    let piece = prop_oneof![
        "(lecture|Quiz|slides|week|question|lesson) [0-9]{1,4}([.:-][0-9]{1,3})?",
        "[a-z]{1,7}",
        "[ ,.:;!?]{1,2}",
        "(é|✓|ñ|ü)",
    ];
    prop::collection::vec(piece, 0..14).prop_map(|v| v.join(" "))
}

fn shifted(ms: &[Mention], k: usize) -> Vec<Mention> {
    ms.iter()
        .map(|m| Mention {
            start: m.start + k,
            end: m.end + k,
            ..m.clone()
        })
        .collect()
}

pub fn extraction_shift_stable(cases: u32) -> Result<(), String> {
    run(cases, (body(), "[ .,;!]{0,8}", body()), |(text, prefix, suffix)| {
        let base = scan_mentions(&text);
        let chars: Vec<char> = text.chars().collect();
        let mut prev_end = 0;
        for m in &base {
            prop_assert!(m.start >= prev_end && m.start < m.end);
            prop_assert_eq!(chars[m.start..m.end].iter().collect::<String>(), m.surface.clone());
            prop_assert!(!m.numeric.is_empty());
            prev_end = m.end;
        }

        let prefix = format!("{prefix} ");
        let k = prefix.chars().count();
        prop_assert_eq!(scan_mentions(&format!("{prefix}{text}")), shifted(&base, k));

        let extended = scan_mentions(&format!("{text} {suffix}"));
        prop_assert!(extended.len() >= base.len());
        prop_assert_eq!(&extended[..base.len()], &base[..]);
        Ok(())
    })
}

/// Every property suite, by name.
pub fn all_suites(cases: u32) -> Vec<(&'static str, Result<(), String>)> {
    vec![
        ("short form round-trip", short_form_round_trip(cases)),
        ("canonical round-trip", canonical_round_trip(cases)),
        ("canonical closure", canonical_closure(cases)),
        ("normalize_tokens idempotence", normalize_idempotent(cases)),
        ("mint_opaque determinism", mint_deterministic(cases)),
        ("mint_opaque no collisions over 1e5 forms", mint_no_collisions(100_000)),
        ("catalog bijection and context", catalog_bijection(cases)),
        ("resolve oracle equivalence", resolve_matches_oracle(cases)),
        ("resolve determinism", resolve_deterministic(cases)),
        ("threshold monotonicity", threshold_monotone(cases)),
        ("exact-match dominance", exact_match_dominance(cases)),
        ("extraction span-shift stability", extraction_shift_stable(cases)),
    ]
}
