//! Synthetic catalogs paired with forum posts whose single mention has a
//! known target. Used by the acceptance suite, property tests and benches.

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::catalog::{Catalog, LearningResource};
use crate::identifier::ResourceType;
use crate::resolver::PostContext;
use crate::wikifier::ForumPost;

const TOPIC_WORDS: &[&str] = &[
    "accrual",
    "balance",
    "budget",
    "cash",
    "cohort",
    "cost",
    "credit",
    "demand",
    "depreciation",
    "equity",
    "forecast",
    "graph",
    "hashing",
    "inventory",
    "ledger",
    "margin",
    "matrix",
    "network",
    "pricing",
    "probability",
    "queue",
    "ratio",
    "regression",
    "revenue",
    "risk",
    "sampling",
    "signal",
    "sorting",
    "supply",
    "tensor",
    "valuation",
    "variance",
    "vector",
    "yield",
];

const PLATFORMS: &[&str] = &["Coursera", "edX", "FutureLearn"];

const BASE_SESSION_MS: u64 = 1_480_320_000_000;
const DAY_MS: u64 = 86_400_000;

/// Block designators per (course, type) are `(unit, item)` with `item` in
/// `1..=ITEMS_PER_UNIT`.
const ITEMS_PER_UNIT: usize = 5;

/// The mention keyword a learner would use for each resource type.
pub fn mention_keyword(t: ResourceType) -> &'static str {
    match t {
        ResourceType::Videos => "lecture",
        ResourceType::Slides => "slides",
        ResourceType::Transcripts => "transcript",
        ResourceType::Assessments => "assignment",
        ResourceType::Exams => "quiz",
        ResourceType::Readings => "reading",
        ResourceType::AdditionalResources => "lesson",
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCase {
    pub post: ForumPost,
    pub expected_url: String,
    /// The target shares its top score with another resource and is expected
    /// to win only through the slug tie-break.
    pub ambiguous: bool,
}

#[derive(Debug, Clone)]
pub struct Synthetic {
    pub catalog: Catalog,
    pub cases: Vec<SyntheticCase>,
}

fn course_slug(rng: &mut ChaCha8Rng, index: usize) -> String {
    let a = TOPIC_WORDS.choose(rng).expect("non-empty word list");
    let b = TOPIC_WORDS.choose(rng).expect("non-empty word list");
    format!("{a}-{b}-{index:02}")
}

fn context(platform: &str, course: &str, session: u64, instructors: &[String], forum: &str) -> PostContext {
    PostContext {
        platform: platform.to_string(),
        course: course.to_string(),
        session: Some(session),
        instructors: instructors.to_vec(),
        forum: Some(forum.to_string()),
    }
}

fn post_for(id: usize, ctx: PostContext, keyword: &str, unit: usize, item: usize) -> ForumPost {
    ForumPost {
        post_id: format!("synthetic-{id:05}"),
        body: format!("Could someone explain {keyword} {unit}.{item}? I got lost halfway through."),
        context: ctx,
        thread_id: Some(format!("thread-{id:05}")),
    }
}

/// Builds `resources` resources spread round-robin over `courses` courses and
/// all seven types, each with a block number unique within its course and
/// type, plus `ambiguous_pairs` extra courses that each hold two resources
/// indistinguishable by score.
pub fn generate(seed: u64, resources: usize, courses: usize, ambiguous_pairs: usize) -> Synthetic {
    assert!(courses > 0, "at least one course");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let course_slugs: Vec<String> = (0..courses).map(|c| course_slug(&mut rng, c)).collect();
    let instructors: Vec<Vec<String>> = (0..courses)
        .map(|c| {
            let mut names = vec![format!("Instructor {c}A")];
            if c % 2 == 0 {
                names.push(format!("Instructor {c}B"));
            }
            names
        })
        .collect();

    let mut items = Vec::with_capacity(resources + 2 * ambiguous_pairs);
    let mut cases = Vec::with_capacity(resources + 2 * ambiguous_pairs);
    let mut per_slot = vec![[0usize; 7]; courses];

    for i in 0..resources {
        let c = i % courses;
        let t_index = (i / courses) % 7;
        let rtype = ResourceType::ALL[t_index];
        let k = per_slot[c][t_index];
        per_slot[c][t_index] += 1;
        let (unit, item) = (k / ITEMS_PER_UNIT + 1, k % ITEMS_PER_UNIT + 1);

        let platform = PLATFORMS[c % PLATFORMS.len()];
        let session = BASE_SESSION_MS + c as u64 * DAY_MS;
        let topic_a = TOPIC_WORDS.choose(&mut rng).expect("non-empty word list");
        let topic_b = TOPIC_WORDS.choose(&mut rng).expect("non-empty word list");
        let slug = format!("{topic_a}-{topic_b}-{unit}-{item}");
        let url = format!(
            "https://www.{}.org/learn/{}/{}/{i:05}/{slug}",
            platform.to_lowercase(),
            course_slugs[c],
            rtype.as_str().to_lowercase()
        );
        let forum = format!("Week {unit}");
        items.push(LearningResource {
            platform: platform.to_string(),
            course: course_slugs[c].clone(),
            session,
            instructors: instructors[c].clone(),
            institution: Some(format!("University {c}")),
            resource_type: rtype,
            slug,
            title: Some(format!("{} {unit}.{item}: {topic_a} and {topic_b}", rtype.as_str())),
            platform_url: url.clone(),
            forum_week: Some(forum.clone()),
        });
        let ctx = context(platform, &course_slugs[c], session, &instructors[c], &forum);
        cases.push(SyntheticCase {
            post: post_for(i, ctx, mention_keyword(rtype), unit, item),
            expected_url: url,
            ambiguous: false,
        });
    }

    for j in 0..ambiguous_pairs {
        let rtype = ResourceType::ALL[j % 7];
        let course = format!("ambiguous-course-{j:03}");
        let session = BASE_SESSION_MS;
        let names = vec![format!("Instructor X{j}")];
        let (unit, item) = (j % 9 + 1, (j / 9) % 9 + 1);
        let mut urls = Vec::new();
        for prefix in ["intro", "review"] {
            let slug = format!("{prefix}-{unit}-{item}");
            let url = format!("https://www.coursera.org/learn/{course}/{slug}");
            items.push(LearningResource {
                platform: "Coursera".into(),
                course: course.clone(),
                session,
                instructors: names.clone(),
                institution: None,
                resource_type: rtype,
                slug,
                title: None,
                platform_url: url.clone(),
                forum_week: Some(format!("Week {unit}")),
            });
            urls.push(url);
        }
        let ctx = context("Coursera", &course, session, &names, &format!("Week {unit}"));
        cases.push(SyntheticCase {
            post: post_for(resources + j, ctx, mention_keyword(rtype), unit, item),
            // `intro-…` sorts before `review-…`
            expected_url: urls.swap_remove(0),
            ambiguous: true,
        });
    }

    let catalog = Catalog::build("www.example.org", items).expect("synthetic resources are unique");
    Synthetic { catalog, cases }
}
