//! The bundled single-resource running example: one Coursera lecture shown
//! in all four of its forms, and a forum post that mentions it.

use crate::catalog::Catalog;
use crate::resolver::PostContext;
use crate::wikifier::ForumPost;

pub const HOST: &str = "www.example.org";

pub const FORM_I: &str = "www.example.org/accounting-analytics/Week%202/lecture/2-5";

pub const FORM_II: &str = "www.example.org/Coursera/accounting-analytics/1480320000000/\
Brian%20J%20Bushee%26Christopher%20D.%20Ittner/Videos/\
expense-recognition-red-flags-reserve-accounts-and-write-offs-2-5";

pub const FORM_IV: &str = "www.coursera.org/learn/accounting-analytics/lecture/1UzkX/\
expense-recognition-red-flags-reserve-accounts-and-write-offs-2-5";

pub const SESSION_MS: u64 = 1_480_320_000_000;

/// The resource dump behind the running example, one JSON object per line.
pub const RESOURCES_JSONL: &str = concat!(
    r#"{"platform":"Coursera","course":"accounting-analytics","session_ms":1480320000000,"#,
    r#""instructors":["Brian J Bushee","Christopher D. Ittner"],"institution":"University of Pennsylvania","#,
    r#""type_label":"videos","slug":"expense-recognition-red-flags-reserve-accounts-and-write-offs-2-5","#,
    r#""title":"Expense Recognition Red Flags: Reserve Accounts and Write-Offs","#,
    r#""url":"www.coursera.org/learn/accounting-analytics/lecture/1UzkX/expense-recognition-red-flags-reserve-accounts-and-write-offs-2-5","#,
    r#""forum_week":"Week 2"}"#,
    "\n"
);

pub fn running_example_catalog() -> Catalog {
    Catalog::ingest(HOST, RESOURCES_JSONL.as_bytes()).expect("bundled running example is valid")
}

pub fn post_context() -> PostContext {
    PostContext {
        platform: "Coursera".into(),
        course: "accounting-analytics".into(),
        session: Some(SESSION_MS),
        instructors: vec!["Brian J Bushee".into(), "Christopher D. Ittner".into()],
        forum: Some("Week 2".into()),
    }
}

/// A Week 2 forum post that refers to the lecture by number.
pub fn forum_post() -> ForumPost {
    ForumPost {
        post_id: "accounting-analytics-week2-0001".into(),
        body: "I am confused by the reserve accounts example in lecture 2.5, \
               why is the write-off a red flag?"
            .into(),
        context: post_context(),
        thread_id: Some("week2-reserves".into()),
    }
}
