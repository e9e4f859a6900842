use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use muir_core::catalog::Catalog;
use muir_core::eval::{
    eval_coverage, eval_resolution, ContextMode, EvalReport, GoldLinks, GoldMentions, ResolutionRow,
};
use muir_core::store;
use muir_core::wikifier::{read_posts, wikify_post, AnnotatedRecord, ForumPost};
use muir_service::{ServiceConfig, DEFAULT_HOST};
use serde::de::DeserializeOwned;

use crate::ContextArg;

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn load_catalog(path: &Path) -> Result<Catalog> {
    store::load(path, None, DEFAULT_HOST).with_context(|| format!("cannot load catalog {}", path.display()))
}

fn load_posts(path: &Path) -> Result<Vec<ForumPost>> {
    read_posts(open(path)?).with_context(|| format!("cannot read posts {}", path.display()))
}

fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).with_context(|| format!("malformed JSON in {}", path.display()))
}

pub fn ingest(resources: &Path, out: &Path, host: &str) -> Result<ExitCode> {
    let catalog =
        Catalog::ingest(host, open(resources)?).with_context(|| format!("cannot ingest {}", resources.display()))?;
    store::save(&catalog, out)?;
    println!("ingested {} resources into {}", catalog.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

pub fn serve(catalog: PathBuf, bind: SocketAddr, host: String, posts: Option<PathBuf>) -> Result<ExitCode> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    let config = ServiceConfig {
        bind,
        catalog_path: catalog,
        host,
        posts_path: posts,
    };
    tokio::runtime::Runtime::new()?
        .block_on(muir_service::run(config))
        .map_err(|e| anyhow::anyhow!(e))?;
    Ok(ExitCode::SUCCESS)
}

pub fn wikify(catalog: &Path, posts: &Path, out: &Path, link_now: bool) -> Result<ExitCode> {
    let catalog = load_catalog(catalog)?;
    let posts = load_posts(posts)?;
    let mut writer = BufWriter::new(File::create(out).with_context(|| format!("cannot create {}", out.display()))?);
    let (mut mentions, mut linked) = (0usize, 0usize);
    for post in &posts {
        let annotated =
            wikify_post(post, &catalog, catalog.host(), link_now).with_context(|| format!("post {}", post.post_id))?;
        mentions += annotated.mentions.len();
        linked += annotated.mentions.iter().filter(|m| m.resolution.is_some()).count();
        serde_json::to_writer(&mut writer, &AnnotatedRecord::from(&annotated))?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    if link_now {
        println!("{} posts, {mentions} mentions, {linked} linked", posts.len());
    } else {
        println!("{} posts, {mentions} mentions", posts.len());
    }
    Ok(ExitCode::SUCCESS)
}

pub struct EvalArgs<'a> {
    pub catalog: &'a Path,
    pub posts: &'a Path,
    pub gold_mentions: &'a Path,
    pub gold_links: Option<&'a Path>,
    pub context: ContextArg,
    pub gold_links_thread: Option<&'a Path>,
    pub report: &'a Path,
}

fn print_resolution(title: &str, rows: &[ResolutionRow]) {
    println!("{title}");
    for r in rows {
        println!(
            "  {:<20} {:>6} {:>6} {:>6.1}%",
            r.resource, r.instances, r.correct, r.precision_pct
        );
    }
}

pub fn eval(args: EvalArgs<'_>) -> Result<ExitCode> {
    let catalog = load_catalog(args.catalog)?;
    let posts = load_posts(args.posts)?;
    let gold: GoldMentions = load_json(args.gold_mentions)?;
    let coverage = eval_coverage(&posts, &gold)?;

    let mut report = EvalReport {
        coverage,
        resolution_mention_only: None,
        resolution_thread: None,
    };
    if let Some(path) = args.gold_links {
        let links: GoldLinks = load_json(path)?;
        let mode = match args.context {
            ContextArg::MentionOnly => ContextMode::MentionOnly,
            ContextArg::Thread => ContextMode::Thread,
        };
        let rows = eval_resolution(&posts, &catalog, &links, mode, catalog.host())?;
        match mode {
            ContextMode::MentionOnly => report.resolution_mention_only = Some(rows),
            ContextMode::Thread => report.resolution_thread = Some(rows),
        }
    }
    if let Some(path) = args.gold_links_thread {
        let links: GoldLinks = load_json(path)?;
        report.resolution_thread = Some(eval_resolution(
            &posts,
            &catalog,
            &links,
            ContextMode::Thread,
            catalog.host(),
        )?);
    }

    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(args.report, text).with_context(|| format!("cannot write {}", args.report.display()))?;

    println!("coverage");
    for row in &report.coverage {
        println!(
            "  {:<12} posts {:>6}  with mentions {:>6} ({:.1}%)  extracted {:>6}  correct {:>6}  recall {:.1}%",
            row.annotator,
            row.posts,
            row.posts_with_mentions,
            row.posts_with_mentions_pct,
            row.extracted,
            row.extracted_correct,
            row.wikifier_recall_pct
        );
    }
    if let Some(rows) = &report.resolution_mention_only {
        print_resolution("resolution (mention context)", rows);
    }
    if let Some(rows) = &report.resolution_thread {
        print_resolution("resolution (thread context)", rows);
    }
    Ok(ExitCode::SUCCESS)
}
