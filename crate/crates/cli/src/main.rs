use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod demo;

/// Identifiers, resolution and forum wikification for MOOC learning resources.
#[derive(Debug, Parser)]
#[command(name = "muir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContextArg {
    /// Resolve with only the mention's own post context.
    MentionOnly,
    /// Fill a missing forum from other posts in the same thread.
    Thread,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a catalog snapshot from a resource dump (JSON Lines).
    Ingest {
        #[arg(long)]
        resources: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Authority used as the first identifier segment.
        #[arg(long, default_value = muir_service::DEFAULT_HOST)]
        host: String,
    },
    /// Run the HTTP resolver.
    Serve {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long, default_value = muir_service::DEFAULT_HOST)]
        host: String,
        /// Forum post dump, enabling `post_id=` lookups.
        #[arg(long)]
        posts: Option<PathBuf>,
    },
    /// Find resource mentions in forum posts and write one annotated record
    /// per post.
    Wikify {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        posts: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Resolve each short form now instead of leaving it to the service.
        #[arg(long)]
        link_now: bool,
    },
    /// Score extraction and resolution against gold annotations.
    Eval {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        posts: PathBuf,
        #[arg(long)]
        gold_mentions: PathBuf,
        /// Gold links, resolved with the context chosen by `--context`.
        #[arg(long)]
        gold_links: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ContextArg::MentionOnly)]
        context: ContextArg,
        /// Gold links annotated with thread context; always resolved with
        /// thread context.
        #[arg(long)]
        gold_links_thread: Option<PathBuf>,
        #[arg(long)]
        report: PathBuf,
    },
    /// Walk the bundled example through every identifier form.
    Demo {
        /// Print the trace as one JSON object.
        #[arg(long)]
        json: bool,
        /// Resource dump to use instead of the bundled one.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest { resources, out, host } => commands::ingest(&resources, &out, &host),
        Command::Serve {
            catalog,
            bind,
            host,
            posts,
        } => commands::serve(catalog, bind, host, posts),
        Command::Wikify {
            catalog,
            posts,
            out,
            link_now,
        } => commands::wikify(&catalog, &posts, &out, link_now),
        Command::Eval {
            catalog,
            posts,
            gold_mentions,
            gold_links,
            context,
            gold_links_thread,
            report,
        } => commands::eval(commands::EvalArgs {
            catalog: &catalog,
            posts: &posts,
            gold_mentions: &gold_mentions,
            gold_links: gold_links.as_deref(),
            context,
            gold_links_thread: gold_links_thread.as_deref(),
            report: &report,
        }),
        Command::Demo { json, fixture } => demo::run(json, fixture.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
