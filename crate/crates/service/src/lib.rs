//! HTTP front end for the resolver.
//!
//! Routes, by path shape:
//!
//! | path | answer |
//! |------|--------|
//! | `/healthz` | `200 ok` |
//! | `/search?q=&platform=&course=&session_ms=&k=` | JSON list of `{canonical, url, score}` |
//! | `/id/{opaque}` | `302` to the platform URL |
//! | `/{host}/{platform}/{course}/{session}/{instructors}/{type}/{slug}` | `302` to the platform URL |
//! | `/[{host}/]{course}[/{forum}]/{hint}[/{block}]` | `302` to the best match |
//!
//! Short-form requests take the post context from `platform`, `session_ms`,
//! `instructors`, `forum` and `post_id` query parameters. Redirects carry the
//! canonical form in `X-MUIR-Canonical`; short-form redirects also carry
//! `X-MUIR-Ambiguous`.

mod config;
mod routes;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use muir_core::catalog::Catalog;
use muir_core::resolver::PostContext;
use tokio::net::TcpListener;

pub use config::{ConfigError, ServiceConfig, DEFAULT_HOST};
pub use routes::{router, AMBIGUOUS_HEADER, CANONICAL_HEADER};

/// Shared request state. Handlers take a snapshot of the catalog `Arc` and
/// never see a half-built catalog; [`AppState::swap_catalog`] replaces it
/// atomically.
#[derive(Debug)]
pub struct AppState {
    host: String,
    catalog: RwLock<Arc<Catalog>>,
    posts: HashMap<String, PostContext>,
}

impl AppState {
    pub fn new(host: impl Into<String>, catalog: Catalog) -> AppState {
        AppState {
            host: host.into(),
            catalog: RwLock::new(Arc::new(catalog)),
            posts: HashMap::new(),
        }
    }

    pub fn with_posts(mut self, posts: HashMap<String, PostContext>) -> AppState {
        self.posts = posts;
        self
    }

    pub fn from_config(config: &ServiceConfig) -> Result<AppState, ConfigError> {
        config.validate()?;
        Ok(AppState::new(config.host.clone(), config.load_catalog()?).with_posts(config.load_posts()?))
    }

    pub fn host(&self) -> &str {
        &self.host
    }

    pub fn catalog(&self) -> Arc<Catalog> {
        Arc::clone(&self.catalog.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Installs a new catalog and returns the previous one.
    pub fn swap_catalog(&self, catalog: Catalog) -> Arc<Catalog> {
        let mut guard = self.catalog.write().unwrap_or_else(|e| e.into_inner());
        std::mem::replace(&mut *guard, Arc::new(catalog))
    }

    pub fn post_context(&self, post_id: &str) -> Option<PostContext> {
        self.posts.get(post_id).cloned()
    }
}

/// Serves on an already bound listener until `shutdown` resolves.
pub async fn serve_with_shutdown<F>(listener: TcpListener, state: Arc<AppState>, shutdown: F) -> std::io::Result<()>
where
    F: std::future::Future<Output = ()> + Send + 'static,
{
    tracing::info!(addr = ?listener.local_addr()?, host = state.host(), "serving");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}

/// Binds `config.bind` and serves until Ctrl-C.
pub async fn run(config: ServiceConfig) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let state = Arc::new(AppState::from_config(&config)?);
    tracing::info!(resources = state.catalog().len(), "catalog loaded");
    let listener = TcpListener::bind(config.bind).await?;
    serve_with_shutdown(listener, state, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}
