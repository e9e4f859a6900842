use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::PathBuf;

use muir_core::catalog::Catalog;
use muir_core::resolver::PostContext;
use muir_core::store::{self, StoreError};
use muir_core::wikifier::{read_posts, PostError};
use thiserror::Error;

/// Host name used when neither the snapshot nor the caller names one.
pub const DEFAULT_HOST: &str = "www.example.org";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("bind port must be in 1..=65535")]
    PortZero,
    #[error("resolver host must be a non-empty single path segment, got `{0}`")]
    BadHost(String),
    #[error(transparent)]
    Catalog(#[from] StoreError),
    #[error("cannot open posts file {path}: {source}")]
    PostsIo { path: String, source: std::io::Error },
    #[error(transparent)]
    Posts(#[from] PostError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    /// Catalog snapshot or raw resource dump.
    pub catalog_path: PathBuf,
    /// Authority the service answers for; first segment of every identifier.
    pub host: String,
    /// Optional forum post dump, so requests can pass `post_id` instead of
    /// spelling out the post context.
    pub posts_path: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bind.port() == 0 {
            return Err(ConfigError::PortZero);
        }
        if self.host.is_empty() || self.host.contains('/') {
            return Err(ConfigError::BadHost(self.host.clone()));
        }
        Ok(())
    }

    pub fn load_catalog(&self) -> Result<Catalog, ConfigError> {
        Ok(store::load(&self.catalog_path, Some(&self.host), &self.host)?)
    }

    pub fn load_posts(&self) -> Result<HashMap<String, PostContext>, ConfigError> {
        let Some(path) = &self.posts_path else {
            return Ok(HashMap::new());
        };
        let file = File::open(path).map_err(|source| ConfigError::PostsIo {
            path: path.display().to_string(),
            source,
        })?;
        Ok(read_posts(BufReader::new(file))?
            .into_iter()
            .map(|p| (p.post_id, p.context))
            .collect())
    }
}
