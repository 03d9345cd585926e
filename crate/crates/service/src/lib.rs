//! HTTP front end for live expert interviews.
//!
//! Sessions are created flat (one function over `n` inputs) or hierarchical
//! (`g`, then `h`, then `f`). Each answer returns the values it implied so a
//! client can highlight them, and the model endpoint reports the DNF built
//! so far.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/sessions` | create; body `{"kind": "flat", "n": 5, "chain_order": "reference"}` |
//! | POST | `/sessions/{id}/answer` | body `{"vector": "01100", "value": 1}` |
//! | POST | `/sessions/{id}/undo` | withdraw the last answer |
//! | GET | `/sessions/{id}` | board, log and pending question |
//! | GET | `/sessions/{id}/model` | DNFs and question counts |

mod api;
mod error;
pub mod session;
mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::routing::{get, post};
use axum::Router;
use log::info;
use tower_http::services::ServeDir;

pub use api::AppState;
pub use error::ApiError;
pub use session::{Session, SessionRequest};
pub use store::{new_session_id, now_secs, SessionStore};

pub const DEFAULT_PORT: u16 = 8714;
pub const PORT_ENV: &str = "SPI_DISCOVERY_PORT";
pub const DEFAULT_TTL: Duration = Duration::from_secs(24 * 60 * 60);

/// The flag wins over the environment, which wins over the default.
pub fn resolve_port(flag: Option<u16>) -> Result<u16, String> {
    if let Some(p) = flag {
        return Ok(p);
    }
    match std::env::var(PORT_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| format!("{PORT_ENV}=`{text}` is not a port number")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    /// Where session snapshots are kept; in memory only when unset.
    pub state_dir: Option<PathBuf>,
    /// Built UI bundle served under `/`.
    pub ui_dir: Option<PathBuf>,
    pub ttl: Duration,
}

impl ServiceConfig {
    pub fn new(port: u16) -> Self {
        Self {
            addr: SocketAddr::from(([127, 0, 0, 1], port)),
            state_dir: None,
            ui_dir: None,
            ttl: DEFAULT_TTL,
        }
    }
}

/// No CORS layer is installed, so browsers only allow same-origin callers.
pub fn router(store: AppState, ui_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/answer", post(api::answer))
        .route("/sessions/{id}/undo", post(api::undo))
        .route("/sessions/{id}/model", get(api::get_model))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir).append_index_html_on_directories(true)),
        None => api,
    }
}

pub fn open_store(config: &ServiceConfig) -> std::io::Result<AppState> {
    let store = match &config.state_dir {
        Some(dir) => SessionStore::open(dir.clone(), config.ttl)?,
        None => SessionStore::new(None, config.ttl),
    };
    Ok(Arc::new(store))
}

/// Serves until the process is stopped, evicting idle sessions once a minute.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let store = open_store(&config)?;
    let sweeper = Arc::clone(&store);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_expired(now_secs());
        }
    });
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store, config.ui_dir)).await
}
