//! Sequential, rate-limited compound lookups over HTTP.

use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FetchError {
    #[error("no endpoint configured (offline mode)")]
    OfflineMode,
    #[error("compound `{0}` not found")]
    NotFound(String),
    #[error("compound `{id}` timed out after {attempts} attempts")]
    Timeout { id: String, attempts: u32 },
    #[error("compound `{id}`: HTTP status {status}")]
    Http { id: String, status: u16 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FetchConfig {
    /// Base URL; a record is fetched from `{endpoint}/{compound_id}`.
    /// `None` means offline.
    pub endpoint: Option<String>,
    /// Minimum delay between the starts of two requests.
    pub min_interval: Duration,
    pub timeout: Duration,
    /// Extra attempts after a transport failure.
    pub retries: u32,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            endpoint: None,
            min_interval: Duration::from_secs(2),
            timeout: Duration::from_secs(10),
            retries: 2,
        }
    }
}

/// Fetches compound records one at a time, never faster than the
/// configured interval. The response body's first non-blank line is taken
/// as the raw SMILES.
pub struct CompoundFetcher {
    config: FetchConfig,
    agent: ureq::Agent,
    last_request: Option<Instant>,
}

impl CompoundFetcher {
    pub fn new(config: FetchConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).build();
        CompoundFetcher { config, agent, last_request: None }
    }

    fn wait_turn(&mut self) {
        if let Some(last) = self.last_request {
            let next = last + self.config.min_interval;
            let now = Instant::now();
            if next > now {
                thread::sleep(next - now);
            }
        }
        self.last_request = Some(Instant::now());
    }

    pub fn fetch_compound(&mut self, compound_id: &str) -> Result<String, FetchError> {
        let endpoint = self.config.endpoint.clone().ok_or(FetchError::OfflineMode)?;
        let url = format!("{}/{}", endpoint.trim_end_matches('/'), compound_id);
        let attempts = self.config.retries + 1;
        for _ in 0..attempts {
            self.wait_turn();
            match self.agent.get(&url).call() {
                Ok(response) => {
                    let body = response.into_string().unwrap_or_default();
                    return body
                        .lines()
                        .map(str::trim)
                        .find(|l| !l.is_empty())
                        .map(str::to_string)
                        .ok_or_else(|| FetchError::NotFound(compound_id.to_string()));
                }
                Err(ureq::Error::Status(404, _)) => return Err(FetchError::NotFound(compound_id.to_string())),
                Err(ureq::Error::Status(status, _)) => {
                    return Err(FetchError::Http { id: compound_id.to_string(), status })
                }
                Err(ureq::Error::Transport(_)) => continue,
            }
        }
        Err(FetchError::Timeout { id: compound_id.to_string(), attempts })
    }

    /// Compound table rows for `ids`; any failure becomes an unresolved
    /// entry. Only offline mode is an error.
    pub fn resolve(&mut self, ids: &[String]) -> Result<Vec<(String, Option<String>)>, FetchError> {
        if self.config.endpoint.is_none() {
            return Err(FetchError::OfflineMode);
        }
        Ok(ids.iter().map(|id| (id.clone(), self.fetch_compound(id).ok())).collect())
    }
}
