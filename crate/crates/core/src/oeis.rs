//! Integer sequence lookup against the OEIS.
//!
//! All network access goes through [`SequenceFetcher`] so that sessions can
//! run offline or against recorded responses.

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use num_bigint::BigUint;
use serde_json::Value as Json;

use crate::error::{DiscoError, Result};

pub const OEIS_BASE: &str = "https://oeis.org/";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OeisResult {
    /// e.g. `A000108`
    pub id: String,
    pub terms: Vec<BigUint>,
}

impl OeisResult {
    pub fn url(&self) -> String {
        format!("{OEIS_BASE}{}", self.id)
    }
}

pub trait SequenceFetcher: Send + Sync {
    /// First search hit for a prefix, `None` when there is none.
    fn search(&self, prefix: &[BigUint]) -> Result<Option<OeisResult>>;
}

pub fn query_string(prefix: &[BigUint]) -> String {
    prefix.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
}

/// Parse an OEIS JSON search response. Accepts both the bare array form
/// and the older `{"results": [...]}` envelope.
pub fn parse_response(body: &str) -> Result<Option<OeisResult>> {
    let bad = |m: &str| DiscoError::Network(format!("malformed OEIS response: {m}"));
    let json: Json = serde_json::from_str(body).map_err(|e| bad(&e.to_string()))?;
    let results = match &json {
        Json::Array(items) => Some(items),
        Json::Object(o) => match o.get("results") {
            Some(Json::Array(items)) => Some(items),
            Some(Json::Null) | None => None,
            Some(_) => return Err(bad("results is not a list")),
        },
        Json::Null => None,
        _ => return Err(bad("unexpected top-level value")),
    };
    let Some(first) = results.and_then(|r| r.first()) else {
        return Ok(None);
    };
    let number = first
        .get("number")
        .and_then(Json::as_u64)
        .ok_or_else(|| bad("missing number"))?;
    let data = first
        .get("data")
        .and_then(Json::as_str)
        .ok_or_else(|| bad("missing data"))?;
    let terms = data
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<BigUint>().map_err(|_| bad("non-natural term")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(OeisResult {
        id: format!("A{number:06}"),
        terms,
    }))
}

/// Live HTTP client with a hard timeout and no retries.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        HttpFetcher { agent }
    }
}

impl Default for HttpFetcher {
    fn default() -> Self {
        HttpFetcher::new(Duration::from_secs(5))
    }
}

impl SequenceFetcher for HttpFetcher {
    fn search(&self, prefix: &[BigUint]) -> Result<Option<OeisResult>> {
        let url = format!("{OEIS_BASE}search?q={}&fmt=json", query_string(prefix));
        let net = |e: ureq::Error| DiscoError::Network(format!("could not reach the OEIS: {e}"));
        let body = self
            .agent
            .get(&url)
            .call()
            .map_err(net)?
            .body_mut()
            .read_to_string()
            .map_err(net)?;
        parse_response(&body)
    }
}

/// Network disabled: every lookup fails softly.
pub struct OfflineFetcher;

impl SequenceFetcher for OfflineFetcher {
    fn search(&self, _prefix: &[BigUint]) -> Result<Option<OeisResult>> {
        Err(DiscoError::Network(
            "OEIS lookup unavailable in offline mode.".into(),
        ))
    }
}

/// Recorded responses keyed by query string (`1,1,2,5,14`).
#[derive(Default)]
pub struct FixtureFetcher {
    responses: HashMap<String, String>,
}

impl FixtureFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, query: &str, body: &str) -> Self {
        self.responses.insert(query.to_string(), body.to_string());
        self
    }

    /// Load every `<query>.json` file in a directory.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let io = |e: std::io::Error| DiscoError::Io(format!("{}: {e}", dir.display()));
        let mut out = Self::new();
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().is_some_and(|e| e == "json") {
                let query = path
                    .file_stem()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .into_owned();
                let body = std::fs::read_to_string(&path).map_err(io)?;
                out.responses.insert(query, body);
            }
        }
        Ok(out)
    }
}

impl SequenceFetcher for FixtureFetcher {
    fn search(&self, prefix: &[BigUint]) -> Result<Option<OeisResult>> {
        match self.responses.get(&query_string(prefix)) {
            Some(body) => parse_response(body),
            None => Ok(None),
        }
    }
}

/// Outcome of a lookup, with the warning to show when the fetch failed.
pub struct Lookup<T> {
    pub value: T,
    pub warning: Option<String>,
}

/// URL of the first hit, if any.
pub fn lookup_sequence(f: &dyn SequenceFetcher, prefix: &[BigUint]) -> Lookup<Option<String>> {
    match f.search(prefix) {
        Ok(hit) => Lookup {
            value: hit.map(|h| h.url()),
            warning: None,
        },
        Err(e) => Lookup {
            value: None,
            warning: Some(e.to_string()),
        },
    }
}

/// The stored terms of the first hit when they literally start with the
/// prefix; otherwise the prefix itself.
pub fn extend_sequence(f: &dyn SequenceFetcher, prefix: &[BigUint]) -> Lookup<Vec<BigUint>> {
    match f.search(prefix) {
        Ok(Some(hit)) if hit.terms.starts_with(prefix) => Lookup {
            value: hit.terms,
            warning: None,
        },
        Ok(_) => Lookup {
            value: prefix.to_vec(),
            warning: None,
        },
        Err(e) => Lookup {
            value: prefix.to_vec(),
            warning: Some(e.to_string()),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nums(xs: &[u32]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn parses_both_response_shapes() {
        let arr = r#"[{"number":108,"data":"1,1,2,5,14,42"}]"#;
        let obj = r#"{"results":[{"number":108,"data":"1,1,2,5,14,42"}]}"#;
        for body in [arr, obj] {
            let hit = parse_response(body).unwrap().unwrap();
            assert_eq!(hit.url(), "https://oeis.org/A000108");
            assert_eq!(hit.terms, nums(&[1, 1, 2, 5, 14, 42]));
        }
        assert_eq!(parse_response(r#"{"results":null}"#).unwrap(), None);
        assert_eq!(parse_response("[]").unwrap(), None);
        assert!(parse_response("<html>").is_err());
    }

    #[test]
    fn strict_prefix_guard() {
        let f = FixtureFetcher::new().with("2,3", r#"[{"number":40,"data":"1,2,3,5,7"}]"#);
        let out = extend_sequence(&f, &nums(&[2, 3]));
        assert_eq!(out.value, nums(&[2, 3]));
        assert!(out.warning.is_none());
    }

    #[test]
    fn offline_degrades_with_warning() {
        let out = lookup_sequence(&OfflineFetcher, &nums(&[1, 2]));
        assert_eq!(out.value, None);
        assert!(out.warning.is_some());
        let out = extend_sequence(&OfflineFetcher, &nums(&[1, 2]));
        assert_eq!(out.value, nums(&[1, 2]));
    }
}
