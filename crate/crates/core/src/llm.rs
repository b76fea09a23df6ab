//! Plumbing shared by the live probability providers and the generator:
//! content hashing, retry with exponential backoff, JSON-file response caches
//! and a blocking chat-completion client.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::RwLock;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::snapshot;

pub const ENV_ENDPOINT: &str = "LLM_ENDPOINT";
pub const ENV_API_KEY: &str = "LLM_API_KEY";
pub const ENV_MODEL: &str = "LLM_MODEL";

/// Hex SHA-256 over the parts, NUL-separated so ("ab","c") != ("a","bc").
pub fn content_hash(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for (i, part) in parts.iter().enumerate() {
        if i > 0 {
            h.update([0u8]);
        }
        h.update(part.as_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    pub fn immediate(attempts: u32) -> Self {
        RetryPolicy {
            attempts,
            base_delay: Duration::ZERO,
        }
    }

    /// Call `op` until it succeeds or attempts run out, sleeping
    /// `base_delay * 2^k` after the k-th failure.
    pub fn run<T, E>(&self, mut op: impl FnMut(u32) -> Result<T, E>) -> Result<T, E> {
        let attempts = self.attempts.max(1);
        let mut attempt = 0;
        loop {
            match op(attempt) {
                Ok(v) => return Ok(v),
                Err(e) if attempt + 1 >= attempts => return Err(e),
                Err(_) => {
                    let delay = self.base_delay.saturating_mul(1 << attempt.min(16));
                    if !delay.is_zero() {
                        std::thread::sleep(delay);
                    }
                    attempt += 1;
                }
            }
        }
    }
}

/// String-keyed cache persisted as a sorted JSON object. Reads run
/// concurrently; writes take the lock one at a time.
#[derive(Debug, Default)]
pub struct JsonCache<V> {
    entries: RwLock<BTreeMap<String, V>>,
}

impl<V: Clone + Serialize + DeserializeOwned> JsonCache<V> {
    pub fn new() -> Self {
        JsonCache {
            entries: RwLock::new(BTreeMap::new()),
        }
    }

    /// Load from `path`, or start empty if the file does not exist.
    pub fn load_or_default(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(Self::new());
        }
        let entries: BTreeMap<String, V> = snapshot::read_json(path)?;
        Ok(JsonCache {
            entries: RwLock::new(entries),
        })
    }

    pub fn get(&self, key: &str) -> Option<V> {
        self.entries.read().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, key: String, value: V) {
        self.entries.write().expect("cache lock").insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let entries = self.entries.read().expect("cache lock");
        snapshot::write_json(path, &*entries)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub model: String,
}

impl EndpointConfig {
    pub fn from_env() -> Result<Self> {
        let endpoint = std::env::var(ENV_ENDPOINT)
            .map_err(|_| Error::Config(format!("{ENV_ENDPOINT} is not set")))?;
        let model =
            std::env::var(ENV_MODEL).map_err(|_| Error::Config(format!("{ENV_MODEL} is not set")))?;
        Ok(EndpointConfig {
            endpoint,
            api_key: std::env::var(ENV_API_KEY).ok(),
            model,
        })
    }

    fn url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TokenAlternative {
    pub token: String,
    pub logprob: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChatReply {
    pub text: String,
    /// Top alternatives for the first generated token, when requested.
    pub first_token_alternatives: Vec<TokenAlternative>,
}

/// Blocking client for an OpenAI-style `/chat/completions` endpoint.
#[derive(Debug, Clone)]
pub struct ChatClient {
    config: EndpointConfig,
    agent: ureq::Agent,
}

impl ChatClient {
    pub fn new(config: EndpointConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .build()
            .into();
        ChatClient { config, agent }
    }

    pub fn model(&self) -> &str {
        &self.config.model
    }

    pub fn chat(
        &self,
        prompt: &str,
        temperature: f64,
        max_tokens: u32,
        top_logprobs: Option<u8>,
    ) -> Result<ChatReply> {
        let mut body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "max_tokens": max_tokens,
        });
        if let Some(k) = top_logprobs {
            body["logprobs"] = json!(true);
            body["top_logprobs"] = json!(k);
        }
        let mut request = self.agent.post(&self.config.url());
        if let Some(key) = &self.config.api_key {
            request = request.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = request
            .send_json(&body)
            .map_err(|e| Error::Provider(format!("request failed: {e}")))?;
        let value: Value = response
            .body_mut()
            .read_json()
            .map_err(|e| Error::Provider(format!("bad response body: {e}")))?;
        parse_chat_reply(&value)
    }
}

pub(crate) fn parse_chat_reply(value: &Value) -> Result<ChatReply> {
    let choice = value
        .pointer("/choices/0")
        .ok_or_else(|| Error::Provider("response has no choices".into()))?;
    let text = choice
        .pointer("/message/content")
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();
    let first_token_alternatives = choice
        .pointer("/logprobs/content/0/top_logprobs")
        .and_then(Value::as_array)
        .map(|alts| {
            alts.iter()
                .filter_map(|a| {
                    Some(TokenAlternative {
                        token: a.get("token")?.as_str()?.to_string(),
                        logprob: a.get("logprob")?.as_f64()?,
                    })
                })
                .collect()
        })
        .unwrap_or_default();
    Ok(ChatReply {
        text,
        first_token_alternatives,
    })
}
