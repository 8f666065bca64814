use std::time::Duration;

use log::warn;

use super::{parse_face_response, BackendKind, EmotionBackend, EmotionError, FaceAnnotation};
use crate::corpus::PaintingRecord;

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoint: String,
    pub api_key: Option<String>,
    pub api_key_header: String,
    /// Maximum number of attempts per painting, including the first.
    pub retry_budget: u32,
    pub backoff_base: Duration,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            api_key: None,
            api_key_header: "Ocp-Apim-Subscription-Key".into(),
            retry_budget: 3,
            backoff_base: Duration::from_secs(1),
            timeout: Duration::from_secs(30),
        }
    }

    fn backoff(&self, attempt: u32) -> Duration {
        self.backoff_base
            .saturating_mul(1u32 << (attempt - 1).min(16))
    }
}

#[derive(Debug, Clone)]
pub struct HttpReply {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<Duration>,
}

#[derive(Debug, thiserror::Error)]
#[error("transport error: {0}")]
pub struct TransportError(pub String);

/// One HTTP POST carrying a JSON body.
pub trait Transport: Send + Sync {
    fn post_json(
        &self,
        endpoint: &str,
        headers: &[(String, String)],
        body: &str,
    ) -> Result<HttpReply, TransportError>;
}

pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new(timeout: Duration) -> Result<Self, TransportError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| TransportError(e.to_string()))?;
        Ok(ReqwestTransport { client })
    }
}

impl Transport for ReqwestTransport {
    fn post_json(
        &self,
        endpoint: &str,
        headers: &[(String, String)],
        body: &str,
    ) -> Result<HttpReply, TransportError> {
        let mut req = self
            .client
            .post(endpoint)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.to_owned());
        for (k, v) in headers {
            req = req.header(k.as_str(), v.as_str());
        }
        let resp = req.send().map_err(|e| TransportError(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get(reqwest::header::RETRY_AFTER)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let body = resp.text().map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpReply {
            status,
            body,
            retry_after,
        })
    }
}

/// Face-API style client: `POST {"url": ...}` and parse the face array.
pub struct RemoteBackend<T: Transport = ReqwestTransport> {
    config: RemoteConfig,
    transport: T,
}

impl RemoteBackend<ReqwestTransport> {
    pub fn connect(config: RemoteConfig) -> Result<Self, TransportError> {
        let transport = ReqwestTransport::new(config.timeout)?;
        Ok(RemoteBackend { config, transport })
    }
}

impl<T: Transport> RemoteBackend<T> {
    pub fn with_transport(config: RemoteConfig, transport: T) -> Self {
        RemoteBackend { config, transport }
    }

    pub fn config(&self) -> &RemoteConfig {
        &self.config
    }

    pub fn annotate_url(&self, painting_url: &str) -> Result<Vec<FaceAnnotation>, EmotionError> {
        let body = serde_json::json!({ "url": painting_url }).to_string();
        let headers: Vec<(String, String)> = self
            .config
            .api_key
            .iter()
            .map(|k| (self.config.api_key_header.clone(), k.clone()))
            .collect();

        let budget = self.config.retry_budget.max(1);
        let mut last_status = None;
        let mut last_message = String::new();
        for attempt in 1..=budget {
            let mut wait = self.config.backoff(attempt);
            match self
                .transport
                .post_json(&self.config.endpoint, &headers, &body)
            {
                Ok(reply) if (200..300).contains(&reply.status) => {
                    return parse_face_response(&reply.body)
                }
                Ok(reply) if reply.status == 429 || reply.status >= 500 => {
                    if let Some(after) = reply.retry_after {
                        wait = wait.max(after);
                    }
                    last_status = Some(reply.status);
                    last_message = reply.body;
                }
                Ok(reply) => {
                    return Err(EmotionError::Rejected {
                        status: reply.status,
                        body: reply.body,
                    })
                }
                Err(e) => {
                    last_status = None;
                    last_message = e.0;
                }
            }
            if attempt < budget {
                warn!("attempt {attempt}/{budget} for {painting_url} failed, retrying in {wait:?}");
                std::thread::sleep(wait);
            }
        }
        Err(EmotionError::RetriesExhausted {
            attempts: budget,
            status: last_status,
            message: last_message,
        })
    }
}

impl<T: Transport> EmotionBackend for RemoteBackend<T> {
    fn kind(&self) -> BackendKind {
        BackendKind::Remote
    }

    fn annotate(&self, record: &PaintingRecord) -> Result<Vec<FaceAnnotation>, EmotionError> {
        if record.painting_url.is_empty() {
            return Err(EmotionError::MissingUrl(record.painting_name.clone()));
        }
        self.annotate_url(&record.painting_url)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};
    use std::sync::Mutex;

    /// Replies with `failures` copies of `fail_status` and then the sample body.
    struct Flaky {
        failures: u32,
        fail_status: Option<u16>,
        calls: AtomicU32,
        seen_bodies: Mutex<Vec<String>>,
    }

    impl Flaky {
        fn new(failures: u32, fail_status: Option<u16>) -> Self {
            Flaky {
                failures,
                fail_status,
                calls: AtomicU32::new(0),
                seen_bodies: Mutex::new(vec![]),
            }
        }
    }

    impl Transport for Flaky {
        fn post_json(
            &self,
            _: &str,
            headers: &[(String, String)],
            body: &str,
        ) -> Result<HttpReply, TransportError> {
            assert!(headers
                .iter()
                .any(|(k, v)| k == "Ocp-Apim-Subscription-Key" && v == "secret"));
            self.seen_bodies.lock().unwrap().push(body.to_string());
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                return match self.fail_status {
                    Some(status) => Ok(HttpReply {
                        status,
                        body: "busy".into(),
                        retry_after: None,
                    }),
                    None => Err(TransportError("connection reset".into())),
                };
            }
            Ok(HttpReply {
                status: 200,
                body: include_str!("../../testdata/face_response.json").into(),
                retry_after: None,
            })
        }
    }

    fn config() -> RemoteConfig {
        RemoteConfig {
            api_key: Some("secret".into()),
            backoff_base: Duration::ZERO,
            ..RemoteConfig::new("http://face.invalid/detect")
        }
    }

    #[test]
    fn succeeds_after_budget_minus_one_failures() {
        for status in [Some(503), Some(429), None] {
            let backend = RemoteBackend::with_transport(config(), Flaky::new(2, status));
            let faces = backend.annotate_url("https://x/a.jpg").unwrap();
            assert_eq!(faces.len(), 1);
            assert_eq!(backend.transport.calls.load(Ordering::SeqCst), 3);
        }
    }

    #[test]
    fn exhausting_budget_surfaces_status() {
        let backend = RemoteBackend::with_transport(config(), Flaky::new(3, Some(429)));
        let err = backend.annotate_url("https://x/a.jpg").unwrap_err();
        assert!(err.is_retryable());
        assert_eq!(err.http_status(), Some(429));
        assert_eq!(backend.transport.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let backend = RemoteBackend::with_transport(config(), Flaky::new(5, Some(401)));
        let err = backend.annotate_url("https://x/a.jpg").unwrap_err();
        assert!(matches!(err, EmotionError::Rejected { status: 401, .. }));
        assert_eq!(backend.transport.calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn request_body_carries_the_url() {
        let backend = RemoteBackend::with_transport(config(), Flaky::new(0, None));
        backend.annotate_url("https://x/a.jpg").unwrap();
        let bodies = backend.transport.seen_bodies.lock().unwrap();
        assert_eq!(bodies[0], r#"{"url":"https://x/a.jpg"}"#);
    }

    #[test]
    fn backoff_doubles() {
        let cfg = RemoteConfig::new("http://x");
        assert_eq!(cfg.backoff(1), Duration::from_secs(1));
        assert_eq!(cfg.backoff(3), Duration::from_secs(4));
    }
}
