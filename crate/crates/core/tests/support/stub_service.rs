//! Minimal stand-in for the similarity service, instrumented to count the
//! pairs it is asked to score.

#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use serde_json::{json, Value};

pub enum Reply {
    Scores(Vec<f64>),
    Status(u16),
    Body(String),
}

pub struct StubService {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
    pub pairs: Arc<AtomicUsize>,
    server: Arc<tiny_http::Server>,
    handle: Option<JoinHandle<()>>,
}

impl StubService {
    pub fn start<F>(score: F) -> Self
    where
        F: Fn(&[(String, String)]) -> Reply + Send + 'static,
    {
        let server = Arc::new(tiny_http::Server::http("127.0.0.1:0").unwrap());
        let url = format!("http://{}", server.server_addr().to_ip().unwrap());
        let requests = Arc::new(AtomicUsize::new(0));
        let pairs = Arc::new(AtomicUsize::new(0));
        let (srv, req_count, pair_count) = (server.clone(), requests.clone(), pairs.clone());
        let handle = std::thread::spawn(move || {
            for mut request in srv.incoming_requests() {
                if request.url() != "/similarity" || request.method() != &tiny_http::Method::Post {
                    let _ = request.respond(tiny_http::Response::empty(404));
                    continue;
                }
                let mut body = String::new();
                request.as_reader().read_to_string(&mut body).unwrap();
                let parsed: Value = serde_json::from_str(&body).unwrap();
                let batch: Vec<(String, String)> = parsed["pairs"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|p| {
                        (
                            p[0].as_str().unwrap().to_string(),
                            p[1].as_str().unwrap().to_string(),
                        )
                    })
                    .collect();
                req_count.fetch_add(1, Ordering::SeqCst);
                pair_count.fetch_add(batch.len(), Ordering::SeqCst);
                let header =
                    tiny_http::Header::from_bytes("Content-Type", "application/json").unwrap();
                let response = match score(&batch) {
                    Reply::Scores(s) => {
                        tiny_http::Response::from_string(json!({ "scores": s }).to_string())
                            .with_header(header)
                    }
                    Reply::Status(code) => {
                        tiny_http::Response::from_string("{}").with_status_code(code)
                    }
                    Reply::Body(b) => tiny_http::Response::from_string(b).with_header(header),
                };
                let _ = request.respond(response);
            }
        });
        Self {
            url,
            requests,
            pairs,
            server,
            handle: Some(handle),
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::start(move |batch| Reply::Scores(vec![value; batch.len()]))
    }

    pub fn requests(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn pairs(&self) -> usize {
        self.pairs.load(Ordering::SeqCst)
    }
}

impl Drop for StubService {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}
