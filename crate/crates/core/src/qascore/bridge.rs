//! Client for an out-of-process masked language model.
//!
//! The wire protocol is newline-delimited JSON, one request per line and one
//! response per request, answered in request order:
//!
//! ```text
//! -> {"id":"q1","passage":"...","question":"...","answer":"..."}
//! <- {"id":"q1","word_logliks":[-0.2,-1.3],"words":["two","words"]}
//! <- {"id":"q1","error":"too-long"}
//! ```
//!
//! An embedding extension serves contextual token vectors for BERTScore:
//!
//! ```text
//! -> {"id":"e1","mode":"embed","text":"..."}
//! <- {"id":"e1","vectors":[[...],[...]]}
//! ```

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::corpus::EvalItem;
use crate::error::{Error, Result};
use crate::metrics::EmbeddingMatrix;

use super::mlm::{answer_words, MaskedLanguageModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeRequest {
    pub id: String,
    pub passage: String,
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BridgeResponse {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_logliks: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub id: String,
    pub mode: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

struct Connection {
    reader: Box<dyn BufRead + Send>,
    writer: Box<dyn Write + Send>,
}

/// A [`MaskedLanguageModel`] served by a bridge process. Requests on one
/// connection are serialized; open several bridges for parallelism.
pub struct BridgeModel {
    address: String,
    conn: Mutex<Connection>,
    counter: AtomicU64,
}

fn transport(address: &str, message: impl std::fmt::Display) -> Error {
    Error::Model {
        word_index: None,
        message: format!("bridge {address}: {message}"),
    }
}

impl BridgeModel {
    /// Connect over TCP (`host:port`).
    pub fn connect(address: &str) -> Result<Self> {
        let stream = TcpStream::connect(address).map_err(|e| transport(address, format!("cannot connect: {e}")))?;
        let reader = stream.try_clone().map_err(|e| transport(address, e))?;
        Ok(Self::from_streams(address, BufReader::new(reader), stream))
    }

    /// Use arbitrary streams, e.g. the stdio pipes of a child process.
    pub fn from_streams<R, W>(address: &str, reader: R, writer: W) -> Self
    where
        R: BufRead + Send + 'static,
        W: Write + Send + 'static,
    {
        Self {
            address: address.to_string(),
            conn: Mutex::new(Connection {
                reader: Box::new(reader),
                writer: Box::new(writer),
            }),
            counter: AtomicU64::new(0),
        }
    }

    pub fn address(&self) -> &str {
        &self.address
    }

    fn next_id(&self, prefix: &str) -> String {
        format!("{prefix}{}", self.counter.fetch_add(1, Ordering::Relaxed))
    }

    /// Send every request, then read the responses in order.
    fn exchange<Q: Serialize, A: for<'de> Deserialize<'de>>(&self, requests: &[Q]) -> Result<Vec<A>> {
        let mut conn = self.conn.lock().map_err(|_| transport(&self.address, "connection poisoned"))?;
        for req in requests {
            let mut line = serde_json::to_string(req).map_err(|e| transport(&self.address, e))?;
            line.push('\n');
            conn.writer
                .write_all(line.as_bytes())
                .map_err(|e| transport(&self.address, format!("write failed: {e}")))?;
        }
        conn.writer
            .flush()
            .map_err(|e| transport(&self.address, format!("flush failed: {e}")))?;
        let mut out = Vec::with_capacity(requests.len());
        let mut line = String::new();
        for _ in requests {
            line.clear();
            let n = conn
                .reader
                .read_line(&mut line)
                .map_err(|e| transport(&self.address, format!("read failed: {e}")))?;
            if n == 0 {
                return Err(transport(&self.address, "connection closed"));
            }
            out.push(serde_json::from_str(line.trim_end()).map_err(|e| transport(&self.address, format!("malformed response: {e}")))?);
        }
        Ok(out)
    }

    fn check_response(&self, req: &BridgeRequest, resp: BridgeResponse) -> Result<Vec<f64>> {
        if resp.id != req.id {
            return Err(transport(&self.address, format!("response id `{}` for request `{}`", resp.id, req.id)));
        }
        if let Some(err) = resp.error {
            return Err(transport(&self.address, format!("request `{}` failed: {err}", req.id)));
        }
        let (logliks, words) = match (resp.word_logliks, resp.words) {
            (Some(l), Some(w)) => (l, w),
            _ => return Err(transport(&self.address, "response lacks word_logliks/words")),
        };
        let expected = answer_words(&req.answer);
        if words != expected || logliks.len() != words.len() {
            return Err(transport(
                &self.address,
                format!("request `{}`: bridge split the answer into {:?}, expected {:?}", req.id, words, expected),
            ));
        }
        Ok(logliks)
    }

    /// Score many items with pipelined requests (ids are the item ids).
    pub fn score_items(&self, items: &[EvalItem]) -> Result<Vec<Vec<f64>>> {
        let requests: Vec<BridgeRequest> = items
            .iter()
            .map(|it| BridgeRequest {
                id: it.id.clone(),
                passage: it.passage.clone(),
                question: it.question.clone(),
                answer: it.answer.clone(),
            })
            .collect();
        let responses: Vec<BridgeResponse> = self.exchange(&requests)?;
        requests
            .iter()
            .zip(responses)
            .map(|(req, resp)| self.check_response(req, resp))
            .collect()
    }

    /// Contextual token embeddings of `text`, row-normalized.
    pub fn embed(&self, text: &str) -> Result<EmbeddingMatrix> {
        let req = EmbedRequest {
            id: self.next_id("e"),
            mode: "embed".into(),
            text: text.into(),
        };
        let resp: EmbedResponse = self
            .exchange(std::slice::from_ref(&req))?
            .pop()
            .ok_or_else(|| transport(&self.address, "no response"))?;
        if resp.id != req.id {
            return Err(transport(&self.address, format!("response id `{}` for request `{}`", resp.id, req.id)));
        }
        if let Some(err) = resp.error {
            return Err(transport(&self.address, err));
        }
        let vectors = resp.vectors.ok_or_else(|| transport(&self.address, "response lacks vectors"))?;
        EmbeddingMatrix::new(vectors)
    }
}

impl MaskedLanguageModel for BridgeModel {
    fn name(&self) -> &str {
        "bridge"
    }

    fn vocab_size(&self) -> Option<usize> {
        None
    }

    fn word_log_likelihood(&self, passage: &str, question: &str, answer: &str, word_index: usize) -> Result<f64> {
        let all = self.answer_log_likelihoods(passage, question, answer)?;
        all.get(word_index).copied().ok_or_else(|| Error::InvalidArgument(format!("answer has no word {word_index}")))
    }

    fn answer_log_likelihoods(&self, passage: &str, question: &str, answer: &str) -> Result<Vec<f64>> {
        let req = BridgeRequest {
            id: self.next_id("q"),
            passage: passage.into(),
            question: question.into(),
            answer: answer.into(),
        };
        let resp: BridgeResponse = self
            .exchange(std::slice::from_ref(&req))?
            .pop()
            .ok_or_else(|| transport(&self.address, "no response"))?;
        self.check_response(&req, resp)
    }
}
