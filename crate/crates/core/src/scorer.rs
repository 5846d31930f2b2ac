//! Scoring of sentence pairs.
//!
//! Two backends share the [`Scorer`] trait: a deterministic lexical
//! baseline (token-set Jaccard overlap) and a client for external scorers
//! speaking line-delimited JSON over a child process's stdio or a TCP
//! socket:
//!
//! ```text
//! -> {"id":7,"pairs":[{"a":"soybean milk","b":"soybean food product"}]}
//! <- {"id":7,"scores":[0.93]}
//! ```

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::templates::SentencePair;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("scorer unavailable at {endpoint}: {detail}")]
    ScorerUnavailable { endpoint: String, detail: String },
    #[error("protocol error: {0}")]
    ProtocolError(String),
}

/// A subsumption score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct Score(f64);

impl Score {
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && (0.0..=1.0).contains(&value)).then_some(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Mean of the scores of all sentence pairs rendered for one candidate.
pub fn aggregate_candidate(scores: &[Score]) -> Option<Score> {
    if scores.is_empty() {
        return None;
    }
    let mean = scores.iter().map(|s| s.0).sum::<f64>() / scores.len() as f64;
    // the mean of values in [0, 1] stays there up to rounding
    Some(Score(mean.clamp(0.0, 1.0)))
}

pub trait Scorer {
    /// One score per `(sentence_a, sentence_b)`, in input order.
    fn score(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError>;
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn score(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError> {
        (**self).score(pairs)
    }
}

pub fn score_batch<S: Scorer + ?Sized>(scorer: &mut S, pairs: &[SentencePair]) -> Result<Vec<Score>, ScorerError> {
    let texts: Vec<(&str, &str)> = pairs.iter().map(|p| (p.sentence_a.as_str(), p.sentence_b.as_str())).collect();
    scorer.score(&texts)
}

/// Jaccard overlap of lowercase whitespace tokens, separator tokens removed.
#[derive(Debug, Clone)]
pub struct LexicalScorer {
    sep_token: String,
}

impl LexicalScorer {
    pub fn new(sep_token: &str) -> Self {
        Self { sep_token: sep_token.to_lowercase() }
    }

    fn tokens(&self, s: &str) -> BTreeSet<String> {
        s.split_whitespace().map(str::to_lowercase).filter(|t| *t != self.sep_token).collect()
    }

    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        let (ta, tb) = (self.tokens(a), self.tokens(b));
        let union = ta.union(&tb).count();
        if union == 0 {
            return 1.0;
        }
        ta.intersection(&tb).count() as f64 / union as f64
    }
}

impl Default for LexicalScorer {
    fn default() -> Self {
        Self::new("[SEP]")
    }
}

impl Scorer for LexicalScorer {
    fn score(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError> {
        Ok(pairs.iter().map(|(a, b)| Score(self.similarity(a, b))).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// Shell command whose stdin/stdout carry the protocol.
    Stdio(String),
    /// `host:port` of a listening scorer.
    Tcp(String),
}

impl Endpoint {
    /// `stdio:<command>` or `[tcp:]host:port`.
    pub fn parse(s: &str) -> Result<Self, String> {
        if let Some(cmd) = s.strip_prefix("stdio:") {
            if cmd.trim().is_empty() {
                return Err("empty stdio command".into());
            }
            return Ok(Endpoint::Stdio(cmd.to_string()));
        }
        let addr = s.strip_prefix("tcp:").unwrap_or(s);
        match addr.rsplit_once(':') {
            Some((host, port)) if !host.is_empty() && port.parse::<u16>().is_ok() => {
                Ok(Endpoint::Tcp(addr.to_string()))
            }
            _ => Err(format!("endpoint {s:?} is neither stdio:<command> nor host:port")),
        }
    }

    fn describe(&self) -> String {
        match self {
            Endpoint::Stdio(cmd) => format!("stdio:{cmd}"),
            Endpoint::Tcp(addr) => format!("tcp:{addr}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScorerKind {
    Lexical,
    External(Endpoint),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScorerSpec {
    pub kind: ScorerKind,
    pub batch_size: usize,
    pub timeout: Duration,
}

impl Default for ScorerSpec {
    fn default() -> Self {
        Self { kind: ScorerKind::Lexical, batch_size: 64, timeout: Duration::from_secs(60) }
    }
}

impl ScorerSpec {
    /// Opens the scorer. `sep_token` is the separator the lexical baseline
    /// strips from sentences.
    pub fn connect(&self, sep_token: &str) -> Result<Box<dyn Scorer + Send>, ScorerError> {
        match &self.kind {
            ScorerKind::Lexical => Ok(Box::new(LexicalScorer::new(sep_token))),
            ScorerKind::External(endpoint) => {
                Ok(Box::new(ExternalScorer::connect(endpoint, self.batch_size, self.timeout)?))
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct WirePair {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub id: u64,
    pub pairs: Vec<WirePair>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub id: u64,
    pub scores: Vec<f64>,
}

enum Transport {
    Stdio { child: Child, stdin: ChildStdin, lines: Receiver<std::io::Result<String>> },
    Tcp { writer: TcpStream, reader: BufReader<TcpStream> },
}

/// Client for an external scorer; one request in flight at a time.
pub struct ExternalScorer {
    endpoint: String,
    transport: Transport,
    next_id: u64,
    batch_size: usize,
    timeout: Duration,
}

impl ExternalScorer {
    pub fn connect(endpoint: &Endpoint, batch_size: usize, timeout: Duration) -> Result<Self, ScorerError> {
        let name = endpoint.describe();
        let unavailable = |detail: String| ScorerError::ScorerUnavailable { endpoint: name.clone(), detail };
        let transport = match endpoint {
            Endpoint::Stdio(cmd) => {
                let mut child = Command::new("sh")
                    .arg("-c")
                    .arg(cmd)
                    .stdin(Stdio::piped())
                    .stdout(Stdio::piped())
                    .stderr(Stdio::inherit())
                    .spawn()
                    .map_err(|e| unavailable(e.to_string()))?;
                let stdin = child.stdin.take().expect("piped stdin");
                let stdout = child.stdout.take().expect("piped stdout");
                let (tx, rx) = mpsc::channel();
                std::thread::spawn(move || {
                    for line in BufReader::new(stdout).lines() {
                        if tx.send(line).is_err() {
                            break;
                        }
                    }
                });
                Transport::Stdio { child, stdin, lines: rx }
            }
            Endpoint::Tcp(addr) => {
                let sock = addr
                    .to_socket_addrs()
                    .map_err(|e| unavailable(e.to_string()))?
                    .next()
                    .ok_or_else(|| unavailable("address did not resolve".into()))?;
                let stream = TcpStream::connect_timeout(&sock, timeout).map_err(|e| unavailable(e.to_string()))?;
                stream.set_read_timeout(Some(timeout)).map_err(|e| unavailable(e.to_string()))?;
                let reader = BufReader::new(stream.try_clone().map_err(|e| unavailable(e.to_string()))?);
                Transport::Tcp { writer: stream, reader }
            }
        };
        Ok(Self { endpoint: name, transport, next_id: 0, batch_size: batch_size.max(1), timeout })
    }

    fn unavailable(&self, detail: impl Into<String>) -> ScorerError {
        ScorerError::ScorerUnavailable { endpoint: self.endpoint.clone(), detail: detail.into() }
    }

    fn round_trip(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError> {
        let id = self.next_id;
        self.next_id += 1;
        let request = ScoreRequest {
            id,
            pairs: pairs.iter().map(|(a, b)| WirePair { a: a.to_string(), b: b.to_string() }).collect(),
        };
        let mut line = serde_json::to_string(&request).map_err(|e| ScorerError::ProtocolError(e.to_string()))?;
        line.push('\n');
        let timeout = self.timeout;
        let reply = match &mut self.transport {
            Transport::Stdio { stdin, lines, .. } => {
                match stdin.write_all(line.as_bytes()).and_then(|_| stdin.flush()) {
                    Err(e) => Err(e.to_string()),
                    Ok(()) => match lines.recv_timeout(timeout) {
                        Ok(Ok(reply)) => Ok(reply),
                        Ok(Err(e)) => Err(e.to_string()),
                        Err(RecvTimeoutError::Timeout) => Err("timed out waiting for response".to_string()),
                        Err(RecvTimeoutError::Disconnected) => Err("scorer closed its output".to_string()),
                    },
                }
            }
            Transport::Tcp { writer, reader } => {
                let mut reply = String::new();
                match writer.write_all(line.as_bytes()).and_then(|_| writer.flush()) {
                    Err(e) => Err(e.to_string()),
                    Ok(()) => match reader.read_line(&mut reply) {
                        Ok(0) => Err("connection closed".to_string()),
                        Ok(_) => Ok(reply),
                        Err(e) => Err(e.to_string()),
                    },
                }
            }
        };
        let reply = reply.map_err(|e| self.unavailable(e))?;
        parse_response(&reply, id, pairs.len())
    }
}

fn parse_response(line: &str, id: u64, expected: usize) -> Result<Vec<Score>, ScorerError> {
    let response: ScoreResponse =
        serde_json::from_str(line.trim_end()).map_err(|e| ScorerError::ProtocolError(format!("bad response: {e}")))?;
    if response.id != id {
        return Err(ScorerError::ProtocolError(format!("response id {} for request {id}", response.id)));
    }
    if response.scores.len() != expected {
        return Err(ScorerError::ProtocolError(format!("{} scores for {expected} pairs", response.scores.len())));
    }
    response
        .scores
        .into_iter()
        .map(|s| Score::new(s).ok_or_else(|| ScorerError::ProtocolError(format!("score {s} outside [0, 1]"))))
        .collect()
}

impl Scorer for ExternalScorer {
    fn score(&mut self, pairs: &[(&str, &str)]) -> Result<Vec<Score>, ScorerError> {
        let mut out = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.batch_size) {
            out.extend(self.round_trip(chunk)?);
        }
        Ok(out)
    }
}

impl Drop for ExternalScorer {
    fn drop(&mut self) {
        if let Transport::Stdio { child, .. } = &mut self.transport {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

/// Answers protocol requests from `input` with `scorer` until end of
/// input. Ids are echoed verbatim.
pub fn serve<R: BufRead, W: Write, S: Scorer + ?Sized>(
    input: R,
    mut output: W,
    scorer: &mut S,
) -> Result<(), ScorerError> {
    for line in input.lines() {
        let line = line.map_err(|e| ScorerError::ProtocolError(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let request: ScoreRequest =
            serde_json::from_str(&line).map_err(|e| ScorerError::ProtocolError(format!("bad request: {e}")))?;
        let texts: Vec<(&str, &str)> = request.pairs.iter().map(|p| (p.a.as_str(), p.b.as_str())).collect();
        let scores = scorer.score(&texts)?.into_iter().map(Score::value).collect();
        let response = ScoreResponse { id: request.id, scores };
        let mut text = serde_json::to_string(&response).map_err(|e| ScorerError::ProtocolError(e.to_string()))?;
        text.push('\n');
        output
            .write_all(text.as_bytes())
            .and_then(|_| output.flush())
            .map_err(|e| ScorerError::ProtocolError(e.to_string()))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexical(a: &str, b: &str) -> f64 {
        LexicalScorer::default().score(&[(a, b)]).unwrap()[0].value()
    }

    #[test]
    fn lexical_identical_and_disjoint() {
        assert_eq!(lexical("soybean milk", "soybean milk"), 1.0);
        assert_eq!(lexical("soybean milk", "plant food"), 0.0);
    }

    #[test]
    fn lexical_hand_value() {
        assert_eq!(lexical("soybean milk", "soybean food product"), 0.25);
    }

    #[test]
    fn lexical_ignores_separator_and_case() {
        assert_eq!(lexical("Soybean [SEP] milk", "milk soybean"), 1.0);
    }

    #[test]
    fn aggregate_is_mean() {
        let s = |v| Score::new(v).unwrap();
        assert!((aggregate_candidate(&[s(0.2), s(0.4)]).unwrap().value() - 0.3).abs() < 1e-15);
        assert_eq!(aggregate_candidate(&[s(0.7)]).unwrap().value(), 0.7);
        assert!(aggregate_candidate(&[]).is_none());
    }

    #[test]
    fn score_range_enforced() {
        assert!(Score::new(f64::NAN).is_none());
        assert!(Score::new(1.5).is_none());
        assert!(Score::new(-0.1).is_none());
        assert!(Score::new(0.0).is_some());
    }

    #[test]
    fn endpoint_parsing() {
        assert_eq!(Endpoint::parse("localhost:9000").unwrap(), Endpoint::Tcp("localhost:9000".into()));
        assert_eq!(Endpoint::parse("tcp:127.0.0.1:1").unwrap(), Endpoint::Tcp("127.0.0.1:1".into()));
        assert_eq!(Endpoint::parse("stdio:python3 serve.py").unwrap(), Endpoint::Stdio("python3 serve.py".into()));
        assert!(Endpoint::parse("nonsense").is_err());
        assert!(Endpoint::parse("stdio:").is_err());
    }

    #[test]
    fn response_validation() {
        assert!(parse_response(r#"{"id":3,"scores":[0.5]}"#, 3, 1).is_ok());
        assert!(matches!(parse_response(r#"{"id":4,"scores":[0.5]}"#, 3, 1), Err(ScorerError::ProtocolError(_))));
        assert!(matches!(parse_response(r#"{"id":3,"scores":[1.5]}"#, 3, 1), Err(ScorerError::ProtocolError(_))));
        assert!(matches!(parse_response(r#"{"id":3,"scores":[]}"#, 3, 1), Err(ScorerError::ProtocolError(_))));
        assert!(matches!(parse_response("garbage", 3, 1), Err(ScorerError::ProtocolError(_))));
    }

    #[test]
    fn serve_echoes_ids_in_order() {
        let input =
            "{\"id\":5,\"pairs\":[{\"a\":\"x y\",\"b\":\"x\"},{\"a\":\"p\",\"b\":\"q\"}]}\n\n{\"id\":9,\"pairs\":[]}\n";
        let mut out = Vec::new();
        serve(input.as_bytes(), &mut out, &mut LexicalScorer::default()).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, "{\"id\":5,\"scores\":[0.5,0.0]}\n{\"id\":9,\"scores\":[]}\n");
    }
}
