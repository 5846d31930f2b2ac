use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use ontosub::scorer::{serve, Endpoint, ExternalScorer, LexicalScorer, Scorer, ScorerError};

fn pairs() -> Vec<(String, String)> {
    (0..10).map(|i| (format!("soybean milk {i} [SEP] soybean"), format!("soybean food product {}", i % 3))).collect()
}

fn as_refs(p: &[(String, String)]) -> Vec<(&str, &str)> {
    p.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

/// Listens on an ephemeral port and answers one connection with `handler`.
fn spawn_server(handler: impl FnOnce(BufReader<std::net::TcpStream>, std::net::TcpStream) + Send + 'static) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        handler(BufReader::new(stream.try_clone().unwrap()), stream);
    });
    addr
}

#[test]
fn tcp_round_trip_matches_local_scorer() {
    let addr = spawn_server(|reader, writer| {
        serve(reader, writer, &mut LexicalScorer::default()).unwrap();
    });
    let mut remote = ExternalScorer::connect(&Endpoint::Tcp(addr), 3, Duration::from_secs(5)).unwrap();
    let p = pairs();
    let got = remote.score(&as_refs(&p)).unwrap();
    let want = LexicalScorer::default().score(&as_refs(&p)).unwrap();
    assert_eq!(got, want);
}

fn one_bad_reply(reply: &'static str) -> ScorerError {
    let addr = spawn_server(move |mut reader, mut writer| {
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        writer.write_all(reply.as_bytes()).unwrap();
    });
    let mut remote = ExternalScorer::connect(&Endpoint::Tcp(addr), 8, Duration::from_secs(5)).unwrap();
    remote.score(&[("a", "b")]).unwrap_err()
}

#[test]
fn mismatched_id_is_a_protocol_error() {
    assert!(matches!(one_bad_reply("{\"id\":7,\"scores\":[0.5]}\n"), ScorerError::ProtocolError(_)));
}

#[test]
fn out_of_range_score_is_a_protocol_error() {
    assert!(matches!(one_bad_reply("{\"id\":0,\"scores\":[1.5]}\n"), ScorerError::ProtocolError(_)));
}

#[test]
fn wrong_count_is_a_protocol_error() {
    assert!(matches!(one_bad_reply("{\"id\":0,\"scores\":[0.1,0.2]}\n"), ScorerError::ProtocolError(_)));
}

#[test]
fn closed_connection_is_unavailable() {
    let addr = spawn_server(|_, _| {});
    let mut remote = ExternalScorer::connect(&Endpoint::Tcp(addr), 8, Duration::from_secs(5)).unwrap();
    assert!(matches!(remote.score(&[("a", "b")]), Err(ScorerError::ScorerUnavailable { .. })));
}

#[test]
fn nothing_listening_is_unavailable() {
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let err = ExternalScorer::connect(&Endpoint::Tcp(format!("127.0.0.1:{port}")), 8, Duration::from_secs(1));
    assert!(matches!(err, Err(ScorerError::ScorerUnavailable { .. })));
}

#[test]
fn stdio_echo_is_rejected() {
    let mut remote = ExternalScorer::connect(&Endpoint::Stdio("cat".into()), 8, Duration::from_secs(5)).unwrap();
    assert!(matches!(remote.score(&[("a", "b")]), Err(ScorerError::ProtocolError(_))));
}

#[test]
fn stdio_silence_times_out() {
    let mut remote =
        ExternalScorer::connect(&Endpoint::Stdio("sleep 5".into()), 8, Duration::from_millis(200)).unwrap();
    match remote.score(&[("a", "b")]) {
        Err(ScorerError::ScorerUnavailable { detail, .. }) => assert!(detail.contains("timed out")),
        other => panic!("unexpected {other:?}"),
    }
}
