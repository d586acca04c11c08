use std::io::{BufRead, BufReader, Cursor, Write};
use std::net::{TcpListener, TcpStream};

use privcount_core::service::{serve_listener, serve_stream, ReleasePolicy, ServiceConfig, Session};
use privcount_core::CounterKind;

fn config(kind: CounterKind) -> ServiceConfig {
    let mut c = ServiceConfig::new("stdin", kind);
    c.seed = 4;
    c
}

fn run_script(cfg: &ServiceConfig, script: &str) -> (Vec<String>, privcount_core::Result<String>) {
    let mut session = Session::new(cfg).unwrap();
    let mut out = Vec::new();
    let release = serve_stream(&mut session, Cursor::new(script.as_bytes()), &mut out).map(|r| r.line);
    (String::from_utf8(out).unwrap().lines().map(String::from).collect(), release)
}

#[test]
fn stream_protocol() {
    let (replies, release) = run_script(
        &config(CounterKind::Morris),
        "VOTE 1\r\nVOTE 0\n\nSTATUS\nbogus\nRELEASE\nVOTE 1\nRELEASE\n",
    );
    assert_eq!(&replies[..4], ["ACK", "ACK", "COUNT 2", "ERR malformed"]);
    assert!(replies[4].starts_with("VALUE "), "{replies:?}");
    assert_eq!(replies[5], "ERR released");
    assert_eq!(replies.len(), 7);
    assert_eq!(release.unwrap(), replies[4]);
}

#[test]
fn stream_without_release_is_an_error() {
    let (replies, release) = run_script(&config(CounterKind::MaxGeo), "VOTE 1\n");
    assert_eq!(replies, ["ACK"]);
    assert!(release.is_err());
}

#[test]
fn automatic_release_and_estimate_only() {
    let mut cfg = config(CounterKind::Pcsa { m: 4 });
    cfg.release_policy = ReleasePolicy::AfterResponses(3);
    cfg.release_format = privcount_core::service::ReleaseFormat::EstimateOnly;
    let (replies, release) = run_script(&cfg, "VOTE 1\nVOTE 1\nVOTE 0\nVOTE 1\n");
    assert_eq!(&replies[..3], ["ACK", "ACK", "ACK"]);
    assert_eq!(replies[3], "ERR released");
    assert!(release.unwrap().starts_with("ESTIMATE "));
}

#[test]
fn same_seed_same_release() {
    let script = "VOTE 1\n".repeat(500) + "RELEASE\n";
    for kind in [CounterKind::Morris, CounterKind::HyperLogLog { m: 16 }] {
        let a = run_script(&config(kind), &script).1.unwrap();
        let b = run_script(&config(kind), &script).1.unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn json_config_round_trip() {
    let cfg = ServiceConfig::from_json(
        r#"{"endpoint": "127.0.0.1:0", "mechanism": "hyperloglog", "params": {"m": 32}, "seed": 1}"#,
    )
    .unwrap();
    assert_eq!(cfg.counter, CounterKind::HyperLogLog { m: 32 });
    assert!(!cfg.is_stdin());
    assert!(ServiceConfig::from_json(r#"{"endpoint": "stdin", "mechanism": "pcsa", "params": {"m": 3}}"#).is_err());
}

#[test]
fn tcp_sessions_share_one_counter() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let mut cfg = config(CounterKind::Morris);
    cfg.endpoint = addr.to_string();
    let session = Session::new(&cfg).unwrap();
    let server = std::thread::spawn(move || serve_listener(listener, session));

    let clients: Vec<_> = (0..4)
        .map(|_| {
            std::thread::spawn(move || {
                let stream = TcpStream::connect(addr).unwrap();
                (&stream).write_all("VOTE 1\n".repeat(25).as_bytes()).unwrap();
                let mut lines = BufReader::new(&stream).lines();
                for _ in 0..25 {
                    assert_eq!(lines.next().unwrap().unwrap(), "ACK");
                }
            })
        })
        .collect();
    clients.into_iter().for_each(|c| c.join().unwrap());

    let stream = TcpStream::connect(addr).unwrap();
    (&stream).write_all(b"STATUS\nRELEASE\nVOTE 1\n").unwrap();
    let replies: Vec<String> = BufReader::new(&stream).lines().take(3).map(Result::unwrap).collect();
    assert_eq!(replies[0], "COUNT 100");
    assert!(replies[1].starts_with("VALUE "));
    assert_eq!(replies[2], "ERR released");
    let release = server.join().unwrap().unwrap();
    assert_eq!(release.line, replies[1]);
    assert_eq!(release.responses_seen, 100);
}
