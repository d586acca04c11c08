//! A trusted aggregator speaking a line protocol.
//!
//! Clients send `VOTE 1` / `VOTE 0`; the session applies votes one at a time
//! to a single counter and answers `ACK`. `STATUS` reports how many votes
//! arrived, never the level. `RELEASE` publishes the counter once; after
//! that every vote is refused.

mod server;

use serde::{Deserialize, Serialize};

pub use server::{serve, serve_listener, serve_stream};

use crate::counters::{Counter, CounterKind, FmConstant};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Endpoint value selecting standard input/output instead of TCP.
pub const STDIN_ENDPOINT: &str = "stdin";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReleasePolicy {
    /// Release when a client sends `RELEASE`.
    #[default]
    OnCommand,
    /// Release automatically once this many votes were applied (or earlier
    /// on `RELEASE`).
    AfterResponses(u64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReleaseFormat {
    /// `VALUE <level> ESTIMATE <estimate>`
    #[default]
    LevelAndEstimate,
    /// `ESTIMATE <estimate>`
    EstimateOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServiceConfig {
    /// `host:port`, or `stdin`
    pub endpoint: String,
    #[serde(flatten)]
    pub counter: CounterKind,
    #[serde(default)]
    pub pre_count: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub release_policy: ReleasePolicy,
    #[serde(default)]
    pub release_format: ReleaseFormat,
}

impl ServiceConfig {
    pub fn new(endpoint: impl Into<String>, counter: CounterKind) -> Self {
        Self {
            endpoint: endpoint.into(),
            counter,
            pre_count: 0,
            seed: 0,
            release_policy: ReleasePolicy::OnCommand,
            release_format: ReleaseFormat::LevelAndEstimate,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ServiceConfig = serde_json::from_str(text)?;
        Counter::new(config.counter)?;
        if config.endpoint.is_empty() {
            return Err(Error::config("endpoint must not be empty"));
        }
        Ok(config)
    }

    pub fn is_stdin(&self) -> bool {
        self.endpoint == STDIN_ENDPOINT
    }
}

/// The published outcome of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Release {
    pub levels: Vec<u32>,
    /// counter estimate minus the pre-count
    pub estimate: f64,
    pub responses_seen: u64,
    /// the protocol line sent for this release
    pub line: String,
}

/// Per-question aggregation state.
#[derive(Debug)]
pub struct Session {
    counter: Counter,
    rng: RandomSource,
    phi: FmConstant,
    pre_count: u64,
    responses_seen: u64,
    policy: ReleasePolicy,
    format: ReleaseFormat,
    release: Option<Release>,
}

fn format_estimate(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl Session {
    /// Builds the counter and applies the pre-count with the session seed.
    pub fn new(config: &ServiceConfig) -> Result<Self> {
        let mut counter = Counter::new(config.counter)?;
        let mut rng = RandomSource::new(config.seed);
        counter.observe_many(config.pre_count, &mut rng);
        let phi = match config.counter {
            CounterKind::MaxGeo | CounterKind::Pcsa { .. } => FmConstant::default(),
            _ => FmConstant::compute(0),
        };
        let mut session = Self {
            counter,
            rng,
            phi,
            pre_count: config.pre_count,
            responses_seen: 0,
            policy: config.release_policy,
            format: config.release_format,
            release: None,
        };
        if session.policy == ReleasePolicy::AfterResponses(0) {
            session.do_release();
        }
        Ok(session)
    }

    pub fn responses_seen(&self) -> u64 {
        self.responses_seen
    }

    pub fn is_released(&self) -> bool {
        self.release.is_some()
    }

    pub fn release(&self) -> Option<&Release> {
        self.release.as_ref()
    }

    fn do_release(&mut self) -> String {
        let levels = self.counter.levels();
        let estimate = self.counter.estimate(&self.phi) - self.pre_count as f64;
        let level_text = levels.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let line = match self.format {
            ReleaseFormat::LevelAndEstimate => {
                format!("VALUE {level_text} ESTIMATE {}", format_estimate(estimate))
            }
            ReleaseFormat::EstimateOnly => format!("ESTIMATE {}", format_estimate(estimate)),
        };
        self.release = Some(Release {
            levels,
            estimate,
            responses_seen: self.responses_seen,
            line: line.clone(),
        });
        line
    }

    /// Reply to one protocol line (without its terminator). Blank lines get
    /// no reply.
    pub fn handle_line(&mut self, line: &str) -> Option<String> {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            return None;
        }
        let reply = match line {
            "VOTE 1" | "VOTE 0" => {
                if self.is_released() {
                    "ERR released".to_string()
                } else {
                    self.counter.observe(line == "VOTE 1", &mut self.rng);
                    self.responses_seen += 1;
                    if self.policy == ReleasePolicy::AfterResponses(self.responses_seen) {
                        self.do_release();
                    }
                    "ACK".to_string()
                }
            }
            "RELEASE" => {
                if self.is_released() {
                    "ERR released".to_string()
                } else {
                    self.do_release()
                }
            }
            "STATUS" => format!("COUNT {}", self.responses_seen),
            _ => "ERR malformed".to_string(),
        };
        Some(reply)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn morris(pre: u64) -> ServiceConfig {
        let mut c = ServiceConfig::new(STDIN_ENDPOINT, CounterKind::Morris);
        c.pre_count = pre;
        c
    }

    #[test]
    fn fresh_release() {
        let mut s = Session::new(&morris(0)).unwrap();
        assert_eq!(s.handle_line("RELEASE").unwrap(), "VALUE 1 ESTIMATE 0");
        assert_eq!(s.handle_line("VOTE 1").unwrap(), "ERR released");
        assert_eq!(s.handle_line("RELEASE").unwrap(), "ERR released");
        assert_eq!(s.release().unwrap().levels, vec![1]);
    }

    #[test]
    fn malformed_lines() {
        let mut s = Session::new(&morris(0)).unwrap();
        for bad in ["VOTE x", "vote 1", "VOTE 1 ", "VOTE", "VOTE 2", "release", "FOO"] {
            assert_eq!(s.handle_line(bad).unwrap(), "ERR malformed", "{bad:?}");
        }
        assert_eq!(s.handle_line(""), None);
        assert_eq!(s.handle_line("VOTE 1\r").unwrap(), "ACK");
        assert_eq!(s.responses_seen(), 1);
    }

    #[test]
    fn status_counts_votes_only() {
        let mut s = Session::new(&morris(0)).unwrap();
        for _ in 0..5 {
            s.handle_line("VOTE 1");
        }
        s.handle_line("VOTE 0");
        s.handle_line("garbage");
        assert_eq!(s.handle_line("STATUS").unwrap(), "COUNT 6");
    }

    #[test]
    fn pre_count_subtracted() {
        let mut s = Session::new(&morris(100)).unwrap();
        let line = s.handle_line("RELEASE").unwrap();
        let r = s.release().unwrap();
        let level = r.levels[0];
        assert_eq!(r.estimate, (2f64.powi(level as i32) - 2.0) - 100.0);
        assert_eq!(line, format!("VALUE {level} ESTIMATE {}", r.estimate as i64));
    }

    #[test]
    fn after_responses_policy() {
        let mut c = morris(0);
        c.release_policy = ReleasePolicy::AfterResponses(3);
        let mut s = Session::new(&c).unwrap();
        for _ in 0..3 {
            assert_eq!(s.handle_line("VOTE 1").unwrap(), "ACK");
        }
        assert!(s.is_released());
        assert_eq!(s.handle_line("VOTE 1").unwrap(), "ERR released");
        assert_eq!(s.release().unwrap().responses_seen, 3);
    }

    #[test]
    fn estimate_only_and_sketch_levels() {
        let mut c = ServiceConfig::new(STDIN_ENDPOINT, CounterKind::Pcsa { m: 4 });
        c.release_format = ReleaseFormat::EstimateOnly;
        let mut s = Session::new(&c).unwrap();
        assert_eq!(s.handle_line("RELEASE").unwrap(), "ESTIMATE 10");
        c.release_format = ReleaseFormat::LevelAndEstimate;
        let mut s = Session::new(&c).unwrap();
        assert_eq!(s.handle_line("RELEASE").unwrap(), "VALUE 1,1,1,1 ESTIMATE 10");
    }

    #[test]
    fn config_json() {
        let c = ServiceConfig::from_json(
            r#"{"endpoint": "127.0.0.1:0", "mechanism": "hyperloglog", "params": {"m": 16},
                "pre_count": 3, "seed": 5, "release_policy": {"after-responses": 10}}"#,
        )
        .unwrap();
        assert_eq!(c.counter, CounterKind::HyperLogLog { m: 16 });
        assert_eq!(c.release_policy, ReleasePolicy::AfterResponses(10));
        let c = ServiceConfig::from_json(r#"{"endpoint": "stdin", "mechanism": "morris", "release_policy": "on-command"}"#).unwrap();
        assert!(c.is_stdin());
        assert!(ServiceConfig::from_json(r#"{"endpoint": "stdin", "mechanism": "pcsa", "params": {"m": 3}}"#).is_err());
    }
}
