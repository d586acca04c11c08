//! Simulation of a one-question survey aggregated by a counter or by the
//! Laplace mechanism.

mod compare;
mod footprint;
mod laplace;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compare::{comparison_table, ComparisonRow, COMPARISON_DELTA};
pub use footprint::MemoryFootprint;
pub use laplace::laplace_sample;

use crate::audit::{laplace_epsilon, maxgeo_eps_given_n, maxgeo_min_n, morris_audit, DpParams, MORRIS_MIN_N};
use crate::counters::{Counter, CounterKind, FmConstant};
use crate::error::{Error, Result};
use crate::rng::RandomSource;
use crate::stats::mean_variance;

pub const DEFAULT_TRIALS: u64 = 10_000;

fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

/// Aggregation mechanism for a survey. Serialized as
/// `"mechanism": "pcsa", "params": {"m": 64}` next to the other fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", content = "params", rename_all = "lowercase")]
pub enum SurveyMechanism {
    Morris,
    MaxGeo,
    Pcsa { m: usize },
    HyperLogLog { m: usize },
    Laplace { lambda: f64 },
}

impl SurveyMechanism {
    pub fn counter_kind(&self) -> Option<CounterKind> {
        match *self {
            SurveyMechanism::Morris => Some(CounterKind::Morris),
            SurveyMechanism::MaxGeo => Some(CounterKind::MaxGeo),
            SurveyMechanism::Pcsa { m } => Some(CounterKind::Pcsa { m }),
            SurveyMechanism::HyperLogLog { m } => Some(CounterKind::HyperLogLog { m }),
            SurveyMechanism::Laplace { .. } => None,
        }
    }
}

impl From<CounterKind> for SurveyMechanism {
    fn from(kind: CounterKind) -> Self {
        match kind {
            CounterKind::Morris => SurveyMechanism::Morris,
            CounterKind::MaxGeo => SurveyMechanism::MaxGeo,
            CounterKind::Pcsa { m } => SurveyMechanism::Pcsa { m },
            CounterKind::HyperLogLog { m } => SurveyMechanism::HyperLogLog { m },
        }
    }
}

/// Survey population, answers and aggregation settings.
///
/// Exactly one of `true_count` (answers are `true_count` trues followed by
/// falses) and `responses` (explicit answers, length `population`) is set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyConfig {
    pub population: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub responses: Option<Vec<bool>>,
    #[serde(flatten)]
    pub mechanism: SurveyMechanism,
    #[serde(default)]
    pub pre_count: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Guarantee to check the run against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dp_target: Option<DpParams>,
}

impl SurveyConfig {
    pub fn new(population: u64, true_count: u64, mechanism: SurveyMechanism) -> Self {
        Self {
            population,
            true_count: Some(true_count),
            responses: None,
            mechanism,
            pre_count: 0,
            seed: 0,
            trials: DEFAULT_TRIALS,
            dp_target: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: SurveyConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.true_count, &self.responses) {
            (Some(t), None) if *t > self.population => {
                return Err(Error::config(format!(
                    "true_count {t} exceeds population {}",
                    self.population
                )))
            }
            (None, Some(r)) if r.len() as u64 != self.population => {
                return Err(Error::config(format!(
                    "{} responses given for population {}",
                    r.len(),
                    self.population
                )))
            }
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::config("set exactly one of true_count and responses"))
            }
            _ => {}
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be positive"));
        }
        match self.mechanism.counter_kind() {
            Some(kind) => {
                Counter::new(kind)?;
            }
            None => {
                if let SurveyMechanism::Laplace { lambda } = self.mechanism {
                    laplace_epsilon(lambda)?;
                }
            }
        }
        Ok(())
    }

    /// Number of true answers.
    pub fn true_answers(&self) -> u64 {
        match (&self.true_count, &self.responses) {
            (Some(t), _) => *t,
            (None, Some(r)) => r.iter().filter(|&&b| b).count() as u64,
            (None, None) => 0,
        }
    }

    fn answers(&self) -> Box<dyn Iterator<Item = bool> + '_> {
        match (&self.true_count, &self.responses) {
            (Some(t), _) => Box::new((0..self.population).map(move |i| i < *t)),
            (None, Some(r)) => Box::new(r.iter().copied()),
            (None, None) => Box::new(std::iter::empty()),
        }
    }
}

/// What one trial released and the pre-count-corrected estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    /// counter level, register sum for sketches, or the noisy count
    pub released: f64,
    pub estimate: f64,
}

/// Privacy guarantee attached to a survey run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyDp {
    pub params: DpParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub requested: Option<DpParams>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveyOutcome {
    pub config: SurveyConfig,
    pub records: Vec<TrialRecord>,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub std_error: f64,
    pub rmse: f64,
    pub dp: Option<SurveyDp>,
}

/// JSON summary of a survey run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveySummary {
    pub config: SurveyConfig,
    pub mean: f64,
    pub bias: f64,
    pub variance: f64,
    pub std_error: f64,
    pub rmse: f64,
    pub dp: Option<SurveyDp>,
}

impl SurveyOutcome {
    pub fn summary(&self) -> SurveySummary {
        SurveySummary {
            config: self.config.clone(),
            mean: self.mean,
            bias: self.bias,
            variance: self.variance,
            std_error: self.std_error,
            rmse: self.rmse,
            dp: self.dp.clone(),
        }
    }
}

fn run_trial(config: &SurveyConfig, trial: u64, phi: &FmConstant) -> Result<TrialRecord> {
    let mut rng = RandomSource::for_stream(config.seed, trial);
    let pre = config.pre_count as f64;
    let (released, raw) = match config.mechanism {
        SurveyMechanism::Laplace { lambda } => {
            let noisy = (config.true_answers() + config.pre_count) as f64 + laplace_sample(&mut rng, lambda);
            (noisy, noisy)
        }
        mechanism => {
            let kind = mechanism.counter_kind().expect("non-Laplace mechanisms are counters");
            let mut counter = Counter::new(kind)?;
            counter.observe_many(config.pre_count, &mut rng);
            for answer in config.answers() {
                counter.observe(answer, &mut rng);
            }
            (counter.released_scalar(), counter.estimate(phi))
        }
    };
    Ok(TrialRecord { trial, released, estimate: raw - pre })
}

fn survey_dp(config: &SurveyConfig) -> Result<Option<SurveyDp>> {
    let n = config.true_answers() + config.pre_count;
    let requested = config.dp_target;
    let within = |params: DpParams| requested.map_or(true, |r| params.is_within(&r));
    Ok(match config.mechanism {
        SurveyMechanism::Laplace { lambda } => {
            let params = DpParams::new(laplace_epsilon(lambda)?, 0.0)?;
            Some(SurveyDp { params, requested, satisfied: within(params) })
        }
        SurveyMechanism::Morris if n >= MORRIS_MIN_N => {
            let params = morris_audit(n)?.dp_claim();
            Some(SurveyDp { params, requested, satisfied: within(params) })
        }
        SurveyMechanism::MaxGeo => match requested {
            Some(r) => Some(SurveyDp {
                params: r,
                requested,
                satisfied: n >= maxgeo_min_n(r.epsilon, r.delta)?,
            }),
            None => maxgeo_eps_given_n(n.max(1), COMPARISON_DELTA).ok().map(|env| SurveyDp {
                params: DpParams { epsilon: env.eps0, delta: COMPARISON_DELTA },
                requested: None,
                satisfied: true,
            }),
        },
        _ => None,
    })
}

/// Runs `config.trials` independent trials, trial `i` drawing from stream
/// `i` of the configured seed.
pub fn run_survey(config: &SurveyConfig) -> Result<SurveyOutcome> {
    config.validate()?;
    let phi = match config.mechanism {
        SurveyMechanism::MaxGeo | SurveyMechanism::Pcsa { .. } => FmConstant::default(),
        _ => FmConstant::compute(0),
    };
    let records: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t, &phi))
        .collect::<Result<_>>()?;
    let estimates: Vec<f64> = records.iter().map(|r| r.estimate).collect();
    let (mean, variance, std_error) = mean_variance(&estimates);
    let truth = config.true_answers() as f64;
    let rmse = (estimates.iter().map(|e| (e - truth) * (e - truth)).sum::<f64>() / estimates.len() as f64).sqrt();
    Ok(SurveyOutcome {
        config: config.clone(),
        records,
        mean,
        bias: mean - truth,
        variance,
        std_error,
        rmse,
        dp: survey_dp(config)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_requests_releases_initial_level() {
        let mut c = SurveyConfig::new(50, 0, SurveyMechanism::Morris);
        c.trials = 200;
        let out = run_survey(&c).unwrap();
        assert!(out.records.iter().all(|r| r.released == 1.0 && r.estimate == 0.0));
        assert_eq!(out.rmse, 0.0);
        assert!(out.dp.is_none());
    }

    #[test]
    fn config_json_shape() {
        let text = r#"{"population": 300, "true_count": 200, "mechanism": "pcsa",
                       "params": {"m": 16}, "pre_count": 5, "seed": 9, "trials": 10}"#;
        let c = SurveyConfig::from_json(text).unwrap();
        assert_eq!(c.mechanism, SurveyMechanism::Pcsa { m: 16 });
        assert_eq!(c.pre_count, 5);
        let c: SurveyConfig = serde_json::from_str(r#"{"population": 3, "true_count": 1, "mechanism": "morris"}"#).unwrap();
        assert_eq!(c.trials, DEFAULT_TRIALS);
        let back: SurveyConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn config_validation() {
        assert!(SurveyConfig::new(10, 11, SurveyMechanism::Morris).validate().is_err());
        assert!(SurveyConfig::new(10, 5, SurveyMechanism::Pcsa { m: 3 }).validate().is_err());
        assert!(SurveyConfig::new(10, 5, SurveyMechanism::HyperLogLog { m: 8 }).validate().is_err());
        assert!(SurveyConfig::new(10, 5, SurveyMechanism::Laplace { lambda: 0.0 }).validate().is_err());
        let mut c = SurveyConfig::new(3, 1, SurveyMechanism::Morris);
        c.responses = Some(vec![true, false, true]);
        assert!(c.validate().is_err());
        c.true_count = None;
        assert!(c.validate().is_ok());
        assert_eq!(c.true_answers(), 2);
        c.responses = Some(vec![true]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn laplace_release_is_count_plus_noise() {
        let mut c = SurveyConfig::new(100, 40, SurveyMechanism::Laplace { lambda: 2.0 });
        c.pre_count = 10;
        c.trials = 50;
        let out = run_survey(&c).unwrap();
        for r in &out.records {
            assert_eq!(r.estimate, r.released - 10.0);
        }
        assert_eq!(out.dp.unwrap().params, DpParams { epsilon: 0.5, delta: 0.0 });
    }

    #[test]
    fn maxgeo_target_checked_against_min_n() {
        let mut c = SurveyConfig::new(300, 20, SurveyMechanism::MaxGeo);
        c.trials = 1;
        c.dp_target = Some(DpParams { epsilon: 0.5, delta: 0.00033 });
        assert!(!run_survey(&c).unwrap().dp.unwrap().satisfied);
        c.pre_count = 8;
        assert!(run_survey(&c).unwrap().dp.unwrap().satisfied);
    }
}
