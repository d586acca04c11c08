//! Probabilistic counters (Morris, MaxGeo, PCSA, HyperLogLog), their exact
//! level distributions in extended precision, differential-privacy audits of
//! the released levels, a survey simulator and a line-protocol aggregator.
//!
//! ```
//! use privcount_core::{morris_audit, morris_pmf};
//!
//! // P(M_5 = 6) = 2^-15
//! assert_eq!(morris_pmf(5, 6).to_f64(), 2f64.powi(-15));
//! let audit = morris_audit(200).unwrap();
//! assert!(audit.dp_claim().delta < 0.00033);
//! ```

pub mod audit;
pub mod counters;
pub mod dist;
mod error;
pub mod precision;
pub mod rng;
mod serde_ext;
pub mod service;
pub mod stats;
pub mod survey;

pub use audit::{
    maxgeo_eps_given_n, maxgeo_l_epsilon, maxgeo_min_n, morris_audit, morris_bound_l,
    morris_epsilon_exact, parallel_compose, DpParams, MaxGeoAudit, MorrisAudit,
};
pub use counters::{Counter, CounterKind, FmConstant, HllState, MaxGeoState, MorrisState, PcsaState};
pub use dist::{interval_in, interval_jn, maxgeo_cdf, maxgeo_pmf, morris_pmf, morris_row, Interval, ProbRow};
pub use error::{Error, Result};
pub use precision::ExtReal;
pub use rng::{BitSource, RandomSource};
pub use service::{ServiceConfig, Session};
pub use survey::{run_survey, SurveyConfig, SurveyOutcome};
