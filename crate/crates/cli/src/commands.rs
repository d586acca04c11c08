use std::fs;
use std::io::Write;
use std::path::Path;

use privcount_core::audit::{
    epsilon_curve_rows, maxgeo_dp_check, maxgeo_envelope_rows, morris_audit, morris_epsilon_exact_with,
    LEpsilonRule, MaxGeoAudit,
};
use privcount_core::counters::FmConstant;
use privcount_core::dist::{
    interval_in, lemma_sequences, maxgeo_cdf, maxgeo_pmf, morris_row, morris_tails, ratio_table,
};
use privcount_core::precision::round_up;
use privcount_core::service::{self, ServiceConfig};
use privcount_core::survey::{comparison_table, run_survey, SurveyConfig};

use crate::output::{csv_writer, ext, json, num};
use crate::CliError;

type Out<'a> = &'a mut dyn Write;

pub fn dist_morris(out: Out, n: u64, moments: bool, tails: bool, digits: usize) -> Result<(), CliError> {
    if tails {
        let t = morris_tails(n)?;
        let interval = interval_in(n)?;
        let mut w = csv_writer(out, &["n", "interval", "delta1", "delta2", "delta_total"])?;
        w.write_record([
            n.to_string(),
            interval.to_string(),
            ext(&t.delta1, digits),
            ext(&t.delta2, digits),
            ext(&t.delta_total, digits),
        ])?;
        w.flush()?;
        return Ok(());
    }
    let row = morris_row(n)?;
    if moments {
        let m = row.moments();
        let mut w = csv_writer(out, &["n", "mean", "variance", "mean_pow2"])?;
        w.write_record([
            n.to_string(),
            ext(&m.mean, digits),
            ext(&m.variance, digits),
            ext(&m.mean_pow2, digits),
        ])?;
        w.flush()?;
        return Ok(());
    }
    let mut w = csv_writer(out, &["n", "l", "p"])?;
    for (i, p) in row.probs().iter().enumerate() {
        w.write_record([n.to_string(), (i + 1).to_string(), ext(p, digits)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn dist_maxgeo(out: Out, n: u64, l: u64, digits: usize) -> Result<(), CliError> {
    let mut w = csv_writer(out, &["n", "l", "pmf", "cdf"])?;
    w.write_record([
        n.to_string(),
        l.to_string(),
        ext(&maxgeo_pmf(n, l), digits),
        ext(&maxgeo_cdf(n, l), digits),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn audit_morris_one(out: Out, n: u64, strict: bool) -> Result<(), CliError> {
    let mut audit = morris_audit(n)?;
    if strict {
        let e = morris_epsilon_exact_with(n, true)?;
        audit.epsilon_exact = e.epsilon;
        audit.argmax_k = e.argmax_k;
        audit.direction = e.direction;
    }
    json(out, &audit.report())
}

pub fn audit_morris_range(
    out: Out,
    (lo, hi): (u64, u64),
    csv: bool,
    strict: bool,
    digits: usize,
) -> Result<(), CliError> {
    let mut rows = epsilon_curve_rows(lo, hi)?;
    if strict {
        for row in &mut rows {
            row.epsilon_exact = round_up(&morris_epsilon_exact_with(row.n, true)?.epsilon);
        }
    }
    if !csv {
        return json(out, &rows);
    }
    let mut w = csv_writer(out, &["n", "epsilon_exact", "lower_curve", "upper_curve"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            num(r.epsilon_exact, digits),
            num(r.lower_curve, digits),
            num(r.upper_curve, digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(serde::Serialize)]
struct CheckReport {
    l_epsilon: u32,
    n_min: u64,
    cdf_tail: f64,
    max_log_ratio: f64,
    worst_level: u64,
    cdf_ok: bool,
    ratio_ok: bool,
}

#[derive(serde::Serialize)]
struct MinNWithCheck {
    #[serde(flatten)]
    audit: MaxGeoAudit,
    check: CheckReport,
}

pub fn audit_maxgeo_min_n(out: Out, epsilon: f64, delta: f64, compat: bool, check: bool) -> Result<(), CliError> {
    let rule = if compat { LEpsilonRule::Compat } else { LEpsilonRule::Exact };
    let audit = MaxGeoAudit::min_n(epsilon, delta, rule)?;
    if !check {
        return json(out, &audit);
    }
    let c = maxgeo_dp_check(epsilon, delta)?;
    let check = CheckReport {
        l_epsilon: c.l_epsilon,
        n_min: c.n_min,
        cdf_tail: round_up(&c.cdf_tail),
        max_log_ratio: round_up(&c.max_log_ratio),
        worst_level: c.worst_level,
        cdf_ok: c.cdf_ok,
        ratio_ok: c.ratio_ok,
    };
    json(out, &MinNWithCheck { audit, check })
}

pub fn audit_maxgeo_given_n(out: Out, n: u64, delta: f64) -> Result<(), CliError> {
    json(out, &MaxGeoAudit::given_n(n, delta)?)
}

pub fn audit_maxgeo_range(out: Out, (lo, hi): (u64, u64), delta: f64, digits: usize) -> Result<(), CliError> {
    let rows = maxgeo_envelope_rows(lo, hi, delta)?;
    let mut w = csv_writer(out, &["n", "morris_eps", "maxgeo_eps0", "psi", "phi"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            num(r.morris_eps, digits),
            num(r.maxgeo_eps0, digits),
            num(r.psi, digits),
            num(r.phi, digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn survey(out: Out, config: &Path, trials_csv: Option<&Path>, digits: usize) -> Result<(), CliError> {
    let config = SurveyConfig::from_json(&fs::read_to_string(config)?)?;
    let outcome = run_survey(&config)?;
    if let Some(path) = trials_csv {
        let mut w = csv_writer(fs::File::create(path)?, &["trial", "released", "estimate"])?;
        for r in &outcome.records {
            w.write_record([r.trial.to_string(), num(r.released, digits), num(r.estimate, digits)])?;
        }
        w.flush()?;
    }
    json(out, &outcome.summary())
}

pub fn serve(config: &Path) -> Result<(), CliError> {
    let config = ServiceConfig::from_json(&fs::read_to_string(config)?)?;
    let release = service::serve(&config)?;
    if !config.is_stdin() {
        println!("{}", release.line);
    }
    Ok(())
}

pub fn tables_alfa(out: Out, n: u64, i_max: u64, digits: usize) -> Result<(), CliError> {
    let rows = ratio_table(n, i_max)?;
    let mut w = csv_writer(out, &["i", "theta", "pow2", "ratio"])?;
    for r in rows {
        w.write_record([r.i.to_string(), ext(&r.theta, digits), num(r.pow2, digits), ext(&r.scaled, digits)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn tables_init(out: Out, k_min: u32, k_max: u32, digits: usize) -> Result<(), CliError> {
    let seq = lemma_sequences(k_min, k_max)?;
    {
        let mut w = csv_writer(&mut *out, &["k", "p_k4", "p_k5"])?;
        for (k, p4, p5) in &seq.rows {
            w.write_record([k.to_string(), ext(p4, digits), ext(p5, digits)])?;
        }
        w.flush()?;
    }
    eprintln!(
        "first sequence strictly descending: {}; second strictly ascending: {}; p_k4 <= 2^7 p_k5 for k >= 7: {}",
        seq.first_descending, seq.second_ascending, seq.claim_holds
    );
    Ok(())
}

pub fn compare(out: Out, n: u64, as_json: bool, digits: usize) -> Result<(), CliError> {
    let rows = comparison_table(n)?;
    if as_json {
        return json(out, &rows);
    }
    let mut w = csv_writer(
        out,
        &["method", "epsilon", "delta", "epsilon_approx", "estimator", "variance", "memory_bits"],
    )?;
    for r in rows {
        w.write_record([
            r.method,
            num(r.dp.epsilon, digits),
            num(r.dp.delta, digits),
            num(r.epsilon_approx, digits),
            r.estimator,
            num(r.variance, digits),
            num(r.memory_bits, digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn phi(out: Out, terms: u64, digits: usize) -> Result<(), CliError> {
    let phi = FmConstant::compute(terms);
    let mut w = csv_writer(out, &["terms", "phi", "converged"])?;
    w.write_record([phi.terms_used().to_string(), ext(phi.value(), digits), phi.is_converged().to_string()])?;
    w.flush()?;
    Ok(())
}
