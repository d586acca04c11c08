use std::io::Write;

use privcount_core::precision::{format_sig, format_sig_f64, ExtReal};

pub fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad range start {a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad range end {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

pub fn ext(x: &ExtReal, digits: usize) -> String {
    format_sig(x, digits)
}

pub fn num(x: f64, digits: usize) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format_sig_f64(x, digits)
}

pub fn csv_writer<W: Write>(out: W, header: &[&str]) -> csv::Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

pub fn json<W: Write, T: serde::Serialize>(mut out: W, value: &T) -> Result<(), crate::CliError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("17:160"), Ok((17, 160)));
        assert!(parse_range("17").is_err());
        assert!(parse_range("9:3").is_err());
        assert!(parse_range("a:3").is_err());
    }

    #[test]
    fn infinity_spelled_out() {
        assert_eq!(num(f64::INFINITY, 6), "inf");
        assert_eq!(num(0.5, 6), "0.500000");
    }
}
