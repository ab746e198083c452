//! Report files: plot tables, CSV and JSON.
//!
//! Decimals are produced from exact rationals only at formatting time.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde_json::{json, Value as Json};
use shrinktarget_core::criteria::{SeriesReport, TypeEvidence};
use shrinktarget_core::orbit::CensusSummary;
use shrinktarget_core::{CertifiedScalar, ExactRational};

/// Significant digits of every printed decimal.
pub const DIGITS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

fn floor_log10(x: &ExactRational) -> i64 {
    // x > 0; start from the digit counts and correct by one
    let ten = ExactRational::from_integer(10.into());
    let mut e = x.numer().to_string().len() as i64 - x.denom().to_string().len() as i64;
    let pow = |e: i64| ten.pow(e as i32);
    while pow(e) > *x {
        e -= 1;
    }
    while pow(e + 1) <= *x {
        e += 1;
    }
    e
}

/// Scientific notation with `digits` significant digits, rounded as asked.
pub fn fmt_sci(x: &ExactRational, digits: u32, mode: Round) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let e = floor_log10(&a);
    let shift = digits as i64 - 1 - e;
    let ten = BigInt::from(10);
    let scaled = if shift >= 0 {
        &a * ExactRational::from_integer(ten.pow(shift as u32))
    } else {
        &a / ExactRational::from_integer(ten.pow((-shift) as u32))
    };
    // rounding the magnitude; Down/Up refer to the signed value
    let toward_zero = matches!((mode, neg), (Round::Down, false) | (Round::Up, true));
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut m = match mode {
        Round::Nearest => {
            if &r * 2 >= *scaled.denom() {
                q + 1
            } else {
                q
            }
        }
        _ if toward_zero || r.is_zero() => q,
        _ => q + 1,
    };
    let mut e = e;
    if m.to_string().len() as u32 > digits {
        m /= 10;
        e += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

pub fn fmt_exact(x: &ExactRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `value±radius`, or just the value when exact.
pub fn fmt_certified_exact(x: &CertifiedScalar) -> String {
    if x.is_exact() {
        fmt_exact(&x.value)
    } else {
        format!("{}±{}", fmt_exact(&x.value), fmt_exact(&x.radius))
    }
}

pub fn scalar_json(x: &CertifiedScalar) -> Json {
    json!({
        "value": fmt_sci(&x.value, DIGITS, Round::Nearest),
        "lo": fmt_sci(&x.lo(), DIGITS, Round::Down),
        "hi": fmt_sci(&x.hi(), DIGITS, Round::Up),
        "exact": fmt_certified_exact(x),
    })
}

pub fn rational_json(x: &ExactRational) -> Json {
    json!({ "value": fmt_sci(x, DIGITS, Round::Nearest), "exact": fmt_exact(x) })
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(u128),
    Scalar(CertifiedScalar),
}

/// Columnar data for external plotting.
pub trait PlotData {
    fn columns(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<Cell>>;
}

impl PlotData for SeriesReport {
    fn columns(&self) -> Vec<&'static str> {
        vec!["n", "term", "partial_sum"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.terms
            .iter()
            .zip(&self.partial_sums)
            .map(|(t, s)| vec![Cell::Int(t.n as u128), Cell::Scalar(t.value.clone()), Cell::Scalar(s.clone())])
            .collect()
    }
}

impl PlotData for TypeEvidence {
    fn columns(&self) -> Vec<&'static str> {
        vec!["n", "theta_scaled", "omega_scaled"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.samples
            .iter()
            .map(|s| {
                vec![
                    Cell::Int(s.n as u128),
                    Cell::Scalar(s.theta_scaled.clone()),
                    Cell::Scalar(s.omega_scaled.clone()),
                ]
            })
            .collect()
    }
}

impl PlotData for CensusSummary {
    fn columns(&self) -> Vec<&'static str> {
        vec!["id", "hit_count", "stat_hi"]
    }

    fn rows(&self) -> Vec<Vec<Cell>> {
        self.records
            .iter()
            .map(|r| {
                let stat = r
                    .stat
                    .as_ref()
                    .map(|s| CertifiedScalar::from_bounds(s.hi.clone(), s.hi.clone()))
                    .unwrap_or_else(|| CertifiedScalar::exact(ExactRational::zero()));
                vec![Cell::Int(r.sample_id as u128), Cell::Int(r.hits.len() as u128), Cell::Scalar(stat)]
            })
            .collect()
    }
}

fn exact_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".exact");
    PathBuf::from(s)
}

/// Writes whitespace-separated columns to `path` and the exact rationals to
/// `path.exact`. Returns both paths.
pub fn emit_plot_data(report: &impl PlotData, path: &Path) -> io::Result<[PathBuf; 2]> {
    let cols = report.columns().join(" ");
    let mut text = format!(
        "# columns: {cols}\n# precision: decimals are interval midpoints rounded to {DIGITS} significant digits; exact values in .exact\n"
    );
    let mut exact = format!("# columns: {cols}\n# exact: value±radius as rationals\n");
    for row in report.rows() {
        let dec: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(n) => n.to_string(),
                Cell::Scalar(x) => fmt_sci(&x.value, DIGITS, Round::Nearest),
            })
            .collect();
        let ex: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Int(n) => n.to_string(),
                Cell::Scalar(x) => fmt_certified_exact(x),
            })
            .collect();
        text.push_str(&dec.join(" "));
        text.push('\n');
        exact.push_str(&ex.join(" "));
        exact.push('\n');
    }
    let epath = exact_path(path);
    fs::write(path, text)?;
    fs::write(&epath, exact)?;
    Ok([path.to_path_buf(), epath])
}

pub const CENSUS_HEADER: &str = "id,hit_count,stat_lo,stat_hi,inconclusive";

/// One row per sample; the statistic enclosure is rounded outward.
pub fn census_csv(summary: &CensusSummary) -> String {
    let mut out = format!("{CENSUS_HEADER}\n");
    for r in &summary.records {
        let (lo, hi) = match &r.stat {
            Some(s) => (fmt_sci(&s.lo, DIGITS, Round::Down), fmt_sci(&s.hi, DIGITS, Round::Up)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!("{},{},{lo},{hi},{}\n", r.sample_id, r.hits.len(), r.inconclusive));
    }
    out
}

pub fn write_json(path: &Path, value: &Json) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shrinktarget_core::exact::rat;

    #[test]
    fn scientific_rounding() {
        assert_eq!(fmt_sci(&rat(1, 3), 4, Round::Nearest), "3.333e-1");
        assert_eq!(fmt_sci(&rat(1, 3), 4, Round::Up), "3.334e-1");
        assert_eq!(fmt_sci(&rat(-1, 3), 4, Round::Down), "-3.334e-1");
        assert_eq!(fmt_sci(&rat(2, 3), 3, Round::Nearest), "6.67e-1");
        assert_eq!(fmt_sci(&rat(9999, 1), 3, Round::Nearest), "1e4");
        assert_eq!(fmt_sci(&rat(1, 8), 12, Round::Down), "1.25e-1");
        assert_eq!(fmt_sci(&rat(0, 1), 5, Round::Up), "0");
        let tiny = ExactRational::new(1.into(), BigInt::from(10).pow(400));
        assert_eq!(fmt_sci(&tiny, 5, Round::Nearest), "1e-400");
    }

    #[test]
    fn directed_rounding_encloses() {
        for (n, d) in [(1i64, 7i64), (22, 7), (-5, 13), (123456789, 1000)] {
            let x = rat(n, d);
            let lo = crate::config::parse_rational(&fmt_sci(&x, 6, Round::Down)).unwrap();
            let hi = crate::config::parse_rational(&fmt_sci(&x, 6, Round::Up)).unwrap();
            assert!(lo <= x && x <= hi);
        }
    }
}
