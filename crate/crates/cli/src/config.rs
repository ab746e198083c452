//! `key=value` run configuration.
//!
//! One entry per line; `#` starts a comment; blank lines are ignored. Every
//! number is read as an exact rational: `3`, `-2/7`, `0.125`, `1e-40`.
//! Unknown keys, repeated keys and keys that do not apply to the command are
//! errors.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use shrinktarget_core::construct::{ARule, HRule};
use shrinktarget_core::ExactRational;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Approx,
    Criteria,
    Construct,
    Simulate,
    Transfer,
    Verify,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Approx,
        Command::Criteria,
        Command::Construct,
        Command::Simulate,
        Command::Transfer,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Approx => "approx",
            Command::Criteria => "criteria",
            Command::Construct => "construct",
            Command::Simulate => "simulate",
            Command::Transfer => "transfer",
            Command::Verify => "verify",
        }
    }

    pub fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where `θ` comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThetaSpec {
    Literal(Vec<ExactRational>),
    /// `k`-th convergent of `√2 - 1`.
    Pell(usize),
    /// The construction given by `a`, `h0`, `h`, `steps`.
    Construction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Rational(ExactRational),
    Integer(BigInt),
    Theta(ThetaSpec),
    A(ARule),
    H(HRule),
    Word(String),
    Path(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Rational,
    Integer,
    Theta,
    A,
    H,
    Word(&'static [&'static str]),
    Path,
}

use Command::*;

const ALL: &[Command] = &[Approx, Criteria, Construct, Simulate, Transfer, Verify];
const WITH_THETA: &[Command] = &[Approx, Criteria, Simulate, Transfer];
const WITH_SEQUENCES: &[Command] = &[Criteria, Construct, Simulate];

pub const CRITERIA: &[&str] = &["thm5", "prop32", "lemma22", "dyadic", "bracket", "evidence"];

/// Key, value kind, commands accepting it.
const KEYS: &[(&str, Kind, &[Command])] = &[
    ("theta", Kind::Theta, WITH_THETA),
    ("radius", Kind::Rational, WITH_THETA),
    ("kind", Kind::Word(&["simultaneous", "linear"]), &[Approx, Criteria]),
    ("limit", Kind::Integer, &[Approx]),
    ("criterion", Kind::Word(CRITERIA), &[Criteria]),
    ("terms", Kind::Integer, &[Criteria]),
    ("delta", Kind::Rational, &[Criteria, Simulate]),
    ("tau", Kind::Rational, &[Criteria]),
    ("a", Kind::A, WITH_SEQUENCES),
    ("h0", Kind::Integer, WITH_SEQUENCES),
    ("h", Kind::H, WITH_SEQUENCES),
    ("steps", Kind::Integer, WITH_SEQUENCES),
    ("depth", Kind::Integer, &[Criteria, Construct, Verify]),
    ("transcript", Kind::Path, &[Construct, Verify]),
    ("n_max", Kind::Integer, &[Simulate]),
    ("n_lo", Kind::Integer, &[Simulate]),
    ("samples", Kind::Integer, &[Simulate]),
    ("precision", Kind::Integer, &[Simulate]),
    ("windows", Kind::Integer, &[Simulate]),
    ("window_scan", Kind::Integer, &[Simulate]),
    ("height", Kind::Rational, &[Transfer]),
    ("seed", Kind::Integer, ALL),
    ("threads", Kind::Integer, ALL),
    ("out", Kind::Path, ALL),
];

fn key_info(name: &str) -> Option<(Kind, &'static [Command])> {
    KEYS.iter().find(|(k, _, _)| *k == name).map(|(_, kind, cmds)| (*kind, *cmds))
}

fn key_order(name: &str) -> usize {
    KEYS.iter().position(|(k, _, _)| *k == name).unwrap_or(usize::MAX)
}

/// Parse failure with a 1-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line, column, message: message.into() }
}

/// A validated configuration. `positions` records where each key was read,
/// for diagnostics; it does not take part in equality.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub entries: BTreeMap<String, Value>,
    positions: BTreeMap<String, (usize, usize)>,
}

impl PartialEq for RunConfig {
    fn eq(&self, other: &Self) -> bool {
        self.command == other.command && self.entries == other.entries
    }
}

/// Exact value of `3`, `-2/7`, `0.125`, `1e-40` or `1.5e3/7`.
pub fn parse_rational(s: &str) -> Result<ExactRational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = parse_decimal(n.trim())?;
        let d = parse_decimal(d.trim())?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<ExactRational, String> {
    let bad = || format!("`{s}` is not a rational number");
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp) = match body.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (body, 0),
    };
    if exp.abs() > 10_000 {
        return Err(format!("exponent in `{s}` is out of range"));
    }
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().map_err(|_| bad())? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        ExactRational::from_integer(all * ten.pow(scale as u32))
    } else {
        ExactRational::new(all, ten.pow((-scale) as u32))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

fn parse_integer(s: &str) -> Result<BigInt, String> {
    let v = parse_rational(s)?;
    if !v.is_integer() || v.is_negative() {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v.to_integer())
}

fn parse_int_list(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',').map(|t| parse_integer(t.trim())).collect()
}

fn parse_value(kind: Kind, s: &str) -> Result<Value, String> {
    match kind {
        Kind::Rational => parse_rational(s).map(Value::Rational),
        Kind::Integer => parse_integer(s).map(Value::Integer),
        Kind::Theta => {
            if s == "construct" {
                Ok(Value::Theta(ThetaSpec::Construction))
            } else if let Some(k) = s.strip_prefix("pell:") {
                let k = parse_integer(k)?
                    .to_usize()
                    .filter(|&k| (1..=10_000).contains(&k))
                    .ok_or_else(|| format!("pell index `{k}` outside 1..=10000"))?;
                Ok(Value::Theta(ThetaSpec::Pell(k)))
            } else {
                s.split(',')
                    .map(parse_rational)
                    .collect::<Result<Vec<_>, _>>()
                    .map(|v| Value::Theta(ThetaSpec::Literal(v)))
            }
        }
        Kind::A => {
            if let Some(k) = s.strip_prefix("const:") {
                Ok(Value::A(ARule::Const(parse_integer(k)?)))
            } else if let Some(p) = s.strip_prefix("poly:") {
                let p = parse_integer(p)?
                    .to_u32()
                    .filter(|&p| (1..=64).contains(&p))
                    .ok_or_else(|| format!("poly exponent `{p}` outside 1..=64"))?;
                Ok(Value::A(ARule::Poly(p)))
            } else if s.contains(':') {
                Err(format!("unknown sequence rule `{s}`; expected const:k, poly:p or a list"))
            } else {
                parse_int_list(s).map(|v| Value::A(ARule::List(v)))
            }
        }
        Kind::H => {
            if s == "geom:24a" {
                Ok(Value::H(HRule::Geom24a))
            } else if s.contains(':') {
                Err(format!("unknown height rule `{s}`; expected geom:24a or a list"))
            } else {
                parse_int_list(s).map(|v| Value::H(HRule::List(v)))
            }
        }
        Kind::Word(allowed) => {
            if allowed.contains(&s) {
                Ok(Value::Word(s.to_string()))
            } else {
                Err(format!("`{s}` is not one of {}", allowed.join(", ")))
            }
        }
        Kind::Path => {
            if s.is_empty() {
                Err("empty path".into())
            } else {
                Ok(Value::Path(s.to_string()))
            }
        }
    }
}

fn fmt_rational(q: &ExactRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn fmt_list(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rational(q) => f.write_str(&fmt_rational(q)),
            Value::Integer(n) => write!(f, "{n}"),
            Value::Theta(ThetaSpec::Literal(v)) => {
                f.write_str(&v.iter().map(fmt_rational).collect::<Vec<_>>().join(","))
            }
            Value::Theta(ThetaSpec::Pell(k)) => write!(f, "pell:{k}"),
            Value::Theta(ThetaSpec::Construction) => f.write_str("construct"),
            Value::A(ARule::Const(k)) => write!(f, "const:{k}"),
            Value::A(ARule::Poly(p)) => write!(f, "poly:{p}"),
            Value::A(ARule::List(v)) => f.write_str(&fmt_list(v)),
            Value::H(HRule::Geom24a) => f.write_str("geom:24a"),
            Value::H(HRule::List(v)) => f.write_str(&fmt_list(v)),
            Value::Word(s) | Value::Path(s) => f.write_str(s),
        }
    }
}

/// Parses a configuration that names its own command.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_for(text, None)
}

/// Parses a configuration; `command` (from the command line) is used when the
/// text has no `command` entry and must agree with it otherwise.
pub fn parse_config_for(text: &str, command: Option<Command>) -> Result<RunConfig, ConfigError> {
    let mut raw: Vec<(usize, usize, String, usize, String)> = Vec::new();
    let mut named: Option<(Command, usize, usize)> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = line.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let key_col = content.len() - content.trim_start().len() + 1;
        let Some((key, value)) = content.split_once('=') else {
            return Err(err(line_no, key_col, "expected `key=value`"));
        };
        let key = key.trim().to_string();
        let value_col = key_col + content[key_col - 1..].find('=').unwrap() + 1;
        let value_col = value_col + (value.len() - value.trim_start().len());
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(err(line_no, key_col, "missing key before `=`"));
        }
        if key == "command" {
            if named.is_some() {
                return Err(err(line_no, key_col, "key `command` given twice"));
            }
            let c = Command::from_name(&value).ok_or_else(|| {
                err(
                    line_no,
                    value_col,
                    format!(
                        "unknown command `{value}`; expected one of {}",
                        Command::ALL.map(|c| c.name()).join(", ")
                    ),
                )
            })?;
            named = Some((c, line_no, value_col));
            continue;
        }
        raw.push((line_no, key_col, key, value_col, value));
    }
    let command = match (named, command) {
        (Some((c, line, col)), Some(cli)) if c != cli => {
            return Err(err(line, col, format!("config is for `{c}` but the command line asks for `{cli}`")));
        }
        (Some((c, _, _)), _) => c,
        (None, Some(cli)) => cli,
        (None, None) => return Err(err(1, 1, "missing `command` entry")),
    };
    let mut config = RunConfig {
        command,
        entries: BTreeMap::new(),
        positions: BTreeMap::new(),
    };
    if let Some((_, line, col)) = named {
        config.positions.insert("command".into(), (line, col));
    }
    for (line, key_col, key, value_col, value) in raw {
        let Some((kind, commands)) = key_info(&key) else {
            return Err(err(line, key_col, format!("unknown key `{key}`")));
        };
        if !commands.contains(&command) {
            return Err(err(line, key_col, format!("key `{key}` does not apply to command `{command}`")));
        }
        if config.entries.contains_key(&key) {
            return Err(err(line, key_col, format!("key `{key}` given twice")));
        }
        let v = parse_value(kind, &value).map_err(|m| err(line, value_col, m))?;
        config.positions.insert(key.clone(), (line, value_col));
        config.entries.insert(key, v);
    }
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    fn at(&self, key: &str, message: impl Into<String>) -> ConfigError {
        let (line, col) = self.positions.get(key).copied().unwrap_or((1, 1));
        err(line, col, message)
    }

    fn require(&self, key: &str, why: &str) -> Result<(), ConfigError> {
        if self.entries.contains_key(key) {
            Ok(())
        } else {
            Err(self.at("command", format!("`{}` needs key `{key}`{why}", self.command)))
        }
    }

    pub fn rational(&self, key: &str) -> Option<&ExactRational> {
        match self.entries.get(key) {
            Some(Value::Rational(q)) => Some(q),
            _ => None,
        }
    }

    pub fn integer(&self, key: &str) -> Option<&BigInt> {
        match self.entries.get(key) {
            Some(Value::Integer(n)) => Some(n),
            _ => None,
        }
    }

    /// Integer entry converted to a machine type, or `default` when absent.
    pub fn int_or<T: TryFrom<BigInt>>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.integer(key) {
            None => Ok(default),
            Some(n) => T::try_from(n.clone()).map_err(|_| self.at(key, format!("`{key}` = {n} is too large"))),
        }
    }

    pub fn word(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(Value::Word(s)) | Some(Value::Path(s)) => Some(s),
            _ => None,
        }
    }

    pub fn theta(&self) -> Option<&ThetaSpec> {
        match self.entries.get("theta") {
            Some(Value::Theta(t)) => Some(t),
            _ => None,
        }
    }

    pub fn a_rule(&self) -> Option<&ARule> {
        match self.entries.get("a") {
            Some(Value::A(r)) => Some(r),
            _ => None,
        }
    }

    pub fn h_rule(&self) -> HRule {
        match self.entries.get("h") {
            Some(Value::H(r)) => r.clone(),
            _ => HRule::Geom24a,
        }
    }

    pub fn h_start(&self) -> BigInt {
        self.integer("h0").cloned().unwrap_or_else(BigInt::one)
    }

    fn uses_construction(&self) -> bool {
        match self.command {
            Command::Construct => true,
            Command::Criteria => matches!(self.word("criterion"), Some("thm5" | "prop32")),
            _ => matches!(self.theta(), Some(ThetaSpec::Construction)),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str| -> Result<(), ConfigError> {
            match self.rational(key) {
                Some(q) if !q.is_positive() => Err(self.at(key, format!("`{key}` must be positive"))),
                _ => Ok(()),
            }
        };
        positive("delta")?;
        positive("height")?;
        for key in ["radius", "tau"] {
            if self.rational(key).is_some_and(|q| q.is_negative()) {
                return Err(self.at(key, format!("`{key}` must be non-negative")));
            }
        }
        match self.theta() {
            Some(ThetaSpec::Literal(v)) if v.is_empty() => {
                return Err(self.at("theta", "θ needs at least one coordinate"));
            }
            Some(ThetaSpec::Pell(_) | ThetaSpec::Construction) if self.entries.contains_key("radius") => {
                return Err(self.at("radius", "`radius` only applies to a literal θ"));
            }
            _ => {}
        }
        match self.command {
            Command::Approx => {
                self.require("theta", "")?;
                self.require("limit", " (largest q or |Δ| to scan)")?;
            }
            Command::Criteria => {
                self.require("criterion", "")?;
                match self.word("criterion").unwrap() {
                    "lemma22" => {
                        self.require("theta", "")?;
                        self.require("terms", " (K)")?;
                        self.require("delta", "")?;
                    }
                    "dyadic" | "bracket" => {
                        self.require("theta", "")?;
                        self.require("terms", "")?;
                    }
                    "evidence" => {
                        self.require("theta", "")?;
                        self.require("tau", "")?;
                        self.require("depth", "")?;
                    }
                    _ => {
                        if self.entries.contains_key("theta") {
                            return Err(self.at("theta", "thm5 and prop32 take θ from the construction keys"));
                        }
                    }
                }
            }
            Command::Construct => {}
            Command::Simulate => {
                self.require("theta", "")?;
                self.require("delta", "")?;
                self.require("n_max", "")?;
                if self.entries.contains_key("windows") && !matches!(self.theta(), Some(ThetaSpec::Construction)) {
                    return Err(self.at("windows", "window estimates need theta=construct"));
                }
            }
            Command::Transfer => {
                self.require("theta", "")?;
                self.require("height", "")?;
            }
            Command::Verify => self.require("transcript", " (input file)")?,
        }
        if self.uses_construction() {
            self.require("a", " for the construction")?;
            self.require("steps", " for the construction")?;
            self.check_sequences()?;
        } else {
            for key in ["a", "h0", "h", "steps"] {
                if self.entries.contains_key(key) {
                    return Err(self.at(key, format!("`{key}` is only used with a construction")));
                }
            }
        }
        Ok(())
    }

    fn check_sequences(&self) -> Result<(), ConfigError> {
        let thirty_two = BigInt::from(32);
        match self.a_rule().unwrap() {
            ARule::Const(k) if *k <= thirty_two => {
                return Err(self.at("a", format!("a_n = {k} must exceed 32")));
            }
            ARule::List(v) => {
                if let Some((n, k)) = v.iter().enumerate().find(|(_, k)| **k <= thirty_two) {
                    return Err(self.at("a", format!("a_{n} = {k} must exceed 32")));
                }
            }
            _ => {}
        }
        let steps: usize = self.int_or("steps", 0)?;
        if steps == 0 {
            return Err(self.at("steps", "`steps` must be at least 1"));
        }
        if steps > 100_000 {
            return Err(self.at("steps", "`steps` is above 100000"));
        }
        if self.h_start().is_zero() {
            return Err(self.at("h0", "h_0° must be positive"));
        }
        let params = shrinktarget_core::construct::params_from_rules(
            self.a_rule().unwrap(),
            &self.h_start(),
            &self.h_rule(),
            steps + 1,
        )
        .and_then(|p| p.check(steps + 1).map(|_| p));
        params.map(|_| ()).map_err(|e| {
            let key = match &e {
                shrinktarget_core::Error::Domain(m) if m.starts_with("h_") && self.entries.contains_key("h") => "h",
                _ => "a",
            };
            self.at(key, e.to_string())
        })
    }

    /// Canonical text form; parsing it gives back an equal configuration.
    pub fn serialize(&self) -> String {
        let mut keys: Vec<&String> = self.entries.keys().collect();
        keys.sort_by_key(|k| key_order(k));
        let mut out = format!("command={}\n", self.command);
        for k in keys {
            out.push_str(&format!("{k}={}\n", self.entries[k]));
        }
        out
    }
}
