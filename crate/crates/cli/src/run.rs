//! Dispatch of a validated configuration to the library and report writing.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value as Json};
use shrinktarget_core::best_approx::{best_linear, best_simultaneous, pell_convergent};
use shrinktarget_core::construct::{
    build_theta, default_bruteforce_depth, params_from_rules, parse_transcript, serialize_transcript,
    verify_construction, ConstructionState, VerificationReport,
};
use shrinktarget_core::criteria::{
    dyadic_condition_iii, lemma22_bracket, series_lemma22, series_prop32, series_thm5, transfer_check, type_evidence,
    window_bound, EvalOptions, SeriesReport,
};
use shrinktarget_core::orbit::{bc_window_estimate, hit_census, in_pool, OrbitConfig, DEFAULT_PRECISION_BITS};
use shrinktarget_core::{ApproxKind, ApproxRecord, CertifiedVector, Witness};

use crate::config::{Command, ConfigError, RunConfig, ThetaSpec, FORMAT_VERSION};
use crate::output::{
    census_csv, emit_plot_data, fmt_certified_exact, fmt_exact, fmt_sci, rational_json, scalar_json, write_json,
    Round, DIGITS,
};

pub const TOOL: &str = "shrinktarget";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Indices scanned per window by default.
pub const DEFAULT_WINDOW_SCAN: u128 = 10_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(ConfigError),
    Core(shrinktarget_core::Error),
    Io(String),
    /// A transcript failed verification.
    Verification(String),
}

impl CliError {
    /// 1 usage, 2 domain and invalid input, 3 precision, 4 resource, 5 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Config(_) | CliError::Verification(_) => 2,
            CliError::Core(e) => e.exit_code(),
            CliError::Io(_) => 5,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Verification(_) => "verification",
        }
    }

    pub fn to_json(&self) -> Json {
        let mut body = json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Config(c) = self {
            body["line"] = json!(c.line);
            body["column"] = json!(c.column);
        }
        json!({ "error": body })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Verification(m) => f.write_str(m),
            CliError::Config(c) => write!(f, "config {c}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<shrinktarget_core::Error> for CliError {
    fn from(e: shrinktarget_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Res<T> = std::result::Result<T, CliError>;

/// Files written by a run, relative names in the output directory.
#[derive(Debug, Default)]
pub struct RunOutputs {
    pub files: Vec<PathBuf>,
}

struct Ctx<'a> {
    config: &'a RunConfig,
    out: &'a Path,
    threads: Option<usize>,
    files: Vec<PathBuf>,
}

impl Ctx<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out.join(name);
        self.files.push(p.clone());
        p
    }

    fn json(&mut self, name: &str, value: &Json) -> Res<()> {
        let p = self.path(name);
        Ok(write_json(&p, value)?)
    }

    fn text(&mut self, name: &str, value: &str) -> Res<()> {
        let p = self.path(name);
        Ok(fs::write(p, value)?)
    }
}

fn construction(config: &RunConfig) -> Res<ConstructionState> {
    let steps: usize = config.int_or("steps", 1)?;
    let params = params_from_rules(config.a_rule().unwrap(), &config.h_start(), &config.h_rule(), steps + 1)?;
    Ok(build_theta(&params, steps)?)
}

fn theta_of(config: &RunConfig, state: Option<&ConstructionState>) -> Res<CertifiedVector> {
    let radius = config.rational("radius").cloned().unwrap_or_default();
    match config.theta() {
        Some(ThetaSpec::Literal(v)) => Ok(CertifiedVector::new(v.clone(), radius)?),
        Some(ThetaSpec::Pell(k)) => Ok(pell_convergent(*k)),
        Some(ThetaSpec::Construction) | None => match state {
            Some(s) => Ok(s.theta.clone()),
            None => Ok(construction(config)?.theta),
        },
    }
}

fn theta_json(theta: &CertifiedVector) -> Json {
    json!({
        "coords": theta.coords.iter().map(fmt_exact).collect::<Vec<_>>(),
        "radius": fmt_exact(&theta.radius),
    })
}

fn kind_of(config: &RunConfig) -> ApproxKind {
    match config.word("kind") {
        Some("linear") => ApproxKind::Linear,
        _ => ApproxKind::Simultaneous,
    }
}

fn witness_text(w: &Witness) -> String {
    match w {
        Witness::Q(q) => q.to_string(),
        Witness::Delta(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
    }
}

fn approx(ctx: &mut Ctx) -> Res<()> {
    let theta = theta_of(ctx.config, None)?;
    let limit: u64 = ctx.config.int_or("limit", 0)?;
    let kind = kind_of(ctx.config);
    let records: Vec<ApproxRecord> = match kind {
        ApproxKind::Simultaneous => best_simultaneous(&theta, limit)?,
        ApproxKind::Linear => best_linear(&theta, limit)?,
    };
    let mut csv = String::from("index,height,witness,value_lo,value_hi,value_exact\n");
    for r in &records {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.index,
            r.height(),
            witness_text(&r.witness),
            fmt_sci(&r.value.lo(), DIGITS, Round::Down),
            fmt_sci(&r.value.hi(), DIGITS, Round::Up),
            fmt_certified_exact(&r.value)
        ));
    }
    ctx.text("approx.csv", &csv)?;
    let summary = json!({
        "kind": format!("{kind:?}").to_lowercase(),
        "theta": theta_json(&theta),
        "limit": limit,
        "records": records.len(),
        "last": records.last().map(|r| json!({"height": r.height(), "value": scalar_json(&r.value)})),
    });
    ctx.json("approx.json", &summary)
}

fn series_json(report: &SeriesReport) -> Json {
    json!({
        "label": report.label,
        "terms": report.terms.len(),
        "total": scalar_json(&report.total()),
        "tail_estimate": scalar_json(&report.tail_estimate),
        "verdict": report.verdict,
    })
}

fn criteria(ctx: &mut Ctx) -> Res<()> {
    let config = ctx.config;
    let criterion = config.word("criterion").unwrap().to_string();
    let opts = EvalOptions::default();
    let series = match criterion.as_str() {
        "thm5" | "prop32" => {
            let state = construction(config)?;
            let terms: usize = config.int_or("terms", state.n_steps)?;
            if criterion == "thm5" {
                series_thm5(&state.theta, &state.deltas_2d(), terms)?
            } else {
                series_prop32(&state.theta, &state.qs(), terms)?
            }
        }
        "lemma22" => {
            let theta = theta_of(config, None)?;
            series_lemma22(&theta, config.int_or("terms", 0)?, config.rational("delta").unwrap())?
        }
        "dyadic" => dyadic_condition_iii(&theta_of(config, None)?, config.int_or("terms", 0)?)?,
        "bracket" => {
            let r = lemma22_bracket(&theta_of(config, None)?, config.int_or("terms", 0)?, opts)?;
            return ctx.json(
                "bracket.json",
                &json!({
                    "m": r.m,
                    "lower": scalar_json(&r.lower),
                    "s_iv": scalar_json(&r.s_iv),
                    "upper": scalar_json(&r.upper),
                    "lower_holds": r.lower_holds,
                    "upper_holds": r.upper_holds,
                }),
            );
        }
        _ => {
            let theta = theta_of(config, None)?;
            let ev = type_evidence(&theta, config.rational("tau").unwrap(), kind_of(config), config.int_or("depth", 0)?)?;
            let p = ctx.path("evidence.dat");
            let files = emit_plot_data(&ev, &p)?;
            ctx.files.push(files[1].clone());
            return ctx.json(
                "evidence.json",
                &json!({
                    "mode": format!("{:?}", ev.mode).to_lowercase(),
                    "tau": rational_json(&ev.tau),
                    "samples": ev.samples.len(),
                    "running_inf": rational_json(&ev.running_inf),
                    "running_sup_of_tail": rational_json(&ev.running_sup_of_tail),
                }),
            );
        }
    };
    let p = ctx.path("series.dat");
    let files = emit_plot_data(&series, &p)?;
    ctx.files.push(files[1].clone());
    ctx.json("series.json", &series_json(&series))
}

fn report_json(report: &VerificationReport) -> Json {
    json!({
        "all_passed": report.all_passed(),
        "analytic_skipped": report.analytic_skipped,
        "depth_bruteforce": report.depth_bruteforce,
        "checks": report.checks.iter().map(|c| json!({
            "name": c.name,
            "index": c.index,
            "passed": c.passed,
            "detail": c.detail,
        })).collect::<Vec<_>>(),
        "exceptions": report.exceptions.iter().map(|e| json!({
            "n": e.n,
            "q": e.q.to_string(),
            "dist": scalar_json(&e.dist),
            "reference": scalar_json(&e.reference),
            "verdict": format!("{:?}", e.verdict),
        })).collect::<Vec<_>>(),
    })
}

fn verified(state: &ConstructionState, config: &RunConfig) -> Res<VerificationReport> {
    let depth: usize = config.int_or("depth", default_bruteforce_depth(state))?;
    Ok(verify_construction(state, depth)?)
}

fn construct(ctx: &mut Ctx) -> Res<()> {
    let state = construction(ctx.config)?;
    let name = ctx.config.word("transcript").unwrap_or("transcript.txt").to_string();
    ctx.text(&name, &serialize_transcript(&state))?;
    let report = verified(&state, ctx.config)?;
    ctx.json(
        "verification.json",
        &json!({ "theta": theta_json(&state.theta), "report": report_json(&report) }),
    )?;
    if !report.all_passed() {
        return Err(CliError::Core(shrinktarget_core::Error::internal(format!(
            "the built construction fails {} checks",
            report.failures().len()
        ))));
    }
    Ok(())
}

fn verify(ctx: &mut Ctx) -> Res<()> {
    let path = ctx.config.word("transcript").unwrap();
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let state = parse_transcript(&text)?;
    let report = verified(&state, ctx.config)?;
    ctx.json("verification.json", &json!({ "report": report_json(&report) }))?;
    if !report.all_passed() {
        let names: Vec<String> = report
            .failures()
            .iter()
            .map(|c| match c.index {
                Some(i) => format!("{}[{i}]", c.name),
                None => c.name.clone(),
            })
            .collect();
        return Err(CliError::Verification(format!("transcript fails: {}", names.join(", "))));
    }
    Ok(())
}

fn simulate(ctx: &mut Ctx) -> Res<()> {
    let config = ctx.config;
    let state = match config.theta() {
        Some(ThetaSpec::Construction) => Some(construction(config)?),
        _ => None,
    };
    let theta = theta_of(config, state.as_ref())?;
    let delta = config.rational("delta").unwrap().clone();
    let mut orbit = OrbitConfig::new(theta.clone(), delta.clone(), config.int_or("n_max", 0u128)?);
    orbit.n_lo = config.int_or("n_lo", 1u128)?;
    orbit.samples = config.int_or("samples", 1u64)?;
    orbit.seed = config.int_or("seed", 0u64)?;
    orbit.precision_bits = config.int_or("precision", DEFAULT_PRECISION_BITS)?;
    orbit.threads = ctx.threads;
    let census = hit_census(&orbit)?;
    ctx.text("hits.csv", &census_csv(&census))?;
    let p = ctx.path("census.dat");
    let files = emit_plot_data(&census, &p)?;
    ctx.files.push(files[1].clone());
    let summary = json!({
        "config": config.serialize(),
        "seed": orbit.seed,
        "generator": "ChaCha8, one stream per sample id",
        "theta": theta_json(&theta),
        "n_lo": census.n_lo.to_string(),
        "n_hi": census.n_hi.to_string(),
        "samples": census.records.len(),
        "mean": rational_json(&census.mean),
        "median": rational_json(&census.median),
        "q1": rational_json(&census.q1),
        "q3": rational_json(&census.q3),
        "inconclusive": census.inconclusive,
        "tested": census.tested,
        "inconclusive_fraction": rational_json(&census.inconclusive_fraction()),
    });
    ctx.json("summary.json", &summary)?;
    let windows: usize = config.int_or("windows", 0)?;
    if windows > 0 {
        let state = state.expect("validated: windows need a construction");
        let scan: u128 = config.int_or("window_scan", DEFAULT_WINDOW_SCAN)?;
        let xs = state.deltas_2d();
        let mut csv = String::from("n,l_lo,l_hi,scanned_to,truncated,samples,hits,inconclusive,fraction,confidence_radius,bound\n");
        for n in 1..=windows {
            let wb = window_bound(&theta, &xs, &delta, n, 64)?;
            let (lo, hi) = wb.integer_window();
            let (lo, hi) = (to_u128(&lo)?, hi.to_u128().unwrap_or(u128::MAX));
            let mut wc = orbit.clone();
            wc.n_lo = 1;
            wc.n_max = lo.saturating_add(scan.max(1) - 1);
            let est = bc_window_estimate(&wc, (lo, hi))?;
            csv.push_str(&format!(
                "{n},{lo},{hi},{},{},{},{},{},{},{},{}\n",
                est.scanned_to,
                est.truncated,
                est.samples,
                est.hits,
                est.inconclusive,
                fmt_sci(&est.fraction, DIGITS, Round::Nearest),
                fmt_sci(&est.confidence_radius, DIGITS, Round::Up),
                fmt_sci(&wb.bound.hi(), DIGITS, Round::Up),
            ));
        }
        ctx.text("windows.csv", &csv)?;
    }
    Ok(())
}

fn to_u128(x: &BigInt) -> Res<u128> {
    x.to_u128()
        .ok_or_else(|| CliError::Core(shrinktarget_core::Error::resource(format!("index {x} exceeds u128"))))
}

fn transfer(ctx: &mut Ctx) -> Res<()> {
    let theta = theta_of(ctx.config, None)?;
    let r = transfer_check(&theta, ctx.config.rational("height").unwrap())?;
    ctx.json(
        "transfer.json",
        &json!({
            "h": rational_json(&r.h),
            "c": rational_json(&r.c),
            "lhs": scalar_json(&r.lhs),
            "rhs": scalar_json(&r.rhs),
            "holds": r.holds,
        }),
    )
}

/// Runs `config`, writing reports and `manifest.json` into `out`.
pub fn run(config: &RunConfig, out: &Path, threads: Option<usize>) -> Res<RunOutputs> {
    let start = Instant::now();
    fs::create_dir_all(out)?;
    let threads = threads.or(config.int_or::<usize>("threads", 0).ok().filter(|&k| k > 0));
    let mut ctx = Ctx { config, out, threads, files: Vec::new() };
    let outcome = in_pool(threads, || match config.command {
        Command::Approx => approx(&mut ctx),
        Command::Criteria => criteria(&mut ctx),
        Command::Construct => construct(&mut ctx),
        Command::Simulate => simulate(&mut ctx),
        Command::Transfer => transfer(&mut ctx),
        Command::Verify => verify(&mut ctx),
    })?;
    let elapsed = start.elapsed();
    let names: Vec<String> = ctx
        .files
        .iter()
        .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
        .collect();
    let manifest = json!({
        "tool": TOOL,
        "version": VERSION,
        "format_version": FORMAT_VERSION,
        "command": config.command.name(),
        "config": config.serialize(),
        "seed": config.int_or::<u64>("seed", 0).unwrap_or(0),
        "threads": threads,
        "timings_ms": { "total": elapsed.as_millis() as u64 },
        "outputs": names,
        "status": if outcome.is_ok() { "ok" } else { "error" },
    });
    write_json(&out.join("manifest.json"), &manifest)?;
    outcome?;
    Ok(RunOutputs { files: ctx.files })
}
