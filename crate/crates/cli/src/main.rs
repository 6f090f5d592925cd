//! `topocharge`: analyze, compare and decode translationally invariant 2D codes.
//!
//! Exit codes: 0 success, 1 unreadable input, 2 bad command line, 3 parse error,
//! 4 dimension mismatch, 5 torus too small, 6 invalid stabilizer group, 7 local
//! constraint among generators, 8 topological condition violated, 9 charge analysis
//! failed, 10 structural inconsistency, 11 invalid syndrome, 12 no logical qubits,
//! 13 invalid configuration.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use topocharge::analysis::{analyze, tool_version, Analysis, AnalysisConfig, AnalysisReport};
use topocharge::charge::canonical::Characteristic;
use topocharge::code::{parse_code_file, CodeDefinition};
use topocharge::decode::{monte_carlo, DecodeConfig, NoiseKind, NoiseModel, TrialStats};
use topocharge::exec::Execution;
use topocharge::fixtures::{fixture_text, FIXTURES};
use topocharge::torus::AdjustMode;
use topocharge::Error;

/// `println!` that tolerates a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "topocharge",
    version,
    about = "Charges, statistics and torus codes of 2D translationally invariant codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one code and print its report.
    Analyze {
        /// Code file, bundled fixture name, or several joined by `+` to compose them.
        code: String,
        #[command(flatten)]
        opts: PipelineOpts,
        /// Emit the report as JSON with sorted keys.
        #[arg(long)]
        json: bool,
    },
    /// Compare the charge theories of two codes.
    Equiv {
        /// First code, as for `analyze`.
        a: String,
        /// Second code.
        b: String,
        #[command(flatten)]
        opts: PipelineOpts,
        /// Emit the verdict as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo decoding benchmark with per-charge matching.
    Decode {
        /// Code file, bundled fixture name, or a `+` composition.
        code: String,
        /// Error probability per qubit.
        #[arg(long, default_value_t = 0.03)]
        p: f64,
        /// Torus sides in normalized sites, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [4, 8])]
        sizes: Vec<usize>,
        /// Trials per size.
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Seed of the trial streams; trial `t` uses stream `t`.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// `independent-xz` or `depolarizing`.
        #[arg(long, default_value = "independent-xz")]
        noise: NoiseKind,
        #[command(flatten)]
        opts: PipelineOpts,
        /// Emit one JSON row per size.
        #[arg(long)]
        json: bool,
    },
    /// List the bundled codes, or print one of them.
    Fixtures {
        /// Print this fixture's code file.
        #[arg(long)]
        show: Option<String>,
    },
}

#[derive(Args)]
struct PipelineOpts {
    /// Assembly torus as WxH normalized sites [default: twice the minimum, at least 8].
    #[arg(long, value_parser = parse_torus)]
    torus: Option<(usize, usize)>,
    /// Window side for the locality checks [default: 2·range + 2].
    #[arg(long)]
    window: Option<usize>,
    /// Largest coarse-graining level tried for translation-invariant charges.
    #[arg(long, default_value_t = 4)]
    coarse_max: usize,
    /// Homology adjustment: `stab` extends the stabilizer group, `gauge` the gauge group.
    #[arg(long, default_value = "stab")]
    adjust: AdjustMode,
    /// Run without the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl PipelineOpts {
    fn config(&self) -> AnalysisConfig {
        AnalysisConfig {
            torus: self.torus,
            window: self.window,
            coarse_max: self.coarse_max,
            adjust: self.adjust,
            exec: self.exec(),
            ..AnalysisConfig::default()
        }
    }

    fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

fn parse_torus(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w = w.trim().parse().map_err(|e| format!("width: {e}"))?;
    let h = h.trim().parse().map_err(|e| format!("height: {e}"))?;
    Ok((w, h))
}

enum Failure {
    Io(String),
    Pipeline(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Pipeline(e)
    }
}

fn load_one(spec: &str) -> Result<CodeDefinition, Failure> {
    let path = Path::new(spec);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{spec}: {e}")))?
    } else if let Some(t) = fixture_text(spec) {
        t.to_string()
    } else {
        return Err(Failure::Io(format!("{spec}: no such file or bundled fixture")));
    };
    Ok(parse_code_file(&text)?)
}

/// `a+b+c` composes the codes side by side.
fn load(spec: &str) -> Result<CodeDefinition, Failure> {
    let mut parts = spec.split('+');
    let mut code = load_one(parts.next().unwrap_or_default())?;
    for p in parts {
        code = CodeDefinition::compose(&code, &load_one(p)?);
    }
    Ok(code)
}

fn print_json<T: Serialize>(value: &T) {
    let v = serde_json::to_value(value).expect("report serializes");
    out!("{}", serde_json::to_string_pretty(&v).expect("value prints"));
}

fn sign(s: i8) -> char {
    if s < 0 {
        '-'
    } else {
        '+'
    }
}

fn print_report(r: &AnalysisReport) {
    out!("code            {}", r.code);
    out!(
        "normalization   step {}, range {}, {} qubits/site, charge level {}",
        r.normalization.step,
        r.normalization.range,
        r.normalization.qubits_per_site,
        r.normalization.charge_level
    );
    for (l, why) in &r.normalization.rejected_levels {
        out!("                level {l} rejected: {why}");
    }
    let v = &r.verdicts;
    out!(
        "verdicts        stabilizer {}, independence {} (window {}), topological window {}",
        if v.stabilizer.passed() { "valid" } else { "valid after sign repair" },
        if v.independence.passed { "ok" } else { "failed" },
        v.independence.window_size,
        if v.window.passed { "ok" } else { "failed" },
    );
    let t = &r.torus;
    out!(
        "torus           {}x{}: n = {}, rank S = {}, rank G = {}, k = {} ({} adjustment)",
        t.size.0,
        t.size.1,
        t.qubits,
        t.adjusted_stabilizer_rank,
        t.adjusted_gauge_rank,
        t.logical_qubits,
        format!("{:?}", t.mode).to_lowercase()
    );
    out!(
        "charges         |λS| = 2^{}, |λG| = 2^{}, iota {:?}",
        r.charges.stabilizer_dim,
        r.charges.gauge_dim,
        r.charges.iota
    );
    let names: Vec<&str> = r.tables.basis.iter().map(|(n, _)| n.as_str()).collect();
    if !names.is_empty() {
        out!(
            "spin            {}",
            names.iter().zip(&r.tables.theta).map(|(n, s)| format!("{n}:{}", sign(*s))).collect::<Vec<_>>().join(" ")
        );
        out!("mutual          {}", names.join(" "));
        for (n, row) in names.iter().zip(&r.tables.kappa) {
            out!("  {n:<12}  {}", row.iter().map(|&s| sign(s).to_string()).collect::<Vec<_>>().join("  "));
        }
    }
    out!("characteristic  {}", r.characteristic);
    out!("bosons          {}", r.boson_count);
    out!(
        "framework       {} commutators on segments of {} sites, {}",
        r.framework.checked,
        r.framework.segment,
        if r.framework.passed() { "all as expected" } else { "FAILED" }
    );
    for (i, (x, z)) in t.logical_weights.iter().enumerate() {
        out!("logical {i:<7} X weight {x}, Z weight {z}");
    }
    let failed = r.checks.iter().filter(|c| !c.passed).count();
    out!("checks          {} passed, {failed} failed", r.checks.len() - failed);
    for n in &r.notices {
        out!("NOTICE          {n}");
    }
}

fn run_analyze(spec: &str, opts: &PipelineOpts) -> Result<Analysis, Failure> {
    let code = load(spec)?;
    Ok(analyze(&code, &opts.config())?)
}

#[derive(Serialize)]
struct EquivReport {
    a: String,
    b: String,
    characteristic_a: Characteristic,
    characteristic_b: Characteristic,
    subsystem: bool,
    equivalent: bool,
    verdict: String,
}

#[derive(Serialize)]
struct DecodeReport {
    tool: String,
    code: String,
    rows: Vec<TrialStats>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { code, opts, json } => {
            let a = run_analyze(&code, &opts)?;
            for n in &a.report.notices {
                eprintln!("notice: {n}");
            }
            if json {
                print_json(&a.report);
            } else {
                print_report(&a.report);
            }
        }
        Command::Equiv { a, b, opts, json } => {
            let ra = run_analyze(&a, &opts)?;
            let rb = run_analyze(&b, &opts)?;
            let subsystem = ra.normalized.is_subsystem() || rb.normalized.is_subsystem();
            let (ca, cb) = (ra.report.characteristic, rb.report.characteristic);
            let equivalent = ca == cb;
            let verdict = match (subsystem, equivalent) {
                (false, true) => "equivalent",
                (false, false) => "not equivalent",
                (true, true) => "topological charges isomorphic",
                (true, false) => "topological charges not isomorphic",
            };
            let rep = EquivReport {
                a: ra.report.code.clone(),
                b: rb.report.code.clone(),
                characteristic_a: ca,
                characteristic_b: cb,
                subsystem,
                equivalent,
                verdict: verdict.into(),
            };
            if json {
                print_json(&rep);
            } else {
                out!("{:<16}{}", rep.a, ca);
                out!("{:<16}{}", rep.b, cb);
                out!("{verdict}");
            }
        }
        Command::Decode { code, p, sizes, trials, seed, noise, opts, json } => {
            let a = run_analyze(&code, &opts)?;
            let cfg = DecodeConfig { sizes, noise: NoiseModel::new(noise, p)?, trials, seed, exec: opts.exec() };
            let rows = monte_carlo(&a.charges, &a.normalized, &cfg)?;
            let rep = DecodeReport { tool: tool_version(), code: a.report.code.clone(), rows };
            if json {
                print_json(&rep);
            } else {
                out!(
                    "{:>6} {:>8} {:>8} {:>9} {:>8} {:>8} {:>8}",
                    "size",
                    "p",
                    "trials",
                    "failures",
                    "rate",
                    "ci_low",
                    "ci_high"
                );
                for r in &rep.rows {
                    out!(
                        "{:>6} {:>8} {:>8} {:>9} {:>8.5} {:>8.5} {:>8.5}",
                        r.size,
                        r.p,
                        r.trials,
                        r.failures,
                        r.rate,
                        r.ci_low,
                        r.ci_high
                    );
                }
                out!("seed {seed}, rng {}", topocharge::decode::RNG_ALGORITHM);
            }
        }
        Command::Fixtures { show } => match show {
            Some(name) => {
                let text =
                    fixture_text(&name).ok_or_else(|| Failure::Io(format!("{name}: no such bundled fixture")))?;
                let _ = std::io::Write::write_all(&mut std::io::stdout(), text.as_bytes());
            }
            None => {
                for (name, _) in FIXTURES {
                    out!("{name}");
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Pipeline(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
