//! Command-line front end. Exit codes: 0 success, 1 verification failure,
//! 2 invalid input, 3 integrator validation failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channels::{self, HarnessMode, Monotone};
use crate::dynamics::{self, RunMetadata, Scenario, ScenarioKind};
use crate::error::{Error, Result};
use crate::interferometer::{self, filter_projector};
use crate::io;
use crate::measures::{self, FormationConfig, NormSpec, Witness};
use crate::operator::{Decomposition, DensityOperator};
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTEGRATOR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "superposition", version, about = "Superposition measures for mixed quantum states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a measure on a state file.
    Measure {
        /// State JSON: {"dim": n, "entries": [[re, im], ...]}.
        state: PathBuf,
        /// Block sizes, e.g. `2,3`.
        #[arg(long)]
        dims: String,
        /// as | af | kyfan:k | trace | schatten:p | predictability | bound:k
        #[arg(long)]
        measure: String,
        /// Random starts for `af`.
        #[arg(long, default_value_t = 16)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evolve the two-path initial state and write the measure time series.
    Simulate {
        #[arg(long, value_enum)]
        scenario: ScenarioArg,
        #[arg(long)]
        levels: usize,
        /// JSON {"rates": [[...]], "energies": [...]} with upper-triangular rates.
        #[arg(long, conflicts_with_all = ["seed", "g"])]
        g_file: Option<PathBuf>,
        /// Draw energies and rates at random.
        #[arg(long, conflicts_with = "g")]
        seed: Option<u64>,
        /// Uniform decay rate of the simple model (default when neither
        /// `--g-file` nor `--seed` is given).
        #[arg(long)]
        g: Option<f64>,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// CSV destination; metadata goes next to it as `<stem>.json`.
        /// Without it the CSV is written to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with the closed forms of the simple models.
        #[arg(long)]
        analytic: bool,
        /// Cross-check the final state against an RK4 integration.
        #[arg(long)]
        cross_check: bool,
    },
    /// Optimal interferometric realization of a Ky-Fan measure.
    Interfere {
        /// State on two paths with `N` internal levels each (dims `N,N`).
        state: PathBuf,
        /// Filter rank.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Also run the stochastic search for this many steps per restart.
        #[arg(long)]
        search: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify a channel and probe the monotonicity of the measures.
    ChannelCheck {
        /// Channel JSON: {"dim": n, "kraus": [entries, ...]}.
        channel: PathBuf,
        #[arg(long)]
        dims: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the randomized property suites.
    Verify {
        /// axioms | entropy | formation | secondq | channels | dynamics | interferometer | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    /// Relaxation acting identically on both paths.
    F1,
    /// Relaxation acting separately on each path.
    F2,
    /// 0.8·F1 + 0.2·F2.
    F3,
}

impl ScenarioArg {
    fn kind(self) -> ScenarioKind {
        match self {
            ScenarioArg::F1 => ScenarioKind::NonlocalF1,
            ScenarioArg::F2 => ScenarioKind::LocalF2,
            ScenarioArg::F3 => ScenarioKind::Mixture { w1: 0.8, w2: 0.2 },
        }
    }
}

/// A parsed `--measure` argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureArg {
    RelativeEntropy,
    Formation,
    Norm(NormSpec),
    Predictability,
    Bound(usize),
}

impl std::str::FromStr for MeasureArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown measure {s:?}"));
        let int = |x: &str| x.parse::<usize>().map_err(|_| bad());
        Ok(match s.split_once(':') {
            None => match s {
                "as" => MeasureArg::RelativeEntropy,
                "af" => MeasureArg::Formation,
                "trace" => MeasureArg::Norm(NormSpec::Trace),
                "predictability" => MeasureArg::Predictability,
                _ => return Err(bad()),
            },
            Some(("kyfan", k)) => MeasureArg::Norm(NormSpec::KyFan(int(k)?)),
            Some(("bound", k)) => MeasureArg::Bound(int(k)?),
            Some(("schatten", p)) => {
                let p = match p {
                    "inf" | "infinity" => f64::INFINITY,
                    _ => p.parse::<f64>().map_err(|_| bad())?,
                };
                MeasureArg::Norm(NormSpec::SchattenP(p))
            }
            _ => return Err(bad()),
        })
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ValidationFailure(_) => EXIT_INTEGRATOR,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Measure { state, dims, measure, starts, seed } => {
            let rho = io::parse_density(&read(&state)?)?;
            let l = io::parse_dims(&dims)?;
            let m: MeasureArg = measure.parse()?;
            print_json(&cmd_measure(&rho, &l, m, starts, seed)?);
            Ok(EXIT_OK)
        }
        Command::Simulate { scenario, levels, g_file, seed, g, t_max, steps, out, analytic, cross_check } => {
            let s = build_scenario(scenario.kind(), levels, g_file.as_deref(), seed, g)?;
            cmd_simulate(&s, t_max, steps, out.as_deref(), analytic, cross_check)
        }
        Command::Interfere { state, k, search, seed } => {
            let rho = io::parse_density(&read(&state)?)?;
            print_json(&cmd_interfere(&rho, k, search, seed)?);
            Ok(EXIT_OK)
        }
        Command::ChannelCheck { channel, dims, samples, seed } => {
            let phi = io::parse_channel(&read(&channel)?)?;
            let l = io::parse_dims(&dims)?;
            print_json(&cmd_channel_check(&phi, &l, samples, seed)?);
            Ok(EXIT_OK)
        }
        Command::Verify { suite, samples, seed } => {
            let suite: Suite = suite.parse()?;
            Ok(cmd_verify(suite, samples, seed))
        }
    }
}

pub fn cmd_measure(rho: &DensityOperator, l: &Decomposition, m: MeasureArg, starts: usize, seed: u64) -> Result<Value> {
    l.check_dim(rho.dim())?;
    Ok(match m {
        MeasureArg::RelativeEntropy => {
            let r = measures::a_s(rho, l)?;
            let witness = match &r.witness {
                Some(Witness::BlockDiagonal(s)) => io::matrix_to_value(s.matrix()),
                _ => Value::Null,
            };
            json!({ "measure": "as", "value": r.value, "witness": witness })
        }
        MeasureArg::Formation => {
            let cfg = FormationConfig { starts, seed, ..FormationConfig::default() };
            let r = measures::a_f(rho, l, &cfg)?;
            let witness = match &r.witness {
                Some(Witness::Ensemble(e)) => io::ensemble_to_value(e),
                _ => Value::Null,
            };
            json!({ "measure": "af", "value": r.value, "converged": r.converged, "witness": witness })
        }
        MeasureArg::Norm(spec) => {
            json!({ "measure": spec.name(), "value": measures::norm_measure(rho, l, spec)? })
        }
        MeasureArg::Predictability => {
            json!({ "measure": "predictability", "value": measures::predictability(rho, l)? })
        }
        MeasureArg::Bound(k) => {
            json!({ "measure": format!("bound:{k}"), "value": measures::kyfan_bound(rho, l, k)? })
        }
    })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesFile {
    rates: Vec<Vec<f64>>,
    energies: Option<Vec<f64>>,
}

pub fn build_scenario(
    kind: ScenarioKind,
    levels: usize,
    g_file: Option<&Path>,
    seed: Option<u64>,
    g: Option<f64>,
) -> Result<Scenario> {
    if levels == 0 {
        return Err(Error::InvalidArgument("--levels must be positive".into()));
    }
    if let Some(path) = g_file {
        let f: RatesFile = serde_json::from_str(&read(path)?).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(Scenario {
            kind,
            levels,
            energies: f.energies.unwrap_or_else(|| vec![0.0; levels]),
            rates: f.rates,
            seed: None,
        });
    }
    if let Some(seed) = seed {
        return Ok(Scenario::random(kind, levels, seed));
    }
    let g = g.unwrap_or(1.0);
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::InvalidRates(format!("g = {g}")));
    }
    Ok(Scenario::simple(kind, levels, g))
}

pub fn cmd_simulate(
    s: &Scenario,
    t_max: f64,
    steps: usize,
    out: Option<&Path>,
    analytic: bool,
    cross_check: bool,
) -> Result<i32> {
    if !(t_max > 0.0 && t_max.is_finite()) || steps == 0 {
        return Err(Error::InvalidArgument("need t_max > 0 and steps >= 1".into()));
    }
    let grid = dynamics::uniform_grid(t_max, steps);
    let ts = dynamics::run_timeseries(s, &grid)?;
    if cross_check {
        let gen = dynamics::build_scenario(s)?;
        dynamics::evolve_checked(&gen, &dynamics::initial_state(s.levels)?, t_max)?;
    }
    let deviation = if analytic { Some(dynamics::analytic_deviation(s, &ts)?) } else { None };
    let meta = RunMetadata {
        scenario: s,
        t_max,
        steps,
        analytic_max_deviation: deviation,
    };
    let meta_text = serde_json::to_string_pretty(&meta).expect("serializable");
    match out {
        Some(path) => {
            write(path, &ts.to_csv())?;
            write(&path.with_extension("json"), &meta_text)?;
            if let Some(d) = deviation {
                println!("max |numeric - analytic| = {d:.3e}");
            }
        }
        None => {
            print!("{}", ts.to_csv());
            if let Some(d) = deviation {
                eprintln!("max |numeric - analytic| = {d:.3e}");
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_interfere(rho: &DensityOperator, k: usize, search: Option<usize>, seed: u64) -> Result<Value> {
    let n = rho.dim() / 2;
    if !rho.dim().is_multiple_of(2) {
        return Err(Error::InvalidArgument("state must live on two paths of equal dimension".into()));
    }
    let l = Decomposition::bipartite(n, n)?;
    let pair = interferometer::optimal_uv(rho, k)?;
    let out = interferometer::run_protocol(rho, &pair.u, &pair.v, &filter_projector(n, k))?;
    let mut v = json!({
        "k": k,
        "value": pair.value,
        "kyfan": measures::kyfan_measure(rho, &l, k)?,
        "p1": out.p1,
        "p2": out.p2,
        "q1": out.q1,
        "q2": out.q2,
        "r": out.r,
        "u": io::matrix_to_value(&pair.u),
        "v": io::matrix_to_value(&pair.v),
    });
    if let Some(iters) = search {
        let best = interferometer::stochastic_maximize(rho, k, iters, seed)?;
        v["search_value"] = json!(best.value);
    }
    Ok(v)
}

pub fn cmd_channel_check(phi: &channels::KrausChannel, l: &Decomposition, samples: usize, seed: u64) -> Result<Value> {
    let c = channels::classify(phi, l)?;
    let report = |m: Monotone, mode: HarnessMode| -> Result<Value> {
        let r = channels::monotonicity_harness(phi, l, m, mode, samples, seed)?;
        Ok(json!({
            "samples": r.samples,
            "violations": r.violations,
            "max_increase": r.max_increase,
            "witness": r.witness.map(|w| io::matrix_to_value(w.matrix())),
        }))
    };
    let mode = if c.is_block_preserving { HarnessMode::Random } else { HarnessMode::Pinched };
    let mut v = json!({
        "is_sp": c.is_sp,
        "is_block_preserving": c.is_block_preserving,
        "a_s": report(Monotone::RelativeEntropy, mode)?,
    });
    if l.len() == 2 {
        v["a_tr"] = report(Monotone::Norm(NormSpec::Trace), HarnessMode::Random)?;
        v["kyfan"] = report(Monotone::AllKyFan, HarnessMode::Random)?;
    }
    Ok(v)
}

pub fn cmd_verify(suite: Suite, samples: usize, seed: u64) -> i32 {
    let checks = verify::run_suite(suite, samples, seed);
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_names() {
        assert_eq!("as".parse::<MeasureArg>().unwrap(), MeasureArg::RelativeEntropy);
        assert_eq!("kyfan:2".parse::<MeasureArg>().unwrap(), MeasureArg::Norm(NormSpec::KyFan(2)));
        assert_eq!(
            "schatten:inf".parse::<MeasureArg>().unwrap(),
            MeasureArg::Norm(NormSpec::SchattenP(f64::INFINITY))
        );
        assert_eq!("bound:1".parse::<MeasureArg>().unwrap(), MeasureArg::Bound(1));
        assert!("kyfan:x".parse::<MeasureArg>().is_err());
        assert!("entropy".parse::<MeasureArg>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["superposition", "frobnicate"]), EXIT_INVALID);
        assert_eq!(run(["superposition", "verify", "--suite", "nope"]), EXIT_INVALID);
    }
}
