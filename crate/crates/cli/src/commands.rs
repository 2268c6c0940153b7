use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use floatloc::drift::{self, DriftParams, WakeupPeriod};
use floatloc::heuristic;
use floatloc::oracle;
use floatloc::worstcase;
use floatloc::{Instance, ObjectiveMode};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{MonteCarloArgs, OptimizeArgs, OracleArgs, WakeupArgs, WorstCaseArgs};

pub enum Failure {
    /// Bad input file, invalid instance or violated precondition (exit 2).
    Input(anyhow::Error),
    /// Anything else (exit 1).
    Internal(anyhow::Error),
}

type CmdResult = Result<(), Failure>;

fn input_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

fn internal(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Internal(e.into())
}

fn lib_err(e: floatloc::Error) -> Failure {
    match e {
        floatloc::Error::IntegrationDiverged(_) => Failure::Internal(e.into()),
        _ => Failure::Input(e.into()),
    }
}

#[derive(Serialize)]
struct RunReport<'a> {
    subcommand: &'a str,
    version: &'a str,
    input: Value,
    results: Value,
    wall_time_ms: f64,
}

fn emit(
    subcommand: &str,
    input: Value,
    results: Value,
    started: Instant,
    output: Option<&Path>,
) -> CmdResult {
    let report = RunReport {
        subcommand,
        version: env!("CARGO_PKG_VERSION"),
        input,
        results,
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(internal)?;
    text.push('\n');
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing report to {}", path.display()))
            .map_err(internal),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(internal),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {what} from {}", path.display()))
        .map_err(input_err)?;
    serde_json::from_str(&text)
        .with_context(|| format!("invalid {what} in {}", path.display()))
        .map_err(input_err)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(internal)
}

fn write_csv(
    path: &PathBuf,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> CmdResult {
    let file = File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(internal)?;
    let mut w = BufWriter::new(file);
    f(&mut w)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(internal)
}

pub fn optimize(args: OptimizeArgs) -> CmdResult {
    let started = Instant::now();
    let instance: Instance = read_json(&args.io.input, "instance")?;
    let run = heuristic::optimize_detailed(&instance).map_err(lib_err)?;
    let mode: ObjectiveMode = args.mode.into();
    let results = json!({
        "mode": mode,
        "objective": run.placement.objective(mode),
        "objective_controllable": run.placement.objective_controllable,
        "objective_strict": run.placement.objective_strict,
        "positions": run.placement.positions,
        "allocation": run.allocation.counts(),
        "initial_allocation": run.initial.counts(),
        "raw_allocation": run.raw.values,
        "bracket_areas": run.brackets.areas(),
        "adjustments": run.adjustments,
    });
    emit(
        "optimize",
        to_value(&instance)?,
        results,
        started,
        args.io.output.as_deref(),
    )
}

pub fn oracle(args: OracleArgs) -> CmdResult {
    let started = Instant::now();
    let instance: Instance = read_json(&args.io.input, "instance")?;
    let exact = oracle::exact_optimum(&instance).map_err(lib_err)?;
    let mut results = json!({ "exact": exact });
    if args.brute {
        let brute = oracle::brute_force_optimum(&instance).map_err(lib_err)?;
        let diff = (exact.optimum_value - brute.optimum_value).abs();
        let agree =
            diff <= oracle::REL_TOL * exact.optimum_value.abs().max(brute.optimum_value.abs());
        results["brute_force"] = to_value(&brute)?;
        results["agree"] = json!(agree);
    }
    emit(
        "oracle",
        to_value(&instance)?,
        results,
        started,
        args.io.output.as_deref(),
    )
}

pub fn montecarlo(args: MonteCarloArgs) -> CmdResult {
    let started = Instant::now();
    let instance: Instance = read_json(&args.io.input, "instance")?;
    let placement = heuristic::optimize(&instance).map_err(lib_err)?;
    let exact = oracle::exact_optimum(&instance).map_err(lib_err)?;
    let sample = oracle::random_baseline(&instance, args.trials, args.seed).map_err(lib_err)?;
    let quantile = oracle::quantile_of(placement.objective_controllable, &sample);

    if let Some(path) = &args.csv {
        write_csv(path, |w| oracle::write_cdf_csv(&sample, w))?;
    }
    if let Some(path) = &args.samples_csv {
        write_csv(path, |w| oracle::write_baseline_csv(&sample, w))?;
    }
    let best_random = sample
        .objectives
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let results = json!({
        "trials": args.trials,
        "seed": args.seed,
        "heuristic_objective": placement.objective_controllable,
        "heuristic_positions": placement.positions,
        "exact_optimum": exact.optimum_value,
        "quantile": quantile,
        "best_random_objective": best_random,
    });
    emit(
        "montecarlo",
        to_value(&instance)?,
        results,
        started,
        args.io.output.as_deref(),
    )
}

pub fn worstcase(args: WorstCaseArgs) -> CmdResult {
    let started = Instant::now();
    let (len, nf, nb) = (args.length, args.floating, args.bumps);
    let formula = worstcase::worst_case_value(len, nf, nb).map_err(lib_err)?;
    let mut results = json!({ "formula_value": formula });
    if nb >= 1 {
        let adversarial = worstcase::adversarial_instance(len, nf, nb).map_err(lib_err)?;
        let achieved = oracle::exact_optimum(&adversarial).map_err(lib_err)?;
        results["adversarial_instance"] = to_value(&adversarial)?;
        results["adversarial_optimum"] = json!(achieved.optimum_value);
    }
    if let Some(grid) = args.grid {
        let report = worstcase::verify_worst_case(len, nf, nb, grid).map_err(lib_err)?;
        results["bound_holds"] = json!(report.bound_holds());
        results["verification"] = to_value(&report)?;
    }
    let input = json!({ "length": len, "floating": nf, "bumps": nb, "grid": args.grid });
    emit("worstcase", input, results, started, args.output.as_deref())
}

fn parse_chain(values: &[String]) -> Result<(f64, usize, usize), Failure> {
    let bad = |what: &str, v: &str| {
        input_err(anyhow!("--clearance-from-worstcase: invalid {what} {v:?}"))
    };
    let len = values[0]
        .parse::<f64>()
        .map_err(|_| bad("length", &values[0]))?;
    let nf = values[1]
        .parse::<usize>()
        .map_err(|_| bad("floating count", &values[1]))?;
    let nb = values[2]
        .parse::<usize>()
        .map_err(|_| bad("bump count", &values[2]))?;
    Ok((len, nf, nb))
}

pub fn wakeup(args: WakeupArgs) -> CmdResult {
    let started = Instant::now();
    let params: DriftParams = read_json(&args.params, "drift parameters")?;
    params.validate().map_err(lib_err)?;
    let mut input = json!({ "params": params });

    let clearance = match (&args.clearance, &args.clearance_from_worstcase) {
        (Some(c), _) => *c,
        (None, Some(chain)) => {
            let (len, nf, nb) = parse_chain(chain)?;
            input["clearance_from_worstcase"] =
                json!({ "length": len, "floating": nf, "bumps": nb });
            worstcase::worst_case_value(len, nf, nb).map_err(lib_err)?
        }
        (None, None) => {
            return Err(input_err(anyhow!(
                "either --clearance or --clearance-from-worstcase is required"
            )))
        }
    };
    input["clearance"] = json!(clearance);

    let period = drift::wakeup_period(&params, clearance).map_err(lib_err)?;
    let mut results = json!({
        "clearance": clearance,
        "effective_stiffness": drift::effective_stiffness(&params),
        "regime": drift::Regime::of(&params),
        "peak_drift": drift::peak_drift(&params),
    });
    match period {
        WakeupPeriod::Finite(t) => {
            results["wakeup_period_s"] = json!(t);
            results["wakeup_frequency_hz"] = json!(1.0 / t);
            results["max_drift_at_period"] = json!(drift::max_drift(&params, t));
        }
        WakeupPeriod::Infinite => {
            results["wakeup_period_s"] = json!("infinite");
            results["wakeup_frequency_hz"] = json!(0.0);
        }
    }

    if let Some(path) = &args.csv {
        let horizon = args.horizon.unwrap_or(period.seconds().unwrap_or(10.0));
        input["trace"] = json!({ "horizon": horizon, "dt": args.dt });
        let trace =
            drift::simulate_drift(&params, horizon, args.dt.min(horizon)).map_err(lib_err)?;
        write_csv(path, |w| trace.write_csv(w))?;
    }
    emit("wakeup", input, results, started, args.output.as_deref())
}
