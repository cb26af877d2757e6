//! Command-line front end: generators, solver, exact oracle, analysis, and
//! benchmark reports. All outputs are JSON on stdout; exact rationals are
//! rendered as "p/q" with 12-significant-digit decimal companions.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num::{BigInt, Zero};
use serde_json::{json, Map, Value};

use setpack::analysis::{
    approximation_bound, classify, constants_table, guarantee_formula, helpful_weighted_sums,
    table_row_for, validate_constants, GuaranteeColumn, TableRow,
};
use setpack::conflict::{ConflictGraph, Solution};
use setpack::generate::{generate_k3_hard, generate_random, generate_tight_example, ids_weight};
use setpack::instance::LabeledInstance;
use setpack::mis::{build_engine, EngineContext};
use setpack::oracle::{solve_exact, DEFAULT_SIZE_CAP};
use setpack::solver::{solve, SolverConfig};
use setpack::weight::{format_decimal, format_fraction, parse_rational, Rat};

const DECIMAL_DIGITS: usize = 12;
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(
    name = "setpack",
    version,
    about = "Weighted k-set packing: local-search solver, exact oracle, generators, analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the local-search solver on an instance file.
    Solve(SolveArgs),
    /// Compute the exact optimum by branch and bound.
    Exact(ExactArgs),
    /// Classify a solution against a reference optimum.
    Analyze(AnalyzeArgs),
    /// Check the (eps, xi) inequality system and guarantee values.
    #[command(name = "validate-constants")]
    ValidateConstants(ValidateArgs),
    /// Solve a seeded suite and report ratios against the oracle.
    Bench(BenchArgs),
}

#[derive(Subcommand)]
enum Family {
    /// Worst-case family: base solution plus a planted solution of weight
    /// (k+1)/2 times larger that no claw-shaped improvement can reach.
    Tight {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The k = 3 hard family: colored cycle of length 8m with chords and
    /// pendants; no local improvement of size <= 3 from the labeled start.
    #[command(name = "k3-hard")]
    K3Hard {
        #[arg(long)]
        m: usize,
        /// Pendant weight parameter in (0, 1/2), e.g. "1/10".
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        universe: usize,
        #[arg(long, default_value = "1")]
        weight_min: String,
        #[arg(long, default_value = "1")]
        weight_max: String,
        /// Defaults to $SETPACK_SEED, then 1.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Engine spec: `greedy` | `swap:t` | `exact[:cap]` | `planted`.
    #[arg(long, default_value = "swap:2")]
    mis_engine: String,
    /// Helpfulness tolerance; defaults per k from the constants table.
    #[arg(long)]
    eps: Option<String>,
    /// Cycle-budget parameter; defaults to 1/ceil(1/eps).
    #[arg(long)]
    kappa: Option<String>,
    /// Scaling slack.
    #[arg(long, default_value = "1/10")]
    delta: String,
    /// Skip the scaled phase and run on exact weights only.
    #[arg(long)]
    no_scaling: bool,
    /// Size cap for the bounded exhaustive search.
    #[arg(long, default_value_t = 3)]
    max_small: usize,
    /// Safety cap on improving iterations.
    #[arg(long)]
    iteration_cap: Option<u64>,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Refuse instances with more sets than this.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Comma-separated set ids forming the solution A.
    #[arg(long)]
    solution: String,
    /// Comma-separated set ids forming the reference optimum; computed by
    /// the oracle when omitted.
    #[arg(long)]
    optimum: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// Oracle cap used when --optimum is omitted.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
}

#[derive(Args)]
struct ValidateArgs {
    /// Check the table row covering this k.
    #[arg(long, conflicts_with_all = ["eps", "xi"])]
    k: Option<usize>,
    /// Custom eps (requires --xi).
    #[arg(long, requires = "xi")]
    eps: Option<String>,
    /// Custom xi (requires --eps).
    #[arg(long, requires = "eps")]
    xi: Option<String>,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite name; `random` is the only built-in suite.
    #[arg(long, default_value = "random")]
    suite: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 50)]
    count: usize,
    /// Defaults to $SETPACK_SEED, then 1.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 12)]
    sets: usize,
    /// Universe size; defaults to 3k.
    #[arg(long)]
    universe: Option<usize>,
    #[arg(long, default_value = "1/2")]
    weight_min: String,
    #[arg(long, default_value = "9/2")]
    weight_max: String,
    #[arg(long, default_value = "swap:2")]
    mis_engine: String,
    /// Oracle size cap; instances above it report no ratio.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    oracle_cap: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { family } => generate(family),
        Command::Solve(args) => run_solve(args),
        Command::Exact(args) => run_exact(args),
        Command::Analyze(args) => run_analyze(args),
        Command::ValidateConstants(args) => run_validate(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn seed_or_env(explicit: Option<u64>) -> u64 {
    explicit
        .or_else(|| {
            std::env::var("SETPACK_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(DEFAULT_SEED)
}

fn parse_rat_arg(name: &str, s: &str) -> Result<Rat> {
    parse_rational(s).map_err(|e| anyhow!("--{name}: {e}"))
}

fn emit(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json"));
}

fn rat_pair(value: &Rat) -> Value {
    json!({
        "exact": format_fraction(value),
        "decimal": format_decimal(value, DECIMAL_DIGITS),
    })
}

fn generate(family: Family) -> Result<()> {
    let (labeled, meta, out) = match family {
        Family::Tight { k, n, out } => {
            let li = generate_tight_example(k, n)?;
            (li, json!({"family": "tight", "k": k, "n": n}), out)
        }
        Family::K3Hard { m, eps, out } => {
            let eps = parse_rat_arg("eps", &eps)?;
            let li = generate_k3_hard(m, &eps)?;
            (
                li,
                json!({"family": "k3-hard", "m": m, "eps": format_fraction(&eps)}),
                out,
            )
        }
        Family::Random {
            k,
            sets,
            universe,
            weight_min,
            weight_max,
            seed,
            out,
        } => {
            let lo = parse_rat_arg("weight-min", &weight_min)?;
            let hi = parse_rat_arg("weight-max", &weight_max)?;
            let seed = seed_or_env(seed);
            eprintln!("seed: {seed}");
            let inst = generate_random(k, sets, universe, (&lo, &hi), seed)?;
            (
                LabeledInstance::unlabeled(inst),
                json!({"family": "random", "k": k, "seed": seed}),
                out,
            )
        }
    };
    match out {
        Some(path) => {
            labeled.save(&path)?;
            let mut obj = meta;
            obj["written"] = json!(path.display().to_string());
            obj["num_sets"] = json!(labeled.instance.len());
            emit(&obj);
        }
        None => print!("{}", labeled.to_json()),
    }
    Ok(())
}

fn load(path: &PathBuf) -> Result<LabeledInstance> {
    LabeledInstance::load(path).with_context(|| format!("loading {}", path.display()))
}

fn run_solve(args: SolveArgs) -> Result<()> {
    let labeled = load(&args.input)?;
    let ctx = EngineContext {
        planted: labeled.planted_solution.clone(),
    };
    let engine = build_engine(&args.mis_engine, &ctx)?;
    let config = SolverConfig {
        eps: args
            .eps
            .as_deref()
            .map(|s| parse_rat_arg("eps", s))
            .transpose()?,
        kappa: args
            .kappa
            .as_deref()
            .map(|s| parse_rat_arg("kappa", s))
            .transpose()?,
        delta: parse_rat_arg("delta", &args.delta)?,
        scaling: !args.no_scaling,
        max_small: args.max_small,
        iteration_cap: args.iteration_cap,
    };
    let outcome = solve(&labeled.instance, &config, engine.as_ref())?;

    let mut result = Map::new();
    result.insert("instance".into(), json!(args.input.display().to_string()));
    result.insert("k".into(), json!(labeled.instance.k()));
    result.insert("num_sets".into(), json!(labeled.instance.len()));
    result.insert("mis_engine".into(), json!(engine.name()));
    result.insert("solution".into(), json!(outcome.ids));
    result.insert("weight".into(), json!(format_fraction(&outcome.weight)));
    result.insert(
        "weight_decimal".into(),
        json!(format_decimal(&outcome.weight, DECIMAL_DIGITS)),
    );
    result.insert(
        "iterations".into(),
        json!(outcome.trace.scaled_iterations + outcome.trace.exact_iterations),
    );
    result.insert(
        "scaled_iterations".into(),
        json!(outcome.trace.scaled_iterations),
    );
    result.insert(
        "exact_iterations".into(),
        json!(outcome.trace.exact_iterations),
    );
    result.insert(
        "trace".into(),
        serde_json::to_value(&outcome.trace.records)?,
    );
    if let Some(planted) = &labeled.planted_solution {
        let planted_w = ids_weight(&labeled.instance, planted);
        if !outcome.weight.is_zero() {
            let ratio = &planted_w / &outcome.weight;
            result.insert("ratio_vs_planted".into(), rat_pair(&ratio));
        }
    }
    emit(&Value::Object(result));
    Ok(())
}

fn run_exact(args: ExactArgs) -> Result<()> {
    let labeled = load(&args.input)?;
    let res = solve_exact(&labeled.instance, args.cap)?;
    emit(&json!({
        "instance": args.input.display().to_string(),
        "k": labeled.instance.k(),
        "num_sets": labeled.instance.len(),
        "solution": res.ids,
        "weight": format_fraction(&res.weight),
        "weight_decimal": format_decimal(&res.weight, DECIMAL_DIGITS),
        "nodes": res.nodes,
    }));
    Ok(())
}

fn split_ids(s: &str) -> Vec<String> {
    s.split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let labeled = load(&args.instance)?;
    let graph = ConflictGraph::build(&labeled.instance);
    let solution_ids = split_ids(&args.solution);
    let sol_idx = graph
        .indices_of(&solution_ids)
        .map_err(|e| anyhow!("--solution: {e}"))?;
    let sol = Solution::from_indices(&graph, sol_idx).map_err(|e| anyhow!("--solution: {e}"))?;

    let reference = match &args.optimum {
        Some(ids) => {
            let ids = split_ids(ids);
            graph
                .indices_of(&ids)
                .map_err(|e| anyhow!("--optimum: {e}"))?
        }
        None => {
            let res = solve_exact(&labeled.instance, args.cap)
                .context("computing the optimum (pass --optimum to skip the oracle)")?;
            res.indices
        }
    };

    let eps = match &args.eps {
        Some(s) => parse_rat_arg("eps", s)?,
        None => setpack::analysis::eps_default(labeled.instance.k()),
    };
    let report = classify(&graph, &sol, &reference, &eps)?;
    let sums = helpful_weighted_sums(&graph, &report);
    let (bound, bound_err) = match approximation_bound(&graph, &sol, &reference) {
        Ok(dec) => (serde_json::to_value(&dec)?, None),
        Err(e) => (Value::Null, Some(e.to_string())),
    };
    let mut out = Map::new();
    out.insert(
        "instance".into(),
        json!(args.instance.display().to_string()),
    );
    out.insert("analysis".into(), serde_json::to_value(&report)?);
    out.insert("helpful_sums".into(), serde_json::to_value(&sums)?);
    out.insert("bound".into(), bound);
    if let Some(e) = bound_err {
        out.insert("bound_unavailable".into(), json!(e));
    }
    emit(&Value::Object(out));
    Ok(())
}

fn row_value(row: &TableRow) -> Result<Value> {
    let mut obj = Map::new();
    obj.insert(
        "k".into(),
        match row.k_hi {
            Some(hi) if hi == row.k_lo => json!(row.k_lo),
            _ => json!(format!("{}+", row.k_lo)),
        },
    );
    obj.insert(
        "eps".into(),
        json!(format_decimal(&row.eps, DECIMAL_DIGITS)),
    );
    obj.insert("xi".into(), json!(format_decimal(&row.xi, DECIMAL_DIGITS)));
    match &row.guarantee {
        GuaranteeColumn::Fixed(g) => {
            obj.insert("guarantee".into(), json!(format_decimal(g, DECIMAL_DIGITS)));
            let value = guarantee_formula(row.k_lo, &row.eps, &row.xi)?;
            obj.insert(
                "guarantee_formula".into(),
                json!(format_decimal(&value, DECIMAL_DIGITS)),
            );
        }
        GuaranteeColumn::Linear { slope, intercept } => {
            obj.insert(
                "guarantee".into(),
                json!(format!(
                    "{}*(k+1)+{}",
                    format_decimal(slope, DECIMAL_DIGITS),
                    format_decimal(intercept, DECIMAL_DIGITS)
                )),
            );
        }
    }
    let report = validate_constants(&row.eps, &row.xi);
    obj.insert("checks".into(), serde_json::to_value(&report.checks)?);
    obj.insert("pass".into(), json!(report.pass));
    Ok(Value::Object(obj))
}

fn run_validate(args: ValidateArgs) -> Result<()> {
    let (value, pass) = match (args.k, args.eps, args.xi) {
        (Some(k), None, None) => {
            let row = table_row_for(k).ok_or_else(|| anyhow!("no constants row covers k = {k}"))?;
            let v = row_value(&row)?;
            let pass = v["pass"].as_bool().unwrap_or(false);
            (v, pass)
        }
        (None, Some(eps), Some(xi)) => {
            let eps = parse_rat_arg("eps", &eps)?;
            let xi = parse_rat_arg("xi", &xi)?;
            let report = validate_constants(&eps, &xi);
            let pass = report.pass;
            (serde_json::to_value(&report)?, pass)
        }
        (None, None, None) => {
            let rows: Vec<Value> = constants_table()
                .iter()
                .map(row_value)
                .collect::<Result<_>>()?;
            let pass = rows.iter().all(|r| r["pass"].as_bool().unwrap_or(false));
            (json!({ "rows": rows, "pass": pass }), pass)
        }
        _ => bail!("pass either --k, or both --eps and --xi"),
    };
    emit(&value);
    if !pass {
        bail!("constants validation failed");
    }
    Ok(())
}

fn run_bench(args: BenchArgs) -> Result<()> {
    if args.suite != "random" {
        bail!("unknown suite {:?}; available: random", args.suite);
    }
    let seed = seed_or_env(args.seed);
    let lo = parse_rat_arg("weight-min", &args.weight_min)?;
    let hi = parse_rat_arg("weight-max", &args.weight_max)?;
    let universe = args.universe.unwrap_or(3 * args.k);
    let ctx = EngineContext::default();
    let engine = build_engine(&args.mis_engine, &ctx)?;
    let config = SolverConfig::default();

    let mut instances = Vec::new();
    let mut ratio_sum = Rat::zero();
    let mut max_ratio = Rat::zero();
    let mut with_oracle = 0usize;
    for i in 0..args.count {
        let inst_seed = seed.wrapping_add(i as u64);
        let inst = generate_random(args.k, args.sets, universe, (&lo, &hi), inst_seed)?;
        let started = Instant::now();
        let outcome = solve(&inst, &config, engine.as_ref())?;
        let wall_ms = started.elapsed().as_millis() as u64;
        let mut entry = Map::new();
        entry.insert(
            "id".into(),
            json!(format!("random-k{}-s{}-{:03}", args.k, inst_seed, i)),
        );
        entry.insert("k".into(), json!(args.k));
        entry.insert("num_sets".into(), json!(inst.len()));
        entry.insert(
            "solver_weight".into(),
            json!(format_fraction(&outcome.weight)),
        );
        entry.insert(
            "iterations".into(),
            json!(outcome.trace.scaled_iterations + outcome.trace.exact_iterations),
        );
        if inst.len() <= args.oracle_cap {
            let oracle = solve_exact(&inst, args.oracle_cap)?;
            entry.insert(
                "oracle_weight".into(),
                json!(format_fraction(&oracle.weight)),
            );
            if !outcome.weight.is_zero() {
                let ratio = &oracle.weight / &outcome.weight;
                entry.insert("ratio".into(), json!(format_fraction(&ratio)));
                entry.insert(
                    "ratio_decimal".into(),
                    json!(format_decimal(&ratio, DECIMAL_DIGITS)),
                );
                if ratio > max_ratio {
                    max_ratio = ratio.clone();
                }
                ratio_sum += ratio;
                with_oracle += 1;
            }
        }
        entry.insert("wall_ms".into(), json!(wall_ms));
        instances.push(Value::Object(entry));
    }

    let worst_case_bound = Rat::new(BigInt::from(args.k as u64 + 1), BigInt::from(2));
    let table_guarantee = table_row_for(args.k).and_then(|row| match row.guarantee {
        GuaranteeColumn::Fixed(g) if args.k >= 4 => Some(g),
        GuaranteeColumn::Linear { slope, intercept } if args.k >= 14 => {
            Some(slope * Rat::from_integer(BigInt::from(args.k as u64 + 1)) + intercept)
        }
        _ => None,
    });
    let mean = if with_oracle > 0 {
        Some(&ratio_sum / Rat::from_integer(BigInt::from(with_oracle as u64)))
    } else {
        None
    };
    let aggregate = json!({
        "instances": args.count,
        "with_oracle": with_oracle,
        "max_ratio": mean.as_ref().map(|_| rat_pair(&max_ratio)),
        "mean_ratio": mean.as_ref().map(rat_pair),
        "worst_case_bound": rat_pair(&worst_case_bound),
        "table_guarantee": table_guarantee.map(|g| rat_pair(&g)),
    });
    emit(&json!({
        "suite": args.suite,
        "k": args.k,
        "count": args.count,
        "seed": seed,
        "mis_engine": engine.name(),
        "instances": instances,
        "aggregate": aggregate,
    }));
    Ok(())
}
