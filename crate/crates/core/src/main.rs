use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use flowdec::adjustable::{solve_adjustable, Formulation};
use flowdec::experiment::{run_experiment, write_csv, ExperimentConfig, IterationRow, RESULT_HEADER};
use flowdec::graph::{EdgeId, Graph, WeightedDecomposition};
use flowdec::io::{load_instance, parse_scenarios, write_instance, write_scenarios, Instance, ScenarioFile};
use flowdec::milp::{build_decomposition_model, lp_format, variant_for, Backend, SolverConfig};
use flowdec::robust::{
    solve_scenario, solve_strict, BudgetUncertaintySpec, DiscreteUncertaintySet, IntervalUncertaintySpec, UncertaintySet,
};
use flowdec::scenario_gen::{gen_hard_instance, generate, three_partition_warning, GenConfig};
use flowdec::{Error, InexactBounds, Result};

#[derive(Parser)]
#[command(name = "flowdec", version, about = "Minimum flow decomposition with robust variants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Deterministic decomposition of one instance.
    Solve(SolveArgs),
    /// Strictly robust decomposition over an uncertainty set.
    Strict(StrictArgs),
    /// Two-stage decomposition over a discrete scenario set.
    Adjustable(AdjustableArgs),
    /// Generates a scenario file for an instance.
    GenScenarios(GenArgs),
    /// Writes a 3-PARTITION hard instance.
    GenHard(HardArgs),
    /// Runs MA, LA and naive over a grid of set sizes and budgets.
    Experiment(ExperimentArgs),
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Slot count K̄.
    #[arg(long)]
    kmax: Option<usize>,
    /// Weight cap.
    #[arg(long)]
    wmax: Option<u64>,
    /// `builtin`, or a shell command template using {lp} and {sol}.
    #[arg(long, default_value = "builtin")]
    backend: String,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let backend = if self.backend == "builtin" {
            Backend::BuiltIn
        } else {
            Backend::External { command: self.backend.clone() }
        };
        let config = SolverConfig {
            kbar: self.kmax,
            wmax: self.wmax,
            epsilon: self.epsilon,
            time_limit: self.time_limit.map(seconds).transpose()?,
            backend,
            ..Default::default()
        };
        config.validate()?;
        Ok(config)
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::InvalidConfig(format!("invalid time limit {s}")))
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file or bundled instance name.
    instance: String,
    #[arg(long, default_value_t = 1.0)]
    ay: f64,
    #[arg(long, default_value_t = 0.0)]
    aw: f64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Also write the model in LP format to this path.
    #[arg(long)]
    export_lp: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum UncertaintyKind {
    Discrete,
    Interval,
    Budget,
}

#[derive(Args)]
struct StrictArgs {
    instance: String,
    /// Scenario file; interval and budget sets use its per-edge hull.
    #[arg(long)]
    scenarios: PathBuf,
    #[arg(long, value_enum, default_value = "discrete")]
    uncertainty: UncertaintyKind,
    /// Budget Γ; defaults to the scenario file's value.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    ay: f64,
    #[arg(long, default_value_t = 0.0)]
    aw: f64,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct TwoStageLimits {
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 1800.0)]
    time_limit_master: f64,
    #[arg(long, default_value_t = 180.0)]
    time_limit_sub: f64,
    #[arg(long, default_value_t = 86400.0)]
    time_limit_total: f64,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    wmax: Option<u64>,
    #[arg(long, default_value = "builtin")]
    backend: String,
}

impl TwoStageLimits {
    fn config(&self) -> Result<SolverConfig> {
        let mut config = SolverArgs {
            kmax: self.kmax,
            wmax: self.wmax,
            backend: self.backend.clone(),
            time_limit: None,
            epsilon: self.epsilon,
        }
        .config()?;
        config.time_limit_master = Some(seconds(self.time_limit_master)?);
        config.time_limit_sub = Some(seconds(self.time_limit_sub)?);
        config.time_limit_total = Some(seconds(self.time_limit_total)?);
        Ok(config)
    }
}

#[derive(Args)]
struct AdjustableArgs {
    instance: String,
    #[arg(long, default_value = "ma")]
    formulation: String,
    #[arg(long)]
    scenarios: PathBuf,
    #[command(flatten)]
    limits: TwoStageLimits,
    /// Write the per-iteration log as CSV.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenArgs {
    instance: String,
    #[arg(long, default_value_t = 10)]
    p: usize,
    #[arg(long, default_value_t = 0.2)]
    gamma_prime: f64,
    #[arg(long, default_value_t = 10)]
    count: usize,
    #[arg(long, env = "FLOWDEC_SEED", default_value_t = 0)]
    seed: u64,
    /// Edge ids whose lower bound stays 0.
    #[arg(long, value_delimiter = ',')]
    aux: Vec<u32>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct HardArgs {
    #[arg(long)]
    b: usize,
    #[arg(long = "B")]
    big_b: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<u64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    instance: String,
    #[arg(long, value_delimiter = ',', default_value = "5,10,50")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3")]
    gammas: Vec<f64>,
    /// Seeds; without this flag FLOWDEC_SEED or 0.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    p: usize,
    #[arg(long, value_delimiter = ',', default_value = "ma,la,naive")]
    methods: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    aux: Vec<u32>,
    #[command(flatten)]
    limits: TwoStageLimits,
    /// Result rows; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    iterations: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Strict(a) => cmd_strict(a),
        Command::Adjustable(a) => cmd_adjustable(a),
        Command::GenScenarios(a) => cmd_gen(a),
        Command::GenHard(a) => cmd_hard(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn decomposition_json(graph: &Graph, d: &WeightedDecomposition) -> Value {
    let paths: Vec<Value> = d
        .iter()
        .map(|(p, w)| {
            let ids: Vec<u32> = p.edge_ids(graph).iter().map(|e| e.0).collect();
            json!({ "weight": w, "edges": ids, "nodes": p.describe(graph) })
        })
        .collect();
    Value::Array(paths)
}

fn print_paths(graph: &Graph, d: &WeightedDecomposition) {
    for (p, w) in d.iter() {
        println!("  w={w}  {}", p.describe(graph));
    }
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let config = a.solver.config()?;
    if let Some(path) = &a.export_lp {
        let (model, _) = build_decomposition_model(&inst.graph, &inst.bounds, a.ay, a.aw, &config, variant_for(&inst.bounds))?;
        fs::write(path, lp_format::write_lp(&model))?;
    }
    let sol = solve_scenario(&inst.graph, inst.bounds.clone(), a.ay, a.aw, &config)?;
    let d = &sol.decomposition;
    if a.json {
        let out = json!({
            "instance": inst.name,
            "status": sol.status.as_str(),
            "method": sol.method.as_str(),
            "k": d.len(),
            "total_weight": d.total_weight(),
            "objective": sol.objective,
            "paths": decomposition_json(&inst.graph, d),
        });
        println!("{out}");
    } else {
        println!("k={} total_weight={} objective={} status={}", d.len(), d.total_weight(), sol.objective, sol.status);
        print_paths(&inst.graph, d);
    }
    Ok(())
}

fn read_scenarios(graph: &Graph, path: &PathBuf) -> Result<ScenarioFile> {
    parse_scenarios(graph, &fs::read_to_string(path)?)
}

fn cmd_strict(a: StrictArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let file = read_scenarios(&inst.graph, &a.scenarios)?;
    let discrete = DiscreteUncertaintySet { scenarios: file.scenarios.clone() };
    let set = match a.uncertainty {
        UncertaintyKind::Discrete => UncertaintySet::Discrete(discrete),
        UncertaintyKind::Interval => UncertaintySet::Interval(IntervalUncertaintySpec::hull(&discrete)),
        UncertaintyKind::Budget => {
            let nominal = file
                .nominal
                .clone()
                .ok_or_else(|| Error::InvalidConfig("budget uncertainty needs a nominal scenario in the file".into()))?;
            let gamma = a
                .gamma
                .or(file.gamma)
                .ok_or_else(|| Error::InvalidConfig("budget uncertainty needs --gamma or a file gamma".into()))?;
            if !(gamma >= 0.0) {
                return Err(Error::InvalidConfig("gamma must be non-negative".into()));
            }
            UncertaintySet::Budget(BudgetUncertaintySpec {
                intervals: IntervalUncertaintySpec::hull(&discrete),
                nominal,
                gamma: gamma.floor() as u64,
            })
        }
    };
    let config = a.solver.config()?;
    let sol = solve_strict(&inst.graph, &set, a.ay, a.aw, &config)?;
    let d = &sol.decomposition;
    if a.json {
        let scenario = Instance::new(inst.name.clone(), inst.graph.clone(), sol.scenario.clone());
        let out = json!({
            "instance": inst.name,
            "status": sol.status.as_str(),
            "method": sol.method.as_str(),
            "k": d.len(),
            "total_weight": d.total_weight(),
            "objective": sol.objective,
            "paths": decomposition_json(&inst.graph, d),
            "worst_case": write_instance(&scenario),
        });
        println!("{out}");
    } else {
        println!("k={} total_weight={} objective={} status={}", d.len(), d.total_weight(), sol.objective, sol.status);
        print_paths(&inst.graph, d);
    }
    Ok(())
}

fn cmd_adjustable(a: AdjustableArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let formulation: Formulation = a.formulation.parse()?;
    let file = read_scenarios(&inst.graph, &a.scenarios)?;
    let set = DiscreteUncertaintySet { scenarios: file.scenarios };
    let config = a.limits.config()?;
    let (result, state) = solve_adjustable(formulation, &inst.graph, &set, &config)?;
    if let (Some(path), Some(state)) = (&a.log, &state) {
        let rows: Vec<IterationRow> = state
            .log
            .iter()
            .map(|r| IterationRow {
                instance: inst.name.clone(),
                method: formulation.as_str().into(),
                scenarios: set.scenarios.len(),
                gamma_prime: None,
                seed: None,
                iteration: r.iteration,
                lb: r.lb,
                ub: r.ub,
                raw_ub: r.raw_ub,
                worst: r.worst,
                infeasible: r.infeasible,
                elapsed: r.elapsed.as_secs_f64(),
            })
            .collect();
        write_csv(File::create(path)?, &rows)?;
    }
    let iterations = state.as_ref().map_or(0, |s| s.iteration);
    if a.json {
        let recourse: Vec<Value> = result.recourse.iter().map(|r| decomposition_json(&inst.graph, &r.decomposition)).collect();
        let out = json!({
            "instance": inst.name,
            "formulation": formulation.as_str(),
            "status": result.status.as_str(),
            "Y": result.path_count,
            "W": result.weight,
            "objective": result.objective,
            "iterations": iterations,
            "recourse": recourse,
        });
        println!("{out}");
    } else {
        println!(
            "Y={} W={} objective={} iterations={} status={}",
            result.path_count, result.weight, result.objective, iterations, result.status
        );
        for (i, r) in result.recourse.iter().enumerate() {
            println!("scenario {i}:");
            print_paths(&inst.graph, &r.decomposition);
        }
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let config = GenConfig {
        p: a.p,
        gamma_prime: a.gamma_prime,
        count: a.count,
        seed: a.seed,
        aux_edges: a.aux.into_iter().map(EdgeId).collect(),
        max_rejections: None,
    };
    let set = generate(&inst.graph, &config)?;
    emit(&write_scenarios(&inst.graph, &set.to_file()), a.output.as_ref())
}

fn cmd_hard(a: HardArgs) -> Result<()> {
    if let Some(w) = three_partition_warning(a.big_b, &a.sizes) {
        eprintln!("warning: {w}");
    }
    let (graph, lower) = gen_hard_instance(a.b, a.big_b, &a.sizes)?;
    let inst = Instance::new(format!("three_partition_b{}_B{}", a.b, a.big_b), graph, InexactBounds::lower_only(&lower));
    emit(&write_instance(&inst), a.output.as_ref())
}

fn cmd_experiment(a: ExperimentArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let methods = a.methods.iter().map(|m| m.parse()).collect::<Result<Vec<Formulation>>>()?;
    let seeds = if a.seeds.is_empty() {
        let env = std::env::var("FLOWDEC_SEED").ok();
        vec![env.map(|s| s.parse().map_err(|_| Error::Parse(format!("FLOWDEC_SEED `{s}` is not an integer")))).transpose()?.unwrap_or(0)]
    } else {
        a.seeds
    };
    let config = ExperimentConfig {
        sizes: a.sizes,
        gamma_primes: a.gammas,
        seeds,
        p: a.p,
        methods,
        aux_edges: a.aux.into_iter().map(EdgeId).collect(),
        solver: a.limits.config()?,
    };
    let sink: Box<dyn Write> = match &a.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    // Rows are written as they finish so partial results survive interruption.
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(sink));
    writer.write_record(RESULT_HEADER.split(',')).map_err(|e| Error::Io(e.to_string()))?;
    let out = run_experiment(&inst.graph, &inst.name, &config, |row| {
        writer.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        writer.flush().map_err(Error::from)
    })?;
    if let Some(path) = &a.summary {
        write_csv(File::create(path)?, &out.summaries)?;
    }
    if let Some(path) = &a.iterations {
        write_csv(File::create(path)?, &out.iterations)?;
    }
    Ok(())
}
