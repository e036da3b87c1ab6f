//! The `ghz-star` command line: `simulate`, `analytic`, `sweep` and `verify`.
//!
//! Exit status is 0 on success, 1 on configuration or usage errors and 2 when
//! `verify` finds a failing check. The worker count comes from `--workers` or
//! the `GHZ_STAR_WORKERS` environment variable; results do not depend on it.

pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use toml::Table;

use crate::analytics::{
    expected_order_stat, fidelity_closed_form, g_value, rate_exact, rate_leading, GMode, GSpec,
    OrderStatMode, MAX_SUBSET_NODES,
};
use crate::config::{apply_override, load_config, params_from_table, set_param, KEYS};
use crate::error::{config, Error, Result};
use crate::factory::{self, Engine};
use crate::model::SimParams;
use crate::switch::{self, WARMUP_EXECUTIONS};
use crate::verify::{run_verification, VerifyOptions};

pub const WORKERS_ENV: &str = "GHZ_STAR_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "ghz-star", version, about = "GHZ distribution over a star network")]
pub struct Cli {
    /// Worker threads for parallel shots.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo estimate of rate and fidelity at one parameter point.
    Simulate(SimulateArgs),
    /// Closed-form quantities as JSON.
    Analytic(AnalyticArgs),
    /// Monte Carlo estimates over a list of values for one parameter.
    Sweep(SweepArgs),
    /// Runs the oracle checks and prints a JSON report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Protocol {
    Factory,
    Switch,
}

impl Protocol {
    fn name(self) -> &'static str {
        match self {
            Protocol::Factory => "factory",
            Protocol::Switch => "switch",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Fast,
    Dm,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Parameter file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set q_link=0.01`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ParamArgs {
    fn table(&self) -> Result<Table> {
        let mut table = match &self.config {
            Some(path) => load_config(path)?,
            None => Table::new(),
        };
        for o in &self.overrides {
            apply_override(&mut table, o)?;
        }
        Ok(table)
    }

    fn params(&self) -> Result<SimParams> {
        params_from_table(&self.table()?)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_enum, default_value = "factory")]
    protocol: Protocol,
    #[command(flatten)]
    params: ParamArgs,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Omit the generation-time comment line.
    #[arg(long)]
    no_timestamp: bool,
    /// Factory engine: closed-form fidelity per shot, or explicit density matrices.
    #[arg(long, value_enum, default_value = "fast")]
    engine: EngineArg,
    /// Independent switch networks run in parallel; 1 keeps a single network.
    #[arg(long, default_value_t = 1)]
    replicas: usize,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Parameter to vary.
    #[arg(long)]
    param: String,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    values: Vec<String>,
    /// Also write an SVG chart.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Quantity {
    Rate,
    Fidelity,
    OrderStat,
    G,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Leading,
    UpperBound,
    LowerBound,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[arg(value_enum)]
    quantity: Quantity,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "leading")]
    mode: Mode,
    /// Rank for `order-stat`; defaults to the last one.
    #[arg(long)]
    index: Option<usize>,
    /// Comma-separated ranks for `g`; defaults to all.
    #[arg(long, value_delimiter = ',')]
    positions: Vec<usize>,
    /// Per-round loss rate for `g`; defaults to 1 - p_mem^2.
    #[arg(long)]
    rate: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Also write the report here.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Skews one expansion coefficient by 1e-6 (negative control).
    #[arg(long, hide = true)]
    inject_skew: bool,
}

/// One CSV row. `None` cells are written empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_param: Option<String>,
    pub sweep_value: Option<f64>,
    pub shots: usize,
    pub seed: u64,
    pub rate_mean: f64,
    pub rate_stderr: f64,
    pub fid_mean: f64,
    pub fid_stderr: f64,
    pub analytic_rate_exact: Option<f64>,
    pub analytic_rate_leading: Option<f64>,
    pub analytic_fid_leading: Option<f64>,
    pub analytic_fid_lower_bound: Option<f64>,
}

/// Estimates one point and, for the factory node, the matching closed forms.
pub fn evaluate(protocol: Protocol, params: &SimParams, engine: Engine, replicas: usize) -> Result<ResultRow> {
    let est = match protocol {
        Protocol::Factory => factory::estimate_with(params, engine)?,
        Protocol::Switch if replicas > 1 => switch::estimate_switch_replicated(params, replicas)?,
        Protocol::Switch => switch::estimate_switch(params)?,
    };
    let mut row = ResultRow {
        sweep_param: None,
        sweep_value: None,
        shots: est.shots,
        seed: params.seed,
        rate_mean: est.rate_mean,
        rate_stderr: est.rate_stderr,
        fid_mean: est.fidelity_mean,
        fid_stderr: est.fidelity_stderr,
        analytic_rate_exact: None,
        analytic_rate_leading: None,
        analytic_fid_leading: None,
        analytic_fid_lower_bound: None,
    };
    if let Protocol::Factory = protocol {
        let (n, q) = (params.n_end_nodes, params.q_link);
        row.analytic_rate_exact = Some(rate_exact(n, q, params.q_bsm, params.dt)?);
        row.analytic_rate_leading = Some(rate_leading(n, q, params.q_bsm, params.dt)?);
        if n <= MAX_SUBSET_NODES {
            row.analytic_fid_leading = Some(fidelity_closed_form(params, GMode::Leading)?.value);
            row.analytic_fid_lower_bound = Some(fidelity_closed_form(params, GMode::LowerBound)?.value);
        }
    }
    Ok(row)
}

/// Renders rows as CSV preceded by `#` comment lines.
pub fn write_csv(rows: &[ResultRow], protocol: Protocol, timestamp: bool) -> Result<String> {
    let mut out = Vec::new();
    if timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        writeln!(out, "# generated_unix={secs}")?;
    }
    writeln!(out, "# protocol={}", protocol.name())?;
    if let Protocol::Switch = protocol {
        writeln!(out, "# warmup_executions={WARMUP_EXECUTIONS}")?;
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    String::from_utf8(out).map_err(|e| Error::Internal(e.to_string()))
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn engine(run: &RunArgs) -> Engine {
    match run.engine {
        EngineArg::Fast => Engine::Fast,
        EngineArg::Dm => Engine::DensityMatrix,
    }
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let run = &args.run;
    let params = run.params.params()?;
    let row = evaluate(run.protocol, &params, engine(run), run.replicas)?;
    emit(&write_csv(&[row], run.protocol, !run.no_timestamp)?, run.output.as_deref())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    if !KEYS.contains(&args.param.as_str()) {
        return config(format!("unknown parameter `{}`; expected one of {}", args.param, KEYS.join(", ")));
    }
    let values: Vec<f64> = args
        .values
        .iter()
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse::<f64>().map_err(|_| Error::Config(format!("sweep value `{v}` is not a number"))))
        .collect::<Result<_>>()?;
    if values.is_empty() {
        return config("sweep needs at least one value");
    }
    let run = &args.run;
    let mut table = run.params.table()?;
    // The swept key may be the only source of a required parameter.
    let first = if values[0].fract() == 0.0 && values[0].abs() < 9.0e15 {
        toml::Value::Integer(values[0] as i64)
    } else {
        toml::Value::Float(values[0])
    };
    table.entry(args.param.clone()).or_insert(first);
    let base = params_from_table(&table)?;
    let mut rows = Vec::with_capacity(values.len());
    for &v in &values {
        let mut params = base.clone();
        set_param(&mut params, &args.param, v)?;
        params.validate()?;
        let mut row = evaluate(run.protocol, &params, engine(run), run.replicas)?;
        row.sweep_param = Some(args.param.clone());
        row.sweep_value = Some(v);
        rows.push(row);
    }
    emit(&write_csv(&rows, run.protocol, !run.no_timestamp)?, run.output.as_deref())?;
    if let Some(path) = &args.svg {
        std::fs::write(path, sweep_chart(&rows, run.protocol, &args.param))?;
    }
    Ok(())
}

/// Two panels, rate and fidelity, with Monte Carlo points and any analytic lines.
pub fn sweep_chart(rows: &[ResultRow], protocol: Protocol, param: &str) -> String {
    use svg::{Panel, Series};
    let x = |r: &ResultRow| r.sweep_value.unwrap_or(f64::NAN);
    let line = |name: &str, color, f: &dyn Fn(&ResultRow) -> Option<f64>| -> Option<Series> {
        let points: Vec<_> = rows.iter().filter_map(|r| f(r).map(|y| (x(r), y, None))).collect();
        (!points.is_empty()).then(|| Series { name: name.into(), color, points, line: true })
    };
    let mc = |f: &dyn Fn(&ResultRow) -> (f64, f64)| Series {
        name: "Monte Carlo".into(),
        color: "black",
        points: rows.iter().map(|r| (x(r), f(r).0, Some(f(r).1))).collect(),
        line: false,
    };
    let mut rate = vec![mc(&|r| (r.rate_mean, r.rate_stderr))];
    rate.extend(line("exact", "#1f77b4", &|r| r.analytic_rate_exact));
    rate.extend(line("leading order", "#d62728", &|r| r.analytic_rate_leading));
    let mut fid = vec![mc(&|r| (r.fid_mean, r.fid_stderr))];
    fid.extend(line("leading order", "#d62728", &|r| r.analytic_fid_leading));
    fid.extend(line("lower bound", "#2ca02c", &|r| r.analytic_fid_lower_bound));
    svg::render(
        &format!("{} protocol", protocol.name()),
        param,
        &[Panel { y_label: "rate".into(), series: rate }, Panel { y_label: "fidelity".into(), series: fid }],
    )
}

fn analytic(args: &AnalyticArgs) -> Result<()> {
    let params = args.params.params()?;
    let (n, q) = (params.n_end_nodes, params.q_link);
    let mode_name = format!("{:?}", args.mode).to_lowercase();
    let bad_mode = || config(format!("mode `{mode_name}` does not apply to {:?}", args.quantity));
    let mut inputs = serde_json::to_value(&params)?;
    let (quantity, value) = match args.quantity {
        Quantity::Rate => (
            "rate",
            match args.mode {
                Mode::Exact => rate_exact(n, q, params.q_bsm, params.dt)?,
                Mode::Leading => rate_leading(n, q, params.q_bsm, params.dt)?,
                _ => return bad_mode(),
            },
        ),
        Quantity::Fidelity => {
            let mode = match args.mode {
                Mode::Leading => GMode::Leading,
                Mode::LowerBound => GMode::LowerBound,
                _ => return bad_mode(),
            };
            ("fidelity", fidelity_closed_form(&params, mode)?.value)
        }
        Quantity::OrderStat => {
            let mode = match args.mode {
                Mode::Exact => OrderStatMode::Exact,
                Mode::Leading => OrderStatMode::Leading,
                Mode::UpperBound => OrderStatMode::UpperBound,
                Mode::LowerBound => return bad_mode(),
            };
            let i = args.index.unwrap_or(n);
            inputs["index"] = json!(i);
            ("order_stat", expected_order_stat(i, n, q, mode)?)
        }
        Quantity::G => {
            let mode = match args.mode {
                Mode::Leading => GMode::Leading,
                Mode::LowerBound => GMode::LowerBound,
                _ => return bad_mode(),
            };
            let positions: Vec<usize> =
                if args.positions.is_empty() { (1..=n).collect() } else { args.positions.clone() };
            let rate = args.rate.unwrap_or(1.0 - params.p_mem * params.p_mem);
            let spec = GSpec::new(n, positions.clone(), vec![rate; positions.len()])?;
            inputs["positions"] = json!(spec.positions);
            inputs["rate"] = json!(rate);
            ("g", g_value(&spec, q, mode)?)
        }
    };
    let out = json!({ "quantity": quantity, "mode": mode_name, "inputs": inputs, "value": value });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(())
}

/// Returns the exit status.
fn verify(args: &VerifyArgs) -> Result<i32> {
    let options = VerifyOptions { seed: args.seed, coefficient_skew: if args.inject_skew { 1e-6 } else { 0.0 } };
    let report = run_verification(&options)?;
    let text = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(p) = &args.output {
        std::fs::write(p, &text)?;
    }
    print!("{text}");
    Ok(if report.all_passed { 0 } else { 2 })
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Simulate(a) => simulate(a).map(|_| 0),
        Command::Analytic(a) => analytic(a).map(|_| 0),
        Command::Sweep(a) => sweep(a).map(|_| 0),
        Command::Verify(a) => verify(a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.workers {
        Some(0) => config("--workers must be at least 1"),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))
            .and_then(|pool| pool.install(|| dispatch(&cli.command))),
        None => dispatch(&cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
