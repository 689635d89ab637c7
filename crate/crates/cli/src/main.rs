use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use log::info;

use netappraise_core::appraise::UnitValues;
use netappraise_core::assign::{format_flows, frank_wolfe, read_demand, AssignmentOptions};
use netappraise_core::netgraph::{read_network, validate_network};
use netappraise_core::pipeline::{
    emit_reports, load_inputs, read_ledgers, run_horizon, summarize, year_demand, Inputs, RunConfig,
};
use netappraise_core::Error;

/// Appraise road-network interventions: demand, equilibrium assignment and NPV.
#[derive(Parser)]
#[command(name = "netappraise", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides the configured one.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative-gap target for assignment.
    #[arg(long)]
    gap: Option<f64>,
    /// Frank-Wolfe iteration cap.
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    /// Appraisal horizon in operation years.
    #[arg(long)]
    years: Option<u32>,
    /// Discount rate per year.
    #[arg(long)]
    rate: Option<f64>,
    /// Restrict to the named scenario; repeatable.
    #[arg(long = "scenario")]
    scenarios: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check every input named by the configuration.
    Validate(Common),
    /// Assign one demand matrix to one network.
    Assign {
        #[command(flatten)]
        common: Common,
        /// Network file; defaults to the configured network.
        #[arg(long)]
        network: Option<PathBuf>,
        /// Demand file: CSV `origin,dest,pce_per_hour` or TNTP trips.
        #[arg(long)]
        demand: PathBuf,
    },
    /// Build the demand matrices of one year from the zone data.
    Demand {
        #[command(flatten)]
        common: Common,
        /// Year index, 0 being the base year.
        #[arg(long, default_value_t = 0)]
        year: u32,
    },
    /// NPV, payback, B/C and sensitivity of stored ledgers.
    Appraise {
        #[command(flatten)]
        common: Common,
        /// Ledger file written by `run` (ledgers.json).
        #[arg(long)]
        ledgers: PathBuf,
    },
    /// Full horizon run for the status quo and every scenario.
    Run(Common),
    /// Rank stored ledgers by NPV.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ledgers: PathBuf,
    },
}

enum Outcome {
    Done,
    NotConverged,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap's own failure code is 2, which here means non-convergence
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: at least one assignment did not reach the gap target");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let input = e
                .chain()
                .any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_input_error))
                || e.downcast_ref::<UsageError>().is_some();
            ExitCode::from(if input { 1 } else { 3 })
        }
    }
}

/// Bad command-line usage, reported like an input error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn dispatch(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Validate(common) => validate(&common),
        Command::Assign { common, network, demand } => assign(&common, network, &demand),
        Command::Demand { common, year } => demand(&common, year),
        Command::Appraise { common, ledgers } => appraise(&common, &ledgers),
        Command::Run(common) => run(&common),
        Command::Compare { common, ledgers } => compare(&common, &ledgers),
    }
}

fn load_config(common: &Common) -> anyhow::Result<RunConfig> {
    let path = common.config.as_ref().ok_or_else(|| usage("--config is required"))?;
    let mut cfg = RunConfig::from_file(path)?;
    if let Some(gap) = common.gap {
        cfg.assignment.relative_gap_target = gap;
    }
    if let Some(n) = common.max_iters {
        cfg.assignment.max_iterations = n;
    }
    if let Some(t) = common.years {
        cfg.appraisal.horizon = t;
    }
    if let Some(r) = common.rate {
        cfg.appraisal.discount_rate = r;
    }
    if let Some(out) = &common.out {
        cfg.paths.output = std::path::absolute(out).context("resolving --out")?;
    }
    cfg.check()?;
    Ok(cfg)
}

fn load(common: &Common) -> anyhow::Result<(RunConfig, Inputs)> {
    let cfg = load_config(common)?;
    let mut inputs = load_inputs(&cfg)?;
    inputs.select_scenarios(&common.scenarios)?;
    Ok((cfg, inputs))
}

fn validate(common: &Common) -> anyhow::Result<Outcome> {
    let (_, inputs) = load(common)?;
    let net = &inputs.network;
    println!(
        "network: {} nodes, {} links, {} zones",
        net.nodes().len(),
        net.links().len(),
        net.zone_count()
    );
    println!("zones: {} rows", inputs.zones.len());
    for s in &inputs.scenarios {
        println!(
            "scenario {}: {} construction edits, {} operation edits",
            s.name,
            s.construction.len(),
            s.operation.len()
        );
    }
    println!("ok");
    Ok(Outcome::Done)
}

fn assignment_options(common: &Common) -> anyhow::Result<(AssignmentOptions, Option<RunConfig>)> {
    let cfg = common.config.as_ref().map(|_| load_config(common)).transpose()?;
    let mut opts = cfg.as_ref().map(|c| c.assignment).unwrap_or_default();
    if let Some(gap) = common.gap {
        opts.relative_gap_target = gap;
    }
    if let Some(n) = common.max_iters {
        opts.max_iterations = n;
    }
    opts.check().map_err(|e| usage(e.to_string()))?;
    Ok((opts, cfg))
}

fn assign(common: &Common, network: Option<PathBuf>, demand: &Path) -> anyhow::Result<Outcome> {
    let (opts, cfg) = assignment_options(common)?;
    let net_path = match (network, &cfg) {
        (Some(p), _) => p,
        (None, Some(c)) => c.resolve(&c.paths.network),
        (None, None) => return Err(usage("give --network or --config")),
    };
    let net = read_network(&net_path)?;
    let defects = validate_network(&net);
    if !defects.is_empty() {
        return Err(Error::InvalidNetwork { path: Some(net_path), defects }.into());
    }
    let od = read_demand(demand, net.zone_ids())?;
    let state = frank_wolfe(&net, &od, &opts)?;
    let csv = format_flows(&net, &state);
    match common.out.as_ref().or(cfg.as_ref().map(|c| &c.paths.output)) {
        Some(dir) => {
            let dir = cfg.as_ref().map_or_else(|| dir.clone(), |c| c.resolve(dir));
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join("flows.csv");
            fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
            println!("{}", path.display());
        }
        None => print!("{csv}"),
    }
    eprintln!(
        "iterations {}, relative gap {:e}, beckmann {}",
        state.iterations(),
        state.final_gap(),
        state.beckmann_value
    );
    Ok(if state.converged { Outcome::Done } else { Outcome::NotConverged })
}

fn demand(common: &Common, year: u32) -> anyhow::Result<Outcome> {
    let (cfg, inputs) = load(common)?;
    let d = year_demand(&inputs, &cfg, year)?;
    let ids = inputs.network.zone_ids();
    let dir = cfg.output_dir();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let mut persons = String::from("origin,dest,mode,persons_per_day\n");
    for (mode, od) in &d.persons {
        for (i, j, v) in od.iter().filter(|&(_, _, v)| v != 0.0) {
            let _ = writeln!(persons, "{},{},{},{}", ids[i], ids[j], mode, v);
        }
    }
    let path = dir.join(format!("persons_year{year}.csv"));
    fs::write(&path, persons).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());

    for period in &cfg.periods {
        let mut csv = String::from("origin,dest,pce_per_hour\n");
        for (i, j, v) in d.pce.iter().filter(|&(i, j, v)| i != j && v != 0.0) {
            let _ = writeln!(csv, "{},{},{}", ids[i], ids[j], v * period.demand_share);
        }
        let path = dir.join(format!("pce_year{year}_{}.csv", period.name));
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    info!("daily PCE trips in year {year}: {}", d.pce.total());
    Ok(Outcome::Done)
}

fn unit_values(common: &Common) -> anyhow::Result<(UnitValues, f64)> {
    let (mut unit, perturbation) = match &common.config {
        Some(_) => {
            let cfg = load_config(common)?;
            (cfg.appraisal, cfg.sensitivity_perturbation)
        }
        None => (UnitValues::default(), 0.1),
    };
    if let Some(r) = common.rate {
        unit.discount_rate = r;
    }
    unit.check().map_err(|e| usage(e.to_string()))?;
    Ok((unit, perturbation))
}

fn selected_ledgers(common: &Common, path: &Path) -> anyhow::Result<Vec<netappraise_core::AppraisalLedger>> {
    let mut ledgers = read_ledgers(path)?;
    if !common.scenarios.is_empty() {
        for name in &common.scenarios {
            if !ledgers.iter().any(|l| &l.name == name) {
                return Err(usage(format!("{}: no ledger named `{name}`", path.display())));
            }
        }
        ledgers.retain(|l| common.scenarios.contains(&l.name));
    }
    if ledgers.is_empty() {
        bail!(UsageError(format!("{}: no ledgers", path.display())));
    }
    Ok(ledgers)
}

fn appraise(common: &Common, path: &Path) -> anyhow::Result<Outcome> {
    let (unit, perturbation) = unit_values(common)?;
    let ledgers = selected_ledgers(common, path)?;
    let summary = summarize(&ledgers, &unit, perturbation)?;
    print!("{}", render_summary(&summary));
    Ok(Outcome::Done)
}

fn render_summary(summary: &netappraise_core::pipeline::Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "currency {}  discount rate {}  horizon {}", summary.currency, summary.discount_rate, summary.horizon);
    for s in &summary.scenarios {
        let _ = writeln!(
            out,
            "{}: C0 {}  NPV {}  payback {}  B/C {}",
            s.name,
            s.initial_total,
            s.npv,
            s.payback_year.map_or("none".to_string(), |y| y.to_string()),
            s.bc_ratio.map_or("n/a".to_string(), |r| format!("{r:.4}"))
        );
        if let Some(sh) = s.sensitivity_shares {
            let _ = writeln!(
                out,
                "  sensitivity: fuel {:.4}  time {:.4}  accident {:.4}  emission {:.4}",
                sh.fuel, sh.time, sh.accident, sh.emission
            );
        }
    }
    out
}

fn compare(common: &Common, path: &Path) -> anyhow::Result<Outcome> {
    let (unit, _) = unit_values(common)?;
    let ledgers = selected_ledgers(common, path)?;
    let cmp = netappraise_core::appraise::compare_scenarios(&ledgers, unit.discount_rate)?;
    println!("rank,scenario,npv,payback_year,bc_ratio");
    for (k, s) in cmp.ranking.iter().enumerate() {
        println!(
            "{},{},{},{},{}",
            k + 1,
            s.name,
            s.npv,
            s.payback_year.map_or(String::new(), |y| y.to_string()),
            s.bc_ratio.map_or(String::new(), |r| r.to_string())
        );
    }
    for r in &cmp.npv_ratios {
        println!("# npv({}) / npv({}) = {}", r.scenario, r.relative_to, r.ratio);
    }
    Ok(Outcome::Done)
}

fn run(common: &Common) -> anyhow::Result<Outcome> {
    let (cfg, inputs) = load(common)?;
    let result = run_horizon(&inputs, &cfg)?;
    let out = cfg.output_dir();
    let files = emit_reports(&result, &cfg.appraisal, cfg.sensitivity_perturbation, &out)?;
    for f in &files {
        println!("{}", f.display());
    }
    for s in &result.scenarios {
        let r = result.discount_rate;
        info!(
            "{}: NPV {} ({}), payback {:?}",
            s.name,
            s.ledger.npv(r),
            result.currency,
            s.ledger.payback_year(r)
        );
    }
    Ok(if result.all_converged() { Outcome::Done } else { Outcome::NotConverged })
}
