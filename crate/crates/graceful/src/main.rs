use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use graceful::experiments::{
    ablation_scenario, run_beta_sweep, run_empathy_ablation, run_full_matrix, CellRun, ExperimentMatrix, SWEEP_BETAS,
};
use graceful::table::ResultTable;
use graceful::trace::{read_trace, write_trace, MetricsDocument};
use graceful::{config, plot};
use graceful_core::scenario::{default_intersection, DEFAULT_BETA};
use graceful_core::simulation::run;
use graceful_core::{ScenarioConfig, SimulationTrace, StrategyKind};

#[derive(Parser)]
#[command(version, about = "Two-agent intersection simulations with intent inference")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario TOML laid over the default intersection.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Strategy {
    Reactive,
    Proactive,
    Social,
}

#[derive(Args)]
struct Overrides {
    /// Strategy of M.
    #[arg(long = "m")]
    m: Option<Strategy>,
    /// Strategy of H.
    #[arg(long = "h")]
    h: Option<Strategy>,
    /// Gracefulness weight of a social agent.
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long)]
    c_m: Option<f64>,
    #[arg(long)]
    c_h: Option<f64>,
    /// Simulation length in ticks.
    #[arg(long)]
    ticks: Option<usize>,
}

impl Overrides {
    fn apply(&self, mut s: ScenarioConfig) -> ScenarioConfig {
        let kind = |k: Strategy| match k {
            Strategy::Reactive => StrategyKind::Reactive,
            Strategy::Proactive => StrategyKind::Proactive,
            Strategy::Social => StrategyKind::SociallyAware { beta: self.beta },
        };
        if let Some(k) = self.m {
            s.m.strategy = kind(k);
        }
        if let Some(k) = self.h {
            s.h.strategy = kind(k);
        }
        if let Some(c) = self.c_m {
            s.m.intent = c;
        }
        if let Some(c) = self.c_h {
            s.h.intent = c;
        }
        if let Some(t) = self.ticks {
            s.sim_ticks = t;
        }
        s
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace and metrics.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Every M/H strategy pair for each intent setting.
    Matrix {
        #[command(flatten)]
        common: Common,
        /// Intent of M in every setting.
        #[arg(long, default_value_t = 1.0)]
        c_m: f64,
        /// Intents of H, one matrix each.
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1e9])]
        c_h: Vec<f64>,
        /// Also write the trace of every cell.
        #[arg(long)]
        traces: bool,
    },
    /// Social M against reactive H over gracefulness weights.
    BetaSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = SWEEP_BETAS)]
        betas: Vec<f64>,
        #[arg(long)]
        traces: bool,
    },
    /// Empathetic against non-empathetic M. Without --scenario this is
    /// reactive M and H with c_M = 1, c_H = 1e3.
    Empathy {
        #[command(flatten)]
        common: Common,
    },
    /// Render a trace file, or a fresh run of the scenario, as SVG.
    Plot {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        overrides: Overrides,
        /// Trace to render; the scenario still supplies the region.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Output file name inside the output directory.
        #[arg(long, default_value = "trajectory.svg")]
        output: String,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate { common, overrides } => {
            let scenario = overrides.apply(scenario(&common, default_intersection)?);
            let trace = run(scenario).context("simulation failed")?;
            prepare(&common.out_dir)?;
            save_trace(&trace, &common.out_dir.join("trace.jsonl"))?;
            let doc = MetricsDocument::new(&trace);
            match common.format {
                Format::Json => write_atomic(
                    &common.out_dir.join("metrics.json"),
                    (serde_json::to_string_pretty(&doc)? + "\n").as_bytes(),
                )?,
                Format::Csv => {
                    let row = graceful::table::ResultRow::from_run(&trace.scenario, &Ok(trace.clone()));
                    save_table(&ResultTable::new("simulate", vec![row]), &common, "metrics")?;
                }
            }
            println!(
                "q_grace = {:e}, q_eff = {}, right of way = {}",
                doc.q_grace,
                doc.q_eff,
                doc.right_of_way.map_or("none".to_string(), |a| a.to_string())
            );
        }
        Command::Matrix { common, c_m, c_h, traces } => {
            let base = scenario(&common, default_intersection)?;
            let matrix = ExperimentMatrix {
                intents: c_h.iter().map(|&h| (c_m, h)).collect(),
                ..ExperimentMatrix::default()
            };
            let (table, runs) = run_full_matrix(&base, &matrix);
            prepare(&common.out_dir)?;
            save_table(&table, &common, "matrix")?;
            if traces {
                save_cell_traces(&runs, &common.out_dir)?;
            }
            report_faults(&runs);
        }
        Command::BetaSweep { common, betas, traces } => {
            if betas.is_empty() {
                bail!("no gracefulness weights given");
            }
            let base = scenario(&common, default_intersection)?;
            let (table, runs) = run_beta_sweep(&base, &betas);
            prepare(&common.out_dir)?;
            save_table(&table, &common, "beta_sweep")?;
            if traces {
                save_cell_traces(&runs, &common.out_dir)?;
            }
            report_faults(&runs);
        }
        Command::Empathy { common } => {
            let base = scenario(&common, ablation_scenario)?;
            let ablation = run_empathy_ablation(&base)?;
            prepare(&common.out_dir)?;
            save_trace(&ablation.empathetic, &common.out_dir.join("empathetic.jsonl"))?;
            save_trace(&ablation.non_empathetic, &common.out_dir.join("non_empathetic.jsonl"))?;
            let report = &ablation.report;
            match common.format {
                Format::Json => write_atomic(
                    &common.out_dir.join("empathy.json"),
                    (serde_json::to_string_pretty(report)? + "\n").as_bytes(),
                )?,
                Format::Csv => {
                    write_atomic(&common.out_dir.join("empathy_beliefs.csv"), &beliefs_csv(report)?)?;
                    write_atomic(&common.out_dir.join("empathy_equilibria.csv"), &equilibria_csv(report)?)?;
                }
            }
            match report.divergence_tick {
                Some(t) => println!("beliefs diverge at tick {t}"),
                None => println!("beliefs never settle on different intents"),
            }
        }
        Command::Plot {
            common,
            overrides,
            trace,
            output,
        } => {
            let scenario = overrides.apply(scenario(&common, default_intersection)?);
            let region = scenario.loss.interaction_region;
            let records = match trace {
                Some(path) => {
                    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    read_trace(BufReader::new(file))?
                }
                None => run(scenario).context("simulation failed")?.records,
            };
            if records.is_empty() {
                bail!("trace has no records");
            }
            prepare(&common.out_dir)?;
            let svg = plot::render_svg(&records, &region, plot::PlotOptions::default());
            write_atomic(&common.out_dir.join(output), svg.as_bytes())?;
        }
    }
    Ok(())
}

fn scenario(common: &Common, default: fn() -> ScenarioConfig) -> Result<ScenarioConfig> {
    let Some(path) = &common.scenario else {
        return Ok(default());
    };
    let loaded = config::load(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.config)
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

/// Writes through a temporary sibling so readers never see a partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn save_trace(trace: &SimulationTrace, path: &Path) -> Result<()> {
    let tmp = path.with_extension("partial");
    let file = File::create(&tmp).with_context(|| format!("writing {}", tmp.display()))?;
    write_trace(trace, BufWriter::new(file))?;
    fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn save_table(table: &ResultTable, common: &Common, stem: &str) -> Result<()> {
    match common.format {
        Format::Csv => write_atomic(&common.out_dir.join(format!("{stem}.csv")), table.to_csv().as_bytes()),
        Format::Json => write_atomic(&common.out_dir.join(format!("{stem}.json")), table.to_json().as_bytes()),
    }
}

fn save_cell_traces(runs: &[CellRun], dir: &Path) -> Result<()> {
    for cell in runs {
        if let Ok(trace) = &cell.result {
            let row = cell.row();
            let mut name = format!("trace_{}_{}_{}_{}", row.m_strategy, row.h_strategy, row.c_m, row.c_h);
            if let Some(beta) = row.beta {
                name.push_str(&format!("_b{beta}"));
            }
            save_trace(trace, &dir.join(name + ".jsonl"))?;
        }
    }
    Ok(())
}

fn report_faults(runs: &[CellRun]) {
    for cell in runs {
        if let Err(e) = &cell.result {
            eprintln!(
                "cell {} vs {} faulted: {e}",
                cell.scenario.m.strategy.name(),
                cell.scenario.h.strategy.name()
            );
        }
    }
}

fn beliefs_csv(report: &graceful::experiments::AblationReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["tick".to_string()];
    for series in ["empathetic_c_h", "non_empathetic_c_h", "empathetic_c_m", "non_empathetic_c_m"] {
        header.extend(report.intents.iter().map(|c| format!("{series}_{c}")));
    }
    header.extend(["empathetic_xi_m", "empathetic_xi_h", "non_empathetic_xi_m", "non_empathetic_xi_h"].map(String::from));
    w.write_record(&header)?;
    for b in &report.beliefs {
        let mut rec = vec![b.tick.to_string()];
        for series in [&b.empathetic_c_h, &b.non_empathetic_c_h, &b.empathetic_c_m, &b.non_empathetic_c_m] {
            rec.extend(series.iter().map(|p| format!("{p:?}")));
        }
        rec.extend(
            b.empathetic_motions
                .iter()
                .chain(&b.non_empathetic_motions)
                .map(|x| format!("{x:?}")),
        );
        w.write_record(&rec)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn equilibria_csv(report: &graceful::experiments::AblationReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["tick", "c_m", "c_h", "xi_m", "xi_h"])?;
    if let Some(dump) = &report.equilibria {
        for row in &dump.rows {
            for (xm, xh) in &row.pairs {
                w.write_record([
                    dump.tick.to_string(),
                    format!("{:?}", row.c_m),
                    format!("{:?}", row.c_h),
                    format!("{xm:?}"),
                    format!("{xh:?}"),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

