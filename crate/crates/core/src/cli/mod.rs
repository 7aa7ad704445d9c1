//! Command-line front end.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bootstrap::{bootstrap_many, BootstrapResult, BootstrapSpec, Sample};
use crate::capvalue::{self, CapacityValueResult};
use crate::distribution::{build_copt, load_units, DiscreteDistribution, GenUnit};
use crate::error::{ensure, Error, ErrorClass, Result};
use crate::ingest::{self, BlockKind, PairedSeries};
use crate::jointmodel::{loess_fit, JointModel, ModelKind, ScalingFunction};
use crate::risk;
use crate::synth;

pub use config::{Config, Overrides};

#[derive(Debug, Parser)]
#[command(name = "adequacy", version, about = "Generation adequacy risk with wind")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (results do not depend on it)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check inputs and report counts, coverage and fleet totals
    Validate(RunArgs),
    /// Risk indices, one JSON line per installed capacity
    Risk(RunArgs),
    /// LOLE and EFC for each installed capacity, as CSV
    Sweep(RunArgs),
    /// Share of hindcast LOLE from the n highest net-demand hours
    Topn(RunArgs),
    /// Daily-peak load factor against normalized demand, with a LOESS curve
    Loess(RunArgs),
    /// Bootstrap interval for LOLE or EFC at one installed capacity
    Bootstrap(BootstrapArgs),
    /// Write the synthetic fixture and a config for it
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap replicates; also switches bootstrap on
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub span: Option<f64>,
    /// Comma-separated installed wind capacities in MW
    #[arg(long, value_delimiter = ',')]
    pub capacities: Option<Vec<f64>>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub allow_gaps: bool,
    /// Largest n for `topn`
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Lole,
    Efc,
}

#[derive(Debug, Clone, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value = "lole")]
    pub statistic: Statistic,
    /// Also write `replicate,value` rows to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            replicates: self.replicates,
            span: self.span,
            capacities: self.capacities.clone(),
            model: self.model,
            allow_gaps: self.allow_gaps,
            n_max: self.n_max,
        }
    }

    pub fn load(&self) -> Result<Config> {
        let mut cfg = Config::load(&self.config)?;
        cfg.apply(&self.overrides());
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Exit status for an error class.
pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Config => 3,
        ErrorClass::Data => 4,
        ErrorClass::Numerical => 5,
    }
}

/// Runs a parsed command line, writing results to `out`.
pub fn run<W: Write + Send>(cli: &Cli, out: &mut W) -> Result<()> {
    match cli.threads {
        Some(n) => {
            ensure!(n >= 1, Config, "--threads must be at least 1");
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| dispatch(&cli.command, out))
        }
        None => dispatch(&cli.command, out),
    }
}

fn dispatch(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Validate(a) => cmd_validate(&Scenario::load(&a.load()?)?, out),
        Command::Risk(a) => cmd_risk(&Scenario::load(&a.load()?)?, out),
        Command::Sweep(a) => cmd_sweep(&Scenario::load(&a.load()?)?, out),
        Command::Topn(a) => cmd_topn(&Scenario::load(&a.load()?)?, out),
        Command::Loess(a) => cmd_loess(&Scenario::load(&a.load()?)?, out),
        Command::Bootstrap(a) => {
            let scenario = Scenario::load(&a.run.load()?)?;
            cmd_bootstrap(&scenario, a.statistic, a.out.as_deref(), out)
        }
        Command::Synth(a) => cmd_synth(a, out),
    }
}

/// Inputs of a run after loading and preprocessing.
pub struct Scenario {
    pub config: Config,
    pub units: Vec<GenUnit>,
    pub copt: DiscreteDistribution,
    pub series: PairedSeries,
    /// Demand rows read before alignment.
    pub demand_rows: usize,
    pub wind_rows: usize,
    pub scaling: ScalingFunction,
}

impl Scenario {
    pub fn load(config: &Config) -> Result<Scenario> {
        let d = &config.data;
        let units = load_units(&d.units)?;
        let copt = build_copt(&units, config.scenario.grid_step_mw).map_err(|e| Error::file(&d.units, e))?;
        let mut demand = ingest::load_demand(&d.demand)?;
        let demand_rows = demand.len();
        if d.halfhourly {
            demand = ingest::halfhourly_to_hourly(&demand).map_err(|e| Error::file(&d.demand, e))?;
        }
        let acs = ingest::load_acs(&d.acs)?;
        let demand = ingest::rescale_demand(&demand, &acs, config.scenario.acs_target_mw)
            .map_err(|e| Error::file(&d.acs, e))?;
        let demand = ingest::add_response_adjustment(&demand, config.scenario.response_adjustment_mw)?;
        let wind = ingest::load_wind(&d.wind)?;
        let wind_rows = wind.len();
        let series = ingest::align_and_block(&demand, &wind, &config.season_spec())?;
        Ok(Scenario {
            config: config.clone(),
            units,
            copt,
            series,
            demand_rows,
            wind_rows,
            scaling: config.scaling()?,
        })
    }

    pub fn model_kind(&self) -> ModelKind {
        self.config.scenario.model
    }

    pub fn n_periods(&self) -> usize {
        self.config.season_spec().hours_per_season()
    }

    pub fn capacities(&self) -> &[f64] {
        &self.config.scenario.installed_wind_mw
    }

    pub fn model(&self, demand_mw: &[f64], load_factor: &[f64], installed_mw: f64) -> Result<JointModel> {
        let wind = ingest::wind_to_capacity(load_factor, installed_mw)?;
        JointModel::build(self.model_kind(), demand_mw, &wind, Some(&self.scaling))
    }

    fn efc(&self, model: &JointModel, installed_mw: f64) -> Result<CapacityValueResult> {
        if installed_mw == 0.0 {
            let r = risk::lolp(&self.copt, model);
            return Ok(CapacityValueResult {
                metric: capvalue::Metric::Efc,
                value_mw: 0.0,
                value_pct_installed: None,
                target_risk: r,
                achieved_risk: r,
                iterations: 0,
                plateau_mw: 0.0,
            });
        }
        Ok(capvalue::efc(&self.copt, model, self.config.capvalue.tol_mw)?.with_installed(installed_mw))
    }

    fn bootstrap_spec(&self) -> BootstrapSpec {
        self.config.bootstrap_spec()
    }
}

#[derive(Serialize)]
struct WinterReport {
    winter_id: String,
    hours: usize,
    normal_blocks: usize,
    christmas_blocks: usize,
    wind_weeks: usize,
}

#[derive(Serialize)]
struct ValidationReport {
    demand_rows: usize,
    wind_rows: usize,
    paired_hours: usize,
    normal_blocks: usize,
    christmas_blocks: usize,
    wind_blocks: usize,
    winters: Vec<WinterReport>,
    units: usize,
    installed_conventional_mw: f64,
    copt_mean_mw: f64,
    copt_std_mw: f64,
    expected_available_mw: f64,
}

pub fn cmd_validate(s: &Scenario, out: &mut dyn Write) -> Result<()> {
    let series = &s.series;
    let mut winters = Vec::new();
    for (w, id) in series.winter_ids().iter().enumerate() {
        let blocks: Vec<_> = series.blocks().iter().filter(|b| b.winter == w).collect();
        let count = |k| blocks.iter().filter(|b| b.kind == k).count();
        winters.push(WinterReport {
            winter_id: id.clone(),
            hours: blocks.iter().map(|b| b.len).sum(),
            normal_blocks: count(BlockKind::Normal),
            christmas_blocks: count(BlockKind::Christmas),
            wind_weeks: count(BlockKind::Normal) + 2 * count(BlockKind::Christmas),
        });
    }
    let (mean, std) = s.copt.moments();
    let report = ValidationReport {
        demand_rows: s.demand_rows,
        wind_rows: s.wind_rows,
        paired_hours: series.len(),
        normal_blocks: series.block_count(BlockKind::Normal),
        christmas_blocks: series.block_count(BlockKind::Christmas),
        wind_blocks: series.weeks().len(),
        winters,
        units: s.units.len(),
        installed_conventional_mw: s.units.iter().map(|u| u.capacity_mw).sum(),
        copt_mean_mw: mean,
        copt_std_mw: std,
        expected_available_mw: s.units.iter().map(|u| u.capacity_mw * u.availability).sum(),
    };
    writeln!(out, "{}", to_json_pretty(&report)?)?;
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string(v).map_err(|e| Error::Numerical(e.to_string()))
}

fn to_json_pretty<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Numerical(e.to_string()))
}

pub fn cmd_risk(s: &Scenario, out: &mut dyn Write) -> Result<()> {
    for &c in s.capacities() {
        let model = s.model(s.series.demand_mw(), s.series.load_factor(), c)?;
        let r = risk::season_indices(&s.copt, &model, s.n_periods())?;
        writeln!(out, "{}", to_json(&r)?)?;
    }
    Ok(())
}

fn pct(v: Option<f64>) -> String {
    v.map(|p| format!("{p:.1}")).unwrap_or_default()
}

pub fn cmd_sweep(s: &Scenario, out: &mut dyn Write) -> Result<()> {
    let with_ci = s.config.bootstrap.enabled;
    let mut header = String::from("installed_mw,lole_hours,efc_mw,efc_pct_installed");
    if with_ci {
        header.push_str(",lole_ci_lo,lole_ci_hi,efc_ci_lo,efc_ci_hi");
    }
    writeln!(out, "{header}")?;
    let n_periods = s.n_periods() as f64;
    for &c in s.capacities() {
        let stat = |x: Sample<'_>| -> Result<Vec<f64>> {
            let model = s.model(x.demand_mw, x.load_factor, c)?;
            let lole = risk::lolp(&s.copt, &model) * n_periods;
            let efc = s.efc(&model, c)?;
            Ok(vec![lole, efc.value_mw])
        };
        let model = s.model(s.series.demand_mw(), s.series.load_factor(), c)?;
        let lole = risk::lolp(&s.copt, &model) * n_periods;
        let efc = s.efc(&model, c)?;
        let mut row = format!("{c},{lole},{},{}", efc.value_mw, pct(efc.value_pct_installed));
        if with_ci {
            let res = bootstrap_many(&s.series, &s.bootstrap_spec(), stat)?;
            for r in &res {
                row.push_str(&format!(",{},{}", r.ci_lo, r.ci_hi));
            }
            eprintln!(
                "installed {c} MW: |point - median| is {} h for LOLE and {} MW for EFC",
                (res[0].point_estimate - res[0].median()).abs(),
                (res[1].point_estimate - res[1].median()).abs()
            );
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

pub fn cmd_topn(s: &Scenario, out: &mut dyn Write) -> Result<()> {
    ensure!(
        s.model_kind() == ModelKind::Hindcast,
        Config,
        "topn needs the hindcast model, the scenario uses {}",
        s.model_kind()
    );
    writeln!(out, "installed_mw,n,share")?;
    let n_max = s.config.topn.n_max.min(s.series.len());
    for &c in s.capacities() {
        let model = s.model(s.series.demand_mw(), s.series.load_factor(), c)?;
        let curve = risk::top_n_curve(&s.copt, &model, n_max)?;
        for (i, share) in curve.iter().enumerate() {
            writeln!(out, "{c},{},{share}", i + 1)?;
        }
    }
    Ok(())
}

/// Daily-peak observations as `(normalized demand, load factor)`, in time
/// order. Demand is normalized net of the response adjustment.
pub fn daily_peaks(s: &Scenario) -> Vec<(f64, f64)> {
    let series = &s.series;
    let sc = &s.config.scenario;
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<(chrono::NaiveDate, usize)> = None;
    let flush = |best: usize, peaks: &mut Vec<(f64, f64)>| {
        let d = (series.demand_mw()[best] - sc.response_adjustment_mw) / sc.acs_target_mw;
        peaks.push((d, series.load_factor()[best]));
    };
    for (i, t) in series.timestamps().iter().enumerate() {
        let day = t.date_naive();
        current = match current {
            Some((d, best)) if d == day => {
                Some((d, if series.demand_mw()[i] > series.demand_mw()[best] { i } else { best }))
            }
            Some((_, best)) => {
                flush(best, &mut peaks);
                Some((day, i))
            }
            None => Some((day, i)),
        };
    }
    if let Some((_, best)) = current {
        flush(best, &mut peaks);
    }
    peaks
}

pub fn cmd_loess(s: &Scenario, out: &mut dyn Write) -> Result<()> {
    let cfg = &s.config.loess;
    let (x, y): (Vec<f64>, Vec<f64>) = daily_peaks(s)
        .into_iter()
        .filter(|&(d, _)| d > cfg.threshold_norm)
        .unzip();
    let fit = loess_fit(&x, &y, cfg.span).map_err(|e| {
        Error::Data(format!(
            "{} daily peaks above normalized demand {}: {e}",
            x.len(),
            cfg.threshold_norm
        ))
    })?;
    writeln!(out, "kind,demand_norm,observed_load_factor,loess_load_factor")?;
    for (&xi, &yi) in x.iter().zip(&y) {
        writeln!(out, "scatter,{xi},{yi},{}", fit.predict(xi))?;
    }
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m = cfg.grid_points;
    for k in 0..m {
        let g = lo + (hi - lo) * k as f64 / (m - 1) as f64;
        writeln!(out, "curve,{g},,{}", fit.predict(g))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BootstrapSummary {
    point: f64,
    ci_lo: f64,
    ci_hi: f64,
    level: f64,
    n_replicates: usize,
    seed: u64,
}

pub fn cmd_bootstrap(s: &Scenario, statistic: Statistic, csv_path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    ensure!(
        s.capacities().len() == 1,
        Config,
        "bootstrap runs at a single installed capacity, got {}",
        s.capacities().len()
    );
    let c = s.capacities()[0];
    let n_periods = s.n_periods() as f64;
    let spec = s.bootstrap_spec();
    let res: BootstrapResult = bootstrap_many(&s.series, &spec, |x| {
        let model = s.model(x.demand_mw, x.load_factor, c)?;
        Ok(vec![match statistic {
            Statistic::Lole => risk::lolp(&s.copt, &model) * n_periods,
            Statistic::Efc => s.efc(&model, c)?.value_mw,
        }])
    })?
    .pop()
    .unwrap();

    if let Some(path) = csv_path {
        let mut text = String::from("replicate,value\n");
        for (r, v) in res.replicates.iter().enumerate() {
            text.push_str(&format!("{r},{v}\n"));
        }
        std::fs::write(path, text).map_err(|e| Error::file(path, e))?;
    }
    let summary = BootstrapSummary {
        point: res.point_estimate,
        ci_lo: res.ci_lo,
        ci_hi: res.ci_hi,
        level: spec.ci_level,
        n_replicates: spec.n_replicates,
        seed: spec.seed,
    };
    writeln!(out, "{}", to_json(&summary)?)?;
    Ok(())
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let mut params = synth::SynthParams::default();
    if let Some(seed) = args.seed {
        params.seed = seed;
    }
    let data = synth::generate(&params)?;
    synth::write_fixture(&data, &args.out)?;
    writeln!(out, "wrote synthetic fixture to {}", args.out.display())?;
    Ok(())
}
