//! Scenario execution and artifact layout.
//!
//! A design run writes `sequence.csv`, `metrics.json`, `lags.csv` and
//! `trace.csv`; a set run writes `members/member_NNN.csv` (with a `_lags.csv`
//! per member), `ccp.csv` and `set.json`. Everything except `timing.json` is
//! a pure function of the scenario, so repeated runs are byte-identical.

use std::path::{Path, PathBuf};
use std::time::Instant;

use pslseq::{
    autocorrelation, compute_metrics, design, generate_set, welch_audit, CcpStats, ComplexSequence, Constraint,
    DesignResult, MetricsReport, SolverConfig, WaveformSet, WelchAudit,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::io::{export_sequence, import_sequence, lag_table, to_json, trace_table, write_file};
use crate::scenario::Scenario;

/// The scalar part of a [`MetricsReport`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub n: usize,
    pub q: usize,
    pub psl: f64,
    pub isl: f64,
    pub window_psl: f64,
    pub mpcl: f64,
    pub mpcl_db: f64,
    pub pcl_db: f64,
    /// `null` in JSON when the window is exactly zero.
    pub mmf: f64,
    pub energy: f64,
    pub peak_amplitude: f64,
}

impl MetricsSummary {
    pub fn new(x: &ComplexSequence, m: &MetricsReport) -> Self {
        Self {
            n: x.len(),
            q: m.q,
            psl: m.psl,
            isl: m.isl,
            window_psl: m.window_psl,
            mpcl: m.mpcl,
            mpcl_db: pslseq::metrics::to_db(m.mpcl),
            pcl_db: m.pcl_db,
            mmf: m.mmf,
            energy: x.energy(),
            peak_amplitude: x.peak_amplitude(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    scenario: &'a str,
    config: &'a SolverConfig,
    converged: bool,
    iterations_used: usize,
    best_iteration: usize,
    initial: MetricsSummary,
    metrics: MetricsSummary,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing {
    seconds: f64,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub config: SolverConfig,
    pub result: DesignResult,
    pub seconds: f64,
}

fn design_warnings(result: &DesignResult, config: &SolverConfig) -> Vec<String> {
    let mut w = Vec::new();
    if !result.converged && config.max_iterations > 0 {
        w.push(format!(
            "did not converge within {} iterations (epsilon {:e})",
            config.max_iterations, config.epsilon
        ));
    }
    w
}

/// Runs a single-sequence scenario and writes its artifacts to `out_dir`.
pub fn run_design(scenario: &Scenario, out_dir: &Path) -> CliResult<RunOutcome> {
    if scenario.is_set() {
        return Err(CliError::validation("set", "set scenarios run through gen-set"));
    }
    let config = scenario.solver_config()?;
    let start = Instant::now();
    let result = design(&config)?;
    let seconds = start.elapsed().as_secs_f64();

    let init = config.init.build(config.n)?;
    let report = RunReport {
        scenario: &scenario.name,
        config: &config,
        converged: result.converged,
        iterations_used: result.iterations_used,
        best_iteration: result.best_iteration,
        initial: MetricsSummary::new(&init, &result.initial_metrics),
        metrics: MetricsSummary::new(&result.sequence, &result.metrics),
        warnings: design_warnings(&result, &config),
    };
    export_sequence(&result.sequence, &out_dir.join("sequence.csv"))?;
    write_file(&out_dir.join("metrics.json"), to_json(&report)?)?;
    write_file(&out_dir.join("lags.csv"), lag_table(&result.metrics))?;
    write_file(&out_dir.join("trace.csv"), trace_table(&result.trace))?;
    write_file(&out_dir.join("timing.json"), to_json(&Timing { seconds })?)?;
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        config,
        result,
        seconds,
    })
}

#[derive(Debug, Serialize)]
struct StatsSummary {
    mean: f64,
    max: f64,
    min: f64,
    mean_normalized: f64,
    mean_db: f64,
    max_db: f64,
}

impl From<&CcpStats> for StatsSummary {
    fn from(s: &CcpStats) -> Self {
        Self {
            mean: s.mean,
            max: s.max,
            min: s.min,
            mean_normalized: s.mean_normalized,
            mean_db: s.mean_db,
            max_db: s.max_db,
        }
    }
}

#[derive(Debug, Serialize)]
struct MemberSummary {
    member: usize,
    seed: f64,
    converged: bool,
    iterations_used: usize,
    metrics: MetricsSummary,
}

#[derive(Debug, Serialize)]
struct SetReport<'a> {
    scenario: &'a str,
    config: &'a SolverConfig,
    m: usize,
    seeds: &'a [f64],
    members: Vec<MemberSummary>,
    /// Cross-correlation of the designed members.
    stats: StatsSummary,
    /// Cross-correlation of the chaotic initializations.
    initial_stats: StatsSummary,
    welch: WelchAudit,
    warnings: Vec<String>,
}

#[derive(Debug)]
pub struct SetOutcome {
    pub out_dir: PathBuf,
    pub config: SolverConfig,
    pub seeds: Vec<f64>,
    pub set: WaveformSet,
    pub audit: WelchAudit,
    pub seconds: f64,
}

/// Generates the waveform set of a set scenario and writes its artifacts.
pub fn run_set(scenario: &Scenario, out_dir: &Path) -> CliResult<SetOutcome> {
    let seeds = scenario.set_seeds()?;
    let config = scenario.solver_config()?;
    let m = seeds.len();
    let start = Instant::now();
    let set = generate_set(m, config.n, config.q, &config, &seeds)?;
    let audit = welch_audit(&set.members, config.constraint == Constraint::Unimodular)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut warnings = Vec::new();
    let members_dir = out_dir.join("members");
    let mut members = Vec::with_capacity(m);
    for (i, (x, run)) in set.members.iter().zip(&set.runs).enumerate() {
        export_sequence(x, &members_dir.join(format!("member_{i:03}.csv")))?;
        write_file(&members_dir.join(format!("member_{i:03}_lags.csv")), lag_table(&run.metrics))?;
        if !run.converged && config.max_iterations > 0 {
            warnings.push(format!("member {i} did not converge within {} iterations", config.max_iterations));
        }
        members.push(MemberSummary {
            member: i,
            seed: run.seed,
            converged: run.converged,
            iterations_used: run.iterations_used,
            metrics: MetricsSummary::new(x, &run.metrics),
        });
    }
    let report = SetReport {
        scenario: &scenario.name,
        config: &config,
        m,
        seeds: &seeds,
        members,
        stats: (&set.stats).into(),
        initial_stats: (&set.initial_stats).into(),
        welch: audit,
        warnings,
    };
    let mut ccp = String::from("i,j,ccp,ccp_initial\n");
    for i in 0..m {
        for j in i + 1..m {
            ccp.push_str(&format!("{i},{j},{},{}\n", set.stats.matrix[i][j], set.initial_stats.matrix[i][j]));
        }
    }
    write_file(&out_dir.join("ccp.csv"), ccp)?;
    write_file(&out_dir.join("set.json"), to_json(&report)?)?;
    write_file(&out_dir.join("timing.json"), to_json(&Timing { seconds })?)?;
    Ok(SetOutcome {
        out_dir: out_dir.to_path_buf(),
        config,
        seeds,
        set,
        audit,
        seconds,
    })
}

#[derive(Debug, Serialize)]
struct FileMetrics<'a> {
    file: &'a Path,
    metrics: MetricsSummary,
}

/// Metrics of a sequence file. With `out_dir`, also writes `metrics.json`
/// and `lags.csv` there. Returns the JSON document.
pub fn file_metrics(path: &Path, q: usize, out_dir: Option<&Path>) -> CliResult<String> {
    let x = import_sequence(path)?;
    let m = compute_metrics(&autocorrelation(&x), q)?;
    let json = to_json(&FileMetrics {
        file: path,
        metrics: MetricsSummary::new(&x, &m),
    })?;
    if let Some(dir) = out_dir {
        write_file(&dir.join("metrics.json"), &json)?;
        write_file(&dir.join("lags.csv"), lag_table(&m))?;
    }
    Ok(json)
}
