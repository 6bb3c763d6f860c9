//! End-to-end pipelines behind the CLI: sample, assemble, solve, evaluate,
//! and write CSV reports.
//!
//! Reports are plain CSV with full-precision (`%.17e`) numeric fields, so two
//! runs with the same configuration and seed produce identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assembly::{assemble_system, augment_inverse};
use crate::cases::{evaluation_grid, get_case, list_cases, CaseSpec};
use crate::diagnostics::{
    self, relative_l2, sweep_to_csv, training_mse, BetaSpectrum, GffConfig, IterationRecord,
    RefineOptions, SweepEntry,
};
use crate::error::{Error, Result};
use crate::feature::FeatureLayer;
use crate::lstsq::{default_rcond, solve_with_options, SolveOptions};
use crate::sampling::{collocate, sample_interior, InteriorSampling, SamplingPlan};

/// Which hidden layer(s) to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gff,
    Vanilla,
    Both,
}

impl Method {
    fn runs_gff(self) -> bool {
        matches!(self, Method::Gff | Method::Both)
    }
    fn runs_vanilla(self) -> bool {
        matches!(self, Method::Vanilla | Method::Both)
    }
}

/// Preset sizes for the full benchmark sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Reduced size for quick runs: 1000 neurons, 2000 interior points,
    /// 200 points per condition.
    Desk,
    /// Published setting: per-case registry defaults.
    Paper,
}

/// One run request. Unset fields fall back to the case registry defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub case: String,
    pub method: Method,
    pub neurons: Option<usize>,
    pub n_interior: Option<usize>,
    pub n_boundary: Option<usize>,
    pub n_initial: Option<usize>,
    pub delta1: Option<f64>,
    pub delta_m: Option<f64>,
    pub half_width: Option<f64>,
    pub rcond: Option<f64>,
    pub ridge: Option<f64>,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    /// Run the frequency-interval refinement loop for the cosine layer.
    pub tune: bool,
    pub max_iterations: usize,
    pub bins: usize,
    pub threshold_ratio: f64,
    pub margin: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: String::new(),
            method: Method::Gff,
            neurons: None,
            n_interior: None,
            n_boundary: None,
            n_initial: None,
            delta1: None,
            delta_m: None,
            half_width: None,
            rcond: None,
            ridge: None,
            seed: 0,
            output_dir: None,
            tune: false,
            max_iterations: 2,
            bins: diagnostics::DEFAULT_BINS,
            threshold_ratio: diagnostics::DEFAULT_THRESHOLD_RATIO,
            margin: diagnostics::DEFAULT_MARGIN,
        }
    }
}

impl RunConfig {
    pub fn for_case(case: &str) -> Self {
        Self {
            case: case.into(),
            ..Self::default()
        }
    }
}

/// Fully resolved knobs actually used by a run; echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub case: String,
    pub method: Method,
    pub neurons: usize,
    pub n_interior: usize,
    pub n_boundary: usize,
    pub n_initial: usize,
    pub interior_mode: InteriorSampling,
    pub delta1: f64,
    pub delta_m: f64,
    pub half_width: f64,
    pub rcond: Option<f64>,
    pub ridge: Option<f64>,
    pub seed: u64,
    pub tune: bool,
    pub max_iterations: usize,
    pub bins: usize,
    pub threshold_ratio: f64,
    pub margin: f64,
}

/// Per-method numbers of one run.
#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: &'static str,
    pub initialization: String,
    pub mse: f64,
    pub relative_l2: Option<f64>,
    pub max_abs_error: Option<f64>,
    pub assemble_seconds: f64,
    pub solve_seconds: f64,
    pub effective_rank: usize,
    pub sigma_max: f64,
    pub recovered_alpha: Option<f64>,
    pub warnings: Vec<String>,
}

/// Everything one `run_case` produced.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub config: ResolvedConfig,
    pub methods: Vec<MethodReport>,
    /// Present when the refinement loop ran.
    pub iteration_trail: Option<Vec<IterationRecord>>,
}

/// Resolves a config against the registry defaults.
fn resolve(config: &RunConfig, case: &CaseSpec) -> ResolvedConfig {
    ResolvedConfig {
        case: case.name.into(),
        method: config.method,
        neurons: config.neurons.unwrap_or(case.neurons_default),
        n_interior: config.n_interior.unwrap_or(case.plan_counts.0),
        n_boundary: config.n_boundary.unwrap_or(case.plan_counts.1),
        n_initial: config.n_initial.unwrap_or(case.plan_counts.2),
        interior_mode: case.interior_mode,
        delta1: config.delta1.unwrap_or(case.gff_delta.0),
        delta_m: config.delta_m.unwrap_or(case.gff_delta.1),
        half_width: config.half_width.unwrap_or(case.vanilla_l),
        rcond: config.rcond,
        ridge: config.ridge,
        seed: config.seed,
        tune: config.tune,
        max_iterations: config.max_iterations,
        bins: config.bins,
        threshold_ratio: config.threshold_ratio,
        margin: config.margin,
    }
}

fn plan_of(rc: &ResolvedConfig) -> SamplingPlan {
    SamplingPlan::new(rc.n_interior, rc.n_boundary, rc.n_initial, rc.seed)
        .with_interior(rc.interior_mode)
}

/// Evaluates the trained network on a list of points.
pub fn predict(layer: &FeatureLayer, beta: &Array1<f64>, points: &[Vec<f64>]) -> Vec<f64> {
    let m = layer.neurons();
    points
        .par_iter()
        .map(|p| {
            let row = layer.row(p).expect("grid point dimension");
            (0..m).map(|j| row[j] * beta[j]).sum()
        })
        .collect()
}

/// Stream tag for the labelled-data draw of inverse problems.
const DATA_SEED_TAG: u64 = 0xDA7A;

/// Labelled interior samples for an inverse case, drawn from a dedicated
/// seed stream and valued by the exact solution (noiseless).
pub fn inverse_data(case: &CaseSpec, seed: u64) -> Result<Vec<(Vec<f64>, f64)>> {
    let meta = case.inverse.ok_or_else(|| {
        Error::InvalidParameter(format!("case {} is not an inverse problem", case.name))
    })?;
    let exact = case
        .problem
        .exact_solution
        .as_ref()
        .expect("inverse cases carry exact solutions");
    let pts = sample_interior(
        &case.problem.domain,
        meta.n_data,
        diagnostics::derive_seed(seed, DATA_SEED_TAG),
    )?;
    Ok(pts.into_iter().map(|p| (p.clone(), exact.eval(&p))).collect())
}

struct MethodOutcome {
    report: MethodReport,
    layer: FeatureLayer,
    beta: Array1<f64>,
}

fn run_method(
    case: &CaseSpec,
    rc: &ResolvedConfig,
    colloc: &crate::sampling::CollocationSet,
    gff: bool,
) -> Result<MethodOutcome> {
    let t0 = Instant::now();
    let dim = case.problem.domain.dim();
    let layer = if gff {
        FeatureLayer::gff(rc.neurons, dim, rc.delta1, rc.delta_m, rc.seed)
    } else {
        FeatureLayer::vanilla(rc.neurons, dim, rc.half_width, rc.seed)
    }
    .map_err(|e| e.in_stage("layer"))?;

    let mut system =
        assemble_system(&case.problem, &layer, colloc).map_err(|e| e.in_stage("assemble"))?;
    let mut warnings = colloc.warnings.clone();
    if case.inverse.is_some() {
        let data = inverse_data(case, rc.seed).map_err(|e| e.in_stage("augment"))?;
        if data.is_empty() {
            warnings.push("inverse problem with no labelled data".into());
        }
        system = augment_inverse(&system, &case.problem, &layer, &data)
            .map_err(|e| e.in_stage("augment"))?;
    }
    let assemble_seconds = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let rcond = rc
        .rcond
        .unwrap_or_else(|| default_rcond(system.rows(), system.cols()));
    let mut opts = SolveOptions::new(rcond);
    opts.ridge = rc.ridge;
    let sol =
        solve_with_options(&system.h, &system.y, &opts).map_err(|e| e.in_stage("solve"))?;
    let solve_seconds = t1.elapsed().as_secs_f64();

    let mse = training_mse(&system.h, &sol.beta, &system.y);
    let recovered_alpha = case.inverse.map(|_| sol.beta[sol.beta.len() - 1]);

    let (l2, max_err) = match case.problem.exact_solution.as_ref() {
        Some(exact) => {
            let grid = evaluation_grid(&case.problem.domain);
            let exact_vals: Vec<f64> = grid.iter().map(|p| exact.eval(p)).collect();
            let pred = predict(&layer, &sol.beta, &grid);
            (
                Some(relative_l2(&exact_vals, &pred).map_err(|e| e.in_stage("evaluate"))?),
                Some(diagnostics::max_abs_error(&exact_vals, &pred)),
            )
        }
        None => (None, None),
    };

    if gff {
        let spectrum = BetaSpectrum::new(layer.delta(), &sol.beta, rc.bins)
            .map_err(|e| e.in_stage("evaluate"))?;
        let imbalance = spectrum.imbalance();
        if imbalance > 1e6 {
            warnings.push(format!(
                "output-weight imbalance max/median = {imbalance:.2e}; the frequency \
                 interval may be too narrow"
            ));
        }
    }

    Ok(MethodOutcome {
        report: MethodReport {
            method: if gff { "gff" } else { "vanilla" },
            initialization: if gff {
                format!("delta in [{}, {}]", rc.delta1, rc.delta_m)
            } else {
                format!("L = {}", rc.half_width)
            },
            mse,
            relative_l2: l2,
            max_abs_error: max_err,
            assemble_seconds,
            solve_seconds,
            effective_rank: sol.effective_rank,
            sigma_max: sol.sigma_max,
            recovered_alpha,
            warnings,
        },
        layer,
        beta: sol.beta,
    })
}

/// Runs one case end to end and writes its reports under
/// `config.output_dir` (when set).
pub fn run_case(config: &RunConfig) -> Result<SolveReport> {
    let case = get_case(&config.case)?;
    let rc = resolve(config, &case);
    let plan = plan_of(&rc);
    let colloc = collocate(&case.problem, &plan).map_err(|e| e.in_stage("sample"))?;

    let mut methods = Vec::new();
    let mut outputs: Vec<(String, String)> = Vec::new(); // (file name, content)
    let mut trail = None;

    if rc.method.runs_gff() {
        if rc.tune {
            let refine_opts = RefineOptions {
                bins: rc.bins,
                threshold_ratio: rc.threshold_ratio,
                margin: rc.margin,
                rcond: rc.rcond,
            };
            let exact = case.problem.exact_solution.clone();
            let grid = evaluation_grid(&case.problem.domain);
            let exact_vals: Option<Vec<f64>> =
                exact.map(|e| grid.iter().map(|p| e.eval(p)).collect());
            let records = diagnostics::refine_and_resolve(
                &case.problem,
                GffConfig {
                    neurons: rc.neurons,
                    delta1: rc.delta1,
                    delta_m: rc.delta_m,
                    seed: rc.seed,
                },
                &plan,
                &refine_opts,
                rc.max_iterations,
                |layer, beta| {
                    exact_vals.as_ref().and_then(|ev| {
                        relative_l2(ev, &predict(layer, beta, &grid)).ok()
                    })
                },
            )
            .map_err(|e| e.in_stage("tune"))?;
            outputs.push(("tune_trail.csv".into(), trail_to_csv(&records)));
            trail = Some(records);
        }
        let outcome = run_method(&case, &rc, &colloc, true)?;
        let spectrum = BetaSpectrum::new(outcome.layer.delta(), &outcome.beta, rc.bins)
            .map_err(|e| e.in_stage("evaluate"))?;
        let suffix = if rc.method == Method::Both { "_gff" } else { "" };
        outputs.push((format!("beta_vs_delta{suffix}.csv"), spectrum.to_csv()));
        if case.problem.exact_solution.is_some() {
            outputs.push((
                format!("prediction_grid{suffix}.csv"),
                prediction_csv(&case, &outcome.layer, &outcome.beta),
            ));
        }
        methods.push(outcome.report);
    }
    if rc.method.runs_vanilla() {
        let outcome = run_method(&case, &rc, &colloc, false)?;
        let suffix = if rc.method == Method::Both { "_vanilla" } else { "" };
        if case.problem.exact_solution.is_some() {
            outputs.push((
                format!("prediction_grid{suffix}.csv"),
                prediction_csv(&case, &outcome.layer, &outcome.beta),
            ));
        }
        methods.push(outcome.report);
    }

    let report = SolveReport {
        config: rc,
        methods,
        iteration_trail: trail,
    };
    outputs.push(("report.csv".into(), report_csv(&report)));

    if let Some(dir) = &config.output_dir {
        write_outputs(dir, &outputs).map_err(|e| e.in_stage("write"))?;
    }
    Ok(report)
}

/// Writes files atomically as a set: on any failure every file written so
/// far is removed again.
fn write_outputs(dir: &Path, outputs: &[(String, String)]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, content) in outputs {
        let path = dir.join(name);
        match std::fs::write(&path, content) {
            Ok(()) => written.push(path),
            Err(e) => {
                for p in written {
                    let _ = std::fs::remove_file(p);
                }
                return Err(e.into());
            }
        }
    }
    Ok(())
}

fn coordinate_names(dim: usize, has_time: bool) -> Vec<&'static str> {
    match (dim, has_time) {
        (1, false) => vec!["x"],
        (2, true) => vec!["x", "t"],
        (2, false) => vec!["x", "y"],
        (3, true) => vec!["x", "y", "t"],
        _ => vec!["v0", "v1", "v2", "v3"],
    }
}

fn prediction_csv(case: &CaseSpec, layer: &FeatureLayer, beta: &Array1<f64>) -> String {
    let domain = &case.problem.domain;
    let grid = evaluation_grid(domain);
    let exact = case.problem.exact_solution.as_ref().expect("exact");
    let pred = predict(layer, beta, &grid);
    let names = coordinate_names(domain.dim(), domain.time().is_some());
    let mut out = String::new();
    out.push_str(&names[..domain.dim()].join(","));
    out.push_str(",exact,predicted,abs_error\n");
    for (p, pr) in grid.iter().zip(&pred) {
        let e = exact.eval(p);
        for c in p {
            let _ = write!(out, "{c:.17e},");
        }
        let _ = writeln!(out, "{e:.17e},{pr:.17e},{:.17e}", (e - pr).abs());
    }
    out
}

fn trail_to_csv(records: &[IterationRecord]) -> String {
    let mut out =
        String::from("iteration,delta1,delta_m,mse,l2,flag,suggested_delta1,suggested_delta_m\n");
    for (i, r) in records.iter().enumerate() {
        let l2 = r
            .relative_l2
            .map_or_else(|| "nan".into(), |v| format!("{v:.17e}"));
        let _ = writeln!(
            out,
            "{i},{:.17e},{:.17e},{:.17e},{l2},{:?},{:.17e},{:.17e}",
            r.delta1, r.delta_m, r.mse, r.flag, r.suggested_delta1, r.suggested_delta_m
        );
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), |x| format!("{x:.17e}"))
}

const REPORT_HEADER: &str = "case,method,neurons,initialization,n_interior,n_boundary,\
    n_initial,interior_mode,seed,rcond,ridge,bins,threshold_ratio,margin,mse,l2,\
    max_abs_error,assemble_seconds,solve_seconds,effective_rank,alpha,warnings\n";

fn report_row(cfg: &ResolvedConfig, m: &MethodReport) -> String {
    format!(
        "{},{},{},\"{}\",{},{},{},{:?},{},{},{},{},{:e},{},{:.17e},{},{},{:.3},{:.3},{},{},\"{}\"\n",
        cfg.case,
        m.method,
        cfg.neurons,
        m.initialization,
        cfg.n_interior,
        cfg.n_boundary,
        cfg.n_initial,
        cfg.interior_mode,
        cfg.seed,
        cfg.rcond.map_or_else(|| "auto".into(), |r| format!("{r:e}")),
        cfg.ridge.map_or_else(|| "none".into(), |r| format!("{r:e}")),
        cfg.bins,
        cfg.threshold_ratio,
        cfg.margin,
        m.mse,
        opt(m.relative_l2),
        opt(m.max_abs_error),
        m.assemble_seconds,
        m.solve_seconds,
        m.effective_rank,
        opt(m.recovered_alpha),
        m.warnings.join("; ")
    )
}

fn report_csv(report: &SolveReport) -> String {
    let mut out = String::from(REPORT_HEADER);
    for m in &report.methods {
        out.push_str(&report_row(&report.config, m));
    }
    out
}

/// One row of the benchmark summary table.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub case: String,
    pub method: &'static str,
    pub initialization: String,
    pub mse: Option<f64>,
    pub relative_l2: Option<f64>,
    pub seconds: f64,
    pub error: Option<String>,
}

/// Runs every registry case with both layers at the requested scale and
/// writes `table1_summary.csv`. Per-case failures become summary rows; the
/// sweep itself keeps going.
pub fn run_table1(scale: Scale, output_dir: Option<&Path>, base_seed: u64) -> Result<Vec<SummaryRow>> {
    let mut rows = Vec::new();
    for (idx, name) in list_cases().into_iter().enumerate() {
        let case = get_case(name)?;
        let seed = diagnostics::derive_seed(base_seed, idx as u64);
        let mut config = RunConfig::for_case(name);
        config.method = Method::Both;
        config.seed = seed;
        if scale == Scale::Desk {
            config.neurons = Some(1000);
            config.n_interior = Some(2000);
            config.n_boundary = Some(200);
            config.n_initial = Some(200);
        }
        let t0 = Instant::now();
        match run_case(&config) {
            Ok(report) => {
                for m in &report.methods {
                    rows.push(SummaryRow {
                        case: name.into(),
                        method: m.method,
                        initialization: m.initialization.clone(),
                        mse: Some(m.mse),
                        relative_l2: m.relative_l2,
                        seconds: m.assemble_seconds + m.solve_seconds,
                        error: None,
                    });
                }
                let _ = &case;
            }
            Err(e) => rows.push(SummaryRow {
                case: name.into(),
                method: "both",
                initialization: String::new(),
                mse: None,
                relative_l2: None,
                seconds: t0.elapsed().as_secs_f64(),
                error: Some(e.to_string()),
            }),
        }
    }
    if let Some(dir) = output_dir {
        let mut out = String::from("case,method,initialization,mse,l2,seconds,error\n");
        for r in &rows {
            let _ = writeln!(
                out,
                "{},{},\"{}\",{},{},{:.3},\"{}\"",
                r.case,
                r.method,
                r.initialization,
                opt(r.mse),
                opt(r.relative_l2),
                r.seconds,
                r.error.clone().unwrap_or_default()
            );
        }
        write_outputs(dir, &[("table1_summary.csv".into(), out)])?;
    }
    Ok(rows)
}

/// Half-width sweep for one case's tanh baseline; writes `l_sweep.csv`.
pub fn run_sweep(
    case_name: &str,
    l_values: &[f64],
    config: &RunConfig,
) -> Result<Vec<SweepEntry>> {
    let case = get_case(case_name)?;
    let rc = resolve(config, &case);
    let plan = plan_of(&rc);
    let exact = case.problem.exact_solution.clone();
    let grid = evaluation_grid(&case.problem.domain);
    let exact_vals: Option<Vec<f64>> = exact.map(|e| grid.iter().map(|p| e.eval(p)).collect());
    let entries = diagnostics::sweep_vanilla_half_width(
        &case.problem,
        &plan,
        rc.neurons,
        l_values,
        rc.seed,
        rc.rcond,
        |layer, beta| {
            exact_vals
                .as_ref()
                .and_then(|ev| relative_l2(ev, &predict(layer, beta, &grid)).ok())
        },
    )?;
    if let Some(dir) = &config.output_dir {
        write_outputs(dir, &[("l_sweep.csv".into(), sweep_to_csv(&entries))])
            .map_err(|e| e.in_stage("write"))?;
    }
    Ok(entries)
}
