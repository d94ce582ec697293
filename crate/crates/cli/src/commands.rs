//! The batch commands behind the `respat` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use respat::composition::evaluate_system;
use respat::patterns::{EvalOptions, TimeKind};
use respat::sim::{empirical_reliability, run_ensemble, run_trial_traced, trial_seed, EnsembleStats};
use respat::Convention;

use crate::config::{ConfigDocument, PatternSection, PolicySection, RollForwardMode};
use crate::error::CliError;
use crate::report::{Cell, ReportDocument};
use crate::sweep::apply_point;

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Overrides the document's convention when set.
    pub convention: Option<Convention>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads for simulation. `None` uses the global pool.
    pub workers: Option<usize>,
    /// Where to write a JSON-lines event trace of trial 0 of every point.
    pub trace: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            convention: None,
            trials: 10_000,
            seed: 42,
            workers: None,
            trace: None,
        }
    }
}

impl RunOptions {
    fn convention(&self, doc: &ConfigDocument) -> Convention {
        self.convention.unwrap_or(doc.convention)
    }

    fn eval_options(&self, doc: &ConfigDocument) -> EvalOptions {
        EvalOptions {
            convention: self.convention(doc),
            reconfig_mode: doc.reconfiguration_mode,
        }
    }
}

struct Point {
    value: Option<f64>,
    doc: Result<ConfigDocument, CliError>,
}

fn points(doc: &ConfigDocument) -> Vec<Point> {
    match &doc.sweep {
        None => vec![Point {
            value: None,
            doc: Ok(doc.clone()),
        }],
        Some(sw) => match sw.resolve(doc) {
            Ok(grid) => grid
                .into_iter()
                .map(|v| Point {
                    value: Some(v),
                    doc: apply_point(doc, &sw.parameter, v),
                })
                .collect(),
            Err(errors) => vec![Point {
                value: None,
                doc: Err(CliError::Validation(errors)),
            }],
        },
    }
}

/// Leading columns shared by every command.
fn lead_columns(doc: &ConfigDocument) -> Vec<String> {
    let mut cols = vec!["point".to_string()];
    if let Some(sw) = &doc.sweep {
        cols.push(sw.parameter.clone());
    }
    cols
}

fn lead_cells(doc: &ConfigDocument, i: usize, p: &Point) -> Vec<Cell> {
    let mut row = vec![Cell::Int(i as u64)];
    if doc.sweep.is_some() {
        row.push(Cell::opt(p.value));
    }
    row
}

/// Fills an error row: empty cells, then the message in the last column.
fn error_row(mut row: Vec<Cell>, width: usize, msg: String) -> Vec<Cell> {
    row.resize(width - 1, Cell::Empty);
    row.push(Cell::Text(msg.replace('\n', " ")));
    row
}

fn push_unique(diags: &mut Vec<String>, d: String) {
    if !diags.contains(&d) {
        diags.push(d);
    }
}

fn in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
        return Ok(pool.install(f));
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
    Ok(f())
}

fn report(doc: &ConfigDocument, command: &str, opts: &RunOptions, simulated: bool) -> ReportDocument {
    ReportDocument {
        toolkit: crate::report::TOOLKIT,
        report_schema: crate::report::REPORT_SCHEMA,
        command: command.to_string(),
        convention: opts.convention(doc),
        master_seed: simulated.then_some(opts.seed),
        trials: simulated.then_some(opts.trials),
        config: doc.clone(),
        columns: Vec::new(),
        rows: Vec::new(),
        diagnostics: Vec::new(),
    }
}

/// Analytic evaluation of the system, one row per sweep point.
///
/// Columns: `point`, the swept parameter (if any), `eval_time`,
/// `system_reliability`, `total_overhead`, then `<name>.time_estimate`,
/// `<name>.time_kind`, `<name>.reliability` per component, then `error`.
pub fn cmd_eval(doc: &ConfigDocument, opts: &RunOptions) -> Result<ReportDocument, CliError> {
    let mut rep = report(doc, "eval", opts, false);
    let mut cols = lead_columns(doc);
    cols.extend(["eval_time", "system_reliability", "total_overhead"].map(String::from));
    for c in &doc.system.components {
        for field in ["time_estimate", "time_kind", "reliability"] {
            cols.push(format!("{}.{field}", c.name));
        }
    }
    cols.push("error".into());
    let width = cols.len();

    let pts = points(doc);
    let eval_one = |p: &Point| -> Result<respat::composition::EvaluationReport, CliError> {
        let d = p.doc.as_ref().map_err(|e| CliError::Validation(vec![e.to_string()]))?;
        let system = d.system_model()?;
        Ok(evaluate_system(&system, d.eval_time(), opts.eval_options(d))?)
    };
    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        in_pool(opts.workers, || pts.par_iter().map(eval_one).collect())?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = pts.iter().map(eval_one).collect();

    for (i, (p, res)) in pts.iter().zip(results).enumerate() {
        let mut row = lead_cells(doc, i, p);
        match res {
            Ok(r) => {
                row.push(Cell::Num(r.eval_time));
                row.push(Cell::Num(r.system_reliability.value()));
                row.push(Cell::Num(r.total_overhead));
                for c in &r.per_component {
                    row.push(Cell::Num(c.output.time_estimate));
                    row.push(Cell::Text(time_kind(c.output.time_kind).into()));
                    row.push(Cell::opt(c.output.reliability.map(|p| p.value())));
                }
                row.push(Cell::Empty);
                for d in r.diagnostics {
                    push_unique(&mut rep.diagnostics, d);
                }
            }
            Err(e) => row = error_row(row, width, error_text(&e)),
        }
        rep.rows.push(row);
    }
    rep.columns = cols;
    Ok(rep)
}

fn time_kind(k: TimeKind) -> &'static str {
    match k {
        TimeKind::Time => "time",
        TimeKind::Ratio => "ratio",
    }
}

fn error_text(e: &CliError) -> String {
    match e {
        CliError::Validation(v) => v.join("; "),
        CliError::Runtime(s) | CliError::Usage(s) => s.clone(),
        other => other.to_string(),
    }
}

fn require_scenario(doc: &ConfigDocument, command: &str) -> Result<(), CliError> {
    if doc.scenario.is_none() {
        return Err(CliError::Usage(format!(
            "`{command}` needs a [scenario] section in the config"
        )));
    }
    Ok(())
}

fn report_times(doc: &ConfigDocument) -> Vec<f64> {
    doc.scenario
        .as_ref()
        .map(|s| s.report_times.clone())
        .unwrap_or_default()
}

fn simulate_point(doc: &Result<ConfigDocument, CliError>, opts: &RunOptions) -> Result<EnsembleStats, CliError> {
    let d = doc.as_ref().map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    let scenario = d
        .sim_scenario()
        .ok_or_else(|| CliError::Usage("missing [scenario] section".into()))??;
    Ok(run_ensemble(&scenario, opts.trials, opts.seed)?)
}

fn write_trace(pts: &[Point], opts: &RunOptions) -> Result<(), CliError> {
    let Some(path) = &opts.trace else {
        return Ok(());
    };
    let mut out = BufWriter::new(File::create(path)?);
    let seed = trial_seed(opts.seed, 0);
    for (i, p) in pts.iter().enumerate() {
        let Ok(d) = &p.doc else { continue };
        let Some(Ok(scenario)) = d.sim_scenario() else {
            continue;
        };
        let mut lines = Vec::new();
        run_trial_traced(&scenario, seed, &mut |ev| {
            lines.push(serde_json::json!({
                "point": i,
                "trial": 0,
                "seed": seed,
                "time": ev.time,
                "kind": ev.kind,
                "detail": ev.detail,
            }))
        })?;
        for l in lines {
            writeln!(out, "{l}")?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Monte Carlo ensemble statistics, one row per sweep point.
///
/// Every point uses the same master seed, so sweep points share random
/// streams and differences between rows are not seed noise.
///
/// Columns: `point`, the swept parameter (if any), `completed_fraction`,
/// `mean_time`, `mean_time_se`, `mean_events`, `mean_wasted_work`, then
/// `reliability@t`, `reliability_se@t`, `completed_by@t` for every report
/// time, then `error`.
pub fn cmd_simulate(doc: &ConfigDocument, opts: &RunOptions) -> Result<ReportDocument, CliError> {
    require_scenario(doc, "simulate")?;
    check_trials(opts)?;
    let mut rep = report(doc, "simulate", opts, true);
    let times = report_times(doc);
    let mut cols = lead_columns(doc);
    cols.extend(
        [
            "completed_fraction",
            "mean_time",
            "mean_time_se",
            "mean_events",
            "mean_wasted_work",
        ]
        .map(String::from),
    );
    for t in &times {
        cols.push(format!("reliability@{t}"));
        cols.push(format!("reliability_se@{t}"));
        cols.push(format!("completed_by@{t}"));
    }
    cols.push("error".into());
    let width = cols.len();

    let pts = points(doc);
    for (i, p) in pts.iter().enumerate() {
        let mut row = lead_cells(doc, i, p);
        match in_pool(opts.workers, || simulate_point(&p.doc, opts))? {
            Ok(stats) => {
                row.push(Cell::Num(stats.completed_fraction()));
                row.push(Cell::opt(stats.mean_time.map(|m| m.mean)));
                row.push(Cell::opt(stats.mean_time.map(|m| m.std_error)));
                row.push(Cell::Num(stats.mean_events));
                row.push(Cell::Num(stats.mean_wasted_work));
                for &t in &times {
                    row.push(Cell::Num(empirical_reliability(&stats, t)?.value()));
                    row.push(Cell::Num(stats.reliability_std_error(t)));
                    row.push(Cell::Num(stats.completion_fraction_by(t)));
                }
                row.push(Cell::Empty);
                if stats.completed == 0 {
                    push_unique(
                        &mut rep.diagnostics,
                        format!("point {i}: no trial completed; mean_time is empty"),
                    );
                }
            }
            Err(e) => row = error_row(row, width, error_text(&e)),
        }
        rep.rows.push(row);
    }
    write_trace(&pts, opts)?;
    rep.columns = cols;
    Ok(rep)
}

fn check_trials(opts: &RunOptions) -> Result<(), CliError> {
    if opts.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    Ok(())
}

fn close(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Checks that the single system component and the scenario policy model
/// the same thing with the same parameters.
pub fn check_mapping(doc: &ConfigDocument) -> Result<(), CliError> {
    let Some(sc) = &doc.scenario else {
        return Err(CliError::Usage("`compare` needs a [scenario] section".into()));
    };
    let [comp] = doc.system.components.as_slice() else {
        return Err(CliError::Validation(vec![format!(
            "mapping: compare needs exactly one system component, found {}",
            doc.system.components.len()
        )]));
    };
    let scenario = sc.to_scenario();
    let mtti = scenario.system_mtti();
    let own = |m: &Option<f64>| m.unwrap_or(doc.system.mtti);
    let mut errors = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            errors.push(format!("mapping: {what}"));
        }
    };
    match (&comp.pattern, &sc.policy) {
        (PatternSection::Unprotected { mtti: m }, PolicySection::None) => {
            need(close(own(m), mtti), format!("component mtti {} != scenario system mtti {mtti}", own(m)));
        }
        (
            PatternSection::Rollback {
                regular_time,
                checkpoint_cost,
                recovery_cost,
                mtti: m,
                ..
            }
            | PatternSection::Rollforward {
                regular_time,
                checkpoint_cost,
                recovery_cost,
                mtti: m,
                mode: RollForwardMode::Checkpointing,
                ..
            },
            PolicySection::Checkpoint { cost, recovery, .. },
        ) => {
            need(close(own(m), mtti), format!("component mtti {} != scenario system mtti {mtti}", own(m)));
            need(close(*regular_time, sc.work), format!("regular_time {regular_time} != scenario.work {}", sc.work));
            need(close(*checkpoint_cost, *cost), format!("checkpoint_cost {checkpoint_cost} != policy cost {cost}"));
            need(close(*recovery_cost, *recovery), format!("recovery_cost {recovery_cost} != policy recovery {recovery}"));
        }
        (
            PatternSection::Redundancy {
                serial_time,
                degree,
                mode,
                voting_time,
                replica_mtti,
                ..
            },
            PolicySection::Replication {
                degree: d,
                mode: m,
                survival_threshold,
                voting_cost,
            },
        ) => {
            need(degree == d, format!("degree {degree} != policy degree {d}"));
            need(mode == m, format!("mode {mode:?} != policy mode {m:?}"));
            need(
                *survival_threshold == 1,
                format!("the redundancy model fails only when every replica fails; policy survival_threshold must be 1, got {survival_threshold}"),
            );
            need(close(*replica_mtti, mtti), format!("replica_mtti {replica_mtti} != scenario system mtti {mtti}"));
            need(close(*serial_time, sc.work), format!("serial_time {serial_time} != scenario.work {}", sc.work));
            need(close(*voting_time, *voting_cost), format!("voting_time {voting_time} != policy voting_cost {voting_cost}"));
        }
        (
            PatternSection::Reconfiguration { component_count, .. },
            PolicySection::Reconfiguration {
                components,
                min_components,
                ..
            },
        ) => {
            need(component_count == components, format!("component_count {component_count} != policy components {components}"));
            need(
                *min_components == 1,
                format!("the reconfiguration model survives while any component survives; policy min_components must be 1, got {min_components}"),
            );
        }
        (p, s) => need(
            false,
            format!(
                "pattern `{}` has no simulated counterpart for policy `{}`",
                p.kind(),
                policy_kind(s)
            ),
        ),
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(errors))
    }
}

fn policy_kind(p: &PolicySection) -> &'static str {
    match p {
        PolicySection::None => "none",
        PolicySection::Checkpoint { .. } => "checkpoint",
        PolicySection::Replication { .. } => "replication",
        PolicySection::Reconfiguration { .. } => "reconfiguration",
    }
}

/// Analytic model against simulation, side by side.
///
/// Columns: `point`, the swept parameter (if any), `analytic_time`,
/// `analytic_time_kind`, `empirical_mean_time`, `empirical_mean_time_se`,
/// `time_gap`, `rel_time_gap`, then per report time `t`: `literal@t`,
/// `survival@t`, `empirical@t`, `empirical_se@t`, `gap_literal@t`,
/// `gap_survival@t`, `rel_gap_literal@t`, `rel_gap_survival@t`, then
/// `error`. Gaps are analytic minus empirical; relative gaps divide by the
/// empirical value. Report times default to the system eval time.
pub fn cmd_compare(doc: &ConfigDocument, opts: &RunOptions) -> Result<ReportDocument, CliError> {
    require_scenario(doc, "compare")?;
    check_trials(opts)?;
    check_mapping(doc)?;
    let mut rep = report(doc, "compare", opts, true);
    let mut times = report_times(doc);
    if times.is_empty() {
        times.push(doc.eval_time());
    }
    let mut cols = lead_columns(doc);
    cols.extend(
        [
            "analytic_time",
            "analytic_time_kind",
            "empirical_mean_time",
            "empirical_mean_time_se",
            "time_gap",
            "rel_time_gap",
        ]
        .map(String::from),
    );
    for t in &times {
        for c in [
            "literal",
            "survival",
            "empirical",
            "empirical_se",
            "gap_literal",
            "gap_survival",
            "rel_gap_literal",
            "rel_gap_survival",
        ] {
            cols.push(format!("{c}@{t}"));
        }
    }
    cols.push("error".into());
    let width = cols.len();

    let pts = points(doc);
    for (i, p) in pts.iter().enumerate() {
        let mut row = lead_cells(doc, i, p);
        match compare_point(p, opts, &times, in_pool(opts.workers, || simulate_point(&p.doc, opts))?) {
            Ok((cells, diags)) => {
                row.extend(cells);
                row.push(Cell::Empty);
                for d in diags {
                    push_unique(&mut rep.diagnostics, d);
                }
            }
            Err(e) => row = error_row(row, width, error_text(&e)),
        }
        rep.rows.push(row);
    }
    write_trace(&pts, opts)?;
    rep.columns = cols;
    Ok(rep)
}

fn ratio(gap: f64, base: f64) -> Cell {
    if base == 0.0 {
        Cell::Empty
    } else {
        Cell::Num(gap / base)
    }
}

fn compare_point(
    p: &Point,
    opts: &RunOptions,
    times: &[f64],
    stats: Result<EnsembleStats, CliError>,
) -> Result<(Vec<Cell>, Vec<String>), CliError> {
    let d = p.doc.as_ref().map_err(|e| CliError::Validation(vec![e.to_string()]))?;
    check_mapping(d)?;
    let stats = stats?;
    let system = d.system_model()?;
    let base = opts.eval_options(d);
    let lit = EvalOptions {
        convention: Convention::Literal,
        ..base
    };
    let surv = EvalOptions {
        convention: Convention::Survival,
        ..base
    };

    let mut cells = Vec::new();
    let mut diags = Vec::new();
    let at_eval = evaluate_system(&system, d.eval_time(), lit)?;
    diags.extend(at_eval.diagnostics.iter().cloned());
    let out = &at_eval.per_component[0].output;
    let mean = stats.mean_time.map(|m| m.mean);
    cells.push(Cell::Num(out.time_estimate));
    cells.push(Cell::Text(time_kind(out.time_kind).into()));
    cells.push(Cell::opt(mean));
    cells.push(Cell::opt(stats.mean_time.map(|m| m.std_error)));
    match (out.time_kind, mean) {
        (TimeKind::Time, Some(m)) => {
            cells.push(Cell::Num(out.time_estimate - m));
            cells.push(ratio(out.time_estimate - m, m));
        }
        _ => cells.extend([Cell::Empty, Cell::Empty]),
    }

    for &t in times {
        let rl = evaluate_system(&system, t, lit)?;
        let rs = evaluate_system(&system, t, surv)?;
        // a component without a reliability model has no analytic curve
        let has = rl.per_component[0].output.reliability.is_some();
        let l = has.then(|| rl.system_reliability.value());
        let s = has.then(|| rs.system_reliability.value());
        let e = empirical_reliability(&stats, t)?.value();
        cells.push(Cell::opt(l));
        cells.push(Cell::opt(s));
        cells.push(Cell::Num(e));
        cells.push(Cell::Num(stats.reliability_std_error(t)));
        cells.push(Cell::opt(l.map(|l| l - e)));
        cells.push(Cell::opt(s.map(|s| s - e)));
        cells.push(l.map_or(Cell::Empty, |l| ratio(l - e, e)));
        cells.push(s.map_or(Cell::Empty, |s| ratio(s - e, e)));
        diags.extend(rl.diagnostics);
    }
    Ok((cells, diags))
}
