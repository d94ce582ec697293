//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::path::PathBuf;
use std::time::Instant;

use respat::composition::{evaluate_system, series_reliability, total_overhead, Component, SystemModel};
use respat::event::{interrupt_probability, survival_probability};
use respat::patterns::{
    diagnosis_overhead, event_factor, nversion_exclusive_success, nversion_failure_density,
    nversion_reliability, reconfiguration_performance, reconfiguration_reliability,
    redundancy_reliability, redundancy_time, rollback_failure_free_time, rollback_with_failures,
    rollforward_reliability, rollforward_time, CheckpointParams, DiagnosisParams, EvalOptions,
    ModelOutput, NVersionParams, PatternInstance, ReconfigMode, ReconfigurationParams,
    RecoveryMode, RedundancyMode, RedundancyParams, VersionInputs,
};
use respat::sim::{empirical_reliability, run_ensemble, Policy, SimScenario};
use respat::stats::{ks_critical_value, ks_statistic};
use respat::{Convention, EventModel, Probability};
use respat_cli::{cmd_compare, cmd_simulate, parse_config, ConfigDocument, ReportDocument, RunOptions};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const SEED: u64 = 42;

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str) -> ConfigDocument {
    parse_config(&configs().join(name)).expect("bundled config parses")
}

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

fn em(m: f64) -> EventModel {
    EventModel::new(m).unwrap()
}

fn cell(rep: &ReportDocument, col: &str, row: usize) -> Result<f64, String> {
    rep.column_values(col)
        .and_then(|c| c[row].as_f64())
        .ok_or_else(|| format!("report has no numeric `{col}` in row {row}"))
}

/// Collects relative-error comparisons and reports the worst one.
struct Fixtures {
    tol: f64,
    worst: f64,
    count: usize,
    failures: Vec<String>,
}

impl Fixtures {
    fn new(tol: f64) -> Self {
        Fixtures {
            tol,
            worst: 0.0,
            count: 0,
            failures: Vec::new(),
        }
    }

    fn eq(&mut self, what: &str, got: f64, want: f64) {
        let scale = want.abs().max(got.abs());
        let err = if scale == 0.0 { 0.0 } else { (got - want).abs() / scale };
        self.count += 1;
        self.worst = self.worst.max(err);
        if err.is_nan() || err > self.tol {
            self.failures.push(format!("{what}: got {got}, want {want} (rel {err:.2e})"));
        }
    }

    fn finish(self) -> Check {
        let summary = format!("{} values, worst relative error {:.2e}", self.count, self.worst);
        if self.failures.is_empty() {
            Ok(summary)
        } else {
            Err(format!("{summary}; {}", self.failures.join("; ")))
        }
    }
}

fn ckpt(o: f64, d: f64, r: f64, g: f64, eta: f64) -> CheckpointParams {
    CheckpointParams::checkpointing(o, d, r, g, em(eta))
}

fn logging(m: u64, tl: f64, o: f64, r: f64, g: f64, eta: f64) -> CheckpointParams {
    CheckpointParams {
        regular_time: o,
        checkpoint_cost: 0.0,
        checkpoint_rate: r,
        recovery_cost: g,
        event_model: em(eta),
        mode: RecoveryMode::MessageLogging {
            message_count: m,
            log_time_per_message: tl,
        },
    }
}

fn redundancy(ts: f64, a: f64, d: u32, mode: RedundancyMode, tmv: f64, lambda: f64) -> RedundancyParams {
    RedundancyParams {
        serial_time: ts,
        replicated_fraction: a,
        degree: d,
        mode,
        voting_time: tmv,
        replica_mtti: lambda,
    }
}

fn reconfig(tff: f64, n: u32, tr: f64) -> ReconfigurationParams {
    ReconfigurationParams {
        progress_fraction: tff,
        component_count: n,
        reconfig_downtime: tr,
        component_reliabilities: Vec::new(),
    }
}

/// Every worked example, against hand arithmetic written out here.
fn criterion_1() -> Check {
    let mut f = Fixtures::new(1e-12);
    let e = |r: respat::Result<ModelOutput>| r.unwrap().time_estimate;

    // diagnosis: T0 + n * t_inf / beta
    let diag = |t0, n, ti, b| {
        e(diagnosis_overhead(&DiagnosisParams {
            base_time: t0,
            observed_params: n,
            inference_time: ti,
            polling_frequency: b,
        }))
    };
    f.eq("diagnosis 100/4/0.5/2", diag(100.0, 4, 0.5, 2.0), 101.0);
    f.eq("diagnosis 0/3/1/0.5", diag(0.0, 3, 1.0, 0.5), 6.0);

    // reconfiguration time and parallel reliability
    f.eq(
        "reconfiguration literal",
        e(reconfiguration_performance(&reconfig(0.5, 4, 0.1), ReconfigMode::Literal)),
        0.975,
    );
    f.eq(
        "reconfiguration corrected",
        e(reconfiguration_performance(&reconfig(0.5, 4, 0.1), ReconfigMode::Corrected)),
        0.5 + 0.5 * 4.0 / 3.0 + 0.1,
    );
    f.eq(
        "reconfiguration reliability [0.9, 0.9]",
        reconfiguration_reliability(&[p(0.9), p(0.9)]).unwrap().value(),
        0.99,
    );

    // checkpoint failure-free time
    f.eq("T_FF 100/2/0.5", e(rollback_failure_free_time(&ckpt(100.0, 2.0, 0.5, 0.0, 1.0))), 104.0);
    f.eq("T_FF 0/1/1", e(rollback_failure_free_time(&ckpt(0.0, 1.0, 1.0, 0.0, 1.0))), 1.0);

    // rollback with failures
    let rb = ckpt(100.0, 2.0, 0.5, 6.0, 1000.0);
    let lit = rollback_with_failures(&rb, Convention::Literal).unwrap();
    let surv = rollback_with_failures(&rb, Convention::Survival).unwrap();
    f.eq("rollback ratio", lit.time_estimate, 110.0 / 1000.0);
    f.eq("rollback literal reliability", lit.reliability.unwrap().value(), 1.0 - (-0.11f64).exp());
    f.eq("rollback survival reliability", surv.reliability.unwrap().value(), (-0.11f64).exp());

    // roll-forward with message logging
    let lg = logging(1000, 0.001, 100.0, 1.0, 5.0, 500.0);
    f.eq("logging T_FF", lg.failure_free_time(), 101.0);
    f.eq(
        "logging ratio",
        rollforward_time(&lg, Convention::Literal).unwrap().time_estimate,
        (101.0 + 5.0) / 500.0,
    );
    f.eq(
        "logging reliability",
        rollforward_reliability(&lg, Convention::Literal).unwrap().value(),
        1.0 - (-102.0f64 / 500.0).exp(),
    );

    // redundancy time and reliability
    f.eq(
        "redundancy time d=3",
        e(redundancy_time(&redundancy(100.0, 0.8, 3, RedundancyMode::Time, 2.0, 1000.0))),
        100.0 * (0.2 + 2.4) + 2.0,
    );
    for d in [1, 2, 5, 9] {
        f.eq(
            &format!("redundancy space A=1 d={d}"),
            e(redundancy_time(&redundancy(100.0, 1.0, d, RedundancyMode::Space, 2.0, 1000.0))),
            102.0,
        );
    }
    f.eq(
        "redundancy reliability t=λ/2 d=2",
        redundancy_reliability(500.0, &redundancy(100.0, 0.8, 2, RedundancyMode::Space, 0.0, 1000.0))
            .unwrap()
            .value(),
        0.75,
    );

    // n-version
    let ex = nversion_exclusive_success(&[p(0.9), p(0.9)]).unwrap();
    f.eq("P(A_1) [0.9, 0.9]", ex.per_version[0].value(), 0.9 * 0.1);
    f.eq("P(A_2) [0.9, 0.9]", ex.per_version[1].value(), 0.1 * 0.9);
    f.eq("P(A) [0.9, 0.9]", ex.total.value(), 0.18);
    let ex = nversion_exclusive_success(&[p(0.5); 3]).unwrap();
    for k in 0..3 {
        f.eq(&format!("P(A_{k}) [0.5; 3]"), ex.per_version[k].value(), 0.125);
    }
    f.eq("P(A) [0.5; 3]", ex.total.value(), 0.375);
    let q = nversion_failure_density(p(0.18), p(0.01));
    f.eq("Q", q.value(), 0.99 * 0.18 + 0.01);
    let nv = NVersionParams {
        versions: VersionInputs::ExclusiveSuccess(vec![p(0.09), p(0.09)]),
        voter_failure_prob: p(0.01),
        event_model: em(100.0),
    };
    f.eq(
        "n-version reliability t=η",
        nversion_reliability(100.0, &nv, Convention::Literal).unwrap().value(),
        1.0 - 0.1882 * (-1.0f64).exp(),
    );

    // series composition
    f.eq("series [0.9, 0.9]", series_reliability(&[p(0.9), p(0.9)]).unwrap().value(), 0.81);
    f.eq("series [0.99, 0.75]", series_reliability(&[p(0.99), p(0.75)]).unwrap().value(), 0.7425);
    f.eq(
        "total overhead",
        total_overhead(&[ModelOutput::time(101.0), ModelOutput::time(262.0)]).unwrap(),
        363.0,
    );
    let single = SystemModel::new(
        vec![Component::new("a", PatternInstance::Unprotected(None))],
        100.0,
        em(100.0),
    )
    .unwrap();
    f.eq(
        "unprotected system, survival, t=η",
        evaluate_system(&single, 100.0, EvalOptions::with_convention(Convention::Survival))
            .unwrap()
            .system_reliability
            .value(),
        (-1.0f64).exp(),
    );
    let pair = SystemModel::new(
        vec![
            Component::new(
                "spares",
                PatternInstance::Reconfiguration(ReconfigurationParams {
                    component_reliabilities: vec![p(0.9), p(0.9)],
                    ..reconfig(0.5, 2, 0.1)
                }),
            ),
            Component::new(
                "solver",
                PatternInstance::Redundancy(redundancy(100.0, 0.8, 2, RedundancyMode::Space, 2.0, 1000.0)),
            ),
        ],
        1000.0,
        em(1000.0),
    )
    .unwrap();
    f.eq(
        "two-component system",
        evaluate_system(&pair, 500.0, EvalOptions::default())
            .unwrap()
            .system_reliability
            .value(),
        0.99 * 0.75,
    );

    // event model
    f.eq("interrupt t=η", interrupt_probability(100.0, &em(100.0)).unwrap().value(), 1.0 - (-1.0f64).exp());
    f.eq("survival t=η", survival_probability(5.0, &em(5.0)).unwrap().value(), (-1.0f64).exp());
    f.finish()
}

struct Lcg(u64);

impl Lcg {
    fn unit(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Total probability of the up/down assignments accepted by `keep`.
fn enumerate(p: &[f64], keep: impl Fn(u32) -> bool) -> f64 {
    (0u32..1 << p.len())
        .filter(|&m| keep(m))
        .map(|m| {
            p.iter()
                .enumerate()
                .map(|(i, &q)| if m >> i & 1 == 1 { q } else { 1.0 - q })
                .product::<f64>()
        })
        .sum()
}

fn criterion_2() -> Check {
    let mut f = Fixtures::new(1e-12);
    let mut rng = Lcg(2024);
    for n in 1..=12usize {
        for rep in 0..4 {
            let probs: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
            let wrapped: Vec<Probability> = probs.iter().map(|&q| p(q)).collect();
            if n >= 2 {
                let ex = nversion_exclusive_success(&wrapped).unwrap();
                for k in 0..n {
                    f.eq(&format!("P(A_{k}) n={n} #{rep}"), ex.per_version[k].value(), enumerate(&probs, |m| m == 1 << k));
                }
                f.eq(
                    &format!("P(A) n={n} #{rep}"),
                    ex.total.value(),
                    enumerate(&probs, |m| m.count_ones() == 1),
                );
            }
            if n <= 10 {
                let all = (1u32 << n) - 1;
                f.eq(
                    &format!("series n={n} #{rep}"),
                    series_reliability(&wrapped).unwrap().value(),
                    enumerate(&probs, |m| m == all),
                );
                f.eq(
                    &format!("parallel n={n} #{rep}"),
                    reconfiguration_reliability(&wrapped).unwrap().value(),
                    enumerate(&probs, |m| m != 0),
                );
            }
        }
    }
    f.finish()
}

fn criterion_3() -> Check {
    let eta = 100.0;
    let trials = 100_000;
    // long work so no trial is censored before its first fault
    let s = SimScenario::new(1e4, eta, Policy::None);
    let stats = run_ensemble(&s, trials, SEED).map_err(|e| e.to_string())?;
    if stats.first_faults.len() != trials {
        return Err(format!("{} of {trials} trials saw a fault", stats.first_faults.len()));
    }
    let d = ks_statistic(&stats.first_faults, |x| -(-x / eta).exp_m1());
    let crit = ks_critical_value(trials, 0.01);
    let mut msg = format!("KS D = {d:.5} (1% critical {crit:.5})");
    let mut ok = d < crit;
    for t in [25.0, 50.0, 100.0, 200.0] {
        let r = empirical_reliability(&stats, t).map_err(|e| e.to_string())?.value();
        let se = stats.reliability_std_error(t);
        let z = (r - (-t / eta).exp()) / se;
        ok &= z.abs() < 3.0;
        msg.push_str(&format!("; t={t}: z = {z:+.2}"));
    }
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_4() -> Check {
    let (w, tau, delta, gamma, eta) = (1000.0, 10.0, 0.5, 5.0, 500.0);
    let doc = load("checkpoint.toml");
    let sc = doc.scenario.as_ref().unwrap();
    let ok_inputs = sc.work == w && sc.fault_mtti == eta;
    if !ok_inputs {
        return Err("bundled checkpoint scenario does not match the criterion inputs".into());
    }
    let rep = cmd_simulate(
        &doc,
        &RunOptions {
            trials: 100_000,
            seed: SEED,
            ..RunOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let mean = cell(&rep, "mean_time", 0)?;
    let first_order = w * (1.0 + delta / tau + (tau / 2.0 + gamma) / eta);
    let rel = (mean - first_order) / first_order;
    let mut ok = rel.abs() < 0.05;
    let mut msg = format!("mean {mean:.2} vs first-order {first_order:.2} ({:+.2}%)", rel * 100.0);

    // interval sweep; all points share the master seed
    let mut sweep_doc = load("checkpoint_interval_sweep.toml");
    let sw = sweep_doc.sweep.as_mut().unwrap();
    sw.start = 2.0;
    sw.stop = 200.0;
    sw.steps = 21;
    let grid = sweep_doc
        .sweep
        .as_ref()
        .unwrap()
        .resolve(&sweep_doc)
        .map_err(|e| e.join("; "))?;
    let rep = cmd_simulate(
        &sweep_doc,
        &RunOptions {
            trials: 20_000,
            seed: SEED,
            ..RunOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let means: Vec<f64> = (0..grid.len())
        .map(|i| cell(&rep, "mean_time", i))
        .collect::<Result<_, _>>()?;
    let best = (0..means.len()).min_by(|&a, &b| means[a].total_cmp(&means[b])).unwrap();
    let optimum = (2.0 * delta * eta).sqrt();
    let step = (grid[1] / grid[0]).ln();
    let steps_off = (grid[best] / optimum).ln() / step;
    ok &= steps_off.abs() <= 1.0;
    msg.push_str(&format!(
        "; sweep minimum at τ = {:.2} (mean {:.2}), sqrt(2δη) = {optimum:.2}, {steps_off:+.2} grid steps",
        grid[best], means[best]
    ));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_5() -> Check {
    let (t, lambda): (f64, f64) = (50.0, 1000.0);
    let doc = load("replication.toml");
    let rep = cmd_compare(
        &doc,
        &RunOptions {
            trials: 100_000,
            seed: SEED,
            ..RunOptions::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let empirical = 1.0 - cell(&rep, "empirical@50", 0)?;
    let se = cell(&rep, "empirical_se@50", 0)?;
    let exact = (-(-t / lambda).exp_m1()).powi(2);
    let literal = 1.0 - cell(&rep, "literal@50", 0)?;
    let z = (empirical - exact) / se;
    let rel = (literal - empirical).abs() / empirical;
    let analytic_rel = (literal - exact).abs() / exact;
    let msg = format!(
        "empirical failure {empirical:.6} (se {se:.6}) vs (1-e^(-t/λ))^2 = {exact:.6}, z = {z:+.2}; \
         (t/λ)^2 = {literal:.6} is {:.2}% from empirical (limit 5%); \
         its gap to the exact value is {:.2}%",
        rel * 100.0,
        analytic_rel * 100.0
    );
    if z.abs() < 3.0 && rel < 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Check {
    let mut doc = load("checkpoint_interval_sweep.toml");
    doc.sweep.as_mut().unwrap().steps = 5;
    let mut bodies = Vec::new();
    for workers in [1, 8, 1, 8] {
        let rep = cmd_simulate(
            &doc,
            &RunOptions {
                trials: 5000,
                seed: SEED,
                workers: Some(workers),
                ..RunOptions::default()
            },
        )
        .map_err(|e| e.to_string())?;
        bodies.push((rep.to_csv().map_err(|e| e.to_string())?, rep.to_json().map_err(|e| e.to_string())?));
    }
    if bodies.windows(2).all(|w| w[0] == w[1]) {
        Ok(format!(
            "4 runs (1, 8, 1, 8 workers): CSV ({} bytes) and JSON ({} bytes) identical",
            bodies[0].0.len(),
            bodies[0].1.len()
        ))
    } else {
        Err("report bodies differ between runs".into())
    }
}

fn criterion_7() -> Check {
    let mut f = Fixtures::new(1e-12);
    let times = [0.0, 1e-6, 0.5, 7.0, 50.0, 100.0, 333.0, 1000.0, 5000.0];
    let lit = EvalOptions::with_convention(Convention::Literal);
    let surv = EvalOptions::with_convention(Convention::Survival);

    // unprotected, rollback, and roll-forward (both modes) complement exactly
    let system = em(250.0);
    let complementary = [
        ("unprotected", PatternInstance::Unprotected(None)),
        ("rollback", PatternInstance::Rollback(ckpt(100.0, 2.0, 0.5, 6.0, 1000.0))),
        ("rollforward", PatternInstance::RollForward(ckpt(40.0, 1.0, 0.2, 3.0, 120.0))),
        ("logging", PatternInstance::RollForward(logging(1000, 0.001, 100.0, 1.0, 5.0, 500.0))),
    ];
    for (name, pat) in &complementary {
        for &t in &times {
            let a = pat.evaluate(t, &system, lit).unwrap().reliability.unwrap().value();
            let b = pat.evaluate(t, &system, surv).unwrap().reliability.unwrap().value();
            f.eq(&format!("{name} t={t} literal + survival"), a + b, 1.0);
        }
    }

    // n-version: the event factors complement, so R_lit + R_surv = 2 - Q
    let nv = NVersionParams {
        versions: VersionInputs::SuccessProbabilities(vec![p(0.9), p(0.9), p(0.8)]),
        voter_failure_prob: p(0.01),
        event_model: em(100.0),
    };
    let q = nversion_failure_density(nv.exclusive_sum().unwrap(), nv.voter_failure_prob).value();
    for &t in &times {
        let fl = event_factor(t, &nv.event_model, Convention::Literal);
        let fs = event_factor(t, &nv.event_model, Convention::Survival);
        f.eq(&format!("n-version F(t) t={t}"), fl + fs, 1.0);
        let rl = nversion_reliability(t, &nv, Convention::Literal).unwrap().value();
        let rs = nversion_reliability(t, &nv, Convention::Survival).unwrap().value();
        f.eq(&format!("n-version R t={t}"), rl + rs, 2.0 - q);
    }

    // redundancy has no exponential term and is convention-invariant
    let red = PatternInstance::Redundancy(redundancy(100.0, 0.8, 3, RedundancyMode::Space, 2.0, 1000.0));
    for &t in times.iter().filter(|&&t| t <= 1000.0) {
        let a = red.evaluate(t, &system, lit).unwrap().reliability.unwrap().value();
        let b = red.evaluate(t, &system, surv).unwrap().reliability.unwrap().value();
        f.eq(&format!("redundancy t={t} invariant"), a, b);
    }

    // literal outputs reproduce the printed forms on the fixture inputs
    let rb = ckpt(100.0, 2.0, 0.5, 6.0, 1000.0);
    f.eq(
        "printed 1 - e^(-(T_FF + γ)/η)",
        rollback_with_failures(&rb, Convention::Literal).unwrap().reliability.unwrap().value(),
        1.0 - (-(104.0 + 6.0) / 1000.0f64).exp(),
    );
    let lg = logging(1000, 0.001, 100.0, 1.0, 5.0, 500.0);
    f.eq(
        "printed 1 - e^(-(T_FF + M t_log)/η)",
        rollforward_reliability(&lg, Convention::Literal).unwrap().value(),
        1.0 - (-(101.0 + 1000.0 * 0.001) / 500.0f64).exp(),
    );
    for (t, d) in [(500.0, 2u32), (50.0, 2), (100.0, 3)] {
        f.eq(
            &format!("printed 1 - (t/λ)^d t={t} d={d}"),
            redundancy_reliability(t, &redundancy(100.0, 0.8, d, RedundancyMode::Space, 0.0, 1000.0))
                .unwrap()
                .value(),
            1.0 - (t / 1000.0f64).powi(d as i32),
        );
    }
    let nv16 = NVersionParams {
        versions: VersionInputs::ExclusiveSuccess(vec![p(0.09), p(0.09)]),
        voter_failure_prob: p(0.01),
        event_model: em(100.0),
    };
    f.eq(
        "printed 1 - Q e^(-t/η)",
        nversion_reliability(100.0, &nv16, Convention::Literal).unwrap().value(),
        1.0 - 0.1882 * (-100.0 / 100.0f64).exp(),
    );
    f.finish()
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("equation fixtures", criterion_1),
        ("brute-force oracles", criterion_2),
        ("simulator calibration", criterion_3),
        ("checkpoint model check", criterion_4),
        ("redundancy check", criterion_5),
        ("determinism", criterion_6),
        ("convention integrity", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("criterion {} PASS {name} [{secs:.1}s]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name} [{secs:.1}s]: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
