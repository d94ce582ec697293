//! One simulated run of a scenario.
//!
//! Faults arrive with exponential interarrival times. Because the process is
//! memoryless, the next fault is redrawn from the current instant whenever
//! the policy changes state (fault, recovery, component loss).

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::patterns::RedundancyMode;
use crate::sim::scenario::{Policy, SimScenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub completed: bool,
    pub completion_time: Option<f64>,
    /// When the run was declared failed: a terminal fault, or the time limit.
    pub failure_time: Option<f64>,
    pub first_fault: Option<f64>,
    pub events: u64,
    /// Work discarded by faults plus time spent recovering.
    pub wasted_work: f64,
}

/// One line of a per-trial event trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEvent {
    pub time: f64,
    pub kind: &'static str,
    pub detail: String,
}

type Tracer<'a> = Option<&'a mut dyn FnMut(TraceEvent)>;

struct Run<'a> {
    rng: ChaCha8Rng,
    limit: f64,
    events: u64,
    wasted: f64,
    first_fault: Option<f64>,
    tracer: Tracer<'a>,
}

impl Run<'_> {
    fn emit(&mut self, time: f64, kind: &'static str, detail: impl FnOnce() -> String) {
        if let Some(t) = self.tracer.as_mut() {
            t(TraceEvent {
                time,
                kind,
                detail: detail(),
            });
        }
    }

    /// Exponential draw; an infinite mean never fires.
    fn draw(&mut self, mean: f64) -> f64 {
        if mean.is_infinite() {
            return f64::INFINITY;
        }
        let u: f64 = self.rng.sample(Open01);
        -mean * u.ln()
    }

    fn fault(&mut self, time: f64, detail: impl FnOnce() -> String) {
        self.events += 1;
        self.first_fault.get_or_insert(time);
        self.emit(time, "fault", detail);
    }

    fn finish(mut self, completed: bool, time: f64, kind: &'static str) -> TrialOutcome {
        self.emit(time, kind, String::new);
        TrialOutcome {
            completed,
            completion_time: completed.then_some(time),
            failure_time: (!completed).then_some(time),
            first_fault: self.first_fault,
            events: self.events,
            wasted_work: self.wasted,
        }
    }

    fn complete(self, time: f64) -> TrialOutcome {
        if time > self.limit {
            let limit = self.limit;
            return self.cutoff(limit);
        }
        self.finish(true, time, "complete")
    }

    fn fail(self, time: f64) -> TrialOutcome {
        self.finish(false, time, "failed")
    }

    fn cutoff(self, limit: f64) -> TrialOutcome {
        self.finish(false, limit, "cutoff")
    }
}

/// Runs one trial. Deterministic in `(scenario, seed)`.
pub fn run_trial(scenario: &SimScenario, seed: u64) -> Result<TrialOutcome> {
    scenario.validate()?;
    Ok(simulate(scenario, seed, None))
}

/// Like [`run_trial`], also reporting every event to `sink`.
pub fn run_trial_traced(
    scenario: &SimScenario,
    seed: u64,
    sink: &mut dyn FnMut(TraceEvent),
) -> Result<TrialOutcome> {
    scenario.validate()?;
    Ok(simulate(scenario, seed, Some(sink)))
}

pub(crate) fn simulate(scenario: &SimScenario, seed: u64, tracer: Tracer<'_>) -> TrialOutcome {
    let mut run = Run {
        rng: ChaCha8Rng::seed_from_u64(seed),
        limit: scenario.time_limit(),
        events: 0,
        wasted: 0.0,
        first_fault: None,
        tracer,
    };
    run.emit(0.0, "start", || format!("policy={}", scenario.policy.kind()));
    match scenario.policy {
        Policy::None => unprotected(run, scenario),
        Policy::Checkpoint {
            interval,
            cost,
            recovery,
        } => checkpointed(run, scenario, interval, cost, recovery),
        Policy::Replication {
            degree,
            mode: RedundancyMode::Space,
            survival_threshold,
            voting_cost,
        } => space_replicated(run, scenario, degree, survival_threshold, voting_cost),
        Policy::Replication {
            degree,
            mode: RedundancyMode::Time,
            survival_threshold,
            voting_cost,
        } => time_replicated(run, scenario, degree, survival_threshold, voting_cost),
        Policy::Reconfiguration {
            components,
            downtime,
            min_components,
        } => reconfigured(run, scenario, components, downtime, min_components),
    }
}

fn unprotected(mut run: Run<'_>, s: &SimScenario) -> TrialOutcome {
    let fault = run.draw(s.system_mtti());
    if fault < s.work {
        if fault > run.limit {
            let limit = run.limit;
            return run.cutoff(limit);
        }
        run.fault(fault, || "unprotected".into());
        run.wasted += fault;
        return run.fail(fault);
    }
    run.complete(s.work)
}

/// Number of work segments of length `interval` needed to cover `work`.
/// A trailing sliver below 1e-12 relative is absorbed into the last segment.
pub(crate) fn segment_count(work: f64, interval: f64) -> u64 {
    let k = (work / interval).ceil().max(1.0);
    if k > 1.0 && (k - 1.0) * interval >= work * (1.0 - 1e-12) {
        (k - 1.0) as u64
    } else {
        k as u64
    }
}

fn checkpointed(mut run: Run<'_>, s: &SimScenario, interval: f64, cost: f64, recovery: f64) -> TrialOutcome {
    let mtti = s.system_mtti();
    let segments = segment_count(s.work, interval);
    let mut now = 0.0;
    let mut next_fault = run.draw(mtti);
    let mut done = 0u64;

    while done < segments {
        let last = done + 1 == segments;
        let seg = if last {
            s.work - done as f64 * interval
        } else {
            interval
        };
        // no checkpoint after the final segment
        let end = now + seg + if last { 0.0 } else { cost };

        if next_fault < end {
            if next_fault > run.limit {
                let limit = run.limit;
                return run.cutoff(limit);
            }
            let lost = next_fault - now;
            run.fault(next_fault, || format!("segment {done}, lost {lost}"));
            run.wasted += lost;
            now = next_fault;
            // recovery restarts if another fault lands inside it
            loop {
                next_fault = now + run.draw(mtti);
                let recovered = now + recovery;
                if next_fault < recovered {
                    if next_fault > run.limit {
                        let limit = run.limit;
                        return run.cutoff(limit);
                    }
                    run.fault(next_fault, || "during recovery".into());
                    run.wasted += next_fault - now;
                    now = next_fault;
                    continue;
                }
                run.wasted += recovery;
                now = recovered;
                run.emit(now, "recovered", || format!("resume at segment {done}"));
                break;
            }
            if now > run.limit {
                let limit = run.limit;
                return run.cutoff(limit);
            }
            continue;
        }

        if end > run.limit {
            let limit = run.limit;
            return run.cutoff(limit);
        }
        now = end;
        done += 1;
        if !last {
            run.emit(now, "checkpoint", || format!("segment {done} saved"));
        }
    }
    run.complete(now)
}

fn space_replicated(mut run: Run<'_>, s: &SimScenario, degree: u32, k: u32, voting: f64) -> TrialOutcome {
    let mtti = s.system_mtti();
    let mut failures: Vec<(f64, u32)> = (0..degree).map(|i| (run.draw(mtti), i)).collect();
    failures.sort_by(|a, b| a.0.total_cmp(&b.0));
    // the run is lost once fewer than k replicas remain
    let fatal = failures[(degree - k) as usize].0;
    let end = fatal.min(s.work);

    for &(t, replica) in failures.iter().take_while(|(t, _)| *t < s.work && *t <= fatal) {
        if t > run.limit {
            let limit = run.limit;
            return run.cutoff(limit);
        }
        run.fault(t, || format!("replica {replica} lost"));
        run.wasted += t;
    }
    if fatal < s.work {
        return run.fail(end);
    }
    run.emit(s.work, "vote", || format!("{} replicas agree", degree));
    run.complete(s.work + voting)
}

fn time_replicated(mut run: Run<'_>, s: &SimScenario, degree: u32, k: u32, voting: f64) -> TrialOutcome {
    let mtti = s.system_mtti();
    let tolerated = degree - k;
    let mut corrupted = 0u32;
    let mut t = run.draw(mtti);
    for exec in 0..degree {
        let start = exec as f64 * s.work;
        let end = start + s.work;
        let mut hit = false;
        while t < end {
            if t > run.limit {
                let limit = run.limit;
                return run.cutoff(limit);
            }
            run.fault(t, || format!("execution {exec} corrupted"));
            if !hit {
                hit = true;
                corrupted += 1;
                if corrupted > tolerated {
                    run.wasted += t - start;
                    return run.fail(t);
                }
            }
            t += run.draw(mtti);
        }
        if hit {
            run.wasted += s.work;
        }
    }
    run.complete(degree as f64 * s.work + voting)
}

fn reconfigured(mut run: Run<'_>, s: &SimScenario, total: u32, downtime: f64, min_alive: u32) -> TrialOutcome {
    let per_component = s.component_mtti(total);
    let mut alive = total;
    let mut now = 0.0;
    let mut done = 0.0;

    loop {
        let speed = f64::from(alive) / f64::from(total);
        let finish = now + (s.work - done) / speed;
        let fault = now + run.draw(per_component / f64::from(alive));
        if fault >= finish {
            return run.complete(finish);
        }
        if fault > run.limit {
            let limit = run.limit;
            return run.cutoff(limit);
        }
        done += (fault - now) * speed;
        now = fault;
        alive -= 1;
        run.fault(now, || format!("component lost, {alive} left"));
        if alive < min_alive {
            return run.fail(now);
        }
        // reconfiguration restarts if another component fails during it
        loop {
            let next = now + run.draw(per_component / f64::from(alive));
            let ready = now + downtime;
            if next < ready {
                if next > run.limit {
                    let limit = run.limit;
                    return run.cutoff(limit);
                }
                run.wasted += next - now;
                now = next;
                alive -= 1;
                run.fault(now, || format!("component lost during reconfiguration, {alive} left"));
                if alive < min_alive {
                    return run.fail(now);
                }
                continue;
            }
            run.wasted += downtime;
            now = ready;
            run.emit(now, "reconfigured", || format!("{alive} components"));
            break;
        }
        if now > run.limit {
            let limit = run.limit;
            return run.cutoff(limit);
        }
    }
}
