use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use dexcite::analysis::{
    classify_type, find_equilibria, linspace, nullcline_r, nullcline_threshold_estimates, nullcline_xs,
    steady_stats, vector_field_grid, EquilibriumPoint, SETTLED_AMPLITUDE,
};
use dexcite::io::{
    fmt_num, write_field_csv, write_full_csv, write_jsonl, write_nav_csv, write_nullcline_csv, write_reduced_csv,
    write_report, Header,
};
use dexcite::navigation::run_scenario;
use dexcite::simulate::{detect_spikes, fi_curve, simulate_full, simulate_reduced, Trajectory};
use dexcite::verify::{assumptions_suite, gradient_suite, lemma1_suite, riccati_suite, theorem1_suite, SuiteReport, THEOREM1_DIMS};
use dexcite::{FullState, ModelParams, ReducedState, StateVec};
use serde::Serialize;
use serde_json::json;

use crate::config::{Loaded, Mode};
use crate::error::CliError;

pub struct Ctx {
    pub out: PathBuf,
    pub seed: u64,
}

impl Ctx {
    fn create<F>(&self, name: &str, body: F) -> Result<(), CliError>
    where
        F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
    {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Usage(format!("cannot create output directory {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), CliError> {
        self.create(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)
        })
    }

    fn summary(&self, header: &Header, lines: &[(String, String)]) -> Result<(), CliError> {
        self.create("summary.txt", |w| {
            header.write_to(w)?;
            write_report(w, lines)
        })
    }

    fn header<T: Serialize>(&self, command: &str, run: &T) -> Header {
        let mut h = Header::new();
        h.push("command", command).push("seed", self.seed).push_serialized("config", run);
        h
    }
}

/// Every `every`-th sample of a trajectory.
fn thin<S: Clone, I: Clone>(traj: &Trajectory<S, I>, every: usize) -> Trajectory<S, I> {
    Trajectory {
        dt: traj.dt * every as f64,
        t0: traj.t0,
        states: traj.states.iter().step_by(every).cloned().collect(),
        inputs: traj.inputs.iter().step_by(every).cloned().collect(),
    }
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

pub fn simulate(cfg: &Loaded, ctx: &Ctx) -> Result<(), CliError> {
    let run = cfg.config.simulate()?;
    let p = &run.model;
    let header = ctx.header("simulate", &run);
    let train = match run.mode {
        Mode::Full => {
            let x0 = StateVec::new(run.x0.clone());
            let traj = simulate_full(
                &FullState::initial(x0, run.x_s0),
                |t| StateVec::new(run.input.eval(t)),
                p,
                run.dt,
                run.t_end,
            )?;
            ctx.create("trajectory.csv", |w| write_full_csv(w, &header, &thin(&traj, run.record_every)))?;
            detect_spikes(&traj, &run.detector)?
        }
        Mode::Reduced => {
            let u = run.input.eval(0.0)[0];
            let traj = simulate_reduced(&ReducedState::new(run.x0[0], run.x_s0), |_| u, p, run.dt, run.t_end)?;
            ctx.create("trajectory.csv", |w| write_reduced_csv(w, &header, &thin(&traj, run.record_every)))?;
            detect_spikes(&traj, &run.detector)?
        }
    };
    ctx.json(
        "spikes.json",
        &json!({ "config": run, "seed": ctx.seed, "spike_count": train.len(), "spike_train": train }),
    )?;
    let lines = vec![
        kv("spike_count", train.len()),
        kv("steady_frequency", fmt_num(train.steady_frequency)),
    ];
    ctx.summary(&header, &lines)?;
    println!("{} spikes, steady frequency {:.6}", train.len(), train.steady_frequency);
    Ok(())
}

#[derive(Serialize)]
struct EquilibriumRecord<'a> {
    case: usize,
    u_tilde: f64,
    #[serde(flatten)]
    point: &'a EquilibriumPoint,
}

#[derive(Serialize)]
struct PhasePlaneCase {
    u_tilde: f64,
    alpha_u_tilde: f64,
    n_equilibria: usize,
    kinds: Vec<String>,
    steady_spikes: usize,
    steady_amplitude: f64,
    limit_cycle: bool,
}

pub fn phase_plane(cfg: &Loaded, ctx: &Ctx) -> Result<(), CliError> {
    let run = cfg.config.phase_plane()?;
    let p = &run.model;
    let header = ctx.header("phase-plane", &run);
    let r_grid = linspace(0.0, run.r_max, run.n_r);
    let xs_nc = nullcline_xs(p, &r_grid)?;
    ctx.create("nullcline_xs.csv", |w| write_nullcline_csv(w, &header, &xs_nc))?;

    let mut cases = Vec::new();
    let mut records: Vec<(usize, f64, EquilibriumPoint)> = Vec::new();
    for (i, &u) in run.u_tilde.iter().enumerate() {
        let mut h = header.clone();
        h.push("case", i).push("u_tilde", fmt_num(u));
        let nc = nullcline_r(u, p, &r_grid[1..])?;
        ctx.create(&format!("nullcline_r_{i}.csv"), |w| write_nullcline_csv(w, &h, &nc))?;
        let field = vector_field_grid(
            u,
            p,
            &linspace(0.0, run.r_max, run.n_field),
            &linspace(0.0, run.xs_max, run.n_field),
        );
        ctx.create(&format!("field_{i}.csv"), |w| write_field_csv(w, &h, &field))?;

        let eq = find_equilibria(u, p)?;
        let stats = steady_stats(p, u, &run.scan)?;
        let orbit = simulate_reduced(&ReducedState::new(0.0, 0.0), |_| u, p, run.scan.dt, run.scan.t_end)?;
        let orbit = thin(&orbit, run.orbit_every);
        ctx.create(&format!("orbit_{i}.csv"), |w| write_reduced_csv(w, &h, &orbit))?;

        let case = PhasePlaneCase {
            u_tilde: u,
            alpha_u_tilde: p.alpha * u,
            n_equilibria: eq.len(),
            kinds: eq
                .iter()
                .map(|e| serde_json::to_value(e.kind).map(|v| v.as_str().unwrap_or_default().to_string()))
                .collect::<Result<_, _>>()
                .map_err(std::io::Error::from)?,
            steady_spikes: stats.spikes,
            steady_amplitude: stats.amplitude,
            limit_cycle: stats.amplitude > SETTLED_AMPLITUDE,
        };
        println!(
            "alpha*u_tilde = {:.4}: {} equilibria [{}], limit cycle: {}",
            case.alpha_u_tilde,
            case.n_equilibria,
            case.kinds.join(", "),
            case.limit_cycle
        );
        cases.push(case);
        records.extend(eq.into_iter().map(|e| (i, u, e)));
    }
    let preamble = json!({ "config": run, "seed": ctx.seed });
    ctx.create("equilibria.jsonl", |w| {
        write_jsonl(w, [&preamble])?;
        write_jsonl(
            w,
            records.iter().map(|(case, u_tilde, point)| EquilibriumRecord {
                case: *case,
                u_tilde: *u_tilde,
                point,
            }),
        )
    })?;
    ctx.json("phase_plane.json", &json!({ "config": run, "seed": ctx.seed, "cases": cases }))?;
    let lines: Vec<(String, String)> = cases
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            [
                kv(&format!("case{i}.alpha_u_tilde"), fmt_num(c.alpha_u_tilde)),
                kv(&format!("case{i}.n_equilibria"), c.n_equilibria),
                kv(&format!("case{i}.limit_cycle"), c.limit_cycle),
            ]
        })
        .collect();
    ctx.summary(&header, &lines)
}

pub fn fi(cfg: &Loaded, ctx: &Ctx) -> Result<(), CliError> {
    let run = cfg.config.fi()?;
    let p = &run.model;
    let header = ctx.header("fi", &run);
    let grid = linspace(run.u_min, run.u_max, run.n);
    let points = fi_curve(p, &grid, run.dt, run.t_end, &run.detector)?;
    ctx.create("fi.csv", |w| {
        header.write_to(w)?;
        writeln!(w, "u_tilde,alpha_u_tilde,frequency")?;
        for &(u, f) in &points {
            writeln!(w, "{},{},{}", fmt_num(u), fmt_num(p.alpha * u), fmt_num(f))?;
        }
        Ok(())
    })?;
    let spiking: Vec<&(f64, f64)> = points.iter().filter(|(_, f)| *f > 0.0).collect();
    let mut lines = vec![kv("points", points.len()), kv("spiking_points", spiking.len())];
    if let (Some(first), Some(last)) = (spiking.first(), spiking.last()) {
        lines.push(kv("first_spiking_alpha_u_tilde", fmt_num(p.alpha * first.0)));
        lines.push(kv("last_spiking_alpha_u_tilde", fmt_num(p.alpha * last.0)));
        let fmax = spiking.iter().map(|(_, f)| *f).fold(0.0, f64::max);
        lines.push(kv("max_frequency", fmt_num(fmax)));
    }
    ctx.summary(&header, &lines)?;
    println!("{} of {} grid points spiking", spiking.len(), points.len());
    Ok(())
}

pub fn thresholds(cfg: &Loaded, ctx: &Ctx) -> Result<(), CliError> {
    let p = cfg.config.model()?;
    let scan = cfg.config.scan(&p)?;
    #[derive(Serialize)]
    struct Run {
        model: ModelParams,
        scan: dexcite::analysis::ScanConfig,
    }
    let run = Run { model: p, scan };
    let header = ctx.header("thresholds", &run);
    let (knee_lo, knee_hi) = nullcline_threshold_estimates(&p)?;
    let rep = classify_type(&p, &run.scan)?;
    let th = &rep.thresholds;
    let a = p.alpha;

    println!("alpha*u_lower = {:.4}", a * knee_lo);
    println!("alpha*u_upper = {:.4}", a * knee_hi);
    println!(
        "lower bifurcation: {:?} at alpha*u = {:.6}{}",
        th.lower_bifurcation.kind,
        a * th.lower_bifurcation.u_tilde,
        th.rest_fold.map_or(String::new(), |f| format!(", resting branch folds at {:.6}", a * f))
    );
    println!(
        "upper bifurcation: {:?} at alpha*u = {:.6}",
        th.upper_bifurcation.kind,
        a * th.upper_bifurcation.u_tilde
    );
    println!("confirmed by simulation: {}", th.confirmed);
    println!("type: {:?} (frequency-ratio rule: {:?})", rep.hodgkin_type, rep.ratio_rule_type);
    for (e, f, r) in &rep.onset {
        println!("  f(u_lower*(1+{e})) = {f:.6}, ratio to f(mid) = {r:.4}");
    }

    ctx.json(
        "thresholds.json",
        &json!({
            "config": run,
            "seed": ctx.seed,
            "alpha_u_lower": a * knee_lo,
            "alpha_u_upper": a * knee_hi,
            "report": rep,
        }),
    )?;
    ctx.create("fi_curve.csv", |w| {
        header.write_to(w)?;
        writeln!(w, "u_tilde,alpha_u_tilde,frequency")?;
        for &(u, f) in &rep.points {
            writeln!(w, "{},{},{}", fmt_num(u), fmt_num(a * u), fmt_num(f))?;
        }
        Ok(())
    })?;
    let mut lines = vec![
        kv("alpha_u_lower", fmt_num(a * knee_lo)),
        kv("alpha_u_upper", fmt_num(a * knee_hi)),
        kv("lower_bifurcation.kind", format!("{:?}", th.lower_bifurcation.kind)),
        kv("lower_bifurcation.alpha_u", fmt_num(a * th.lower_bifurcation.u_tilde)),
        kv("upper_bifurcation.kind", format!("{:?}", th.upper_bifurcation.kind)),
        kv("upper_bifurcation.alpha_u", fmt_num(a * th.upper_bifurcation.u_tilde)),
        kv("confirmed", th.confirmed),
        kv("hodgkin_type", format!("{:?}", rep.hodgkin_type)),
        kv("ratio_rule_type", format!("{:?}", rep.ratio_rule_type)),
        kv("f_mid", fmt_num(rep.f_mid)),
        kv("min_spiking_frequency", fmt_num(rep.min_spiking_frequency)),
    ];
    if let Some(f) = th.rest_fold {
        lines.push(kv("rest_fold.alpha_u", fmt_num(a * f)));
    }
    for (e, f, r) in &rep.onset {
        lines.push(kv(&format!("onset[{e}].frequency"), fmt_num(*f)));
        lines.push(kv(&format!("onset[{e}].ratio"), fmt_num(*r)));
    }
    ctx.summary(&header, &lines)
}

pub fn navigate(cfg: &Loaded, ctx: &Ctx) -> Result<(), CliError> {
    let sc = cfg.config.navigate()?;
    let header = ctx.header("navigate", &sc);
    let (traj, m) = run_scenario(&sc)?;
    ctx.create("navigation.csv", |w| write_nav_csv(w, &header, &traj, &sc.params))?;
    ctx.json(
        "metrics.json",
        &json!({
            "config": sc,
            "seed": ctx.seed,
            "duty_cycle": m.duty_cycle,
            "max_tracking_error_after_transient": m.max_tracking_error_after_transient,
            "min_clearance_per_obstacle": m.min_clearance_per_obstacle,
        }),
    )?;
    let mut lines = vec![
        kv("duty_cycle", fmt_num(m.duty_cycle)),
        kv(
            "max_tracking_error_after_transient",
            fmt_num(m.max_tracking_error_after_transient),
        ),
    ];
    for (i, c) in m.min_clearance_per_obstacle.iter().enumerate() {
        lines.push(kv(&format!("min_clearance[{i}]"), fmt_num(*c)));
    }
    ctx.summary(&header, &lines)?;
    println!(
        "duty cycle {:.4}, max tracking error after transient {:.4}",
        m.duty_cycle, m.max_tracking_error_after_transient
    );
    for (i, c) in m.min_clearance_per_obstacle.iter().enumerate() {
        println!("obstacle {i}: min clearance {c:.4}");
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Theorem1,
    Riccati,
    Lemma1,
    Assumptions,
    Gradient,
    All,
}

/// Randomized runs per suite.
pub const SUITE_RUNS: usize = 20;

pub fn verify(cfg: Option<&Loaded>, suite: Suite, ctx: &Ctx) -> Result<(), CliError> {
    let configured = cfg.map(|c| c.config.model()).transpose()?;
    let p = configured.unwrap_or_else(ModelParams::type1);
    let assumption_sets = match configured {
        Some(m) => vec![m],
        None => vec![ModelParams::type1(), ModelParams::type2()],
    };
    let seed = ctx.seed;
    let wanted = |s: Suite| suite == Suite::All || suite == s;
    let mut reports: Vec<SuiteReport> = Vec::new();
    if wanted(Suite::Theorem1) {
        reports.push(theorem1_suite(&p, seed, &THEOREM1_DIMS, SUITE_RUNS)?);
    }
    if wanted(Suite::Riccati) {
        reports.push(riccati_suite(&p, seed, SUITE_RUNS)?);
    }
    if wanted(Suite::Lemma1) {
        reports.push(lemma1_suite(&p, seed, SUITE_RUNS)?);
    }
    if wanted(Suite::Assumptions) {
        reports.push(assumptions_suite(&assumption_sets, seed)?);
    }
    if wanted(Suite::Gradient) {
        reports.push(gradient_suite(&p, seed, &[2, 5], 100)?);
    }
    for r in &reports {
        for c in &r.checks {
            println!(
                "{} {}: {}: {:.3e} (limit {:.3e})",
                if c.passed { "PASS" } else { "FAIL" },
                r.name,
                c.label,
                c.value,
                c.limit
            );
        }
        if r.name == "riccati" {
            println!("max residual {:.3e}", r.checks[0].value);
        }
    }
    let name = clap::ValueEnum::to_possible_value(&suite).map_or("all".to_string(), |v| v.get_name().to_string());
    ctx.json(
        &format!("verify_{name}.json"),
        &json!({
            "config": { "model": p, "assumption_sets": assumption_sets, "runs": SUITE_RUNS },
            "seed": seed,
            "suites": reports,
        }),
    )?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Property(failed.join(", ")))
    }
}
