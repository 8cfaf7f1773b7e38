//! The five subcommands. Each writes its data files and a JSON summary to
//! the output directory.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use shuttle_core::energetics::{min_time_for_budget, perturbative_energy_full};
use shuttle_core::optimality::audit_bounded_optimality;
use shuttle_core::tdse::{simulate, simulate_converged, simulate_with_snapshots, ConvergedRun};
use shuttle_core::{Error, MinEnergyConstant, PotentialKind, Protocol, ProtocolKind, SimulationSpec, Verdict};

use crate::config::{RunPlan, ScenarioConfig};
use crate::error::CliError;
use crate::output::{num, opt, report_lines, write, Csv, Summary};

const TRAJECTORY_HEADER: [&str; 6] = ["t_s", "xc_m", "xc_dot_mps", "xc_ddot_mps2", "u_m", "x0_m"];
const ENERGY_HEADER: [&str; 7] = ["tf_s", "protocol", "delta_m", "Ep_avg_J", "Epp_avg_J", "Epp_closed_J", "Epp_over_E0"];
const FIDELITY_HEADER: [&str; 14] = [
    "tf_s",
    "protocol",
    "kind",
    "delta_m",
    "fidelity",
    "excitation_energy_J",
    "norm_drift",
    "converged",
    "fidelity_change",
    "refinements",
    "n_points",
    "half_width_m",
    "dt_s",
    "status",
];
const SNAPSHOT_HEADER: [&str; 4] = ["t_s", "q_m", "re_psi", "im_psi"];

/// Inputs shared by every command.
pub struct Context {
    /// Effective configuration, defaults filled in.
    pub config: ScenarioConfig,
    pub plan: RunPlan,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Context {
    pub fn new(config: &ScenarioConfig, out_dir: Option<PathBuf>, seed: u64) -> Result<Self, CliError> {
        let mut config = config.effective()?;
        if let Some(dir) = out_dir {
            config.output.dir = dir;
        }
        let plan = config.plan()?;
        Ok(Self {
            out_dir: config.output.dir.clone(),
            config,
            plan,
            seed,
        })
    }

    fn finish(&self, name: &str, results: Vec<serde_json::Value>, warnings: Vec<String>) -> Result<(), CliError> {
        for w in &warnings {
            eprintln!("warning: {w}");
        }
        write(&self.out_dir, "scenario.toml", &self.config.to_toml())?;
        let summary = Summary {
            config_echo: &self.config,
            feasibility: self.plan.feasibility(),
            results,
            warnings,
        };
        write(&self.out_dir, &format!("{name}.json"), &summary.to_json())?;
        Ok(())
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Feasible => "feasible",
        Verdict::BoundInactive => "bound inactive",
        Verdict::Infeasible => "infeasible",
        Verdict::Unconstrained => "unconstrained",
    }
}

/// Feasibility of the configured protocol, the energy-budget time and,
/// for a feasible bounded optimum, the randomized optimality audit.
pub fn check(ctx: &Context) -> Result<(), CliError> {
    let plan = &ctx.plan;
    let f = plan.feasibility();
    let mut lines = vec![
        ("protocol", plan.protocol.kind.to_string()),
        ("tf [s]", num(f.tf)),
        ("delta [m]", num(f.delta)),
        ("delta_min [m]", num(f.delta_min)),
        ("delta0 [m]", num(f.delta_star)),
        ("tf_min [s]", num(f.tf_min)),
        ("tf_star [s]", num(f.tf_star)),
        ("perturbative tf [s]", opt(f.perturbative_threshold)),
        ("verdict", verdict_name(f.verdict).to_string()),
    ];
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    if let Some(budget) = plan.budget {
        for (label, constant) in [
            ("published", MinEnergyConstant::Published),
            ("oracle", MinEnergyConstant::Oracle),
            ("configured", plan.min_energy_constant),
        ] {
            let tf = min_time_for_budget(budget, &plan.trap, constant)?;
            lines.push((label, format!("tf >= {} s for {} J", num(tf), num(budget))));
            results.push(json!({ "budget_J": budget, "constant": constant, "tf_min_s": tf }));
        }
    }
    if f.verdict == Verdict::BoundInactive {
        warnings.push(format!(
            "bound {:e} m exceeds delta0 = {:e} m; UnboundedOptimal applies",
            f.delta, f.delta_star
        ));
    }
    if plan.protocol.kind == ProtocolKind::BoundedOptimal && f.verdict == Verdict::Feasible && plan.audit_samples > 0 {
        let protocol = Protocol::new(plan.protocol)?;
        let audit = audit_bounded_optimality(&protocol, plan.audit_samples, ctx.seed)?;
        lines.push((
            "optimality audit",
            format!(
                "{} of {} random admissible controls beaten, min excess {}",
                audit.costs.iter().filter(|&&c| audit.optimal_cost <= c).count(),
                audit.costs.len(),
                num(audit.min_excess)
            ),
        ));
        if !audit.optimum_dominates() {
            warnings.push("a random admissible control beat the bounded optimum".into());
        }
        results.push(json!({
            "audit": {
                "seed": ctx.seed,
                "samples": audit.costs.len(),
                "optimal_cost": audit.optimal_cost,
                "min_excess": audit.min_excess,
                "max_residual": audit.max_residual,
                "dominates": audit.optimum_dominates(),
            }
        }));
    }
    print!("{}", report_lines(&lines));
    ctx.finish("check", results, warnings)?;
    if f.verdict == Verdict::Infeasible {
        return Err(CliError::Infeasible(format!(
            "tf = {:e} s is below tf_min = {:e} s for delta = {:e} m",
            f.tf, f.tf_min, f.delta
        )));
    }
    Ok(())
}

/// One trajectory CSV per requested protocol at the configured time.
pub fn design(ctx: &Context) -> Result<(), CliError> {
    let plan = &ctx.plan;
    let tf = plan.protocol.duration;
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    let mut infeasible = None;
    for &kind in &plan.protocols {
        let table = match plan
            .protocol_spec(kind, tf, plan.delta)
            .and_then(Protocol::new)
            .and_then(|p| p.sample(plan.samples))
        {
            Ok(t) => t,
            Err(e) if e.is_infeasible() => {
                warnings.push(format!("{kind} skipped: {e}"));
                infeasible = Some(e);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut csv = Csv::new(&TRAJECTORY_HEADER);
        for p in table.points() {
            csv.row([p.t, p.xc, p.xc_dot, p.xc_ddot, p.u, p.x0].map(num));
        }
        let file = format!("trajectory_{kind}.csv");
        write(&ctx.out_dir, &file, &csv.into_string())?;
        let u = table.points().iter().map(|p| p.u);
        results.push(json!({
            "protocol": kind,
            "file": file,
            "points": table.points().len(),
            "u_min_m": u.clone().fold(f64::INFINITY, f64::min),
            "u_max_m": u.fold(f64::NEG_INFINITY, f64::max),
        }));
    }
    ctx.finish("design", results, warnings)?;
    match infeasible {
        Some(e) => Err(e.into()),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct EnergyRow {
    tf_s: f64,
    protocol: ProtocolKind,
    delta_m: f64,
    #[serde(rename = "Ep_avg_J")]
    ep_avg: Option<f64>,
    #[serde(rename = "Epp_avg_J")]
    epp_avg: Option<f64>,
    #[serde(rename = "Epp_closed_J")]
    epp_closed: Option<f64>,
    #[serde(rename = "Epp_over_E0")]
    epp_over_e0: Option<f64>,
}

/// Bounds paired with each protocol: every sweep bound for the bounded
/// optimum, none for the others.
fn bound_choices(plan: &RunPlan, kind: ProtocolKind) -> Vec<Option<f64>> {
    if kind == ProtocolKind::BoundedOptimal {
        plan.deltas.iter().copied().map(Some).collect()
    } else {
        vec![None]
    }
}

/// Anharmonic and harmonic averages over the sweep, sorted by protocol,
/// bound and time.
pub fn energy(ctx: &Context) -> Result<(), CliError> {
    let plan = &ctx.plan;
    let tasks: Vec<(ProtocolKind, Option<f64>, f64)> = plan
        .protocols
        .iter()
        .flat_map(|&k| bound_choices(plan, k).into_iter().map(move |d| (k, d)))
        .flat_map(|(k, d)| plan.tfs.iter().map(move |&tf| (k, d, tf)))
        .collect();
    let rows: Vec<(EnergyRow, Option<Error>)> = tasks
        .par_iter()
        .map(|&(kind, delta, tf)| {
            let computed = plan
                .protocol_spec(kind, tf, delta.unwrap_or(plan.delta))
                .and_then(Protocol::new)
                .and_then(|p| p.sample(64))
                .and_then(|table| {
                    let r = perturbative_energy_full(0, &table, &plan.trap, &plan.consts, &plan.quadrature)?;
                    Ok((table.spec().effective_bound(), r))
                });
            match computed {
                Ok((d, r)) => (
                    EnergyRow {
                        tf_s: tf,
                        protocol: kind,
                        delta_m: d,
                        ep_avg: Some(r.harmonic_avg),
                        epp_avg: Some(r.anharmonic_avg),
                        epp_closed: r.closed_form_avg,
                        epp_over_e0: Some(r.anharmonic_avg / r.e0),
                    },
                    None,
                ),
                Err(e) => (
                    EnergyRow {
                        tf_s: tf,
                        protocol: kind,
                        delta_m: delta.unwrap_or(f64::NAN),
                        ep_avg: None,
                        epp_avg: None,
                        epp_closed: None,
                        epp_over_e0: None,
                    },
                    Some(e),
                ),
            }
        })
        .collect();

    let mut csv = Csv::new(&ENERGY_HEADER);
    let mut warnings = Vec::new();
    let mut failed = 0;
    for (r, err) in &rows {
        let delta = if r.delta_m.is_nan() { String::new() } else { num(r.delta_m) };
        csv.row([
            num(r.tf_s),
            r.protocol.to_string(),
            delta,
            opt(r.ep_avg),
            opt(r.epp_avg),
            opt(r.epp_closed),
            opt(r.epp_over_e0),
        ]);
        if let Some(e) = err {
            warnings.push(format!("{} at tf = {:e} s skipped: {e}", r.protocol, r.tf_s));
            if !e.is_infeasible() {
                failed += 1;
            }
        }
    }
    write(&ctx.out_dir, "energy.csv", &csv.into_string())?;
    let results = rows
        .iter()
        .map(|(r, _)| serde_json::to_value(r).expect("row serializes"))
        .collect();
    ctx.finish("energy", results, warnings)?;
    if failed > 0 {
        return Err(CliError::RowsFailed {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct FidelityRow {
    tf_s: f64,
    protocol: ProtocolKind,
    kind: PotentialKind,
    delta_m: Option<f64>,
    fidelity: Option<f64>,
    excitation_energy_j: Option<f64>,
    norm_drift: Option<f64>,
    converged: Option<bool>,
    fidelity_change: Option<f64>,
    refinements: Option<usize>,
    n_points: Option<usize>,
    half_width_m: Option<f64>,
    dt_s: Option<f64>,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl FidelityRow {
    fn failed(&self) -> bool {
        matches!(self.status, "window_overflow" | "numerical")
    }

    fn csv_fields(&self) -> [String; 14] {
        let int = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
        [
            num(self.tf_s),
            self.protocol.to_string(),
            self.kind.to_string(),
            opt(self.delta_m),
            opt(self.fidelity),
            opt(self.excitation_energy_j),
            opt(self.norm_drift),
            self.converged.map(|c| c.to_string()).unwrap_or_default(),
            opt(self.fidelity_change),
            int(self.refinements),
            int(self.n_points),
            opt(self.half_width_m),
            opt(self.dt_s),
            self.status.to_string(),
        ]
    }
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::Infeasible { .. } => "infeasible",
        Error::BoundInactive { .. } => "bound_inactive",
        Error::WindowOverflow { .. } => "window_overflow",
        Error::Numerical(_) | Error::GridMismatch(_) => "numerical",
        Error::Config { .. } | Error::Domain { .. } => "invalid",
    }
}

fn run_one(plan: &RunPlan, spec: &SimulationSpec) -> shuttle_core::Result<ConvergedRun> {
    if plan.converge {
        simulate_converged(spec, &plan.trap, &plan.consts, plan.tolerance, plan.max_refinements)
    } else {
        let result = simulate(spec, &plan.trap, &plan.consts)?;
        Ok(ConvergedRun {
            result,
            fidelity_change: f64::NAN,
            refinements: 0,
            converged: false,
        })
    }
}

fn fidelity_row(
    plan: &RunPlan,
    kind: PotentialKind,
    protocol: ProtocolKind,
    delta: Option<f64>,
    tf: f64,
    run: &shuttle_core::Result<ConvergedRun>,
) -> FidelityRow {
    let mut row = FidelityRow {
        tf_s: tf,
        protocol,
        kind,
        delta_m: delta,
        fidelity: None,
        excitation_energy_j: None,
        norm_drift: None,
        converged: None,
        fidelity_change: None,
        refinements: None,
        n_points: None,
        half_width_m: None,
        dt_s: None,
        status: "ok",
        error: None,
    };
    match run {
        Ok(run) => {
            let r = &run.result;
            row.fidelity = Some(r.fidelity);
            row.excitation_energy_j = Some(r.excitation_energy);
            row.norm_drift = Some(r.norm_drift);
            if plan.converge {
                row.converged = Some(run.converged);
                row.fidelity_change = Some(run.fidelity_change);
            }
            row.refinements = Some(run.refinements);
            row.n_points = Some(r.grid.n_points);
            row.half_width_m = Some(r.grid.half_width);
            row.dt_s = Some(r.grid.dt);
        }
        Err(e) => {
            row.status = status_of(e);
            row.error = Some(e.to_string());
        }
    }
    row
}

fn sweep_row(plan: &RunPlan, kind: PotentialKind, protocol: ProtocolKind, delta: Option<f64>, tf: f64) -> FidelityRow {
    let run = plan
        .protocol_spec(protocol, tf, delta.unwrap_or(plan.delta))
        .map(|p| SimulationSpec {
            kind,
            protocol: p,
            ..plan.simulation
        })
        .and_then(|spec| run_one(plan, &spec));
    fidelity_row(plan, kind, protocol, delta, tf, &run)
}

fn fidelity_csv(rows: &[FidelityRow]) -> String {
    let mut csv = Csv::new(&FIDELITY_HEADER);
    for r in rows {
        csv.row(r.csv_fields());
    }
    csv.into_string()
}

fn row_warnings(rows: &[FidelityRow]) -> Vec<String> {
    let mut warnings = Vec::new();
    for r in rows {
        if let Some(e) = &r.error {
            warnings.push(format!("{} {} at tf = {:e} s: {e}", r.protocol, r.kind, r.tf_s));
        } else if r.converged == Some(false) {
            warnings.push(format!(
                "{} {} at tf = {:e} s: fidelity not converged (last change {:e})",
                r.protocol,
                r.kind,
                r.tf_s,
                r.fidelity_change.unwrap_or(f64::NAN)
            ));
        }
    }
    warnings
}

/// A single run of the configured protocol and potential.
pub fn simulate_cmd(ctx: &Context) -> Result<(), CliError> {
    let plan = &ctx.plan;
    let p = plan.protocol;
    let delta = (p.kind == ProtocolKind::BoundedOptimal).then_some(plan.delta);
    let spec = SimulationSpec {
        protocol: p,
        ..plan.simulation
    };
    let run = Ok(run_one(plan, &spec)?);
    let row = fidelity_row(plan, spec.kind, p.kind, delta, p.duration, &run);
    let run = run?;
    // Rerun on the final grid to record the evolution.
    if plan.snapshots > 0 {
        let (_, shots) = simulate_with_snapshots(&run.result.grid, &spec, &plan.trap, &plan.consts, plan.snapshots)?;
        let mut csv = Csv::new(&SNAPSHOT_HEADER);
        for psi in &shots {
            let q = psi.grid.positions();
            for (q, a) in q.iter().zip(&psi.amplitudes) {
                csv.row([psi.t, *q, a.re, a.im].map(num));
            }
        }
        write(&ctx.out_dir, "snapshots.csv", &csv.into_string())?;
    }
    let rows = [row];
    write(&ctx.out_dir, "fidelity.csv", &fidelity_csv(&rows))?;
    println!(
        "{} {} tf = {} s: F = {}",
        p.kind,
        spec.kind,
        num(p.duration),
        opt(rows[0].fidelity)
    );
    let results = vec![serde_json::to_value(&rows[0]).expect("row serializes")];
    ctx.finish("simulate", results, row_warnings(&rows))
}

/// Fidelity over the sweep times for every protocol and potential,
/// computed concurrently and written in (protocol, kind, bound, time) order.
pub fn sweep(ctx: &Context) -> Result<(), CliError> {
    let plan = &ctx.plan;
    let mut tasks = Vec::new();
    for &protocol in &plan.protocols {
        for &kind in &plan.kinds {
            for delta in bound_choices(plan, protocol) {
                for &tf in &plan.tfs {
                    tasks.push((protocol, kind, delta, tf));
                }
            }
        }
    }
    let rows: Vec<FidelityRow> = tasks
        .par_iter()
        .map(|&(protocol, kind, delta, tf)| sweep_row(plan, kind, protocol, delta, tf))
        .collect();
    write(&ctx.out_dir, "fidelity.csv", &fidelity_csv(&rows))?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    let results = rows
        .iter()
        .map(|r| serde_json::to_value(r).expect("row serializes"))
        .collect();
    ctx.finish("sweep", results, row_warnings(&rows))?;
    if failed > 0 {
        return Err(CliError::RowsFailed {
            failed,
            total: rows.len(),
        });
    }
    Ok(())
}
