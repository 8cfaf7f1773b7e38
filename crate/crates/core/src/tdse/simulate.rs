//! One-call transport simulations with default grids and refinement.

use serde::{Deserialize, Serialize};

use super::ground::imaginary_time_ground_state;
use super::grid::{Frame, GridSpec};
use super::propagate::{propagate_with_snapshots, target_offset, PropagationConfig};
use super::state::{excitation_energy, fidelity, transport_mode, Wavefunction};
use crate::error::{Error, Result};
use crate::trajectory::{Protocol, ProtocolSpec, TrajectoryTable};
use crate::trap::{potential_slope, PhysicalConstants, PotentialKind, TrapSpec};

/// Samples used to scan a protocol when sizing the default grid.
const SCAN: usize = 4096;
/// Smallest default point count.
const MIN_POINTS: usize = 4096;
/// Largest default point count; frames needing more are refused.
const MAX_POINTS: usize = 1 << 18;
/// Default steps per trap period.
const STEPS_PER_PERIOD: f64 = 2048.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InitialState {
    /// Harmonic ground mode, the n = 0 transport mode at t = 0.
    #[default]
    HarmonicGround,
    /// Ground state of the full potential, relaxed in imaginary time.
    RelaxedGround,
}

impl InitialState {
    pub const ALL: [InitialState; 2] = [InitialState::HarmonicGround, InitialState::RelaxedGround];

    pub fn name(self) -> &'static str {
        match self {
            InitialState::HarmonicGround => "HarmonicGround",
            InitialState::RelaxedGround => "RelaxedGround",
        }
    }
}

impl std::fmt::Display for InitialState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for InitialState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InitialState::ALL
            .into_iter()
            .find(|i| i.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("initial", format!("unknown initial state `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationSpec {
    pub kind: PotentialKind,
    pub protocol: ProtocolSpec,
    pub compensate: bool,
    pub frame: Frame,
    pub initial: InitialState,
    pub n_points: Option<usize>,
    pub half_width: Option<f64>,
    pub dt: Option<f64>,
}

impl SimulationSpec {
    pub fn new(kind: PotentialKind, protocol: ProtocolSpec) -> Self {
        Self {
            kind,
            protocol,
            compensate: false,
            frame: Frame::ComovingXc,
            initial: InitialState::HarmonicGround,
            n_points: None,
            half_width: None,
            dt: None,
        }
    }

    fn propagation(&self) -> PropagationConfig {
        PropagationConfig {
            kind: self.kind,
            protocol: self.protocol,
            compensate: self.compensate,
            mode_index: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    /// Overlap modulus with the n = 0 transport mode at tf.
    pub fidelity: f64,
    /// |‖ψ(tf)‖ − ‖ψ(0)‖|.
    pub norm_drift: f64,
    /// Harmonic excitation energy of the final state [J].
    pub excitation_energy: f64,
    pub grid: GridSpec,
    pub steps: usize,
    #[serde(skip)]
    pub final_state: Option<Wavefunction>,
}

/// Where the packet should be at `t`, with its velocity: on the trap
/// center when the inertial force is compensated, on xc otherwise.
fn expected_path(spec: &SimulationSpec, protocol: &Protocol, t: f64) -> Result<(f64, f64)> {
    if spec.compensate {
        let m = protocol.trap_motion_interior(t)?;
        Ok((m.x0, m.x0_dot))
    } else {
        let k = protocol.kinematics(t)?;
        Ok((k.xc, k.xc_dot))
    }
}

/// Largest deviation from the ideal harmonic trajectory that the
/// anharmonic force can drive, `max|V′(u) − mω0²u| / mω0²`. A compensated
/// packet sits on the trap center and feels no such force.
fn forced_excursion(spec: &SimulationSpec, protocol: &Protocol, trap: &TrapSpec) -> f64 {
    if spec.compensate {
        return 0.0;
    }
    let tf = protocol.duration();
    let k = trap.stiffness();
    (0..=SCAN)
        .map(|j| {
            let u = protocol.interior_control(tf * j as f64 / SCAN as f64);
            (potential_slope(spec.kind, trap, u) - k * u).abs() / k
        })
        .fold(0.0, f64::max)
}

/// Window sized to the packet's expected path in the chosen frame.
///
/// Center: middle of the range of the expected packet position. Half width: `64σ` plus half that
/// range plus four forced excursions. Points: smallest power of two ≥ 4096
/// with `Δq ≤ σ/16` and `Δq ≤ π/k` for the largest expected wavenumber `k`.
/// Time step: 2048 per trap period. Explicit overrides in `spec` win.
pub fn default_grid(spec: &SimulationSpec, trap: &TrapSpec, consts: &PhysicalConstants) -> Result<GridSpec> {
    let protocol = Protocol::new(spec.protocol)?;
    spec.frame.check(&protocol)?;
    let sigma = trap.ground_width(consts);
    let tf = protocol.duration();
    let (mut lo, mut hi, mut v_rel) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for j in 0..=SCAN {
        let t = tf * j as f64 / SCAN as f64;
        let (x, v) = expected_path(spec, &protocol, t)?;
        let frame = spec.frame.motion(&protocol, t);
        lo = lo.min(x - frame.r);
        hi = hi.max(x - frame.r);
        v_rel = v_rel.max((v - frame.v).abs());
    }
    let excursion = forced_excursion(spec, &protocol, trap);
    let center = 0.5 * (lo + hi);
    let half_width = spec
        .half_width
        .unwrap_or(64.0 * sigma + 0.5 * (hi - lo) + 4.0 * excursion);
    let n_points = match spec.n_points {
        Some(n) => n,
        None => {
            let k_max = trap.mass * (v_rel + trap.omega0 * excursion) / consts.hbar + 16.0 / sigma;
            let spacing = (sigma / 16.0).min(std::f64::consts::PI / k_max);
            let needed = (2.0 * half_width / spacing).ceil() as usize;
            if needed > MAX_POINTS {
                return Err(Error::config(
                    "frame",
                    format!("{} would need {needed} grid points; pick a frame that follows the packet", spec.frame),
                ));
            }
            needed.next_power_of_two().max(MIN_POINTS)
        }
    };
    let dt = spec
        .dt
        .unwrap_or(2.0 * std::f64::consts::PI / (trap.omega0 * STEPS_PER_PERIOD));
    GridSpec::new(n_points, half_width, center, dt, spec.frame)
}

fn initial_state(
    spec: &SimulationSpec,
    grid: &GridSpec,
    table: &TrajectoryTable,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    match spec.initial {
        InitialState::HarmonicGround => transport_mode(0, 0.0, table, grid, trap, consts),
        // Every frame starts at rest on the trap center at the origin.
        InitialState::RelaxedGround => imaginary_time_ground_state(spec.kind, grid, trap, consts),
    }
}

/// Run `spec` on the given grid.
pub fn simulate_on(
    grid: &GridSpec,
    spec: &SimulationSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<SimulationResult> {
    Ok(simulate_with_snapshots(grid, spec, trap, consts, 0)?.0)
}

/// As [`simulate_on`], also returning up to `snapshots` evenly spaced states.
pub fn simulate_with_snapshots(
    grid: &GridSpec,
    spec: &SimulationSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
    snapshots: usize,
) -> Result<(SimulationResult, Vec<Wavefunction>)> {
    if grid.frame != spec.frame {
        return Err(Error::config("frame", "grid frame differs from the simulation frame"));
    }
    let protocol = Protocol::new(spec.protocol)?;
    let table = protocol.sample(256)?;
    let psi0 = initial_state(spec, grid, &table, trap, consts)?;
    let (mut out, shots) = propagate_with_snapshots(&psi0, &spec.propagation(), &table, trap, consts, snapshots)?;
    let tf = protocol.duration();
    out.center = target_offset(spec.frame, &protocol, tf);
    let target = transport_mode(0, tf, &table, grid, trap, consts)?;
    let steps = ((tf / grid.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let result = SimulationResult {
        fidelity: fidelity(&target, &out)?,
        norm_drift: (out.norm() - psi0.norm()).abs(),
        excitation_energy: excitation_energy(&out, trap, consts),
        grid: *grid,
        steps,
        final_state: Some(out),
    };
    Ok((result, shots))
}

/// Run `spec` on its default (or overridden) grid.
pub fn simulate(spec: &SimulationSpec, trap: &TrapSpec, consts: &PhysicalConstants) -> Result<SimulationResult> {
    simulate_on(&default_grid(spec, trap, consts)?, spec, trap, consts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergedRun {
    /// Result on the finest grid tried.
    pub result: SimulationResult,
    /// Fidelity change over the last refinement.
    pub fidelity_change: f64,
    pub refinements: usize,
    pub converged: bool,
}

/// Halve the time step until the fidelity moves by less than `tolerance`,
/// then confirm by doubling the points and halving the step once more.
/// At most `max_refinements` runs follow the first one.
pub fn simulate_converged(
    spec: &SimulationSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
    tolerance: f64,
    max_refinements: usize,
) -> Result<ConvergedRun> {
    let mut grid = default_grid(spec, trap, consts)?;
    let mut result = simulate_on(&grid, spec, trap, consts)?;
    let mut change = f64::INFINITY;
    let mut settled = false;
    for refinements in 1..=max_refinements {
        let next_grid = if settled { grid.refined() } else { GridSpec { dt: 0.5 * grid.dt, ..grid } };
        let next = simulate_on(&next_grid, spec, trap, consts)?;
        change = (next.fidelity - result.fidelity).abs();
        if settled && change < tolerance {
            return Ok(ConvergedRun {
                result: next,
                fidelity_change: change,
                refinements,
                converged: true,
            });
        }
        // A failed full check keeps the doubled grid and resumes halving.
        settled = !settled && change < tolerance;
        grid = next_grid;
        result = next;
    }
    Ok(ConvergedRun {
        result,
        fidelity_change: change,
        refinements: max_refinements,
        converged: false,
    })
}
