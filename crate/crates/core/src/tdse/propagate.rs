//! Symmetric split-operator propagation in a frame following `R(t)`.
//!
//! With `q = x − R` and `ψ = exp(imṘq/ħ)φ`, the lab Hamiltonian
//! `p²/2m + V(x − x0) − c·m x ẍ0` (c = 1 with compensation) becomes
//!
//! `p²/2m + V(q + R − x0) + m(R̈ − c·ẍ0)q` + terms depending on t only.
//!
//! Jumps of `Ṙ` or, with compensation, of `ẋ0` at `t = 0` and `t = tf`
//! act as momentum kicks `exp(im(c·Δẋ0 − ΔṘ)q/ħ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{Frame, GridSpec};
use super::state::{Spectral, Wavefunction};
use crate::error::{Error, Result};
use crate::trajectory::{Protocol, ProtocolKind, ProtocolSpec, TrajectoryTable};
use crate::trap::{potential_value, PhysicalConstants, PotentialKind, TrapSpec};

/// Grid points at each end checked for leakage.
pub const EDGE_POINTS: usize = 5;
/// Largest probability allowed in the edge points.
pub const EDGE_PROBABILITY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    pub kind: PotentialKind,
    pub protocol: ProtocolSpec,
    /// Add the force `m ẍ0` that cancels the trap's inertial force.
    pub compensate: bool,
    /// Transport mode index n of the initial and target states.
    pub mode_index: u32,
}

/// Check that the quartic trap stays trap-like over every argument
/// `q + R − x0` the run will evaluate.
fn check_quartic_window(grid: &GridSpec, protocol: &Protocol, trap: &TrapSpec) -> Result<()> {
    let limit = trap.quartic_dominance_radius();
    let tf = protocol.duration();
    let mut reach: f64 = 0.0;
    for j in 0..=4096 {
        let t = tf * j as f64 / 4096.0;
        for t in [t, (t - 1e-9 * tf).max(0.0), (t + 1e-9 * tf).min(tf)] {
            let offset = grid.frame.motion(protocol, t).r - protocol.trap_position(t);
            reach = reach
                .max((grid.center - grid.half_width + offset).abs())
                .max((grid.center + grid.half_width + offset).abs());
        }
    }
    if reach >= limit {
        return Err(Error::config(
            "half_width_m",
            format!("potential evaluated out to {reach:e} m, where −ηu⁴ overtakes the harmonic term (limit {limit:e} m)"),
        ));
    }
    Ok(())
}

struct Propagator<'a> {
    config: &'a PropagationConfig,
    protocol: &'a Protocol,
    trap: &'a TrapSpec,
    hbar: f64,
    grid: GridSpec,
    q: Vec<f64>,
    spectral: Spectral,
    steps: usize,
    h: f64,
    phase: Vec<Complex64>,
    kinetic: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    fn new(
        grid: GridSpec,
        config: &'a PropagationConfig,
        table: &'a TrajectoryTable,
        trap: &'a TrapSpec,
        consts: &PhysicalConstants,
    ) -> Result<Self> {
        let protocol = table.protocol();
        if *protocol.spec() != config.protocol {
            return Err(Error::config("protocol", "propagation config and trajectory table disagree"));
        }
        if (protocol.spec().omega0 - trap.omega0).abs() > 1e-12 * trap.omega0 {
            return Err(Error::config("omega0_rad_s", "trajectory designed for a different ω0"));
        }
        config.kind.validate(trap)?;
        grid.frame.check(protocol)?;
        grid.check_resolution(trap.ground_width(consts))?;
        if config.compensate && protocol.kind() != ProtocolKind::Polynomial5 {
            return Err(Error::config(
                "compensate",
                format!("compensation needs a twice-differentiable trap path; {} has jumps", protocol.kind()),
            ));
        }
        if config.kind == PotentialKind::HarmonicPlusQuartic {
            check_quartic_window(&grid, protocol, trap)?;
        }
        let tf = protocol.duration();
        let steps = ((tf / grid.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let h = tf / steps as f64;
        let c = -consts.hbar * h / (2.0 * trap.mass);
        let kinetic = grid.wavenumbers().iter().map(|k| Complex64::cis(c * k * k)).collect();
        Ok(Self {
            config,
            protocol,
            trap,
            hbar: consts.hbar,
            q: grid.positions(),
            spectral: Spectral::new(grid.n_points),
            grid,
            steps,
            h,
            phase: vec![Complex64::default(); grid.n_points],
            kinetic,
        })
    }

    fn compensation(&self) -> f64 {
        if self.config.compensate {
            1.0
        } else {
            0.0
        }
    }

    /// Wavenumber of the kick when the motion switches on at `t = 0`
    /// (`start`) or off at `t = tf`. Frames and trap are at rest outside `[0, tf]`.
    fn kick(&self, start: bool) -> f64 {
        let t = if start { 0.0 } else { self.protocol.duration() };
        let v_frame = self.grid.frame.motion(self.protocol, t).v;
        let v_trap = if self.config.compensate {
            self.protocol.trap_motion_interior(t).map(|m| m.x0_dot).unwrap_or(0.0)
        } else {
            0.0
        };
        let jump = self.trap.mass * (self.compensation() * v_trap - v_frame) / self.hbar;
        if start {
            jump
        } else {
            -jump
        }
    }

    fn apply_kick(&self, psi: &mut [Complex64], kappa: f64) {
        if kappa == 0.0 {
            return;
        }
        for (a, q) in psi.iter_mut().zip(&self.q) {
            *a *= Complex64::cis(kappa * q);
        }
    }

    /// Fill `phase` with exp(−iV_eff(t)τ/2ħ) − 1. Keeping the unit part
    /// exact avoids the systematic |cis θ| rounding near θ = 0, which
    /// otherwise drifts the norm by ~1e-17 per step.
    fn potential_phase(&mut self, t: f64, tau: f64) {
        let frame = self.grid.frame.motion(self.protocol, t);
        let x0 = self.protocol.trap_position(t);
        let accel = if self.config.compensate {
            self.protocol.trap_motion_interior(t).map(|m| m.x0_ddot).unwrap_or(0.0)
        } else {
            0.0
        };
        let offset = frame.r - x0;
        let slope = self.trap.mass * (frame.a - accel);
        let base = potential_value(self.config.kind, self.trap, offset);
        let scale = -0.5 * tau / self.hbar;
        for (p, &q) in self.phase.iter_mut().zip(&self.q) {
            let v = potential_value(self.config.kind, self.trap, q + offset) - base + slope * q;
            let theta = scale * v;
            *p = Complex64::new(-2.0 * (0.5 * theta).sin().powi(2), theta.sin());
        }
    }

    fn check_edges(&self, psi: &[Complex64], t: f64, space: &'static str, weight: f64) -> Result<()> {
        let n = psi.len();
        let (lo, hi) = match space {
            "position" => (0..EDGE_POINTS, n - EDGE_POINTS..n),
            _ => (n / 2 - EDGE_POINTS..n / 2, n / 2..n / 2 + EDGE_POINTS),
        };
        let probability: f64 = lo.chain(hi).map(|j| psi[j].norm_sqr()).sum::<f64>() * weight;
        if probability > EDGE_PROBABILITY {
            return Err(Error::WindowOverflow { t, space, probability });
        }
        Ok(())
    }

    /// One Strang step of signed length `tau` with the potential at `mid`.
    fn step(&mut self, psi: &mut [Complex64], mid: f64, tau: f64, t_end: f64) -> Result<()> {
        self.potential_phase(mid, tau);
        for (a, p) in psi.iter_mut().zip(&self.phase) {
            *a += *a * p;
        }
        let before: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        self.spectral.forward(psi);
        let dq = self.grid.spacing();
        self.check_edges(psi, t_end, "momentum", dq / self.grid.n_points as f64)?;
        let backward = tau < 0.0;
        for (a, k) in psi.iter_mut().zip(&self.kinetic) {
            *a *= if backward { k.conj() } else { *k };
        }
        self.spectral.inverse(psi);
        // The kinetic factor is unitary; undo the transform pair's rounding
        // bias. The correction is below one ulp of 1, so it is added rather
        // than multiplied in.
        let after: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let fix = 0.5 * (before - after) / after;
        for (a, p) in psi.iter_mut().zip(&self.phase) {
            *a += *a * fix;
            *a += *a * p;
        }
        self.check_edges(psi, t_end, "position", dq)
    }

    fn run(&mut self, initial: &Wavefunction, backward: bool, snapshots: usize) -> Result<(Wavefunction, Vec<Wavefunction>)> {
        let tf = self.protocol.duration();
        let (grid, center) = (self.grid, initial.center);
        let state = |amplitudes: Vec<Complex64>, t: f64| Wavefunction { grid, amplitudes, t, center };
        // Record every `every` steps so that at most `snapshots` states are kept,
        // counting the initial and final ones.
        let every = if snapshots > 2 { self.steps.div_ceil(snapshots - 2 + 1) } else { usize::MAX };
        let mut shots = Vec::new();
        let mut psi = initial.amplitudes.clone();
        let (k0, kf) = (self.kick(true), self.kick(false));
        self.apply_kick(&mut psi, if backward { -kf } else { k0 });
        if snapshots > 0 {
            shots.push(state(psi.clone(), if backward { tf } else { 0.0 }));
        }
        for n in 0..self.steps {
            let s = if backward { self.steps - 1 - n } else { n };
            let mid = (s as f64 + 0.5) * self.h;
            let end = match (backward, s + 1 == self.steps) {
                (false, true) => tf,
                (false, false) => (s + 1) as f64 * self.h,
                (true, _) => s as f64 * self.h,
            };
            let tau = if backward { -self.h } else { self.h };
            self.step(&mut psi, mid, tau, end)?;
            if (n + 1) % every == 0 && n + 1 < self.steps {
                shots.push(state(psi.clone(), end));
            }
        }
        self.apply_kick(&mut psi, if backward { -k0 } else { kf });
        let out = state(psi, if backward { 0.0 } else { tf });
        if snapshots == 1 {
            shots.clear();
        }
        if snapshots > 0 {
            shots.push(out.clone());
        }
        Ok((out, shots))
    }
}

/// Propagate `initial` (given at t = 0) to `tf`.
pub fn propagate(
    initial: &Wavefunction,
    config: &PropagationConfig,
    table: &TrajectoryTable,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    Ok(propagate_with_snapshots(initial, config, table, trap, consts, 0)?.0)
}

/// As [`propagate`], also returning up to `snapshots` evenly spaced states
/// (the last one is the final state).
pub fn propagate_with_snapshots(
    initial: &Wavefunction,
    config: &PropagationConfig,
    table: &TrajectoryTable,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
    snapshots: usize,
) -> Result<(Wavefunction, Vec<Wavefunction>)> {
    let mut p = Propagator::new(initial.grid, config, table, trap, consts)?;
    p.run(initial, false, snapshots)
}

/// Run the same steps in reverse from `tf` back to 0.
pub fn propagate_backward(
    state: &Wavefunction,
    config: &PropagationConfig,
    table: &TrajectoryTable,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    let mut p = Propagator::new(state.grid, config, table, trap, consts)?;
    Ok(p.run(state, true, 0)?.0)
}

/// Frame-independent reference: where the packet should sit relative to
/// the frame origin at time t when the transport is perfect.
pub(crate) fn target_offset(frame: Frame, protocol: &Protocol, t: f64) -> f64 {
    protocol.kinematics(t).map(|k| k.xc).unwrap_or(0.0) - frame.motion(protocol, t).r
}
