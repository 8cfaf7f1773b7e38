use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::trajectory::TrajectoryTable;
use crate::trap::{PhysicalConstants, TrapSpec};

/// Complex amplitudes on a grid, in the grid's frame and boost gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: GridSpec,
    /// ψ(q_j) [m^{-1/2}].
    pub amplitudes: Vec<Complex64>,
    /// Time [s].
    pub t: f64,
    /// Center of the reference oscillator used for excitation energies, in
    /// frame coordinates [m].
    pub center: f64,
}

impl Wavefunction {
    pub fn new(grid: GridSpec, amplitudes: Vec<Complex64>, t: f64, center: f64) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a {}-point grid",
                amplitudes.len(),
                grid.n_points
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            t,
            center,
        })
    }

    /// Σ|ψ|²Δq.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub(crate) fn normalize(&mut self) {
        let s = self.norm().sqrt().recip();
        for a in &mut self.amplitudes {
            *a *= s;
        }
    }

    /// ⟨q⟩ in frame coordinates.
    pub fn mean_position(&self) -> f64 {
        let h = self.grid.spacing();
        self.grid
            .positions()
            .iter()
            .zip(&self.amplitudes)
            .map(|(q, a)| q * a.norm_sqr() * h)
            .sum()
    }
}

/// Forward and inverse FFT plans for one grid size.
#[derive(Clone)]
pub(crate) struct Spectral {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    n: usize,
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex64::default(); len],
            n,
        }
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        self.forward.process_with_scratch(data, &mut self.scratch);
    }

    /// Inverse transform including the 1/n factor.
    pub fn inverse(&mut self, data: &mut [Complex64]) {
        self.inverse.process_with_scratch(data, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        for x in data {
            *x *= s;
        }
    }
}

/// Normalized Hermite functions ψ_0..ψ_n at `xi`, by the stable recurrence.
fn hermite_function(n: u32, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let k = k as f64;
        let next = (2.0 / (k + 1.0)).sqrt() * xi * cur - (k / (k + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Harmonic eigenstate `n` centered at `center` carrying the plane wave `exp(ik(q − center))`.
pub fn displaced_eigenstate(
    n: u32,
    center: f64,
    wavenumber: f64,
    grid: &GridSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    let sigma = trap.ground_width(consts);
    let reach = (2.0 * n as f64 + 1.0).sqrt() * sigma + (center - grid.center).abs();
    if reach >= 0.8 * grid.half_width {
        return Err(Error::config(
            "half_width_m",
            format!(
                "mode {n} reaches {reach:e} m from the window center, beyond 0.8L = {:e} m",
                0.8 * grid.half_width
            ),
        ));
    }
    let scale = sigma.sqrt().recip();
    let amplitudes = grid
        .positions()
        .into_iter()
        .map(|q| {
            let x = q - center;
            Complex64::from_polar(scale * hermite_function(n, x / sigma), wavenumber * x)
        })
        .collect();
    let mut psi = Wavefunction::new(*grid, amplitudes, 0.0, center)?;
    psi.normalize();
    Ok(psi)
}

/// Harmonic eigenstate `n` of the trap at rest at the frame origin.
pub fn ho_eigenstate(n: u32, grid: &GridSpec, trap: &TrapSpec, consts: &PhysicalConstants) -> Result<Wavefunction> {
    displaced_eigenstate(n, 0.0, 0.0, grid, trap, consts)
}

/// Transport mode `n` at time `t`: the eigenstate riding on xc(t) with
/// momentum mẋc(t), expressed in the grid's frame. The global
/// Lewis–Riesenfeld phase, with λn = (n + ½)ħω0, is omitted.
pub fn transport_mode(
    n: u32,
    t: f64,
    table: &TrajectoryTable,
    grid: &GridSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    let protocol = table.protocol();
    grid.frame.check(protocol)?;
    let k = protocol.kinematics(t)?;
    let frame = grid.frame.motion(protocol, t);
    // At the ends the state lives on the resting side of any frame jump,
    // which the propagator's kicks take care of.
    let v_frame = if t <= 0.0 || t >= protocol.duration() { 0.0 } else { frame.v };
    let wavenumber = trap.mass * (k.xc_dot - v_frame) / consts.hbar;
    let mut psi = displaced_eigenstate(n, k.xc - frame.r, wavenumber, grid, trap, consts)?;
    psi.t = t;
    Ok(psi)
}

/// F = |Σ conj(a)·b·Δq|.
pub fn fidelity(a: &Wavefunction, b: &Wavefunction) -> Result<f64> {
    if !a.grid.same_space(&b.grid) {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)));
    }
    let overlap: Complex64 = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok((overlap * a.grid.spacing()).norm())
}

/// ⟨p²/2m + ½mω0²(q − c)²⟩ − ħω0/2 with `c` the state's reference center.
/// The kinetic part is evaluated spectrally.
pub fn excitation_energy(psi: &Wavefunction, trap: &TrapSpec, consts: &PhysicalConstants) -> f64 {
    let grid = &psi.grid;
    let h = grid.spacing();
    let potential: f64 = grid
        .positions()
        .iter()
        .zip(&psi.amplitudes)
        .map(|(q, a)| 0.5 * trap.stiffness() * (q - psi.center).powi(2) * a.norm_sqr() * h)
        .sum();
    let mut spectrum = psi.amplitudes.clone();
    Spectral::new(grid.n_points).forward(&mut spectrum);
    let kinetic: f64 = grid
        .wavenumbers()
        .iter()
        .zip(&spectrum)
        .map(|(k, a)| (consts.hbar * k).powi(2) / (2.0 * trap.mass) * a.norm_sqr())
        .sum::<f64>()
        * h
        / grid.n_points as f64;
    kinetic + potential - 0.5 * consts.hbar * trap.omega0
}
