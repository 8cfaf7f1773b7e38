use num_complex::Complex64;

use super::grid::GridSpec;
use super::state::{displaced_eigenstate, Spectral, Wavefunction};
use crate::error::{Error, Result};
use crate::trap::{potential_value, PhysicalConstants, PotentialKind, TrapSpec};

/// Imaginary time steps, in units of 1/ω0, relaxed in turn.
const STAGES: [f64; 3] = [0.1, 0.01, 0.001];
/// Energy change per step, in units of ħω0, that ends a stage.
const ENERGY_TOLERANCE: f64 = 1e-14;
const MAX_STEPS_PER_STAGE: usize = 200_000;

/// ⟨T + V⟩ of a normalized state.
fn energy(psi: &[Complex64], v: &[f64], k2: &[f64], spectral: &mut Spectral, dq: f64) -> f64 {
    let potential: f64 = psi.iter().zip(v).map(|(a, v)| v * a.norm_sqr()).sum::<f64>() * dq;
    let mut spectrum = psi.to_vec();
    spectral.forward(&mut spectrum);
    let kinetic: f64 = spectrum.iter().zip(k2).map(|(a, t)| t * a.norm_sqr()).sum::<f64>() * dq / psi.len() as f64;
    kinetic + potential
}

/// Lowest state of the trap at rest at the frame origin, by imaginary-time
/// split-operator relaxation.
pub fn imaginary_time_ground_state(
    kind: PotentialKind,
    grid: &GridSpec,
    trap: &TrapSpec,
    consts: &PhysicalConstants,
) -> Result<Wavefunction> {
    kind.validate(trap)?;
    let sigma = trap.ground_width(consts);
    grid.check_resolution(sigma)?;
    let q = grid.positions();
    let reach = q.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if kind == PotentialKind::HarmonicPlusQuartic && reach >= trap.quartic_dominance_radius() {
        return Err(Error::config("half_width_m", "quartic potential unbounded below inside the window"));
    }
    let v: Vec<f64> = q.iter().map(|&x| potential_value(kind, trap, x)).collect();
    let k2: Vec<f64> = grid
        .wavenumbers()
        .iter()
        .map(|k| (consts.hbar * k).powi(2) / (2.0 * trap.mass))
        .collect();
    let quantum = consts.hbar * trap.omega0;
    let dq = grid.spacing();
    let mut spectral = Spectral::new(grid.n_points);

    // Start from a wider Gaussian so the relaxation has work to do.
    let mut psi = displaced_eigenstate(0, 0.0, 0.0, grid, trap, consts)?;
    for (a, x) in psi.amplitudes.iter_mut().zip(&q) {
        *a = Complex64::from((-0.3 * x * x / (sigma * sigma)).exp());
    }
    psi.normalize();
    let mut amps = psi.amplitudes;

    let mut e_prev = energy(&amps, &v, &k2, &mut spectral, dq);
    for stage in STAGES {
        let tau = stage / trap.omega0;
        let half_v: Vec<f64> = v.iter().map(|v| (-0.5 * tau * v / consts.hbar).exp()).collect();
        let full_t: Vec<f64> = k2.iter().map(|t| (-tau * t / consts.hbar).exp()).collect();
        let mut converged = false;
        for _ in 0..MAX_STEPS_PER_STAGE {
            for (a, f) in amps.iter_mut().zip(&half_v) {
                *a *= f;
            }
            spectral.forward(&mut amps);
            for (a, f) in amps.iter_mut().zip(&full_t) {
                *a *= f;
            }
            spectral.inverse(&mut amps);
            for (a, f) in amps.iter_mut().zip(&half_v) {
                *a *= f;
            }
            let norm = (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * dq).sqrt();
            for a in amps.iter_mut() {
                *a /= norm;
            }
            let e = energy(&amps, &v, &k2, &mut spectral, dq);
            if !e.is_finite() {
                return Err(Error::Numerical("imaginary-time energy is not finite".into()));
            }
            let change = (e - e_prev).abs();
            e_prev = e;
            if change < ENERGY_TOLERANCE * quantum {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "imaginary-time relaxation at ω0·dτ = {stage} did not settle in {MAX_STEPS_PER_STAGE} steps"
            )));
        }
    }
    Wavefunction::new(*grid, amps, 0.0, 0.0)
}

/// ⟨p²/2m + V_kind(q)⟩ for a state of the trap at rest at the frame origin.
pub fn trap_energy(kind: PotentialKind, psi: &Wavefunction, trap: &TrapSpec, consts: &PhysicalConstants) -> f64 {
    let grid = &psi.grid;
    let v: Vec<f64> = grid.positions().iter().map(|&x| potential_value(kind, trap, x)).collect();
    let k2: Vec<f64> = grid
        .wavenumbers()
        .iter()
        .map(|k| (consts.hbar * k).powi(2) / (2.0 * trap.mass))
        .collect();
    energy(&psi.amplitudes, &v, &k2, &mut Spectral::new(grid.n_points), grid.spacing())
}

#[cfg(test)]
mod tests {
    use super::super::grid::Frame;
    use super::super::state::{fidelity, ho_eigenstate};
    use super::*;
    use std::f64::consts::PI;

    fn setup() -> (TrapSpec, PhysicalConstants, GridSpec) {
        let consts = PhysicalConstants::default();
        let trap = TrapSpec::new(1.44269e-25, 2.0 * PI * 20.0, 1.6435058739765e-17, 0.01).unwrap();
        let sigma = trap.ground_width(&consts);
        let grid = GridSpec::new(1024, 32.0 * sigma, 0.0, 1e-5, Frame::ComovingXc).unwrap();
        (trap, consts, grid)
    }

    #[test]
    fn harmonic_relaxes_to_eigenstate() {
        let (trap, consts, grid) = setup();
        let g = imaginary_time_ground_state(PotentialKind::HarmonicOnly, &grid, &trap, &consts).unwrap();
        let exact = ho_eigenstate(0, &grid, &trap, &consts).unwrap();
        assert!(1.0 - fidelity(&g, &exact).unwrap() < 1e-10);
        assert!((g.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_softening_lowers_energy() {
        let (trap, consts, grid) = setup();
        let quantum = consts.hbar * trap.omega0;
        let g = imaginary_time_ground_state(PotentialKind::HarmonicPlusQuartic, &grid, &trap, &consts).unwrap();
        let e = trap_energy(PotentialKind::HarmonicPlusQuartic, &g, &trap, &consts);
        assert!(e < 0.5 * quantum);
        // First-order shift −3η(ħ/2mω0)².
        let shift = -3.0 * trap.eta * (consts.hbar / (2.0 * trap.mass * trap.omega0)).powi(2);
        assert!(((e - 0.5 * quantum) - shift).abs() < 1e-3 * shift.abs());
    }

    #[test]
    fn gaussian_and_quartic_ground_states_agree() {
        let (trap, consts, grid) = setup();
        let a = imaginary_time_ground_state(PotentialKind::HarmonicPlusQuartic, &grid, &trap, &consts).unwrap();
        let b = imaginary_time_ground_state(PotentialKind::GaussianMatched, &grid, &trap, &consts).unwrap();
        assert!(1.0 - fidelity(&a, &b).unwrap() < 1e-6);
    }
}
