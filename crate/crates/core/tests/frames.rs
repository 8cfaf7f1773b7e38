//! The same transport seen from different frames, and the compensating force.

use std::f64::consts::PI;

use num_complex::Complex64;
use shuttle_core::tdse::{
    default_grid, fidelity, propagate, propagate_backward, simulate, simulate_on, transport_mode, PropagationConfig,
};
use shuttle_core::*;

const MASS: f64 = 1.44269e-25;
const OMEGA0: f64 = 2.0 * PI * 20.0;

fn sigma() -> f64 {
    (PhysicalConstants::default().hbar / (MASS * OMEGA0)).sqrt()
}

/// A 200σ transport in a trap whose quartic turnover sits at 1000σ, so the
/// anharmonic kick is of order σ and a lab grid stays small.
fn short_trap() -> TrapSpec {
    let r = 1000.0 * sigma();
    TrapSpec::new(MASS, OMEGA0, MASS * OMEGA0 * OMEGA0 / (2.0 * r * r), 200.0 * sigma()).unwrap()
}

fn reference_trap() -> TrapSpec {
    TrapSpec::new(MASS, OMEGA0, 1.6435058739765e-17, 0.01).unwrap()
}

fn short_protocol(kind: ProtocolKind) -> ProtocolSpec {
    ProtocolSpec::new(kind, short_trap().distance, 0.026, OMEGA0, None).unwrap()
}

/// |Σ conj(a_j) b_{j+shift}| Δq.
fn shifted_overlap(a: &Wavefunction, b: &Wavefunction, shift: usize) -> f64 {
    let s: Complex64 = a
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, x)| x.conj() * b.amplitudes[j + shift])
        .sum();
    (s * a.grid.spacing()).norm()
}

#[test]
fn lab_and_comoving_agree() {
    let consts = PhysicalConstants::default();
    let trap = short_trap();
    let dq = sigma() / 40.0;
    let dt = 2.0 * PI / (OMEGA0 * 8192.0);
    let spec = SimulationSpec::new(PotentialKind::HarmonicPlusQuartic, short_protocol(ProtocolKind::UnboundedOptimal));
    // Lab points sit on the comoving ones shifted by d = 8000Δq.
    let lab_grid = GridSpec::new(16384, 8192.0 * dq, 4000.0 * dq, dt, Frame::Lab).unwrap();
    let co_grid = GridSpec::new(4096, 2048.0 * dq, 0.0, dt, Frame::ComovingXc).unwrap();
    let lab = simulate_on(&lab_grid, &SimulationSpec { frame: Frame::Lab, ..spec }, &trap, &consts).unwrap();
    let co = simulate_on(&co_grid, &spec, &trap, &consts).unwrap();
    // Far from both 0 and 1, so the comparison means something.
    assert!(co.fidelity > 0.3 && co.fidelity < 0.6, "F = {}", co.fidelity);
    assert!((lab.fidelity - co.fidelity).abs() < 1e-5);
    let overlap = shifted_overlap(co.final_state.as_ref().unwrap(), lab.final_state.as_ref().unwrap(), 8000 + 4192 - 2048);
    assert!(1.0 - overlap < 1e-10, "overlap {overlap}");
    let e = consts.hbar * OMEGA0;
    assert!((lab.excitation_energy - co.excitation_energy).abs() < 1e-4 * e);
}

#[test]
fn harmonic_lab_transport_is_exact() {
    let consts = PhysicalConstants::default();
    let trap = short_trap();
    for kind in ProtocolKind::ALL {
        let bound = (kind == ProtocolKind::BoundedOptimal).then(|| 0.95 * trajectory::delta0(trap.distance, 0.026, OMEGA0));
        let protocol = ProtocolSpec::new(kind, trap.distance, 0.026, OMEGA0, bound).unwrap();
        let spec = SimulationSpec {
            frame: Frame::Lab,
            ..SimulationSpec::new(PotentialKind::HarmonicOnly, protocol)
        };
        let r = simulate(&spec, &trap, &consts).unwrap();
        assert!(1.0 - r.fidelity < 1e-6, "{kind}: F = {}", r.fidelity);
    }
}

#[test]
fn trap_frame_matches_comoving_frame() {
    let consts = PhysicalConstants::default();
    let trap = short_trap();
    let dt = 2.0 * PI / (OMEGA0 * 8192.0);
    // Slower than the other short runs: in the trap frame the packet swings by u.
    let protocol = ProtocolSpec::new(ProtocolKind::Polynomial5, trap.distance, 0.04, OMEGA0, None).unwrap();
    let spec = SimulationSpec::new(PotentialKind::HarmonicPlusQuartic, protocol);
    let grid = |frame| GridSpec::new(16384, 128.0 * sigma(), 0.0, dt, frame).unwrap();
    let co = simulate_on(&grid(Frame::ComovingXc), &spec, &trap, &consts).unwrap();
    let tr_spec = SimulationSpec { frame: Frame::ComovingTrap, ..spec };
    let tr = simulate_on(&grid(Frame::ComovingTrap), &tr_spec, &trap, &consts).unwrap();
    assert!(co.fidelity < 0.999, "F = {}", co.fidelity);
    assert!((co.fidelity - tr.fidelity).abs() < 1e-6, "{} vs {}", co.fidelity, tr.fidelity);
    // Both frames end at rest on x = d.
    let overlap = shifted_overlap(co.final_state.as_ref().unwrap(), tr.final_state.as_ref().unwrap(), 0);
    assert!(1.0 - overlap < 1e-8, "overlap {overlap}");
}

#[test]
fn compensation_removes_the_excitation() {
    let consts = PhysicalConstants::default();
    let trap = reference_trap();
    let protocol = ProtocolSpec::new(ProtocolKind::Polynomial5, 0.01, 0.06, OMEGA0, None).unwrap();
    let plain = simulate(&SimulationSpec::new(PotentialKind::HarmonicPlusQuartic, protocol), &trap, &consts).unwrap();
    let spec = SimulationSpec {
        compensate: true,
        frame: Frame::ComovingTrap,
        ..SimulationSpec::new(PotentialKind::HarmonicPlusQuartic, protocol)
    };
    let compensated = simulate(&spec, &trap, &consts).unwrap();
    assert!(plain.fidelity < 0.5, "F = {}", plain.fidelity);
    assert!(1.0 - compensated.fidelity < 1e-4);
    assert!(compensated.excitation_energy < 1e-3 * plain.excitation_energy);
}

#[test]
fn compensated_round_trip() {
    let consts = PhysicalConstants::default();
    let trap = reference_trap();
    let protocol = ProtocolSpec::new(ProtocolKind::Polynomial5, 0.01, 0.06, OMEGA0, None).unwrap();
    let spec = SimulationSpec {
        compensate: true,
        frame: Frame::ComovingTrap,
        ..SimulationSpec::new(PotentialKind::GaussianMatched, protocol)
    };
    let grid = default_grid(&spec, &trap, &consts).unwrap();
    let table = Protocol::new(protocol).unwrap().sample(256).unwrap();
    let config = PropagationConfig {
        kind: spec.kind,
        protocol,
        compensate: true,
        mode_index: 0,
    };
    let psi0 = transport_mode(0, 0.0, &table, &grid, &trap, &consts).unwrap();
    let out = propagate(&psi0, &config, &table, &trap, &consts).unwrap();
    let back = propagate_backward(&out, &config, &table, &trap, &consts).unwrap();
    assert!(1.0 - fidelity(&back, &psi0).unwrap() < 1e-8);
    assert!((back.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn fidelity_never_exceeds_one() {
    let consts = PhysicalConstants::default();
    let trap = reference_trap();
    for kind in [PotentialKind::HarmonicOnly, PotentialKind::HarmonicPlusQuartic] {
        let protocol = ProtocolSpec::new(ProtocolKind::CubicMinHarmonic, 0.01, 0.08, OMEGA0, None).unwrap();
        let r = simulate(&SimulationSpec::new(kind, protocol), &trap, &consts).unwrap();
        assert!(r.fidelity <= 1.0 + 1e-12);
    }
}
