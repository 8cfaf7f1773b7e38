//! Wavepacket verification of transport protocols with a split-operator
//! solver of the time-dependent Schrödinger equation.

mod ground;
mod grid;
mod propagate;
mod simulate;
mod state;

pub use grid::{Frame, GridSpec};
pub use ground::{imaginary_time_ground_state, trap_energy};
pub use propagate::{
    propagate, propagate_backward, propagate_with_snapshots, PropagationConfig, EDGE_POINTS,
    EDGE_PROBABILITY,
};
pub use simulate::{
    default_grid, simulate, simulate_converged, simulate_on, simulate_with_snapshots, ConvergedRun, InitialState, SimulationResult,
    SimulationSpec,
};
pub use state::{
    displaced_eigenstate, excitation_energy, fidelity, ho_eigenstate, transport_mode, Wavefunction,
};
