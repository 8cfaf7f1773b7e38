//! Fast transport of a trapped atom between two points with an optical
//! tweezer: classical trajectories, anharmonic energy costs and quantum
//! wavepacket propagation.

pub mod energetics;
mod error;
pub mod optimality;
pub mod quadrature;
pub mod tdse;
pub mod trajectory;
pub mod trap;

pub use error::{Error, Result};
pub use trajectory::{
    bounded_constants, feasibility, BoundedConstants, FeasibilityReport, Protocol, ProtocolKind,
    ProtocolSpec, TrajectoryPoint, TrajectoryTable, Verdict,
};
pub use energetics::{feasibility_in_trap, EnergyReport, MinEnergyConstant};
pub use tdse::{Frame, GridSpec, InitialState, SimulationResult, SimulationSpec, Wavefunction};
pub use quadrature::{QuadratureSpec, Rule};
pub use trap::{PhysicalConstants, PotentialKind, TrapSpec, TweezerSpec};
