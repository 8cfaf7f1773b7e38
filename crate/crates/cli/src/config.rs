//! Scenario files: TOML with sections `trap`, `protocol`, `simulation`,
//! `sweep`, `energy` and `output`. Unknown keys are rejected.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use shuttle_core::energetics::feasibility_in_trap;
use shuttle_core::trap::derive_trap;
use shuttle_core::trajectory::delta0;
use shuttle_core::{
    FeasibilityReport, Frame, InitialState, MinEnergyConstant, PhysicalConstants, PotentialKind, ProtocolKind,
    ProtocolSpec, QuadratureSpec, Rule, SimulationSpec, TrapSpec, TweezerSpec,
};

use crate::error::CliError;

const MASS_KG: f64 = 1.44269e-25;
const OMEGA0_RAD_S: f64 = 2.0 * PI * 20.0;
const WAVELENGTH_M: f64 = 1.06e-6;
/// Default waist in wavelengths.
const WAIST_WAVELENGTHS: f64 = 50.0;
const DISTANCE_M: f64 = 0.01;
const TF_S: f64 = 0.052;
const DELTA_RATIO: f64 = 0.89;
/// Upper limit on dumped wavefunction snapshots.
pub const MAX_SNAPSHOTS: usize = 64;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub trap: TrapSection,
    pub protocol: ProtocolSection,
    pub simulation: SimulationSection,
    pub sweep: SweepSection,
    pub energy: EnergySection,
    pub output: OutputSection,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrapSection {
    pub mass_kg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap_depth_J: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub waist_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rayleigh_m: Option<f64>,
    pub wavelength_m: f64,
    pub distance_m: f64,
    /// Potential of single `simulate` runs, and of sweeps without `sweep.kinds`.
    pub potential_kind: PotentialKind,
}

impl Default for TrapSection {
    fn default() -> Self {
        Self {
            mass_kg: MASS_KG,
            omega0_rad_s: None,
            trap_depth_J: None,
            waist_m: None,
            rayleigh_m: None,
            wavelength_m: WAVELENGTH_M,
            distance_m: DISTANCE_M,
            potential_kind: PotentialKind::HarmonicPlusQuartic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub variant: ProtocolKind,
    pub tf_s: f64,
    /// Bound δ [m]. Exclusive with `delta_ratio`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_m: Option<f64>,
    /// Bound as a fraction of δ0 at `tf_s`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_ratio: Option<f64>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            variant: ProtocolKind::BoundedOptimal,
            tf_s: TF_S,
            delta_m: None,
            delta_ratio: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    /// Add the force that cancels the trap's inertial force.
    pub compensate: bool,
    /// Defaults to `ComovingTrap` when compensating, `ComovingXc` otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
    pub initial: InitialState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
    /// Refine the grid until the fidelity settles.
    pub converge: bool,
    pub tolerance: f64,
    pub max_refinements: usize,
    /// Wavefunction snapshots written by `simulate`, at most 64.
    pub snapshots: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            compensate: false,
            frame: None,
            initial: InitialState::HarmonicGround,
            n_points: None,
            half_width_m: None,
            dt_s: None,
            converge: true,
            tolerance: 1e-8,
            max_refinements: 8,
            snapshots: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Sweep range. Both ends default to the feasible interval
    /// `[tf_min, tf_star]` of the protocol bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tf_min_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tf_max_s: Option<f64>,
    pub tf_count: usize,
    /// Bounds for `BoundedOptimal` rows; defaults to the protocol bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas_m: Option<Vec<f64>>,
    pub protocols: Vec<ProtocolKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kinds: Option<Vec<PotentialKind>>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            tf_min_s: None,
            tf_max_s: None,
            tf_count: 9,
            deltas_m: None,
            protocols: ProtocolKind::ALL.to_vec(),
            kinds: None,
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    pub rule: Rule,
    /// Coefficient used to turn an energy budget into a shortest time.
    pub min_energy_constant: MinEnergyConstant,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget_J: Option<f64>,
    /// Random competitors drawn by the optimality audit in `check`.
    pub audit_samples: usize,
}

impl Default for EnergySection {
    fn default() -> Self {
        Self {
            rule: Rule::GaussLegendreComposite,
            min_energy_constant: MinEnergyConstant::Oracle,
            budget_J: None,
            audit_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub format: OutputFormat,
    /// Intervals of exported trajectory tables.
    pub samples: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            samples: 4096,
        }
    }
}

/// Everything a command needs, resolved and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunPlan {
    pub consts: PhysicalConstants,
    pub trap: TrapSpec,
    /// Bound δ [m].
    pub delta: f64,
    /// The configured protocol at `protocol.tf_s`.
    pub protocol: ProtocolSpec,
    pub simulation: SimulationSpec,
    pub converge: bool,
    pub tolerance: f64,
    pub max_refinements: usize,
    pub snapshots: usize,
    pub tfs: Vec<f64>,
    pub deltas: Vec<f64>,
    pub protocols: Vec<ProtocolKind>,
    pub kinds: Vec<PotentialKind>,
    pub quadrature: QuadratureSpec,
    pub min_energy_constant: MinEnergyConstant,
    pub budget: Option<f64>,
    pub audit_samples: usize,
    pub samples: usize,
}

impl RunPlan {
    /// Spec of `kind` at `tf`, bounded by `delta` when it takes a bound.
    pub fn protocol_spec(&self, kind: ProtocolKind, tf: f64, delta: f64) -> shuttle_core::Result<ProtocolSpec> {
        let bound = (kind == ProtocolKind::BoundedOptimal).then_some(delta);
        ProtocolSpec::new(kind, self.trap.distance, tf, self.trap.omega0, bound)
    }

    pub fn feasibility(&self) -> FeasibilityReport {
        feasibility_in_trap(&self.protocol, &self.trap, &self.consts)
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn check_positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{field} must be positive, got {v:e}")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source: Box::new(source),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config is always representable in TOML")
    }

    /// Fill in every default that depends on other keys, so that the
    /// result is explicit about what will run.
    pub fn effective(&self) -> Result<Self, CliError> {
        let mut c = self.clone();
        let t = &mut c.trap;
        if t.omega0_rad_s.is_none() && t.trap_depth_J.is_none() {
            t.omega0_rad_s = Some(OMEGA0_RAD_S);
        }
        if t.rayleigh_m.is_none() && t.waist_m.is_none() {
            t.waist_m = Some(WAIST_WAVELENGTHS * t.wavelength_m);
        }
        let p = &mut c.protocol;
        match (p.delta_m, p.delta_ratio) {
            (Some(_), Some(_)) => return Err(invalid("give protocol.delta_m or protocol.delta_ratio, not both")),
            (None, None) => p.delta_ratio = Some(DELTA_RATIO),
            _ => {}
        }
        if c.simulation.frame.is_none() {
            c.simulation.frame = Some(if c.simulation.compensate { Frame::ComovingTrap } else { Frame::ComovingXc });
        }
        if c.sweep.kinds.is_none() {
            c.sweep.kinds = Some(vec![c.trap.potential_kind]);
        }
        let trap = c.trap_spec()?;
        let delta = c.delta(&trap)?;
        if c.sweep.deltas_m.is_none() {
            c.sweep.deltas_m = Some(vec![delta]);
        }
        if c.sweep.tf_min_s.is_none() || c.sweep.tf_max_s.is_none() {
            let bounded = ProtocolSpec::new(
                ProtocolKind::BoundedOptimal,
                trap.distance,
                c.protocol.tf_s,
                trap.omega0,
                Some(delta),
            )?;
            let f = shuttle_core::feasibility(&bounded);
            c.sweep.tf_min_s.get_or_insert(f.tf_min);
            c.sweep.tf_max_s.get_or_insert(f.tf_star);
        }
        Ok(c)
    }

    fn trap_spec(&self) -> Result<TrapSpec, CliError> {
        let t = &self.trap;
        let tweezer = TweezerSpec {
            depth: t.trap_depth_J,
            omega0: t.omega0_rad_s,
            rayleigh: t.rayleigh_m,
            waist: t.waist_m,
            wavelength: Some(t.wavelength_m),
        };
        let trap = derive_trap(&tweezer, t.mass_kg, t.distance_m)?;
        t.potential_kind.validate(&trap)?;
        Ok(trap)
    }

    fn delta(&self, trap: &TrapSpec) -> Result<f64, CliError> {
        let p = &self.protocol;
        check_positive("protocol.tf_s", p.tf_s)?;
        match (p.delta_m, p.delta_ratio) {
            (Some(d), None) => check_positive("protocol.delta_m", d).map(|_| d),
            (None, Some(r)) => {
                check_positive("protocol.delta_ratio", r)?;
                Ok(r * delta0(trap.distance, p.tf_s, trap.omega0))
            }
            _ => Err(invalid("protocol bound unresolved")),
        }
    }

    /// Resolve and validate the run plan.
    pub fn plan(&self) -> Result<RunPlan, CliError> {
        let c = self.effective()?;
        let consts = PhysicalConstants::default();
        let trap = c.trap_spec()?;
        let delta = c.delta(&trap)?;
        let bound = (c.protocol.variant == ProtocolKind::BoundedOptimal).then_some(delta);
        let protocol = ProtocolSpec::new(c.protocol.variant, trap.distance, c.protocol.tf_s, trap.omega0, bound)?;

        let s = &c.simulation;
        let simulation = SimulationSpec {
            compensate: s.compensate,
            frame: s.frame.unwrap_or(Frame::ComovingXc),
            initial: s.initial,
            n_points: s.n_points,
            half_width: s.half_width_m,
            dt: s.dt_s,
            ..SimulationSpec::new(c.trap.potential_kind, protocol)
        };
        check_positive("simulation.tolerance", s.tolerance)?;
        if s.snapshots > MAX_SNAPSHOTS {
            return Err(invalid(format!("simulation.snapshots is at most {MAX_SNAPSHOTS}, got {}", s.snapshots)));
        }

        let w = &c.sweep;
        let (lo, hi) = (w.tf_min_s.unwrap_or(c.protocol.tf_s), w.tf_max_s.unwrap_or(c.protocol.tf_s));
        check_positive("sweep.tf_min_s", lo)?;
        if !(hi >= lo) {
            return Err(invalid(format!("sweep.tf_max_s = {hi:e} is below sweep.tf_min_s = {lo:e}")));
        }
        let tfs = match w.tf_count {
            0 => return Err(invalid("sweep.tf_count must be at least 1")),
            1 => vec![lo],
            n => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        };
        let deltas = w.deltas_m.clone().unwrap_or_else(|| vec![delta]);
        for d in &deltas {
            check_positive("sweep.deltas_m", *d)?;
        }
        let mut protocols = w.protocols.clone();
        protocols.sort();
        protocols.dedup();
        if protocols.is_empty() {
            return Err(invalid("sweep.protocols is empty"));
        }
        let kinds = w.kinds.clone().unwrap_or_else(|| vec![c.trap.potential_kind]);
        if kinds.is_empty() {
            return Err(invalid("sweep.kinds is empty"));
        }
        for k in &kinds {
            k.validate(&trap)?;
        }

        let e = &c.energy;
        let quadrature = match e.rule {
            Rule::GaussLegendreComposite => QuadratureSpec::default(),
            Rule::Simpson => QuadratureSpec::simpson(),
        };
        if let Some(b) = e.budget_J {
            check_positive("energy.budget_J", b)?;
        }
        if c.output.samples < 2 {
            return Err(invalid("output.samples must be at least 2"));
        }
        Ok(RunPlan {
            consts,
            trap,
            delta,
            protocol,
            simulation,
            converge: s.converge,
            tolerance: s.tolerance,
            max_refinements: s.max_refinements,
            snapshots: s.snapshots,
            tfs,
            deltas,
            protocols,
            kinds,
            quadrature,
            min_energy_constant: e.min_energy_constant,
            budget: e.budget_J,
            audit_samples: e.audit_samples,
            samples: c.output.samples,
        })
    }
}
