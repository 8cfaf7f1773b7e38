//! Trap parameters and the potentials a transported atom sees.
//!
//! All quantities are strict SI. Magnitudes range from ħ ~ 1e-34 J·s to
//! distances ~ 1e-2 m, comfortably inside `f64` range, so nothing is
//! rescaled internally.
//!
//! The on-axis trap is `½mω0²u² − ηu⁴` in the displacement `u = x − x0` from
//! the trap center; a positive `η` softens the trap away from its center.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance used to decide that two redundant inputs agree.
const CONSISTENCY_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.054_571_817e-34,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::config("hbar", format!("must be positive, got {hbar:e}")));
        }
        Ok(Self { hbar })
    }
}

/// Optical tweezer description: a focused Gaussian beam whose on-axis
/// intensity profile sets the trap.
///
/// Exactly one of `depth` and `omega0` closes the system. The Rayleigh
/// length is either given or computed as `π w0² / λ`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TweezerSpec {
    /// Trap depth V0 [J].
    pub depth: Option<f64>,
    /// Target harmonic angular frequency [rad/s].
    pub omega0: Option<f64>,
    /// Rayleigh length zR [m].
    pub rayleigh: Option<f64>,
    /// Beam waist w0 [m].
    pub waist: Option<f64>,
    /// Wavelength λ [m].
    pub wavelength: Option<f64>,
}

impl TweezerSpec {
    /// The Rayleigh length, computed from waist and wavelength when not given.
    pub fn rayleigh_length(&self) -> Result<f64> {
        let from_beam = match (self.waist, self.wavelength) {
            (Some(w0), Some(lambda)) => {
                positive("waist_m", w0)?;
                positive("wavelength_m", lambda)?;
                Some(PI * w0 * w0 / lambda)
            }
            (Some(_), None) => {
                return Err(Error::config("wavelength_m", "waist given without a wavelength"))
            }
            (None, Some(_)) if self.rayleigh.is_none() => {
                return Err(Error::config("waist_m", "wavelength given without a waist"))
            }
            _ => None,
        };
        match (self.rayleigh, from_beam) {
            (Some(z), None) => positive("rayleigh_m", z),
            (None, Some(z)) => Ok(z),
            (Some(z), Some(zb)) => {
                positive("rayleigh_m", z)?;
                if !close(z, zb) {
                    return Err(Error::config(
                        "rayleigh_m",
                        format!("given {z:e} m but πw0²/λ = {zb:e} m"),
                    ));
                }
                Ok(z)
            }
            (None, None) => Err(Error::config(
                "rayleigh_m",
                "missing: give rayleigh_m or both waist_m and wavelength_m",
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Particle mass [kg].
    pub mass: f64,
    /// Harmonic angular frequency ω0 [rad/s].
    pub omega0: f64,
    /// Quartic coefficient η [J/m⁴].
    pub eta: f64,
    /// Transport distance d [m].
    pub distance: f64,
}

impl TrapSpec {
    pub fn new(mass: f64, omega0: f64, eta: f64, distance: f64) -> Result<Self> {
        positive("mass_kg", mass)?;
        positive("omega0_rad_s", omega0)?;
        positive("distance_m", distance)?;
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::config("eta", format!("must be non-negative, got {eta:e}")));
        }
        Ok(Self {
            mass,
            omega0,
            eta,
            distance,
        })
    }

    /// Harmonic ground-state width σ = √(ħ/mω0).
    pub fn ground_width(&self, consts: &PhysicalConstants) -> f64 {
        (consts.hbar / (self.mass * self.omega0)).sqrt()
    }

    /// Spring constant mω0².
    pub fn stiffness(&self) -> f64 {
        self.mass * self.omega0 * self.omega0
    }

    /// Rayleigh length of the tweezer whose expansion reproduces (ω0, η):
    /// zR² = mω0²/(2η). Infinite for a purely harmonic trap.
    pub fn matched_rayleigh(&self) -> f64 {
        if self.eta == 0.0 {
            f64::INFINITY
        } else {
            (self.stiffness() / (2.0 * self.eta)).sqrt()
        }
    }

    /// Depth V0 = ηzR⁴ = ½mω0²zR² of the matched tweezer.
    pub fn matched_depth(&self) -> f64 {
        let z = self.matched_rayleigh();
        0.5 * self.stiffness() * z * z
    }

    /// Displacement beyond which the quartic term outweighs the harmonic one:
    /// ½mω0²u² = ηu⁴ at u = ω0√(m/2η). Equal to the matched Rayleigh length.
    pub fn quartic_dominance_radius(&self) -> f64 {
        self.matched_rayleigh()
    }
}

/// Close the tweezer parameter system and produce the trap it generates.
///
/// Expanding the on-axis potential about its minimum gives
/// `ω0 = (2V0/mzR²)^{1/2}` and `η = V0/zR⁴`.
pub fn derive_trap(tweezer: &TweezerSpec, mass: f64, distance: f64) -> Result<TrapSpec> {
    positive("mass_kg", mass)?;
    positive("distance_m", distance)?;
    let zr = tweezer.rayleigh_length()?;
    let depth = match (tweezer.depth, tweezer.omega0) {
        (Some(v0), None) => positive("trap_depth_J", v0)?,
        (None, Some(w)) => 0.5 * mass * positive("omega0_rad_s", w)?.powi(2) * zr * zr,
        (Some(v0), Some(w)) => {
            positive("trap_depth_J", v0)?;
            let implied = 0.5 * mass * positive("omega0_rad_s", w)?.powi(2) * zr * zr;
            if !close(v0, implied) {
                return Err(Error::config(
                    "trap_depth_J",
                    format!(
                        "conflicts with omega0_rad_s: depth {v0:e} J but ½mω0²zR² = {implied:e} J"
                    ),
                ));
            }
            v0
        }
        (None, None) => {
            return Err(Error::config(
                "omega0_rad_s",
                "missing: give exactly one of omega0_rad_s or trap_depth_J",
            ))
        }
    };
    let omega0 = tweezer
        .omega0
        .unwrap_or_else(|| (2.0 * depth / (mass * zr * zr)).sqrt());
    let eta = depth / zr.powi(4);
    TrapSpec::new(mass, omega0, eta, distance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PotentialKind {
    HarmonicOnly,
    HarmonicPlusQuartic,
    /// Gaussian well `(V0/2)[1 − exp(−2u²/zR²)]` whose quadratic and quartic
    /// Taylor coefficients equal `½mω0²` and `−η`.
    GaussianMatched,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 3] = [
        PotentialKind::HarmonicOnly,
        PotentialKind::HarmonicPlusQuartic,
        PotentialKind::GaussianMatched,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::HarmonicOnly => "HarmonicOnly",
            PotentialKind::HarmonicPlusQuartic => "HarmonicPlusQuartic",
            PotentialKind::GaussianMatched => "GaussianMatched",
        }
    }

    pub fn validate(self, trap: &TrapSpec) -> Result<()> {
        if self == PotentialKind::GaussianMatched && trap.eta <= 0.0 {
            return Err(Error::config(
                "potential_kind",
                "GaussianMatched needs η > 0 for a finite matched depth",
            ));
        }
        Ok(())
    }

    /// Signed quartic Taylor coefficient of the potential about its minimum.
    pub fn quartic_coefficient(self, trap: &TrapSpec) -> f64 {
        match self {
            PotentialKind::HarmonicOnly => 0.0,
            PotentialKind::HarmonicPlusQuartic | PotentialKind::GaussianMatched => -trap.eta,
        }
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PotentialKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("potential_kind", format!("unknown kind `{s}`")))
    }
}

/// Trap potential at displacement `u` from the trap center. Vanishes at `u = 0`.
pub fn potential_value(kind: PotentialKind, trap: &TrapSpec, u: f64) -> f64 {
    let harmonic = 0.5 * trap.stiffness() * u * u;
    match kind {
        PotentialKind::HarmonicOnly => harmonic,
        PotentialKind::HarmonicPlusQuartic => harmonic - trap.eta * u.powi(4),
        PotentialKind::GaussianMatched => {
            if trap.eta == 0.0 {
                return harmonic;
            }
            let z = trap.matched_rayleigh();
            -0.5 * trap.matched_depth() * (-2.0 * u * u / (z * z)).exp_m1()
        }
    }
}

/// Derivative dV/du, the restoring force with its sign flipped.
pub fn potential_slope(kind: PotentialKind, trap: &TrapSpec, u: f64) -> f64 {
    let harmonic = trap.stiffness() * u;
    match kind {
        PotentialKind::HarmonicOnly => harmonic,
        PotentialKind::HarmonicPlusQuartic => harmonic - 4.0 * trap.eta * u.powi(3),
        PotentialKind::GaussianMatched => {
            if trap.eta == 0.0 {
                return harmonic;
            }
            let z2 = trap.matched_rayleigh().powi(2);
            2.0 * trap.matched_depth() * u / z2 * (-2.0 * u * u / z2).exp()
        }
    }
}

/// Decomposition of a compensated potential `½mω0²(x−x0)² + κ(x−x0)⁴ − mxẍ0`
/// into `A(x − x̃0)² + κ(x⁴ − 4x³x0) + C`, with `A = ½mω̃0²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompensationParams {
    /// Signed quartic coefficient κ the decomposition was built for.
    pub quartic: f64,
    /// Trap center x0 [m].
    pub x0: f64,
    /// ω̃0² [rad²/s²]; negative when the quartic term overturns the curvature.
    pub omega_tilde_sq: f64,
    /// New center of the harmonic part x̃0 [m].
    pub x_tilde: f64,
    /// A = ½mω̃0² [J/m²].
    pub stiffness: f64,
    /// Purely time-dependent offset C [J].
    pub offset: f64,
}

impl CompensationParams {
    fn with_quartic(trap: &TrapSpec, quartic: f64, x0: f64, x0_accel: f64) -> Self {
        let m = trap.mass;
        let omega_tilde_sq = trap.omega0.powi(2) + 12.0 * quartic * x0 * x0 / m;
        let stiffness = 0.5 * m * omega_tilde_sq;
        let numerator = 0.5 * m * trap.omega0.powi(2) * x0 + 0.5 * m * x0_accel + 2.0 * quartic * x0.powi(3);
        let x_tilde = numerator / stiffness;
        let offset = quartic * x0.powi(4) + 0.5 * m * trap.omega0.powi(2) * x0 * x0
            - numerator * numerator / stiffness;
        Self {
            quartic,
            x0,
            omega_tilde_sq,
            x_tilde,
            stiffness,
            offset,
        }
    }

    /// ω̃0, or `None` when the harmonic part is inverted.
    pub fn omega_tilde(&self) -> Option<f64> {
        (self.omega_tilde_sq >= 0.0).then(|| self.omega_tilde_sq.sqrt())
    }

    /// Cubic-plus-quartic remainder B(x) = κ(x⁴ − 4x³x0).
    pub fn remainder(&self, x: f64) -> f64 {
        self.quartic * (x.powi(4) - 4.0 * x.powi(3) * self.x0)
    }

    /// Evaluate the rewritten form `A(x − x̃0)² + B(x) + C`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.stiffness * (x - self.x_tilde).powi(2) + self.remainder(x) + self.offset
    }
}

/// Rewrite of the compensated quartic trap with the quartic entering as `+η`,
/// giving `ω̃0 = √(ω0² + 12ηx0²/m)` and `x̃0 = (½mω0²x0 + ½mẍ0 + 2ηx0³)/A`.
pub fn compensating_parameters(trap: &TrapSpec, x0: f64, x0_accel: f64) -> CompensationParams {
    CompensationParams::with_quartic(trap, trap.eta, x0, x0_accel)
}

/// Same rewrite for the potential actually used by `kind` (quartic `−η`).
/// The Gaussian well has no finite polynomial rewrite.
pub fn compensating_parameters_for(
    kind: PotentialKind,
    trap: &TrapSpec,
    x0: f64,
    x0_accel: f64,
) -> Result<CompensationParams> {
    match kind {
        PotentialKind::GaussianMatched => Err(Error::config(
            "potential_kind",
            "GaussianMatched has no polynomial compensated form",
        )),
        _ => Ok(CompensationParams::with_quartic(
            trap,
            kind.quartic_coefficient(trap),
            x0,
            x0_accel,
        )),
    }
}

/// Trap potential plus the linear compensating term: `V(x − x0) − m x ẍ0`.
pub fn compensated_potential(
    kind: PotentialKind,
    trap: &TrapSpec,
    x: f64,
    x0: f64,
    x0_accel: f64,
) -> f64 {
    potential_value(kind, trap, x - x0) - trap.mass * x * x0_accel
}

fn positive(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be positive and finite, got {v:e}")))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= CONSISTENCY_RTOL * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const RB87: f64 = 1.442_69e-25;

    fn reference_tweezer() -> TweezerSpec {
        TweezerSpec {
            omega0: Some(2.0 * PI * 20.0),
            waist: Some(50.0 * 1060e-9),
            wavelength: Some(1060e-9),
            ..Default::default()
        }
    }

    fn reference_trap() -> TrapSpec {
        derive_trap(&reference_tweezer(), RB87, 0.01).unwrap()
    }

    #[test]
    fn rayleigh_length_from_beam() {
        let z = reference_tweezer().rayleigh_length().unwrap();
        assert_relative_eq!(z, 2500.0 * PI * 1060e-9, max_relative = 1e-15);
        assert_relative_eq!(z, 8.3252e-3, max_relative = 1e-4);
    }

    #[test]
    fn derive_reference_trap() {
        let trap = reference_trap();
        let z = reference_tweezer().rayleigh_length().unwrap();
        let v0 = 0.5 * RB87 * trap.omega0.powi(2) * z * z;
        assert_relative_eq!(v0, 7.895_038_408_333e-26, max_relative = 1e-12);
        assert_relative_eq!(trap.eta, 1.643_505_873_976_5e-17, max_relative = 1e-12);
        assert_relative_eq!(trap.eta * z.powi(4), v0, max_relative = 1e-12);
    }

    #[test]
    fn derive_from_depth_round_trips() {
        let trap = reference_trap();
        let tw = TweezerSpec {
            depth: Some(trap.matched_depth()),
            omega0: None,
            ..reference_tweezer()
        };
        let back = derive_trap(&tw, RB87, 0.01).unwrap();
        assert_relative_eq!(back.omega0, trap.omega0, max_relative = 1e-12);
        assert_relative_eq!(back.eta, trap.eta, max_relative = 1e-12);
        assert_relative_eq!(
            trap.matched_rayleigh(),
            reference_tweezer().rayleigh_length().unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn derive_rejects_inconsistent_and_missing() {
        let over = TweezerSpec {
            depth: Some(1e-25),
            ..reference_tweezer()
        };
        match derive_trap(&over, RB87, 0.01) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "trap_depth_J"),
            other => panic!("expected config error, got {other:?}"),
        }
        let under = TweezerSpec {
            omega0: None,
            ..reference_tweezer()
        };
        assert!(matches!(
            derive_trap(&under, RB87, 0.01),
            Err(Error::Config { field: "omega0_rad_s", .. })
        ));
        let no_length = TweezerSpec {
            omega0: Some(1.0),
            ..Default::default()
        };
        assert!(matches!(
            derive_trap(&no_length, RB87, 0.01),
            Err(Error::Config { field: "rayleigh_m", .. })
        ));
        // Consistent redundancy is fine.
        let both = TweezerSpec {
            depth: Some(reference_trap().matched_depth()),
            ..reference_tweezer()
        };
        assert!(derive_trap(&both, RB87, 0.01).is_ok());
    }

    #[test]
    fn potentials_vanish_at_center() {
        let trap = reference_trap();
        for kind in PotentialKind::ALL {
            assert_eq!(potential_value(kind, &trap, 0.0), 0.0);
        }
    }

    #[test]
    fn quartic_at_ground_width() {
        let trap = reference_trap();
        let c = PhysicalConstants::default();
        let s = trap.ground_width(&c);
        let expect = 0.5 * c.hbar * trap.omega0 - trap.eta * s.powi(4);
        assert_relative_eq!(
            potential_value(PotentialKind::HarmonicPlusQuartic, &trap, s),
            expect,
            max_relative = 1e-12
        );
    }

    #[test]
    fn gaussian_within_taylor_remainder() {
        let trap = reference_trap();
        let u = 1e-4;
        let x = 2.0 * u * u / trap.matched_rayleigh().powi(2);
        let vg = potential_value(PotentialKind::GaussianMatched, &trap, u);
        let vq = potential_value(PotentialKind::HarmonicPlusQuartic, &trap, u);
        // Alternating series: the first neglected term (V0/2)x³/6 bounds the error.
        let bound = 0.5 * trap.matched_depth() * x.powi(3) / 6.0;
        assert!((vg - vq).abs() <= bound, "{} > {}", (vg - vq).abs(), bound);
        assert!((vg - vq).abs() / vq.abs() <= x * x / 6.0 * 1.001);
    }

    /// Richardson-extrapolated central differences at u = 0.
    fn derivative_at_zero(f: impl Fn(f64) -> f64, order: usize, h: f64) -> f64 {
        let d = |h: f64| match order {
            2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
            4 => (f(2.0 * h) - 4.0 * f(h) + 6.0 * f(0.0) - 4.0 * f(-h) + f(-2.0 * h)) / h.powi(4),
            _ => unreachable!(),
        };
        // Both stencils have error series in even powers of h.
        let (a, b, c) = (d(h), d(h / 2.0), d(h / 4.0));
        let r1 = (4.0 * b - a) / 3.0;
        let r2 = (4.0 * c - b) / 3.0;
        (16.0 * r2 - r1) / 15.0
    }

    #[test]
    fn gaussian_taylor_coefficients_match() {
        let trap = reference_trap();
        let z = trap.matched_rayleigh();
        // Work in units of zR and the matched depth so the differences are well conditioned.
        let v0 = trap.matched_depth();
        let g = |s: f64| potential_value(PotentialKind::GaussianMatched, &trap, s * z) / v0;
        let second = derivative_at_zero(g, 2, 1e-2) * v0 / (z * z);
        let fourth = derivative_at_zero(g, 4, 5e-2) * v0 / z.powi(4);
        assert_relative_eq!(second, trap.stiffness(), max_relative = 1e-6);
        assert_relative_eq!(fourth, -24.0 * trap.eta, max_relative = 1e-6);
    }

    #[test]
    fn slope_matches_finite_difference() {
        let trap = reference_trap();
        for kind in PotentialKind::ALL {
            for u in [-2e-3, 3e-5, 1e-3] {
                let h = 1e-8;
                let fd = (potential_value(kind, &trap, u + h) - potential_value(kind, &trap, u - h))
                    / (2.0 * h);
                assert_relative_eq!(potential_slope(kind, &trap, u), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn compensation_without_motion() {
        let trap = reference_trap();
        let p = compensating_parameters(&trap, 0.0, 0.0);
        assert_eq!(p.omega_tilde(), Some(trap.omega0));
        assert_eq!(p.x_tilde, 0.0);
    }

    #[test]
    fn compensation_in_harmonic_trap_is_a_shift() {
        let trap = TrapSpec { eta: 0.0, ..reference_trap() };
        let (x0, a) = (3e-3, -2.5);
        let p = compensating_parameters(&trap, x0, a);
        assert_eq!(p.omega_tilde(), Some(trap.omega0));
        assert_relative_eq!(p.x_tilde, x0 + a / trap.omega0.powi(2), max_relative = 1e-14);
    }

    #[test]
    fn compensation_midway() {
        let trap = reference_trap();
        let d = trap.distance;
        let p = compensating_parameters(&trap, d / 2.0, 0.0);
        let expect = (trap.omega0.powi(2) + 3.0 * trap.eta * d * d / trap.mass).sqrt();
        assert_relative_eq!(p.omega_tilde().unwrap(), expect, max_relative = 1e-14);
        // x̃0 minimizes the quadratic part: golden-section search on the
        // quadratic-in-x part of V_c (the remainder B is excluded).
        let quad = |x: f64| {
            let x0 = d / 2.0;
            let full = 0.5 * trap.stiffness() * (x - x0).powi(2) + trap.eta * (x - x0).powi(4);
            full - trap.eta * (x.powi(4) - 4.0 * x.powi(3) * x0)
        };
        let (mut lo, mut hi) = (-d, d);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if quad(a) < quad(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        assert_relative_eq!(p.x_tilde, 0.5 * (lo + hi), max_relative = 1e-6);
    }

    #[test]
    fn compensated_potential_cases() {
        let trap = reference_trap();
        let x0 = 2e-3;
        for kind in PotentialKind::ALL {
            assert_eq!(
                compensated_potential(kind, &trap, 1e-3, x0, 0.0),
                potential_value(kind, &trap, 1e-3 - x0)
            );
        }
        assert_relative_eq!(
            compensated_potential(PotentialKind::HarmonicOnly, &trap, 0.0, x0, 7.0),
            0.5 * trap.stiffness() * x0 * x0,
            max_relative = 1e-15
        );
        assert!(compensating_parameters_for(PotentialKind::GaussianMatched, &trap, x0, 0.0).is_err());
    }

    fn identity_scale(trap: &TrapSpec, x: f64, x0: f64, a: f64) -> f64 {
        let r = x.abs() + x0.abs();
        0.5 * trap.stiffness() * r * r + trap.eta * r.powi(4) + trap.mass * (x * a).abs()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rewritten_form_matches_compensated_potential(
            x in -0.02f64..0.03, x0 in -0.005f64..0.015, a in -50.0f64..50.0
        ) {
            let trap = reference_trap();
            for kind in [PotentialKind::HarmonicOnly, PotentialKind::HarmonicPlusQuartic] {
                let p = compensating_parameters_for(kind, &trap, x0, a).unwrap();
                let direct = compensated_potential(kind, &trap, x, x0, a);
                let scale = identity_scale(&trap, x, x0, a);
                prop_assert!((p.evaluate(x) - direct).abs() <= 1e-10 * scale);
            }
            // The +η form of the rewrite against the +η compensated trap.
            let p = compensating_parameters(&trap, x0, a);
            let direct = 0.5 * trap.stiffness() * (x - x0).powi(2) + trap.eta * (x - x0).powi(4)
                - trap.mass * x * a;
            prop_assert!((p.evaluate(x) - direct).abs() <= 1e-10 * identity_scale(&trap, x, x0, a));
        }

        #[test]
        fn omega_tilde_even_and_monotone(x0 in 0.0f64..0.02, step in 0.0f64..0.01) {
            let trap = reference_trap();
            let w = |x: f64| compensating_parameters(&trap, x, 0.0).omega_tilde().unwrap();
            prop_assert_eq!(w(x0), w(-x0));
            prop_assert!(w(x0 + step) >= w(x0));
        }
    }
}
