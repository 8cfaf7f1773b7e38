//! Transport protocols: the classical center-of-mass trajectory `xc(t)`, the
//! control `u = xc − x0` and the trap path `x0(t)`.
//!
//! The trap path follows from Newton's equation in the moving harmonic trap,
//! `ẍc + ω0²(xc − x0) = 0`, so `u = −ẍc/ω0²` on the open interval `(0, tf)`.
//! Outside it the atom and trap coincide (`u = 0`), so protocols whose
//! acceleration does not vanish at the ends make the trap jump at `t = 0`
//! and `t = tf`.
//!
//! Fractional powers of negative bases are taken on the real branch:
//! `y^{p/3} = cbrt(y)^p`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of uniform intervals per sampled table.
pub const DEFAULT_INTERVALS: usize = 4096;
/// Offset, as a fraction of `tf`, of the one-sided samples next to `0` and `tf`.
pub const JUMP_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Quintic `d[10s³ − 15s⁴ + 6s⁵]`; meets all six boundary conditions.
    Polynomial5,
    /// Cubic `d s²(3 − 2s)`; minimizes the time-averaged harmonic potential energy.
    CubicMinHarmonic,
    /// Minimizer of `∫u⁴dt` with no bound on `|u|`.
    UnboundedOptimal,
    /// Minimizer of `∫u⁴dt` subject to `|u| ≤ δ`.
    BoundedOptimal,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 4] = [
        ProtocolKind::Polynomial5,
        ProtocolKind::CubicMinHarmonic,
        ProtocolKind::UnboundedOptimal,
        ProtocolKind::BoundedOptimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Polynomial5 => "Polynomial5",
            ProtocolKind::CubicMinHarmonic => "CubicMinHarmonic",
            ProtocolKind::UnboundedOptimal => "UnboundedOptimal",
            ProtocolKind::BoundedOptimal => "BoundedOptimal",
        }
    }
}

impl std::fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("variant", format!("unknown protocol `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub kind: ProtocolKind,
    /// Transport distance d [m].
    pub distance: f64,
    /// Duration tf [s].
    pub duration: f64,
    /// Harmonic angular frequency ω0 [rad/s].
    pub omega0: f64,
    /// Bound δ on |u| [m]; present iff `kind` is `BoundedOptimal`.
    pub bound: Option<f64>,
}

impl ProtocolSpec {
    pub fn new(
        kind: ProtocolKind,
        distance: f64,
        duration: f64,
        omega0: f64,
        bound: Option<f64>,
    ) -> Result<Self> {
        for (field, v) in [("distance_m", distance), ("tf_s", duration), ("omega0_rad_s", omega0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(field, format!("must be positive, got {v:e}")));
            }
        }
        match (kind, bound) {
            (ProtocolKind::BoundedOptimal, None) => {
                return Err(Error::config("delta_m", "BoundedOptimal requires a bound δ"))
            }
            (ProtocolKind::BoundedOptimal, Some(b)) if !(b.is_finite() && b > 0.0) => {
                return Err(Error::config("delta_m", format!("must be positive, got {b:e}")))
            }
            (ProtocolKind::BoundedOptimal, Some(_)) => {}
            (_, Some(_)) => {
                return Err(Error::config("delta_m", format!("{kind} takes no bound")))
            }
            (_, None) => {}
        }
        Ok(Self {
            kind,
            distance,
            duration,
            omega0,
            bound,
        })
    }

    /// δ0 = 14d/(3ω0²tf²): the bound at which the bounded optimum becomes the unbounded one.
    pub fn delta0(&self) -> f64 {
        delta0(self.distance, self.duration, self.omega0)
    }

    /// 4d/(ω0²tf²): smallest bound that can complete the transport in `tf`.
    pub fn delta_min(&self) -> f64 {
        4.0 * self.distance / (self.omega0 * self.duration).powi(2)
    }

    /// The bound if given, otherwise δ0.
    pub fn effective_bound(&self) -> f64 {
        self.bound.unwrap_or_else(|| self.delta0())
    }

    fn check_time(&self, t: f64) -> Result<f64> {
        if (0.0..=self.duration).contains(&t) {
            Ok(t / self.duration)
        } else {
            Err(Error::Domain {
                what: "t",
                value: t,
                domain: format!("[0, {:e}]", self.duration),
            })
        }
    }
}

pub fn delta0(distance: f64, duration: f64, omega0: f64) -> f64 {
    14.0 * distance / (3.0 * (omega0 * duration).powi(2))
}

/// Closed-form Pontryagin solution for the bounded problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedConstants {
    /// Slope of the costate p2 [m³/s].
    pub c1: f64,
    /// Offset of the costate p2, `c1·tf/2` [m³].
    pub c2: f64,
    /// Velocity constant of the interior arc [m/s].
    pub c3: f64,
    /// Position constant of the interior arc [m].
    pub c4: f64,
    /// End of the first saturated arc [s].
    pub t1: f64,
    /// Duration of the interior arc [s].
    pub t2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub xc: f64,
    pub xc_dot: f64,
    pub xc_ddot: f64,
    pub u: f64,
    pub x0: f64,
}

/// Position, velocity and acceleration of the classical trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub xc: f64,
    pub xc_dot: f64,
    pub xc_ddot: f64,
}

/// Trap center with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapMotion {
    pub x0: f64,
    pub x0_dot: f64,
    pub x0_ddot: f64,
}

fn cbrt_pow(y: f64, p: i32) -> f64 {
    y.cbrt().powi(p)
}

fn polynomial_kinematics(spec: &ProtocolSpec, s: f64) -> Kinematics {
    let (d, tf) = (spec.distance, spec.duration);
    Kinematics {
        xc: d * s.powi(3) * (10.0 - 15.0 * s + 6.0 * s * s),
        xc_dot: d / tf * 30.0 * s * s * (1.0 - s).powi(2),
        xc_ddot: d / (tf * tf) * 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s),
    }
}

fn cubic_kinematics(spec: &ProtocolSpec, s: f64) -> Kinematics {
    let (d, tf) = (spec.distance, spec.duration);
    Kinematics {
        xc: d * s * s * (3.0 - 2.0 * s),
        xc_dot: d / tf * 6.0 * s * (1.0 - s),
        xc_ddot: d / (tf * tf) * 6.0 * (1.0 - 2.0 * s),
    }
}

fn unbounded_kinematics(spec: &ProtocolSpec, s: f64) -> Kinematics {
    let (d, tf) = (spec.distance, spec.duration);
    let y = 1.0 - 2.0 * s;
    Kinematics {
        xc: 3.0 * d / 8.0 * cbrt_pow(y, 7) + 7.0 * d / 4.0 * s - 3.0 * d / 8.0,
        xc_dot: 7.0 * d / (4.0 * tf) * (1.0 - cbrt_pow(y, 4)),
        xc_ddot: 14.0 * d / (3.0 * tf * tf) * y.cbrt(),
    }
}

/// Quintic polynomial trajectory.
pub fn polynomial_xc(t: f64, spec: &ProtocolSpec) -> Result<TrajectoryPoint> {
    let s = spec.check_time(t)?;
    Ok(interior_point(spec, t, polynomial_kinematics(spec, s)))
}

/// Cubic trajectory minimizing the harmonic potential energy.
pub fn cubic_xc(t: f64, spec: &ProtocolSpec) -> Result<TrajectoryPoint> {
    let s = spec.check_time(t)?;
    Ok(interior_point(spec, t, cubic_kinematics(spec, s)))
}

/// Unbounded optimal trajectory `(3d/8)(1−2s)^{7/3} + (7d/4)s − 3d/8`.
pub fn unbounded_xc(t: f64, spec: &ProtocolSpec) -> Result<TrajectoryPoint> {
    let s = spec.check_time(t)?;
    Ok(interior_point(spec, t, unbounded_kinematics(spec, s)))
}

/// Unbounded optimal control, complemented by jumps to zero outside `(0, tf)`.
pub fn unbounded_control(t: f64, spec: &ProtocolSpec) -> f64 {
    if t <= 0.0 || t >= spec.duration {
        0.0
    } else {
        spec.delta0() * (2.0 * t / spec.duration - 1.0).cbrt()
    }
}

/// Build a trajectory point, applying the jump prescription at the ends.
fn interior_point(spec: &ProtocolSpec, t: f64, k: Kinematics) -> TrajectoryPoint {
    let u = if t <= 0.0 || t >= spec.duration {
        0.0
    } else {
        -k.xc_ddot / spec.omega0.powi(2)
    };
    TrajectoryPoint {
        t,
        xc: k.xc,
        xc_dot: k.xc_dot,
        xc_ddot: k.xc_ddot,
        u,
        x0: k.xc - u,
    }
}

/// Solve for the bounded-control constants.
///
/// `c1 = 2ω0√(δ⁷/(7(ω0²tf²δ − 4d)))` comes from continuity of `xc` at the end
/// of the interior arc; the rest follow from the symmetry `tf = 2t1 + t2` and
/// continuity of `ẋc` and `xc` at `t1`.
pub fn bounded_constants(spec: &ProtocolSpec) -> Result<BoundedConstants> {
    let delta = spec
        .bound
        .ok_or_else(|| Error::config("delta_m", "bounded constants need a bound δ"))?;
    let (d, tf, w) = (spec.distance, spec.duration, spec.omega0);
    let delta_min = spec.delta_min();
    let delta0 = spec.delta0();
    if delta <= delta_min {
        return Err(Error::Infeasible { delta, delta_min });
    }
    if delta > delta0 * (1.0 + 1e-12) {
        return Err(Error::BoundInactive { delta, delta0 });
    }
    let w2 = w * w;
    let c1 = 2.0 * w * (delta.powi(7) / (7.0 * (w2 * tf * tf * delta - 4.0 * d))).sqrt();
    let half_arc = delta.powi(3) / c1;
    // Rounding can push t1 a hair below zero when δ sits on δ0.
    let t1 = (0.5 * tf - half_arc).max(0.0);
    let t2 = tf - 2.0 * t1;
    let c3 = 0.5 * w2 * delta * tf - w2 * delta.powi(4) / (4.0 * c1);
    let c4 = -w2 * tf * tf * delta / 8.0 + w2 * tf * delta.powi(4) / (8.0 * c1)
        - w2 * delta.powi(7) / (14.0 * c1 * c1);
    Ok(BoundedConstants {
        c1,
        c2: 0.5 * c1 * tf,
        c3,
        c4,
        t1,
        t2,
    })
}

fn bounded_kinematics(spec: &ProtocolSpec, c: &BoundedConstants, t: f64) -> (Kinematics, f64) {
    let (d, tf, w2) = (spec.distance, spec.duration, spec.omega0.powi(2));
    let delta = spec.bound.unwrap_or_else(|| spec.delta0());
    if t <= c.t1 {
        let k = Kinematics {
            xc: 0.5 * w2 * delta * t * t,
            xc_dot: w2 * delta * t,
            xc_ddot: w2 * delta,
        };
        (k, -delta)
    } else if t >= c.t1 + c.t2 {
        let r = t - tf;
        let k = Kinematics {
            xc: d - 0.5 * w2 * delta * r * r,
            xc_dot: -w2 * delta * r,
            xc_ddot: -w2 * delta,
        };
        (k, delta)
    } else {
        let tau = t - 0.5 * tf;
        let k1 = c.c1.cbrt();
        let k = Kinematics {
            xc: -9.0 * w2 / 28.0 * k1 * cbrt_pow(tau, 7) + c.c3 * t + c.c4,
            xc_dot: -0.75 * w2 * k1 * cbrt_pow(tau, 4) + c.c3,
            xc_ddot: -w2 * k1 * tau.cbrt(),
        };
        // u = −(−c1t + c2)^{1/3} written in τ to avoid cancellation.
        (k, k1 * tau.cbrt())
    }
}

/// Three-arc bounded optimal trajectory.
pub fn bounded_xc(t: f64, spec: &ProtocolSpec, consts: &BoundedConstants) -> Result<TrajectoryPoint> {
    spec.check_time(t)?;
    let (k, u_arc) = bounded_kinematics(spec, consts, t);
    let u = if t <= 0.0 || t >= spec.duration { 0.0 } else { u_arc };
    Ok(TrajectoryPoint {
        t,
        xc: k.xc,
        xc_dot: k.xc_dot,
        xc_ddot: k.xc_ddot,
        u,
        x0: k.xc - u,
    })
}

/// Control and trap position at any real time.
pub fn control_and_trap_path(
    t: f64,
    spec: &ProtocolSpec,
    consts: Option<&BoundedConstants>,
) -> Result<(f64, f64)> {
    let protocol = Protocol::with_constants(*spec, consts.copied())?;
    Ok((protocol.control(t), protocol.trap_position(t)))
}

/// A protocol with everything needed to evaluate it resolved up front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    spec: ProtocolSpec,
    bounded: Option<BoundedConstants>,
}

impl Protocol {
    /// Resolve a spec, solving for the bounded constants when needed.
    pub fn new(spec: ProtocolSpec) -> Result<Self> {
        let bounded = match spec.kind {
            ProtocolKind::BoundedOptimal => Some(bounded_constants(&spec)?),
            _ => None,
        };
        Ok(Self { spec, bounded })
    }

    pub fn with_constants(spec: ProtocolSpec, consts: Option<BoundedConstants>) -> Result<Self> {
        match (spec.kind, consts) {
            (ProtocolKind::BoundedOptimal, None) => Err(Error::config(
                "bounded_constants",
                "BoundedOptimal needs its constants",
            )),
            (ProtocolKind::BoundedOptimal, Some(c)) => Ok(Self {
                spec,
                bounded: Some(c),
            }),
            _ => Ok(Self {
                spec,
                bounded: None,
            }),
        }
    }

    pub fn spec(&self) -> &ProtocolSpec {
        &self.spec
    }

    pub fn kind(&self) -> ProtocolKind {
        self.spec.kind
    }

    pub fn duration(&self) -> f64 {
        self.spec.duration
    }

    pub fn constants(&self) -> Option<&BoundedConstants> {
        self.bounded.as_ref()
    }

    /// Arc formulas evaluated on the closed interval, returning the
    /// interior control as well (one-sided limits at the ends).
    fn arcs(&self, t: f64) -> (Kinematics, f64) {
        let s = t / self.spec.duration;
        let w2 = self.spec.omega0.powi(2);
        match self.spec.kind {
            ProtocolKind::Polynomial5 => {
                let k = polynomial_kinematics(&self.spec, s);
                (k, -k.xc_ddot / w2)
            }
            ProtocolKind::CubicMinHarmonic => {
                let k = cubic_kinematics(&self.spec, s);
                (k, -k.xc_ddot / w2)
            }
            ProtocolKind::UnboundedOptimal => {
                let k = unbounded_kinematics(&self.spec, s);
                (k, self.spec.delta0() * (2.0 * s - 1.0).cbrt())
            }
            ProtocolKind::BoundedOptimal => {
                let c = self.bounded.as_ref().expect("constants resolved at construction");
                bounded_kinematics(&self.spec, c, t)
            }
        }
    }

    pub fn kinematics(&self, t: f64) -> Result<Kinematics> {
        self.spec.check_time(t)?;
        Ok(self.arcs(t).0)
    }

    pub fn point(&self, t: f64) -> Result<TrajectoryPoint> {
        self.spec.check_time(t)?;
        let (k, _) = self.arcs(t);
        let u = self.control(t);
        Ok(TrajectoryPoint {
            t,
            xc: k.xc,
            xc_dot: k.xc_dot,
            xc_ddot: k.xc_ddot,
            u,
            x0: k.xc - u,
        })
    }

    /// Control with the jump prescription: zero for `t ≤ 0` and `t ≥ tf`.
    pub fn control(&self, t: f64) -> f64 {
        if t <= 0.0 || t >= self.spec.duration {
            0.0
        } else {
            self.arcs(t).1
        }
    }

    /// Control on the closed interval `[0, tf]` with one-sided limits at
    /// the ends. This is the integrand source for cost functionals.
    pub fn interior_control(&self, t: f64) -> f64 {
        self.arcs(t.clamp(0.0, self.spec.duration)).1
    }

    /// One-sided limits `(u(0⁺), u(tf⁻))`.
    pub fn control_limits(&self) -> (f64, f64) {
        (self.interior_control(0.0), self.interior_control(self.spec.duration))
    }

    /// Classical trajectory at any real time (at rest outside `[0, tf]`).
    pub fn center(&self, t: f64) -> Kinematics {
        if t <= 0.0 {
            Kinematics { xc: 0.0, xc_dot: 0.0, xc_ddot: 0.0 }
        } else if t >= self.spec.duration {
            Kinematics {
                xc: self.spec.distance,
                xc_dot: 0.0,
                xc_ddot: 0.0,
            }
        } else {
            self.arcs(t).0
        }
    }

    /// Trap center `x0 = xc − u` at any real time.
    pub fn trap_position(&self, t: f64) -> f64 {
        self.center(t).xc - self.control(t)
    }

    /// Whether the trap path is continuous (no control jumps at the ends).
    pub fn has_continuous_trap_path(&self) -> bool {
        let (a, b) = self.control_limits();
        a == 0.0 && b == 0.0
    }

    /// Trap center with velocity and acceleration, for protocols whose trap
    /// path is smooth on the open interval. Uses `x0 = xc + ẍc/ω0²`.
    pub fn trap_motion(&self, t: f64) -> Result<TrapMotion> {
        let inside = self.trap_motion_interior(t.clamp(0.0, self.spec.duration))?;
        if t <= 0.0 || t >= self.spec.duration {
            return Ok(TrapMotion {
                x0: self.trap_position(t),
                x0_dot: 0.0,
                x0_ddot: 0.0,
            });
        }
        Ok(inside)
    }

    /// Interior branch of [`Protocol::trap_motion`] on the closed interval,
    /// giving one-sided limits at `0` and `tf`.
    pub fn trap_motion_interior(&self, t: f64) -> Result<TrapMotion> {
        let w2 = self.spec.omega0.powi(2);
        let (d, tf) = (self.spec.distance, self.spec.duration);
        let s = (t / tf).clamp(0.0, 1.0);
        let (jerk, snap) = match self.spec.kind {
            ProtocolKind::Polynomial5 => (
                d / tf.powi(3) * (60.0 - 360.0 * s + 360.0 * s * s),
                d / tf.powi(4) * (-360.0 + 720.0 * s),
            ),
            ProtocolKind::CubicMinHarmonic => (-12.0 * d / tf.powi(3), 0.0),
            kind => {
                return Err(Error::config(
                    "variant",
                    format!("{kind} has a singular trap acceleration; smooth trap motion needs Polynomial5 or CubicMinHarmonic"),
                ))
            }
        };
        let k = self.arcs(s * tf).0;
        Ok(TrapMotion {
            x0: k.xc + k.xc_ddot / w2,
            x0_dot: k.xc_dot + jerk / w2,
            x0_ddot: k.xc_ddot + snap / w2,
        })
    }

    /// Interior points where the control is not smooth: the cube-root point
    /// `tf/2` of the optimal arcs and the switching times of the bounded one.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        let tf = self.spec.duration;
        let mut out = Vec::new();
        match self.spec.kind {
            ProtocolKind::UnboundedOptimal => out.push(Breakpoint::CubeRoot(0.5 * tf)),
            ProtocolKind::BoundedOptimal => {
                let c = self.bounded.as_ref().expect("constants resolved at construction");
                if c.t1 > 0.0 {
                    out.push(Breakpoint::Kink(c.t1));
                }
                out.push(Breakpoint::CubeRoot(0.5 * tf));
                if c.t1 > 0.0 {
                    out.push(Breakpoint::Kink(c.t1 + c.t2));
                }
            }
            _ => {}
        }
        out
    }

    /// Sample onto `intervals + 1` uniform times plus one-sided samples at
    /// `tf·1e-9` from each end.
    pub fn sample(&self, intervals: usize) -> Result<TrajectoryTable> {
        if intervals < 2 {
            return Err(Error::Domain {
                what: "intervals",
                value: intervals as f64,
                domain: "[2, ∞)".into(),
            });
        }
        let tf = self.spec.duration;
        let mut times: Vec<f64> = (0..=intervals)
            .map(|k| if k == intervals { tf } else { tf * k as f64 / intervals as f64 })
            .collect();
        times.insert(1, tf * JUMP_OFFSET);
        times.insert(times.len() - 1, tf * (1.0 - JUMP_OFFSET));
        let points = times
            .into_iter()
            .map(|t| self.point(t))
            .collect::<Result<Vec<_>>>()?;
        TrajectoryTable::from_points(*self, points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakpoint {
    /// The control is continuous but its derivative jumps.
    Kink(f64),
    /// The control behaves like `|t − t*|^{1/3}`.
    CubeRoot(f64),
}

impl Breakpoint {
    pub fn time(self) -> f64 {
        match self {
            Breakpoint::Kink(t) | Breakpoint::CubeRoot(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryTable {
    protocol: Protocol,
    points: Vec<TrajectoryPoint>,
}

impl TrajectoryTable {
    /// Wrap externally produced points; they must be strictly increasing in
    /// time and span `[0, tf]`.
    pub fn from_points(protocol: Protocol, points: Vec<TrajectoryPoint>) -> Result<Self> {
        let tf = protocol.duration();
        let spans = points.first().map(|p| p.t) == Some(0.0) && points.last().map(|p| p.t) == Some(tf);
        if !spans {
            return Err(Error::config("points", "table must start at t = 0 and end at t = tf"));
        }
        if points.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::config("points", "times must be strictly increasing"));
        }
        Ok(Self { protocol, points })
    }

    pub fn protocol(&self) -> &Protocol {
        &self.protocol
    }

    pub fn spec(&self) -> &ProtocolSpec {
        self.protocol.spec()
    }

    pub fn points(&self) -> &[TrajectoryPoint] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// δ lies in `(4d/(ω0²tf²), δ0]`.
    Feasible,
    /// δ > δ0: the bound is never reached; the unbounded optimum applies.
    BoundInactive,
    /// δ ≤ 4d/(ω0²tf²), equivalently tf ≤ tf_min.
    Infeasible,
    /// No bound requested.
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub tf: f64,
    /// δ used for the time bounds: the requested bound, or δ0 without one.
    pub delta: f64,
    pub delta_min: f64,
    /// δ0 = 14d/(3ω0²tf²).
    pub delta_star: f64,
    /// (2/ω0)√(d/δ).
    pub tf_min: f64,
    /// (1/ω0)√(14d/3δ).
    pub tf_star: f64,
    /// Perturbative-regime time scale; filled in by energetics when the trap is known.
    pub perturbative_threshold: Option<f64>,
    pub verdict: Verdict,
}

pub fn feasibility(spec: &ProtocolSpec) -> FeasibilityReport {
    let (d, w) = (spec.distance, spec.omega0);
    let delta = spec.effective_bound();
    let delta_min = spec.delta_min();
    let delta_star = spec.delta0();
    let verdict = match spec.bound {
        None => Verdict::Unconstrained,
        Some(b) if b <= delta_min => Verdict::Infeasible,
        Some(b) if b > delta_star * (1.0 + 1e-12) => Verdict::BoundInactive,
        Some(_) => Verdict::Feasible,
    };
    FeasibilityReport {
        tf: spec.duration,
        delta,
        delta_min,
        delta_star,
        tf_min: 2.0 / w * (d / delta).sqrt(),
        tf_star: (14.0 * d / (3.0 * delta)).sqrt() / w,
        perturbative_threshold: None,
        verdict,
    }
}

/// Deviation of `(ẍc)³` from its best affine fit over the interior samples,
/// normalized by `(d/tf²)³`. The unbounded optimum solves
/// `d²/dt² (ẍc)³ = 0`, so its residual vanishes.
pub fn verify_euler_lagrange(table: &TrajectoryTable) -> Result<f64> {
    let spec = table.spec();
    let tf = spec.duration;
    let interior: Vec<(f64, f64)> = table
        .points()
        .iter()
        .filter(|p| p.t > 0.0 && p.t < tf)
        .map(|p| (p.t / tf, p.xc_ddot.powi(3)))
        .collect();
    if interior.len() < 4 {
        return Err(Error::Domain {
            what: "interior samples",
            value: interior.len() as f64,
            domain: "[4, ∞)".into(),
        });
    }
    let scale = (spec.distance / (tf * tf)).powi(3);
    let n = interior.len() as f64;
    let mean_s = interior.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = interior.iter().map(|p| p.1 / scale).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(s, y) in &interior {
        sxx += (s - mean_s).powi(2);
        sxy += (s - mean_s) * (y / scale - mean_y);
    }
    let slope = sxy / sxx;
    Ok(interior
        .iter()
        .map(|&(s, y)| (y / scale - mean_y - slope * (s - mean_s)).abs())
        .fold(0.0, f64::max))
}
