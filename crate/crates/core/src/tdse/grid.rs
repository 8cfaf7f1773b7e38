use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Protocol, ProtocolKind};

/// Coordinate frame of the simulation grid. A frame following `R(t)` uses
/// `q = x − R(t)` and the boost gauge `ψ = exp(imṘq/ħ)φ(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    Lab,
    /// Origin on the classical trajectory xc(t).
    ComovingXc,
    /// Origin on the trap center x0(t); needs a continuous trap path.
    ComovingTrap,
}

impl Frame {
    pub const ALL: [Frame; 3] = [Frame::Lab, Frame::ComovingXc, Frame::ComovingTrap];

    pub fn name(self) -> &'static str {
        match self {
            Frame::Lab => "Lab",
            Frame::ComovingXc => "ComovingXc",
            Frame::ComovingTrap => "ComovingTrap",
        }
    }

    pub(crate) fn check(self, protocol: &Protocol) -> Result<()> {
        if self == Frame::ComovingTrap && protocol.kind() != ProtocolKind::Polynomial5 {
            return Err(Error::config(
                "frame",
                format!("ComovingTrap needs a continuous trap path, which {} lacks", protocol.kind()),
            ));
        }
        Ok(())
    }

    /// Frame origin with its velocity and acceleration at `t`. Inside
    /// `[0, tf]` the interior branch is used, so the ends give one-sided limits.
    pub(crate) fn motion(self, protocol: &Protocol, t: f64) -> Motion {
        let tf = protocol.duration();
        match self {
            Frame::Lab => Motion::default(),
            Frame::ComovingXc => {
                if t < 0.0 {
                    return Motion::default();
                }
                if t > tf {
                    return Motion { r: protocol.spec().distance, ..Motion::default() };
                }
                let k = protocol.kinematics(t).expect("time inside [0, tf]");
                Motion { r: k.xc, v: k.xc_dot, a: k.xc_ddot }
            }
            Frame::ComovingTrap => {
                if t < 0.0 {
                    return Motion::default();
                }
                if t > tf {
                    return Motion { r: protocol.spec().distance, ..Motion::default() };
                }
                let m = protocol
                    .trap_motion_interior(t)
                    .expect("frame checked against the protocol");
                Motion { r: m.x0, v: m.x0_dot, a: m.x0_ddot }
            }
        }
    }
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Frame::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config("frame", format!("unknown frame `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Motion {
    pub r: f64,
    pub v: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of points, a power of two.
    pub n_points: usize,
    /// Half width L of the periodic window [m].
    pub half_width: f64,
    /// Window center in frame coordinates [m].
    pub center: f64,
    /// Nominal time step [s]; runs use the largest step ≤ dt that divides tf.
    pub dt: f64,
    pub frame: Frame,
}

impl GridSpec {
    pub fn new(n_points: usize, half_width: f64, center: f64, dt: f64, frame: Frame) -> Result<Self> {
        if n_points < 256 || !n_points.is_power_of_two() {
            return Err(Error::config("n_points", format!("need a power of two ≥ 256, got {n_points}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::config("half_width_m", format!("must be positive, got {half_width:e}")));
        }
        if !center.is_finite() {
            return Err(Error::config("center_m", "must be finite"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config("dt_s", format!("must be positive, got {dt:e}")));
        }
        Ok(Self {
            n_points,
            half_width,
            center,
            dt,
            frame,
        })
    }

    /// Δq = 2L/n.
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let (lo, h) = (self.center - self.half_width, self.spacing());
        (0..self.n_points).map(|j| lo + j as f64 * h).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = std::f64::consts::PI / self.half_width;
        (0..n)
            .map(|j| if j < n / 2 { j as f64 * dk } else { (j as f64 - n as f64) * dk })
            .collect()
    }

    /// Δq ≤ σ/8.
    pub fn check_resolution(&self, sigma: f64) -> Result<()> {
        if self.spacing() > sigma / 8.0 {
            return Err(Error::config(
                "n_points",
                format!("spacing {:e} m exceeds σ/8 = {:e} m", self.spacing(), sigma / 8.0),
            ));
        }
        Ok(())
    }

    /// Whether two grids sample the same points in the same frame.
    pub fn same_space(&self, other: &GridSpec) -> bool {
        self.n_points == other.n_points
            && self.half_width == other.half_width
            && self.center == other.center
            && self.frame == other.frame
    }

    /// Twice the points and half the time step.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            n_points: 2 * self.n_points,
            dt: 0.5 * self.dt,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn validation() {
        assert!(GridSpec::new(128, 1.0, 0.0, 1.0, Frame::Lab).is_err());
        assert!(GridSpec::new(1000, 1.0, 0.0, 1.0, Frame::Lab).is_err());
        assert!(GridSpec::new(256, 0.0, 0.0, 1.0, Frame::Lab).is_err());
        assert!(GridSpec::new(256, 1.0, 0.0, -1.0, Frame::Lab).is_err());
        assert!(GridSpec::new(256, 1.0, 0.0, 1.0, Frame::Lab).is_ok());
    }

    #[test]
    fn layout() {
        let g = GridSpec::new(256, 2.0, 1.0, 0.1, Frame::ComovingXc).unwrap();
        let q = g.positions();
        assert_eq!(q[0], -1.0);
        assert_relative_eq!(q[128], 1.0, epsilon = 1e-15);
        assert_relative_eq!(q[255] + g.spacing(), 3.0, epsilon = 1e-15);
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert_relative_eq!(k[1] * g.spacing() * 256.0, 2.0 * std::f64::consts::PI);
        assert!(k[128] < 0.0);
        assert!(g.check_resolution(8.0 * g.spacing()).is_ok());
        assert!(g.check_resolution(7.0 * g.spacing()).is_err());
        let r = g.refined();
        assert_eq!((r.n_points, r.dt), (512, 0.05));
        assert!(!g.same_space(&r));
    }

    #[test]
    fn frame_names_round_trip() {
        for f in Frame::ALL {
            assert_eq!(f.name().parse::<Frame>().unwrap(), f);
        }
        assert!("nowhere".parse::<Frame>().is_err());
    }
}
