//! Randomized audit of the bounded optimum.
//!
//! Any control that moves the atom from rest at 0 to rest at `d` satisfies
//! `∫u dt = 0` and `∫t·u dt = d/ω0²`. Admissible competitors are built by
//! adding a random sine series to the optimal control and alternating
//! between the affine constraint set and the box `|u| ≤ δ` until both hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energetics::quartic_cost;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, CompensatedSum, QuadratureSpec};
use crate::trajectory::{Protocol, ProtocolKind};

const PANELS: usize = 2048;
const GAUSS_POINTS: usize = 4;
const MAX_SWEEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleAudit {
    /// ∫u⁴dt of the optimum [m⁴·s].
    pub optimal_cost: f64,
    /// ∫u⁴dt of every random competitor, in generation order.
    pub costs: Vec<f64>,
    /// Smallest `(J − J_opt)/J_opt` over the competitors.
    pub min_excess: f64,
    /// Worst constraint residual, relative to `d/ω0²`.
    pub max_residual: f64,
}

impl AdmissibleAudit {
    pub fn optimum_dominates(&self) -> bool {
        self.costs.iter().all(|&c| self.optimal_cost <= c)
    }
}

/// Weighted nodes of a composite Gauss rule on `[0, tf]`.
struct Nodes {
    t: Vec<f64>,
    w: Vec<f64>,
}

impl Nodes {
    fn new(tf: f64) -> Self {
        let (x, wt) = gauss_legendre(GAUSS_POINTS);
        let h = tf / PANELS as f64;
        let mut t = Vec::with_capacity(PANELS * GAUSS_POINTS);
        let mut w = Vec::with_capacity(PANELS * GAUSS_POINTS);
        for p in 0..PANELS {
            let mid = (p as f64 + 0.5) * h;
            for (x, wt) in x.iter().zip(&wt) {
                t.push(mid + 0.5 * h * x);
                w.push(0.5 * h * wt);
            }
        }
        Self { t, w }
    }

    fn sum(&self, f: impl Fn(usize) -> f64) -> f64 {
        (0..self.t.len()).map(|i| self.w[i] * f(i)).collect::<CompensatedSum>().total()
    }

    /// Subtract the weighted-least-squares `α + βt` that restores the two moments.
    fn project_affine(&self, u: &mut [f64], target: f64) -> f64 {
        let s0 = self.sum(|_| 1.0);
        let s1 = self.sum(|i| self.t[i]);
        let s2 = self.sum(|i| self.t[i] * self.t[i]);
        let r0 = self.sum(|i| u[i]);
        let r1 = self.sum(|i| self.t[i] * u[i]) - target;
        let det = s0 * s2 - s1 * s1;
        let alpha = (r0 * s2 - r1 * s1) / det;
        let beta = (r1 * s0 - r0 * s1) / det;
        for (ui, t) in u.iter_mut().zip(&self.t) {
            *ui -= alpha + beta * t;
        }
        r0.abs().max(r1.abs())
    }

    fn residual(&self, u: &[f64], target: f64) -> f64 {
        let r0 = self.sum(|i| u[i]);
        let r1 = self.sum(|i| self.t[i] * u[i]) - target;
        r0.abs().max(r1.abs())
    }
}

/// Draw `samples` admissible competitors around the bounded optimum and
/// compare their quartic costs with the optimum's.
pub fn audit_bounded_optimality(protocol: &Protocol, samples: usize, seed: u64) -> Result<AdmissibleAudit> {
    let spec = protocol.spec();
    if spec.kind != ProtocolKind::BoundedOptimal {
        return Err(Error::config("variant", "the optimality audit needs a BoundedOptimal protocol"));
    }
    let delta = spec.effective_bound();
    let tf = spec.duration;
    let target = spec.distance / spec.omega0.powi(2);
    // Moment residuals are measured against ∫t·|u| ~ target.
    let tolerance = 1e-13 * target;
    let nodes = Nodes::new(tf);
    let base: Vec<f64> = nodes.t.iter().map(|&t| protocol.interior_control(t)).collect();
    let optimal_cost = quartic_cost(protocol, &QuadratureSpec::default())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut costs = Vec::with_capacity(samples);
    let mut max_residual: f64 = 0.0;
    for _ in 0..samples {
        let modes = rng.random_range(1..=8usize);
        let amplitude = delta * rng.random_range(0.02..0.3);
        let coeffs: Vec<f64> = (1..=modes)
            .map(|k| rng.random_range(-1.0..1.0) / k as f64)
            .collect();
        let mut u: Vec<f64> = nodes
            .t
            .iter()
            .zip(&base)
            .map(|(&t, &b)| {
                let s = t / tf;
                let p: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * s).sin())
                    .sum();
                b + amplitude * p
            })
            .collect();
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            nodes.project_affine(&mut u, target);
            for x in u.iter_mut() {
                *x = x.clamp(-delta, delta);
            }
            if nodes.residual(&u, target) <= tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "admissible projection did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        max_residual = max_residual.max(nodes.residual(&u, target) / target);
        costs.push(nodes.sum(|i| u[i].powi(4)));
    }
    let min_excess = costs
        .iter()
        .map(|c| (c - optimal_cost) / optimal_cost)
        .fold(f64::INFINITY, f64::min);
    Ok(AdmissibleAudit {
        optimal_cost,
        costs,
        min_excess,
        max_residual,
    })
}
