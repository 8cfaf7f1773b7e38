//! Composite quadrature of control functionals `∫g(u(t))dt` over `[0, tf]`.
//!
//! The interval is split at every breakpoint of the control. Next to a
//! cube-root point `t*` the substitution `t = t* ∓ h·w³` turns `u ∝ w`, so
//! the integrands `u²` and `u⁴` become polynomials in `w` and the panels
//! converge at their full order again.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Breakpoint, Protocol};

/// A control `u(t)` on `[0, tf]`, given by its interior branch.
pub trait Control {
    fn duration(&self) -> f64;
    /// Interior value, with one-sided limits at the ends.
    fn value(&self, t: f64) -> f64;
    /// Interior breakpoints in increasing order.
    fn breakpoints(&self) -> Vec<Breakpoint> {
        Vec::new()
    }
}

impl Control for Protocol {
    fn duration(&self) -> f64 {
        Protocol::duration(self)
    }

    fn value(&self, t: f64) -> f64 {
        self.interior_control(t)
    }

    fn breakpoints(&self) -> Vec<Breakpoint> {
        Protocol::breakpoints(self)
    }
}

/// The trap sits still: `u ≡ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticControl {
    pub duration: f64,
}

impl Control for StaticControl {
    fn duration(&self) -> f64 {
        self.duration
    }

    fn value(&self, _t: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    GaussLegendreComposite,
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rule: Rule,
    /// Starting panels per segment; doubled until converged.
    pub panels: usize,
    /// Gauss points per panel (ignored by Simpson).
    pub points_per_panel: usize,
    /// Relative change between successive refinements accepted as converged.
    pub tolerance: f64,
    /// Upper limit on panels per segment.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rule: Rule::GaussLegendreComposite,
            panels: 4,
            points_per_panel: 8,
            tolerance: 1e-12,
            max_panels: 1 << 20,
        }
    }
}

impl QuadratureSpec {
    pub fn simpson() -> Self {
        Self {
            rule: Rule::Simpson,
            panels: 64,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.panels == 0 || self.max_panels < self.panels {
            return Err(Error::config("panels", "need 0 < panels ≤ max_panels"));
        }
        if self.rule == Rule::GaussLegendreComposite && !(1..=64).contains(&self.points_per_panel) {
            return Err(Error::config("points_per_panel", "must lie in [1, 64]"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance", "must be positive"));
        }
        Ok(())
    }
}

/// Converged integral with the last refinement's change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Linear,
    /// Cube-root point at the left end.
    CubeLeft,
    /// Cube-root point at the right end.
    CubeRight,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    map: Map,
}

impl Segment {
    /// Map `w ∈ [0, 1]` to `(t, dt/dw)`.
    fn map(&self, w: f64) -> (f64, f64) {
        let h = self.b - self.a;
        match self.map {
            Map::Linear => (self.a + h * w, h),
            Map::CubeLeft => (self.a + h * w.powi(3), 3.0 * h * w * w),
            Map::CubeRight => (self.b - h * w.powi(3), 3.0 * h * w * w),
        }
    }
}

fn segments(tf: f64, breaks: &[Breakpoint]) -> Vec<Segment> {
    let mut edges: Vec<(f64, bool)> = vec![(0.0, false)];
    for b in breaks {
        let t = b.time();
        if t > 0.0 && t < tf {
            edges.push((t, matches!(b, Breakpoint::CubeRoot(_))));
        }
    }
    edges.push((tf, false));
    edges
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| {
            let map = match (w[0].1, w[1].1) {
                (true, _) => Map::CubeLeft,
                (_, true) => Map::CubeRight,
                _ => Map::Linear,
            };
            Segment { a: w[0].0, b: w[1].0, map }
        })
        .collect()
}

struct Rules {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn panel_sum(seg: &Segment, panels: usize, spec: &QuadratureSpec, rules: &Rules, f: &dyn Fn(f64) -> f64) -> f64 {
    let mut acc = CompensatedSum::default();
    let h = 1.0 / panels as f64;
    let g = |w: f64| {
        let (t, jac) = seg.map(w);
        f(t) * jac
    };
    match spec.rule {
        Rule::GaussLegendreComposite => {
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * h;
                for (x, wt) in rules.nodes.iter().zip(&rules.weights) {
                    acc.add(0.5 * h * wt * g(mid + 0.5 * h * x));
                }
            }
        }
        Rule::Simpson => {
            for p in 0..panels {
                let (a, b) = (p as f64 * h, (p + 1) as f64 * h);
                acc.add(h / 6.0 * (g(a) + 4.0 * g(0.5 * (a + b)) + g(b)));
            }
        }
    }
    acc.total()
}

/// Integrate `f(t)` over `[0, tf]`, splitting at `breaks` and doubling
/// panels per segment until successive sums agree to `spec.tolerance`.
pub fn integrate(f: &dyn Fn(f64) -> f64, tf: f64, breaks: &[Breakpoint], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let (nodes, weights) = gauss_legendre(spec.points_per_panel);
    let rules = Rules { nodes, weights };
    let mut total = CompensatedSum::default();
    let mut error = 0.0;
    let mut max_panels = 0;
    for seg in segments(tf, breaks) {
        let mut panels = spec.panels;
        let mut prev = panel_sum(&seg, panels, spec, &rules, f);
        loop {
            if panels * 2 > spec.max_panels {
                return Err(Error::Numerical(format!(
                    "quadrature on [{:e}, {:e}] did not converge with {panels} panels (last change {error:e})",
                    seg.a, seg.b
                )));
            }
            panels *= 2;
            let next = panel_sum(&seg, panels, spec, &rules, f);
            let change = (next - prev).abs();
            error = change;
            prev = next;
            if change <= spec.tolerance * next.abs() || next == 0.0 && change == 0.0 {
                break;
            }
        }
        max_panels = max_panels.max(panels);
        total.add(prev);
    }
    Ok(Estimate {
        value: total.total(),
        error,
        panels: max_panels,
    })
}

/// `∫g(u(t))dt` over the control's duration.
pub fn integrate_control<C: Control + ?Sized>(control: &C, g: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let f = |t: f64| g(control.value(t));
    integrate(&f, control.duration(), &control.breakpoints(), spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_tables() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(w[0], 1.0, max_relative = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(w[1], 8.0 / 9.0, max_relative = 1e-15);
        assert_relative_eq!(x[2], 0.6f64.sqrt(), max_relative = 1e-15);
        for n in [1, 5, 8, 16, 33] {
            let (x, w) = gauss_legendre(n);
            assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
            // Exact for degree 2n − 1.
            let p = (2 * n - 2) as i32;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum();
            assert_relative_eq!(s, 2.0 / (p as f64 + 1.0), max_relative = 1e-13);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
    }

    #[test]
    fn cube_root_singularity_is_exact() {
        // ∫₀¹ |2t − 1|^{4/3} dt = 3/7
        let f = |t: f64| (2.0 * t - 1.0).cbrt().powi(4);
        let b = [Breakpoint::CubeRoot(0.5)];
        for spec in [QuadratureSpec::default(), QuadratureSpec::simpson()] {
            let e = integrate(&f, 1.0, &b, &spec).unwrap();
            assert_relative_eq!(e.value, 3.0 / 7.0, max_relative = 1e-11);
        }
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec {
            max_panels: 8,
            ..QuadratureSpec::default()
        };
        let f = |t: f64| (50.0 * t).sin().abs().sqrt();
        assert!(matches!(integrate(&f, 1.0, &[], &spec), Err(Error::Numerical(_))));
    }

    #[test]
    fn zero_integrand() {
        let e = integrate_control(&StaticControl { duration: 2.0 }, |u| u.powi(4), &QuadratureSpec::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn rejects_bad_spec() {
        let spec = QuadratureSpec { panels: 0, ..QuadratureSpec::default() };
        assert!(integrate(&|t| t, 1.0, &[], &spec).is_err());
    }
}
