//! Zero-energy s-wave scattering for radial repulsive potentials.
//!
//! The reduced radial function u = r·w solves u'' = ½V(r)u with u(0) = 0. Outside
//! the potential u is linear, u ∝ r − a, which defines the scattering length a.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Context, Error, Result};
use crate::functional::Kernel;
use crate::quadrature::{integrate, Tolerance};

/// Default number of RK4 steps per potential range R.
pub const STEPS_PER_RANGE: f64 = 2000.0;

/// Smallest admissible r_max in units of the potential range.
pub const MIN_RANGE_MULTIPLE: f64 = 20.0;

/// Gaussian tails are integrated up to this many ranges; e^{-144} is negligible.
const GAUSSIAN_SUPPORT: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PotentialModel {
    /// V = V0 for r < R, 0 outside.
    SquareBarrier { v0: f64, r: f64 },
    /// V = V0·exp(−r²/R²).
    Gaussian { v0: f64, r: f64 },
}

impl fmt::Display for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialModel::SquareBarrier { v0, r } => write!(f, "square:{v0},{r}"),
            PotentialModel::Gaussian { v0, r } => write!(f, "gaussian:{v0},{r}"),
        }
    }
}

impl PotentialModel {
    pub fn square_barrier(v0: f64, r: f64) -> Result<Self> {
        PotentialModel::SquareBarrier { v0, r }.validated()
    }

    pub fn gaussian(v0: f64, r: f64) -> Result<Self> {
        PotentialModel::Gaussian { v0, r }.validated()
    }

    fn validated(self) -> Result<Self> {
        let (v0, r) = self.parameters();
        if v0 > 0.0 && r > 0.0 && v0.is_finite() && r.is_finite() {
            Ok(self)
        } else {
            Err(Error::domain(
                "scattering::PotentialModel",
                format!("V0 and R must be positive and finite, got V0 = {v0}, R = {r}"),
            ))
        }
    }

    /// (V0, R).
    pub fn parameters(&self) -> (f64, f64) {
        match *self {
            PotentialModel::SquareBarrier { v0, r } | PotentialModel::Gaussian { v0, r } => (v0, r),
        }
    }

    pub fn range(&self) -> f64 {
        self.parameters().1
    }

    pub fn value(&self, radius: f64) -> f64 {
        match *self {
            PotentialModel::SquareBarrier { v0, r } => {
                if radius < r {
                    v0
                } else {
                    0.0
                }
            }
            PotentialModel::Gaussian { v0, r } => v0 * (-(radius / r).powi(2)).exp(),
        }
    }

    /// Whether V̂ ≥ 0, as the thermodynamic formulas require. The square barrier's
    /// transform changes sign, so it is kept to scattering checks only.
    pub fn admissible_for_thermodynamics(&self) -> bool {
        matches!(self, PotentialModel::Gaussian { .. })
    }

    /// Radius beyond which V vanishes or is negligible.
    fn support(&self) -> f64 {
        match *self {
            PotentialModel::SquareBarrier { r, .. } => r,
            PotentialModel::Gaussian { r, .. } => GAUSSIAN_SUPPORT * r,
        }
    }

    /// Integration segments on which V is smooth.
    fn segments(&self, r_max: f64) -> Vec<(f64, f64)> {
        match *self {
            PotentialModel::SquareBarrier { r, .. } => vec![(0.0, r), (r, r_max)],
            PotentialModel::Gaussian { .. } => vec![(0.0, r_max)],
        }
    }

    /// Potential on segment `k`, with the square barrier's jump assigned to the
    /// segment boundary from the correct side.
    fn segment_value(&self, k: usize, radius: f64) -> f64 {
        match *self {
            PotentialModel::SquareBarrier { v0, .. } => {
                if k == 0 {
                    v0
                } else {
                    0.0
                }
            }
            PotentialModel::Gaussian { .. } => self.value(radius),
        }
    }
}

/// V̂(p) = 4π∫V(r)r² sinc(pr)dr by quadrature.
pub fn potential_fourier(potential: &PotentialModel, p: f64) -> Result<f64> {
    const OP: &str = "scattering::potential_fourier";
    if !(p >= 0.0) {
        return Err(Error::domain(OP, format!("momentum must be >= 0, got {p}")));
    }
    let tol = Tolerance::new(1e-14, 1e-12);
    let r = integrate(|r| potential.value(r) * r * r * sinc(p * r), 0.0, potential.support(), tol).during(OP)?;
    Ok(4.0 * PI * r.value)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

#[derive(Clone, Debug)]
pub struct ScatteringResult {
    pub potential: PotentialModel,
    /// Scattering length.
    pub a: f64,
    /// V̂(0) = ∫V.
    pub v_hat_zero: f64,
    /// ν = V̂(0)/a.
    pub nu: f64,
    /// Sampled (r, w(r)) on the integration grid.
    pub w_table: Vec<(f64, f64)>,
    /// Largest |u'' − ½Vu| on interior grid points.
    pub ode_residual: f64,
    u: Vec<f64>,
    radii: Vec<f64>,
    /// Simpson weight times potential, each segment contributing its own side of a jump.
    weighted_v: Vec<f64>,
}

/// Scattering solution with the default step R/2000.
pub fn solve_scattering(potential: PotentialModel, r_max: f64) -> Result<ScatteringResult> {
    solve_scattering_with_step(potential, r_max, potential.range() / STEPS_PER_RANGE)
}

/// RK4 sample of (r, u, u') on one smooth segment, `n` equal steps.
fn rk4_segment<V: Fn(f64) -> f64>(v: V, start: f64, end: f64, n: usize, u0: f64, du0: f64) -> Vec<(f64, f64, f64)> {
    let h = (end - start) / n as f64;
    let rhs = |r: f64, u: f64| 0.5 * v(r) * u;
    let mut out = Vec::with_capacity(n + 1);
    let (mut u, mut du) = (u0, du0);
    out.push((start, u, du));
    for i in 0..n {
        let r = start + h * i as f64;
        let k1u = du;
        let k1v = rhs(r, u);
        let k2u = du + 0.5 * h * k1v;
        let k2v = rhs(r + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2v;
        let k3v = rhs(r + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = du + h * k3v;
        let k4v = rhs(r + h, u + h * k3u);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        let next = if i + 1 == n { end } else { start + h * (i + 1) as f64 };
        out.push((next, u, du));
    }
    out
}

/// Scattering solution with an explicit RK4 step.
pub fn solve_scattering_with_step(potential: PotentialModel, r_max: f64, step: f64) -> Result<ScatteringResult> {
    const OP: &str = "scattering::solve_scattering";
    let potential = potential.validated()?;
    let range = potential.range();
    if !(r_max >= MIN_RANGE_MULTIPLE * range) || !r_max.is_finite() {
        return Err(Error::domain(
            OP,
            format!("r_max = {r_max} must be at least {MIN_RANGE_MULTIPLE} potential ranges ({range})"),
        ));
    }
    if !(step > 0.0 && step <= range) {
        return Err(Error::domain(OP, format!("step {step} must lie in (0, R]")));
    }

    let mut radii = Vec::new();
    let mut u = Vec::new();
    let mut du = Vec::new();
    let mut weighted_v: Vec<f64> = Vec::new();
    let mut breaks = Vec::new();
    let (mut u0, mut du0) = (0.0, 1.0);
    for (k, (start, end)) in potential.segments(r_max).into_iter().enumerate() {
        // even step count so that Simpson's rule applies per segment
        let mut n = ((end - start) / step).ceil() as usize;
        n += n % 2;
        let h = (end - start) / n as f64;
        let samples = rk4_segment(|r| potential.segment_value(k, r), start, end, n, u0, du0);
        let skip = usize::from(!radii.is_empty());
        if skip == 1 {
            breaks.push(radii.len() - 1);
            *weighted_v.last_mut().expect("previous segment") += h / 3.0 * potential.segment_value(k, start);
        }
        for (i, &(r, ui, dui)) in samples.iter().enumerate().skip(skip) {
            radii.push(r);
            u.push(ui);
            du.push(dui);
            let w = if i == 0 || i == n {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
            weighted_v.push(w * potential.segment_value(k, r));
        }
        let last = samples.last().expect("segment has samples");
        u0 = last.1;
        du0 = last.2;
    }

    // straight-line fit of u on the outer fifth of the grid
    let lo = radii.partition_point(|&r| r < 0.8 * r_max);
    let xs = &radii[lo..];
    let ys = &u[lo..];
    let (fit_slope, intercept) = crate::freegas::linear_fit(xs, ys);
    let worst = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - (fit_slope * x + intercept)).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    if !(fit_slope > 0.0) || worst > 1e-10 {
        return Err(Error::numeric(
            OP,
            format!("asymptote not linear on [0.8 r_max, r_max]: slope {fit_slope:e}, relative deviation {worst:e}; increase r_max"),
        ));
    }
    // beyond the support u is exactly linear; reading a off the edge avoids the
    // rounding that accumulates in u over the long free stretch
    let support = potential.support().min(r_max);
    let edge = radii.partition_point(|&r| r <= support).max(1) - 1;
    let a = radii[edge] - u[edge] / du[edge];
    let slope = du[edge];
    for x in u.iter_mut() {
        *x /= slope;
    }
    for x in du.iter_mut() {
        *x /= slope;
    }

    let ode_residual = residual(&potential, &radii, &u, &du, &breaks);
    let w_table = radii
        .iter()
        .zip(&u)
        .enumerate()
        .map(|(i, (&r, &ui))| (r, if i == 0 { du[0] } else { ui / r }))
        .collect();
    let v_hat_zero = potential_fourier(&potential, 0.0)?;
    // points beyond the support carry V ≈ 0 and are dropped
    let cut = radii.partition_point(|&r| r <= support).max(1);
    if !(a > 0.0) {
        return Err(Error::numeric(OP, format!("non-positive scattering length {a}")));
    }
    Ok(ScatteringResult {
        potential,
        a,
        v_hat_zero,
        nu: v_hat_zero / a,
        w_table,
        ode_residual,
        u: u[..cut].to_vec(),
        radii: radii[..cut].to_vec(),
        weighted_v: weighted_v[..cut].to_vec(),
    })
}

/// max |D u' − ½V u| with a five-point derivative of u'; stencils crossing a
/// segment joint are skipped.
fn residual(potential: &PotentialModel, radii: &[f64], u: &[f64], du: &[f64], breaks: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 2..radii.len().saturating_sub(2) {
        if breaks.iter().any(|&b| i + 2 > b && i < b + 2) {
            continue;
        }
        let h = radii[i + 1] - radii[i];
        let h_left = radii[i] - radii[i - 1];
        if ((h - h_left) / h).abs() > 1e-9 {
            continue;
        }
        let d2 = (-du[i + 2] + 8.0 * du[i + 1] - 8.0 * du[i - 1] + du[i - 2]) / (12.0 * h);
        let rhs = 0.5 * potential.value(radii[i]) * u[i];
        worst = worst.max((d2 - rhs).abs());
    }
    worst
}

impl ScatteringResult {
    /// V̂w(p) = 4π∫V(r)u(r) sin(pr)/p dr by Simpson's rule on the solution grid.
    pub fn vw(&self, p: f64) -> f64 {
        let mut sum = 0.0;
        for ((&r, &u), &wv) in self.radii.iter().zip(&self.u).zip(&self.weighted_v) {
            sum += wv * u * r * sinc(p * r);
        }
        4.0 * PI * sum
    }

    /// ∫V w² = 4π∫V u² dr.
    pub fn v_w_squared(&self) -> f64 {
        let mut sum = 0.0;
        for (&u, &wv) in self.u.iter().zip(&self.weighted_v) {
            sum += wv * u * u;
        }
        4.0 * PI * sum
    }
}

/// V̂w(p) of a scattering solution.
pub fn vw_kernel(result: &ScatteringResult, p: f64) -> f64 {
    result.vw(p)
}

impl Kernel for ScatteringResult {
    fn value(&self, p: f64) -> f64 {
        self.vw(p)
    }

    fn admissible(&self) -> bool {
        self.potential.admissible_for_thermodynamics()
    }
}

/// Scattering length of the square barrier in closed form, R(1 − tanh γ/γ) with γ = √(V0/2)R.
pub fn square_barrier_length(v0: f64, r: f64) -> f64 {
    let g = (v0 / 2.0).sqrt() * r;
    r * (1.0 - g.tanh() / g)
}
