//! Leading-order model of the critical region.
//!
//! Near the free-gas transition the density and condensate are written as
//! ρ = ρ_fc + (k/8π)T²a and ρ₀ = (σ/8π)T²a. The free energy, in units of T⁴a³
//! and up to (σ, k)-independent constants, reduces to
//!
//! f(k, σ, ν) = (1/8π)[(σ−k)³/12 − σ²(½ + 1/(2+σ−k))] − (ν−8π)σ²/(8π)²
//!
//! on the feasible set σ ∈ I(k).

use std::f64::consts::PI;

use crate::error::{Context, Error, Result};
use crate::freegas::{n_fc, zeta};
use crate::optimize::{brent_min, brent_root, grid_then_brent};
use crate::sweep::Execution;

pub const EIGHT_PI: f64 = 8.0 * PI;

/// Grid step of the σ scan.
pub const SIGMA_STEP: f64 = 1e-2;
/// Initial σ ceiling; doubled while the minimizer sits near it.
pub const SIGMA_CEILING: f64 = 50.0;
const SIGMA_CEILING_MAX: f64 = 1e5;
const SIGMA_XTOL: f64 = 1e-8;
const K_XTOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalCoordinates {
    pub k: f64,
    pub sigma: f64,
    pub nu: f64,
}

impl CriticalCoordinates {
    pub fn new(k: f64, sigma: f64, nu: f64) -> Self {
        CriticalCoordinates { k, sigma, nu }
    }
}

/// Self-consistent shift τ and gap parameter d for a feasible (σ, k).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalSolution {
    pub tau: f64,
    pub d: f64,
}

/// The half line [lower, ∞).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FeasibleInterval {
    pub lower: f64,
}

impl FeasibleInterval {
    pub fn contains(&self, sigma: f64) -> bool {
        sigma >= self.lower && sigma.is_finite()
    }
}

/// Accepts ν = 8π up to rounding in the caller's arithmetic.
fn check_nu(op: &'static str, nu: f64) -> Result<()> {
    if nu >= EIGHT_PI * (1.0 - 1e-12) && nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("nu must be >= 8pi, got {nu}")))
    }
}

/// Root in [−σ, 0] of τ(√(d+2(σ+τ)) + √d) + 2(σ+τ) = 0 by bisection to 1e−12.
///
/// At d = 0 the left end τ = −σ is a trivial zero; the bisection keeps it as the
/// negative side and converges to the nontrivial root.
pub fn tau_self_consistent(d: f64, sigma: f64) -> Result<f64> {
    const OP: &str = "critical::tau_self_consistent";
    if !(d >= 0.0 && sigma >= 0.0) || !d.is_finite() || !sigma.is_finite() {
        return Err(Error::domain(OP, format!("need d >= 0 and sigma >= 0, got d = {d}, sigma = {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let h = |tau: f64| {
        let x = (sigma + tau).max(0.0);
        tau * ((d + 2.0 * x).sqrt() + d.sqrt()) + 2.0 * x
    };
    let (mut lo, mut hi) = (-sigma, 0.0);
    while hi - lo > 1e-12 * sigma.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn feasible_interval(k: f64) -> FeasibleInterval {
    if k <= 0.0 {
        FeasibleInterval { lower: 0.0 }
    } else {
        FeasibleInterval { lower: k + (2.0 * k).sqrt() }
    }
}

/// Closed-form (τ, d) for a feasible (σ, k); `None` when σ ∉ I(k).
/// The removable point (0, 0) maps to (0, 0).
pub fn change_of_variables(sigma: f64, k: f64) -> Option<CriticalSolution> {
    if !feasible_interval(k).contains(sigma) || !k.is_finite() {
        return None;
    }
    let s = sigma - k;
    if s == 0.0 {
        return Some(CriticalSolution { tau: 0.0, d: 0.0 });
    }
    let tau = -2.0 * sigma / (s + 2.0);
    let x = sigma + tau;
    let root_d = ((s * s - 2.0 * x) / (2.0 * s)).max(0.0);
    Some(CriticalSolution { tau, d: root_d * root_d })
}

/// f(k, σ, ν) on the feasible set.
pub fn reduced_free_energy(coords: CriticalCoordinates) -> Result<f64> {
    const OP: &str = "critical::reduced_free_energy";
    check_nu(OP, coords.nu)?;
    let CriticalCoordinates { k, sigma, nu } = coords;
    if !feasible_interval(k).contains(sigma) {
        return Err(Error::domain(OP, format!("sigma = {sigma} outside I({k})")));
    }
    Ok(reduced_unchecked(k, sigma, nu))
}

fn reduced_unchecked(k: f64, sigma: f64, nu: f64) -> f64 {
    let s = sigma - k;
    (s * s * s / 12.0 - sigma * sigma * (0.5 + 1.0 / (2.0 + s))) / EIGHT_PI - (nu - EIGHT_PI) * sigma * sigma / (EIGHT_PI * EIGHT_PI)
}

/// Result of minimizing f over I(k).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedMinimum {
    /// Global minimizer.
    pub sigma_star: f64,
    pub value: f64,
    /// Lower end of I(k) and f there.
    pub boundary_sigma: f64,
    pub boundary_value: f64,
    /// Deepest local minimum strictly inside I(k), when one exists.
    pub interior: Option<(f64, f64)>,
}

impl ReducedMinimum {
    /// Interior minimum minus boundary value; positive when there is no interior minimum.
    pub fn interior_gap(&self) -> f64 {
        self.interior.map_or(f64::INFINITY, |(_, v)| v - self.boundary_value)
    }

    /// All global minimizers within `tol` of the minimum value.
    pub fn minimizers(&self, tol: f64) -> Vec<f64> {
        match self.interior {
            Some((s, v)) if (v - self.boundary_value).abs() <= tol => vec![self.boundary_sigma, s],
            _ => vec![self.sigma_star],
        }
    }
}

/// Global minimum of f(k, ·, ν) over I(k): scan with step 1e−2 up to σ = 50
/// (extended while the minimizer sits within 1% of the ceiling), then refine to 1e−8.
pub fn minimize_reduced(k: f64, nu: f64) -> Result<ReducedMinimum> {
    const OP: &str = "critical::minimize_reduced";
    check_nu(OP, nu)?;
    if !k.is_finite() {
        return Err(Error::domain(OP, format!("k must be finite, got {k}")));
    }
    let lower = feasible_interval(k).lower;
    let f = |s: f64| reduced_unchecked(k, s, nu);
    let boundary_value = f(lower);
    let mut ceiling = SIGMA_CEILING;
    loop {
        let n = ((ceiling - lower) / SIGMA_STEP).ceil().max(2.0) as usize;
        let h = (ceiling - lower) / n as f64;
        let mut best: Option<(usize, f64)> = None;
        let mut prev = boundary_value;
        let mut cur = f(lower + h);
        for i in 1..n {
            let next = f(lower + h * (i + 1) as f64);
            if cur < prev && cur <= next && best.is_none_or(|(_, v)| cur < v) {
                best = Some((i, cur));
            }
            prev = cur;
            cur = next;
        }
        let last = cur;
        if last < boundary_value && best.is_none_or(|(_, v)| last < v) && ceiling < SIGMA_CEILING_MAX {
            // still descending at the ceiling
            ceiling *= 2.0;
            continue;
        }
        let interior = best.map(|(i, _)| {
            let c = lower + h * i as f64;
            brent_min(f, c - h, c + h, SIGMA_XTOL)
        });
        if let Some((s, _)) = interior {
            if s > 0.99 * ceiling && ceiling < SIGMA_CEILING_MAX {
                ceiling *= 2.0;
                continue;
            }
        }
        let (sigma_star, value) = match interior {
            Some((s, v)) if v < boundary_value => (s, v),
            _ => (lower, boundary_value),
        };
        return Ok(ReducedMinimum { sigma_star, value, boundary_sigma: lower, boundary_value, interior });
    }
}

/// Critical k and the condensate jump σ found there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalPoint {
    pub nu: f64,
    pub k: f64,
    pub sigma_jump: f64,
}

/// k at which the interior minimum of f ties with σ = 0, by bisection to 1e−6.
pub fn critical_point(nu: f64) -> Result<CriticalPoint> {
    const OP: &str = "critical::critical_k";
    check_nu(OP, nu)?;
    let gap = |k: f64| minimize_reduced(k, nu).map(|m| m.interior_gap());
    let mut hi = 0.0;
    if !(gap(hi)? < 0.0) {
        return Err(Error::numeric(OP, format!("no interior minimum at k = 0 for nu = {nu}")));
    }
    let mut lo = -1.0;
    while !(gap(lo)? > 0.0) {
        hi = lo;
        lo *= 2.0;
        if lo < -1e3 {
            return Err(Error::numeric(OP, format!("critical k not bracketed for nu = {nu}")));
        }
    }
    while hi - lo > K_XTOL {
        let mid = 0.5 * (lo + hi);
        if gap(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k = 0.5 * (lo + hi);
    let sigma_jump = minimize_reduced(k, nu)?
        .interior
        .map(|(s, _)| s)
        .ok_or_else(|| Error::numeric(OP, "interior minimum vanished at the critical point"))?;
    Ok(CriticalPoint { nu, k, sigma_jump })
}

pub fn critical_k(nu: f64) -> Result<f64> {
    critical_point(nu).map(|c| c.k)
}

/// −(k_c/8π)·n_fc^{−4/3}: the coefficient in ρ_c = ρ_fc(1 − C ρ_fc^{1/3}a).
pub fn density_shift_coefficient(nu: f64) -> Result<f64> {
    Ok(-(critical_k(nu)? / EIGHT_PI) * n_fc().powf(-4.0 / 3.0))
}

/// h₁ in T_c = T_fc(ρ)(1 + h₁ρ^{1/3}a).
pub fn h1(nu: f64) -> Result<f64> {
    Ok(2.0 / 3.0 * density_shift_coefficient(nu)?)
}

/// g(k) = inf_σ f(k, σ, ν) + νk²/(8π)² + ck.
pub fn grand_canonical_curve(k: f64, nu: f64, c: f64) -> Result<f64> {
    Ok(minimize_reduced(k, nu)?.value + nu * k * k / (EIGHT_PI * EIGHT_PI) + c * k)
}

/// g on a list of k values, in input order.
pub fn grand_canonical_samples(ks: &[f64], nu: f64, c: f64, exec: Execution) -> Result<Vec<f64>> {
    exec.map(ks, |&k| grand_canonical_curve(k, nu, c)).into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaxwellResult {
    pub nu: f64,
    /// Tilt c making the two minima of g equal.
    pub c: f64,
    pub k_minus: f64,
    pub k_plus: f64,
    pub g_min: f64,
    pub k_critical: f64,
}

impl MaxwellResult {
    /// Lower convex envelope of g given its value at k: flat between the two minima.
    pub fn hull(&self, k: f64, g: f64) -> f64 {
        if k > self.k_minus && k < self.k_plus {
            self.g_min
        } else {
            g
        }
    }

    pub fn in_coexistence(&self, k: f64) -> bool {
        k >= self.k_minus && k <= self.k_plus
    }
}

/// Width of the k windows searched on either side of k_c.
const BRANCH_WINDOW: f64 = 20.0;

/// Minima of g left and right of k_c at tilt `c`.
fn branch_minima(nu: f64, kc: f64, c: f64) -> ((f64, f64), (f64, f64)) {
    let g = |k: f64| grand_canonical_curve(k, nu, c).unwrap_or(f64::INFINITY);
    let left = grid_then_brent(g, kc - BRANCH_WINDOW, kc, 80, 1e-10);
    let right = grid_then_brent(g, kc, kc + BRANCH_WINDOW, 80, 1e-10);
    (left, right)
}

/// Tilt c for which g has two equal minima, with the minimizing k values.
pub fn maxwell_construction(nu: f64) -> Result<MaxwellResult> {
    const OP: &str = "critical::maxwell_construction";
    check_nu(OP, nu)?;
    let kc = critical_k(nu)?;
    let diff = |c: f64| {
        let ((_, l), (_, r)) = branch_minima(nu, kc, c);
        l - r
    };
    let (lo, mut hi) = (0.0, 1.0);
    while diff(hi) > 0.0 {
        hi *= 2.0;
        if hi > 64.0 {
            return Err(Error::numeric(OP, format!("tilt not bracketed for nu = {nu}")));
        }
    }
    let c = brent_root(diff, lo, hi, 1e-12).during(OP)?;
    let ((k_minus, gl), (k_plus, gr)) = branch_minima(nu, kc, c);
    let edge = 1e-6;
    let interior = |k: f64, a: f64, b: f64| k > a + edge && k < b - edge;
    if !interior(k_minus, kc - BRANCH_WINDOW, kc) || !interior(k_plus, kc, kc + BRANCH_WINDOW) {
        return Err(Error::numeric(
            OP,
            format!("two distinct minima not found for nu = {nu} (k- = {k_minus}, k+ = {k_plus})"),
        ));
    }
    if (gl - gr).abs() > 1e-8 {
        return Err(Error::numeric(OP, format!("minima differ by {:e} at c = {c}", gl - gr)));
    }
    Ok(MaxwellResult { nu, c, k_minus, k_plus, g_min: 0.5 * (gl + gr), k_critical: kc })
}

/// Grand-canonical shift data at one temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrandCanonicalShift {
    pub nu: f64,
    pub h2: f64,
    pub mu_c: f64,
    pub c: f64,
    /// Set when √T·a is not small.
    pub outside_regime: bool,
}

impl GrandCanonicalShift {
    /// T_c(μ) = (K μ/a)^{2/3} + h₂μ with K = (√π/(2ζ(3/2)))(8π/ν).
    pub fn tc_of_mu(&self, mu: f64, a: f64) -> f64 {
        (leading_factor(self.nu) * mu / a).powf(2.0 / 3.0) + self.h2 * mu
    }
}

fn leading_factor(nu: f64) -> f64 {
    PI.sqrt() / (2.0 * zeta(1.5)) * (EIGHT_PI / nu)
}

/// h₂ from the tilt c: inverting μ_c = 2νρ_fc a − 8πcT²a² to first order gives
/// h₂ = (2/3)·8πc·K².
pub fn h2_from_tilt(nu: f64, c: f64) -> f64 {
    2.0 / 3.0 * EIGHT_PI * c * leading_factor(nu).powi(2)
}

pub fn h2_and_mu_c(nu: f64, t: f64, a: f64) -> Result<GrandCanonicalShift> {
    const OP: &str = "critical::h2_and_mu_c";
    if !(t > 0.0 && a > 0.0) {
        return Err(Error::domain(OP, format!("need T > 0 and a > 0, got T = {t}, a = {a}")));
    }
    let m = maxwell_construction(nu)?;
    Ok(shift_from_maxwell(&m, t, a))
}

pub fn shift_from_maxwell(m: &MaxwellResult, t: f64, a: f64) -> GrandCanonicalShift {
    let mu_c = 2.0 * m.nu * crate::freegas::rho_fc(t) * a - EIGHT_PI * m.c * t * t * a * a;
    GrandCanonicalShift {
        nu: m.nu,
        h2: h2_from_tilt(m.nu, m.c),
        mu_c,
        c: m.c,
        outside_regime: t.sqrt() * a > 0.1,
    }
}
