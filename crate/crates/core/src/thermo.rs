//! Free energy density of the dilute gas in physical units.
//!
//! Three representations are used, chosen by the critical offset
//! k = 8π(ρ − ρ_fc)/(T²a):
//!
//! * normal phase (k below the critical value): F = F₀(T, ρ) + νaρ²
//! * critical window (k_c < k ≤ window): F = T^{5/2}f_min + νaρ² + T⁴a³ min_σ f(k, σ, ν)
//! * condensed phase otherwise: the minimum over d of the condensed-phase bracket
//!
//! Condensed energies are carried as the excess E = F − T^{5/2}f_min − 4πaρ², which
//! keeps the small corrections free of cancellation.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use crate::critical::{self, CriticalPoint, MaxwellResult, EIGHT_PI};
use crate::error::{Error, Result};
use crate::freegas::{f_min, free_energy, rho_fc};
use crate::integrals::{reduced_integral, thermal_excess, IntegralKind, ReducedParams};
use crate::optimize::grid_then_brent;
use crate::sweep::Execution;

/// Default upper end of the d search; doubled while the minimizer sits on it.
pub const DEFAULT_D0: f64 = 100.0;
const D0_MAX: f64 = 1e4;
const D_GRID: usize = 40;
const D_XTOL: f64 = 1e-6;

/// Largest k handled by the critical-window model.
pub const DEFAULT_CRITICAL_WINDOW: f64 = 8.0;

/// ρ^{1/3}a above which a point is flagged as not dilute.
pub const DILUTENESS_LIMIT: f64 = 0.1;

/// ρa/T below which the moderate-temperature closed form applies.
pub const MODERATE_LIMIT: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasPoint {
    pub t: f64,
    pub rho: f64,
    pub a: f64,
    pub nu: f64,
}

impl GasPoint {
    pub fn new(t: f64, rho: f64, a: f64, nu: f64) -> Result<Self> {
        let ok = t >= 0.0 && rho > 0.0 && a > 0.0 && nu >= EIGHT_PI * (1.0 - 1e-12);
        if ok && t.is_finite() && rho.is_finite() && a.is_finite() && nu.is_finite() {
            Ok(GasPoint { t, rho, a, nu })
        } else {
            Err(Error::domain(
                "thermo::GasPoint",
                format!("need T >= 0, rho > 0, a > 0, nu >= 8pi; got T = {t}, rho = {rho}, a = {a}, nu = {nu}"),
            ))
        }
    }

    /// ρ^{1/3}a.
    pub fn diluteness(&self) -> f64 {
        self.rho.cbrt() * self.a
    }

    pub fn outside_dilute_regime(&self) -> bool {
        self.diluteness() > DILUTENESS_LIMIT
    }

    pub fn rho_fc(&self) -> f64 {
        rho_fc(self.t)
    }

    /// ρ − ρ_fc.
    pub fn delta_rho(&self) -> f64 {
        self.rho - self.rho_fc()
    }

    /// Critical offset k = 8π(ρ − ρ_fc)/(T²a); `None` at T = 0.
    pub fn k(&self) -> Option<f64> {
        (self.t > 0.0).then(|| EIGHT_PI * self.delta_rho() / (self.t * self.t * self.a))
    }

    /// ρa/T; infinite at T = 0.
    pub fn moderate_ratio(&self) -> f64 {
        self.rho * self.a / self.t
    }

    /// T_fc(ρ)(1 + h₁ρ^{1/3}a) for a given h₁.
    pub fn critical_temperature(&self, h1: f64) -> f64 {
        crate::freegas::t_fc(self.rho) * (1.0 + h1 * self.diluteness())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Normal,
    Condensed,
    Coexistence,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Normal => "normal",
            Branch::Condensed => "condensed",
            Branch::Coexistence => "coexistence",
        })
    }
}

/// Which formula produced a [`FreeEnergyResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    FreeGas,
    CriticalWindow,
    Condensed,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::FreeGas => "free-gas",
            Representation::CriticalWindow => "critical-window",
            Representation::Condensed => "condensed",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeEnergyResult {
    /// Free energy density.
    pub f: f64,
    /// F − T^{5/2}f_min − 4πaρ².
    pub excess: f64,
    pub rho0: f64,
    pub d_star: f64,
    pub branch: Branch,
    pub representation: Representation,
}

/// Thermal argument of I₄ in the condensate density.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CondensateArgument {
    /// s = √(max(ρ − ρ_fc, 0)a/T).
    #[default]
    DensityExcess,
    /// s = √(ρ₀a/T) with ρ₀ solved self-consistently by damped iteration.
    SelfConsistent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoOptions {
    pub d0: f64,
    pub condensate_argument: CondensateArgument,
    pub critical_window: f64,
}

impl Default for ThermoOptions {
    fn default() -> Self {
        ThermoOptions {
            d0: DEFAULT_D0,
            condensate_argument: CondensateArgument::default(),
            critical_window: DEFAULT_CRITICAL_WINDOW,
        }
    }
}

/// Gas with fixed ν and a; caches the critical point and the Maxwell construction.
#[derive(Debug)]
pub struct GasModel {
    pub nu: f64,
    pub a: f64,
    pub options: ThermoOptions,
    critical: CriticalPoint,
    maxwell: OnceLock<Result<MaxwellResult>>,
}

fn reduced(d: f64, s: f64) -> ReducedParams {
    ReducedParams { d, sigma: EIGHT_PI, theta: 0.0, s }
}

impl GasModel {
    pub fn new(nu: f64, a: f64, options: ThermoOptions) -> Result<Self> {
        GasPoint::new(0.0, 1.0, a, nu)?;
        if !(options.d0 > 0.0) {
            return Err(Error::domain("thermo::GasModel", format!("d0 must be positive, got {}", options.d0)));
        }
        Ok(GasModel { nu, a, options, critical: critical::critical_point(nu)?, maxwell: OnceLock::new() })
    }

    pub fn critical_point(&self) -> CriticalPoint {
        self.critical
    }

    pub fn maxwell(&self) -> Result<MaxwellResult> {
        self.maxwell.get_or_init(|| critical::maxwell_construction(self.nu)).clone()
    }

    pub fn h1(&self) -> f64 {
        -(2.0 / 3.0) * (self.critical.k / EIGHT_PI) * crate::freegas::n_fc().powf(-4.0 / 3.0)
    }

    pub fn point(&self, t: f64, rho: f64) -> Result<GasPoint> {
        GasPoint::new(t, rho, self.a, self.nu)
    }

    /// Condensate density at gap parameter d, clamped to [0, ρ].
    pub fn rho0_of_d(&self, d: f64, point: &GasPoint) -> Result<f64> {
        const OP: &str = "thermo::rho0_of_d";
        if !(d >= 0.0) {
            return Err(Error::domain(OP, format!("d must be >= 0, got {d}")));
        }
        let GasPoint { t, rho, a, .. } = *point;
        let depletion = 0.5 * (rho * a).powf(1.5) * reduced_integral(IntegralKind::I3, reduced(d, 0.0))?;
        let base = rho - depletion - point.rho_fc();
        let thermal = |rho0: f64| -> Result<f64> {
            if t == 0.0 {
                return Ok(0.0);
            }
            let s = (rho0.max(0.0) * a / t).sqrt();
            Ok(t.powf(1.5) * thermal_excess(IntegralKind::I4, reduced(d, s))?)
        };
        let clamp = |x: f64| x.clamp(0.0, rho);
        let first = clamp(base - thermal(point.delta_rho())?);
        match self.options.condensate_argument {
            CondensateArgument::DensityExcess => Ok(first),
            CondensateArgument::SelfConsistent => {
                let mut rho0 = first;
                for _ in 0..500 {
                    let next = clamp(base - thermal(rho0)?);
                    let updated = 0.5 * (rho0 + next);
                    if (updated - rho0).abs() <= 1e-10 * rho {
                        return Ok(updated);
                    }
                    rho0 = updated;
                }
                Err(Error::numeric(OP, format!("condensate iteration did not converge at d = {d}")))
            }
        }
    }

    /// Excess E(d) of the condensed-phase bracket and ρ₀(d).
    pub fn condensed_bracket(&self, d: f64, point: &GasPoint) -> Result<(f64, f64)> {
        let GasPoint { t, rho, a, nu } = *point;
        let rho0 = self.rho0_of_d(d, point)?;
        let depleted = rho - rho0;
        let i1 = reduced_integral(IntegralKind::I1, reduced(d, 0.0))?;
        let thermal = if t > 0.0 {
            t.powf(2.5) * thermal_excess(IntegralKind::I2, reduced(d, (rho0 * a / t).sqrt()))?
        } else {
            0.0
        };
        let e = 0.5 * (rho * a).powf(2.5) * i1 + thermal - d * rho0 * a * depleted
            + 2.0 * (nu - EIGHT_PI) * a * rho * depleted
            + (12.0 * PI - nu) * a * depleted * depleted;
        Ok((e, rho0))
    }

    /// Minimum of the condensed-phase bracket over d ∈ [0, d₀].
    pub fn condensed(&self, point: &GasPoint) -> Result<FreeEnergyResult> {
        const OP: &str = "thermo::free_energy_canonical";
        let mut d0 = self.options.d0;
        loop {
            let mut failure = None;
            let (d_star, e) = grid_then_brent(
                |d| match self.condensed_bracket(d, point) {
                    Ok((e, _)) => e,
                    Err(err) => {
                        failure.get_or_insert(err);
                        f64::INFINITY
                    }
                },
                0.0,
                d0,
                D_GRID,
                D_XTOL,
            );
            if let Some(err) = failure {
                return Err(err);
            }
            if d_star > d0 * (1.0 - 1.0 / D_GRID as f64) {
                if d0 < D0_MAX {
                    d0 *= 2.0;
                    continue;
                }
                return Err(Error::numeric(OP, format!("minimizer d = {d_star} at the ceiling d0 = {d0}; raise d0")));
            }
            let (_, rho0) = self.condensed_bracket(d_star, point)?;
            return Ok(FreeEnergyResult {
                f: reference_energy(point) + e,
                excess: e,
                rho0,
                d_star,
                branch: Branch::Condensed,
                representation: Representation::Condensed,
            });
        }
    }

    pub fn normal(&self, point: &GasPoint) -> Result<FreeEnergyResult> {
        let f = free_energy(point.t, point.rho)? + point.nu * point.a * point.rho * point.rho;
        Ok(FreeEnergyResult {
            f,
            excess: f - reference_energy(point),
            rho0: 0.0,
            d_star: 0.0,
            branch: Branch::Normal,
            representation: Representation::FreeGas,
        })
    }

    fn critical_window(&self, point: &GasPoint, k: f64, branch: Branch) -> Result<FreeEnergyResult> {
        let GasPoint { t, rho, a, nu } = *point;
        let m = critical::minimize_reduced(k, nu)?;
        let sigma = if branch == Branch::Coexistence {
            m.interior.map_or(m.sigma_star, |(s, _)| s)
        } else {
            m.sigma_star
        };
        let value = critical::reduced_free_energy(critical::CriticalCoordinates::new(k, sigma, nu))?;
        let d_star = critical::change_of_variables(sigma, k).map_or(0.0, |c| c.d);
        let excess = (nu - 4.0 * PI) * a * rho * rho + t.powi(4) * a.powi(3) * value;
        Ok(FreeEnergyResult {
            f: reference_energy(point) + excess,
            excess,
            rho0: sigma / EIGHT_PI * t * t * a,
            d_star,
            branch,
            representation: Representation::CriticalWindow,
        })
    }

    /// Free energy with the branch chosen against the critical line T_fc(1 + h₁ρ^{1/3}a).
    pub fn free_energy(&self, point: &GasPoint) -> Result<FreeEnergyResult> {
        let Some(k) = point.k() else {
            return self.condensed(point);
        };
        let kc = self.critical.k;
        if (k - kc).abs() <= 1e-9 * kc.abs().max(1.0) {
            return self.critical_window(point, k, Branch::Coexistence);
        }
        if k < kc {
            return self.normal(point);
        }
        if k <= self.options.critical_window {
            self.critical_window(point, k, Branch::Condensed)
        } else {
            self.condensed(point)
        }
    }
}

/// T^{5/2}f_min + 4πaρ².
fn reference_energy(point: &GasPoint) -> f64 {
    point.t.powf(2.5) * f_min() + 4.0 * PI * point.a * point.rho * point.rho
}

/// Condensate density at d with the default options.
pub fn rho0_of_d(d: f64, point: &GasPoint) -> Result<f64> {
    GasModel::new(point.nu, point.a, ThermoOptions::default())?.rho0_of_d(d, point)
}

/// Canonical free energy with the default options.
pub fn free_energy_canonical(point: &GasPoint) -> Result<FreeEnergyResult> {
    GasModel::new(point.nu, point.a, ThermoOptions::default())?.free_energy(point)
}

/// Coefficient of T(Δρa)^{3/2} in the moderate-temperature expansion as a function of d:
/// (1/24π)[(√(d+16π) + √d)(d + 6(8π−ν)) − 32π√(d+16π)].
pub fn moderate_bracket(d: f64, nu: f64) -> f64 {
    let r = (d + 16.0 * PI).sqrt();
    ((r + d.sqrt()) * (d + 6.0 * (EIGHT_PI - nu)) - 32.0 * PI * r) / (24.0 * PI)
}

/// Numerical minimum (d*, value) of [`moderate_bracket`] over d ∈ [0, d₀].
pub fn minimize_moderate_bracket(nu: f64, d0: f64) -> (f64, f64) {
    grid_then_brent(|d| moderate_bracket(d, nu), 0.0, d0, 400, 1e-10)
}

/// −(ν^{3/2} + (ν−8π)^{3/2})/(3√2π), the minimized coefficient.
pub fn moderate_coefficient(nu: f64) -> f64 {
    -(nu.powf(1.5) + (nu - EIGHT_PI).max(0.0).powf(1.5)) / (3.0 * 2f64.sqrt() * PI)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModerateResult {
    pub f: f64,
    /// F − T^{5/2}f_min − 4πaρ².
    pub excess: f64,
    pub d_star: f64,
}

/// Closed-form free energy for ρa/T ≪ 1 below the critical line.
pub fn free_energy_moderate(point: &GasPoint) -> Result<ModerateResult> {
    const OP: &str = "thermo::free_energy_moderate";
    if point.t == 0.0 || point.moderate_ratio() >= MODERATE_LIMIT {
        return Err(Error::domain(
            OP,
            format!("needs rho*a/T < {MODERATE_LIMIT}, got {}; use free_energy_canonical", point.moderate_ratio()),
        ));
    }
    let kc = critical::critical_k(point.nu)?;
    if point.k().is_some_and(|k| k <= kc) || point.delta_rho() <= 0.0 {
        return Err(Error::domain(OP, "point is not below the critical line; use free_energy_canonical"));
    }
    let GasPoint { t, rho, a, nu } = *point;
    let rfc = point.rho_fc();
    let excess = (nu - 4.0 * PI) * a * rfc * (2.0 * rho - rfc)
        + moderate_coefficient(nu) * (point.delta_rho() * a / t).powf(1.5) * t.powf(2.5);
    Ok(ModerateResult { f: reference_energy(point) + excess, excess, d_star: 2.0 * (nu - EIGHT_PI) })
}

/// Zero-temperature value of (F − 4πaρ²)/(ρa)^{5/2} at ρa³ = `gas_parameter`.
fn lhy_ratio(nu: f64, gas_parameter: f64) -> Result<f64> {
    let model = GasModel::new(nu, 1.0, ThermoOptions::default())?;
    let point = model.point(0.0, gas_parameter)?;
    Ok(model.condensed(&point)?.excess / gas_parameter.powf(2.5))
}

/// Reference gas parameter ρa³ for [`lhy_coefficient`].
pub const LHY_REFERENCE: f64 = 1e-10;

/// Coefficient g(ν) of (ρa)^{5/2} in the zero-temperature energy, from the minimization
/// at ρa³ = 1e−10 and 4e−10 with the leading √(ρa³) correction extrapolated away.
pub fn lhy_coefficient(nu: f64) -> Result<f64> {
    let g1 = lhy_ratio(nu, LHY_REFERENCE)?;
    let g4 = lhy_ratio(nu, 4.0 * LHY_REFERENCE)?;
    Ok(2.0 * g1 - g4)
}

/// 512√π/15.
pub fn lhy_constant() -> f64 {
    512.0 * PI.sqrt() / 15.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRow {
    pub t: f64,
    pub rho: f64,
    pub k: Option<f64>,
    /// Inside the grand-canonical coexistence band k₋ ≤ k ≤ k₊.
    pub coexistence_band: bool,
    pub outcome: std::result::Result<FreeEnergyResult, Error>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseDiagram {
    pub nu: f64,
    pub a: f64,
    pub maxwell: Option<MaxwellResult>,
    /// Temperature-major order.
    pub rows: Vec<PhaseRow>,
}

/// Inclusive linear grid of `n` points.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Free energy over a (T, ρ) grid. Failures at single points are kept in their row.
pub fn phase_diagram(
    model: &GasModel,
    t_range: (f64, f64),
    rho_range: (f64, f64),
    grid: (usize, usize),
    exec: Execution,
) -> Result<PhaseDiagram> {
    const OP: &str = "thermo::phase_diagram";
    if !(t_range.0 >= 0.0 && t_range.1 >= t_range.0 && rho_range.0 > 0.0 && rho_range.1 >= rho_range.0) {
        return Err(Error::domain(OP, format!("invalid ranges T = {t_range:?}, rho = {rho_range:?}")));
    }
    let maxwell = model.maxwell().ok();
    let mut cells = Vec::with_capacity(grid.0 * grid.1);
    for t in linspace(t_range.0, t_range.1, grid.0) {
        for rho in linspace(rho_range.0, rho_range.1, grid.1) {
            cells.push((t, rho));
        }
    }
    let rows = exec.map(&cells, |&(t, rho)| {
        let point = model.point(t, rho);
        let k = point.as_ref().ok().and_then(GasPoint::k);
        PhaseRow {
            t,
            rho,
            k,
            coexistence_band: matches!((k, maxwell), (Some(k), Some(m)) if m.in_coexistence(k)),
            outcome: point.and_then(|p| model.free_energy(&p)),
        }
    });
    Ok(PhaseDiagram { nu: model.nu, a: model.a, maxwell, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freegas::n_fc;
    use approx::assert_relative_eq;

    fn model(nu: f64, a: f64) -> GasModel {
        GasModel::new(nu, a, ThermoOptions::default()).unwrap()
    }

    #[test]
    fn gas_point_validation_and_flags() {
        assert!(GasPoint::new(1.0, -1.0, 1.0, EIGHT_PI).is_err());
        assert!(GasPoint::new(1.0, 1.0, 1.0, 20.0).is_err());
        let p = GasPoint::new(1.0, 1e-3, 2.0, EIGHT_PI).unwrap();
        assert!(p.outside_dilute_regime());
        assert!(!GasPoint::new(1.0, 1e-3, 0.5, EIGHT_PI).unwrap().outside_dilute_regime());
        assert_eq!(GasPoint::new(0.0, 1.0, 0.1, EIGHT_PI).unwrap().k(), None);
    }

    #[test]
    fn zero_temperature_depletion() {
        let p = GasPoint::new(0.0, 1e-6, 1.0, EIGHT_PI).unwrap();
        let rho0 = rho0_of_d(0.0, &p).unwrap();
        let expected = p.rho * (1.0 - 8.0 / (3.0 * PI.sqrt()) * (p.rho * p.a.powi(3)).sqrt());
        assert_relative_eq!(rho0, expected, max_relative = 1e-12);
        let far = rho0_of_d(1e8, &p).unwrap();
        assert!((p.rho - far) / (p.rho - rho0) < 1e-2);
    }

    #[test]
    fn normal_consistency_of_condensate() {
        let m = model(EIGHT_PI, 1e-3);
        let p = m.point(1.0, 0.5 * rho_fc(1.0)).unwrap();
        assert_eq!(m.rho0_of_d(0.0, &p).unwrap(), 0.0);
        let r = m.free_energy(&p).unwrap();
        assert_eq!(r.branch, Branch::Normal);
        assert_eq!(r.rho0, 0.0);
        let expected = free_energy(1.0, p.rho).unwrap() + EIGHT_PI * 1e-3 * p.rho * p.rho;
        assert_relative_eq!(r.f, expected, max_relative = 1e-14);
    }

    #[test]
    fn lhy_at_zero_temperature() {
        let m = model(EIGHT_PI, 1.0);
        let p = m.point(0.0, 1e-8).unwrap();
        let r = m.free_energy(&p).unwrap();
        assert_eq!(r.branch, Branch::Condensed);
        // d* → 0 in the dilute limit; at finite ρa³ the D² term pulls it off zero
        assert!(r.d_star < 1e-2, "{}", r.d_star);
        let coefficient = (r.f - 4.0 * PI * p.rho * p.rho) / (p.rho).powf(2.5);
        assert!((coefficient / lhy_constant() - 1.0).abs() < 1e-2);
        // leading term alone
        assert!((r.f / (4.0 * PI * p.rho * p.rho) - 1.0).abs() < 1e-3);
        let tiny = m.point(0.0, 1e-16).unwrap();
        let t = m.free_energy(&tiny).unwrap();
        assert!((t.f / (4.0 * PI * tiny.rho * tiny.rho) - 1.0).abs() < 1e-6);
        assert!(t.d_star < 0.1 * r.d_star.max(1e-12) || t.d_star < 1e-6);
    }

    #[test]
    fn lhy_coefficient_values() {
        let g = lhy_coefficient(EIGHT_PI).unwrap();
        assert!((g / lhy_constant() - 1.0).abs() < 1e-3, "{g}");
        let mut prev = g;
        for nu in [30.0, 40.0] {
            let gn = lhy_coefficient(nu).unwrap();
            assert!(gn > prev);
            // the minimum sits at d = 2(ν−8π) where the bracket reduces to ½I₁
            let half_i1 = 0.5 * reduced_integral(IntegralKind::I1, reduced(2.0 * (nu - EIGHT_PI), 0.0)).unwrap();
            assert!((gn / half_i1 - 1.0).abs() < 1e-3, "{nu}: {gn} vs {half_i1}");
            prev = gn;
        }
    }

    #[test]
    fn moderate_bracket_minimum() {
        for nu in [EIGHT_PI, 30.0, 40.0] {
            let (d, v) = minimize_moderate_bracket(nu, 100.0);
            assert!((d - 2.0 * (nu - EIGHT_PI)).abs() < 1e-4, "{nu}: {d}");
            assert_relative_eq!(v, moderate_coefficient(nu), max_relative = 1e-10);
        }
        assert_relative_eq!(moderate_bracket(0.0, EIGHT_PI), -16.0 / 3.0 * PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn moderate_regime_checks() {
        let p = GasPoint::new(1.0, 2.0 * n_fc(), 1e-3, EIGHT_PI).unwrap();
        let r = free_energy_moderate(&p).unwrap();
        assert_eq!(r.d_star, 0.0);
        let cold = GasPoint::new(1e-3, 1.0, 1e-3, EIGHT_PI).unwrap();
        assert!(free_energy_moderate(&cold).unwrap_err().is_domain());
        let hot = GasPoint::new(1.0, 0.5 * n_fc(), 1e-3, EIGHT_PI).unwrap();
        assert!(free_energy_moderate(&hot).unwrap_err().is_domain());
    }

    #[test]
    fn full_and_closed_form_converge_under_dilution() {
        let mut prev = f64::INFINITY;
        for a in [1e-3, 1e-4, 1e-5] {
            let m = model(EIGHT_PI, a);
            let p = m.point(1.0, 2.0 * rho_fc(1.0)).unwrap();
            let full = m.free_energy(&p).unwrap();
            assert_eq!(full.representation, Representation::Condensed);
            let closed = free_energy_moderate(&p).unwrap();
            let gap = (full.excess - closed.excess).abs() / (p.rho * a).powf(1.5);
            assert!(gap < prev, "a = {a}: {gap}");
            prev = gap;
        }
        assert!(prev < 0.1, "{prev}");
    }

    #[test]
    fn bracket_minimum_certificate() {
        let m = model(40.0, 1e-4);
        let p = m.point(1.0, 2.0 * rho_fc(1.0)).unwrap();
        let r = m.condensed(&p).unwrap();
        let (e0, _) = m.condensed_bracket(0.0, &p).unwrap();
        let (e1, _) = m.condensed_bracket(m.options.d0, &p).unwrap();
        assert!(r.excess <= e0 && r.excess <= e1);
        assert!(r.d_star > 0.0 && r.d_star < m.options.d0);
        assert!(r.rho0 > 0.0 && r.rho0 <= p.rho);
    }

    #[test]
    fn condensate_argument_variants_agree() {
        let a = 1e-4;
        let fixed = GasModel::new(
            EIGHT_PI,
            a,
            ThermoOptions { condensate_argument: CondensateArgument::SelfConsistent, ..Default::default() },
        )
        .unwrap();
        let plain = model(EIGHT_PI, a);
        let p = plain.point(1.0, 2.0 * rho_fc(1.0)).unwrap();
        let x = plain.free_energy(&p).unwrap();
        let y = fixed.free_energy(&p).unwrap();
        assert!((x.excess - y.excess).abs() < 0.1 * (p.rho * a).powf(1.5));
    }

    #[test]
    fn branch_selection_matches_energy_ordering() {
        let m = model(EIGHT_PI, 1e-3);
        for factor in [1.5, 2.0, 3.0] {
            let p = m.point(1.0, factor * rho_fc(1.0)).unwrap();
            let c = m.free_energy(&p).unwrap();
            assert_eq!(c.branch, Branch::Condensed);
            assert!(c.f <= m.normal(&p).unwrap().f);
        }
        // above the critical line the normal formula is used
        let p = m.point(1.0, 0.9 * rho_fc(1.0)).unwrap();
        assert!(p.t > p.critical_temperature(m.h1()));
        assert_eq!(m.free_energy(&p).unwrap().branch, Branch::Normal);
    }

    #[test]
    fn critical_window_energy_matches_normal_limit() {
        // on the σ = 0 side the window formula is the third-order expansion of F₀
        let a = 1e-2;
        let m = model(EIGHT_PI, a);
        let k = -2.0;
        let p = m.point(1.0, rho_fc(1.0) + k / EIGHT_PI * a).unwrap();
        assert_relative_eq!(p.k().unwrap(), k, max_relative = 1e-10);
        let window = m.critical_window(&p, k, Branch::Normal).unwrap();
        let normal = m.normal(&p).unwrap();
        let cubic = a.powi(3) * (-k).powi(3) / (96.0 * PI);
        assert!((window.f - normal.f).abs() < 1e-2 * cubic, "{} vs {cubic}", window.f - normal.f);
    }

    #[test]
    fn density_sweep_jumps_at_critical_k() {
        let a = 1e-3;
        let m = model(EIGHT_PI, a);
        let ks = linspace(-3.0, 3.0, 61);
        let rhos: Vec<f64> = ks.iter().map(|k| rho_fc(1.0) + k / EIGHT_PI * a).collect();
        let rows: Vec<FreeEnergyResult> =
            rhos.iter().map(|&r| m.free_energy(&m.point(1.0, r).unwrap()).unwrap()).collect();
        let jumps: Vec<f64> = rows.windows(2).map(|w| w[1].rho0 - w[0].rho0).collect();
        let (i, big) = jumps.iter().enumerate().fold((0, 0.0), |acc, (i, &j)| if j > acc.1 { (i, j) } else { acc });
        assert!(ks[i] < -1.279 && ks[i + 1] > -1.28);
        let others = jumps.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x.abs()).fold(0.0, f64::max);
        assert!(big > 5.0 * others, "{big} vs {others}");
    }

    #[test]
    fn phase_diagram_is_deterministic_and_flags_band() {
        let m = model(EIGHT_PI, 1e-3);
        let lo = rho_fc(1.0) - 4.0 / EIGHT_PI * 1e-3;
        let hi = rho_fc(1.0) + 4.0 / EIGHT_PI * 1e-3;
        let a = phase_diagram(&m, (1.0, 1.0), (lo, hi), (1, 41), Execution::Sequential).unwrap();
        let b = phase_diagram(&m, (1.0, 1.0), (lo, hi), (1, 41), Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let band = a.rows.iter().filter(|r| r.coexistence_band).count();
        assert!(band > 0 && band < a.rows.len());
        let mx = a.maxwell.unwrap();
        assert!(mx.k_minus <= -1.28 && mx.k_plus >= -1.28);
        let t0 = phase_diagram(&m, (0.0, 0.0), (1e-6, 1e-6), (1, 1), Execution::Sequential).unwrap();
        let r = t0.rows[0].outcome.as_ref().unwrap();
        assert_eq!(r.branch, Branch::Condensed);
        assert!(phase_diagram(&m, (1.0, 0.5), (lo, hi), (2, 2), Execution::Sequential).is_err());
    }
}
