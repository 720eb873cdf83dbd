//! Dimensionless reduced integrals I₁–I₄ and related quantities.
//!
//! With q = p² + d, σ' = (1+θ)σ and R = √(q² + 2qσ'):
//!
//! * I₁ = (2π)^{-3}∫[R − q − σ' + σ'²/(2p²)]
//! * I₂ = (2π)^{-3}∫ln(1 − e^{−G}),  G = √(q_s² + 2q_sσ's²),  q_s = p² + ds²
//! * I₃ = (2π)^{-3}∫[(q + σ')/R − 1]
//! * I₄ = (2π)^{-3}∫(q_s + σ's²)/(G(e^G − 1))
//!
//! Every integrand is rearranged algebraically so that no subtraction of nearly
//! equal terms is left; the integrals are then computed as radial quadratures
//! with measure p²dp/(2π²).

use std::f64::consts::PI;

use crate::error::{Context, Error, Result};
use crate::freegas::{f_min, n_fc};
use crate::quadrature::{integrate_radial_scaled, Decay, Tolerance};

/// Tolerance used for the reduced integrals.
pub const INTEGRAL_TOL: Tolerance = Tolerance { abs: 1e-13, rel: 1e-11 };

const RADIAL: f64 = 1.0 / (2.0 * PI * PI);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntegralKind {
    I1,
    I2,
    I3,
    I4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AsymptoticKind {
    /// φ → 0 limit of the kernel-weighted I₁: the ideal-kernel value.
    I1SmallPhi,
    /// Small-s expansion of I₂ through order s³.
    I2Moderate,
    /// φ → 0 limit of the kernel-weighted I₃: the ideal-kernel value.
    I3SmallPhi,
    /// Small-s expansion of I₄ through order s.
    I4Moderate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    pub d: f64,
    pub sigma: f64,
    pub theta: f64,
    pub s: f64,
}

impl ReducedParams {
    pub fn new(d: f64, sigma: f64, theta: f64, s: f64) -> Result<Self> {
        let p = ReducedParams { d, sigma, theta, s };
        p.validate("integrals::ReducedParams")?;
        Ok(p)
    }

    fn validate(&self, op: &'static str) -> Result<()> {
        let ok = self.d >= 0.0
            && self.sigma >= 0.0
            && (-1.0..=0.0).contains(&self.theta)
            && self.s >= 0.0
            && self.d.is_finite()
            && self.sigma.is_finite()
            && self.s.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::domain(op, format!("invalid reduced parameters {self:?}")))
        }
    }

    /// The combination (1+θ)σ through which σ and θ enter.
    pub fn effective_sigma(&self) -> f64 {
        (1.0 + self.theta) * self.sigma
    }
}

/// Momentum scale where the zero-temperature integrands turn to their p^{-2} tail.
fn power_scale(d: f64, x: f64) -> f64 {
    (d + 2.0 * x).sqrt().max(1e-3)
}

/// p²·[R − q − x + x²/(2p²)] without cancellation; `x` may depend on p.
fn i1_density(p: f64, d: f64, x: f64) -> f64 {
    let q = p * p + d;
    let r = (q * q + 2.0 * q * x).sqrt();
    let u = 2.0 * q * x / (r + q);
    x * x * q * (u + 2.0 * d + x) / ((r + q) * (r + q))
}

/// p²·[(q + x)/R − 1] without cancellation.
fn i3_density(p: f64, d: f64, x: f64) -> f64 {
    let q = p * p + d;
    let r = (q * q + 2.0 * q * x).sqrt();
    p * p * 2.0 * q * x * x / (r * (r + q) * (r + q))
}

fn thermal_parts(p: f64, d: f64, x: f64, s: f64) -> (f64, f64) {
    let s2 = s * s;
    let qs = p * p + d * s2;
    let g = (qs * qs + 2.0 * qs * x * s2).sqrt();
    (qs, g)
}

/// p²·ln(1 − e^{−G}).
fn i2_density(p: f64, d: f64, x: f64, s: f64) -> f64 {
    let (_, g) = thermal_parts(p, d, x, s);
    p * p * (-(-g).exp_m1()).ln()
}

/// p²·[ln(1 − e^{−G}) − ln(1 − e^{−p²})] ≥ 0, from G − p² computed directly.
fn i2_excess_density(p: f64, d: f64, x: f64, s: f64) -> f64 {
    let s2 = s * s;
    let (qs, g) = thermal_parts(p, d, x, s);
    let p2 = p * p;
    let w = (2.0 * p2 * d * s2 + d * d * s2 * s2 + 2.0 * qs * x * s2) / (g + p2);
    p2 * (-(-w).exp_m1() / p2.exp_m1()).ln_1p()
}

/// p²·(q_s + xs²)/(G(e^G − 1)).
fn i4_density(p: f64, d: f64, x: f64, s: f64) -> f64 {
    let (qs, g) = thermal_parts(p, d, x, s);
    p * p * (qs + x * s * s) / (g * g.exp_m1())
}

fn i4_excess_density(p: f64, d: f64, x: f64, s: f64) -> f64 {
    let p2 = p * p;
    i4_density(p, d, x, s) - p2 / p2.exp_m1()
}

/// Value of I₁–I₄ at the given parameters.
pub fn reduced_integral(kind: IntegralKind, params: ReducedParams) -> Result<f64> {
    reduced_integral_tol(kind, params, INTEGRAL_TOL)
}

pub fn reduced_integral_tol(kind: IntegralKind, params: ReducedParams, tol: Tolerance) -> Result<f64> {
    const OP: &str = "integrals::reduced_integral";
    params.validate(OP)?;
    let ReducedParams { d, s, .. } = params;
    let x = params.effective_sigma();
    let value = match kind {
        IntegralKind::I1 | IntegralKind::I3 => {
            if x == 0.0 {
                return Ok(0.0);
            }
            let scale = power_scale(d, x);
            let r = if kind == IntegralKind::I1 {
                integrate_radial_scaled(|p| i1_density(p, d, x), tol, Decay::Power(2.0), scale)
            } else {
                integrate_radial_scaled(|p| i3_density(p, d, x), tol, Decay::Power(2.0), scale)
            };
            r.map_err(|e| with_params(OP, kind, params, e))?.value
        }
        IntegralKind::I2 => {
            if s == 0.0 {
                return Ok(f_min());
            }
            integrate_radial_scaled(|p| i2_density(p, d, x, s), tol, Decay::Exponential, 1.0)
                .map_err(|e| with_params(OP, kind, params, e))?
                .value
        }
        IntegralKind::I4 => {
            if s == 0.0 {
                return Ok(n_fc());
            }
            integrate_radial_scaled(|p| i4_density(p, d, x, s), tol, Decay::Exponential, 1.0)
                .map_err(|e| with_params(OP, kind, params, e))?
                .value
        }
    };
    Ok(value * RADIAL)
}

/// I₂ − f_min or I₄ − n_fc, computed from a pointwise difference of integrands so
/// that the small excess keeps its relative accuracy. I₁ and I₃ are returned as is.
pub fn thermal_excess(kind: IntegralKind, params: ReducedParams) -> Result<f64> {
    thermal_excess_tol(kind, params, INTEGRAL_TOL)
}

pub fn thermal_excess_tol(kind: IntegralKind, params: ReducedParams, tol: Tolerance) -> Result<f64> {
    const OP: &str = "integrals::thermal_excess";
    params.validate(OP)?;
    let ReducedParams { d, s, .. } = params;
    let x = params.effective_sigma();
    match kind {
        IntegralKind::I1 | IntegralKind::I3 => reduced_integral_tol(kind, params, tol),
        _ if s == 0.0 => Ok(0.0),
        IntegralKind::I2 => Ok(RADIAL
            * integrate_radial_scaled(|p| i2_excess_density(p, d, x, s), tol, Decay::Exponential, 1.0)
                .map_err(|e| with_params(OP, kind, params, e))?
                .value),
        IntegralKind::I4 => Ok(RADIAL
            * integrate_radial_scaled(|p| i4_excess_density(p, d, x, s), tol, Decay::Exponential, 1.0)
                .map_err(|e| with_params(OP, kind, params, e))?
                .value),
    }
}

fn with_params(
    op: &'static str,
    kind: IntegralKind,
    params: ReducedParams,
    e: crate::quadrature::QuadratureError,
) -> Error {
    Error::numeric(op, format!("{kind:?} at {params:?}: {e}"))
}

/// I₁ or I₃ with σ' replaced by σ'·ratio(p), where `ratio` is V̂w(φp)/8πa for a
/// realistic kernel. With ratio ≡ 1 this is the ideal-kernel integral.
pub fn kernel_weighted_integral<K: Fn(f64) -> f64>(
    kind: IntegralKind,
    params: ReducedParams,
    ratio: K,
) -> Result<f64> {
    const OP: &str = "integrals::kernel_weighted_integral";
    params.validate(OP)?;
    let d = params.d;
    let x0 = params.effective_sigma();
    let scale = power_scale(d, x0);
    let r = match kind {
        IntegralKind::I1 => {
            integrate_radial_scaled(|p| i1_density(p, d, x0 * ratio(p)), INTEGRAL_TOL, Decay::Power(2.0), scale)
        }
        IntegralKind::I3 => {
            integrate_radial_scaled(|p| i3_density(p, d, x0 * ratio(p)), INTEGRAL_TOL, Decay::Power(2.0), scale)
        }
        _ => return Err(Error::domain(OP, "only I1 and I3 carry the interaction kernel")),
    };
    Ok(RADIAL * r.map_err(|e| with_params(OP, kind, params, e))?.value)
}

/// Truncated small-parameter expansions of the reduced integrals.
pub fn reduced_integral_asymptotic(kind: AsymptoticKind, params: ReducedParams) -> Result<f64> {
    const OP: &str = "integrals::reduced_integral_asymptotic";
    params.validate(OP)?;
    let ReducedParams { d, s, .. } = params;
    let x = params.effective_sigma();
    Ok(match kind {
        AsymptoticKind::I1SmallPhi => reduced_integral(IntegralKind::I1, params)?,
        AsymptoticKind::I3SmallPhi => reduced_integral(IntegralKind::I3, params)?,
        AsymptoticKind::I4Moderate => n_fc() - s / (8.0 * PI) * ((d + 2.0 * x).sqrt() + d.sqrt()),
        AsymptoticKind::I2Moderate => {
            f_min() + s * s * n_fc() * (d + x)
                - s.powi(3) / (12.0 * PI) * ((d + 2.0 * x).powf(1.5) + d.powf(1.5))
        }
    })
}

/// ∫f(p)dp over ℝ³ for the pairing defect f of the ideal kernel, at temperature
/// `t` and momentum scale `phi`. The thermal parameter is s = φ/√T; `params.s` is
/// not used.
pub fn pairing_defect_integral(params: ReducedParams, t: f64, phi: f64) -> Result<f64> {
    const OP: &str = "integrals::pairing_defect_integral";
    params.validate(OP)?;
    if !(t > 0.0 && phi > 0.0) {
        return Err(Error::domain(OP, format!("need T > 0 and phi > 0, got T = {t}, phi = {phi}")));
    }
    let d = params.d;
    let x = params.effective_sigma();
    if x == 0.0 {
        return Ok(0.0);
    }
    let s2 = phi * phi / t;
    let density = |q: f64| {
        let qq = q * q + d;
        let r = (qq * qq + 2.0 * qq * x).sqrt();
        let u = 2.0 * qq * x / (r + qq);
        // ½(1/R − 1/q²) = −½(u + d)/(R q²)
        let vacuum = -0.5 * x * (u + d) / r;
        let thermal = q * q * x / (r * (s2 * r).exp_m1());
        vacuum + thermal
    };
    let scale = power_scale(d, x);
    let r = integrate_radial_scaled(density, INTEGRAL_TOL, Decay::Power(2.0), scale).during(OP)?;
    Ok(phi.powi(3) * 4.0 * PI * r.value)
}

/// Leading small-φ²/T behavior of [`pairing_defect_integral`].
pub fn pairing_defect_limit(params: ReducedParams, t: f64, phi: f64) -> f64 {
    let d = params.d;
    let x = params.effective_sigma();
    t * phi * x * 2.0 * PI * PI / ((d + 2.0 * x).sqrt() + d.sqrt())
}

/// |∫ln(1−e^{−G}) − ∫ln(1−e^{−Q}) − b∫(e^Q−1)^{-1}| over ℝ³ with Q = p² + δ₀ and
/// G = √(Q² + 2Qb).
pub fn log_expansion_gap(delta0: f64, b: f64) -> Result<f64> {
    const OP: &str = "integrals::log_expansion_gap";
    if !((0.0..=1.0).contains(&delta0) && (0.0..=1.0).contains(&b)) {
        return Err(Error::domain(OP, format!("need delta0, b in [0, 1], got {delta0}, {b}")));
    }
    if b == 0.0 {
        return Ok(0.0);
    }
    let density = |p: f64| {
        let q = p * p + delta0;
        let g = (q * q + 2.0 * q * b).sqrt();
        let w = 2.0 * q * b / (g + q);
        let log_diff = (-(-w).exp_m1() / q.exp_m1()).ln_1p();
        p * p * (log_diff - b / q.exp_m1())
    };
    let r = integrate_radial_scaled(density, INTEGRAL_TOL, Decay::Exponential, 1.0).during(OP)?;
    Ok((4.0 * PI * r.value).abs())
}
