//! The simplified Bogoliubov functional: entropy density, dispersion, explicit
//! minimizer and a direct quadrature evaluator.
//!
//! Units are physical (ħ = 2m = k_B = 1). The interaction enters only through a
//! [`Kernel`] p ↦ V̂w(p); [`IdealKernel`] is the constant 8πa.

use std::f64::consts::PI;

use crate::error::{Context, Error, Result};
use crate::quadrature::{integrate, integrate_radial_scaled, Decay, Tolerance};

const RADIAL: f64 = 1.0 / (2.0 * PI * PI);

/// Tolerance used by [`evaluate_fs`] and [`closed_form_minimum`].
pub const FUNCTIONAL_TOL: Tolerance = Tolerance { abs: 1e-14, rel: 1e-12 };

/// Momentum-space interaction p ↦ V̂w(p).
pub trait Kernel: Send + Sync {
    fn value(&self, p: f64) -> f64;

    /// False for potentials outside the class the thermodynamic formulas assume.
    fn admissible(&self) -> bool {
        true
    }
}

/// Constant kernel 8πa.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealKernel {
    pub a: f64,
}

impl Kernel for IdealKernel {
    fn value(&self, _p: f64) -> f64 {
        8.0 * PI * self.a
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn value(&self, p: f64) -> f64 {
        (**self).value(p)
    }
    fn admissible(&self) -> bool {
        (**self).admissible()
    }
}

/// Momentum occupation γ and pairing α at one momentum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OccupationPair {
    pub gamma: f64,
    pub alpha: f64,
}

impl OccupationPair {
    pub fn new(gamma: f64, alpha: f64) -> Result<Self> {
        let pair = OccupationPair { gamma, alpha };
        pair.excitation("functional::OccupationPair")?;
        Ok(pair)
    }

    /// β = √((½ + γ)² − α²).
    pub fn beta(&self) -> f64 {
        ((0.5 + self.gamma).powi(2) - self.alpha * self.alpha).max(0.25).sqrt()
    }

    /// β − ½ from γ + γ² − α², checked against the domain constraint.
    fn excitation(&self, op: &'static str) -> Result<f64> {
        let OccupationPair { gamma, alpha } = *self;
        let room = gamma * (gamma + 1.0);
        let squeeze = room - alpha * alpha;
        let slack = 64.0 * f64::EPSILON * room.max(alpha * alpha);
        if !(gamma >= 0.0) || !alpha.is_finite() || squeeze < -slack {
            return Err(Error::domain(
                op,
                format!("pair (gamma = {gamma}, alpha = {alpha}) violates alpha^2 <= gamma(gamma+1)"),
            ));
        }
        let squeeze = squeeze.max(0.0);
        let beta = (0.25 + squeeze).sqrt();
        Ok(squeeze / (beta + 0.5))
    }
}

/// s(β) = (β+½)ln(β+½) − (β−½)ln(β−½) written in ε = β − ½.
fn entropy_of_excitation(eps: f64) -> f64 {
    if eps == 0.0 {
        0.0
    } else {
        (1.0 + eps) * eps.ln_1p() - eps * eps.ln()
    }
}

/// Entropy density s(β) of an occupation pair.
pub fn entropy_density(pair: OccupationPair) -> Result<f64> {
    let eps = pair.excitation("functional::entropy_density")?;
    Ok(entropy_of_excitation(eps))
}

/// Parameters of the simplified functional.
#[derive(Clone, Copy, Debug)]
pub struct SimplifiedContext<K> {
    pub rho0: f64,
    pub t0: f64,
    pub delta: f64,
    pub temperature: f64,
    pub kernel: K,
}

impl<K: Kernel> SimplifiedContext<K> {
    pub fn new(rho0: f64, t0: f64, delta: f64, temperature: f64, kernel: K) -> Result<Self> {
        const OP: &str = "functional::SimplifiedContext";
        if !(rho0 >= 0.0 && rho0.is_finite()) {
            return Err(Error::domain(OP, format!("rho0 must be >= 0, got {rho0}")));
        }
        if !(t0 <= 0.0 && t0 >= -rho0) {
            return Err(Error::domain(OP, format!("t0 must lie in [-rho0, 0], got {t0}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::domain(OP, format!("delta must be >= 0, got {delta}")));
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::domain(OP, format!("temperature must be >= 0, got {temperature}")));
        }
        if !kernel.admissible() {
            return Err(Error::domain(OP, "kernel is flagged as not admissible for thermodynamics"));
        }
        Ok(SimplifiedContext { rho0, t0, delta, temperature, kernel })
    }

    /// ρ₀ + t₀.
    pub fn effective_density(&self) -> f64 {
        self.rho0 + self.t0
    }

    /// Momentum below which the profiles have their structure.
    fn scale(&self) -> f64 {
        let x0 = (self.effective_density() * self.kernel.value(0.0)).abs();
        self.temperature.max(self.delta).max(x0).sqrt().max(1e-12)
    }

    /// (q, x, R) with q = p² + δ, x = (ρ₀+t₀)V̂w(p), R = √(q(q + 2x)).
    fn parts(&self, p: f64) -> Result<(f64, f64, f64)> {
        let q = p * p + self.delta;
        let x = self.effective_density() * self.kernel.value(p);
        let radicand = q * (q + 2.0 * x);
        if !(radicand >= 0.0) {
            return Err(Error::domain(
                "functional::dispersion_G",
                format!("negative radicand {radicand:e} at p = {p}"),
            ));
        }
        Ok((q, x, radicand.sqrt()))
    }

    fn require_temperature(&self, op: &'static str) -> Result<()> {
        if self.temperature > 0.0 {
            Ok(())
        } else {
            Err(Error::domain(op, "temperature must be > 0"))
        }
    }
}

/// G(p) = T^{-1}√((p²+δ)(p²+δ+2(ρ₀+t₀)V̂w(p))).
pub fn dispersion_g<K: Kernel>(p: f64, ctx: &SimplifiedContext<K>) -> Result<f64> {
    ctx.require_temperature("functional::dispersion_G")?;
    let (_, _, r) = ctx.parts(p)?;
    Ok(r / ctx.temperature)
}

/// The explicit minimizer of the simplified functional plus δ∫γ.
#[derive(Clone, Copy, Debug)]
pub struct MinimizerProfiles<'a, K> {
    ctx: &'a SimplifiedContext<K>,
}

impl<K: Kernel> MinimizerProfiles<'_, K> {
    /// (γ, α, β − ½) at momentum p.
    fn components(&self, p: f64) -> Result<(f64, f64, f64)> {
        let (q, x, r) = self.ctx.parts(p)?;
        let n_bose = 1.0 / (r / self.ctx.temperature).exp_m1();
        if x == 0.0 {
            return Ok((n_bose, 0.0, n_bose));
        }
        let u = 2.0 * q * x / (r + q);
        // (q + x)/R − 1 = xu/((R + q)R)
        let gamma = n_bose * (q + x) / r + 0.5 * x * u / ((r + q) * r);
        let alpha = -(n_bose + 0.5) * x / r;
        Ok((gamma, alpha, n_bose))
    }

    pub fn gamma(&self, p: f64) -> f64 {
        self.components(p).map(|c| c.0).unwrap_or(f64::NAN)
    }

    pub fn alpha(&self, p: f64) -> f64 {
        self.components(p).map(|c| c.1).unwrap_or(f64::NAN)
    }

    /// β(p) = (e^{G(p)} − 1)^{-1} + ½.
    pub fn beta(&self, p: f64) -> f64 {
        self.components(p).map(|c| c.2 + 0.5).unwrap_or(f64::NAN)
    }

    pub fn pair(&self, p: f64) -> Result<OccupationPair> {
        let (gamma, alpha, _) = self.components(p)?;
        Ok(OccupationPair { gamma, alpha })
    }
}

pub fn minimizer_profiles<K: Kernel>(ctx: &SimplifiedContext<K>) -> Result<MinimizerProfiles<'_, K>> {
    ctx.require_temperature("functional::minimizer_profiles")?;
    Ok(MinimizerProfiles { ctx })
}

/// Cutoff multiple of the context scale for [`evaluate_fs`].
const FS_CUTOFF: f64 = 1e3;

/// Direct quadrature of the simplified functional plus δ∫γ for arbitrary profiles.
///
/// The four terms are combined pointwise; for a non-decaying kernel they cancel to
/// O(p^{-4}) only, so the integral is taken up to a large cutoff and the remaining
/// A/p² + B/p⁴ tail is added from two samples beyond it.
pub fn evaluate_fs<K, G, A>(ctx: &SimplifiedContext<K>, gamma: G, alpha: A) -> Result<f64>
where
    K: Kernel,
    G: Fn(f64) -> f64,
    A: Fn(f64) -> f64,
{
    const OP: &str = "functional::evaluate_Fs";
    ctx.require_temperature(OP)?;
    let t = ctx.temperature;
    let rho_eff = ctx.effective_density();
    let density = |p: f64| -> std::result::Result<f64, Error> {
        let g = gamma(p);
        let a = alpha(p);
        let x = rho_eff * ctx.kernel.value(p);
        let eps = OccupationPair { gamma: g, alpha: a }.excitation(OP)?;
        let p2 = p * p;
        let energy = (p2 + ctx.delta + x) * g + x * a + 0.25 * x * x / p2;
        Ok(p2 * (energy - t * entropy_of_excitation(eps)))
    };
    let failure = std::cell::Cell::new(None);
    let checked = |p: f64| match density(p) {
        Ok(v) => v,
        Err(e) => {
            let first = failure.take().unwrap_or(e);
            failure.set(Some(first));
            f64::NAN
        }
    };
    let cutoff = FS_CUTOFF * ctx.scale();
    let mut breaks = vec![0.0];
    let mut b = ctx.scale() / 16.0;
    while b < cutoff {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(cutoff);
    let body = crate::quadrature::integrate_with_breaks(checked, &breaks, FUNCTIONAL_TOL);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let body = body.during(OP)?.value;
    let f1 = checked(cutoff);
    let f2 = checked(2.0 * cutoff);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let c4 = (4.0 / 3.0) * cutoff.powi(4) * (f1 - 4.0 * f2);
    let c2 = cutoff * cutoff * f1 - c4 / (cutoff * cutoff);
    let tail = c2 / cutoff + c4 / (3.0 * cutoff.powi(3));
    Ok(RADIAL * (body + tail))
}

/// Closed-form minimum of the simplified functional plus δ∫γ:
/// (2π)^{-3}∫T ln(1 − e^{−G}) + ½(2π)^{-3}∫[TG − (p²+δ+x) + x²/(2p²)].
pub fn closed_form_minimum<K: Kernel>(ctx: &SimplifiedContext<K>) -> Result<f64> {
    const OP: &str = "functional::closed_form_minimum";
    ctx.require_temperature(OP)?;
    let t = ctx.temperature;
    let failure = std::cell::Cell::new(None);
    let density = |p: f64| match ctx.parts(p) {
        Ok((q, x, r)) => {
            let u = 2.0 * q * x / (r + q);
            let vacuum = 0.5 * x * x * q * (u + 2.0 * ctx.delta + x) / ((r + q) * (r + q));
            let thermal = t * p * p * (-(-r / t).exp_m1()).ln();
            vacuum + thermal
        }
        Err(e) => {
            failure.set(Some(e));
            f64::NAN
        }
    };
    let r = integrate_radial_scaled(density, FUNCTIONAL_TOL, Decay::Power(2.0), ctx.scale());
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(RADIAL * r.during(OP)?.value)
}

/// Condensate-free density (2π)^{-3}∫γ of the minimizer.
pub fn minimizer_density<K: Kernel>(ctx: &SimplifiedContext<K>) -> Result<f64> {
    const OP: &str = "functional::minimizer_density";
    let profiles = minimizer_profiles(ctx)?;
    let scale = ctx.scale();
    let head = integrate(|p| p * p * profiles.gamma(p), 0.0, scale, FUNCTIONAL_TOL).during(OP)?;
    let tail = integrate_radial_scaled(|p| (p + scale).powi(2) * profiles.gamma(p + scale), FUNCTIONAL_TOL, Decay::Power(2.0), scale)
        .during(OP)?;
    Ok(RADIAL * (head.value + tail.value))
}
