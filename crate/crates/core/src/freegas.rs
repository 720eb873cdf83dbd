//! The ideal Bose gas in units ħ = 2m = k_B = 1.
//!
//! Densities and free energies are written in scaled form: n = ρ/T^{3/2} and
//! F₀(T, ρ) = T^{5/2} f₀(n).

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Context, Error, Result};
use crate::optimize::brent_root;
use crate::quadrature::{integrate_radial, Decay, Tolerance};

/// Tolerance used for the free-gas occupation integrals.
const FREE_TOL: Tolerance = Tolerance { abs: 1e-15, rel: 1e-13 };

/// Largest λ = −μ/T scanned before the bracket is expanded.
const LAMBDA_CEILING: f64 = 700.0;

/// Riemann zeta for real s > 1 from the partial sum up to `terms` with an
/// Euler–Maclaurin remainder.
pub fn zeta_with_terms(s: f64, terms: usize) -> f64 {
    assert!(s > 1.0, "zeta needs s > 1");
    let n = terms.max(8) as f64;
    let mut sum = 0.0;
    for k in (1..terms.max(8)).rev() {
        sum += (k as f64).powf(-s);
    }
    let nps = n.powf(-s);
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * nps + s * nps / (12.0 * n)
        - s * (s + 1.0) * (s + 2.0) * nps / (720.0 * n.powi(3))
        + s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * nps / (30240.0 * n.powi(5));
    sum + tail
}

/// Riemann zeta for real s > 1, accurate to well below 1e-12.
pub fn zeta(s: f64) -> f64 {
    zeta_with_terms(s, 200)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeGasConstants {
    /// Critical density constant ζ(3/2)/(8π^{3/2}).
    pub n_fc: f64,
    /// Minimal free energy constant −ζ(5/2)/(8π^{3/2}).
    pub f_min: f64,
}

pub fn free_gas_constants() -> FreeGasConstants {
    static CONSTANTS: OnceLock<FreeGasConstants> = OnceLock::new();
    *CONSTANTS.get_or_init(|| {
        let norm = 8.0 * PI.powf(1.5);
        FreeGasConstants { n_fc: zeta(1.5) / norm, f_min: -zeta(2.5) / norm }
    })
}

pub fn n_fc() -> f64 {
    free_gas_constants().n_fc
}

pub fn f_min() -> f64 {
    free_gas_constants().f_min
}

/// Free-gas critical density at temperature `t`.
pub fn rho_fc(t: f64) -> f64 {
    n_fc() * t.powf(1.5)
}

/// Free-gas critical temperature at density `rho`.
pub fn t_fc(rho: f64) -> f64 {
    4.0 * PI * zeta(1.5).powf(-2.0 / 3.0) * rho.powf(2.0 / 3.0)
}

/// Scaled density (2π)^{-3}∫(e^{p²+λ}−1)^{-1}dp at λ = −μ/T ≥ 0.
pub fn bose_density(lambda: f64) -> Result<f64> {
    const OP: &str = "freegas::bose_density";
    if !(lambda >= 0.0) {
        return Err(Error::domain(OP, format!("lambda must be >= 0, got {lambda}")));
    }
    // e^{-λ} is factored out so that the relative accuracy survives large λ.
    let shift = -(-lambda).exp_m1();
    let r = integrate_radial(|p| p * p / ((p * p).exp_m1() + shift), FREE_TOL, Decay::Exponential).during(OP)?;
    Ok((-lambda).exp() * r.value / (2.0 * PI * PI))
}

/// Scaled pressure term (2π)^{-3}∫ln(1 − e^{−(p²+λ)})dp.
pub fn log_integral(lambda: f64) -> Result<f64> {
    const OP: &str = "freegas::log_integral";
    if !(lambda >= 0.0) {
        return Err(Error::domain(OP, format!("lambda must be >= 0, got {lambda}")));
    }
    let r = integrate_radial(|p| p * p * (-(-(p * p + lambda)).exp_m1()).ln(), FREE_TOL, Decay::Exponential)
        .during(OP)?;
    Ok(r.value / (2.0 * PI * PI))
}

/// Scaled chemical potential m(n) ≤ 0 with bose_density(−m) = n.
pub fn m_of_n(n: f64) -> Result<f64> {
    const OP: &str = "freegas::m_of_n";
    let nfc = n_fc();
    if !(n > 0.0) || n > nfc {
        return Err(Error::domain(OP, format!("density must lie in (0, n_fc = {nfc}], got {n}")));
    }
    if n == nfc {
        return Ok(0.0);
    }
    let g = |x: f64| bose_density(x * x).map(|v| v - n).unwrap_or(f64::NAN);
    let mut hi = LAMBDA_CEILING.sqrt();
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::domain(OP, format!("density {n} too small to invert")));
        }
    }
    let x = brent_root(g, 0.0, hi, 1e-13).during(OP)?;
    Ok(-(x * x))
}

/// Scaled free energy f₀(n); equal to f_min for n ≥ n_fc.
pub fn f0_of_n(n: f64) -> Result<f64> {
    const OP: &str = "freegas::f0_of_n";
    if !(n >= 0.0) {
        return Err(Error::domain(OP, format!("density must be >= 0, got {n}")));
    }
    if n == 0.0 {
        return Ok(0.0);
    }
    if n >= n_fc() {
        return Ok(f_min());
    }
    let m = m_of_n(n)?;
    Ok(log_integral(-m)? + m * n)
}

/// Free energy density of the ideal gas, F₀(T, ρ) = T^{5/2} f₀(ρ/T^{3/2}).
pub fn free_energy(t: f64, rho: f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(2.5) * f0_of_n(rho / t.powf(1.5))?)
}

/// Log-log slope and extrapolated prefactor of f₀(n) − f_min against
/// δn = n_fc − n over `points` geometric samples of δn in `[lo, hi]`.
///
/// The prefactor is the δn → 0 intercept of a straight-line fit of
/// (f₀ − f_min)/δn³ against δn.
pub fn third_order_fit(lo: f64, hi: f64, points: usize) -> Result<(f64, f64)> {
    let points = points.max(3);
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    let mut ratios = Vec::with_capacity(points);
    for i in 0..points {
        let dn = lo * (hi / lo).powf(i as f64 / (points - 1) as f64);
        let gap = f0_of_n(n_fc() - dn)? - f_min();
        xs.push(dn.ln());
        ys.push(gap.ln());
        ratios.push((dn, gap / dn.powi(3)));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    let (rx, ry): (Vec<f64>, Vec<f64>) = ratios.into_iter().unzip();
    let (_, intercept) = linear_fit(&rx, &ry);
    Ok((slope, intercept))
}

/// Least-squares line through the points; returns (slope, intercept).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
