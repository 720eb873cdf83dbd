//! Adaptive Gauss–Kronrod quadrature on finite intervals and on the half line.
//!
//! The engine bisects the panel with the largest error estimate until the summed
//! estimate drops below `max(abs, rel·|value|)`. Panel order is fully determined by
//! the inputs, so repeated calls return bit-identical results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-8;

/// Maximum number of panels before the engine gives up.
pub const MAX_PANELS: usize = 4000;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// How the integrand behaves as p → ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    /// Faster than any power; the range is cut where the integrand is negligible.
    Exponential,
    /// Like p^{-n} with n > 1; the tail beyond the scale is mapped onto a finite interval.
    Power(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: DEFAULT_ABS_TOL, rel: DEFAULT_REL_TOL }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Both tolerances multiplied by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Tolerance { abs: self.abs * factor, rel: self.rel * factor }
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        if self.abs > 0.0 && self.rel > 0.0 && self.abs.is_finite() && self.rel.is_finite() {
            Ok(())
        } else {
            Err(QuadratureError::InvalidTolerance { abs: self.abs, rel: self.rel })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("integrand returned {value} at p = {abscissa:e}")]
    NonFinite { abscissa: f64, value: f64 },
    #[error(
        "no convergence after {panels} panels (estimate {} ± {:e})",
        partial.value,
        partial.error_estimate
    )]
    Budget { partial: QuadratureResult, panels: usize },
    #[error("tolerances must be positive and finite (abs = {abs:e}, rel = {rel:e})")]
    InvalidTolerance { abs: f64, rel: f64 },
    #[error("integrand is not negligible at p = {p:e}; no cutoff found")]
    NoDecay { p: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadratureError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadratureError::NonFinite { abscissa: x, value: y })
    }
}

/// 21-point Kronrod rule with the embedded 10-point Gauss rule.
/// Returns (value, rescaled error estimate, roundoff floor of the estimate).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64, f64), QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = eval(f, center)?;
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for (j, &wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += wg * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = eval(f, center - dx)?;
        let f2 = eval(f, center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    Ok((value, err, floor))
}

const EVALS_PER_PANEL: usize = 21;

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError> {
    tol.validate()?;
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a.is_finite() && b.is_finite()) || b < a {
            return Err(QuadratureError::InvalidInterval { a, b });
        }
        if b == a {
            continue;
        }
        let (value, error, floor) = gk21(f, a, b)?;
        evaluations += EVALS_PER_PANEL;
        heap.push(Panel { a, b, value, error, floor, seq });
        seq += 1;
    }
    if heap.is_empty() {
        return Ok(QuadratureResult { value: 0.0, error_estimate: 0.0, evaluations: 1 });
    }
    loop {
        let (value, error) = totals(&heap);
        if error <= tol.abs.max(tol.rel * value.abs()) {
            return Ok(QuadratureResult { value, error_estimate: error, evaluations });
        }
        let worst = *heap.peek().expect("heap is nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        // Bisecting a panel whose estimate sits at the roundoff floor cannot help.
        let stuck = worst.error <= worst.floor || !(worst.a < mid && mid < worst.b);
        if heap.len() >= MAX_PANELS || stuck {
            return Err(QuadratureError::Budget {
                partial: QuadratureResult { value, error_estimate: error, evaluations },
                panels: heap.len(),
            });
        }
        heap.pop();
        let (v1, e1, r1) = gk21(f, worst.a, mid)?;
        let (v2, e2, r2) = gk21(f, mid, worst.b)?;
        evaluations += 2 * EVALS_PER_PANEL;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1, floor: r1, seq });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2, floor: r2, seq: seq + 1 });
        seq += 2;
    }
}

/// Sums in panel-creation order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by_key(|p| p.seq);
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError> {
    if a > b {
        let r = integrate(f, b, a, tol)?;
        return Ok(QuadratureResult { value: -r.value, ..r });
    }
    adaptive(&f, &[a, b], tol)
}

/// Integral over `[breaks[0], breaks[last]]` with initial panels split at the given points.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    tol: Tolerance,
) -> Result<QuadratureResult, QuadratureError> {
    adaptive(&f, breaks, tol)
}

/// Integral of `f` over `[0, ∞)` assuming unit scale for the integrand's features.
pub fn integrate_radial<F: Fn(f64) -> f64>(
    f: F,
    tol: Tolerance,
    decay: Decay,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_radial_scaled(f, tol, decay, 1.0)
}

/// Integral of `f` over `[0, ∞)`; `scale` is the momentum where the integrand
/// starts to follow its asymptotic decay.
pub fn integrate_radial_scaled<F: Fn(f64) -> f64>(
    f: F,
    tol: Tolerance,
    decay: Decay,
    scale: f64,
) -> Result<QuadratureResult, QuadratureError> {
    tol.validate()?;
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    match decay {
        Decay::Exponential => {
            let (cutoff, tail) = exponential_cutoff(&f, tol.abs, scale)?;
            let mut breaks = vec![0.0];
            let mut x = scale;
            while x < cutoff {
                breaks.push(x);
                x *= 2.0;
            }
            breaks.push(cutoff);
            let r = adaptive(&f, &breaks, tol)?;
            Ok(QuadratureResult { error_estimate: r.error_estimate + tail, ..r })
        }
        Decay::Power(_) => {
            let p0 = scale;
            let mapped = |x: f64| -> f64 {
                if x <= 1.0 {
                    p0 * f(p0 * x)
                } else {
                    let t = 2.0 - x;
                    if t <= 0.0 {
                        return 0.0;
                    }
                    let p = p0 / t;
                    if !p.is_finite() {
                        return 0.0;
                    }
                    f(p) * p0 / (t * t)
                }
            };
            adaptive(&mapped, &[0.0, 0.25, 0.5, 1.0, 1.5, 2.0], tol)
        }
    }
}

/// Smallest doubling of `scale` beyond which |f(p)|·p is below `abs_tol/1000` at
/// several probe points. Returns the cutoff and a bound on the discarded tail.
fn exponential_cutoff<F: Fn(f64) -> f64>(f: &F, abs_tol: f64, scale: f64) -> Result<(f64, f64), QuadratureError> {
    let threshold = abs_tol * 1e-3;
    let mut p = 4.0 * scale;
    for _ in 0..60 {
        let mut tail: f64 = 0.0;
        for factor in [1.0, 1.25, 1.5, 2.0, 3.0] {
            let x = p * factor;
            tail = tail.max(eval(f, x)?.abs() * x.max(1.0));
            if tail >= threshold {
                break;
            }
        }
        if tail < threshold {
            return Ok((p, tail));
        }
        p *= 2.0;
    }
    Err(QuadratureError::NoDecay { p })
}
