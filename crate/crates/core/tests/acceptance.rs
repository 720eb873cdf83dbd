//! End-to-end acceptance run: one PASS/FAIL line per criterion, with the
//! individual checks listed underneath.
//!
//! The process exits nonzero when a criterion fails that is not listed in
//! `KNOWN_FAILURES`. Known failures are still reported as FAIL.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bogoliubov::critical::{
    change_of_variables, critical_point, density_shift_coefficient, feasible_interval, h1, h2_and_mu_c,
    maxwell_construction, tau_self_consistent, EIGHT_PI,
};
use bogoliubov::freegas::{f_min, linear_fit, n_fc, rho_fc, third_order_fit};
use bogoliubov::functional::{
    closed_form_minimum, dispersion_g, entropy_density, evaluate_fs, minimizer_profiles, IdealKernel,
    SimplifiedContext,
};
use bogoliubov::integrals::{
    log_expansion_gap, reduced_integral, reduced_integral_asymptotic, thermal_excess, AsymptoticKind,
    IntegralKind, ReducedParams,
};
use bogoliubov::scattering::{solve_scattering, PotentialModel};
use bogoliubov::sweep::Execution;
use bogoliubov::thermo::{
    free_energy_moderate, lhy_constant, minimize_moderate_bracket, phase_diagram, GasModel, ThermoOptions,
    DEFAULT_D0,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that cannot be met as stated; see the README section on acceptance.
const KNOWN_FAILURES: &[u32] = &[9];

// Independent reference values.
const ZETA_3_2: f64 = 2.612_375_348_685_488;
const ZETA_5_2: f64 = 1.341_487_257_250_917;

type Outcome = Result<(), Box<dyn std::error::Error>>;

#[derive(Default)]
struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    fn check(&mut self, ok: bool, label: impl Into<String>) {
        self.lines.push((ok, label.into()));
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        let ok = (value - target).abs() <= tol;
        self.check(ok, format!("{name} = {value:.6} (target {target} ± {tol})"));
    }

    fn relative(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        let err = (value / target - 1.0).abs();
        self.check(err <= tol, format!("{name} = {value:.10} vs {target:.10}, relative error {err:.2e} (limit {tol:e})"));
    }

    fn passed(&self) -> bool {
        self.lines.iter().all(|(ok, _)| *ok)
    }
}

fn params(d: f64, sigma: f64, theta: f64, s: f64) -> ReducedParams {
    ReducedParams { d, sigma, theta, s }
}

fn critical_k_and_jump(r: &mut Report) -> Outcome {
    let cp = critical_point(EIGHT_PI)?;
    r.within("k_c", cp.k, -1.28, 0.01);
    r.within("sigma jump", cp.sigma_jump, 1.83, 0.02);
    Ok(())
}

fn canonical_shift(r: &mut Report) -> Outcome {
    r.within("density coefficient", density_shift_coefficient(EIGHT_PI)?, 2.24, 0.01);
    r.within("h1", h1(EIGHT_PI)?, 1.49, 0.01);
    Ok(())
}

fn maxwell(r: &mut Report) -> Outcome {
    let m = maxwell_construction(EIGHT_PI)?;
    r.within("c", m.c, 0.226, 0.002);
    r.within("k-", m.k_minus, -2.23, 0.01);
    r.within("k+", m.k_plus, 3.04, 0.01);
    r.within("common minimum", m.g_min, -0.27, 0.01);
    Ok(())
}

fn grand_canonical_shift(r: &mut Report) -> Outcome {
    let shift = h2_and_mu_c(EIGHT_PI, 1.0, 1e-4)?;
    r.within("h2", shift.h2, 0.44, 0.01);
    Ok(())
}

fn lhy(r: &mut Report) -> Outcome {
    let half_i1 = 0.5 * reduced_integral(IntegralKind::I1, params(0.0, EIGHT_PI, 0.0, 0.0))?;
    r.relative("I1(0,8pi,0)/2", half_i1, lhy_constant(), 1e-3);
    let model = GasModel::new(EIGHT_PI, 1.0, ThermoOptions::default())?;
    let point = model.point(0.0, 1e-8)?;
    let res = model.free_energy(&point)?;
    let coefficient = (res.f - 4.0 * PI * point.rho * point.rho) / (point.rho * point.a).powf(2.5);
    r.relative("T=0 coefficient at rho a^3 = 1e-8", coefficient, lhy_constant(), 1e-2);
    Ok(())
}

fn depletion(r: &mut Report) -> Outcome {
    let half_i3 = 0.5 * reduced_integral(IntegralKind::I3, params(0.0, EIGHT_PI, 0.0, 0.0))?;
    r.relative("I3(0,8pi,0)/2", half_i3, 8.0 / (3.0 * PI.sqrt()), 1e-6);
    Ok(())
}

fn free_gas(r: &mut Report) -> Outcome {
    let norm = 8.0 * PI.powf(1.5);
    r.relative("n_fc", n_fc(), ZETA_3_2 / norm, 1e-10);
    r.relative("f_min", f_min(), -ZETA_5_2 / norm, 1e-10);
    let (slope, prefactor) = third_order_fit(1e-3, 1e-2, 9)?;
    r.within("third-order slope", slope, 3.0, 0.05);
    r.relative("third-order prefactor", prefactor, 16.0 * PI * PI / 3.0, 0.02);
    Ok(())
}

fn change_of_variables_round_trip(r: &mut Report) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut infeasible = 0;
    for _ in 0..100 {
        let k: f64 = rng.gen_range(-6.0..6.0);
        let sigma = feasible_interval(k).lower + rng.gen_range(0.0..10.0);
        let Some(sol) = change_of_variables(sigma, k) else {
            infeasible += 1;
            continue;
        };
        let x = sigma + sol.tau;
        let root = (sol.d + 2.0 * x).sqrt() + sol.d.sqrt();
        worst = worst.max((sol.tau * root + 2.0 * x).abs()).max((root - (sigma - k)).abs());
    }
    r.check(infeasible == 0, format!("all 100 samples feasible ({infeasible} rejected)"));
    r.check(worst < 1e-9, format!("largest residual {worst:.2e} (limit 1e-9)"));
    let tau = tau_self_consistent(0.0, 1.0)?;
    r.check((tau - (1.0 - 3f64.sqrt())).abs() <= 1e-10, format!("tau(0,1) = {tau:.12} vs 1-sqrt(3)"));
    Ok(())
}

fn sci(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| format!("{x:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Pairwise log-log slopes and the least-squares slope.
fn slopes(xs: &[f64], ys: &[f64]) -> (Vec<f64>, f64) {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let pairwise = lx.windows(2).zip(ly.windows(2)).map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0])).collect();
    (pairwise, linear_fit(&lx, &ly).0)
}

fn small_parameter_expansions(r: &mut Report) -> Outcome {
    let ss = [0.1, 0.05, 0.025];
    for &(d, sigma, theta) in &[(1.0, EIGHT_PI, 0.0), (0.5, 10.0, -0.3)] {
        let mut i4_gap = Vec::new();
        let mut i2_gap = Vec::new();
        for &s in &ss {
            let p = params(d, sigma, theta, s);
            // the excess forms avoid cancellation against the s = 0 constants
            let i4 = n_fc() + thermal_excess(IntegralKind::I4, p)?;
            let i2 = f_min() + thermal_excess(IntegralKind::I2, p)?;
            i4_gap.push((i4 - reduced_integral_asymptotic(AsymptoticKind::I4Moderate, p)?).abs() / s);
            i2_gap.push((i2 - reduced_integral_asymptotic(AsymptoticKind::I2Moderate, p)?).abs() / s.powi(3));
        }
        let (i4_slopes, _) = slopes(&ss, &i4_gap);
        let (i2_slopes, _) = slopes(&ss, &i2_gap);
        r.check(
            i4_gap.windows(2).all(|w| w[1] < w[0]) && i4_slopes.iter().all(|&x| x > 0.5),
            format!("I4 gap/s at (d,sigma,theta)=({d},{sigma:.3},{theta}): {}, slopes {i4_slopes:.2?}", sci(&i4_gap)),
        );
        r.check(
            i2_gap.windows(2).all(|w| w[1] < w[0]) && i2_slopes.iter().all(|&x| x > 0.5),
            format!("I2 gap/s^3 at (d,sigma,theta)=({d},{sigma:.3},{theta}): {}, slopes {i2_slopes:.2?}", sci(&i2_gap)),
        );
    }
    let bs = [0.04, 0.16, 0.64];
    let gaps = bs.iter().map(|&b| log_expansion_gap(0.0, b)).collect::<Result<Vec<_>, _>>()?;
    let (pairwise, fitted) = slopes(&bs, &gaps);
    r.check(
        (1.4..=1.6).contains(&fitted),
        format!("log-expansion gap slope over b = {bs:?}: {fitted:.4} (pairwise {pairwise:.4?}), required [1.4, 1.6]"),
    );
    let small = [0.0025, 0.005, 0.01];
    let gaps = small.iter().map(|&b| log_expansion_gap(0.0, b)).collect::<Result<Vec<_>, _>>()?;
    let (_, fitted_small) = slopes(&small, &gaps);
    r.check(
        (fitted_small - 1.5).abs() < 0.05,
        format!("log-expansion gap slope over b = {small:?}: {fitted_small:.4} (diagnostic, 1.5 ± 0.05)"),
    );
    Ok(())
}

fn monotonicity(r: &mut Report) -> Outcome {
    const TOL: f64 = 1e-9;
    let ds: Vec<f64> = (0..=20).map(f64::from).collect();
    let ss: Vec<f64> = (1..=10).map(|i| 0.5 * f64::from(i)).collect();

    let mut energy = Vec::new();
    for &d in &ds {
        let p = params(d, EIGHT_PI, 0.0, 0.0);
        energy.push(reduced_integral(IntegralKind::I1, p)? - d * reduced_integral(IntegralKind::I3, p)?);
    }
    let increasing = energy.windows(2).all(|w| w[1] >= w[0] - TOL);
    r.check(increasing, format!("I1 - d I3 increasing in d: {:.3} .. {:.3}", energy[0], energy[20]));

    let eval = |d: f64, s: f64| -> Result<(f64, f64), bogoliubov::Error> {
        let p = params(d, EIGHT_PI, 0.0, s);
        Ok((reduced_integral(IntegralKind::I2, p)?, reduced_integral(IntegralKind::I4, p)?))
    };
    let mut grid = Vec::new();
    for &d in &ds {
        let row = ss.iter().map(|&s| eval(d, s)).collect::<Result<Vec<_>, _>>()?;
        grid.push(row);
    }
    let combo = |i: usize, j: usize| grid[i][j].0 - ds[i] * ss[j] * ss[j] * grid[i][j].1;
    let i2 = |i: usize, j: usize| grid[i][j].0;
    let i4 = |i: usize, j: usize| grid[i][j].1;
    let (nd, ns) = (ds.len(), ss.len());
    let along_both = |f: &dyn Fn(usize, usize) -> f64, up: bool| {
        let sign = if up { 1.0 } else { -1.0 };
        let mut ok = true;
        for i in 0..nd {
            for j in 0..ns {
                if i + 1 < nd {
                    ok &= sign * (f(i + 1, j) - f(i, j)) >= -TOL;
                }
                if j + 1 < ns {
                    ok &= sign * (f(i, j + 1) - f(i, j)) >= -TOL;
                }
            }
        }
        ok
    };
    let all = |f: &dyn Fn(usize, usize) -> f64, pred: &dyn Fn(f64) -> bool| {
        (0..nd).all(|i| (0..ns).all(|j| pred(f(i, j))))
    };
    r.check(
        along_both(&combo, true) && all(&combo, &|v| v <= TOL),
        format!("I2 - d s^2 I4 increasing toward 0 in d and s: {:.3e} .. {:.3e}", combo(0, 0), combo(nd - 1, ns - 1)),
    );
    r.check(
        along_both(&i2, true) && all(&i2, &|v| v <= TOL),
        format!("I2 increasing toward 0: {:.3e} .. {:.3e}", i2(0, 0), i2(nd - 1, ns - 1)),
    );
    r.check(
        along_both(&i4, false) && all(&i4, &|v| v >= -TOL),
        format!("I4 decreasing toward 0: {:.3e} .. {:.3e}", i4(0, 0), i4(nd - 1, ns - 1)),
    );
    Ok(())
}

fn functional_oracle(r: &mut Report) -> Outcome {
    let sets = [(0.01, 0.0, 0.0, 1.0), (0.1, 0.0, 0.05, 0.5), (0.02, -0.005, 0.5, 2.0), (0.3, -0.1, 1.0, 0.8), (0.05, 0.0, 0.0, 3.0)];
    for &(rho0a, t0a, delta, t) in &sets {
        // a = 1; ρ₀ and t₀ carry the interaction strength
        let ctx = SimplifiedContext::new(rho0a, t0a, delta, t, IdealKernel { a: 1.0 })?;
        let prof = minimizer_profiles(&ctx)?;
        let direct = evaluate_fs(&ctx, |p| prof.gamma(p), |p| prof.alpha(p))?;
        let closed = closed_form_minimum(&ctx)?;
        let rel = (direct / closed - 1.0).abs();
        let x = ctx.effective_density() * 8.0 * PI;
        let mut residual = 0.0f64;
        for i in 1..=400 {
            let p = 0.02 * f64::from(i);
            let pair = prof.pair(p)?;
            let (gamma, alpha) = (pair.gamma, pair.alpha);
            let beta = pair.beta();
            let g = dispersion_g(p, &ctx)?;
            let q = p * p + delta;
            // stationarity in α relative to γ: α(q + x) + x(γ + ½) = 0
            let ratio = (alpha * (q + x) + x * (gamma + 0.5)).abs() / (x * (gamma + 0.5)).max(f64::MIN_POSITIVE);
            // stationarity in β: β = (e^G − 1)^{-1} + ½
            let occupation = (beta - (1.0 / g.exp_m1() + 0.5)).abs() / beta;
            residual = residual.max(ratio).max(occupation);
            // the logarithmic form T ln(1 + 1/ε) = q + x needs ε = β − ½ resolved,
            // which (γ, α) in double precision only allow while the occupation is appreciable
            if g < 20.0 {
                let room = gamma * (gamma + 1.0) - alpha * alpha;
                let eps = room / ((0.25 + room).sqrt() + 0.5);
                let log_form = t * (1.0 / eps).ln_1p() * (gamma + 0.5) / beta;
                residual = residual.max((log_form - (q + x)).abs() / (q + x));
            }
            entropy_density(pair)?;
        }
        r.check(
            rel <= 1e-8 && residual < 1e-8,
            format!(
                "(rho0 a, t0 a, delta, T) = ({rho0a}, {t0a}, {delta}, {t}): direct {direct:.12e}, closed {closed:.12e}, \
                 relative {rel:.1e}; max Euler-Lagrange residual {residual:.1e}"
            ),
        );
    }
    Ok(())
}

fn scattering(r: &mut Report) -> Outcome {
    let square = solve_scattering(PotentialModel::square_barrier(2.0, 1.0)?, 40.0)?;
    r.relative("square barrier a", square.a, 1.0 - 1f64.tanh(), 1e-6);
    let weak = solve_scattering(PotentialModel::square_barrier(1e-4, 1.0)?, 40.0)?;
    let born = weak.a * EIGHT_PI / weak.v_hat_zero;
    r.within("Born ratio 8 pi a / int V at V0 = 1e-4", born, 1.0, 1e-3);
    let mut all_above = true;
    for pot in [
        PotentialModel::square_barrier(2.0, 1.0)?,
        PotentialModel::square_barrier(1e-4, 1.0)?,
        PotentialModel::square_barrier(50.0, 0.5)?,
        PotentialModel::gaussian(1.0, 1.0)?,
        PotentialModel::gaussian(10.0, 2.0)?,
    ] {
        let res = solve_scattering(pot, 40.0 * pot.range())?;
        r.relative(&format!("{pot}: Vw(0)/(8 pi a)"), res.vw(0.0) / (EIGHT_PI * res.a), 1.0, 1e-6);
        all_above &= res.nu > EIGHT_PI;
        r.check(res.nu > EIGHT_PI, format!("{pot}: nu = {:.6} > 8 pi", res.nu));
    }
    r.check(all_above, "nu > 8 pi on every test potential");
    Ok(())
}

fn moderate_temperature(r: &mut Report) -> Outcome {
    for nu in [EIGHT_PI, 30.0, 40.0] {
        let (d_star, _) = minimize_moderate_bracket(nu, DEFAULT_D0);
        r.within(&format!("d* at nu = {nu:.4}"), d_star, 2.0 * (nu - EIGHT_PI), 1e-4);
    }
    let t = 1.0;
    let mut gaps = Vec::new();
    let scales = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    for &a in &scales {
        let model = GasModel::new(EIGHT_PI, a, ThermoOptions::default())?;
        let point = model.point(t, 2.0 * rho_fc(t))?;
        let full = model.free_energy(&point)?;
        let closed = free_energy_moderate(&point)?;
        gaps.push((full.excess - closed.excess).abs() / (t * (point.rho * a).powf(1.5)));
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    r.check(
        decreasing && gaps[gaps.len() - 1] < 1e-2,
        format!("|full - closed| / T(rho a)^1.5 along a = {scales:?}: {}", sci(&gaps)),
    );
    Ok(())
}

fn first_order_transition(r: &mut Report) -> Outcome {
    let a = 1e-3;
    let t = 1.0;
    let model = GasModel::new(EIGHT_PI, a, ThermoOptions::default())?;
    let lo = rho_fc(t) - 4.0 / EIGHT_PI * t * t * a;
    let hi = rho_fc(t) + 4.0 / EIGHT_PI * t * t * a;
    let diagram = phase_diagram(&model, (t, t), (lo, hi), (1, 161), Execution::Parallel)?;
    let mut rho0 = Vec::new();
    let mut ks = Vec::new();
    for row in &diagram.rows {
        rho0.push(row.outcome.as_ref().map_err(|e| e.clone())?.rho0);
        ks.push(row.k.unwrap_or(f64::NAN));
    }
    let jumps: Vec<f64> = rho0.windows(2).map(|w| w[1] - w[0]).collect();
    let (at, big) = jumps.iter().copied().enumerate().fold((0, 0.0), |acc, (i, j)| if j > acc.1 { (i, j) } else { acc });
    let rest = jumps.iter().enumerate().filter(|&(i, _)| i != at).map(|(_, j)| j.abs()).fold(0.0, f64::max);
    r.check(
        big > 10.0 * rest,
        format!("largest rho0 step {big:.3e} between k = {:.3} and {:.3}; next largest {rest:.3e}", ks[at], ks[at + 1]),
    );
    let m = diagram.maxwell.ok_or("no Maxwell construction")?;
    let inside = diagram.rows[at].coexistence_band && diagram.rows[at + 1].coexistence_band;
    r.check(inside, "jump lies inside the coexistence band");
    r.check(
        m.k_minus <= -1.28 && -1.28 <= m.k_plus,
        format!("k- = {:.4} <= -1.28 <= k+ = {:.4}", m.k_minus, m.k_plus),
    );
    Ok(())
}

type Criterion = (u32, &'static str, u64, fn(&mut Report) -> Outcome);

const CRITERIA: &[Criterion] = &[
    (1, "critical k and minimizer jump", 5, critical_k_and_jump),
    (2, "canonical shift constants", 5, canonical_shift),
    (3, "Maxwell construction", 10, maxwell),
    (4, "grand-canonical shift", 10, grand_canonical_shift),
    (5, "zero-temperature energy", 10, lhy),
    (6, "depletion", 1, depletion),
    (7, "free-gas constants", 5, free_gas),
    (8, "critical change of variables", 1, change_of_variables_round_trip),
    (9, "small-parameter expansions", 30, small_parameter_expansions),
    (10, "monotonicity of the reduced integrals", 30, monotonicity),
    (11, "simplified functional oracle", 20, functional_oracle),
    (12, "scattering", 10, scattering),
    (13, "moderate-temperature expansion", 60, moderate_temperature),
    (14, "first-order transition", 30, first_order_transition),
];

fn main() -> ExitCode {
    // runtime limits refer to optimized builds
    let enforce_time = !cfg!(debug_assertions);
    let mut unexpected = Vec::new();
    let mut failed = 0;
    let start = Instant::now();
    for &(id, name, limit, run) in CRITERIA {
        let mut report = Report::default();
        let t0 = Instant::now();
        let outcome = run(&mut report);
        let elapsed = t0.elapsed();
        if let Err(e) = &outcome {
            report.check(false, format!("error: {e}"));
        }
        let in_time = elapsed <= Duration::from_secs(limit);
        report.check(in_time || !enforce_time, format!("runtime {:.2} s (limit {limit} s)", elapsed.as_secs_f64()));
        let ok = report.passed();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (ok, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag:<12} {name}");
        for (good, line) in &report.lines {
            println!("    [{}] {line}", if *good { "ok" } else { "x " });
        }
        if !ok {
            failed += 1;
            if !known {
                unexpected.push(id);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1} s{}",
        CRITERIA.len() - failed,
        CRITERIA.len(),
        start.elapsed().as_secs_f64(),
        if enforce_time { "" } else { " (debug build: runtime limits reported, not enforced)" }
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
