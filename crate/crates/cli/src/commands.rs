use std::f64::consts::PI;

use bogoliubov::critical::{self, EIGHT_PI};
use bogoliubov::freegas::{f_min, n_fc, t_fc, zeta};
use bogoliubov::functional::{dispersion_g, minimizer_profiles, IdealKernel, Kernel, SimplifiedContext};
use bogoliubov::integrals::{reduced_integral_tol, thermal_excess_tol, IntegralKind, ReducedParams, INTEGRAL_TOL};
use bogoliubov::quadrature::Tolerance;
use bogoliubov::scattering::{solve_scattering, vw_kernel, MIN_RANGE_MULTIPLE};
use bogoliubov::sweep::Execution;
use bogoliubov::thermo::{self, free_energy_moderate, linspace, GasModel, ThermoOptions};

use crate::output::{Cell, Dataset};
use crate::settings::{parse_nu, Settings, UsageError};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(bogoliubov::Error),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e.0)
    }
}

impl From<bogoliubov::Error> for CliError {
    fn from(e: bogoliubov::Error) -> Self {
        if e.is_domain() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e)
        }
    }
}

type Out = Result<Dataset, CliError>;

fn execution(s: &Settings) -> Result<Execution, CliError> {
    Ok(if s.flag("sequential")? { Execution::Sequential } else { Execution::Parallel })
}

fn with_params(mut d: Dataset, s: &Settings) -> Dataset {
    for (k, v) in s.echo() {
        d.param(k, v);
    }
    d
}

pub fn constants(s: &Settings) -> Out {
    let mut d = with_params(Dataset::new("constants", &["quantity", "value"]), s);
    d.scalar("n_fc", n_fc());
    d.scalar("f_min", f_min());
    d.scalar("zeta_3_2", zeta(1.5));
    d.scalar("lhy_constant", thermo::lhy_constant());
    d.scalar("depletion_constant", 8.0 / (3.0 * PI.sqrt()));
    Ok(d)
}

pub fn integrals(s: &Settings) -> Out {
    let sigma = match s.raw("sigma") {
        Some(v) => parse_nu(v)?,
        None => EIGHT_PI,
    };
    let params = ReducedParams::new(
        s.non_negative("d", Some(0.0))?,
        sigma,
        s.f64_or("theta", 0.0)?,
        s.non_negative("s", Some(0.0))?,
    )?;
    let tol = match s.f64_opt("tol")? {
        Some(t) => Tolerance::new(t * 1e-2, t),
        None => INTEGRAL_TOL,
    };
    let mut d = with_params(Dataset::new("integrals", &["quantity", "value"]), s);
    for (name, kind) in [("I1", IntegralKind::I1), ("I2", IntegralKind::I2), ("I3", IntegralKind::I3), ("I4", IntegralKind::I4)] {
        d.scalar(name, reduced_integral_tol(kind, params, tol)?);
    }
    d.scalar("I2_minus_f_min", thermal_excess_tol(IntegralKind::I2, params, tol)?);
    d.scalar("I4_minus_n_fc", thermal_excess_tol(IntegralKind::I4, params, tol)?);
    Ok(d)
}

pub fn scattering(s: &Settings) -> Out {
    let pot = s.potential()?.ok_or_else(|| UsageError("--potential is required".into()))?;
    let r_max = s.positive("rmax", Some(MIN_RANGE_MULTIPLE * pot.range()))?;
    let res = solve_scattering(pot, r_max)?;
    let scalars: [(&str, Cell); 6] = [
        ("a", res.a.into()),
        ("v_hat_zero", res.v_hat_zero.into()),
        ("nu", res.nu.into()),
        ("nu_over_8pi", (res.nu / EIGHT_PI).into()),
        ("ode_residual", res.ode_residual.into()),
        ("admissible", res.potential.admissible_for_thermodynamics().into()),
    ];
    match s.raw("grid") {
        None => {
            let mut d = with_params(Dataset::new("scattering", &["quantity", "value"]), s);
            for (k, v) in scalars {
                d.scalar(k, v);
            }
            Ok(d)
        }
        Some(_) => {
            let n = s.usize_or("grid", 200)?;
            let mut d = with_params(Dataset::new("scattering", &["r", "w", "p", "vw"]), s);
            for (k, v) in scalars {
                d.param(k, match v {
                    Cell::Num(x) => crate::output::format_number(x),
                    Cell::Text(t) => t,
                });
            }
            let pmax = s.positive("pmax", Some(10.0 / pot.range()))?;
            let rs = linspace(0.0, r_max, n);
            let ps = linspace(0.0, pmax, n);
            for (r, p) in rs.into_iter().zip(ps) {
                let i = res.w_table.partition_point(|&(x, _)| x < r).min(res.w_table.len() - 1);
                let (ri, wi) = res.w_table[i];
                d.row(vec![ri.into(), wi.into(), p.into(), vw_kernel(&res, p).into()]);
            }
            Ok(d)
        }
    }
}

pub fn critical_temp(s: &Settings) -> Out {
    let nu = s.nu()?;
    let cp = critical::critical_point(nu)?;
    let coefficient = -(cp.k / EIGHT_PI) * n_fc().powf(-4.0 / 3.0);
    let h1 = 2.0 / 3.0 * coefficient;
    let mut d = with_params(Dataset::new("critical-temp", &["quantity", "value"]), s);
    d.scalar("k_c", cp.k);
    d.scalar("sigma_jump", cp.sigma_jump);
    d.scalar("density_coefficient", coefficient);
    d.scalar("h1", h1);
    if let (Some(rho), Some(a)) = (s.f64_opt("rho")?, s.f64_opt("a")?) {
        let p = thermo::GasPoint::new(0.0, rho, a, nu)?;
        d.scalar("T_c", t_fc(rho) * (1.0 + h1 * p.diluteness()));
        if p.outside_dilute_regime() {
            d.note("rho^(1/3) a > 0.1: outside the dilute regime");
        }
    }
    Ok(d)
}

pub fn maxwell(s: &Settings) -> Out {
    let nu = s.nu()?;
    let m = critical::maxwell_construction(nu)?;
    let mut d = with_params(Dataset::new("maxwell", &["quantity", "value"]), s);
    d.scalar("c", m.c);
    d.scalar("k_minus", m.k_minus);
    d.scalar("k_plus", m.k_plus);
    d.scalar("g_min", m.g_min);
    d.scalar("k_critical", m.k_critical);
    d.scalar("h2", critical::h2_from_tilt(nu, m.c));
    if let (Some(t), Some(a)) = (s.f64_opt("T")?, s.f64_opt("a")?) {
        if !(t > 0.0 && a > 0.0) {
            return Err(CliError::Usage("--T and --a must be positive".into()));
        }
        let shift = critical::shift_from_maxwell(&m, t, a);
        d.scalar("mu_c", shift.mu_c);
        if shift.outside_regime {
            d.note("sqrt(T) a > 0.1: outside the regime of the expansion");
        }
    }
    if nu > EIGHT_PI * (1.0 + 1e-12) {
        d.note("h2 for nu > 8pi extrapolates the nu = 8pi construction");
    }
    Ok(d)
}

/// (a, ν) from `--potential` when given, otherwise from `--a` and `--nu`.
fn interaction(s: &Settings) -> Result<(f64, f64), CliError> {
    match s.potential()? {
        Some(pot) => {
            if !pot.admissible_for_thermodynamics() {
                return Err(CliError::Usage(format!("potential {pot} has a sign-changing transform; use gaussian")));
            }
            let res = solve_scattering(pot, MIN_RANGE_MULTIPLE * pot.range())?;
            Ok((res.a, res.nu))
        }
        None => Ok((s.positive("a", None)?, s.nu()?)),
    }
}

pub fn free_energy(s: &Settings) -> Out {
    let (a, nu) = interaction(s)?;
    let t = s.non_negative("T", None)?;
    let rho = s.positive("rho", None)?;
    let model = GasModel::new(nu, a, ThermoOptions::default())?;
    let p = model.point(t, rho)?;
    let r = model.free_energy(&p)?;
    let mut d = with_params(Dataset::new("free-energy", &["quantity", "value"]), s);
    d.param("a_used", crate::output::format_number(a));
    d.param("nu_used", crate::output::format_number(nu));
    d.scalar("F", r.f);
    d.scalar("excess", r.excess);
    d.scalar("rho0", r.rho0);
    d.scalar("d_star", r.d_star);
    d.scalar("branch", r.branch.to_string());
    d.scalar("representation", r.representation.to_string());
    d.scalar("k", p.k().unwrap_or(f64::INFINITY));
    d.scalar("diluteness", p.diluteness());
    if let Ok(m) = free_energy_moderate(&p) {
        d.scalar("F_moderate", m.f);
        d.scalar("d_star_moderate", m.d_star);
    }
    if p.outside_dilute_regime() {
        d.note("rho^(1/3) a > 0.1: outside the dilute regime");
    }
    Ok(d)
}

pub fn phase_diagram(s: &Settings) -> Out {
    let (a, nu) = interaction(s)?;
    let t_default = s.f64_or("T", 1.0)?;
    let t_min = s.non_negative("t-min", Some(t_default))?;
    let t_max = s.non_negative("t-max", Some(t_min))?;
    let rho_min = s.positive("rho-min", None)?;
    let rho_max = s.positive("rho-max", None)?;
    let n = s.usize_or("grid", 21)?;
    let n_rho = s.usize_or("rho-grid", n)?;
    let n_t = if t_max > t_min { n } else { 1 };
    let model = GasModel::new(nu, a, ThermoOptions::default())?;
    let diagram = thermo::phase_diagram(&model, (t_min, t_max), (rho_min, rho_max), (n_t, n_rho), execution(s)?)?;
    let mut d = with_params(
        Dataset::new(
            "phase-diagram",
            &["T", "rho", "k", "F", "rho0", "d_star", "branch", "coexistence_band", "error"],
        ),
        s,
    );
    if let Some(m) = diagram.maxwell {
        d.param("k_minus", crate::output::format_number(m.k_minus));
        d.param("k_plus", crate::output::format_number(m.k_plus));
    }
    d.param("k_critical", crate::output::format_number(model.critical_point().k));
    for row in diagram.rows {
        let k = row.k.unwrap_or(f64::INFINITY);
        let cells = match row.outcome {
            Ok(r) => vec![
                row.t.into(),
                row.rho.into(),
                k.into(),
                r.f.into(),
                r.rho0.into(),
                r.d_star.into(),
                r.branch.to_string().into(),
                row.coexistence_band.into(),
                "".into(),
            ],
            Err(e) => vec![
                row.t.into(),
                row.rho.into(),
                k.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                f64::NAN.into(),
                "failed".into(),
                row.coexistence_band.into(),
                e.to_string().replace(',', ";").into(),
            ],
        };
        d.row(cells);
    }
    Ok(d)
}

fn momentum_rows<K: Kernel>(d: &mut Dataset, ctx: &SimplifiedContext<K>, ps: &[f64]) -> Result<(), CliError> {
    let prof = minimizer_profiles(ctx)?;
    for &p in ps {
        d.row(vec![
            p.into(),
            prof.gamma(p).into(),
            prof.alpha(p).into(),
            prof.beta(p).into(),
            dispersion_g(p, ctx)?.into(),
        ]);
    }
    Ok(())
}

pub fn momentum_dist(s: &Settings) -> Out {
    let rho0 = s.non_negative("rho0", None)?;
    let t0 = s.f64_or("t0", 0.0)?;
    let delta = s.non_negative("delta", Some(0.0))?;
    let t = s.positive("T", None)?;
    let n = s.usize_or("grid", 200)?;
    let pmax = s.positive("pmax", Some(10.0))?;
    let ps: Vec<f64> = (1..=n).map(|i| pmax * i as f64 / n as f64).collect();
    let mut d = with_params(Dataset::new("momentum-dist", &["p", "gamma", "alpha", "beta", "G"]), s);
    match s.potential()? {
        Some(pot) => {
            let res = solve_scattering(pot, MIN_RANGE_MULTIPLE * pot.range())?;
            let ctx = SimplifiedContext::new(rho0, t0, delta, t, res)?;
            momentum_rows(&mut d, &ctx, &ps)?;
        }
        None => {
            let ctx = SimplifiedContext::new(rho0, t0, delta, t, IdealKernel { a: s.positive("a", None)? })?;
            momentum_rows(&mut d, &ctx, &ps)?;
        }
    }
    Ok(d)
}

pub const FIGURE1_KS: [f64; 3] = [-1.35, -1.28, -1.20];

pub fn figure1(s: &Settings) -> Out {
    let nu = s.nu()?;
    let mut d = with_params(Dataset::new("figure1", &["k", "sigma", "f"]), s);
    for k in FIGURE1_KS {
        for i in 0..=600 {
            let sigma = i as f64 * 0.01;
            let f = critical::reduced_free_energy(critical::CriticalCoordinates::new(k, sigma, nu))?;
            d.row(vec![k.into(), sigma.into(), f.into()]);
        }
    }
    Ok(d)
}

pub fn figure2(s: &Settings) -> Out {
    let nu = s.nu()?;
    let m = critical::maxwell_construction(nu)?;
    let c = s.f64_or("c", m.c)?;
    let ks: Vec<f64> = (0..=1200).map(|i| -6.0 + i as f64 * 0.01).collect();
    let gs = critical::grand_canonical_samples(&ks, nu, c, execution(s)?)?;
    let mut d = with_params(Dataset::new("figure2", &["k", "g", "hull"]), s);
    d.param("c_used", crate::output::format_number(c));
    d.param("k_minus", crate::output::format_number(m.k_minus));
    d.param("k_plus", crate::output::format_number(m.k_plus));
    d.param("g_min", crate::output::format_number(m.g_min));
    if (c - m.c).abs() > 0.0 {
        d.note("hull is the flattened curve only at the Maxwell tilt");
    }
    for (k, g) in ks.into_iter().zip(gs) {
        d.row(vec![k.into(), g.into(), m.hull(k, g).into()]);
    }
    Ok(d)
}

pub fn lhy(s: &Settings) -> Out {
    let nu = s.nu()?;
    let g = thermo::lhy_coefficient(nu)?;
    let reference = thermo::lhy_constant();
    let mut d = with_params(Dataset::new("lhy", &["quantity", "value"]), s);
    d.scalar("g_nu", g);
    d.scalar("lhy_constant", reference);
    d.scalar("relative_difference", g / reference - 1.0);
    Ok(d)
}
