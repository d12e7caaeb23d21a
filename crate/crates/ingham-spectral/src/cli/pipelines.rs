use std::fmt::Write as _;
use std::fs;
use std::sync::Arc;

use super::{par_map, CliError, CliResult, Output, Params, Pipeline};
use crate::dunkl::{
    builtin_harmonic, component_plancherel, dunkl_project, dunkl_sharpness_witness, dunkl_spherical_mean, make_setting,
    phi_kappa, projection_samples, transform_components, uncertainty_audit_thm13, write_components_csv,
    DunklAuditOptions, DunklSetting, DunklWitnessOptions, HarmonicComponent, RootConfig,
};
use crate::error::Error;
use crate::ingham::{
    carleman_verdict_log, classify_theta, construct_box_product, envelope_power_norms, moment_report,
    transfer_via_paley_wiener, AuditReport, AuditRow, EnvelopeReport, SupportReport, ThetaSpec, AUDIT_M_MAX,
    DEFAULT_T_MAX,
};
use crate::numerics::profiles::{gaussian, poly_bump};
use crate::numerics::{
    eigen_residual, make_grid, OpKind, RadialGrid, SampledRadialFunction, SpectralSamples, WeightKind,
};
use crate::specfun::{bessel_psi, JacobiParams, JacobiPhi};
use crate::symmetric_space::{
    project, sharpness_witness, space_from_multiplicities, spherical_mean_profile, spherical_transform,
    uncertainty_audit_thm11, AuditOptions, RankOneSpace, WitnessOptions,
};
use crate::transforms::{hankel_forward, inverse, plancherel_check, spectral_density, PairKind};

pub(super) fn run(pipeline: Pipeline, p: &Params, workers: usize, out: &mut Output) -> CliResult<String> {
    match pipeline {
        Pipeline::Roundtrip => roundtrip(p, out),
        Pipeline::Plancherel => plancherel(p, out),
        Pipeline::Eigencheck => eigencheck(p, workers, out),
        Pipeline::Project => projections(p, workers, out),
        Pipeline::SphericalMean => spherical_mean(p, out),
        Pipeline::InghamConstruct => ingham_construct(p, out),
        Pipeline::PwTransfer => pw_transfer(p, out),
        Pipeline::Carleman => carleman(p, out),
        Pipeline::AuditThm11 => audit_thm11(p, out),
        Pipeline::AuditThm13 => audit_thm13(p, out),
        Pipeline::SharpnessWitness => witness(p, out),
    }
}

enum Pair {
    Hankel(f64),
    Jacobi(JacobiParams),
    Dunkl(DunklSetting),
}

fn pair(p: &Params) -> CliResult<Pair> {
    let name = match p.pair.as_deref() {
        Some(n) => n,
        None if p.n.is_some() || p.kappa.is_some() => "dunkl",
        None if p.alpha.is_some() && p.beta.is_none() && p.m_gamma.is_none() => "hankel",
        None => "jacobi",
    };
    match name {
        "hankel" => Ok(Pair::Hankel(p.alpha.unwrap_or(0.0))),
        "jacobi" => {
            if p.m_gamma.is_some() || p.m_2gamma.is_some() {
                Ok(Pair::Jacobi(*space(p)?.params()))
            } else {
                Ok(Pair::Jacobi(JacobiParams::new(p.alpha.unwrap_or(0.5), p.beta.unwrap_or(-0.5))?))
            }
        }
        "dunkl" => Ok(Pair::Dunkl(setting(p)?)),
        other => Err(CliError::Config(format!("unknown pair '{other}', expected hankel, jacobi or dunkl"))),
    }
}

fn pair_kind(pair: &Pair, pipeline: &str) -> CliResult<PairKind> {
    match pair {
        Pair::Hankel(a) => Ok(PairKind::Hankel { alpha: *a }),
        Pair::Jacobi(jp) => Ok(PairKind::Jacobi(*jp)),
        Pair::Dunkl(_) => Err(CliError::Config(format!("{pipeline} takes --pair hankel or jacobi"))),
    }
}

fn space(p: &Params) -> CliResult<RankOneSpace> {
    Ok(space_from_multiplicities(p.m_gamma.unwrap_or(2), p.m_2gamma.unwrap_or(0))?)
}

fn setting(p: &Params) -> CliResult<DunklSetting> {
    let n = p.n.unwrap_or(2);
    let root = match &p.roots {
        Some(r) => r.parse::<RootConfig>()?,
        None => RootConfig::Z2Power(n),
    };
    let kappa = p.kappa.clone().unwrap_or_else(|| vec![0.5]);
    Ok(make_setting(n, root, &kappa)?)
}

fn uses_dunkl(p: &Params) -> bool {
    p.pair.as_deref() == Some("dunkl") || p.n.is_some() || p.kappa.is_some() || p.roots.is_some()
}

fn theta(p: &Params, default: &str) -> CliResult<ThetaSpec> {
    let base = match &p.theta_table {
        Some(path) => ThetaSpec::parse_table(&fs::read_to_string(path)?).map_err(|e| match e {
            Error::Parse { .. } => CliError::Module(e),
            other => CliError::Config(format!("{}: {other}", path.display())),
        })?,
        None => {
            let name = p.theta.as_deref().unwrap_or(default);
            ThetaSpec::builtin(name).map_err(|e| CliError::Config(e.to_string()))?
        }
    };
    Ok(match p.theta_scale {
        Some(c) => base.scaled(c)?,
        None => base,
    })
}

fn vanish_radius(p: &Params) -> f64 {
    p.vanish_radius.unwrap_or(1.0)
}

/// `r,value` rows; a header line is allowed.
fn read_profile_csv(text: &str) -> CliResult<SampledRadialFunction> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Config(e.to_string()))?;
        let line = rec.position().map_or(0, |q| q.line() as usize);
        if rec.len() != 2 {
            return Err(Error::Parse { line, message: format!("expected r,value, found {} columns", rec.len()) }.into());
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(r), Ok(v)) => {
                nodes.push(r);
                values.push(v);
            }
            _ if i == 0 => {}
            _ => {
                return Err(
                    Error::Parse { line, message: format!("not a number pair: '{}', '{}'", &rec[0], &rec[1]) }.into()
                )
            }
        }
    }
    let grid = RadialGrid::from_nodes(nodes).map_err(|e| CliError::Config(format!("profile nodes: {e}")))?;
    Ok(SampledRadialFunction::new(grid.into_shared(), values)?)
}

/// The input profile: CSV, or bump on [l, l+1], or e^{-r²/2}.
fn input_profile(p: &Params, grid: &Arc<RadialGrid>) -> CliResult<SampledRadialFunction> {
    if let Some(path) = &p.profile_csv {
        return read_profile_csv(&fs::read_to_string(path)?);
    }
    let l = vanish_radius(p);
    match p.profile.as_deref().unwrap_or("bump") {
        "bump" => Ok(SampledRadialFunction::from_fn(Arc::clone(grid), |r| poly_bump(r, l, l + 1.0, 12))?
            .with_support(l, l + 1.0)?),
        "gaussian" => Ok(SampledRadialFunction::from_fn(Arc::clone(grid), gaussian)?),
        other => Err(CliError::Config(format!("unknown profile '{other}', expected bump or gaussian"))),
    }
}

fn bump_grid(p: &Params) -> CliResult<Arc<RadialGrid>> {
    let hi = p.r_max.unwrap_or(vanish_radius(p) + 2.0);
    Ok(RadialGrid::uniform_panels(0.0, hi, 48, 16)?.into_shared())
}

fn lambda_grid(p: &Params, max: f64, panels: usize) -> CliResult<Arc<RadialGrid>> {
    Ok(make_grid(p.lambda_max.unwrap_or(max), p.panels.unwrap_or(panels), 16)?.into_shared())
}

/// Gaussian-type components e^{-r²/2} S and r e^{-r²/2} S' of degrees 0 and 1.
fn gaussian_components(s: &DunklSetting, grid: &Arc<RadialGrid>) -> CliResult<Vec<HarmonicComponent>> {
    let g0 = SampledRadialFunction::from_fn(Arc::clone(grid), gaussian)?;
    let g1 = SampledRadialFunction::from_fn(Arc::clone(grid), |r| r * gaussian(r))?;
    Ok(vec![
        HarmonicComponent::new(builtin_harmonic(s, "1")?, g0),
        HarmonicComponent::new(builtin_harmonic(s, "x1")?, g1),
    ])
}

/// Bump components of degrees 0 and 1, both vanishing on [0, l).
fn bump_components(s: &DunklSetting, p: &Params) -> CliResult<Vec<HarmonicComponent>> {
    let f = input_profile(p, &bump_grid(p)?)?;
    Ok(vec![
        HarmonicComponent::new(builtin_harmonic(s, "1")?, f.clone()),
        HarmonicComponent::new(builtin_harmonic(s, "x1")?, f),
    ])
}

fn dunkl_points(s: &DunklSetting, flat: &[f64]) -> CliResult<Vec<Vec<f64>>> {
    if flat.is_empty() || flat.len() % s.n() != 0 {
        return Err(CliError::Config(format!("--x needs coordinates in groups of n = {}", s.n())));
    }
    Ok(flat.chunks(s.n()).map(<[f64]>::to_vec).collect())
}

fn e(v: f64) -> String {
    format!("{v:.6e}")
}

fn write_spectral(out: &mut Output, name: &str, f: &SpectralSamples) -> CliResult<()> {
    out.csv(name, |w| f.write_csv(w))
}

fn write_profile(out: &mut Output, name: &str, f: &SampledRadialFunction) -> CliResult<()> {
    out.csv(name, |w| f.write_csv(w))
}

fn roundtrip(p: &Params, out: &mut Output) -> CliResult<String> {
    let kind = pair_kind(&pair(p)?, "roundtrip")?;
    let f = input_profile(p, &bump_grid(p)?)?;
    let ls = lambda_grid(p, 64.0, 32)?;
    let rep = plancherel_check(&f, kind, &ls)?;
    let back = inverse(&rep.forward, kind, f.grid())?;
    write_spectral(out, "forward", &rep.forward)?;
    out.csv("roundtrip", |w| {
        writeln!(w, "r,f,roundtrip")?;
        for ((r, a), b) in f.nodes().iter().zip(f.values()).zip(back.values()) {
            writeln!(w, "{r:.17e},{a:.17e},{b:.17e}")?;
        }
        Ok(())
    })?;
    let mut s = format!("pair: {kind:?}\n");
    writeln!(s, "roundtrip relative L2 error: {}", e(rep.roundtrip_l2_rel_error)).unwrap();
    writeln!(s, "plancherel radial: {}\nplancherel spectral: {}", e(rep.plancherel_lhs), e(rep.plancherel_rhs))
        .unwrap();
    writeln!(s, "plancherel relative error: {}", e(rep.plancherel_rel_error())).unwrap();
    for w in &rep.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    Ok(s)
}

fn plancherel(p: &Params, out: &mut Output) -> CliResult<String> {
    match pair(p)? {
        Pair::Dunkl(s) => {
            let grid = RadialGrid::uniform_panels(0.0, p.r_max.unwrap_or(12.0), 48, 16)?.into_shared();
            let comps = gaussian_components(&s, &grid)?;
            let tc = transform_components(&s, &comps, &lambda_grid(p, 12.0, 48)?)?;
            let pl = component_plancherel(&s, &tc)?;
            out.csv("components", |w| write_components_csv(&comps, w))?;
            out.csv("spectra", |w| {
                writeln!(w, "m,harmonic_id,lambda,value")?;
                for c in &tc {
                    for (l, v) in c.transform.lambdas().iter().zip(c.transform.values()) {
                        writeln!(w, "{},{},{l:.17e},{v:.17e}", c.component.degree(), c.component.harmonic_id())?;
                    }
                }
                Ok(())
            })?;
            let fixed = tc
                .iter()
                .flat_map(|c| {
                    c.transform.lambdas().iter().zip(c.transform.values()).map(|(l, v)| (v - gaussian(*l)).abs())
                })
                .fold(0.0, f64::max);
            let mut r = format!("dunkl setting: n = {}, {}, kappa = {:?}\n", s.n(), s.root(), s.kappa());
            writeln!(r, "lambda_kappa: {}", s.lambda_kappa()).unwrap();
            writeln!(r, "gaussian fixed point max error: {}", e(fixed)).unwrap();
            writeln!(
                r,
                "componentwise plancherel radial: {}\ncomponentwise plancherel spectral: {}",
                e(pl.radial),
                e(pl.spectral)
            )
            .unwrap();
            writeln!(r, "plancherel relative error: {}", e(pl.rel_error())).unwrap();
            Ok(r)
        }
        other => {
            let kind = pair_kind(&other, "plancherel")?;
            let f = input_profile(p, &bump_grid(p)?)?;
            let rep = plancherel_check(&f, kind, &lambda_grid(p, 64.0, 32)?)?;
            let weight = rep.forward.weight_kind();
            out.csv("density", |w| {
                writeln!(w, "lambda,value,density,cumulative")?;
                let mut acc = 0.0;
                for ((l, wt), v) in
                    rep.forward.lambdas().iter().zip(rep.forward.grid().weights()).zip(rep.forward.values())
                {
                    let d = spectral_density(weight, *l);
                    acc += wt * v * v * d;
                    writeln!(w, "{l:.17e},{v:.17e},{d:.17e},{acc:.17e}")?;
                }
                Ok(())
            })?;
            let mut r = format!("pair: {kind:?}\n");
            writeln!(r, "plancherel radial: {}\nplancherel spectral: {}", e(rep.plancherel_lhs), e(rep.plancherel_rhs))
                .unwrap();
            writeln!(r, "plancherel relative error: {}", e(rep.plancherel_rel_error())).unwrap();
            Ok(r)
        }
    }
}

fn eigencheck(p: &Params, workers: usize, out: &mut Output) -> CliResult<String> {
    let pr = pair(p)?;
    let lambdas = p.lambdas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0, 4.0, 8.0]);
    let grid = RadialGrid::trapezoid(0.0, p.r_max.unwrap_or(8.0), 1601)?.into_shared();
    let rows = par_map(workers, &lambdas, |&l| -> CliResult<(f64, f64, f64)> {
        let (f, op, ev) = match &pr {
            Pair::Jacobi(jp) => {
                let phi = JacobiPhi::new(jp);
                let f = SampledRadialFunction::from_fn(Arc::clone(&grid), |r| phi.eval(l, r))?;
                (f, OpKind::Jacobi(*jp), -(l * l + jp.rho() * jp.rho()))
            }
            Pair::Hankel(a) => {
                let f =
                    SampledRadialFunction::from_fn(Arc::clone(&grid), |r| bessel_psi(*a, l * r).unwrap_or(f64::NAN))?;
                (f, OpKind::Bessel { alpha: *a, a: 0.0 }, -l * l)
            }
            Pair::Dunkl(s) => {
                let f = SampledRadialFunction::from_fn(Arc::clone(&grid), |r| phi_kappa(s, l, r).unwrap_or(f64::NAN))?;
                (f, OpKind::Bessel { alpha: s.lambda_kappa(), a: 0.0 }, -l * l)
            }
        };
        Ok((l, ev, eigen_residual(&f, op, ev)?.residual))
    });
    let rows = rows.into_iter().collect::<CliResult<Vec<_>>>()?;
    out.csv("eigencheck", |w| {
        writeln!(w, "lambda,eigenvalue,residual")?;
        for (l, ev, res) in &rows {
            writeln!(w, "{l:.17e},{ev:.17e},{res:.17e}")?;
        }
        Ok(())
    })?;
    let worst = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let mut s = String::new();
    for (l, ev, res) in &rows {
        writeln!(s, "lambda {l}: eigenvalue {}, residual {}", e(*ev), e(*res)).unwrap();
    }
    writeln!(s, "max residual: {}", e(worst)).unwrap();
    Ok(s)
}

fn projections(p: &Params, workers: usize, out: &mut Output) -> CliResult<String> {
    let lambdas = p.lambdas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let rg = RadialGrid::trapezoid(0.0, p.r_max.unwrap_or(8.0), 1601)?.into_shared();
    let ls = lambda_grid(p, 32.0, 16)?;
    let mut s = String::new();
    if uses_dunkl(p) {
        let st = setting(p)?;
        let tc = transform_components(&st, &bump_components(&st, p)?, &ls)?;
        let fields = par_map(workers, &lambdas, |&l| dunkl_project(&st, &tc, l, &rg));
        let fields = fields.into_iter().collect::<Result<Vec<_>, _>>()?;
        out.csv("projection", |w| {
            writeln!(w, "lambda,m,harmonic_id,r,value")?;
            for f in &fields {
                for c in &f.components {
                    for (r, v) in c.profile.nodes().iter().zip(c.profile.values()) {
                        writeln!(w, "{:.17e},{},{},{r:.17e},{v:.17e}", f.lambda, c.degree, c.harmonic_id)?;
                    }
                }
            }
            Ok(())
        })?;
        for f in &fields {
            for c in &f.components {
                writeln!(
                    s,
                    "lambda {} component {} (m = {}): b_m {}, residual {}",
                    f.lambda,
                    c.harmonic_id,
                    c.degree,
                    e(c.coefficient),
                    e(c.residual)
                )
                .unwrap();
            }
        }
    } else {
        let sp = space(p)?;
        let ft = spherical_transform(&sp, &input_profile(p, &bump_grid(p)?)?, &ls)?;
        let fields = par_map(workers, &lambdas, |&l| project(&sp, &ft, l, &rg));
        let fields = fields.into_iter().collect::<Result<Vec<_>, _>>()?;
        out.csv("projection", |w| {
            writeln!(w, "lambda,r,value")?;
            for f in &fields {
                for (r, v) in f.profile.nodes().iter().zip(f.profile.values()) {
                    writeln!(w, "{:.17e},{r:.17e},{v:.17e}", f.lambda)?;
                }
            }
            Ok(())
        })?;
        for f in &fields {
            writeln!(s, "lambda {}: eigenvalue {}, residual {}", f.lambda, e(f.eigenvalue), e(f.residual)).unwrap();
        }
    }
    Ok(s)
}

/// max |a - b| / max |b| over λ.
fn rel_sup(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (num, den) = pairs.fold((0.0f64, 0.0f64), |(n, d), (a, b)| (n.max((a - b).abs()), d.max(b.abs())));
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn spherical_mean(p: &Params, out: &mut Output) -> CliResult<String> {
    let mut s = String::new();
    let check = make_grid(8.0, 16, 8)?.into_shared();
    if uses_dunkl(p) {
        let st = setting(p)?;
        let mut x0 = vec![0.0; st.n()];
        x0[0] = 0.5;
        let points = dunkl_points(&st, p.x.as_deref().unwrap_or(&x0))?;
        let grid = RadialGrid::uniform_panels(0.0, 12.0, 48, 16)?.into_shared();
        let tc = transform_components(&st, &gaussian_components(&st, &grid)?, &lambda_grid(p, 12.0, 48)?)?;
        let rg = RadialGrid::uniform_panels(0.0, p.r_max.unwrap_or(14.0), 56, 16)?.into_shared();
        let mut means = Vec::new();
        for x in &points {
            let m = dunkl_spherical_mean(&st, &tc, x, &rg)?;
            let back = hankel_forward(&m.profile, st.lambda_kappa(), &check)?;
            let direct = projection_samples(&st, &tc, x, &check)?;
            let err = rel_sup(back.values().iter().copied().zip(direct.values().iter().copied()));
            writeln!(s, "x = {x:?}: hankel(F_x) vs projection trace relative error {}", e(err)).unwrap();
            for w in &m.warnings {
                writeln!(s, "warning: {w}").unwrap();
            }
            means.push(m);
        }
        out.csv("mean", |w| {
            writeln!(w, "point,r,value")?;
            for (k, m) in means.iter().enumerate() {
                for (r, v) in m.profile.nodes().iter().zip(m.profile.values()) {
                    writeln!(w, "{k},{r:.17e},{v:.17e}")?;
                }
            }
            Ok(())
        })?;
    } else {
        let sp = space(p)?;
        let f = input_profile(p, &bump_grid(p)?)?;
        let ft = spherical_transform(&sp, &f, &lambda_grid(p, 64.0, 32)?)?;
        let xs = p.x.clone().unwrap_or_else(|| vec![0.5]);
        let mut means = Vec::new();
        for &x in &xs {
            let r_hi = p.r_max.unwrap_or(x + vanish_radius(p) + 2.0);
            let rg = RadialGrid::uniform_panels(0.0, r_hi, 48, 16)?.into_shared();
            let m = spherical_mean_profile(&sp, &ft, x, &rg)?;
            let back = spherical_transform(&sp, &m.profile, &check)?;
            let phi = JacobiPhi::new(sp.params());
            let direct = spherical_transform(&sp, &f, &check)?;
            let expect = direct.lambdas().iter().zip(direct.values()).map(|(l, v)| v * phi.eval(*l, x));
            let err = rel_sup(back.values().iter().copied().zip(expect));
            writeln!(s, "x_r = {x}: spherical transform of F_x vs f~ Phi_lambda(x) relative error {}", e(err)).unwrap();
            for w in &m.warnings {
                writeln!(s, "warning: {w}").unwrap();
            }
            means.push(m);
        }
        out.csv("mean", |w| {
            writeln!(w, "x_r,r,value")?;
            for m in &means {
                for (r, v) in m.profile.nodes().iter().zip(m.profile.values()) {
                    writeln!(w, "{:.17e},{r:.17e},{v:.17e}", m.x_r)?;
                }
            }
            Ok(())
        })?;
    }
    Ok(s)
}

fn write_envelope(out: &mut Output, env: &EnvelopeReport) -> CliResult<()> {
    out.csv("envelope", |w| {
        writeln!(w, "xi,value_abs,envelope")?;
        for r in &env.rows {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", r.xi, r.value_abs, r.envelope)?;
        }
        Ok(())
    })
}

fn write_tail(out: &mut Output, support: &SupportReport) -> CliResult<()> {
    out.csv("tail", |w| {
        writeln!(w, "r,tail_fraction")?;
        for (r, t) in &support.tail_curve {
            writeln!(w, "{r:.17e},{t:.17e}")?;
        }
        Ok(())
    })
}

fn write_rows(out: &mut Output, rows: &[AuditRow]) -> CliResult<()> {
    out.csv("rows", |w| {
        writeln!(w, "x,lambda,d,constant")?;
        for r in rows {
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e}", r.x, r.lambda, r.d, r.constant)?;
        }
        Ok(())
    })
}

fn xis(p: &Params) -> Vec<f64> {
    (1..=p.xi_max.unwrap_or(1000.0).floor() as usize).map(|i| i as f64).collect()
}

fn ingham_construct(p: &Params, out: &mut Output) -> CliResult<String> {
    let th = theta(p, "inv-sqrt")?;
    let class = classify_theta(&th, DEFAULT_T_MAX)?;
    let c = construct_box_product(&th, p.n_boxes.unwrap_or(64), p.support_budget.unwrap_or(1.0))?;
    let env = c.boxes.envelope(&th, &xis(p));
    out.csv("boxes", |w| {
        writeln!(w, "k,length")?;
        for (k, a) in c.boxes.lengths().iter().enumerate() {
            writeln!(w, "{},{a:.17e}", k + 1)?;
        }
        Ok(())
    })?;
    write_profile(out, "profile", &c.profile)?;
    write_envelope(out, &env)?;
    let mut s =
        format!("theta: {}\nclassification: {} (p = {:.4}, q = {:.4})\n", th.name(), class.verdict, class.p, class.q);
    writeln!(
        s,
        "boxes: {}\ntotal support: {}\nmeasured support: {}",
        c.boxes.len(),
        e(c.boxes.total_support()),
        e(c.measured_support)
    )
    .unwrap();
    writeln!(s, "envelope constant C: {}", e(env.constant)).unwrap();
    Ok(s)
}

fn pw_transfer(p: &Params, out: &mut Output) -> CliResult<String> {
    let th = theta(p, "inv-sqrt")?;
    let alpha = match pair(p)? {
        Pair::Dunkl(s) => s.lambda_kappa(),
        _ => p.alpha.unwrap_or(0.5),
    };
    let boxes = construct_box_product(&th, p.n_boxes.unwrap_or(64), p.support_budget.unwrap_or(1.0))?.boxes;
    let s_tot = boxes.total_support();
    let ls = lambda_grid(p, 1000.0, 400)?;
    let fhat = boxes.spectral_samples(&ls, WeightKind::HankelMeasure { alpha })?;
    let rg = RadialGrid::uniform_panels(0.0, 3.0 * s_tot, 60, 16)?.into_shared();
    let t = transfer_via_paley_wiener(&fhat, alpha, &rg)?;
    let check = make_grid(20.0, 10, 8)?.into_shared();
    let fwd = hankel_forward(&t.profile, alpha, &check)?;
    let err = fwd.lambdas().iter().zip(fwd.values()).map(|(l, v)| (v - boxes.fourier(*l)).abs()).fold(0.0, f64::max);
    write_profile(out, "profile", &t.profile)?;
    write_tail(out, &t.support)?;
    let mut s = format!("theta: {}\nhankel order: {alpha}\nsupport radius S: {}\n", th.name(), e(s_tot));
    writeln!(s, "tail mass beyond 1.5 S: {}", e(t.support.tail_beyond(1.5 * s_tot))).unwrap();
    writeln!(s, "r99.99: {}", e(t.support.r99_99)).unwrap();
    writeln!(s, "forward check max error on [0, 20]: {}", e(err)).unwrap();
    Ok(s)
}

fn carleman(p: &Params, out: &mut Output) -> CliResult<String> {
    let th = theta(p, "inv-log")?;
    let (weight, shift) = match pair(p)? {
        Pair::Hankel(a) => (WeightKind::HankelMeasure { alpha: a }, p.shift.unwrap_or(1.0)),
        Pair::Dunkl(s) => (WeightKind::HankelMeasure { alpha: s.lambda_kappa() }, p.shift.unwrap_or(1.0)),
        Pair::Jacobi(jp) => {
            (WeightKind::JacobiPlancherel { alpha: jp.alpha(), beta: jp.beta() }, p.shift.unwrap_or(jp.rho()))
        }
    };
    let m_max = p.m_max.unwrap_or(AUDIT_M_MAX);
    let (window, logs) = envelope_power_norms(&th, 1.0, weight, shift, m_max, 1)?;
    let car = carleman_verdict_log(&logs);
    out.csv("power", |w| {
        writeln!(w, "m,log_norm,term,partial_sum")?;
        for (i, ln) in logs.iter().enumerate() {
            writeln!(w, "{},{ln:.17e},{:.17e},{:.17e}", i + 1, car.terms[i], car.partial_sums[i])?;
        }
        Ok(())
    })?;

    let lmax = p.lambda_max.unwrap_or(200.0);
    let panels = p.panels.unwrap_or(200);
    let exp_profile = |n: usize| -> CliResult<SpectralSamples> {
        Ok(SpectralSamples::from_fn(make_grid(lmax, n, 16)?.into_shared(), weight, |l| (-l).exp())?)
    };
    let moments = moment_report(&exp_profile(panels)?, weight, 15, shift)?;
    let fine = moment_report(&exp_profile(2 * panels)?, weight, 15, shift)?;
    let agreement =
        moments.log_moments.iter().zip(&fine.log_moments).map(|(a, b)| ((a - b).exp_m1()).abs()).fold(0.0, f64::max);
    out.csv("moments", |w| {
        writeln!(w, "m,log_moment,log_bound,holds")?;
        for b in &moments.bounds {
            writeln!(w, "{},{:.17e},{:.17e},{}", b.m, b.log_moment, b.log_bound, b.holds)?;
        }
        Ok(())
    })?;

    let mut s = format!("theta: {}\nweight: {weight:?}\nshift: {shift}\n", th.name());
    match window {
        Some(hi) => writeln!(s, "envelope lambda window: [0, {}]", e(hi)).unwrap(),
        None => writeln!(s, "envelope integrals diverge on the tested window").unwrap(),
    }
    writeln!(
        s,
        "carleman: {} after {} terms, partial sum {}, tail exponent {:.4}, shift robust {}",
        car.verdict,
        car.terms.len(),
        e(car.total()),
        car.tail_exponent,
        car.shift_robust
    )
    .unwrap();
    let holds = moments.bounds.iter().all(|b| b.holds);
    writeln!(s, "moment bound M(2m) <= C_j ||L^(m+j) f|| (j = {}): holds for all m <= 15: {holds}", moments.j).unwrap();
    writeln!(s, "moment agreement across resolutions: {}", e(agreement)).unwrap();
    writeln!(s, "moment carleman verdict: {}", moments.verdict()).unwrap();
    Ok(s)
}

fn write_audit(out: &mut Output, r: &AuditReport) -> CliResult<String> {
    out.csv("lambda", |w| r.write_lambda_csv(w))?;
    out.csv("power", |w| r.write_power_csv(w))?;
    Ok(r.summary())
}

fn audit_thm11(p: &Params, out: &mut Output) -> CliResult<String> {
    let sp = space(p)?;
    let th = theta(p, "inv-log")?;
    let f = input_profile(p, &bump_grid(p)?)?;
    let opts = AuditOptions { x_points: p.x.clone(), m_max: p.m_max.unwrap_or(AUDIT_M_MAX), shift: p.shift };
    let r = uncertainty_audit_thm11(&sp, &f, vanish_radius(p), &th, &lambda_grid(p, 32.0, 16)?, &opts)?;
    let head = format!("space: m_gamma = {}, m_2gamma = {}, rho = {}\n", sp.m_gamma(), sp.m_2gamma(), sp.rho());
    Ok(head + &write_audit(out, &r)?)
}

fn audit_thm13(p: &Params, out: &mut Output) -> CliResult<String> {
    let st = setting(p)?;
    let th = theta(p, "inv-log")?;
    let comps = bump_components(&st, p)?;
    let x_points = p.x.as_deref().map(|x| dunkl_points(&st, x)).transpose()?;
    let opts = DunklAuditOptions { x_points, m_max: p.m_max.unwrap_or(AUDIT_M_MAX), shift: p.shift.unwrap_or(1.0) };
    let r = uncertainty_audit_thm13(&st, &comps, vanish_radius(p), &th, &lambda_grid(p, 32.0, 16)?, &opts)?;
    out.csv("components", |w| write_components_csv(&comps, w))?;
    let head = format!(
        "dunkl setting: n = {}, {}, kappa = {:?}, lambda_kappa = {}\n",
        st.n(),
        st.root(),
        st.kappa(),
        st.lambda_kappa()
    );
    Ok(head + &write_audit(out, &r)?)
}

fn witness(p: &Params, out: &mut Output) -> CliResult<String> {
    let th = theta(p, "inv-sqrt")?;
    let n_boxes = p.n_boxes.unwrap_or(64);
    let budget = p.support_budget.unwrap_or(1.0);
    let xi_max = p.xi_max.unwrap_or(1000.0);
    let (head, boxes_support, envelope, profile, support, rows, c_prime) = if uses_dunkl(p) {
        let st = setting(p)?;
        let d = DunklWitnessOptions::default();
        let opts = DunklWitnessOptions {
            n_boxes,
            support_budget: budget,
            lambda_max: p.lambda_max.unwrap_or(d.lambda_max),
            panels: p.panels.unwrap_or(d.panels),
            xi_max,
            x_points: p.x.clone().unwrap_or(d.x_points),
        };
        let w = dunkl_sharpness_witness(&st, &th, &opts)?;
        let head = format!("dunkl setting: n = {}, {}, lambda_kappa = {}\n", st.n(), st.root(), st.lambda_kappa());
        (head, w.boxes.total_support(), w.envelope, w.profile, w.support, w.rows, w.projection_constant)
    } else {
        let sp = space(p)?;
        let d = WitnessOptions::default();
        let opts = WitnessOptions {
            n_boxes,
            support_budget: budget,
            lambda_max: p.lambda_max.unwrap_or(d.lambda_max),
            panels: p.panels.unwrap_or(d.panels),
            xi_max,
            x_points: p.x.clone().unwrap_or(d.x_points),
        };
        let w = sharpness_witness(&sp, &th, &opts)?;
        let head = format!("space: m_gamma = {}, m_2gamma = {}\n", sp.m_gamma(), sp.m_2gamma());
        (head, w.boxes.total_support(), w.envelope, w.profile, w.support, w.rows, w.projection_constant)
    };
    write_envelope(out, &envelope)?;
    write_profile(out, "profile", &profile)?;
    write_tail(out, &support)?;
    write_rows(out, &rows)?;
    let mut s = head;
    writeln!(s, "theta: {}\nsupport radius S: {}", th.name(), e(boxes_support)).unwrap();
    writeln!(s, "envelope constant C: {}", e(envelope.constant)).unwrap();
    writeln!(s, "projection constant C': {}", e(c_prime)).unwrap();
    writeln!(s, "tail mass beyond 1.5 S: {}", e(support.tail_beyond(1.5 * boxes_support))).unwrap();
    Ok(s)
}
