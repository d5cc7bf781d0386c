//! One handler per subcommand.

use gdo_core::isos::{
    build_isos_rep, check_coherent_intertwining, check_isos_squeezed_maps_to_oscillator, check_isos_structure,
    isos_coherent_eigen_residual, isos_coherent_state, isos_squeezed_eigen_residual, isos_squeezed_vacuum,
};
use gdo_core::multiphoton::{
    build_sector_realization, build_two_mode_realization, check_broken_vacuum, check_two_mode_conservation,
    sector_exact_q_realization, CouplingSpec,
};
use gdo_core::numerics::normalize;
use gdo_core::phase::{
    check_classical_limit, check_phase_decomposition, check_truncated_commutator, classical_limit_sweep,
    pb_ladder_ops, pb_phase_operator, phase_shift_check, Schedule,
};
use gdo_core::repspace::{
    boundary_defect, build_cyclic_rep, build_cyclic_rep_theta0, build_fock_rep, check_central_elements,
    check_cyclic_admissibility, check_gdo_relations,
};
use gdo_core::states::{
    check_bogoliubov_failure, check_displacement_covariance, coherent_eigen_residual, coherent_state_on,
    displaced_squeezed_state, displacement_operator, squeeze_operator, squeezed_eigen_residual, squeezed_vacuum_on,
    verify_identity_tt, verify_identity_tttt, StateOptions,
};
use gdo_core::structure::root_of_unity;
use gdo_core::{ArgKind, CheckEntry, CheckReport, Complex64, Family, RepKind, Representation, StructureFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Params, StructureArg};
use crate::render::{Cell, Output, Table};
use crate::CliError;

pub const DEFAULT_MAX_DIM: usize = 4096;

pub struct Ctx {
    pub seed: u64,
    pub cap: usize,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn req<T: Clone>(v: &Option<T>, flag: &str, cmd: &str) -> Result<T, CliError> {
    v.clone().ok_or_else(|| usage(format!("{cmd} needs --{flag}")))
}

fn finite(v: f64, flag: &str) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(usage(format!("--{flag} must be finite")))
    }
}

fn finite_c(v: Complex64, flag: &str) -> Result<Complex64, CliError> {
    finite(v.re, flag)?;
    finite(v.im, flag)?;
    Ok(v)
}

fn check_dim(dim: usize, ctx: &Ctx) -> Result<usize, CliError> {
    if dim > ctx.cap {
        Err(usage(format!("dimension {dim} exceeds the cap {} (set GDO_MAX_DIM to raise it)", ctx.cap)))
    } else {
        Ok(dim)
    }
}

fn single_s(p: &Params) -> Result<Option<usize>, CliError> {
    match &p.s {
        None => Ok(None),
        Some(list) if list.0.len() == 1 => Ok(Some(list.0[0])),
        Some(_) => Err(usage("--S takes a single value for this command")),
    }
}

fn alpha(p: &Params) -> Result<Option<Complex64>, CliError> {
    p.alpha.map(|a| finite_c(a.0, "alpha")).transpose()
}

fn z(p: &Params) -> Result<Option<Complex64>, CliError> {
    p.z.map(|a| finite_c(a.0, "z")).transpose()
}

fn eta_for(p: &Params, s: usize) -> Result<f64, CliError> {
    match p.eta {
        Some(e) => finite(e, "eta"),
        None => Ok(1.0 / (s as f64 + 1.0)),
    }
}

fn cpair(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| usage(format!("serialization failed: {e}")))
}

fn arg_kind(p: &Params) -> Result<ArgKind, CliError> {
    match p.arg_kind.as_deref() {
        None => Ok(ArgKind::Gdo),
        Some(s) => serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| usage(format!("--arg-kind must be gdo or q_gdo, got {s:?}"))),
    }
}

/// `q` from `--q`, or the primitive `(S+1)`-th root of unity when only
/// `--S` is given.
fn resolve_q(p: &Params, s: Option<usize>) -> Result<Option<Complex64>, CliError> {
    match (p.q, s) {
        (Some(q), _) => Ok(Some(finite_c(q.0, "q")?)),
        (None, Some(s)) => Ok(Some(root_of_unity(s))),
        (None, None) => Ok(None),
    }
}

fn structure_named(name: &str, p: &Params, s: Option<usize>) -> Result<StructureFunction, CliError> {
    let family: Family = serde_json::from_value(Value::String(name.to_string()))
        .map_err(|_| usage(format!("unknown structure family {name:?}")))?;
    let q = || resolve_q(p, s)?.ok_or_else(|| usage(format!("{name} needs --q (or --S for a root of unity)")));
    let f = match family {
        Family::Harmonic => StructureFunction::harmonic(),
        Family::Isos => StructureFunction::isos(),
        Family::QSymmetric => StructureFunction::q_symmetric(q()?)?,
        Family::QAbs => StructureFunction::q_abs(q()?)?,
        Family::QAbsShift => StructureFunction::q_abs_shift(q()?, finite(req(&p.k, "K", name)?, "K")?)?,
        Family::SelfSimilar => {
            let q = q()?;
            if q.im != 0.0 {
                return Err(usage("self_similar needs a real --q"));
            }
            StructureFunction::self_similar(q.re, req(&p.omegas, "omegas", name)?.0)?
        }
        Family::CustomExpr => return structure_custom(p, s),
    };
    Ok(f)
}

fn structure_custom(p: &Params, s: Option<usize>) -> Result<StructureFunction, CliError> {
    let expr = req(&p.expr, "expr", "a custom structure")?;
    let params = p.params.clone().map(|m| m.0).unwrap_or_default();
    let q = resolve_q(p, s)?.filter(|_| expr.contains('q') || p.q.is_some());
    Ok(StructureFunction::custom(&expr, params, q, arg_kind(p)?)?)
}

/// The structure function selected by `--structure`/`--expr`, or `default`.
fn structure(p: &Params, s: Option<usize>, default: &str) -> Result<StructureFunction, CliError> {
    match &p.structure {
        Some(StructureArg::Spec(spec)) => Ok(StructureFunction::from_spec(spec)?),
        Some(StructureArg::Name(name)) => structure_named(name, p, s),
        None if p.expr.is_some() => structure_custom(p, s),
        None => structure_named(default, p, s),
    }
}

fn is_isos(p: &Params) -> bool {
    matches!(&p.structure, Some(StructureArg::Name(n)) if n == "isos")
        || matches!(&p.structure, Some(StructureArg::Spec(s)) if s.family == Family::Isos)
}

/// Fock representation of dimension `--dim`, or the cyclic one of order
/// `--S`.
fn representation(p: &Params, ctx: &Ctx, cmd: &str, default_dim: Option<usize>) -> Result<Representation, CliError> {
    match single_s(p)? {
        Some(s) => {
            check_dim(s + 1, ctx)?;
            let f = structure(p, Some(s), "q_abs")?;
            let eta = eta_for(p, s)?;
            let rep = match (p.theta0, p.xi_phase) {
                (Some(_), Some(_)) => return Err(usage("give either --theta0 or --xi-phase, not both")),
                (Some(t), None) => build_cyclic_rep_theta0(&f, s, eta, finite(t, "theta0")?)?,
                (None, Some(ph)) => build_cyclic_rep(&f, s, eta, Complex64::from_polar(1.0, finite(ph, "xi-phase")?))?,
                (None, None) => build_cyclic_rep(&f, s, eta, Complex64::new(1.0, 0.0))?,
            };
            Ok(rep)
        }
        None => {
            let dim = check_dim(p.dim.or(default_dim).ok_or_else(|| usage(format!("{cmd} needs --dim or --S")))?, ctx)?;
            if is_isos(p) {
                return Ok(build_isos_rep(dim)?.rep);
            }
            let f = structure(p, None, "harmonic")?;
            Ok(build_fock_rep(&f, dim)?)
        }
    }
}

fn rep_value(rep: &Representation) -> Result<Value, CliError> {
    serde_json::from_str(&rep.to_json()?).map_err(|e| usage(format!("serialization failed: {e}")))
}

fn prefixed(report: CheckReport, prefix: &str) -> CheckReport {
    CheckReport {
        entries: report
            .entries
            .into_iter()
            .map(|mut e| {
                e.name = format!("{prefix}{}", e.name);
                e
            })
            .collect(),
    }
}

/// Amplitudes to test: the given one, or `draws` uniform samples from the
/// disk of radius `|given|` (or `radius`).
fn amplitudes(given: Option<Complex64>, draws: Option<usize>, radius: f64, ctx: &Ctx, flag: &str) -> Result<Vec<Complex64>, CliError> {
    match draws {
        Some(n) => {
            let r = given.map(|g| g.norm()).unwrap_or(radius);
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            Ok((0..n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    Complex64::from_polar(r * u.sqrt(), t)
                })
                .collect())
        }
        None => Ok(vec![given.ok_or_else(|| usage(format!("this command needs --{flag} or --draws")))?]),
    }
}

fn label(c: Complex64) -> String {
    format!("({}, {})", crate::render::float(c.re), crate::render::float(c.im))
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn run(cmd: &str, p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    match cmd {
        "structure check" => structure_check(p, ctx),
        "structure eval" => structure_eval(p),
        "rep build" => {
            let rep = representation(p, ctx, cmd, None)?;
            Ok(Output {
                data: Some(rep_value(&rep)?),
                ..Output::default()
            })
        }
        "rep check" => rep_check(p, ctx),
        "states coherent" => states_coherent(p, ctx),
        "states squeezed" => states_squeezed(p, ctx),
        "states displaced-squeezed" => {
            let rep = representation(p, ctx, cmd, Some(48))?;
            let ds = displaced_squeezed_state(&rep, req(&alpha(p)?, "alpha", cmd)?, req(&z(p)?, "z", cmd)?)?;
            Ok(Output {
                report: ds.report,
                data: Some(json!({"state": to_value(&ds.state)?, "beta": cpair(ds.beta)})),
                table: None,
            })
        }
        "states identities" => states_identities(p, ctx),
        "multiphoton sector" => {
            let dim = check_dim(req(&p.dim, "dim", cmd)?, ctx)?;
            let mut spec = CouplingSpec::single(p.coupling.as_deref().unwrap_or("1"), req(&p.m, "m", cmd)?, p.i.unwrap_or(0));
            spec.params = p.params.clone().map(|m| m.0).unwrap_or_default();
            let rep = build_sector_realization(&spec, dim)?;
            Ok(Output {
                report: check_gdo_relations(&rep, 1e-10)?,
                data: Some(rep_value(&rep)?),
                table: None,
            })
        }
        "multiphoton broken-vacuum" => {
            let dim = check_dim(p.dim.unwrap_or(16), ctx)?;
            let q = finite_c(req(&p.q, "q", cmd)?.0, "q")?;
            if q.im != 0.0 {
                return Err(usage("broken-vacuum needs a real --q"));
            }
            let (m, i) = (req(&p.m, "m", cmd)?, req(&p.i, "i", cmd)?);
            let mut report = check_broken_vacuum(q.re, m, i, dim)?;
            let exact = sector_exact_q_realization(q.re, m, i, dim)?;
            report.extend(prefixed(check_gdo_relations(&exact, 1e-12)?, "sector-exact: "));
            Ok(Output {
                report,
                ..Output::default()
            })
        }
        "multiphoton two-mode" => two_mode(p, ctx),
        "isos rep" => {
            let space = build_isos_rep(check_dim(p.dim.unwrap_or(32), ctx)?)?;
            Ok(Output {
                report: check_isos_structure(&space)?,
                data: Some(rep_value(&space.rep)?),
                table: None,
            })
        }
        "isos coherent" => {
            let dim = check_dim(p.dim.unwrap_or(24), ctx)?;
            let a = req(&alpha(p)?, "alpha", cmd)?;
            let space = build_isos_rep(dim)?;
            let state = isos_coherent_state(a, dim)?;
            let mut report = CheckReport::new();
            report.push(
                CheckEntry::new("isos coherent eigen-residual", isos_coherent_eigen_residual(&space, &state, a)?, 1e-10)
                    .boundary_excluded(true),
            );
            Ok(Output {
                report,
                data: Some(to_value(&state)?),
                table: None,
            })
        }
        "isos squeezed" => {
            let dim = check_dim(p.dim.unwrap_or(48), ctx)?;
            let zv = req(&z(p)?, "z", cmd)?;
            let space = build_isos_rep(dim)?;
            let state = isos_squeezed_vacuum(zv, dim)?;
            let mut report = CheckReport::new();
            report.push(
                CheckEntry::new("isos squeezed eigen-residual", isos_squeezed_eigen_residual(&space, &state, zv)?, 1e-9)
                    .boundary_excluded(true),
            );
            report.extend(check_isos_squeezed_maps_to_oscillator(zv, dim)?);
            Ok(Output {
                report,
                data: Some(to_value(&state)?),
                table: None,
            })
        }
        "isos intertwine" => {
            let dim = check_dim(p.dim.unwrap_or(24), ctx)?;
            Ok(Output {
                report: check_coherent_intertwining(req(&alpha(p)?, "alpha", cmd)?, dim)?,
                ..Output::default()
            })
        }
        "phase build" => {
            let s = req(&single_s(p)?, "S", cmd)?;
            check_dim(s + 1, ctx)?;
            let theta0 = finite(p.theta0.unwrap_or(0.0), "theta0")?;
            let pd = pb_phase_operator(s, theta0)?;
            let f = structure(p, Some(s), "q_abs")?;
            Ok(Output {
                report: check_phase_decomposition(s, theta0, &f, eta_for(p, s)?)?,
                data: Some(to_value(&pd)?),
                table: None,
            })
        }
        "phase ladder" => {
            let s = req(&single_s(p)?, "S", cmd)?;
            check_dim(s + 1, ctx)?;
            let theta0 = finite(p.theta0.unwrap_or(0.0), "theta0")?;
            let a = alpha(p)?.unwrap_or(Complex64::new(1.0, 0.0));
            let (lower, raise) = pb_ladder_ops(s, theta0)?;
            Ok(Output {
                report: check_truncated_commutator(s, theta0, a, 1e-12)?,
                data: Some(json!({"a_pb": to_value(&lower)?, "adag_pb": to_value(&raise)?})),
                table: None,
            })
        }
        "phase limit-sweep" => limit_sweep(p, ctx),
        "phase shift-check" => {
            let s = req(&single_s(p)?, "S", cmd)?;
            check_dim(s + 1, ctx)?;
            Ok(Output {
                report: phase_shift_check(s, finite(p.theta0.unwrap_or(0.0), "theta0")?, eta_for(p, s)?)?,
                ..Output::default()
            })
        }
        other => Err(usage(format!("unknown command {other:?}"))),
    }
}

fn structure_check(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    if let Some(s) = single_s(p)? {
        check_dim(s + 1, ctx)?;
        let f = structure(p, Some(s), "q_abs")?;
        return Ok(Output {
            report: check_cyclic_admissibility(&f, s, eta_for(p, s)?),
            data: Some(to_value(&f)?),
            table: None,
        });
    }
    let dim = check_dim(p.dim.unwrap_or(32), ctx)?;
    let f = structure(p, None, "harmonic")?;
    let mut report = CheckReport::new();
    let mut bad = Vec::new();
    let mut min_interior = f64::INFINITY;
    for n in 0..=dim {
        match f.eval(n as f64) {
            Ok(v) if n >= 1 && n < dim => min_interior = min_interior.min(v),
            Ok(_) => {}
            Err(e) => bad.push(e.to_string()),
        }
    }
    let mut entry = CheckEntry::new(format!("F real and nonnegative on 0..={dim}"), bad.len() as f64, 0.0);
    if let Some(first) = bad.first() {
        entry = entry.with_note(first.clone());
    }
    report.push(entry);
    report.push(CheckEntry::new("F(0) = 0", f.value(0.0).norm(), 1e-12));
    if dim > 1 {
        report.push(CheckEntry::above(format!("F(n) > 0 for 1 <= n < {dim}"), min_interior, 1e-12));
    }
    Ok(Output {
        report,
        data: Some(to_value(&f)?),
        table: None,
    })
}

fn structure_eval(p: &Params) -> Result<Output, CliError> {
    let f = structure(p, single_s(p)?, "harmonic")?;
    let xs = p.x.clone().map(|l| l.0).unwrap_or_else(|| (0..10).map(f64::from).collect());
    let mut table = Table::new(&["x", "F", "factorial", "double_factorial"]);
    for x in xs {
        let x = finite(x, "x")?;
        let fx = f.eval(x)?;
        let (fact, dfact) = if x >= 0.0 && x.fract() == 0.0 {
            (
                Cell::Float(f.factorial(x as u64)?),
                Cell::Float(f.double_factorial(x as i64)?),
            )
        } else {
            (Cell::Empty, Cell::Empty)
        };
        table.rows.push(vec![Cell::Float(x), Cell::Float(fx), fact, dfact]);
    }
    Ok(Output {
        report: CheckReport::new(),
        data: Some(to_value(&f)?),
        table: Some(table),
    })
}

fn rep_check(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    if is_isos(p) && single_s(p)?.is_none() {
        let space = build_isos_rep(check_dim(req(&p.dim, "dim", "rep check")?, ctx)?)?;
        return Ok(Output {
            report: check_isos_structure(&space)?,
            ..Output::default()
        });
    }
    let rep = representation(p, ctx, "rep check", None)?;
    let mut report = check_gdo_relations(&rep, 1e-10)?;
    let mut data = serde_json::Map::new();
    if rep.kind == RepKind::Cyclic {
        report.extend(check_central_elements(&rep)?);
    } else if let Some(f) = &rep.structure {
        let defects = boundary_defect(&rep)?;
        for (row, d) in &defects {
            let expect = -f.eval((*row + 1) as f64)?;
            report.push(
                CheckEntry::new(
                    format!("boundary defect row {row} = -F({})", row + 1),
                    (d - expect).abs() / expect.abs().max(1.0),
                    1e-9,
                )
                .with_note(format!("defect {}", crate::render::float(*d))),
            );
        }
        data.insert(
            "boundary_defect".into(),
            Value::Array(defects.iter().map(|(r, d)| json!([r, d])).collect()),
        );
    }
    Ok(Output {
        report,
        data: (!data.is_empty()).then_some(Value::Object(data)),
        table: None,
    })
}

fn states_coherent(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    let rep = representation(p, ctx, "states coherent", Some(48))?;
    let alphas = amplitudes(alpha(p)?, p.draws, 1.0, ctx, "alpha")?;
    let mut report = CheckReport::new();
    let mut states = Vec::new();
    for a in &alphas {
        let state = coherent_state_on(&rep, *a, StateOptions::default())?;
        report.push(
            CheckEntry::new(format!("eigen-residual alpha={}", label(*a)), coherent_eigen_residual(&rep, &state, *a)?, 1e-9)
                .boundary_excluded(true),
        );
        let via_op = normalize(&displacement_operator(&rep, *a)?.column(0));
        report.push(CheckEntry::new(
            format!("series = D(alpha)|0> alpha={}", label(*a)),
            max_abs_diff(&via_op, &state.coeffs),
            1e-10,
        ));
        states.push(to_value(&state)?);
    }
    Ok(Output {
        report,
        data: Some(if states.len() == 1 { states.remove(0) } else { Value::Array(states) }),
        table: None,
    })
}

fn states_squeezed(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    let rep = representation(p, ctx, "states squeezed", Some(48))?;
    let zs = amplitudes(z(p)?, p.draws, 0.5, ctx, "z")?;
    let mut report = CheckReport::new();
    let mut states = Vec::new();
    for zv in &zs {
        let state = squeezed_vacuum_on(&rep, *zv, StateOptions::default())?;
        report.push(
            CheckEntry::new(format!("eigen-residual z={}", label(*zv)), squeezed_eigen_residual(&rep, &state, *zv)?, 1e-9)
                .boundary_excluded(true),
        );
        let via_op = normalize(&squeeze_operator(&rep, *zv)?.column(0));
        report.push(CheckEntry::new(
            format!("series = S(z)|0> z={}", label(*zv)),
            max_abs_diff(&via_op, &state.coeffs),
            1e-10,
        ));
        states.push(to_value(&state)?);
    }
    Ok(Output {
        report,
        data: Some(if states.len() == 1 { states.remove(0) } else { Value::Array(states) }),
        table: None,
    })
}

fn states_identities(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    let rep = representation(p, ctx, "states identities", Some(48))?;
    let mut report = verify_identity_tt(&rep, p.kmax.unwrap_or(8))?;
    report.extend(verify_identity_tttt(&rep, p.nmax.unwrap_or(16))?);
    if let Some(a) = alpha(p)? {
        report.extend(check_displacement_covariance(&rep, a)?);
    }
    if let Some(zv) = z(p)? {
        report.extend(check_bogoliubov_failure(&rep, zv)?);
    }
    Ok(Output {
        report,
        ..Output::default()
    })
}

fn two_mode(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    let cmd = "multiphoton two-mode";
    let dim = check_dim(p.dim.unwrap_or(48), ctx)?;
    let mut spec = CouplingSpec::two_mode(
        p.coupling.as_deref().unwrap_or("1"),
        req(&p.m, "m", cmd)?,
        p.n.unwrap_or(1),
        p.i.unwrap_or(0),
        p.j.unwrap_or(0),
    );
    spec.params = p.params.clone().map(|m| m.0).unwrap_or_default();
    let rep = build_two_mode_realization(&spec, dim)?;
    let mut report = check_gdo_relations(&rep, 1e-10)?;
    if let Some(a) = alpha(p)? {
        let state = coherent_state_on(&rep, a, StateOptions::default())?;
        report.extend(prefixed(check_two_mode_conservation(&rep, &state)?, "coherent: "));
        report.push(
            CheckEntry::new("coherent: eigen-residual", coherent_eigen_residual(&rep, &state, a)?, 1e-9)
                .boundary_excluded(true),
        );
    }
    if let Some(zv) = z(p)? {
        let state = squeezed_vacuum_on(&rep, zv, StateOptions::default())?;
        report.extend(prefixed(check_two_mode_conservation(&rep, &state)?, "squeezed: "));
        report.push(
            CheckEntry::new("squeezed: eigen-residual", squeezed_eigen_residual(&rep, &state, zv)?, 1e-9)
                .boundary_excluded(true),
        );
    }
    Ok(Output {
        report,
        data: Some(rep_value(&rep)?),
        table: None,
    })
}

fn limit_sweep(p: &Params, ctx: &Ctx) -> Result<Output, CliError> {
    let s_list = req(&p.s, "S", "phase limit-sweep")?.0;
    for s in &s_list {
        check_dim(s + 1, ctx)?;
    }
    let family = match p.family.as_deref().unwrap_or("q_abs") {
        "q_abs" => Family::QAbs,
        "q_abs_shift" => Family::QAbsShift,
        other => return Err(usage(format!("--family must be q_abs or q_abs_shift, got {other:?}"))),
    };
    let mut schedule = Schedule::default();
    if let Some(e) = p.eta_schedule {
        schedule.eta = e.0;
    }
    if let Some(k) = p.k_schedule {
        schedule.k = k.0;
    }
    let table = classical_limit_sweep(&s_list, schedule, p.nmax.unwrap_or(10), family)?;
    let mut out = Table::new(&["S", "eta", "K", "n", "band_value", "oscillator_value", "abs_deviation"]);
    for r in &table.rows {
        out.rows.push(vec![
            Cell::Int(r.s as i64),
            Cell::Float(r.eta),
            r.k.map(Cell::Float).unwrap_or(Cell::Empty),
            Cell::Int(r.n as i64),
            Cell::Float(r.band_value),
            Cell::Float(r.oscillator_value),
            Cell::Float(r.abs_deviation),
        ]);
    }
    Ok(Output {
        report: check_classical_limit(&table, 1e-2),
        data: Some(json!({
            "max_deviation": table.max_deviation().iter().map(|(s, d)| json!([s, d])).collect::<Vec<_>>(),
            "loglog_slope": table.loglog_slope(),
        })),
        table: Some(out),
    })
}
