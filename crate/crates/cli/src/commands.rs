use exclusia_core::algebra::{
    build_boundary_ops_pasep, build_boundary_ops_ssep, build_uq_su2_rep, bulk_pair, bulk_scalars, check_relations_form,
    has_printed_variant, shift_generators, ssep_bulk_pair, structure_constants, tasep_algebra_data, tasep_bidiagonal,
    ConstantSource, Rates, RelationForm, RelationKind, TriPairScalars,
};
use exclusia_core::charges::{ssep_boundary_charges, ssep_charge_sequence};
use exclusia_core::kmc::{run_replica, EstimateReport, ReplicaTally, TrajectoryConfig};
use exclusia_core::linalg::Mat;
use exclusia_core::mpa::{mpa_observables, ssep_closed_forms, MpaMethod};
use exclusia_core::process::exact_observables;
use exclusia_core::{Method, ObservableReport, ProcessParams};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::args::{
    AlgebraArgs, ChargeArgs, Command, CompareArgs, Constants, Evaluator, FileConfig, Form, KmcOptions, MpaOptions,
    ProcessArgs,
};
use crate::error::CliError;
use crate::report::{num, nums, observables_json, params_json, Outcome, Table};

pub const ALGEBRA_TOL: f64 = 1e-11;
pub const CHARGE_TOL: f64 = 1e-10;
pub const BOUNDARY_TOL: f64 = 1e-12;

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be positive, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(format!("--{name} must be finite, got {v}")))
    }
}

struct Rated {
    q: f64,
    rates: Rates,
}

fn rated(p: &ProcessArgs, file: &FileConfig, default_rate: Option<f64>) -> Result<Rated, CliError> {
    let need = |name: &str, v: Option<f64>| v.or(default_rate).ok_or_else(|| invalid(format!("--{name} is required")));
    Ok(Rated {
        q: pick(p.q, file.q).unwrap_or(1.0),
        rates: Rates::new(
            need("alpha", pick(p.alpha, file.alpha))?,
            need("beta", pick(p.beta, file.beta))?,
            pick(p.gamma, file.gamma).unwrap_or(0.0),
            pick(p.delta, file.delta).unwrap_or(0.0),
        ),
    })
}

fn process(p: &ProcessArgs, file: &FileConfig) -> Result<ProcessParams, CliError> {
    let Rated { q, rates: r } = rated(p, file, None)?;
    let sites = pick(p.sites, file.sites).ok_or_else(|| invalid("--L is required"))?;
    Ok(ProcessParams::new(q, r.alpha, r.beta, r.gamma, r.delta, sites)?)
}

fn header(command: &str, params: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(crate::report::SCHEMA));
    m.insert("command".into(), command.into());
    m.insert("params".into(), params);
    m
}

pub fn run(cmd: &Command, file: &FileConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Exact(a) => exact(&process(&a.process, file)?),
        Command::Kmc(a) => kmc(&process(&a.process, file)?, &a.kmc, file),
        Command::Mpa(a) => mpa(&process(&a.process, file)?, &a.mpa, file),
        Command::Ssep(a) => ssep(&process(&a.process, file)?),
        Command::VerifyAlgebra(a) => verify_algebra(a, file),
        Command::Charges(a) => charges(a, file),
        Command::Compare(a) => compare(a, file),
    }
}

fn profile_table(r: &ObservableReport) -> Table {
    Table::profile(&[("density", &r.densities)])
}

fn observable_outcome(command: &str, r: &ObservableReport) -> Outcome {
    let mut body = header(command, params_json(&r.params));
    body.insert("result".into(), observables_json(r));
    Outcome::new(body).with_table(profile_table(r))
}

fn exact(p: &ProcessParams) -> Result<Outcome, CliError> {
    Ok(observable_outcome("exact", &exact_observables(p)?))
}

struct KmcSettings {
    cfg: TrajectoryConfig,
}

fn kmc_settings(o: &KmcOptions, file: &FileConfig) -> Result<KmcSettings, CliError> {
    let mut cfg = TrajectoryConfig::new(
        pick(o.t_measure, file.t_measure).unwrap_or(1000.0),
        pick(o.replicas, file.replicas).unwrap_or(8),
        pick(o.seed, file.seed).unwrap_or(0),
    );
    cfg.t_burn = pick(o.t_burn, file.t_burn);
    cfg.validate()?;
    Ok(KmcSettings { cfg })
}

/// Replicas run in parallel; the tallies are merged in replica order so
/// the estimate does not depend on scheduling.
fn kmc_estimate(p: &ProcessParams, s: &KmcSettings) -> Result<EstimateReport, CliError> {
    if !p.is_irreducible() {
        return Err(invalid("the chain has no unique stationary state for these rates"));
    }
    let tallies = (0..s.cfg.n_replicas as u64)
        .into_par_iter()
        .map(|r| run_replica(p, &s.cfg, r))
        .collect::<Result<Vec<_>, _>>()?;
    let tally = tallies.into_iter().fold(ReplicaTally::empty(p.sites), ReplicaTally::merge);
    Ok(EstimateReport::from_tally(p, &tally)?)
}

fn kmc_as_observables(e: &EstimateReport) -> ObservableReport {
    ObservableReport {
        method: Method::Kmc,
        params: e.params,
        partition_functions: Vec::new(),
        current: e.current,
        currents: e.currents.clone(),
        densities: e.densities.clone(),
        probabilities: None,
        error: e.current_stderr,
    }
}

fn kmc(p: &ProcessParams, o: &KmcOptions, file: &FileConfig) -> Result<Outcome, CliError> {
    let s = kmc_settings(o, file)?;
    let e = kmc_estimate(p, &s)?;
    let mut body = header("kmc", params_json(p));
    body.insert(
        "settings".into(),
        json!({
            "seed": s.cfg.seed,
            "replicas": s.cfg.n_replicas,
            "t_measure": num(s.cfg.t_measure),
            "t_burn": num(s.cfg.burn_in(p)),
        }),
    );
    body.insert(
        "result".into(),
        json!({
            "method": "kmc",
            "current": num(e.current),
            "current_stderr": num(e.current_stderr),
            "currents": nums(&e.currents),
            "currents_stderr": nums(&e.currents_stderr),
            "densities": nums(&e.densities),
            "density_stderr": nums(&e.density_stderr),
            "events": e.events,
        }),
    );
    let table = Table::profile(&[("density", &e.densities), ("stderr", &e.density_stderr)]);
    Ok(Outcome::new(body).with_table(table))
}

fn mpa_options(o: &MpaOptions, file: &FileConfig) -> Result<exclusia_core::mpa::MpaOptions, CliError> {
    let mut opts = exclusia_core::mpa::MpaOptions::default();
    if let Some(t) = pick(o.tol, file.tol) {
        opts.tol = positive("tol", t)?;
    }
    if let Some(m) = pick(o.m_max, file.m_max) {
        opts.m_max = m;
    }
    opts.method = match pick(o.evaluator, file.evaluator).unwrap_or(Evaluator::Auto) {
        Evaluator::Auto => MpaMethod::Auto,
        Evaluator::Truncated => MpaMethod::Truncated,
        Evaluator::Normal => MpaMethod::NormalOrdering,
    };
    Ok(opts)
}

fn mpa(p: &ProcessParams, o: &MpaOptions, file: &FileConfig) -> Result<Outcome, CliError> {
    let opts = mpa_options(o, file)?;
    Ok(observable_outcome("mpa", &mpa_observables(p, &opts)?))
}

fn ssep(p: &ProcessParams) -> Result<Outcome, CliError> {
    let c = ssep_closed_forms(p)?;
    let (lambda, ln_z, z_ratio) = (c.lambda, c.ln_z, c.z_ratio);
    let r = c.into_report(p);
    let mut out = observable_outcome("ssep", &r);
    out.body.insert("closed_form".into(), json!({ "lambda": num(lambda), "ln_z": num(ln_z), "z_ratio": num(z_ratio) }));
    Ok(out)
}

fn source(c: Option<Constants>) -> ConstantSource {
    match c.unwrap_or(Constants::Derived) {
        Constants::Derived => ConstantSource::Derived,
        Constants::Printed => ConstantSource::Printed,
    }
}

fn rates_json(q: f64, r: &Rates) -> Value {
    json!({
        "q": num(q),
        "alpha": num(r.alpha),
        "beta": num(r.beta),
        "gamma": num(r.gamma),
        "delta": num(r.delta),
    })
}

fn verify_algebra(a: &AlgebraArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let kind: RelationKind =
        pick(a.kind.clone(), file.kind.clone()).ok_or_else(|| invalid("--kind is required"))?.parse()?;
    let Rated { q, rates } = rated(&a.process, file, Some(1.0))?;
    let j = pick(a.j, file.j).unwrap_or(1.0);
    let x0 = finite("x0", pick(a.x0, file.x0).unwrap_or(1.0))?;
    let m = pick(a.m, file.m).unwrap_or(32);
    let (ta, tb) = (pick(a.a, file.a).unwrap_or(1.0), pick(a.b, file.b).unwrap_or(1.0));
    let tol = positive("tol", pick(a.tol, file.tol).unwrap_or(ALGEBRA_TOL))?;
    let constants = pick(a.constants, file.constants);
    let form = match pick(a.form, file.form) {
        Some(Form::Printed) if !has_printed_variant(kind) => {
            return Err(invalid(format!("{kind} has a single form; drop --form")));
        }
        Some(Form::Printed) => RelationForm::Printed,
        _ => RelationForm::Adopted,
    };
    let boundary = matches!(kind, RelationKind::Aw13 | RelationKind::Td33 | RelationKind::Dg38);
    if constants.is_some() && !boundary {
        return Err(invalid(format!("--constants applies to the boundary relations, not {kind}")));
    }
    let at_one = |what: &str| {
        if q == 1.0 {
            Ok(())
        } else {
            Err(invalid(format!("{what} holds at q = 1, got q = {q}")))
        }
    };

    let (x, y, scalars, truncated): (Mat, Mat, TriPairScalars, bool) = match kind {
        RelationKind::Aw13 | RelationKind::Td33 | RelationKind::Dg38 => {
            if kind == RelationKind::Dg38 {
                at_one("DG38")?;
            }
            let rep = build_uq_su2_rep(j, q)?;
            let pair = if q == 1.0 {
                build_boundary_ops_ssep(&rep, &rates, x0)?
            } else {
                build_boundary_ops_pasep(&rep, &rates, x0)?
            };
            let s = structure_constants(&rates, rep.casimir, q, x0, source(constants))?;
            (pair.a, pair.a_star, s, false)
        }
        RelationKind::Aw20 | RelationKind::BulkPasep | RelationKind::QSerre27 => {
            let (d0, d1) = bulk_pair(q, m, x0)?;
            let s = TriPairScalars { x0: Some(x0), ..bulk_scalars(q, x0) };
            match kind {
                RelationKind::Aw20 => (d1, d0, s, true),
                RelationKind::BulkPasep => (d0, d1, s, true),
                _ => {
                    let (e0, e1) = shift_generators(&d0, &d1, q, x0)?;
                    (e0, e1, s, true)
                }
            }
        }
        RelationKind::BulkSsep | RelationKind::DgGeneric => {
            at_one(kind.name())?;
            let (d0, d1) = ssep_bulk_pair(m, x0)?;
            if kind == RelationKind::BulkSsep {
                (d0, d1, TriPairScalars { x0: Some(x0), ..Default::default() }, true)
            } else {
                let (e0, e1) = shift_generators(&d0, &d1, 1.0, x0)?;
                (e1, e0, TriPairScalars { k: Some(x0), k_star: Some(x0), ..Default::default() }, true)
            }
        }
        RelationKind::Tasep65To77 | RelationKind::Tasep85 | RelationKind::Tasep86 | RelationKind::Tasep88To90 => {
            let td = tasep_algebra_data(ta, tb, m)?;
            let s = TriPairScalars { e1: Some(td.e1), e2: Some(td.e2), c_tilde: Some(td.e2), ..Default::default() };
            match kind {
                RelationKind::Tasep65To77 => {
                    let (b0, b1) = tasep_bidiagonal(m)?;
                    (b0, b1, s, true)
                }
                RelationKind::Tasep85 => (td.d, td.d_star, s, true),
                RelationKind::Tasep86 => (td.d0, td.d1, s, true),
                _ => (td.d1, td.d0, s, true),
            }
        }
        RelationKind::Tasep93 => {
            let unit = tasep_algebra_data(1.0, 1.0, m)?;
            let s = TriPairScalars { e2: Some(rates.alpha * rates.beta), ..Default::default() };
            (&unit.d1 * rates.beta, &unit.d0 * rates.alpha, s, true)
        }
    };
    let q_used = if matches!(
        kind,
        RelationKind::Tasep65To77
            | RelationKind::Tasep85
            | RelationKind::Tasep86
            | RelationKind::Tasep88To90
            | RelationKind::Tasep93
    ) {
        0.0
    } else {
        q
    };
    let report = check_relations_form(kind, form, &x, &y, &scalars, q_used, truncated)?;

    let (xn, yn) = kind.operands();
    let mut inputs = Map::new();
    inputs.insert("kind".into(), kind.name().into());
    inputs.insert("form".into(), if form == RelationForm::Printed { "printed" } else { "adopted" }.into());
    inputs.insert("x0".into(), num(x0));
    inputs.insert("dim".into(), x.nrows().into());
    if boundary {
        inputs.insert("j".into(), num(j));
        let c = if source(constants) == ConstantSource::Printed { "printed" } else { "derived" };
        inputs.insert("constants".into(), c.into());
    } else {
        inputs.insert("m".into(), m.into());
    }
    if matches!(
        kind,
        RelationKind::Tasep65To77 | RelationKind::Tasep85 | RelationKind::Tasep86 | RelationKind::Tasep88To90
    ) {
        inputs.insert("a".into(), num(ta));
        inputs.insert("b".into(), num(tb));
    }
    let mut body = header("verify-algebra", rates_json(q_used, &rates));
    body.insert("inputs".into(), Value::Object(inputs));
    body.insert("operands".into(), json!([xn, yn]));
    let residuals: Vec<Value> =
        report.residuals.iter().map(|r| json!({ "relation": r.name, "residual": num(r.value) })).collect();
    let max = report.max();
    let pass = report.passes(tol);
    body.insert("residuals".into(), Value::Array(residuals));
    body.insert("max_residual".into(), num(max));
    body.insert("tol".into(), num(tol));
    body.insert("pass".into(), pass.into());
    let mut out = Outcome::new(body);
    if !pass {
        out.failure = Some(CliError::Residual(format!("{kind}: residual {max:e} above tolerance {tol:e}")));
    }
    Ok(out)
}

fn charges(a: &ChargeArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let Rated { q, rates } = rated(&a.process, file, None)?;
    if q != 1.0 {
        return Err(invalid(format!("the charge hierarchy is built at q = 1, got q = {q}")));
    }
    let j = pick(a.j, file.j).unwrap_or(1.0);
    let x0 = finite("x0", pick(a.x0, file.x0).unwrap_or(1.0))?;
    let f = finite("f", pick(a.f, file.f).unwrap_or(1.0))?;
    let f_star = finite("f-star", pick(a.f_star, file.f_star).unwrap_or(1.0))?;
    let order = pick(a.order, file.order).unwrap_or(3);
    if order == 0 || order > 12 {
        return Err(invalid(format!("--order must be between 1 and 12, got {order}")));
    }
    let tol = positive("tol", pick(a.tol, file.tol).unwrap_or(CHARGE_TOL))?;
    let src = source(pick(a.constants, file.constants));
    let rep = build_uq_su2_rep(j, 1.0)?;
    let seq = ssep_charge_sequence(&rates, &rep, x0, f, f_star, order)?;
    let bc = ssep_boundary_charges(&rates, &rep, x0, src)?;

    let mut pairs = Vec::new();
    for m in 0..seq.q_charges.len() {
        for n in m + 1..seq.q_charges.len() {
            pairs.push(json!({ "m": 2 * m, "n": 2 * n, "residual": num(seq.commutator_residual(m, n)) }));
        }
    }
    let worst = seq.max_commutator_residual();
    let boundary_max = bc.report.max();
    let mut body = header("charges", rates_json(1.0, &rates));
    body.insert(
        "inputs".into(),
        json!({
            "j": num(j),
            "x0": num(x0),
            "f": num(f),
            "f_star": num(f_star),
            "order": order,
            "constants": if src == ConstantSource::Printed { "printed" } else { "derived" },
        }),
    );
    body.insert(
        "constants".into(),
        json!({ "rho": num(seq.rho), "rho_star": num(seq.rho_star), "scale": num(seq.scale) }),
    );
    body.insert("commutators".into(), Value::Array(pairs));
    body.insert("max_commutator".into(), num(worst));
    body.insert(
        "boundary_relation".into(),
        json!({
            "residuals": bc.report.residuals.iter().map(|r| json!({ "relation": r.name, "residual": num(r.value) })).collect::<Vec<_>>(),
            "max_residual": num(boundary_max),
            "tol": num(BOUNDARY_TOL),
        }),
    );
    body.insert("tol".into(), num(tol));
    let pass = worst < tol && boundary_max < BOUNDARY_TOL;
    body.insert("pass".into(), pass.into());
    let mut out = Outcome::new(body);
    if !pass {
        out.failure = Some(CliError::Residual(format!(
            "charges: commutator {worst:e} (tol {tol:e}), boundary relation {boundary_max:e} (tol {BOUNDARY_TOL:e})"
        )));
    }
    Ok(out)
}

fn max_dev(a: &[f64], b: &[f64]) -> (f64, f64) {
    a.iter().zip(b).fold((0.0f64, 0.0f64), |(abs, rel), (x, y)| {
        let d = (x - y).abs();
        let s = x.abs().max(y.abs());
        (abs.max(d), if s > 0.0 { rel.max(d / s) } else { rel })
    })
}

fn compare(a: &CompareArgs, file: &FileConfig) -> Result<Outcome, CliError> {
    let p = process(&a.process, file)?;
    let methods = if a.methods.is_empty() { file.methods.clone().unwrap_or_default() } else { a.methods.clone() };
    let methods: Vec<String> = methods.iter().map(|m| m.trim().to_ascii_lowercase()).collect();
    if methods.len() < 2 {
        return Err(invalid("--methods needs at least two of exact, mpa, kmc, ssep"));
    }
    for (i, m) in methods.iter().enumerate() {
        if !["exact", "mpa", "kmc", "ssep"].contains(&m.as_str()) {
            return Err(invalid(format!("unknown method `{m}`")));
        }
        if methods[..i].contains(m) {
            return Err(invalid(format!("method `{m}` listed twice")));
        }
    }
    let mut results = Vec::new();
    for m in &methods {
        let r = match m.as_str() {
            "exact" => exact_observables(&p)?,
            "mpa" => mpa_observables(&p, &mpa_options(&a.mpa, file)?)?,
            "ssep" => ssep_closed_forms(&p)?.into_report(&p),
            _ => kmc_as_observables(&kmc_estimate(&p, &kmc_settings(&a.kmc, file)?)?),
        };
        results.push(r);
    }

    let mut body = header("compare", params_json(&p));
    let mut per = Map::new();
    for r in &results {
        per.insert(r.method.name().into(), observables_json(r));
    }
    body.insert("results".into(), Value::Object(per));
    let mut rows = Vec::new();
    let (mut worst_abs, mut worst_rel) = (0.0f64, 0.0f64);
    for i in 0..results.len() {
        for k in i + 1..results.len() {
            let (x, y) = (&results[i], &results[k]);
            let (d_abs, d_rel) = max_dev(&x.densities, &y.densities);
            let (c_abs, c_rel) = max_dev(&[x.current], &[y.current]);
            worst_abs = worst_abs.max(d_abs).max(c_abs);
            worst_rel = worst_rel.max(d_rel).max(c_rel);
            rows.push(json!({
                "methods": [x.method.name(), y.method.name()],
                "density_abs": num(d_abs),
                "density_rel": num(d_rel),
                "current_abs": num(c_abs),
                "current_rel": num(c_rel),
            }));
        }
    }
    body.insert(
        "comparison".into(),
        json!({ "pairs": rows, "max_abs_deviation": num(worst_abs), "max_rel_deviation": num(worst_rel) }),
    );
    let columns: Vec<(&str, &[f64])> = results.iter().map(|r| (r.method.name(), r.densities.as_slice())).collect();
    Ok(Outcome::new(body).with_table(Table::profile(&columns)))
}
