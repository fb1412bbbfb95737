use serde_json::{json, Value};

use voltspec::asymptotics::{self, residue_constants, study_claims, RegimeTag, StudySubject};
use voltspec::config::{modes_for, parse_mode_list, AGrid, KernelSpec};
use voltspec::kernel::sector_decay_probe;
use voltspec::modal_sim::{assemble, consistency_of, integrate};
use voltspec::oracle::{crosscheck_with, AGREEMENT_TOL, CROSSCHECK_MAX_TERMS};
use voltspec::report::{fmt_float, to_json, Cell, CsvTable};
use voltspec::roots::{full_slice, RootOptions};
use voltspec::stability::classify as classify_modes;
use voltspec::suite::{generate, SuiteCase, SuiteSpec};
use voltspec::{ExponentialKernel, Mode, PowerLawFamily, SymbolPolynomial};

use crate::output::{CliError, Output};
use crate::Common;

struct Loaded {
    spec: KernelSpec,
    kernel: ExponentialKernel,
}

fn load_kernel(common: &Common) -> Result<Loaded, CliError> {
    let source = common
        .kernel
        .as_deref()
        .ok_or_else(|| CliError::Config("--kernel is required".into()))?;
    let spec = KernelSpec::from_source(source)?;
    let kernel = spec.build()?;
    Ok(Loaded { spec, kernel })
}

fn mode_values(common: &Common) -> Result<Vec<f64>, CliError> {
    match (&common.modes, &common.a_grid) {
        (Some(list), None) => Ok(parse_mode_list(list)?),
        (None, Some(grid)) => Ok(AGrid::parse(grid)?.values()),
        (None, None) => Err(CliError::Config("one of --modes or --a-grid is required".into())),
        (Some(_), Some(_)) => Err(CliError::Config("--modes and --a-grid are exclusive".into())),
    }
}

fn load_modes(common: &Common) -> Result<Vec<Mode>, CliError> {
    Ok(modes_for(&mode_values(common)?, common.theta)?)
}

fn output(common: &Common) -> Result<Output, CliError> {
    Output::new(common.out.clone(), common.format)
}

fn json_doc(value: &Value) -> Result<String, CliError> {
    Ok(to_json(value)?)
}

pub fn spectrum(common: &Common, gnuplot: bool) -> Result<(), CliError> {
    let Loaded { kernel, .. } = load_kernel(common)?;
    let modes = load_modes(common)?;
    let out = output(common)?;
    if gnuplot && !out.has_dir() {
        return Err(CliError::Config("--gnuplot needs --out".into()));
    }

    let opts = RootOptions::default();
    let mut table = CsvTable::new(&["mode_index", "a_n", "kind", "re", "im", "residual"]);
    let mut docs = Vec::with_capacity(modes.len());
    let mut failures = Vec::new();
    for (i, mode) in modes.iter().enumerate() {
        let index = i + 1;
        let solved = full_slice(mode, &kernel, &opts).and_then(|s| s.zero_rows(&kernel).map(|rows| (s, rows)));
        match solved {
            Ok((slice, rows)) => {
                for r in &rows {
                    table.push(&[
                        Cell::U(index),
                        Cell::F(mode.a),
                        Cell::S(r.kind.name()),
                        Cell::F(r.value.re),
                        Cell::F(r.value.im),
                        Cell::F(r.residual),
                    ]);
                }
                docs.push(json!({
                    "mode_index": index,
                    "a_n": mode.a,
                    "theta": mode.theta,
                    "unstable": slice.unstable,
                    "residual_max": slice.residual_max,
                    "residual_tol": slice.residual_tol,
                    "interlacing_violations": slice.interlacing_violations(&kernel),
                    "zeros": rows,
                }));
            }
            Err(e) => {
                eprintln!("voltspec: mode {index} (a = {}): {e}", mode.a);
                failures.push(index);
                docs.push(json!({ "mode_index": index, "a_n": mode.a, "error": e.to_string() }));
            }
        }
    }
    out.emit(
        "spectrum",
        Some(table.render()),
        Some(json_doc(&json!({ "modes": docs }))?),
    )?;
    if gnuplot {
        out.write_extra(
            "spectrum.gp",
            "set datafile separator ','\nset key off\nset xlabel 'Re lambda'\nset ylabel 'Im lambda'\n\
             plot 'spectrum.csv' every ::1 using 4:5 with points pt 7 ps 0.6\n",
        )?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "{} of {} modes failed: {:?}",
            failures.len(),
            modes.len(),
            failures
        )))
    }
}

pub fn asymptotics(common: &Common, max_terms: usize) -> Result<(), CliError> {
    let Loaded { spec, kernel } = load_kernel(common)?;
    let grid = mode_values(common)?;
    if grid.len() < 2 {
        return Err(CliError::Config(
            "an a-grid with at least two points is required".into(),
        ));
    }
    let a_max = grid.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let subject = match spec.family() {
        Some(f) => StudySubject::truncated(f, a_max, max_terms)?,
        None => StudySubject::Kernel(kernel),
    };
    let study = asymptotics::convergence_study(&subject, common.theta, &grid)?;
    let claims = study_claims(&study);

    let mut table = CsvTable::new(&[
        "a_n",
        "re",
        "im",
        "predicted_re",
        "predicted_im",
        "delta_re",
        "delta_im",
        "route",
    ]);
    for r in &study.rows {
        table.push(&[
            Cell::F(r.a),
            Cell::F(r.computed_re),
            Cell::F(r.computed_im),
            Cell::F(r.predicted_re),
            Cell::F(r.predicted_im),
            Cell::F(r.delta_re),
            Cell::F(r.delta_im),
            Cell::S(&format!("{:?}", r.route)),
        ]);
    }

    let residue = match spec.family() {
        Some(f) if f.r() > 0.0 && f.r() < 1.0 => {
            let rc = residue_constants(f.r())?;
            json!({
                "r": rc.r,
                "D": [rc.d.re, rc.d.im],
                "D1": rc.d1,
                "D2": rc.d2,
                "closed_form_reported": [rc.d_closed_form_reported.re, rc.d_closed_form_reported.im],
                "closed_form_sign_flipped": rc.closed_form_sign_flipped(),
            })
        }
        _ => Value::Null,
    };
    let pass = claims.iter().all(|c| c.pass);
    let summary = json!({
        "theta": study.theta,
        "terms": study.terms,
        "regime": study.regime.name(),
        "theta_constant": match study.regime { RegimeTag::ConstantAbscissa(v) => json!(v), _ => Value::Null },
        "order_re": study.order_re,
        "order_im": study.order_im,
        "n1": study.n1,
        "re_slope": study.re_slope,
        "delta_re_slope": study.delta_re_slope,
        "delta_im_slope": study.delta_im_slope,
        "claims": claims,
        "residue": residue,
        "pass": pass,
    });
    output(common)?.emit("asymptotics", Some(table.render()), Some(json_doc(&summary)?))?;
    for c in &claims {
        eprintln!(
            "{} {}: slope {} vs target {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            fmt_float(c.slope),
            fmt_float(c.target)
        );
    }
    if pass {
        Ok(())
    } else {
        Err(CliError::Verify("at least one slope claim failed".into()))
    }
}

fn regime_fields(family: Option<PowerLawFamily>, theta: f64) -> Result<(String, bool, Value), CliError> {
    match family {
        None => Ok((RegimeTag::FiniteSum.name().into(), false, Value::Null)),
        Some(f) => {
            let report = asymptotics::regime_classify(&f, theta)?;
            let (name, constant) = match report.tag {
                // The logarithmic case still drifts towards the axis.
                RegimeTag::LogCase => (RegimeTag::ApproachAxis.name(), Value::Null),
                RegimeTag::ConstantAbscissa(v) => (report.tag.name(), json!(v)),
                tag => (tag.name(), Value::Null),
            };
            Ok((name.into(), report.log_case, constant))
        }
    }
}

pub fn classify(common: &Common) -> Result<(), CliError> {
    let Loaded { spec, kernel } = load_kernel(common)?;
    let modes = load_modes(common)?;
    let report = classify_modes(&kernel, &modes)?;
    let (regime, log_case, constant) = regime_fields(spec.family(), common.theta)?;
    let doc = json!({
        "verdict": report.verdict,
        "N0": report.n0,
        "regime": regime,
        "log_case": log_case,
        "theta_constant": constant,
        "S": [report.s.0, report.s.1],
        "thresholds": report.thresholds,
        "mode_verdicts": report.mode_verdicts,
        "unstable_roots": report.unstable_roots,
    });
    output(common)?.emit("classify", None, Some(json_doc(&doc)?))
}

fn perturbed(p: Option<f64>) -> impl Fn(SymbolPolynomial) -> SymbolPolynomial {
    move |mut poly: SymbolPolynomial| {
        if let Some(eps) = p {
            if let Some(c) = poly.coeffs.get_mut(1) {
                *c += eps * (1.0 + c.abs());
            }
        }
        poly
    }
}

pub fn oracle_check(common: &Common, count: usize, perturb: Option<f64>) -> Result<(), CliError> {
    let cases: Vec<SuiteCase> = match &common.kernel {
        Some(_) => {
            let Loaded { kernel, .. } = load_kernel(common)?;
            if kernel.len() > CROSSCHECK_MAX_TERMS {
                return Err(CliError::Config(format!(
                    "oracle-check accepts at most {CROSSCHECK_MAX_TERMS} kernel terms, got {}",
                    kernel.len()
                )));
            }
            let terms: Vec<(f64, f64)> = kernel.terms().iter().map(|t| (t.c, t.gamma)).collect();
            load_modes(common)?
                .into_iter()
                .enumerate()
                .map(|(index, mode)| SuiteCase {
                    index,
                    mode,
                    terms: terms.clone(),
                })
                .collect()
        }
        None => {
            if count == 0 {
                return Err(CliError::Config("--count must be positive".into()));
            }
            generate(&SuiteSpec::stable(), common.seed, count)
        }
    };

    let mut table = CsvTable::new(&[
        "case",
        "a_n",
        "theta",
        "terms",
        "analytic_vs_companion",
        "analytic_vs_matrix",
        "companion_vs_matrix",
        "vieta_sum",
        "vieta_prod",
        "pass",
    ]);
    let mut docs = Vec::with_capacity(cases.len());
    let mut failed = 0usize;
    for case in &cases {
        let kernel = case.kernel()?;
        match crosscheck_with(&case.mode, &kernel, perturbed(perturb)) {
            Ok(r) => {
                let pass = r.pass && r.vieta.within(AGREEMENT_TOL);
                failed += usize::from(!pass);
                table.push(&[
                    Cell::U(case.index),
                    Cell::F(case.mode.a),
                    Cell::F(case.mode.theta),
                    Cell::U(kernel.len()),
                    Cell::F(r.analytic_vs_companion),
                    Cell::F(r.analytic_vs_matrix),
                    Cell::F(r.companion_vs_matrix),
                    Cell::F(r.vieta.sum_residual),
                    Cell::F(r.vieta.prod_residual),
                    Cell::B(pass),
                ]);
                docs.push(json!({ "case": case.index, "terms": case.terms, "report": r, "pass": pass }));
            }
            Err(e) => {
                failed += 1;
                eprintln!("voltspec: case {}: {e}", case.index);
                docs.push(json!({ "case": case.index, "terms": case.terms, "error": e.to_string(), "pass": false }));
            }
        }
    }
    let summary = json!({ "seed": common.seed, "cases": cases.len(), "failed": failed, "results": docs });
    output(common)?.emit("oracle", Some(table.render()), Some(json_doc(&summary)?))?;
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Verify(format!("{failed} of {} cases disagree", cases.len())))
    }
}

pub fn simulate(common: &Common, t_end: f64, dt: Option<f64>, every: Option<usize>) -> Result<(), CliError> {
    let Loaded { kernel, .. } = load_kernel(common)?;
    let modes = load_modes(common)?;
    let mut table = CsvTable::new(&["mode_index", "t", "u", "v", "E"]);
    let mut reports = Vec::with_capacity(modes.len());
    let mut failed = Vec::new();
    for (i, mode) in modes.iter().enumerate() {
        let index = i + 1;
        let sys = assemble(mode, &kernel, 1.0, 0.0);
        let step = dt.unwrap_or_else(|| sys.max_step().min(1e-2));
        let trace = integrate(&sys, t_end, step)?;
        let stride = every.unwrap_or_else(|| (trace.times.len() / 5000).max(1)).max(1);
        for j in (0..trace.times.len()).step_by(stride) {
            table.push(&[
                Cell::U(index),
                Cell::F(trace.times[j]),
                Cell::F(trace.u[j]),
                Cell::F(trace.v[j]),
                Cell::F(trace.energy[j]),
            ]);
        }
        match consistency_of(mode, &kernel, &trace) {
            Ok(r) => {
                // Without a dominant eigenvalue group a single-rate fit is not
                // meaningful, so the comparison is annotated rather than judged.
                if r.dominant && !r.pass {
                    failed.push(index);
                }
                reports.push(json!({ "mode_index": index, "report": r }));
            }
            Err(e) => {
                eprintln!("voltspec: mode {index}: {e}");
                failed.push(index);
                reports.push(json!({ "mode_index": index, "a_n": mode.a, "error": e.to_string() }));
            }
        }
    }
    output(common)?.emit(
        "simulate",
        Some(table.render()),
        Some(json_doc(&json!({ "modes": reports }))?),
    )?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verify(format!(
            "decay rate disagrees with the abscissa for modes {failed:?}"
        )))
    }
}

pub fn probe(common: &Common, delta: f64, rays: &str, radii: &str) -> Result<(), CliError> {
    let Loaded { spec, kernel } = load_kernel(common)?;
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(CliError::Config(format!("--delta must lie in (0, pi/2), got {delta}")));
    }
    let angles = parse_mode_list(rays)?;
    let radii = AGrid::parse(radii)?.values();
    let family = spec.family();
    let table = sector_decay_probe(&kernel, family.as_ref(), delta, &radii, &angles)?;

    let mut csv = CsvTable::new(&["arg", "radius", "k_abs", "lambda_kprime_abs", "lambda_diff_abs"]);
    for r in &table.rows {
        csv.push(&[
            Cell::F(r.arg),
            Cell::F(r.radius),
            Cell::F(r.k_abs),
            Cell::F(r.lambda_kprime_abs),
            Cell::F(r.lambda_diff_abs.unwrap_or(f64::NAN)),
        ]);
    }
    let pass = table.pass();
    let doc = json!({ "delta": delta, "rays": table.rays, "pass": pass });
    output(common)?.emit("probe", Some(csv.render()), Some(json_doc(&doc)?))?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Verify(
            "decay or boundedness flag raised on at least one ray".into(),
        ))
    }
}
