use crate::config::{ConstructionConfig, MethodName, RunConfig, RunMode};
use crate::csv::{fmt_f64, results_table, ResultRow, Table};
use crate::manifest::{ManifestWriter, RunManifest};
use crate::plot::sweep_plot;
use crate::{CliError, OUT_ROOT_ENV};
use critical_besov::grid_oracle::OracleParams;
use critical_besov::lp_besov::{
    besov_norm_spectrum, lei_lin_norm, modulation_norm, CutoffProfile, ShellSpectrum,
};
use critical_besov::ns_inflation::{
    construction_spectrum, decomposition_report, inflation_sweep, oracle_run, second_iterate,
    theorem_data, ConstructionParams, InflationError, IterateOptions, Method, ShellWindow,
    SweepOptions,
};
use critical_besov::spectral_atoms::ProductPolicy;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Explicit output directory; wins over the config and the env root.
    pub out: Option<PathBuf>,
    pub threads: usize,
}

impl From<InflationError> for CliError {
    fn from(e: InflationError) -> Self {
        match e {
            InflationError::InvalidParams(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// `--out`, else `config.output` under the root, else `<root>/<config stem>`;
/// the root is `$CBESOV_OUT_ROOT` or `runs`.
pub fn resolve_output(cli: Option<&Path>, config: &RunConfig, config_path: &Path) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    let root = std::env::var_os(OUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("runs"));
    match &config.output {
        Some(o) if Path::new(o).is_absolute() => PathBuf::from(o),
        Some(o) => root.join(o),
        None => root.join(config_path.file_stem().unwrap_or_default()),
    }
}

pub fn run_file(config_path: &Path, opts: &RunOptions) -> Result<(PathBuf, RunManifest), CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let config = crate::config::parse_config(&text)?;
    let out = resolve_output(opts.out.as_deref(), &config, config_path);
    let m = run(&config, &out, opts.threads)?;
    Ok((out, m))
}

pub fn run(config: &RunConfig, out: &Path, threads: usize) -> Result<RunManifest, CliError> {
    config.validate()?;
    let mut w = ManifestWriter::create(out)?;
    let cutoffs = CutoffProfile::default();
    match config.mode {
        RunMode::Cutoffs => cutoffs_mode(&mut w, &cutoffs)?,
        RunMode::Data => data_mode(&mut w, config.construction()?, &cutoffs)?,
        RunMode::Iterate => iterate_mode(&mut w, config.construction()?, &cutoffs)?,
        RunMode::Report => report_mode(&mut w, config.construction()?, &cutoffs)?,
        RunMode::Sweep => sweep_mode(&mut w, config, threads.max(1), &cutoffs)?,
        RunMode::Oracle => oracle_mode(&mut w, config, &cutoffs)?,
    }
    w.finish(config)
}

fn write_results(w: &mut ManifestWriter, rows: &[ResultRow]) -> Result<String, CliError> {
    let text = results_table(rows)?.render();
    w.write("results.csv", text.as_bytes())?;
    Ok(text)
}

fn kq(p: &ConstructionParams) -> f64 {
    (p.k as f64).powf(1.0 / p.q)
}

fn predicted_s(p: &ConstructionParams) -> f64 {
    if p.n >= 3 {
        p.eps.powi(3) * kq(p)
    } else {
        p.eta * kq(p)
    }
}

fn spectrum_rows(
    rows: &mut Vec<ResultRow>,
    name: &str,
    p: &ConstructionParams,
    t: f64,
    s: &ShellSpectrum,
    predicted: f64,
) {
    for v in &s.shells {
        rows.push(ResultRow::shell(
            name, p.k, p.q, p.eps, p.eta, t, v.j, v.sampled,
        ));
    }
    rows.push(ResultRow::aggregate(
        name,
        p.k,
        p.q,
        p.eps,
        p.eta,
        t,
        s.aggregate,
        predicted,
    ));
}

fn cutoffs_mode(w: &mut ManifestWriter, c: &CutoffProfile) -> Result<(), CliError> {
    let mut t = Table::new(&["r", "psi", "phi", "rho"]);
    for i in 0..=400 {
        let r = i as f64 / 100.0;
        t.push(vec![
            fmt_f64(r),
            fmt_f64(c.psi(r)),
            fmt_f64(c.phi(r)),
            fmt_f64(c.rho(r)),
        ]);
    }
    w.write("profiles.csv", t.render().as_bytes())?;
    w.summary("psi_inner", c.psi_inner());
    w.summary("psi_outer", c.psi_outer());
    w.summary("rho_support", c.rho_support());
    Ok(())
}

fn data_mode(
    w: &mut ManifestWriter,
    cc: &ConstructionConfig,
    c: &CutoffProfile,
) -> Result<(), CliError> {
    let p = cc.params(cc.k.expect("validated"));
    let d = theorem_data(&p)?;
    let mut rows = Vec::new();
    spectrum_rows(
        &mut rows,
        "u1",
        &p,
        0.0,
        &besov_norm_spectrum(d.u1(), p.q, c),
        1.0,
    );
    spectrum_rows(
        &mut rows,
        "u2",
        &p,
        0.0,
        &besov_norm_spectrum(d.u2(), p.q, c),
        1.0,
    );
    let k = p.k as f64;
    let modulation = modulation_norm(d.u1()).value;
    let ll = lei_lin_norm(d.u1())
        .map_err(|e| CliError::Numerical(format!("lei_lin_norm: {e}")))?
        .merged;
    rows.push(ResultRow::aggregate(
        "modulation_u1",
        p.k,
        p.q,
        p.eps,
        p.eta,
        0.0,
        modulation,
        k,
    ));
    rows.push(ResultRow::aggregate(
        "lei_lin_u1",
        p.k,
        p.q,
        p.eps,
        p.eta,
        0.0,
        ll,
        k,
    ));
    write_results(w, &rows)?;
    w.summary("atoms", d.u1().atoms.len() as f64);
    w.summary("divergence_residual", d.u0.divergence_residual());
    Ok(())
}

fn iterate_mode(
    w: &mut ManifestWriter,
    cc: &ConstructionConfig,
    c: &CutoffProfile,
) -> Result<(), CliError> {
    let p = cc.params(cc.k.expect("validated"));
    let d = theorem_data(&p)?;
    let method = match cc.method.unwrap_or(MethodName::Quadrature) {
        MethodName::Quadrature => Method::Quadrature,
        MethodName::TaylorSplit => Method::TaylorSplit,
    };
    let policy = ProductPolicy::for_spacing(d.u1().atoms[0].spacing());
    let mut opts = IterateOptions::new(
        method,
        ShellWindow::Shells(d.geometry.shells.clone()),
        policy,
    );
    opts.nodes = cc.nodes;
    let t = p.t();
    let it = second_iterate(&d.u0, t, &opts, c)?;
    let s = construction_spectrum(&d, &it.field.components[0], p.q, c);
    let mut rows = Vec::new();
    spectrum_rows(&mut rows, "S", &p, t, &s, predicted_s(&p));
    write_results(w, &rows)?;
    w.summary("convergence_gap", it.convergence_gap);
    w.summary("divergence_residual", it.field.divergence_residual());
    if let Some(r) = it.r_max {
        w.summary("r_max", r as f64);
    }
    Ok(())
}

fn report_mode(
    w: &mut ManifestWriter,
    cc: &ConstructionConfig,
    c: &CutoffProfile,
) -> Result<(), CliError> {
    let p = cc.params(cc.k.expect("validated"));
    let d = theorem_data(&p)?;
    let r = decomposition_report(&d, c, cc.nodes)?;
    let mut rows = Vec::new();
    for q in r.quantities.iter().filter(|q| q.name != "S") {
        rows.push(ResultRow::aggregate(
            &q.name,
            p.k,
            p.q,
            p.eps,
            p.eta,
            r.t,
            q.value,
            q.predicted,
        ));
    }
    spectrum_rows(&mut rows, "S", &p, r.t, &r.spectrum, predicted_s(&p));
    write_results(w, &rows)?;
    w.summary("lower_bound_proxy", r.lower_bound_proxy);
    w.summary("r_max", r.r_max as f64);
    let inv = r.invariants();
    w.summary(
        "invariants_hold",
        inv.iter().all(|(_, ok)| *ok) as u8 as f64,
    );
    Ok(())
}

fn sweep_mode(
    w: &mut ManifestWriter,
    config: &RunConfig,
    threads: usize,
    c: &CutoffProfile,
) -> Result<(), CliError> {
    let cc = config.construction()?;
    let ks = cc.ks.clone().expect("validated");
    let template = cc.params(ks[0]);
    let opts = SweepOptions {
        nodes: cc.nodes,
        norms: cc.norms,
        threads,
    };
    let study = inflation_sweep(&ks, &template, c, &opts)?;
    let mut rows = Vec::new();
    for row in &study.rows {
        let p = ConstructionParams {
            k: row.k,
            eta: template.eps * template.eps,
            ..template
        };
        spectrum_rows(&mut rows, "S", &p, row.t, &row.spectrum, predicted_s(&p));
        let tw = 2f64.powi(-2 * row.k);
        let agg = |name: &str, v: Option<f64>, pred: f64, t: f64| {
            v.map(|v| ResultRow::aggregate(name, p.k, p.q, p.eps, p.eta, t, v, pred))
        };
        let k = row.k as f64;
        rows.extend(agg(
            "witness",
            row.witness.as_ref().map(|x| x.total),
            p.eps,
            tw,
        ));
        rows.extend(agg("witness_besov", row.witness_besov, p.eps * kq(&p), tw));
        rows.extend(agg("modulation_u1", row.modulation, k, 0.0));
        rows.extend(agg("lei_lin_u1", row.lei_lin, k, 0.0));
    }
    let text = write_results(w, &rows)?;
    w.summary("fitted_exponent", study.fit.slope);
    w.summary("fit_intercept", study.fit.intercept);
    w.summary("target_exponent", 1.0 / template.q);
    let gap = study
        .rows
        .iter()
        .map(|r| r.convergence_gap)
        .fold(0.0, f64::max);
    w.summary("max_convergence_gap", gap);
    if config.plot {
        w.write("plot.svg", sweep_plot(&text, "S")?.as_bytes())?;
    }
    Ok(())
}

fn check_row(t: &mut Table, name: &str, value: f64, lower: f64, upper: f64) -> bool {
    let pass = value.is_finite()
        && (lower.is_nan() || value >= lower)
        && (upper.is_nan() || value <= upper);
    t.push(vec![
        name.into(),
        fmt_f64(value),
        fmt_f64(lower),
        fmt_f64(upper),
        pass.to_string(),
    ]);
    pass
}

fn oracle_mode(
    w: &mut ManifestWriter,
    config: &RunConfig,
    c: &CutoffProfile,
) -> Result<(), CliError> {
    let oc = config.oracle.clone().unwrap_or_default();
    let op: OracleParams = oc.params();
    let r = oracle_run(&op, oc.q, oc.seed, c)?;
    let mut t = Table::new(&["check", "value", "lower", "upper", "pass"]);
    let none = f64::NAN;
    let mut all = true;
    all &= check_row(
        &mut t,
        "second_iterate_rel_error",
        r.iterate.rel_error,
        none,
        1e-4,
    );
    all &= check_row(
        &mut t,
        "richardson_gap",
        r.iterate.richardson_gap,
        none,
        1e-4,
    );
    let exponent = r.tail.exponent.unwrap_or(f64::NAN);
    all &= check_row(&mut t, "picard_tail_exponent", exponent, 2.7, 3.3);
    let tail_ratio = r.tail.shell_aggregates[0] / r.tail.second_order_aggregate;
    all &= check_row(&mut t, "tail_to_second_order", tail_ratio, none, 0.1);
    all &= check_row(
        &mut t,
        "b1_residual_data",
        r.b1_data.residual / r.b1_data.reference,
        none,
        1e-10,
    );
    all &= check_row(
        &mut t,
        "b1_residual_random",
        r.b1_random.residual / r.b1_random.reference,
        none,
        1e-10,
    );
    for (j, rel) in &r.ledger_blocks {
        all &= check_row(&mut t, &format!("block_u5_j{j}"), *rel, none, 1e-6);
    }
    w.write("comparison.csv", t.render().as_bytes())?;
    let mut tails = Table::new(&["delta", "tail_sup", "tail_aggregate"]);
    for i in 0..r.tail.deltas.len() {
        tails.push(vec![
            fmt_f64(r.tail.deltas[i]),
            fmt_f64(r.tail.sup_norms[i]),
            fmt_f64(r.tail.shell_aggregates[i]),
        ]);
    }
    w.write("picard_tail.csv", tails.render().as_bytes())?;
    w.summary("max_rel_error", r.iterate.rel_error);
    w.summary("picard_tail_exponent", exponent);
    w.summary("delta_used", r.iterate.delta_used);
    w.summary("all_pass", all as u8 as f64);
    Ok(())
}
