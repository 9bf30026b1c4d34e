//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Thresholds are fixed here and never tuned to results.

use critical_besov::grid_oracle::{atoms_to_grid, grid_block, Grid, OracleParams};
use critical_besov::lp_besov::{besov_norm_spectrum, lei_lin_norm, modulation_norm, CutoffProfile};
use critical_besov::ns_inflation::*;
use critical_besov::spectral_atoms::{
    apply_symbol, atom_product, dyadic_block, eval_probe, Atom, AtomField, Multiplier, Probe,
    ProductOutcome, ProductPolicy,
};
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    id: u32,
    pass: bool,
    detail: String,
}

fn report(id: u32, pass: bool, detail: String) -> Outcome {
    println!(
        "{} criterion {id:>2}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    Outcome { id, pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn spread(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

fn partition_of_unity(c: &CutoffProfile) -> Outcome {
    let t0 = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let r = 2f64.powf(rng.random_range(-39.0..39.0));
        let s: f64 = (-45..=45).map(|j| c.phi_j(j, r)).sum();
        worst = worst.max((s - 1.0).abs());
    }
    let el = secs(t0.elapsed());
    report(
        1,
        worst < 1e-12 && el < 1.0,
        format!("max |sum phi_j - 1| = {worst:.3e} (< 1e-12), {el:.3} s (< 1 s)"),
    )
}

fn data_bound(c: &CutoffProfile) -> Outcome {
    let mut aggs = vec![Vec::new(); 4];
    let mut slowest = 0.0f64;
    for k in [16, 32, 48, 64] {
        let t0 = Instant::now();
        let d = theorem_data(&ConstructionParams::theorem(3, k, 0.02, 1.0)).unwrap();
        for (ci, f) in [d.u1(), d.u2()].into_iter().enumerate() {
            let s = besov_norm_spectrum(f, 1.0, c);
            aggs[2 * ci].push(s.aggregate);
            aggs[2 * ci + 1].push(s.with_q(2.0).aggregate);
        }
        slowest = slowest.max(secs(t0.elapsed()));
    }
    let worst = aggs.iter().map(|v| spread(v)).fold(0.0, f64::max);
    report(
        2,
        worst < 2.0 && slowest < 10.0,
        format!("max/min of data aggregates over k = {worst:.4} (< 2), slowest k {slowest:.2} s (< 10 s)"),
    )
}

fn support_bookkeeping(c: &CutoffProfile, oracle: &OracleRun, u4_leak: &[(i32, f64)]) -> Outcome {
    let d = theorem_data(&ConstructionParams::theorem(3, 32, 0.02, 1.0)).unwrap();
    let h = d.u1().atoms[0].spacing();
    let ledger = interaction_ledger(&d, &ProductPolicy::for_spacing(h)).unwrap();
    let excluded = ledger.excluded();
    let exact = d
        .geometry
        .shells
        .iter()
        .all(|&j| dyadic_block(&excluded, j, c).field.is_empty());
    let grid_worst = oracle
        .ledger_blocks
        .iter()
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    let pass = exact && grid_worst < 1e-6;
    report(
        3,
        pass,
        format!(
            "k=32 Delta_j(U1+..+U4) empty on N_k: {exact}; grid k=6 max |Delta_j(u1u1 - U5)|/|Delta_j U5| = {grid_worst:.3e} \
             (< 1e-6) per j {:?}; U4 share per j {:?}",
            oracle.ledger_blocks, u4_leak
        ),
    )
}

fn main_term_lower_bound(c: &CutoffProfile) -> Outcome {
    let p = ConstructionParams::theorem(3, 32, 0.02, 1.0);
    let d = theorem_data(&p).unwrap();
    let rho0 = c.rho_check_origin(3);
    let unit = 2f64.powi(-p.k);
    let find = |lambda: i8, mu: i8, l: i32| {
        let i = d
            .tags
            .iter()
            .position(|t| *t == AtomTag { lambda, mu, l })
            .unwrap();
        let mut a = d.u1().atoms[i].clone();
        a.envelope.scale(unit.into());
        a
    };
    fn exact(a: &Atom, b: &Atom) -> Atom {
        match atom_product(a, b, &ProductPolicy::exact()).unwrap() {
            ProductOutcome::Exact(x) => x,
            ProductOutcome::Tail(_) => unreachable!(),
        }
    }
    let mut worst = f64::INFINITY;
    for &j in &d.geometry.shells {
        let (pp, mp, pm, mm) = (
            find(1, 1, j),
            find(-1, 1, j),
            find(1, -1, j),
            find(-1, -1, j),
        );
        let pair = AtomField::from_atoms(3, vec![exact(&pp, &mp), exact(&pm, &mm)], true);
        let f = apply_symbol(&pair, &Multiplier::directional(vec![1.0, -1.0, 0.0])).unwrap();
        let a = d.geometry.a_of(j).unwrap();
        let a2: f64 = a.iter().map(|x| x * x).sum();
        let x: Vec<f64> = a.iter().map(|ai| -ai + PI / 2.0 * ai / a2).collect();
        let v = eval_probe(&f, &Probe::at(x)).norm();
        let bound = p.eps * 2f64.powi(j - 1) * rho0 * rho0;
        worst = worst.min(v / bound);
    }
    report(
        4,
        worst >= 1.0 - 1e-3,
        format!("min over N_k of probe / (eps 2^(j-1) rho(0)^2) = {worst:.4} (>= 0.999)"),
    )
}

fn growth(c: &CutoffProfile) -> Outcome {
    let t0 = Instant::now();
    let ks = [32, 48, 64, 80, 96];
    let opts = SweepOptions {
        norms: false,
        ..SweepOptions::default()
    };
    let mut parts = Vec::new();
    let mut pass = true;
    for q in [1.0, 2.0] {
        let s =
            inflation_sweep(&ks, &ConstructionParams::theorem(3, 32, 0.02, q), c, &opts).unwrap();
        let ok = (s.fit.slope - 1.0 / q).abs() <= 0.3;
        pass &= ok;
        parts.push(format!(
            "q={q}: exponent {:.4} (target {:.2} +- 0.3)",
            s.fit.slope,
            1.0 / q
        ));
    }
    let el = secs(t0.elapsed());
    pass &= el < 300.0;
    report(
        5,
        pass,
        format!("{}, {el:.1} s (< 300 s)", parts.join("; ")),
    )
}

fn hierarchy(c: &CutoffProfile) -> Outcome {
    let d = theorem_data(&ConstructionParams::theorem(3, 64, 0.02, 1.0)).unwrap();
    let r = decomposition_report(&d, c, 32).unwrap();
    let a11 = r.get("A11").unwrap();
    let mut pass = a11 > 0.0;
    let mut parts = Vec::new();
    for name in ["A12", "A2", "correction", "series"] {
        let ratio = r.get(name).unwrap() / a11;
        pass &= ratio < 0.25;
        parts.push(format!("{name}/A11 = {ratio:.3e}"));
    }
    report(6, pass, format!("k=64: {} (each < 0.25)", parts.join(", ")))
}

fn witness_divergence(c: &CutoffProfile) -> Outcome {
    let ks = [16, 32, 48, 64];
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [1.0, 2.0] {
        let s = inflation_sweep(
            &ks,
            &ConstructionParams::theorem(3, 16, 0.02, q),
            c,
            &SweepOptions::default(),
        )
        .unwrap();
        let w: Vec<f64> = s
            .rows
            .iter()
            .map(|r| r.witness.as_ref().unwrap().total)
            .collect();
        let b: Vec<f64> = s.rows.iter().map(|r| r.witness_besov.unwrap()).collect();
        let flat = spread(&w);
        let ratio = b[3] / b[0];
        let need = 4f64.powf(1.0 / q) * 0.6;
        pass &= flat < 2.0 && ratio > need;
        parts.push(format!(
            "q={q}: witness max/min {flat:.4} (< 2), Besov 64/16 {ratio:.4} (> {need:.4})"
        ));
    }
    report(7, pass, parts.join("; "))
}

fn norm_comparisons(c: &CutoffProfile) -> Outcome {
    let d32 = theorem_data(&ConstructionParams::theorem(3, 32, 0.02, 1.0)).unwrap();
    let d64 = theorem_data(&ConstructionParams::theorem(3, 64, 0.02, 1.0)).unwrap();
    let m = modulation_norm(d64.u1()).value / modulation_norm(d32.u1()).value;
    let l = lei_lin_norm(d64.u1()).unwrap().merged / lei_lin_norm(d32.u1()).unwrap().merged;
    let b = besov_norm_spectrum(d64.u1(), 1.0, c).aggregate
        / besov_norm_spectrum(d32.u1(), 1.0, c).aggregate;
    let inr = |x: f64| (1.7..=2.3).contains(&x);
    let pass = inr(m) && inr(l) && (0.5..=2.0).contains(&b);
    report(
        8,
        pass,
        format!("k=64/k=32: modulation {m:.4}, Lei-Lin {l:.4} (each in [1.7, 2.3]); Besov {b:.4} (in [0.5, 2])"),
    )
}

fn oracle_equivalence(run: &OracleRun, elapsed: f64) -> Outcome {
    let e = run.tail.exponent.unwrap_or(f64::NAN);
    let pass = run.iterate.rel_error < 1e-4 && (2.7..=3.3).contains(&e) && elapsed < 600.0;
    report(
        9,
        pass,
        format!(
            "k=6 2D P={}: rel sup error {:.3e} (< 1e-4), Picard tail exponent {e:.4} (in [2.7, 3.3]), {elapsed:.1} s (< 600 s)",
            run.params.points, run.iterate.rel_error
        ),
    )
}

fn method_cross_validation(c: &CutoffProfile) -> Outcome {
    let d = theorem_data(&ConstructionParams::theorem(3, 32, 0.02, 1.0)).unwrap();
    let policy = ProductPolicy::for_spacing(d.u1().atoms[0].spacing());
    let window = ShellWindow::Shells(d.geometry.shells.clone());
    let t = d.params.t();
    let quad = second_iterate(
        &d.u0,
        t,
        &IterateOptions::new(Method::Quadrature, window.clone(), policy.clone()),
        c,
    )
    .unwrap();
    let split = second_iterate(
        &d.u0,
        t,
        &IterateOptions::new(Method::TaylorSplit, window, policy),
        c,
    )
    .unwrap();
    let gap = quad.tensor.rel_gap(&split.tensor);
    let nodes_gap = quad.convergence_gap;
    report(
        10,
        gap < 1e-7 && nodes_gap < 1e-8,
        format!(
            "k=32: quadrature vs split {gap:.3e} (< 1e-7), M=32 vs M=48 {nodes_gap:.3e} (< 1e-8)"
        ),
    )
}

fn two_d_pipeline(c: &CutoffProfile, run: &OracleRun) -> Outcome {
    let b1 = (run.b1_data.residual / run.b1_data.reference)
        .max(run.b1_random.residual / run.b1_random.reference);
    let ks = [32, 48, 64, 80, 96];
    let mut pass = b1 < 1e-10;
    let mut parts = vec![format!("B1 residual {b1:.3e} (< 1e-10)")];
    for q in [1.0, 2.0] {
        let mut main = Vec::new();
        for &k in &ks {
            let d = theorem_data(&ConstructionParams::theorem(2, k, 0.02, q)).unwrap();
            main.push(
                decomposition_report(&d, c, 32)
                    .unwrap()
                    .get("main")
                    .unwrap(),
            );
        }
        let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let slope = critical_besov::fit::power_law(&x, &main).unwrap().slope;
        pass &= (slope - 1.0 / q).abs() <= 0.3;
        parts.push(format!(
            "q={q}: main exponent {slope:.4} (target {:.2} +- 0.3)",
            1.0 / q
        ));
    }
    report(11, pass, parts.join("; "))
}

/// `‖Δ_j U₄‖_∞ / ‖Δ_j U₅‖_∞` on the oracle grid, to attribute any leak.
fn u4_share(op: &OracleParams, c: &CutoffProfile) -> Vec<(i32, f64)> {
    let d = oracle_data(op, 1.0, c).unwrap();
    let grid = Grid::new(op.spec());
    let ledger = interaction_ledger(&d, &ProductPolicy::exact()).unwrap();
    let u4 = atoms_to_grid(ledger.family(Family::U4), grid.spec)
        .unwrap()
        .field;
    let u5 = atoms_to_grid(&ledger.u5(), grid.spec).unwrap().field;
    d.geometry
        .shells
        .iter()
        .map(|&j| {
            (
                j,
                grid.sup_norm(&grid_block(&u4, j, c)) / grid.sup_norm(&grid_block(&u5, j, c)),
            )
        })
        .collect()
}

fn main() {
    let c = CutoffProfile::default();
    let op = OracleParams::default_2d();
    let t0 = Instant::now();
    let oracle = oracle_run(&op, 1.0, 7, &c).expect("oracle run");
    let oracle_secs = secs(t0.elapsed());
    let leak = u4_share(&op, &c);
    let outcomes = vec![
        partition_of_unity(&c),
        data_bound(&c),
        support_bookkeeping(&c, &oracle, &leak),
        main_term_lower_bound(&c),
        growth(&c),
        hierarchy(&c),
        witness_divergence(&c),
        norm_comparisons(&c),
        oracle_equivalence(&oracle, oracle_secs),
        method_cross_validation(&c),
        two_d_pipeline(&c, &oracle),
    ];
    let failed: Vec<&Outcome> = outcomes.iter().filter(|o| !o.pass).collect();
    println!(
        "acceptance: {} of {} criteria pass",
        outcomes.len() - failed.len(),
        outcomes.len()
    );
    if !failed.is_empty() {
        for o in &failed {
            eprintln!("failed criterion {}: {}", o.id, o.detail);
        }
        std::process::exit(1);
    }
}
