//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Runs with `cargo test -p qons-core --test acceptance`. The process exits
//! nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use qons_core::charges::{
    build_charges, check_commuting, check_transfer_commuting, check_transfer_expansion, independent_count,
    transfer_matrix,
};
use qons_core::config::CheckGroup;
use qons_core::generators::check_dual_construction;
use qons_core::relations::{
    check_aw, check_aw2, check_classical_limit, check_closure, check_qons, check_tridiagonal,
};
use qons_core::scalars::check_coefficients;
use qons_core::yang_baxter::{check_projection, check_reflection, check_rll};
use qons_core::{
    c, dress_chain, extend, k_plus, lift_chain, run_verify, spin_rep, verify_generator_set, CheckRanges, Mode,
    ParameterContext, ReportEntry, RunConfig, Spin, C64,
};

fn generic(spin: Spin) -> ParameterContext {
    ParameterContext::deformed(c(0.9, 0.2), c(1.3, -0.4), c(0.7, 0.5), spin).unwrap()
}

struct Outcome {
    pass: bool,
    summary: String,
}

/// Folds entries into one verdict, naming the worst residual relative to its tolerance.
fn from_entries(entries: &[ReportEntry]) -> Outcome {
    let failing: Vec<&ReportEntry> = entries.iter().filter(|e| !e.pass).collect();
    let worst = entries
        .iter()
        .map(|e| (e.residual / e.tolerance.max(f64::MIN_POSITIVE), e))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let summary = match (failing.first(), worst) {
        (Some(e), _) => format!("{} failing, first {} residual {:.3e} > {:.0e}", failing.len(), e.name, e.residual, e.tolerance),
        (None, Some((_, e))) => format!("{} checks, worst {} {:.3e} (tol {:.0e})", entries.len(), e.name, e.residual, e.tolerance),
        (None, None) => "no checks ran".into(),
    };
    Outcome { pass: failing.is_empty() && !entries.is_empty(), summary }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.summary = format!("{}; {:.2?}", out.summary, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.summary = format!("{} exceeds {:?}", out.summary, limit);
        }
    }
    out
}

fn projection() -> Outcome {
    from_entries(&[check_projection(&generic(Spin::HALF)).unwrap()])
}

fn rll() -> Outcome {
    let entries: Vec<_> = [Spin::HALF, Spin::ONE]
        .into_iter()
        .map(|s| {
            let ctx = generic(s);
            check_rll(&ctx, &spin_rep(&ctx, s).unwrap()).unwrap()
        })
        .collect();
    from_entries(&entries)
}

fn reflection() -> Outcome {
    let mut entries = Vec::new();
    for (spin, n_max) in [(Spin::HALF, 4), (Spin::ONE, 2)] {
        let ctx = generic(spin);
        for k in dress_chain(&ctx, n_max).unwrap() {
            entries.push(check_reflection(&ctx, &k).unwrap());
        }
    }
    from_entries(&entries)
}

fn dual_construction() -> Outcome {
    let ctx = generic(Spin::HALF);
    let chain = dress_chain(&ctx, 4).unwrap();
    let lifted = lift_chain(&ctx, 4).unwrap();
    let entries: Vec<_> = lifted
        .iter()
        .zip(&chain[1..])
        .map(|(set, k)| check_dual_construction(&ctx, set, k).unwrap())
        .collect();
    from_entries(&entries)
}

fn qons() -> Outcome {
    let ctx = generic(Spin::HALF);
    let mut entries = Vec::new();
    for set in lift_chain(&ctx, 4).unwrap() {
        let n = set.level();
        let ext = extend(&ctx, &set, n + 3).unwrap();
        entries.extend(check_qons(&ctx, &ext, n + 2).unwrap());
    }
    from_entries(&entries)
}

fn closure() -> Outcome {
    let ctx = generic(Spin::HALF);
    let mut entries = Vec::new();
    for set in lift_chain(&ctx, 4).unwrap() {
        let n = set.level();
        let ext = extend(&ctx, &set, n + 3).unwrap();
        entries.extend(check_closure(&ctx, &ext, 3).unwrap());
    }
    for spin in [Spin::HALF, Spin::ONE] {
        let e = check_coefficients(&generic(spin), 10).unwrap();
        assert_eq!(e.tolerance, 1e-10);
        entries.push(e);
    }
    from_entries(&entries)
}

fn askey_wilson() -> Outcome {
    let ctx = generic(Spin::HALF);
    let sets = lift_chain(&ctx, 2).unwrap();
    let mut entries = check_aw(&ctx, &extend(&ctx, &sets[0], 1).unwrap()).unwrap();
    entries.extend(check_aw2(&ctx, &extend(&ctx, &sets[1], 2).unwrap()).unwrap());
    let names: BTreeSet<&str> = entries.iter().map(|e| e.name.as_str()).collect();
    let mut out = from_entries(&entries);
    for required in ["askey_wilson", "aw2", "id2", "id_w2"] {
        if !names.iter().any(|n| n.contains(&format!(".{required}["))) {
            out.pass = false;
            out.summary = format!("{}; missing {required}", out.summary);
        }
    }
    out
}

fn tridiagonal() -> Outcome {
    let ctx = generic(Spin::HALF);
    let entries: Vec<_> = lift_chain(&ctx, 4).unwrap().iter().map(|s| check_tridiagonal(&ctx, s).unwrap()).collect();
    from_entries(&entries)
}

fn charges() -> Outcome {
    let ctx = generic(Spin::HALF);
    let cfg = RunConfig::default();
    let weights = cfg.weights();
    let chain = dress_chain(&ctx, 4).unwrap();
    let mut entries = Vec::new();
    for set in lift_chain(&ctx, 4).unwrap() {
        let n = set.level();
        let ext = extend(&ctx, &set, n + 1).unwrap();
        let family = build_charges(&ext, weights, n).unwrap();
        entries.push(check_commuting(&ctx, &family));
        if n <= 3 {
            let rank = independent_count(&family).rank;
            entries.push(
                ReportEntry::new(format!("independent_count[N={n}]"), "charges", rank.abs_diff(n) as f64, 0.0)
                    .detail(format!("rank {rank}")),
            );
            let kp = k_plus(&ctx, weights.kappa, weights.kappa_plus, weights.kappa_minus).unwrap();
            let t = transfer_matrix(&kp, &chain[n]).unwrap();
            entries.push(check_transfer_commuting(&ctx, &t, n));
            entries.push(check_transfer_expansion(&ctx, &set, &weights, &t).unwrap());
        }
    }
    from_entries(&entries)
}

fn classical() -> Outcome {
    let ctx = ParameterContext::new(C64::new(1.0, 0.0), c(1.3, -0.4), c(0.25, 0.0), Spin::HALF, Mode::Classical)
        .unwrap();
    let mut entries = Vec::new();
    for n in 1..=3 {
        entries.extend(check_classical_limit(&ctx, n).unwrap());
    }
    let mut out = from_entries(&entries);
    let exact = entries.iter().filter(|e| e.name.contains("g_antisymmetry")).all(|e| e.residual == 0.0);
    let rho16 = entries.iter().filter(|e| e.name.contains("dolan_grady")).all(|e| e.detail.as_deref() == Some("rho = 16"));
    if !exact || !rho16 {
        out.pass = false;
        out.summary = format!("{}; exact G1 = -Gt1: {exact}, rho = 16: {rho16}", out.summary);
    }
    out
}

/// Every generator of the level-`n` set, perturbed in one entry at a time by
/// `1e-3`, must make at least one check fail.
fn sensitivity() -> Outcome {
    let groups: BTreeSet<CheckGroup> = [CheckGroup::Generators, CheckGroup::Relations, CheckGroup::Charges].into();
    let mut trials = 0;
    let mut escaped = Vec::new();
    for n in [1, 2] {
        let cfg = RunConfig { n, ..RunConfig::default() };
        let ctx = cfg.context().unwrap();
        let ranges = CheckRanges::from_config(&cfg);
        let chain = dress_chain(&ctx, n).unwrap();
        let base = extend(&ctx, &lift_chain(&ctx, n).unwrap()[n - 1], ranges.required_top(n)).unwrap();
        let clean = verify_generator_set(&ctx, &ranges, &groups, &base, &chain[n]).unwrap();
        assert!(clean.iter().all(|e| e.pass), "unperturbed set must pass");
        let dim = base.quantum_dim();
        let keys: Vec<_> = base.entries().map(|(kind, idx, _)| (kind, idx)).collect();
        for (kind, idx) in keys {
            for (i, j) in [(0, 0), (dim - 1, 0), (1, dim - 2)] {
                let mut set = base.clone();
                set.get_mut(kind, idx).unwrap()[[i, j]] += c(1e-3, 0.0);
                let entries = verify_generator_set(&ctx, &ranges, &groups, &set, &chain[n]).unwrap();
                trials += 1;
                if entries.iter().all(|e| e.pass) {
                    escaped.push(format!("N={n} {} ({i},{j})", kind.label(idx)));
                }
            }
        }
    }
    Outcome {
        pass: escaped.is_empty(),
        summary: if escaped.is_empty() {
            format!("{trials} perturbations, all detected")
        } else {
            format!("{} of {trials} undetected: {}", escaped.len(), escaped.join(", "))
        },
    }
}

fn performance() -> Outcome {
    let cfg = RunConfig { n: 6, ..RunConfig::default() };
    let start = Instant::now();
    let first = match run_verify(&cfg) {
        Ok(r) => r,
        Err(e) => return Outcome { pass: false, summary: format!("verify failed: {e}") },
    };
    let elapsed = start.elapsed();
    let second = run_verify(&cfg).unwrap();
    let same = serde_json::to_string(&first).unwrap() == serde_json::to_string(&second).unwrap();
    let mut out = from_entries(&first.entries);
    out.pass &= same && elapsed < Duration::from_secs(300);
    out.summary = format!("{}; first run {elapsed:.1?}; reports identical: {same}", out.summary);
    out
}

fn main() {
    type Criterion = (&'static str, Option<u64>, fn() -> Outcome);
    let criteria: [Criterion; 12] = [
        ("spin-1/2 projection of L(u) onto R(u), <= 1e-12", Some(1), projection),
        ("RLL for j = 1/2 and 1", Some(5), rll),
        ("reflection equation, N <= 4 (j = 1/2), N <= 2 (j = 1)", Some(60), reflection),
        ("lift chain against dressing, N <= 4", None, dual_construction),
        ("q-Onsager relations, N <= 4, indices through N+2", None, qons),
        ("closure relations l <= 3, N <= 4; closed C coefficients, N <= 10", None, closure),
        ("Askey-Wilson (N = 1) and AW2 with its identities (N = 2)", None, askey_wilson),
        ("tridiagonal relations for (W0, W1), N <= 4", None, tridiagonal),
        ("commuting charges, rank, transfer matrix", None, charges),
        ("classical limit: Dolan-Grady with 16, G1 = -Gt1", None, classical),
        ("single-entry 1e-3 perturbation detected", None, sensitivity),
        ("full verify at N = 6 under 300 s, deterministic", None, performance),
    ];
    let mut failed = 0;
    for (i, (title, limit, run)) in criteria.into_iter().enumerate() {
        let out = timed(limit.map(Duration::from_secs), run);
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!out.pass);
        println!("{verdict} [{:>2}] {title}: {}", i + 1, out.summary);
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
