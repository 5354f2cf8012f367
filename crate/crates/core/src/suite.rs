//! The full verification run: every check family in dependency order.

use std::collections::BTreeSet;

use crate::charges::{
    build_charges, check_commuting, check_transfer_commuting, check_transfer_expansion, independent_count,
    spectral_distance, spectrum, transfer_matrix, ChargeWeights,
};
use crate::config::{CheckGroup, RunConfig};
use crate::error::{Error, Result};
use crate::generators::{check_dual_construction, check_extension_consistency, extend, from_dressing, lift_chain, GeneratorSet};
use crate::params::ParameterContext;
use crate::quantum_algebra::{check_spin_rep, spin_rep};
use crate::relations::{check_aw, check_aw2, check_classical_limit, check_closure, check_opcom, check_qons, check_tridiagonal};
use crate::report::{ReportEntry, VerificationReport};
use crate::scalars::{check_coefficients, check_polynomial_routes, check_simp_identity};
use crate::yang_baxter::{check_dual_reflection, check_projection, check_reflection, check_rll, dress_chain, k_plus, KMatrix};

/// Index ranges and weights used by the checks that consume a generator set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckRanges {
    pub depth: usize,
    pub l_max: usize,
    pub k_max: usize,
    pub weights: ChargeWeights,
}

impl CheckRanges {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { depth: cfg.depth(), l_max: cfg.l_max(), k_max: cfg.k_max(), weights: cfg.weights() }
    }

    /// Highest generator index any check reads at level `n`.
    pub fn required_top(&self, n: usize) -> usize {
        (self.depth + 1).max(n + self.l_max).max(self.k_max + 1)
    }
}

/// Turns a failed check into a failing entry. Resource-cap errors abort the run.
fn absorb(ctx: &ParameterContext, name: &str, anchor: &str, r: Result<ReportEntry>) -> Result<ReportEntry> {
    match r {
        Ok(e) => Ok(e),
        Err(e @ Error::DimensionCap { .. }) => Err(e),
        Err(e) => Ok(ReportEntry::errored(name, anchor, ctx.tol(), &e).spin(ctx.spin())),
    }
}

fn absorb_many(ctx: &ParameterContext, name: &str, anchor: &str, r: Result<Vec<ReportEntry>>) -> Result<Vec<ReportEntry>> {
    match r {
        Ok(v) => Ok(v),
        Err(e) => absorb(ctx, name, anchor, Err(e)).map(|e| vec![e]),
    }
}

/// Every check that reads the generator matrices of `set`, with `k` the dressed
/// matrix at the same level. `set` must already be extended to
/// [`CheckRanges::required_top`].
pub fn verify_generator_set(
    ctx: &ParameterContext,
    ranges: &CheckRanges,
    groups: &BTreeSet<CheckGroup>,
    set: &GeneratorSet,
    k: &KMatrix,
) -> Result<Vec<ReportEntry>> {
    let mut out = Vec::new();
    if groups.contains(&CheckGroup::Generators) {
        out.push(absorb(ctx, "generators.dual_construction", "tensor-product-representation", check_dual_construction(ctx, set, k))?);
        out.push(absorb(ctx, "generators.extension_consistency", "closure-relations", check_extension_consistency(ctx, set))?);
    }
    if groups.contains(&CheckGroup::Relations) {
        out.extend(absorb_many(ctx, "relations.qons", "q-onsager", check_qons(ctx, set, ranges.depth))?);
        out.extend(absorb_many(ctx, "relations.opcom", "commutation-relations", check_opcom(ctx, set))?);
        out.extend(absorb_many(ctx, "relations.closure", "closure-relations", check_closure(ctx, set, ranges.l_max))?);
        out.push(absorb(ctx, "relations.tridiagonal", "tridiagonal", check_tridiagonal(ctx, set))?);
    }
    if groups.contains(&CheckGroup::Charges) {
        out.extend(charge_checks(ctx, ranges, set, k)?);
    }
    Ok(out)
}

fn charge_checks(ctx: &ParameterContext, ranges: &CheckRanges, set: &GeneratorSet, k: &KMatrix) -> Result<Vec<ReportEntry>> {
    let n = set.level();
    let mut out = Vec::new();
    match build_charges(set, ranges.weights, ranges.k_max) {
        Ok(family) => {
            out.push(check_commuting(ctx, &family));
            let info = independent_count(&family);
            let expected = n.min(ranges.k_max + 1);
            let (kept, dropped) = info.gap;
            out.push(
                ReportEntry::new(
                    format!("charges.independent_count[N={n}]"),
                    "commuting-charges",
                    info.rank.abs_diff(expected) as f64,
                    0.0,
                )
                .level(n)
                .spin(ctx.spin())
                .detail(format!(
                    "rank {} of {} charges, expected {expected}; gap {kept:.2e} / {}",
                    info.rank,
                    family.charges.len(),
                    dropped.map_or("none".into(), |d| format!("{d:.2e}"))
                )),
            );
        }
        Err(e) => out.push(absorb(ctx, "charges.commuting", "commuting-charges", Err(e))?),
    }
    let w = ranges.weights;
    let transfer = k_plus(ctx, w.kappa, w.kappa_plus, w.kappa_minus).and_then(|kp| transfer_matrix(&kp, k));
    match transfer {
        Ok(t) => {
            out.push(check_transfer_commuting(ctx, &t, n));
            out.push(absorb(ctx, "charges.transfer_expansion", "transfer-matrix", check_transfer_expansion(ctx, set, &w, &t))?);
        }
        Err(e) => out.push(absorb(ctx, "charges.transfer_commuting", "transfer-matrix", Err(e))?),
    }
    out.push(absorb(ctx, "charges.spectrum_invariance", "commuting-charges", spectrum_invariance(ctx, ranges, set, k))?);
    Ok(out)
}

/// The spectrum of `I₁` built from the recursion against the one built from the
/// generators unmixed out of the dressed matrix.
fn spectrum_invariance(ctx: &ParameterContext, ranges: &CheckRanges, set: &GeneratorSet, k: &KMatrix) -> Result<ReportEntry> {
    let n = set.level();
    let unmixed = from_dressing(ctx, k)?;
    let a = build_charges(set, ranges.weights, 0)?;
    let b = build_charges(&unmixed, ranges.weights, 0)?;
    let dist = spectral_distance(&spectrum(&a.charges[0])?, &spectrum(&b.charges[0])?);
    Ok(ReportEntry::new(format!("charges.spectrum_invariance[N={n}]"), "commuting-charges", dist, 1e-8)
        .level(n)
        .spin(ctx.spin()))
}

pub fn run_verify(cfg: &RunConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let ctx = cfg.context()?;
    let groups = cfg.checks.groups()?;
    let n = cfg.n;
    let mut report = VerificationReport::new();

    if ctx.is_classical() {
        if groups.contains(&CheckGroup::Classical) {
            report.extend(absorb_many(&ctx, "relations.classical", "dolan-grady", check_classical_limit(&ctx, n))?);
        }
        return Ok(report);
    }

    if groups.contains(&CheckGroup::Scalars) {
        report.push(absorb(&ctx, "scalars.simp_identity", "polynomial-recursion", check_simp_identity(&ctx, n))?);
        report.push(absorb(&ctx, "scalars.closure_coefficients", "closure-coefficients", check_coefficients(&ctx, n.max(10)))?);
        report.push(absorb(&ctx, "scalars.poly_routes", "polynomial-recursion", check_polynomial_routes(&ctx, n))?);
    }
    if groups.contains(&CheckGroup::Reps) {
        let entry = spin_rep(&ctx, ctx.spin()).map(|rep| check_spin_rep(&ctx, &rep));
        report.push(absorb(&ctx, "reps.spin_rep", "quantum-group", entry)?);
    }

    let needs_chain = [CheckGroup::YangBaxter, CheckGroup::Generators, CheckGroup::Relations, CheckGroup::Charges]
        .iter()
        .any(|g| groups.contains(g));
    if !needs_chain {
        return Ok(report);
    }
    let chain = dress_chain(&ctx, n)?;

    if groups.contains(&CheckGroup::YangBaxter) {
        report.push(absorb(&ctx, "yang_baxter.spin_half_projection", "r-matrix", check_projection(&ctx))?);
        let rll = spin_rep(&ctx, ctx.spin()).and_then(|rep| check_rll(&ctx, &rep));
        report.push(absorb(&ctx, "yang_baxter.rll", "yang-baxter", rll)?);
        for k in &chain {
            report.push(absorb(&ctx, "yang_baxter.reflection", "reflection-equation", check_reflection(&ctx, k))?);
        }
        let w = cfg.weights();
        let dual = k_plus(&ctx, w.kappa, w.kappa_plus, w.kappa_minus).and_then(|kp| check_dual_reflection(&ctx, &kp));
        report.push(absorb(&ctx, "yang_baxter.dual_reflection", "dual-reflection-equation", dual)?);
    }

    let set_groups = [CheckGroup::Generators, CheckGroup::Relations, CheckGroup::Charges];
    if !set_groups.iter().any(|g| groups.contains(g)) {
        return Ok(report);
    }
    let lifted = match lift_chain(&ctx, n) {
        Ok(l) => l,
        Err(e) => {
            report.push(absorb(&ctx, "generators.lift_chain", "tensor-product-representation", Err(e))?);
            return Ok(report);
        }
    };
    if groups.contains(&CheckGroup::Generators) {
        for (set, k) in lifted.iter().zip(&chain[1..]).take(n - 1) {
            report.push(absorb(&ctx, "generators.dual_construction", "tensor-product-representation", check_dual_construction(&ctx, set, k))?);
        }
    }

    let ranges = CheckRanges::from_config(cfg);
    match extend(&ctx, &lifted[n - 1], ranges.required_top(n)) {
        Ok(top) => report.extend(verify_generator_set(&ctx, &ranges, &groups, &top, &chain[n])?),
        Err(e) => report.push(absorb(&ctx, "generators.extend", "q-onsager", Err(e))?),
    }

    if groups.contains(&CheckGroup::Relations) {
        let one = extend(&ctx, &lifted[0], 1).and_then(|s| check_aw(&ctx, &s));
        report.extend(absorb_many(&ctx, "relations.askey_wilson", "askey-wilson", one)?);
        if n >= 2 {
            let two = extend(&ctx, &lifted[1], 2).and_then(|s| check_aw2(&ctx, &s));
            report.extend(absorb_many(&ctx, "relations.aw2", "askey-wilson", two)?);
        }
    }
    Ok(report)
}
