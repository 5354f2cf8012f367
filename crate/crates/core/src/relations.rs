//! Residual checks for the algebraic identities satisfied by a generator set.

use crate::error::{Error, Result};
use crate::generators::{classical_pair, GeneratorSet};
use crate::linalg::{commutator, eye, q_commutator, relative_residual, worst, CMatrix, C64, ONE};
use crate::params::ParameterContext;
use crate::report::ReportEntry;
use crate::scalars::{casimir_weight, closure_lead, coeff_c_table, rho_constant};

/// Running maximum over one family of identities, remembering where it occurred.
struct Family {
    name: String,
    anchor: &'static str,
    worst: f64,
    at: String,
    count: usize,
}

impl Family {
    fn new(name: String, anchor: &'static str) -> Self {
        Self { name, anchor, worst: 0.0, at: String::new(), count: 0 }
    }

    fn record(&mut self, residual: f64, at: impl FnOnce() -> String) {
        self.count += 1;
        if self.worst.is_nan() {
            return;
        }
        if residual.is_nan() || residual > self.worst || self.count == 1 {
            self.at = at();
            self.worst = worst(self.worst, residual);
        }
    }

    fn finish(self, ctx: &ParameterContext, level: usize) -> ReportEntry {
        ReportEntry::new(self.name, self.anchor, self.worst, ctx.tol())
            .level(level)
            .spin(ctx.spin())
            .detail(format!("{} identities, worst at {}", self.count, self.at))
    }
}

/// `[a, b] = 0` measured as `ab` against `ba`.
fn commutes(a: &CMatrix, b: &CMatrix) -> f64 {
    relative_residual(&a.dot(b), &b.dot(a))
}

/// `[a, b] + [c, d] = 0` measured as `ab + cd` against `ba + dc`.
fn commutators_cancel(a: &CMatrix, b: &CMatrix, c: &CMatrix, d: &CMatrix) -> f64 {
    relative_residual(&(a.dot(b) + c.dot(d)), &(b.dot(a) + d.dot(c)))
}

fn tag(name: &str, n: usize) -> String {
    format!("relations.{name}[N={n}]")
}

/// The q-Onsager relations for every `k, l ≤ depth`; needs `set.top() ≥ depth + 1`.
pub fn check_qons(ctx: &ParameterContext, set: &GeneratorSet, depth: usize) -> Result<Vec<ReportEntry>> {
    if set.top() < depth + 1 {
        return Err(Error::MissingGenerator(format!(
            "W_-{} (q-Onsager depth {depth} needs the set extended through {})",
            depth + 1,
            depth + 1
        )));
    }
    let n = set.level();
    let t = ctx.q_half();
    let s = ctx.q_sum();
    let rho = rho_constant(ctx);
    let (w0, w1) = (set.w_minus(0)?, set.w_plus(1)?);
    let anchor = "q-onsager";
    let mut mixed = Family::new(tag("qons.w_w", n), anchor);
    let mut left = Family::new(tag("qons.w0_g", n), anchor);
    let mut right = Family::new(tag("qons.g_w1", n), anchor);
    let mut abelian_w = Family::new(tag("qons.w_commute", n), anchor);
    let mut abelian_g = Family::new(tag("qons.g_commute", n), anchor);
    for k in 0..=depth {
        let (g, gt) = (set.g(k + 1)?, set.g_tilde(k + 1)?);
        let diff = (gt - g) / s;
        mixed.record(relative_residual(&commutator(w0, set.w_plus(k + 1)?), &diff), || format!("[W_0,W_{}]", k + 1));
        mixed.record(relative_residual(&commutator(set.w_minus(k)?, w1), &diff), || format!("[W_-{k},W_1]"));
        let down = (set.w_minus(k + 1)? - set.w_plus(k + 1)?) * rho;
        left.record(relative_residual(&q_commutator(w0, g, t), &down), || format!("[W_0,G_{}]_q", k + 1));
        left.record(relative_residual(&q_commutator(gt, w0, t), &down), || format!("[Gt_{},W_0]_q", k + 1));
        let up = (set.w_plus(k + 2)? - set.w_minus(k)?) * rho;
        right.record(relative_residual(&q_commutator(g, w1, t), &up), || format!("[G_{},W_1]_q", k + 1));
        right.record(relative_residual(&q_commutator(w1, gt, t), &up), || format!("[W_1,Gt_{}]_q", k + 1));
        abelian_w.record(commutes(w0, set.w_minus(k)?), || format!("[W_0,W_-{k}]"));
        abelian_w.record(commutes(w1, set.w_plus(k + 1)?), || format!("[W_1,W_{}]", k + 1));
        for l in 0..=depth {
            let (gl, gtl) = (set.g(l + 1)?, set.g_tilde(l + 1)?);
            abelian_g.record(commutes(g, gl), || format!("[G_{},G_{}]", k + 1, l + 1));
            abelian_g.record(commutes(gt, gtl), || format!("[Gt_{},Gt_{}]", k + 1, l + 1));
            abelian_g.record(commutators_cancel(gt, gl, g, gtl), || format!("[Gt_{},G_{}]+[G_{},Gt_{}]", k + 1, l + 1, k + 1, l + 1));
        }
    }
    Ok([mixed, left, right, abelian_w, abelian_g].into_iter().map(|f| f.finish(ctx, n)).collect())
}

/// The commutation structure implied by mutually commuting charges, over the natural range.
pub fn check_opcom(ctx: &ParameterContext, set: &GeneratorSet) -> Result<Vec<ReportEntry>> {
    let n = set.level();
    let mut w = Family::new(tag("opcom.w", n), "charge-commutation");
    let mut g = Family::new(tag("opcom.g", n), "charge-commutation");
    let mut wg = Family::new(tag("opcom.w_g", n), "charge-commutation");
    for k in 0..n {
        let (wmk, wpk, gk, gtk) = (set.w_minus(k)?, set.w_plus(k + 1)?, set.g(k + 1)?, set.g_tilde(k + 1)?);
        for l in 0..n {
            let (wml, wpl, gl, gtl) = (set.w_minus(l)?, set.w_plus(l + 1)?, set.g(l + 1)?, set.g_tilde(l + 1)?);
            let at = |what: &'static str| move || format!("{what} k={k} l={l}");
            w.record(commutes(wmk, wml), at("[W_-k,W_-l]"));
            w.record(commutes(wpk, wpl), at("[W_k+1,W_l+1]"));
            w.record(commutators_cancel(wmk, wpl, wpk, wml), at("[W_-k,W_l+1]+[W_k+1,W_-l]"));
            g.record(commutes(gk, gl), at("[G_k+1,G_l+1]"));
            g.record(commutes(gtk, gtl), at("[Gt_k+1,Gt_l+1]"));
            g.record(commutators_cancel(gtk, gl, gk, gtl), at("[Gt_k+1,G_l+1]+[G_k+1,Gt_l+1]"));
            wg.record(commutators_cancel(wpk, gl, gk, wpl), at("[W_k+1,G_l+1]+[G_k+1,W_l+1]"));
            wg.record(commutators_cancel(wpk, gtl, gtk, wpl), at("[W_k+1,Gt_l+1]+[Gt_k+1,W_l+1]"));
            wg.record(commutators_cancel(wmk, gl, gk, wml), at("[W_-k,G_l+1]+[G_k+1,W_-l]"));
            wg.record(commutators_cancel(wmk, gtl, gtk, wml), at("[W_-k,Gt_l+1]+[Gt_k+1,W_-l]"));
        }
    }
    Ok([w, g, wg].into_iter().map(|f| f.finish(ctx, n)).collect())
}

/// The level-`N` linear relations for `l = 0..=l_max`; needs `set.top() ≥ N + l_max`.
///
/// The `W` relations are genuine tests because the extended `W`'s come from the
/// q-Onsager relations. The `G` and `G̃` relations define the extended `G`'s, so
/// they are reported separately, and their difference is tested with
/// `G̃_m − G_m = (q^{1/2}+q^{-1/2})[W_0, W_m]` substituted for every extended `m`.
pub fn check_closure(ctx: &ParameterContext, set: &GeneratorSet, l_max: usize) -> Result<Vec<ReportEntry>> {
    let n = set.level();
    if set.top() < n + l_max {
        return Err(Error::MissingGenerator(format!("W_-{} (closure through l = {l_max})", n + l_max)));
    }
    let lead = closure_lead(ctx, n)?;
    let c = coeff_c_table(ctx, n)?;
    let s = ctx.q_sum();
    let w0 = set.w_minus(0)?;
    let anchor = "closure-relations";
    let mut c1 = Family::new(tag("closure.c1", n), anchor);
    let mut c2 = Family::new(tag("closure.c2", n), anchor);
    let mut c34 = Family::new(tag("closure.c3_c4_definitional", n), anchor);
    let mut diff = Family::new(tag("closure.c4_minus_c3", n), anchor);
    let g_diff = |m: usize| -> Result<CMatrix> {
        if set.is_natural(crate::generators::GeneratorKind::G, m) {
            Ok(set.g_tilde(m)? - set.g(m)?)
        } else {
            Ok(commutator(w0, set.w_plus(m)?) * s)
        }
    };
    // lead·X_base against Σ_k C_{-k+1} X_{base+k}
    let combination = |f: &dyn Fn(usize) -> Result<CMatrix>, base: usize| -> Result<(CMatrix, CMatrix)> {
        let lhs = f(base)? * lead;
        let mut rhs = CMatrix::zeros(lhs.dim());
        for k in 1..=n {
            rhs = rhs + f(base + k)? * c[k - 1];
        }
        Ok((lhs, rhs))
    };
    for l in 0..=l_max {
        let (lhs, rhs) = combination(&|i| Ok(set.w_minus(i)?.clone()), l)?;
        c1.record(relative_residual(&lhs, &rhs), || format!("l={l}"));
        let (lhs, rhs) = combination(&|i| Ok(set.w_plus(i)?.clone()), l + 1)?;
        c2.record(relative_residual(&lhs, &rhs), || format!("l={l}"));
        let (lhs, rhs) = combination(&|i| Ok(set.g(i)?.clone()), l + 1)?;
        c34.record(relative_residual(&lhs, &rhs), || format!("G l={l}"));
        let (lhs, rhs) = combination(&|i| Ok(set.g_tilde(i)?.clone()), l + 1)?;
        c34.record(relative_residual(&lhs, &rhs), || format!("Gt l={l}"));
        let (lhs, rhs) = combination(&g_diff, l + 1)?;
        diff.record(relative_residual(&lhs, &rhs), || format!("l={l}"));
    }
    let mut out: Vec<ReportEntry> = [c1, c2, diff].into_iter().map(|f| f.finish(ctx, n)).collect();
    let definitional = c34.finish(ctx, n);
    let note = format!(
        "{}; definitional for extended indices",
        definitional.detail.as_deref().unwrap_or_default()
    );
    out.push(definitional.detail(note));
    Ok(out)
}

pub fn check_tridiagonal(ctx: &ParameterContext, set: &GeneratorSet) -> Result<ReportEntry> {
    let (a, a_star) = (set.w_minus(0)?, set.w_plus(1)?);
    let n = set.level();
    let t = ctx.q_half();
    let rho = rho_constant(ctx);
    let nested = |x: &CMatrix, y: &CMatrix| commutator(x, &q_commutator(x, &q_commutator(x, y, t), t.inv()));
    let first = relative_residual(&nested(a, a_star), &(commutator(a, a_star) * rho));
    let second = relative_residual(&nested(a_star, a), &(commutator(a_star, a) * rho));
    Ok(ReportEntry::new(tag("tridiagonal", n), "tridiagonal-relations", worst(first, second), ctx.tol())
        .level(n)
        .spin(ctx.spin())
        .detail(format!("A-relation {first:.2e}, A*-relation {second:.2e}")))
}

/// `c0/(q^{1/2}+q^{-1/2})² [X, [Y, X]_q]_q + Y`, the shape shared by the
/// `W_{-1}` and `W_2` identifications.
fn nested_shift(ctx: &ParameterContext, x: &CMatrix, y: &CMatrix, outer_left: bool) -> CMatrix {
    let t = ctx.q_half();
    let s = ctx.q_sum();
    let inner = q_commutator(y, x, t);
    let outer = if outer_left { q_commutator(x, &inner, t) } else { q_commutator(&inner, y, t) };
    let tail = if outer_left { y } else { x };
    outer * (ctx.c0() / (s * s)) + tail
}

/// Askey-Wilson relations and the one-site identifications; `set` must be at level 1.
/// The truncation family also covers the extended range when `set.top() ≥ 1`.
pub fn check_aw(ctx: &ParameterContext, set: &GeneratorSet) -> Result<Vec<ReportEntry>> {
    if set.level() != 1 {
        return Err(Error::InvalidParameter(format!("Askey-Wilson check needs level 1, got {}", set.level())));
    }
    let (a, a_star) = (set.w_minus(0)?, set.w_plus(1)?);
    let s = ctx.q_sum();
    let c0 = ctx.c0();
    let q_sum_full = ctx.q() + ctx.q().inv();
    let casimir = ctx.v2_sum() * casimir_weight(ctx) / c0;
    let cubic = |x: &CMatrix, y: &CMatrix| x.dot(x).dot(y) + y.dot(x).dot(x) - x.dot(y).dot(x) * q_sum_full;
    let target = |x: &CMatrix, y: &CMatrix| y * (s * s / c0) - x * casimir;
    let first = relative_residual(&cubic(a, a_star), &target(a, a_star));
    let second = relative_residual(&cubic(a_star, a), &target(a_star, a));
    let aw = ReportEntry::new("relations.askey_wilson[N=1]", "askey-wilson", worst(first, second), ctx.tol())
        .level(1)
        .spin(ctx.spin())
        .detail(format!("first {first:.2e}, second {second:.2e}"));

    // At one site the closure relation makes every W proportional to W_0 or W_1.
    let ratio = closure_lead(ctx, 1)? / coeff_c_table(ctx, 1)?[0];
    let w_minus1 = nested_shift(ctx, a, a_star, true);
    let w_2 = nested_shift(ctx, a, a_star, false);
    let r = worst(relative_residual(&w_minus1, &(a * ratio)), relative_residual(&w_2, &(a_star * ratio)));
    let mut out = vec![
        aw,
        ReportEntry::new("relations.id_w1[N=1]", "askey-wilson", r, ctx.tol())
            .level(1)
            .spin(ctx.spin())
            .detail("nested q-commutator forms of W_-1 and W_2 against the closure relation"),
    ];
    if set.top() >= 1 {
        let mut prop = Family::new("relations.one_site_truncation[N=1]".into(), "closure-relations");
        for l in 0..set.top() {
            prop.record(relative_residual(&(set.w_minus(l)? * ratio), set.w_minus(l + 1)?), || format!("W_-{l}"));
            prop.record(relative_residual(&(set.w_plus(l + 1)? * ratio), set.w_plus(l + 2)?), || format!("W_{}", l + 1));
            prop.record(relative_residual(&(set.g(l + 1)? * ratio), set.g(l + 2)?), || format!("G_{}", l + 1));
        }
        out.push(prop.finish(ctx, 1));
    }
    Ok(out)
}

/// The two-site generalisation of the Askey-Wilson relations, the quadratic
/// expressions for `G_2`, `G̃_2` and the nested forms of `W_{-2}`, `W_3`;
/// `set` must be at level 2.
pub fn check_aw2(ctx: &ParameterContext, set: &GeneratorSet) -> Result<Vec<ReportEntry>> {
    if set.level() != 2 {
        return Err(Error::InvalidParameter(format!("AW2 check needs level 2, got {}", set.level())));
    }
    ctx.require_deformed("check_aw2")?;
    let (a, a_star) = (set.w_minus(0)?, set.w_plus(1)?);
    let (g2, gt2) = (set.g(2)?, set.g_tilde(2)?);
    let t = ctx.q_half();
    let (q, s, d, c0) = (ctx.q(), ctx.q_sum(), ctx.q_diff(), ctx.c0());
    let v = ctx.v();
    let w = casimir_weight(ctx);
    let v2 = ctx.v2_sum();
    let qc = |x: &CMatrix, y: &CMatrix| q_commutator(x, y, t);
    let spin = ctx.spin();
    let entry = |name: &str, r: f64, detail: String| {
        ReportEntry::new(format!("relations.{name}[N=2]"), "askey-wilson-two-site", r, ctx.tol())
            .level(2)
            .spin(spin)
            .detail(detail)
    };

    let drive = v2 * w * 2.0 / (s * s);
    let linear = v2 * w * 2.0 / c0;
    let shift = s * s / c0 + v2 * v2 * w * w / (c0 * s * s);
    let rhs = |x: &CMatrix, y: &CMatrix| {
        qc(x, &qc(y, x)) * drive + q_commutator(y, &qc(y, x), t.inv()) + y * linear - x * shift
    };
    let first = relative_residual(&qc(a, g2), &rhs(a, a_star));
    let second = relative_residual(&qc(g2, a_star), &rhs(a_star, a));
    let symmetric = worst(relative_residual(&qc(gt2, a), &qc(a, g2)), relative_residual(&qc(a_star, gt2), &qc(g2, a_star)));
    let mut out = vec![
        entry("aw2", worst(first, second), format!("first {first:.2e}, second {second:.2e}")),
        entry("aw2_tilde_symmetry", symmetric, "[Gt_2,A]_q = [A,G_2]_q and [G_2,A*]_q = [A*,Gt_2]_q".into()),
    ];

    let q2 = q * q;
    let alpha0 = 2.0 / (c0 * d) * (w * w / (s * s) - 1.0) * (1.0 - (v.powi(4) + v.powi(-4)) / (q + q.inv()));
    let alpha1 = -c0 * d / (q2 - q2.inv());
    let alpha2 = c0 * (q + q.inv()) / ((q - q.inv()) * s);
    let alpha3 = -c0 * s / (q2 - q2.inv());
    let id = eye(a.nrows());
    let squares = (a.dot(a) + a_star.dot(a_star)) * (d / (q + q.inv()));
    let quadratic = |x: &CMatrix, y: &CMatrix| {
        let qcx = qc(x, y);
        let cx = commutator(x, y);
        q_commutator(&x.dot(x), &y.dot(y), q) * alpha1 + qcx.dot(&qcx) * alpha2 + cx.dot(&cx) * alpha3
            + &squares
            + &id * alpha0
    };
    let g_form = relative_residual(&quadratic(a_star, a), g2);
    let gt_form = relative_residual(&quadratic(a, a_star), gt2);
    let w_forms = worst(
        relative_residual(&nested_shift(ctx, a, a_star, true), set.w_minus(1)?),
        relative_residual(&nested_shift(ctx, a, a_star, false), set.w_plus(2)?),
    );
    out.push(entry(
        "id2",
        worst(worst(g_form, gt_form), w_forms),
        format!(
            "G_2 {g_form:.2e}, Gt_2 {gt_form:.2e}, W_-1/W_2 {w_forms:.2e}; alpha = [{}, {}, {}, {}]",
            fmt_c(alpha0),
            fmt_c(alpha1),
            fmt_c(alpha2),
            fmt_c(alpha3)
        ),
    ));

    // Checked against the closure relation rather than the extension, which
    // uses the same q-commutator form.
    let scale = c0 / (s * s);
    let w_minus2 = qc(a, g2) * scale + set.w_plus(2)?;
    let w_3 = qc(g2, a_star) * scale + set.w_minus(1)?;
    let lead = closure_lead(ctx, 2)?;
    let cc = coeff_c_table(ctx, 2)?;
    let closed_minus = (a * lead - set.w_minus(1)? * cc[0]) / cc[1];
    let closed_plus = (a_star * lead - set.w_plus(2)? * cc[0]) / cc[1];
    let r = worst(relative_residual(&w_minus2, &closed_minus), relative_residual(&w_3, &closed_plus));
    out.push(entry("id_w2", r, "nested forms of W_-2 and W_3 against the closure relation".into()));
    Ok(out)
}

/// At `q = 1`: the Dolan-Grady relations for `W₀`, `W₁` built on `n` sites, and
/// `G₁ = −G̃₁` from the commutator definitions.
pub fn check_classical_limit(ctx: &ParameterContext, n: usize) -> Result<Vec<ReportEntry>> {
    if !ctx.is_classical() {
        return Err(Error::DeformedMode("check_classical_limit"));
    }
    let (a0, a1) = classical_pair(ctx, n)?;
    let rho = rho_constant(ctx);
    let triple = |x: &CMatrix, y: &CMatrix| commutator(x, &commutator(x, &commutator(x, y)));
    let first = relative_residual(&triple(&a0, &a1), &(commutator(&a0, &a1) * rho));
    let second = relative_residual(&triple(&a1, &a0), &(commutator(&a1, &a0) * rho));
    let g1 = q_commutator(&a1, &a0, ONE);
    let gt1 = q_commutator(&a0, &a1, ONE);
    let antisym = relative_residual(&g1, &(-&gt1));
    let spin = ctx.spin();
    Ok(vec![
        ReportEntry::new(format!("relations.classical.dolan_grady[N={n}]"), "dolan-grady", worst(first, second), ctx.tol())
            .level(n)
            .spin(spin)
            .detail(format!("rho = {}", fmt_c(rho))),
        ReportEntry::new(format!("relations.classical.g_antisymmetry[N={n}]"), "classical-limit", antisym, 0.0)
            .level(n)
            .spin(spin)
            .detail("G_1 + Gt_1 at q = 1, exact"),
    ])
}

fn fmt_c(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{z}")
    }
}
