//! The fundamental generators `W_{-k}`, `W_{k+1}`, `G_{k+1}`, `G̃_{k+1}` at level
//! `N`, built two ways: by the tensor-product recursion from the one-site
//! representation, and by unmixing the Laurent coefficients of a dressed K-matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentMatrix, LaurentScalar};
use crate::linalg::{eye, kron, q_commutator, relative_residual, worst, CMatrix, C64};
use crate::params::ParameterContext;
use crate::quantum_algebra::{pauli_decompose, spin_rep, SpinRep};
use crate::report::ReportEntry;
use crate::scalars::{casimir_weight, closure_lead, coeff_c_table, omega0, poly_p_table, rho_constant, y_poly};
use crate::yang_baxter::KMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// `W_{-k}`, `k ≥ 0`.
    WMinus,
    /// `W_{k}`, `k ≥ 1`.
    WPlus,
    /// `G_{k}`, `k ≥ 1`.
    G,
    /// `G̃_{k}`, `k ≥ 1`.
    GTilde,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 4] =
        [GeneratorKind::WMinus, GeneratorKind::WPlus, GeneratorKind::G, GeneratorKind::GTilde];

    fn slot(self) -> usize {
        self as usize
    }

    /// Smallest valid index: 0 for `W_{-k}`, 1 otherwise.
    pub fn first_index(self) -> usize {
        match self {
            GeneratorKind::WMinus => 0,
            _ => 1,
        }
    }

    pub fn label(self, index: usize) -> String {
        match self {
            GeneratorKind::WMinus => format!("W_-{index}"),
            GeneratorKind::WPlus => format!("W_{index}"),
            GeneratorKind::G => format!("G_{index}"),
            GeneratorKind::GTilde => format!("Gt_{index}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Recursion,
    Dressing,
    QonsExtension,
    ClosureExtension,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub matrix: CMatrix,
    pub provenance: Provenance,
}

/// Generators at one level. Position `i` of each family holds index
/// `first_index + i`, so all four families share the same length and
/// `top()` is the largest `k` with `W_{-k}` present.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSet {
    level: usize,
    dim: usize,
    families: [Vec<Generator>; 4],
}

impl GeneratorSet {
    fn from_matrices(level: usize, families: [Vec<CMatrix>; 4], provenance: Provenance) -> Self {
        let dim = families[0][0].nrows();
        let families = families.map(|f| f.into_iter().map(|matrix| Generator { matrix, provenance }).collect());
        Self { level, dim, families }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn quantum_dim(&self) -> usize {
        self.dim
    }

    pub fn top(&self) -> usize {
        self.families[0].len() - 1
    }

    /// Largest index of the natural range, `N − 1` in the `W_{-k}` labelling.
    pub fn natural_top(&self) -> usize {
        self.level - 1
    }

    fn position(&self, kind: GeneratorKind, index: usize) -> Result<usize> {
        let first = kind.first_index();
        if index < first {
            return Err(Error::IndexOutOfRange { index, range: format!("{first}..") });
        }
        let pos = index - first;
        if pos >= self.families[kind.slot()].len() {
            return Err(Error::MissingGenerator(kind.label(index)));
        }
        Ok(pos)
    }

    pub fn generator(&self, kind: GeneratorKind, index: usize) -> Result<&Generator> {
        let pos = self.position(kind, index)?;
        Ok(&self.families[kind.slot()][pos])
    }

    pub fn get(&self, kind: GeneratorKind, index: usize) -> Result<&CMatrix> {
        Ok(&self.generator(kind, index)?.matrix)
    }

    pub fn get_mut(&mut self, kind: GeneratorKind, index: usize) -> Result<&mut CMatrix> {
        let pos = self.position(kind, index)?;
        Ok(&mut self.families[kind.slot()][pos].matrix)
    }

    /// `W_{-k}`.
    pub fn w_minus(&self, k: usize) -> Result<&CMatrix> {
        self.get(GeneratorKind::WMinus, k)
    }

    /// `W_{k}`, `k ≥ 1`.
    pub fn w_plus(&self, k: usize) -> Result<&CMatrix> {
        self.get(GeneratorKind::WPlus, k)
    }

    pub fn g(&self, k: usize) -> Result<&CMatrix> {
        self.get(GeneratorKind::G, k)
    }

    pub fn g_tilde(&self, k: usize) -> Result<&CMatrix> {
        self.get(GeneratorKind::GTilde, k)
    }

    /// `(kind, index, generator)` for every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (GeneratorKind, usize, &Generator)> + '_ {
        GeneratorKind::ALL.into_iter().flat_map(move |kind| {
            self.families[kind.slot()].iter().enumerate().map(move |(i, g)| (kind, i + kind.first_index(), g))
        })
    }

    /// Whether `index` of `kind` lies in the natural range of this level.
    pub fn is_natural(&self, kind: GeneratorKind, index: usize) -> bool {
        index - kind.first_index() < self.level
    }

    /// A copy holding only the natural entries.
    pub fn natural(&self) -> Self {
        let mut out = self.clone();
        for f in &mut out.families {
            f.truncate(self.level);
        }
        out
    }

    fn push(&mut self, kind: GeneratorKind, matrix: CMatrix, provenance: Provenance) {
        self.families[kind.slot()].push(Generator { matrix, provenance });
    }
}

/// The one-site generators.
pub fn base_set(ctx: &ParameterContext, rep: &SpinRep) -> Result<GeneratorSet> {
    ctx.require_deformed("base_set")?;
    let (w0, w1, g1, gt1) = site_terms(ctx, rep);
    Ok(GeneratorSet::from_matrices(1, [vec![w0], vec![w1], vec![g1], vec![gt1]], Provenance::Recursion))
}

/// The single-site pieces shared by the base set and the first lift formulas.
fn site_terms(ctx: &ParameterContext, rep: &SpinRep) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let (v, qq, c0) = (ctx.v(), ctx.q_quarter(), ctx.c0());
    let (sp, sm) = (rep.s_plus(), rep.s_minus());
    let (s, d) = (ctx.q_sum(), ctx.q_diff());
    let q_half_up = rep.q_pow_s3(1);
    let q_half_down = rep.q_pow_s3(-1);
    let w0 = sp.dot(&q_half_up) * (v * qq / c0) + sm.dot(&q_half_up) / (qq * v);
    let w1 = sp.dot(&q_half_down) / (qq * v * c0) + sm.dot(&q_half_down) * (v * qq);
    let casimir = eye(rep.dim()) * (ctx.v2_sum() * casimir_weight(ctx) / (c0 * d));
    let cartan = |a: i32| (rep.q_pow_s3(2 * a) * (v * v) + rep.q_pow_s3(-2 * a) / (v * v)) * (s / (c0 * d));
    let qm = ctx.q_minus_inv();
    let g1 = &casimir - &cartan(1) + sm.dot(sm) * qm;
    let gt1 = &casimir - &cartan(-1) + sp.dot(sp) * (qm / (c0 * c0));
    (w0, w1, g1, gt1)
}

/// Extends `set` until `W_{-k_max}` is present: the `W`'s through the
/// q-Onsager relations, `G` and `G̃` through the level-`N` closure relations.
pub fn extend(ctx: &ParameterContext, set: &GeneratorSet, k_max: usize) -> Result<GeneratorSet> {
    let n = set.level;
    let mut out = set.clone();
    if k_max <= out.top() {
        return Ok(out);
    }
    let rho_inv = rho_constant(ctx).inv();
    let t = ctx.q_half();
    let lead = closure_lead(ctx, n)?;
    let c = coeff_c_table(ctx, n)?;
    let c_top = c[n - 1];
    let scale = c.iter().map(|x| x.norm()).fold(lead.norm(), f64::max);
    if c_top.norm().is_nan() || c_top.norm() <= 1e-12 * scale {
        return Err(Error::Singular(format!("closure coefficient C_{{-{}}} = {c_top} is numerically zero", n - 1)));
    }
    for idx in out.top() + 1..=k_max {
        let w0 = out.w_minus(0)?.clone();
        let w1 = out.w_plus(1)?.clone();
        let g = out.g(idx)?.clone();
        let w_minus = out.w_plus(idx)? + &(q_commutator(&w0, &g, t) * rho_inv);
        let w_plus = out.w_minus(idx - 1)? + &(q_commutator(&g, &w1, t) * rho_inv);
        out.push(GeneratorKind::WMinus, w_minus, Provenance::QonsExtension);
        out.push(GeneratorKind::WPlus, w_plus, Provenance::QonsExtension);
        let l = idx - n;
        for kind in [GeneratorKind::G, GeneratorKind::GTilde] {
            let mut acc = out.get(kind, l + 1)? * lead;
            for k in 1..n {
                acc = acc - out.get(kind, k + l + 1)? * c[k - 1];
            }
            out.push(kind, acc / c_top, Provenance::ClosureExtension);
        }
    }
    Ok(out)
}

/// The tensor-product recursion from level `N` to `N+1`; the new site is
/// the left tensor factor. `set` must be extended through index `N`.
pub fn lift(ctx: &ParameterContext, set: &GeneratorSet, rep: &SpinRep) -> Result<GeneratorSet> {
    ctx.require_deformed("lift")?;
    let n = set.level;
    if set.top() < n {
        return Err(Error::MissingGenerator(format!("{} (lift needs indices through {n})", GeneratorKind::WMinus.label(n))));
    }
    ctx.check_dim(set.dim * rep.dim())?;
    let (v, qq, c0) = (ctx.v(), ctx.q_quarter(), ctx.c0());
    let (s, d, qm) = (ctx.q_sum(), ctx.q_diff(), ctx.q_minus_inv());
    let v2 = ctx.v2_sum();
    let w = casimir_weight(ctx);
    let (sp, sm) = (rep.s_plus(), rep.s_minus());
    let site_id = rep.identity();
    let id = eye(set.dim);
    let q = |twice_alpha: i32| rep.q_pow_s3(twice_alpha);
    let (wm, wp, g, gt) = (
        |k| set.w_minus(k).expect("checked"),
        |k| set.w_plus(k).expect("checked"),
        |k| set.g(k).expect("checked"),
        |k| set.g_tilde(k).expect("checked"),
    );
    let feedback = v2 * w / (s * s);
    let (w0_site, w1_site, g1_site, gt1_site) = site_terms(ctx, rep);

    // raising/lowering pieces that multiply the old generators
    let sp_up = sp.dot(&q(1));
    let sp_down = sp.dot(&q(-1));
    let sm_up = sm.dot(&q(1));
    let sm_down = sm.dot(&q(-1));
    let cartan = |a: i32| q(2 * a) * (v * v) + q(-2 * a) / (v * v);

    let mut n_wm = vec![kron(&w0_site, &id) + kron(&q(2), wm(0))];
    let mut n_wp = vec![kron(&w1_site, &id) + kron(&q(-2), wp(1))];
    let mut n_g = vec![
        kron(&g1_site, &id)
            + kron(&site_id, g(1))
            + (kron(&(&sm_up * (v / qq)), wm(0)) + kron(&(&sm_down * (qq / v)), wp(1))) * qm,
    ];
    let mut n_gt = vec![
        kron(&gt1_site, &id)
            + kron(&site_id, gt(1))
            + (kron(&(&sp_up * (qq / v)), wm(0)) + kron(&(&sp_down * (v / qq)), wp(1))) * (qm / c0),
    ];
    let shift_up = (&site_id * w - &q(2) * s) / s;
    let shift_down = (&site_id * w - &q(-2) * s) / s;
    let sm2 = sm.dot(sm);
    let sp2 = sp.dot(sp);
    for k in 0..n {
        let next_wm = kron(&shift_up, wp(k + 1)) - kron(&site_id, wm(k)) * (v2 / s)
            + &n_wm[k] * feedback
            + (kron(&(&sp_up * (v * qq)), g(k + 1)) + kron(&(&sm_up / (qq * v)), gt(k + 1)) * c0) * (d / (s * s))
            + kron(&q(2), wm(k + 1));
        let next_wp = kron(&shift_down, wm(k)) - kron(&site_id, wp(k + 1)) * (v2 / s)
            + &n_wp[k] * feedback
            + (kron(&(&sp_down / (qq * v)), g(k + 1)) + kron(&(&sm_down * (v * qq)), gt(k + 1)) * c0)
                * (d / (s * s))
            + kron(&q(-2), wp(k + 2));
        let a = wm(k + 1) - wp(k + 1);
        let b = wp(k + 2) - wm(k);
        let next_g = kron(&sm2, gt(k + 1)) * (c0 * d * d / s) - kron(&cartan(1), g(k + 1)) / s
            + kron(&site_id, g(k + 2))
            + (kron(&(&sm_up * (v / qq)), &a) + kron(&(&sm_down * (qq / v)), &b)) * qm
            + &n_g[k] * feedback;
        let next_gt = kron(&sp2, g(k + 1)) * (d * d / (c0 * s)) - kron(&cartan(-1), gt(k + 1)) / s
            + kron(&site_id, gt(k + 2))
            + (kron(&(&sp_up * (qq / v)), &a) + kron(&(&sp_down * (v / qq)), &b)) * (qm / c0)
            + &n_gt[k] * feedback;
        n_wm.push(next_wm);
        n_wp.push(next_wp);
        n_g.push(next_g);
        n_gt.push(next_gt);
    }
    Ok(GeneratorSet::from_matrices(n + 1, [n_wm, n_wp, n_g, n_gt], Provenance::Recursion))
}

/// Natural generator sets for levels `1..=n`, each lifted from the previous one.
pub fn lift_chain(ctx: &ParameterContext, n: usize) -> Result<Vec<GeneratorSet>> {
    let rep = spin_rep(ctx, ctx.spin())?;
    let mut chain = vec![base_set(ctx, &rep)?];
    while chain.len() < n {
        let last = chain.last().expect("non-empty");
        let next = lift(ctx, &extend(ctx, last, last.level)?, &rep)?;
        chain.push(next);
    }
    Ok(chain)
}

/// Scalar parts of the ansatz: the `Ω₊` and `Ω₋` terms proportional to the identity.
fn scalar_parts(ctx: &ParameterContext, p0: &LaurentScalar, n: usize) -> Result<(LaurentScalar, LaurentScalar)> {
    let d = ctx.q_diff();
    let c0 = ctx.c0();
    let yp = &y_poly(ctx) * p0;
    let w = omega0(ctx, n)?;
    let plus = &yp.scale((c0 * d).inv()) + &LaurentScalar::constant(w);
    let minus = &yp.scale(d.inv()) + &LaurentScalar::constant(c0 * w);
    Ok((plus, minus))
}

/// Assembles `K^{(N)}(u)` from the natural generators and the scalar sequences.
pub fn reconstruct_k(ctx: &ParameterContext, set: &GeneratorSet) -> Result<KMatrix> {
    let n = set.level;
    if n == 0 {
        return Err(Error::InvalidParameter("no generators at level 0".into()));
    }
    let p = poly_p_table(ctx, n)?;
    let t = ctx.q_half();
    let s = ctx.q_sum();
    let c0 = ctx.c0();
    let dim = set.dim;
    let up = LaurentScalar::monomial(1, t);
    let down = LaurentScalar::monomial(-1, -t.inv());
    let mut tl = LaurentMatrix::zero(dim);
    let mut br = LaurentMatrix::zero(dim);
    let mut plus = LaurentMatrix::zero(dim);
    let mut minus = LaurentMatrix::zero(dim);
    for (k, pk) in p.iter().enumerate() {
        let (wm, wp) = (set.w_minus(k)?, set.w_plus(k + 1)?);
        let (pu, pd) = (&up * pk, &down * pk);
        tl = &(&tl + &LaurentMatrix::from_scalar(&pu, wm)) + &LaurentMatrix::from_scalar(&pd, wp);
        br = &(&br + &LaurentMatrix::from_scalar(&pu, wp)) + &LaurentMatrix::from_scalar(&pd, wm);
        plus = &plus + &LaurentMatrix::from_scalar(&pk.scale(s.inv()), set.g(k + 1)?);
        minus = &minus + &LaurentMatrix::from_scalar(&pk.scale(c0 / s), set.g_tilde(k + 1)?);
    }
    let (sp, sm) = scalar_parts(ctx, &p[0], n)?;
    let id = eye(dim);
    plus = &plus + &LaurentMatrix::from_scalar(&sp, &id);
    minus = &minus + &LaurentMatrix::from_scalar(&sm, &id);
    KMatrix::new(n, [[tl, plus], [minus, br]])
}

/// Recovers the natural generators from a dressed `K^{(N)}` by matching Laurent
/// coefficients against the ansatz, from the highest degree downward.
pub fn from_dressing(ctx: &ParameterContext, k: &KMatrix) -> Result<GeneratorSet> {
    let n = k.level();
    if n == 0 {
        return Err(Error::InvalidParameter("no generators at level 0".into()));
    }
    let p = poly_p_table(ctx, n)?;
    let t = ctx.q_half();
    let s = ctx.q_sum();
    let c0 = ctx.c0();
    let dim = k.quantum_dim();
    let pauli = pauli_decompose(k);
    let (tl, br) = (pauli.diag_plus(), pauli.diag_minus());
    let (sp, sm) = scalar_parts(ctx, &p[0], n)?;
    let id = eye(dim);
    let plus = &pauli.plus - &LaurentMatrix::from_scalar(&sp, &id);
    let minus = &pauli.minus - &LaurentMatrix::from_scalar(&sm, &id);
    let ni = n as i32;

    let lead = |m: usize| p[m].coeff(2 * (ni - 1 - m as i32));
    let solve = |rhs: CMatrix, pivot: C64, m: usize| -> Result<CMatrix> {
        if pivot.norm() < 1e-300 {
            return Err(Error::Singular(format!("leading coefficient of P_-{m} vanishes")));
        }
        Ok(rhs / pivot)
    };

    let mut wm: Vec<CMatrix> = Vec::with_capacity(n);
    let mut wp: Vec<CMatrix> = Vec::with_capacity(n);
    for m in 0..n {
        let deg = 2 * ni - 1 - 2 * m as i32;
        let inner = 2 * (ni - 1 - m as i32);
        let mut rhs_m = tl.coeff_or_zero(deg);
        let mut rhs_p = br.coeff_or_zero(deg);
        for j in 0..m {
            let a = p[j].coeff(inner) * t;
            let b = p[j].coeff(inner + 2) / t;
            rhs_m = rhs_m - &wm[j] * a + &wp[j] * b;
            rhs_p = rhs_p - &wp[j] * a + &wm[j] * b;
        }
        let pivot = lead(m) * t;
        wm.push(solve(rhs_m, pivot, m)?);
        wp.push(solve(rhs_p, pivot, m)?);
    }

    let mut g: Vec<CMatrix> = Vec::with_capacity(n);
    let mut gt: Vec<CMatrix> = Vec::with_capacity(n);
    for m in 0..n {
        let deg = 2 * (ni - 1 - m as i32);
        let mut rhs_g = plus.coeff_or_zero(deg);
        let mut rhs_gt = minus.coeff_or_zero(deg);
        for j in 0..m {
            let a = p[j].coeff(deg);
            rhs_g = rhs_g - &g[j] * (a / s);
            rhs_gt = rhs_gt - &gt[j] * (a * c0 / s);
        }
        g.push(solve(rhs_g, lead(m) / s, m)?);
        gt.push(solve(rhs_gt, lead(m) * c0 / s, m)?);
    }

    let set = GeneratorSet::from_matrices(n, [wm, wp, g, gt], Provenance::Dressing);
    let residual = reconstruct_k(ctx, &set)?.residual(k)?;
    if residual.is_nan() || residual > ctx.tol() {
        return Err(Error::AnsatzViolation { residual, tol: ctx.tol() });
    }
    Ok(set)
}

/// Per-entry deviations between two sets over their shared natural range.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub max: f64,
    pub entries: Vec<(GeneratorKind, usize, f64)>,
}

pub fn compare(a: &GeneratorSet, b: &GeneratorSet) -> Result<Comparison> {
    if a.level != b.level || a.dim != b.dim {
        return Err(Error::ShapeMismatch(format!(
            "level {} dim {} versus level {} dim {}",
            a.level, a.dim, b.level, b.dim
        )));
    }
    let mut entries = Vec::new();
    for kind in GeneratorKind::ALL {
        for index in kind.first_index()..kind.first_index() + a.level {
            let dev = relative_residual(a.get(kind, index)?, b.get(kind, index)?);
            entries.push((kind, index, dev));
        }
    }
    let max = entries.iter().map(|e| e.2).fold(0.0, worst);
    Ok(Comparison { max, entries })
}

/// Recursion-built against dressing-unmixed generators at one level.
pub fn check_dual_construction(ctx: &ParameterContext, lifted: &GeneratorSet, k: &KMatrix) -> Result<ReportEntry> {
    let unmixed = from_dressing(ctx, k)?;
    let generators = compare(&lifted.natural(), &unmixed)?.max;
    let rebuilt = reconstruct_k(ctx, lifted)?.residual(k)?;
    Ok(ReportEntry::new(
        format!("generators.dual_construction[N={}]", k.level()),
        "tensor-product-representation",
        worst(generators, rebuilt),
        ctx.tol(),
    )
    .level(k.level())
    .spin(ctx.spin())
    .detail(format!("generators {generators:.2e}, reconstructed K {rebuilt:.2e}")))
}

/// The `W` extension through the q-Onsager relations against the same
/// `W` solved from the first closure relation.
pub fn check_extension_consistency(ctx: &ParameterContext, set: &GeneratorSet) -> Result<ReportEntry> {
    let n = set.level;
    let lead = closure_lead(ctx, n)?;
    let c = coeff_c_table(ctx, n)?;
    let mut residual = 0.0f64;
    for l in 0..=set.top().saturating_sub(n) {
        let mut minus = set.w_minus(l)? * lead;
        let mut plus = set.w_plus(l + 1)? * lead;
        for k in 1..n {
            minus = minus - set.w_minus(k + l)? * c[k - 1];
            plus = plus - set.w_plus(k + l + 1)? * c[k - 1];
        }
        residual = worst(residual, relative_residual(&(minus / c[n - 1]), set.w_minus(n + l)?));
        residual = worst(residual, relative_residual(&(plus / c[n - 1]), set.w_plus(n + l + 1)?));
    }
    Ok(ReportEntry::new(format!("generators.extension_consistency[N={n}]"), "closure-relations", residual, ctx.tol())
        .level(n)
        .spin(ctx.spin()))
}

/// `W₀` and `W₁` at `q = 1`, from the two tensor-product formulas that survive the limit.
pub fn classical_pair(ctx: &ParameterContext, n: usize) -> Result<(CMatrix, CMatrix)> {
    if !ctx.is_classical() {
        return Err(Error::DeformedMode("classical_pair"));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("level must be at least 1".into()));
    }
    let rep = spin_rep(ctx, ctx.spin())?;
    ctx.check_dim(rep.dim().pow(n as u32))?;
    let (v, c0) = (ctx.v(), ctx.c0());
    let (sp, sm) = (rep.s_plus(), rep.s_minus());
    let a0_site = sp * (v / c0) + sm / v;
    let a1_site = sp / (v * c0) + sm * v;
    let (mut a0, mut a1) = (a0_site.clone(), a1_site.clone());
    for _ in 1..n {
        let id = eye(a0.nrows());
        let site = rep.identity();
        a0 = kron(&a0_site, &id) + kron(&site, &a0);
        a1 = kron(&a1_site, &id) + kron(&site, &a1);
    }
    Ok((a0, a1))
}
