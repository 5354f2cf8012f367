//! The trigonometric R-matrix, the L-operator, dressed K-matrices and the
//! residual checks for the Yang-Baxter algebra and the reflection equations.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laurent::LaurentMatrix;
use crate::linalg::{eye, frobenius, worst, CMatrix, C64, ZERO};
use crate::params::{ParameterContext, Spin};
use crate::quantum_algebra::{spin_rep, SpinRep};
use crate::report::ReportEntry;
use crate::sampling::{grid_side, line, Grid};

pub type Blocks<T> = [[T; 2]; 2];

/// A 2×2 auxiliary array of Laurent polynomials acting on `(2j+1)^N` sites.
#[derive(Clone, Debug, PartialEq)]
pub struct KMatrix {
    level: usize,
    blocks: Blocks<LaurentMatrix>,
}

impl KMatrix {
    pub fn new(level: usize, blocks: Blocks<LaurentMatrix>) -> Result<Self> {
        let dim = blocks[0][0].dim();
        if blocks.iter().flatten().any(|b| b.dim() != dim) {
            return Err(Error::ShapeMismatch("K-matrix blocks of unequal dimension".into()));
        }
        Ok(Self { level, blocks })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn quantum_dim(&self) -> usize {
        self.blocks[0][0].dim()
    }

    pub fn blocks(&self) -> &Blocks<LaurentMatrix> {
        &self.blocks
    }

    pub fn into_blocks(self) -> Blocks<LaurentMatrix> {
        self.blocks
    }

    pub fn eval(&self, u: C64) -> Blocks<CMatrix> {
        let [[a, b], [c, d]] = &self.blocks;
        [[a.eval(u), b.eval(u)], [c.eval(u), d.eval(u)]]
    }

    /// The full `2D × 2D` matrix at `u`, auxiliary index outermost.
    pub fn eval_full(&self, u: C64) -> CMatrix {
        crate::linalg::block2(&self.eval(u))
    }

    /// Smallest and largest degree over all four blocks.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        self.blocks.iter().flatten().filter_map(LaurentMatrix::degree_range).fold(None, |acc, (lo, hi)| {
            Some(match acc {
                None => (lo, hi),
                Some((a, b)) => (a.min(lo), b.max(hi)),
            })
        })
    }

    /// Coefficient-wise residual, worst block.
    pub fn residual(&self, other: &Self) -> Result<f64> {
        if self.quantum_dim() != other.quantum_dim() {
            return Err(Error::ShapeMismatch(format!(
                "quantum dimensions {} and {}",
                self.quantum_dim(),
                other.quantum_dim()
            )));
        }
        Ok(self
            .blocks
            .iter()
            .flatten()
            .zip(other.blocks.iter().flatten())
            .map(|(a, b)| a.residual(b))
            .fold(0.0, worst))
    }
}

/// `R(u) = ω₀₀ Id + ω₃₃ σ₃⊗σ₃ + (q^{1/2} − q^{-1/2})(σ₊⊗σ₋ + σ₋⊗σ₊)`.
pub fn r_matrix(ctx: &ParameterContext, u: C64) -> Result<CMatrix> {
    if u == ZERO || !u.is_finite() {
        return Err(Error::InvalidParameter(format!("spectral parameter u = {u}")));
    }
    let t = ctx.q_half();
    let half = C64::new(0.5, 0.0);
    let w00 = half * (t + 1.0) * (u - 1.0 / (u * t));
    let w33 = half * (t - 1.0) * (u + 1.0 / (u * t));
    let d = ctx.q_diff();
    let mut r = crate::linalg::zeros(4);
    r[[0, 0]] = w00 + w33;
    r[[1, 1]] = w00 - w33;
    r[[2, 2]] = w00 - w33;
    r[[3, 3]] = w00 + w33;
    r[[1, 2]] = d;
    r[[2, 1]] = d;
    Ok(r)
}

/// The level-one block `L(u)` on the spin-`j` site.
pub fn l_operator(ctx: &ParameterContext, rep: &SpinRep) -> KMatrix {
    let qq = ctx.q_quarter();
    let d = ctx.q_diff();
    let up = rep.q_pow_s3(1);
    let down = rep.q_pow_s3(-1);
    let dim = rep.dim();
    let diag = |a: &CMatrix, b: &CMatrix| {
        LaurentMatrix::from_terms(dim, [(1, a * qq), (-1, b * (-qq.inv()))])
    };
    let blocks = [
        [diag(&up, &down), LaurentMatrix::constant(rep.s_minus() * d)],
        [LaurentMatrix::constant(rep.s_plus() * d), diag(&down, &up)],
    ];
    KMatrix { level: 1, blocks }
}

/// The c-number solution `(σ₊/c0 + σ₋)/(q^{1/2} − q^{-1/2})`.
pub fn k0(ctx: &ParameterContext) -> Result<KMatrix> {
    ctx.require_deformed("k0")?;
    let inv_d = ctx.q_diff().inv();
    let scalar = |x: C64| LaurentMatrix::constant(eye(1) * x);
    Ok(KMatrix {
        level: 0,
        blocks: [
            [LaurentMatrix::zero(1), scalar(inv_d / ctx.c0())],
            [scalar(inv_d), LaurentMatrix::zero(1)],
        ],
    })
}

/// `K^{(N+1)}(u) = L(uv) K^{(N)}(u) L(u/v)` with the new site as the leftmost tensor factor.
pub fn dress(ctx: &ParameterContext, rep: &SpinRep, prev: &KMatrix) -> Result<KMatrix> {
    let dim = rep.dim() * prev.quantum_dim();
    ctx.check_dim(dim)?;
    let l = l_operator(ctx, rep);
    let v = ctx.v();
    let left: Vec<LaurentMatrix> = l.blocks.iter().flatten().map(|b| b.substitute_scaled(v)).collect();
    let right: Vec<LaurentMatrix> =
        l.blocks.iter().flatten().map(|b| b.substitute_scaled(v.inv())).collect();
    let entry = |a: usize, b: usize| {
        let mut acc = LaurentMatrix::zero(dim);
        for c in 0..2 {
            for d in 0..2 {
                let inner = &prev.blocks[c][d];
                if inner.is_zero() {
                    continue;
                }
                let site = &left[2 * a + c] * &right[2 * d + b];
                acc = &acc + &site.kron(inner);
            }
        }
        acc
    };
    Ok(KMatrix { level: prev.level + 1, blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]] })
}

/// `[K^{(0)}, K^{(1)}, …, K^{(n)}]` for the spin of `ctx`.
pub fn dress_chain(ctx: &ParameterContext, n: usize) -> Result<Vec<KMatrix>> {
    let rep = spin_rep(ctx, ctx.spin())?;
    let mut chain = vec![k0(ctx)?];
    for _ in 0..n {
        let next = dress(ctx, &rep, chain.last().expect("chain starts at K0"))?;
        chain.push(next);
    }
    Ok(chain)
}

/// An operator on `aux₁ ⊗ aux₂ ⊗ quantum` stored as 4×4 quantum blocks,
/// row index `2·a₁ + a₂`.
struct AuxOp {
    blocks: Vec<CMatrix>,
}

impl AuxOp {
    fn at(&self, r: usize, c: usize) -> &CMatrix {
        &self.blocks[4 * r + c]
    }

    fn from_fn(f: impl FnMut((usize, usize)) -> CMatrix) -> Self {
        let mut f = f;
        Self { blocks: (0..16).map(|i| f((i / 4, i % 4))).collect() }
    }

    /// `K` acting on the first auxiliary space.
    fn site1(k: &Blocks<CMatrix>) -> Self {
        let zero = CMatrix::zeros(k[0][0].dim());
        Self::from_fn(|(r, c)| {
            if r % 2 == c % 2 {
                k[r / 2][c / 2].clone()
            } else {
                zero.clone()
            }
        })
    }

    /// `K` acting on the second auxiliary space.
    fn site2(k: &Blocks<CMatrix>) -> Self {
        let zero = CMatrix::zeros(k[0][0].dim());
        Self::from_fn(|(r, c)| {
            if r / 2 == c / 2 {
                k[r % 2][c % 2].clone()
            } else {
                zero.clone()
            }
        })
    }

    /// `(R ⊗ Id)·self` for a 4×4 c-number `R`.
    fn scalar_left(&self, r: &CMatrix) -> Self {
        Self::from_fn(|(i, j)| {
            let mut acc = CMatrix::zeros(self.at(0, 0).dim());
            for k in 0..4 {
                if r[[i, k]] != ZERO {
                    acc.scaled_add(r[[i, k]], self.at(k, j));
                }
            }
            acc
        })
    }

    /// `self·(R ⊗ Id)`.
    fn scalar_right(&self, r: &CMatrix) -> Self {
        Self::from_fn(|(i, j)| {
            let mut acc = CMatrix::zeros(self.at(0, 0).dim());
            for k in 0..4 {
                if r[[k, j]] != ZERO {
                    acc.scaled_add(r[[k, j]], self.at(i, k));
                }
            }
            acc
        })
    }

    /// `self·K₁`.
    fn mul_site1(&self, k: &Blocks<CMatrix>) -> Self {
        Self::from_fn(|(i, col)| {
            let (b1, b2) = (col / 2, col % 2);
            self.at(i, b2).dot(&k[0][b1]) + self.at(i, 2 + b2).dot(&k[1][b1])
        })
    }

    /// `self·K₂`.
    fn mul_site2(&self, k: &Blocks<CMatrix>) -> Self {
        Self::from_fn(|(i, col)| {
            let (b1, b2) = (col / 2, col % 2);
            self.at(i, 2 * b1).dot(&k[0][b2]) + self.at(i, 2 * b1 + 1).dot(&k[1][b2])
        })
    }

    fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| frobenius(b).powi(2)).sum::<f64>().sqrt()
    }

    fn relative_residual(&self, other: &Self) -> f64 {
        let diff = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| frobenius(&(a - b)).powi(2))
            .sum::<f64>()
            .sqrt();
        diff / (1.0 + self.norm().max(other.norm()))
    }
}

fn grid_max(pairs: &[(C64, C64)], f: impl Fn(C64, C64) -> Result<f64> + Sync) -> Result<f64> {
    pairs.par_iter().map(|&(u, w)| f(u, w)).try_reduce(|| 0.0, |a, b| Ok(worst(a, b)))
}

/// `R(u/w) L₁(u) L₂(w) = L₂(w) L₁(u) R(u/w)` on a seeded grid.
pub fn check_rll(ctx: &ParameterContext, rep: &SpinRep) -> Result<ReportEntry> {
    let l = l_operator(ctx, rep);
    let grid = Grid::for_level(ctx.seed(), 1);
    let residual = grid_max(&grid.pairs(), |u, w| {
        let r = r_matrix(ctx, u / w)?;
        let (lu, lw) = (l.eval(u), l.eval(w));
        let lhs = AuxOp::site1(&lu).scalar_left(&r).mul_site2(&lw);
        let rhs = AuxOp::site2(&lw).mul_site1(&lu).scalar_right(&r);
        Ok(lhs.relative_residual(&rhs))
    })?;
    Ok(ReportEntry::new(format!("yang_baxter.rll[j={}]", rep.spin()), "yang-baxter-algebra", residual, ctx.tol())
        .spin(rep.spin())
        .detail(format!("{} grid points", grid.len())))
}

/// Max entrywise `|L(u) − R(u)|` for spin 1/2 at `n` seeded points.
pub fn projection_deviation(ctx: &ParameterContext, n: usize) -> Result<f64> {
    let rep = spin_rep(ctx, Spin::HALF)?;
    let l = l_operator(ctx, &rep);
    line(ctx.seed(), n).into_iter().try_fold(0.0, |acc, u| {
        let dev = (&l.eval_full(u) - &r_matrix(ctx, u)?).iter().map(|z| z.norm()).fold(0.0, worst);
        Ok(worst(acc, dev))
    })
}

pub fn check_projection(ctx: &ParameterContext) -> Result<ReportEntry> {
    let dev = projection_deviation(ctx, 20)?;
    Ok(ReportEntry::new("yang_baxter.spin_half_projection", "lax-operator", dev, 1e-12)
        .spin(Spin::HALF)
        .detail("max entrywise deviation at 20 seeded points"))
}

/// Residual of `R₁₂(u/w) K₁(u) R₁₂(uw) K₂(w) = K₂(w) R₁₂(uw) K₁(u) R₁₂(u/w)` at one point.
pub fn reflection_residual(ctx: &ParameterContext, k: &KMatrix, u: C64, w: C64) -> Result<f64> {
    let r_minus = r_matrix(ctx, u / w)?;
    let r_plus = r_matrix(ctx, u * w)?;
    let (ku, kw) = (k.eval(u), k.eval(w));
    let lhs = AuxOp::site1(&ku).scalar_left(&r_minus).scalar_right(&r_plus).mul_site2(&kw);
    let rhs = AuxOp::site2(&kw).scalar_right(&r_plus).mul_site1(&ku).scalar_right(&r_minus);
    Ok(lhs.relative_residual(&rhs))
}

pub fn check_reflection(ctx: &ParameterContext, k: &KMatrix) -> Result<ReportEntry> {
    let grid = Grid::for_level(ctx.seed(), k.level());
    let residual = grid_max(&grid.pairs(), |u, w| reflection_residual(ctx, k, u, w))?;
    Ok(ReportEntry::new(
        format!("yang_baxter.reflection[N={}]", k.level()),
        "reflection-equation",
        residual,
        ctx.tol(),
    )
    .level(k.level())
    .spin(ctx.spin())
    .detail(format!("{} grid points", grid.len())))
}

/// The c-number dual solution with `κ* = κ⁻¹`.
pub fn k_plus(ctx: &ParameterContext, kappa: C64, kappa_plus: C64, kappa_minus: C64) -> Result<KMatrix> {
    if kappa == ZERO || !kappa.is_finite() {
        return Err(Error::InvalidParameter("kappa must be finite and nonzero".into()));
    }
    let t = ctx.q_half();
    let q = ctx.q();
    let s = ctx.q_sum();
    let ks = kappa.inv();
    let scalar = |terms: [(i32, C64); 2]| {
        LaurentMatrix::from_terms(1, terms.into_iter().map(|(d, x)| (d, eye(1) * x)))
    };
    let z = |x: C64| scalar([(2, x * q), (-2, -x / q)]);
    Ok(KMatrix {
        level: 0,
        blocks: [
            [scalar([(1, t * kappa), (-1, ks / t)]), z(kappa_minus * s / ctx.c0())],
            [z(kappa_plus * s), scalar([(1, t * ks), (-1, kappa / t)])],
        ],
    })
}

fn transpose_c_number(k: Blocks<CMatrix>) -> Blocks<CMatrix> {
    let [[a, b], [c, d]] = k;
    [[a, c], [b, d]]
}

/// `R(w/u) K₊ᵀ₁(u) R(1/(q u w)) K₊ᵀ₂(w) = K₊ᵀ₂(w) R(1/(q u w)) K₊ᵀ₁(u) R(w/u)`.
pub fn dual_reflection_residual(ctx: &ParameterContext, kp: &KMatrix, u: C64, w: C64) -> Result<f64> {
    let ra = r_matrix(ctx, w / u)?;
    let rb = r_matrix(ctx, (ctx.q() * u * w).inv())?;
    let ku = transpose_c_number(kp.eval(u));
    let kw = transpose_c_number(kp.eval(w));
    let lhs = AuxOp::site1(&ku).scalar_left(&ra).scalar_right(&rb).mul_site2(&kw);
    let rhs = AuxOp::site2(&kw).scalar_right(&rb).mul_site1(&ku).scalar_right(&ra);
    Ok(lhs.relative_residual(&rhs))
}

pub fn check_dual_reflection(ctx: &ParameterContext, kp: &KMatrix) -> Result<ReportEntry> {
    if kp.quantum_dim() != 1 {
        return Err(Error::ShapeMismatch(format!(
            "dual reflection check needs a c-number K+, got quantum dimension {}",
            kp.quantum_dim()
        )));
    }
    let grid = Grid::new(ctx.seed(), grid_side(2));
    let residual = grid_max(&grid.pairs(), |u, w| dual_reflection_residual(ctx, kp, u, w))?;
    Ok(ReportEntry::new("yang_baxter.dual_reflection", "dual-reflection-equation", residual, ctx.tol())
        .detail("convention-dependent: spectral substitution u -> q^{-1/2}/u with transposed K+"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, kron, relative_residual, ONE};
    use crate::params::Mode;

    fn ctx() -> ParameterContext {
        ParameterContext::deformed(c(0.9, 0.2), c(1.3, -0.4), c(0.7, 0.5), Spin::HALF).unwrap()
    }

    fn embed_site1(k: &Blocks<CMatrix>) -> CMatrix {
        let dim = k[0][0].nrows();
        let mut out = CMatrix::zeros((4 * dim, 4 * dim));
        for a in 0..2 {
            for b in 0..2 {
                let mut unit = crate::linalg::zeros(2);
                unit[[a, b]] = ONE;
                out = out + kron(&kron(&unit, &eye(2)), &k[a][b]);
            }
        }
        out
    }

    fn classical() -> ParameterContext {
        ParameterContext::new(ONE, c(1.3, -0.4), c(0.25, 0.0), Spin::HALF, Mode::Classical).unwrap()
    }

    #[test]
    fn r_matrix_entries() {
        let ctx = ctx();
        let t = ctx.q_half();
        let u = c(1.1, -0.3);
        let r = r_matrix(&ctx, u).unwrap();
        assert!((r[[0, 0]] - (t * u - 1.0 / (t * u))).norm() < 1e-15);
        assert!((r[[1, 2]] - (t - 1.0 / t)).norm() < 1e-15);
        assert!(r_matrix(&ctx, ZERO).is_err());
    }

    #[test]
    fn r_matrix_at_q_one_is_scalar() {
        let u = c(0.7, 0.4);
        let r = r_matrix(&classical(), u).unwrap();
        assert!(relative_residual(&r, &(eye(4) * (u - u.inv()))) < 1e-15);
    }

    #[test]
    fn lax_top_left_at_spin_half() {
        let ctx = ctx();
        let rep = spin_rep(&ctx, Spin::HALF).unwrap();
        let u = c(0.8, 0.6);
        let tl = l_operator(&ctx, &rep).blocks()[0][0].eval(u);
        let t = ctx.q_half();
        assert!((tl[[0, 0]] - (u * t - 1.0 / (u * t))).norm() < 1e-14);
        assert!((tl[[1, 1]] - (u - u.inv())).norm() < 1e-14);
        assert!(tl[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn projection_matches_r() {
        let dev = projection_deviation(&ctx(), 20).unwrap();
        assert!(dev <= 1e-12, "{dev}");
    }

    #[test]
    fn rll_spin_half_one_and_classical() {
        for ctx in [ctx(), ctx().with_spin(Spin::ONE), classical()] {
            let rep = spin_rep(&ctx, ctx.spin()).unwrap();
            let e = check_rll(&ctx, &rep).unwrap();
            assert!(e.residual <= 1e-12, "{e:?}");
        }
    }

    #[test]
    fn structured_product_matches_dense() {
        let ctx = ctx();
        let chain = dress_chain(&ctx, 1).unwrap();
        let (u, w) = (c(1.1, 0.2), c(0.7, -0.3));
        let k = &chain[1];
        let (ku, kw) = (k.eval(u), k.eval(w));
        let dim = k.quantum_dim();
        let rq = |x: C64| kron(&r_matrix(&ctx, x).unwrap(), &eye(dim));
        let k1 = embed_site1(&ku);
        let mut k2 = CMatrix::zeros((4 * dim, 4 * dim));
        for a in 0..2 {
            for b in 0..2 {
                let mut unit = crate::linalg::zeros(2);
                unit[[a, b]] = ONE;
                k2 = k2 + kron(&kron(&eye(2), &unit), &kw[a][b]);
            }
        }
        let dense = rq(u / w).dot(&k1).dot(&rq(u * w)).dot(&k2);
        let op = AuxOp::site1(&ku)
            .scalar_left(&r_matrix(&ctx, u / w).unwrap())
            .scalar_right(&r_matrix(&ctx, u * w).unwrap())
            .mul_site2(&kw);
        for r in 0..4 {
            for cc in 0..4 {
                let block = dense.slice(ndarray::s![r * dim..(r + 1) * dim, cc * dim..(cc + 1) * dim]);
                assert!(relative_residual(&block.to_owned(), op.at(r, cc)) < 1e-14);
            }
        }
    }

    #[test]
    fn dressing_grows_level_dimension_and_span() {
        let ctx = ctx();
        let chain = dress_chain(&ctx, 3).unwrap();
        for (n, k) in chain.iter().enumerate() {
            assert_eq!(k.level(), n);
            assert_eq!(k.quantum_dim(), 2usize.pow(n as u32));
            if n > 0 {
                let (lo, hi) = k.degree_range().unwrap();
                assert!(lo >= -2 * n as i32 && hi <= 2 * n as i32, "{lo}..{hi}");
            }
        }
    }

    #[test]
    fn reflection_holds_for_dressed_solutions() {
        let ctx = ctx();
        for k in dress_chain(&ctx, 2).unwrap() {
            let e = check_reflection(&ctx, &k).unwrap();
            assert!(e.pass, "{e:?}");
        }
    }

    #[test]
    fn reflection_detects_perturbation() {
        let ctx = ctx();
        let k = dress_chain(&ctx, 2).unwrap().pop().unwrap();
        let mut blocks = k.clone().into_blocks();
        let mut bump = crate::linalg::zeros(4);
        bump[[1, 2]] = c(1e-3, 0.0);
        blocks[0][1] = &blocks[0][1] + &LaurentMatrix::monomial(1, bump);
        let bad = KMatrix::new(2, blocks).unwrap();
        assert!(check_reflection(&ctx, &bad).unwrap().residual > 1e-6);
    }

    #[test]
    fn dual_reflection() {
        let ctx = ctx();
        let generic = k_plus(&ctx, c(0.8, 0.3), c(0.4, -0.2), c(-0.3, 0.5)).unwrap();
        assert!(check_dual_reflection(&ctx, &generic).unwrap().pass);
        let diagonal = k_plus(&ctx, c(0.8, 0.3), ZERO, ZERO).unwrap();
        assert!(check_dual_reflection(&ctx, &diagonal).unwrap().residual <= 1e-12);
        let mut blocks = generic.into_blocks();
        blocks[1][0] = &blocks[1][0] + &LaurentMatrix::constant(eye(1) * c(1e-3, 0.0));
        let bad = KMatrix::new(0, blocks).unwrap();
        assert!(check_dual_reflection(&ctx, &bad).unwrap().residual > 1e-6);
    }

    #[test]
    fn k_plus_shape() {
        let ctx = ctx();
        assert!(k_plus(&ctx, ZERO, ONE, ONE).is_err());
        let kp = k_plus(&ctx, ONE, ZERO, ZERO).unwrap();
        let t = ctx.q_half();
        let u = c(1.2, 0.1);
        let want = u * t + 1.0 / (u * t);
        let k = kp.eval(u);
        assert!((k[0][0][[0, 0]] - want).norm() < 1e-14);
        assert!((k[1][1][[0, 0]] - want).norm() < 1e-14);
        let kc = k_plus(&classical(), ONE, ZERO, ZERO).unwrap().eval_full(u);
        assert!(relative_residual(&kc, &(eye(2) * (u + u.inv()))) < 1e-15);
    }

    #[test]
    fn k0_requires_deformed_mode() {
        assert!(k0(&classical()).is_err());
    }
}
