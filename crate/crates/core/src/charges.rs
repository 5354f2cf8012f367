//! Conserved charges, the transfer matrix and its expansion, and spectra.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSet;
use crate::laurent::{LaurentMatrix, LaurentScalar};
use crate::linalg::{eye, relative_residual, worst, CMatrix, C64, ZERO};
use crate::params::ParameterContext;
use crate::report::ReportEntry;
use crate::sampling::Grid;
use crate::scalars::{omega0, poly_p_table, y_poly, z_poly};
use crate::yang_baxter::KMatrix;

pub const RANK_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeWeights {
    pub kappa: C64,
    pub kappa_star: C64,
    pub kappa_plus: C64,
    pub kappa_minus: C64,
}

impl ChargeWeights {
    /// `κ* = κ⁻¹`; zero when `κ = 0`.
    pub fn new(kappa: C64, kappa_plus: C64, kappa_minus: C64) -> Self {
        let kappa_star = if kappa == ZERO { ZERO } else { kappa.inv() };
        Self { kappa, kappa_star, kappa_plus, kappa_minus }
    }

    pub fn with_kappa_star(mut self, kappa_star: C64) -> Self {
        self.kappa_star = kappa_star;
        self
    }

    pub fn is_zero(&self) -> bool {
        [self.kappa, self.kappa_star, self.kappa_plus, self.kappa_minus].iter().all(|&x| x == ZERO)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChargeFamily {
    pub level: usize,
    /// `charges[k]` is `I_{2k+1}`.
    pub charges: Vec<CMatrix>,
    pub weights: ChargeWeights,
}

/// `I_{2k+1} = κ W_{-k} + κ* W_{k+1} + κ₊ G_{k+1} + κ₋ G̃_{k+1}` for `k = 0..=k_max`.
pub fn build_charges(set: &GeneratorSet, weights: ChargeWeights, k_max: usize) -> Result<ChargeFamily> {
    if weights.is_zero() {
        return Err(Error::InvalidParameter("all charge weights are zero".into()));
    }
    let charges = (0..=k_max)
        .map(|k| {
            Ok(set.w_minus(k)? * weights.kappa
                + set.w_plus(k + 1)? * weights.kappa_star
                + set.g(k + 1)? * weights.kappa_plus
                + set.g_tilde(k + 1)? * weights.kappa_minus)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChargeFamily { level: set.level(), charges, weights })
}

pub fn check_commuting(ctx: &ParameterContext, family: &ChargeFamily) -> ReportEntry {
    let m = family.charges.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let residual = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (x, y) = (&family.charges[a], &family.charges[b]);
            relative_residual(&x.dot(y), &y.dot(x))
        })
        .reduce(|| 0.0, worst);
    ReportEntry::new(
        format!("charges.commuting[N={}]", family.level),
        "commuting-charges",
        residual,
        ctx.tol(),
    )
    .level(family.level)
    .spin(ctx.spin())
    .detail(format!("{} pairs, k <= {}", pairs.len(), m.saturating_sub(1)))
}

fn to_nalgebra(m: &CMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
}

/// Numerical rank of the vectorised charges and the singular values around the cut.
#[derive(Clone, Debug, PartialEq)]
pub struct RankInfo {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    /// Smallest retained and largest discarded singular value, relative to the largest.
    pub gap: (f64, Option<f64>),
}

pub fn independent_count(family: &ChargeFamily) -> RankInfo {
    let rows = family.charges.len();
    let cols = family.charges.first().map_or(0, |c| c.len());
    let stacked = DMatrix::from_fn(rows, cols, |i, j| {
        let m = &family.charges[i];
        m[[j / m.ncols(), j % m.ncols()]]
    });
    let mut sv: Vec<f64> = stacked.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let largest = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&x| x > RANK_THRESHOLD * largest).count();
    let rel = |x: f64| if largest > 0.0 { x / largest } else { 0.0 };
    let kept = if rank > 0 { rel(sv[rank - 1]) } else { 0.0 };
    let dropped = sv.get(rank).map(|&x| rel(x));
    RankInfo { rank, singular_values: sv, gap: (kept, dropped) }
}

fn c_number(b: &LaurentMatrix) -> LaurentScalar {
    LaurentScalar::from_terms(b.terms().map(|(d, m)| (d, m[[0, 0]])))
}

/// `t(u) = tr₀ K₊(u) K(u) = Σ_{ab} K₊_{ab}(u) K_{ba}(u)`.
pub fn transfer_matrix(kp: &KMatrix, k: &KMatrix) -> Result<LaurentMatrix> {
    if kp.quantum_dim() != 1 {
        return Err(Error::ShapeMismatch(format!("K+ must be a c-number, got dimension {}", kp.quantum_dim())));
    }
    let mut t = LaurentMatrix::zero(k.quantum_dim());
    for a in 0..2 {
        for b in 0..2 {
            t = &t + &k.blocks()[b][a].scalar_mul(&c_number(&kp.blocks()[a][b]));
        }
    }
    Ok(t)
}

/// `[t(u), t(w)] = 0` on the seeded grid for level `level`.
pub fn check_transfer_commuting(ctx: &ParameterContext, t: &LaurentMatrix, level: usize) -> ReportEntry {
    let grid = Grid::for_level(ctx.seed(), level);
    let residual = grid
        .pairs()
        .par_iter()
        .map(|&(u, w)| {
            let (tu, tw) = (t.eval(u), t.eval(w));
            relative_residual(&tu.dot(&tw), &tw.dot(&tu))
        })
        .reduce(|| 0.0, worst);
    ReportEntry::new(format!("charges.transfer_commuting[N={level}]"), "transfer-matrix", residual, ctx.tol())
        .level(level)
        .spin(ctx.spin())
        .detail(format!("{} grid points", grid.len()))
}

/// The scalar `F(u)` of the transfer-matrix expansion.
pub fn scalar_f(ctx: &ParameterContext, n: usize, weights: &ChargeWeights) -> Result<LaurentScalar> {
    let p0 = poly_p_table(ctx, n)?.swap_remove(0);
    let inner = &(&y_poly(ctx) * &p0).scale(ctx.q_diff().inv()) + &LaurentScalar::constant(ctx.c0() * omega0(ctx, n)?);
    let front = z_poly(ctx).scale(ctx.q_sum() / ctx.c0() * (weights.kappa_plus + weights.kappa_minus));
    Ok(&front * &inner)
}

/// `t(u) = Σ_k Z(u) P_{-k}(u) I_{2k+1} + F(u)·Id`, coefficient-wise, with `κ* = κ⁻¹`.
pub fn check_transfer_expansion(
    ctx: &ParameterContext,
    set: &GeneratorSet,
    weights: &ChargeWeights,
    t: &LaurentMatrix,
) -> Result<ReportEntry> {
    let n = set.level();
    let w = ChargeWeights::new(weights.kappa, weights.kappa_plus, weights.kappa_minus);
    let family = build_charges(set, w, n - 1)?;
    let z = z_poly(ctx);
    let p = poly_p_table(ctx, n)?;
    let mut expansion = LaurentMatrix::from_scalar(&scalar_f(ctx, n, &w)?, &eye(set.quantum_dim()));
    for (pk, ik) in p.iter().zip(&family.charges) {
        expansion = &expansion + &LaurentMatrix::from_scalar(&(&z * pk), ik);
    }
    let residual = expansion.residual(t);
    Ok(ReportEntry::new(format!("charges.transfer_expansion[N={n}]"), "transfer-matrix", residual, ctx.tol())
        .level(n)
        .spin(ctx.spin()))
}

/// Eigenvalues from a complex Schur decomposition, sorted by real then imaginary part.
pub fn spectrum(m: &CMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!("spectrum of a {}x{} matrix", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let schur = to_nalgebra(m).try_schur(1e-15, 10_000).ok_or(Error::NoConvergence(n))?;
    let (_, t) = schur.unpack();
    let mut eig: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Largest distance between two sorted spectra, relative to their scale.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    // pair greedily so near-degenerate reorderings do not count as deviations
    let mut used = vec![false; b.len()];
    let scale = 1.0 + a.iter().chain(b).map(|z| z.norm()).fold(0.0, f64::max);
    let mut worst_gap = 0.0f64;
    for x in a {
        let (idx, gap) = b
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("equal lengths");
        used[idx] = true;
        worst_gap = worst(worst_gap, gap);
    }
    worst_gap / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{extend, lift_chain};
    use crate::linalg::{c, diag, ONE};
    use crate::params::Spin;
    use crate::yang_baxter::{dress_chain, k_plus};

    fn ctx() -> ParameterContext {
        ParameterContext::deformed(c(0.9, 0.2), c(1.3, -0.4), c(0.7, 0.5), Spin::HALF).unwrap()
    }

    fn weights() -> ChargeWeights {
        ChargeWeights::new(c(0.8, 0.3), c(0.4, -0.2), c(-0.3, 0.5))
    }

    #[test]
    fn charges_commute_and_truncate() {
        let ctx = ctx();
        for set in lift_chain(&ctx, 3).unwrap() {
            let n = set.level();
            let ext = extend(&ctx, &set, n + 1).unwrap();
            let family = build_charges(&ext, weights(), n + 1).unwrap();
            assert!(check_commuting(&ctx, &family).pass);
            let info = independent_count(&family);
            assert_eq!(info.rank, n, "{info:?}");
        }
    }

    #[test]
    fn first_charge_is_w0_plus_w1() {
        let ctx = ctx();
        let set = lift_chain(&ctx, 1).unwrap().pop().unwrap();
        let family = build_charges(&set, ChargeWeights::new(ONE, ZERO, ZERO), 0).unwrap();
        let want = set.w_minus(0).unwrap() + set.w_plus(1).unwrap();
        assert!(relative_residual(&family.charges[0], &want) < 1e-15);
        assert!(build_charges(&set, ChargeWeights::new(ZERO, ZERO, ZERO), 0).is_err());
    }

    #[test]
    fn transfer_matrix_identities() {
        let ctx = ctx();
        let w = weights();
        let kp = k_plus(&ctx, w.kappa, w.kappa_plus, w.kappa_minus).unwrap();
        let dressed = dress_chain(&ctx, 3).unwrap();
        for (set, k) in lift_chain(&ctx, 3).unwrap().iter().zip(&dressed[1..]) {
            let t = transfer_matrix(&kp, k).unwrap();
            assert!(check_transfer_commuting(&ctx, &t, k.level()).pass);
            let e = check_transfer_expansion(&ctx, set, &w, &t).unwrap();
            assert!(e.pass, "{e:?}");
        }
    }

    #[test]
    fn expansion_detects_perturbed_generator() {
        let ctx = ctx();
        let w = weights();
        let kp = k_plus(&ctx, w.kappa, w.kappa_plus, w.kappa_minus).unwrap();
        let k = dress_chain(&ctx, 1).unwrap().pop().unwrap();
        let mut set = lift_chain(&ctx, 1).unwrap().pop().unwrap();
        set.get_mut(crate::generators::GeneratorKind::WMinus, 0).unwrap()[[1, 0]] += c(1e-3, 0.0);
        let t = transfer_matrix(&kp, &k).unwrap();
        assert!(check_transfer_expansion(&ctx, &set, &w, &t).unwrap().residual > 1e-6);
    }

    #[test]
    fn f_vanishes_when_kappa_plus_minus_cancel() {
        let ctx = ctx();
        let w = ChargeWeights::new(c(0.8, 0.3), c(0.4, -0.2), c(-0.4, 0.2));
        assert!(scalar_f(&ctx, 2, &w).unwrap().is_zero());
    }

    #[test]
    fn transfer_matrix_is_linear_in_k_plus() {
        let ctx = ctx();
        let k = dress_chain(&ctx, 1).unwrap().pop().unwrap();
        let a = k_plus(&ctx, c(0.8, 0.3), c(0.4, -0.2), ZERO).unwrap();
        let b = k_plus(&ctx, c(0.8, 0.3), ZERO, c(-0.3, 0.5)).unwrap();
        let diag_only = k_plus(&ctx, c(0.8, 0.3), ZERO, ZERO).unwrap();
        let sum = KMatrix::new(
            0,
            [0, 1].map(|r| [0, 1].map(|cc| &(&a.blocks()[r][cc] + &b.blocks()[r][cc]) - &diag_only.blocks()[r][cc])),
        )
        .unwrap();
        let lhs = transfer_matrix(&sum, &k).unwrap();
        let rhs = &(&transfer_matrix(&a, &k).unwrap() + &transfer_matrix(&b, &k).unwrap())
            - &transfer_matrix(&diag_only, &k).unwrap();
        assert!(lhs.residual(&rhs) < 1e-14);
    }

    #[test]
    fn spectra() {
        let id = eye(3);
        assert!(spectrum(&id).unwrap().iter().all(|z| (z - ONE).norm() < 1e-14));
        let d = diag(&[c(2.0, 1.0), c(-1.0, 0.5)]);
        let eig = spectrum(&d).unwrap();
        assert!((eig[0] - c(-1.0, 0.5)).norm() < 1e-14 && (eig[1] - c(2.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn spectrum_is_similarity_invariant() {
        let ctx = ctx();
        let set = lift_chain(&ctx, 2).unwrap().pop().unwrap();
        let i1 = build_charges(&set, weights(), 0).unwrap().charges.remove(0);
        let p = CMatrix::from_shape_fn((4, 4), |(i, j)| {
            c(((i * 7 + j * 3) % 5) as f64 * 0.3 + if i == j { 2.0 } else { 0.0 }, ((i + 2 * j) % 3) as f64 * 0.2)
        });
        let p_inv = {
            let inv = to_nalgebra(&p).try_inverse().unwrap();
            CMatrix::from_shape_fn((4, 4), |(i, j)| inv[(i, j)])
        };
        let similar = p.dot(&i1).dot(&p_inv);
        let dist = spectral_distance(&spectrum(&i1).unwrap(), &spectrum(&similar).unwrap());
        assert!(dist < 1e-8, "{dist}");
    }
}
