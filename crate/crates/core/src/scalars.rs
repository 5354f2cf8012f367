//! Scalar sequences of the construction: the Casimir weight, the constant
//! terms `ω₀^{(N)}`, the closure coefficients `C^{(N)}_{-k}` and the Laurent
//! polynomials `P^{(N)}_{-k}(u)`.

use crate::error::{Error, Result};
use crate::laurent::LaurentScalar;
use crate::linalg::{worst, C64, ONE};
use crate::params::ParameterContext;
use crate::report::ReportEntry;

/// `w₀^{(j)} = q^{j+1/2} + q^{-j-1/2}`.
pub fn casimir_weight(ctx: &ParameterContext) -> C64 {
    let n = ctx.spin().twice() as i32 + 1;
    ctx.q_half().powi(n) + ctx.q_half().powi(-n)
}

/// `ρ = (q^{1/2} + q^{-1/2})² / c0`.
pub fn rho_constant(ctx: &ParameterContext) -> C64 {
    let s = ctx.q_sum();
    s * s / ctx.c0()
}

/// `(v² + v^{-2}) w₀^{(j)} / (q^{1/2} + q^{-1/2})`, the ratio that drives every recursion.
pub fn drift(ctx: &ParameterContext) -> C64 {
    ctx.v2_sum() * casimir_weight(ctx) / ctx.q_sum()
}

/// `c0 (q − q^{-1}) ω₀^{(N)}`, finite at `q = 1`.
fn scaled_omega0(ctx: &ParameterContext, n: usize) -> C64 {
    let first = -ctx.v2_sum() * casimir_weight(ctx);
    first * (-drift(ctx)).powi(n as i32 - 1)
}

fn check_level(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::IndexOutOfRange { index: 0, range: "N >= 1".into() })
    } else {
        Ok(())
    }
}

/// Constant term `ω₀^{(N)}` of the dressed K-matrix.
pub fn omega0(ctx: &ParameterContext, n: usize) -> Result<C64> {
    ctx.require_deformed("omega0")?;
    check_level(n)?;
    let mut w = -ctx.v2_sum() * casimir_weight(ctx) / (ctx.c0() * ctx.q_minus_inv());
    for _ in 1..n {
        w = -ctx.v2_sum() * casimir_weight(ctx) * w / ctx.q_sum();
    }
    Ok(w)
}

/// `c0 (q^{1/2} − q^{-1/2}) ω₀^{(N)}`, the coefficient of the lowest generator
/// in the closure relations.
pub fn closure_lead(ctx: &ParameterContext, n: usize) -> Result<C64> {
    check_level(n)?;
    Ok(scaled_omega0(ctx, n) / ctx.q_sum())
}

/// All `C^{(N)}_{-k}`, `k = 0..N-1`, from the three-branch recursion in `N`.
pub fn coeff_c_table(ctx: &ParameterContext, n: usize) -> Result<Vec<C64>> {
    check_level(n)?;
    let x = drift(ctx);
    let s = ctx.q_sum();
    let mut table = vec![-s];
    for level in 2..=n {
        let prev = &table;
        let mut next = vec![C64::default(); level];
        next[0] = -scaled_omega0(ctx, level - 1) - x * prev[0];
        for k in 1..level - 1 {
            next[k] = s * prev[k - 1] - x * prev[k];
        }
        next[level - 1] = s * prev[level - 2];
        table = next;
    }
    Ok(table)
}

/// `C^{(N)}_{-k}` for `0 ≤ k ≤ N−1` via the recursion.
pub fn coeff_c_recursive(ctx: &ParameterContext, n: usize, k: usize) -> Result<C64> {
    check_level(n)?;
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, range: format!("0..={}", n - 1) });
    }
    Ok(coeff_c_table(ctx, n)?[k])
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Closed form of `C^{(N)}_{-k+1}` for `1 ≤ k ≤ N`.
pub fn coeff_c_closed(ctx: &ParameterContext, n: usize, k: usize) -> Result<C64> {
    check_level(n)?;
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, range: format!("1..={n}") });
    }
    let sign = if (n - k + 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(ctx.q_sum().powi(k as i32)
        * drift(ctx).powi((n - k) as i32)
        * (sign * binomial(n, k)))
}

/// `Y(u) = q^{1/2}u² + q^{-1/2}u^{-2}`.
pub fn y_poly(ctx: &ParameterContext) -> LaurentScalar {
    LaurentScalar::from_terms([(2, ctx.q_half()), (-2, ctx.q_half().inv())])
}

/// `Z(u) = q u² − q^{-1} u^{-2}`.
pub fn z_poly(ctx: &ParameterContext) -> LaurentScalar {
    LaurentScalar::from_terms([(2, ctx.q()), (-2, -ctx.q().inv())])
}

fn require_polys(ctx: &ParameterContext, n: usize) -> Result<()> {
    check_level(n)?;
    if n >= 2 {
        ctx.require_deformed("poly_P")?;
    }
    Ok(())
}

/// `[P^{(N)}_0, P^{(N)}_{-1}, …, P^{(N)}_{-(N-1)}]` built level by level.
pub fn poly_p_table(ctx: &ParameterContext, n: usize) -> Result<Vec<LaurentScalar>> {
    require_polys(ctx, n)?;
    let x = drift(ctx);
    let s = ctx.q_sum();
    let shifted_y = &y_poly(ctx) - &LaurentScalar::constant(x);
    let mut table = vec![LaurentScalar::constant(ONE)];
    for level in 1..n {
        let lead = closure_lead(ctx, level)?;
        let mut next = Vec::with_capacity(level + 1);
        next.push(&(&shifted_y * &table[0]) + &LaurentScalar::constant(lead));
        for k in 1..level {
            next.push(&table[k - 1].scale(s) - &table[k].scale(x));
        }
        next.push(table[level - 1].scale(s));
        table = next;
    }
    Ok(table)
}

/// `P^{(N)}_{-k}(u)` for `0 ≤ k ≤ N−1`.
pub fn poly_p(ctx: &ParameterContext, n: usize, k: usize) -> Result<LaurentScalar> {
    require_polys(ctx, n)?;
    if k >= n {
        return Err(Error::IndexOutOfRange { index: k, range: format!("0..={}", n - 1) });
    }
    Ok(poly_p_table(ctx, n)?.swap_remove(k))
}

/// The same polynomials assembled as sums of powers of `Y/(q^{1/2}+q^{-1/2})`
/// weighted by the closure coefficients.
pub fn poly_p_from_coefficients(ctx: &ParameterContext, n: usize) -> Result<Vec<LaurentScalar>> {
    require_polys(ctx, n)?;
    let s = ctx.q_sum();
    let c = coeff_c_table(ctx, n)?;
    let ratio = y_poly(ctx).scale(s.inv());
    let powers: Vec<LaurentScalar> = (0..n as u32).map(|e| ratio.powi(e)).collect();
    Ok((0..n)
        .map(|m| {
            let sum = (m..n).fold(LaurentScalar::zero(), |acc, idx| {
                &acc + &powers[idx - m].scale(c[idx])
            });
            sum.scale(-s.inv())
        })
        .collect())
}

/// Residual of `Y·P_{-k} − (q^{1/2}+q^{-1/2}) P_{-k+1} = C_{-k+1}` over `k = 1..N-1`.
pub fn check_simp_identity(ctx: &ParameterContext, n: usize) -> Result<ReportEntry> {
    let polys = poly_p_table(ctx, n)?;
    let c = coeff_c_table(ctx, n)?;
    let y = y_poly(ctx);
    let s = ctx.q_sum();
    let residual = (1..n)
        .map(|k| {
            let lhs = &(&y * &polys[k]) - &polys[k - 1].scale(s);
            lhs.residual(&LaurentScalar::constant(c[k - 1]))
        })
        .fold(0.0, worst);
    Ok(ReportEntry::new("scalars.simp_identity", "polynomial-recursion", residual, ctx.tol())
        .level(n)
        .spin(ctx.spin()))
}

/// Closed versus recursive closure coefficients for every level up to `n_max`.
pub fn check_coefficients(ctx: &ParameterContext, n_max: usize) -> Result<ReportEntry> {
    let mut max_err = 0.0f64;
    for n in 1..=n_max {
        let table = coeff_c_table(ctx, n)?;
        for k in 1..=n {
            let closed = coeff_c_closed(ctx, n, k)?;
            let rec = table[k - 1];
            max_err = max_err.max((closed - rec).norm() / closed.norm().max(rec.norm()).max(1e-300));
        }
    }
    Ok(ReportEntry::new("scalars.closure_coefficients", "closure-coefficients", max_err, 1e-10)
        .level(n_max)
        .spin(ctx.spin()))
}

/// Recursion versus coefficient-sum construction of the polynomials.
pub fn check_polynomial_routes(ctx: &ParameterContext, n: usize) -> Result<ReportEntry> {
    let a = poly_p_table(ctx, n)?;
    let b = poly_p_from_coefficients(ctx, n)?;
    let residual = a.iter().zip(&b).map(|(x, y)| x.residual(y)).fold(0.0, worst);
    Ok(ReportEntry::new("scalars.poly_routes", "polynomial-recursion", residual, 1e-10)
        .level(n)
        .spin(ctx.spin()))
}
