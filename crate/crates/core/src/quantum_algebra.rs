//! Finite-dimensional spin-j representations of `U_{q^{1/2}}(sl2)` and the
//! Pauli decomposition of auxiliary-space blocks.

use crate::error::Result;
use crate::laurent::LaurentMatrix;
use crate::linalg::{commutator, diag, relative_residual, CMatrix, C64};
use crate::params::{ParameterContext, Spin};
use crate::report::ReportEntry;
use crate::yang_baxter::KMatrix;

/// `S±` and the Cartan powers `q^{α s3}` in the weight basis, ordered by
/// descending `s3` eigenvalue, so `S₊` is strictly upper bidiagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinRep {
    spin: Spin,
    q_quarter: C64,
    q_sum_inv_diff: Option<C64>,
    s_plus: CMatrix,
    s_minus: CMatrix,
}

/// Builds the spin-`j` representation with `q`-deformed matrix elements
/// `⟨m+1|S₊|m⟩ = sqrt([j−m][j+m+1])`, `S₋ = S₊ᵀ`.
pub fn spin_rep(ctx: &ParameterContext, spin: Spin) -> Result<SpinRep> {
    let dim = spin.dim();
    ctx.check_dim(dim)?;
    let tj = spin.twice() as i32;
    let mut s_plus = crate::linalg::zeros(dim);
    for (col, tm) in spin.twice_weights().enumerate().skip(1) {
        // integer q-numbers [j − m] and [j + m + 1]
        let a = (tj - tm) / 2;
        let b = (tj + tm) / 2 + 1;
        s_plus[[col - 1, col]] = (ctx.q_number(a) * ctx.q_number(b)).sqrt();
    }
    let s_minus = s_plus.t().to_owned();
    let d = ctx.q_diff();
    Ok(SpinRep {
        spin,
        q_quarter: ctx.q_quarter(),
        q_sum_inv_diff: (!ctx.is_classical()).then(|| d.inv()),
        s_plus,
        s_minus,
    })
}

impl SpinRep {
    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn dim(&self) -> usize {
        self.spin.dim()
    }

    pub fn s_plus(&self) -> &CMatrix {
        &self.s_plus
    }

    pub fn s_minus(&self) -> &CMatrix {
        &self.s_minus
    }

    pub fn s3(&self) -> CMatrix {
        let w: Vec<C64> =
            self.spin.twice_weights().map(|tm| C64::new(f64::from(tm) / 2.0, 0.0)).collect();
        diag(&w)
    }

    /// `q^{α s3}` for `α = twice_alpha / 2`.
    pub fn q_pow_s3(&self, twice_alpha: i32) -> CMatrix {
        // q^{α m} = q^{(2α)(2m)/4}
        let w: Vec<C64> =
            self.spin.twice_weights().map(|tm| self.q_quarter.powi(twice_alpha * tm)).collect();
        diag(&w)
    }

    pub fn identity(&self) -> CMatrix {
        crate::linalg::eye(self.dim())
    }
}

/// Residuals of the defining relations on one representation.
pub fn check_spin_rep(ctx: &ParameterContext, rep: &SpinRep) -> ReportEntry {
    let s3 = rep.s3();
    let sp = rep.s_plus();
    let sm = rep.s_minus();
    let cartan = relative_residual(&commutator(&s3, sp), sp)
        .max(relative_residual(&commutator(&s3, sm), &(-sm)));
    let target = match rep.q_sum_inv_diff {
        Some(inv) => (rep.q_pow_s3(2) - rep.q_pow_s3(-2)) * inv,
        None => &s3 * C64::new(2.0, 0.0),
    };
    let raising = relative_residual(&commutator(sp, sm), &target);
    let mut powers = 0.0f64;
    for a in -2..=2 {
        for b in -2..=2 {
            powers = powers
                .max(relative_residual(&rep.q_pow_s3(a).dot(&rep.q_pow_s3(b)), &rep.q_pow_s3(a + b)));
        }
    }
    let residual = cartan.max(raising).max(powers);
    ReportEntry::new(format!("reps.spin_relations[j={}]", rep.spin), "uq-sl2", residual, ctx.tol())
        .spin(rep.spin)
        .detail(format!("cartan {cartan:.2e}, raising {raising:.2e}, powers {powers:.2e}"))
}

/// `K = Σ σ_j ⊗ Ω_j` over `j ∈ {0, 3, +, −}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliBlock {
    pub omega0: LaurentMatrix,
    pub omega3: LaurentMatrix,
    pub plus: LaurentMatrix,
    pub minus: LaurentMatrix,
}

impl PauliBlock {
    /// `Ω₀ + Ω₃`, the upper-left auxiliary block.
    pub fn diag_plus(&self) -> LaurentMatrix {
        &self.omega0 + &self.omega3
    }

    /// `Ω₀ − Ω₃`, the lower-right auxiliary block.
    pub fn diag_minus(&self) -> LaurentMatrix {
        &self.omega0 - &self.omega3
    }
}

pub fn pauli_decompose(k: &KMatrix) -> PauliBlock {
    let [[b00, b01], [b10, b11]] = k.blocks();
    let half = C64::new(0.5, 0.0);
    PauliBlock {
        omega0: (b00 + b11).scale(half),
        omega3: (b00 - b11).scale(half),
        plus: b01.clone(),
        minus: b10.clone(),
    }
}

pub fn pauli_reassemble(level: usize, p: &PauliBlock) -> Result<KMatrix> {
    KMatrix::new(level, [[p.diag_plus(), p.plus.clone()], [p.minus.clone(), p.diag_minus()]])
}
