//! Dense complex matrix helpers shared by every module.

use ndarray::{Array2, Zip};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn eye(n: usize) -> CMatrix {
    Array2::eye(n)
}

pub fn zeros(n: usize) -> CMatrix {
    Array2::zeros((n, n))
}

pub fn diag(entries: &[C64]) -> CMatrix {
    let mut m = zeros(entries.len());
    for (i, &x) in entries.iter().enumerate() {
        m[[i, i]] = x;
    }
    m
}

/// Kronecker product `a ⊗ b`; the row index of the result is `ia * b.nrows() + ib`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        Zip::from(&mut block).and(b).for_each(|o, &y| *o = x * y);
    }
    out
}

pub fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x.dot(y) - y.dot(x)
}

/// `p·XY − p⁻¹·YX`. With `p = q^{1/2}` this is the q-commutator `[X,Y]_q`;
/// `p = q` gives `[X,Y]_{q²}` and `p = q^{-1/2}` gives `[X,Y]_{q⁻¹}`.
pub fn q_commutator(x: &CMatrix, y: &CMatrix, p: C64) -> CMatrix {
    x.dot(y) * p - y.dot(x) / p
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Scale-free residual `‖a − b‖_F / (1 + max(‖a‖_F, ‖b‖_F))`.
pub fn relative_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    let diff = frobenius(&(a - b));
    diff / (1.0 + frobenius(a).max(frobenius(b)))
}

/// Residual of an identity `lhs = 0`.
pub fn residual_zero(lhs: &CMatrix) -> f64 {
    frobenius(lhs) / (1.0 + frobenius(lhs))
}

/// Max-combine for residuals that propagates NaN instead of discarding it.
pub fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Assembles a 2×2 array of equally sized blocks into one matrix.
pub fn block2(b: &[[CMatrix; 2]; 2]) -> CMatrix {
    let n = b[0][0].nrows();
    let mut out = Array2::zeros((2 * n, 2 * n));
    for a in 0..2 {
        for c in 0..2 {
            out.slice_mut(ndarray::s![a * n..(a + 1) * n, c * n..(c + 1) * n])
                .assign(&b[a][c]);
        }
    }
    out
}
