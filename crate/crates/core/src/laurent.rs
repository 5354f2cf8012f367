//! Laurent polynomials in the spectral parameter `u`, with scalar or matrix
//! coefficients, stored as finitely supported degree tables.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;

use crate::linalg::{frobenius, kron, worst, CMatrix, C64, ONE, ZERO};

/// Coefficients whose norm falls below this fraction of the largest
/// coefficient norm are dropped after every product.
pub const PRUNE_REL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LaurentScalar {
    coeffs: BTreeMap<i32, C64>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C64) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(degree: i32, c: C64) -> Self {
        let mut coeffs = BTreeMap::new();
        if c != ZERO {
            coeffs.insert(degree, c);
        }
        Self { coeffs }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, C64)>) -> Self {
        let mut out = Self::zero();
        for (d, c) in terms {
            out.add_term(d, c);
        }
        out
    }

    fn add_term(&mut self, degree: i32, c: C64) {
        let entry = self.coeffs.entry(degree).or_insert(ZERO);
        *entry += c;
        if *entry == ZERO {
            self.coeffs.remove(&degree);
        }
    }

    pub fn coeff(&self, degree: i32) -> C64 {
        self.coeffs.get(&degree).copied().unwrap_or(ZERO)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, C64)> + '_ {
        self.coeffs.iter().map(|(&d, &c)| (d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `(lowest, highest)` degree, `None` for the zero polynomial.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.terms().map(|(d, x)| (d, x * c)))
    }

    pub fn eval(&self, u: C64) -> C64 {
        self.terms().map(|(d, x)| x * u.powi(d)).sum()
    }

    /// The polynomial `p(u·v)`.
    pub fn substitute_scaled(&self, v: C64) -> Self {
        Self::from_terms(self.terms().map(|(d, x)| (d, x * v.powi(d))))
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(ONE), |acc, _| &acc * self)
    }

    fn prune(mut self) -> Self {
        let largest = self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max);
        let floor = largest * PRUNE_REL;
        self.coeffs.retain(|_, c| c.norm() > floor);
        self
    }

    /// Largest coefficient-wise relative deviation between two polynomials.
    pub fn residual(&self, other: &Self) -> f64 {
        let degrees: std::collections::BTreeSet<i32> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        degrees
            .into_iter()
            .map(|d| {
                let (a, b) = (self.coeff(d), other.coeff(d));
                (a - b).norm() / (1.0 + a.norm().max(b.norm()))
            })
            .fold(0.0, worst)
    }
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c);
        }
        out
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        self + &(-rhs)
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        self.scale(-ONE)
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (da, a) in self.terms() {
            for (db, b) in rhs.terms() {
                out.add_term(da + db, a * b);
            }
        }
        out.prune()
    }
}

/// A Laurent polynomial with `dim × dim` complex matrix coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    dim: usize,
    coeffs: BTreeMap<i32, CMatrix>,
}

impl LaurentMatrix {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(m: CMatrix) -> Self {
        Self::monomial(0, m)
    }

    pub fn monomial(degree: i32, m: CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "Laurent coefficients must be square");
        let mut out = Self::zero(m.nrows());
        out.add_term(degree, m);
        out
    }

    /// `p(u)·m` for a scalar Laurent polynomial `p`.
    pub fn from_scalar(p: &LaurentScalar, m: &CMatrix) -> Self {
        let mut out = Self::zero(m.nrows());
        for (d, x) in p.terms() {
            out.add_term(d, m * x);
        }
        out
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (i32, CMatrix)>) -> Self {
        let mut out = Self::zero(dim);
        for (d, m) in terms {
            out.add_term(d, m);
        }
        out
    }

    fn add_term(&mut self, degree: i32, m: CMatrix) {
        assert_eq!(m.dim(), (self.dim, self.dim), "coefficient dimension mismatch");
        match self.coeffs.get_mut(&degree) {
            Some(existing) => {
                *existing += &m;
                if existing.iter().all(|&z| z == ZERO) {
                    self.coeffs.remove(&degree);
                }
            }
            None => {
                if m.iter().any(|&z| z != ZERO) {
                    self.coeffs.insert(degree, m);
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, degree: i32) -> Option<&CMatrix> {
        self.coeffs.get(&degree)
    }

    /// Coefficient at `degree`, zero if absent.
    pub fn coeff_or_zero(&self, degree: i32) -> CMatrix {
        self.coeffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Array2::zeros((self.dim, self.dim)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &CMatrix)> + '_ {
        self.coeffs.iter().map(|(&d, m)| (d, m))
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        let lo = *self.coeffs.keys().next()?;
        let hi = *self.coeffs.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_terms(self.dim, self.terms().map(|(d, m)| (d, m * c)))
    }

    pub fn scalar_mul(&self, p: &LaurentScalar) -> Self {
        let mut out = Self::zero(self.dim);
        for (dp, x) in p.terms() {
            for (dm, m) in self.terms() {
                out.add_term(dp + dm, m * x);
            }
        }
        out.prune()
    }

    /// Tensor product with the left factor `self` and right factor `rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zero(self.dim * rhs.dim);
        for (da, a) in self.terms() {
            for (db, b) in rhs.terms() {
                out.add_term(da + db, kron(a, b));
            }
        }
        out.prune()
    }

    pub fn eval(&self, u: C64) -> CMatrix {
        let mut out = Array2::zeros((self.dim, self.dim));
        for (d, m) in self.terms() {
            out.scaled_add(u.powi(d), m);
        }
        out
    }

    /// The polynomial `M(u·v)`: the degree-`d` coefficient picks up `v^d`.
    pub fn substitute_scaled(&self, v: C64) -> Self {
        Self::from_terms(self.dim, self.terms().map(|(d, m)| (d, m * v.powi(d))))
    }

    fn prune(mut self) -> Self {
        let largest = self.coeffs.values().map(frobenius).fold(0.0, f64::max);
        let floor = largest * PRUNE_REL;
        self.coeffs.retain(|_, m| frobenius(m) > floor);
        self
    }

    /// `max_d ‖A_d − B_d‖_F / (1 + max(‖A_d‖_F, ‖B_d‖_F))`, absent degrees read as zero.
    pub fn residual(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "residual of mismatched dimensions");
        let degrees: std::collections::BTreeSet<i32> =
            self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        degrees
            .into_iter()
            .map(|d| match (self.coeffs.get(&d), other.coeffs.get(&d)) {
                (Some(a), Some(b)) => {
                    frobenius(&(a - b)) / (1.0 + frobenius(a).max(frobenius(b)))
                }
                (Some(m), None) | (None, Some(m)) => {
                    let n = frobenius(m);
                    n / (1.0 + n)
                }
                (None, None) => 0.0,
            })
            .fold(0.0, worst)
    }
}

impl Add for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn add(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (d, m) in rhs.terms() {
            out.add_term(d, m.clone());
        }
        out
    }
}

impl Sub for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn sub(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        self + &rhs.scale(-ONE)
    }
}

impl Mul for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn mul(self, rhs: &LaurentMatrix) -> LaurentMatrix {
        assert_eq!(self.dim, rhs.dim);
        let mut out = LaurentMatrix::zero(self.dim);
        for (da, a) in self.terms() {
            for (db, b) in rhs.terms() {
                out.add_term(da + db, a.dot(b));
            }
        }
        out.prune()
    }
}
