//! Scalar parameters of a construction and the constants derived from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{C64, ONE};

/// Largest root-of-unity order rejected for `q`.
pub const ROOT_OF_UNITY_MAX_ORDER: u32 = 64;
/// Closeness to a root of unity that is treated as degenerate.
pub const ROOT_OF_UNITY_TOL: f64 = 1e-6;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default cap on the quantum-space dimension (spin 1 on six sites).
pub const DEFAULT_DIM_CAP: usize = 729;

/// A spin `j ∈ {1/2, 1, 3/2, ...}` stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidParameter("spin must be at least 1/2".into()));
        }
        Ok(Spin(twice))
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Eigenvalues of `s3` as `2m`, in descending order `2j, 2j−2, …, −2j`.
    pub fn twice_weights(self) -> impl Iterator<Item = i32> {
        let tj = self.0 as i32;
        (0..=self.0 as i32).map(move |i| tj - 2 * i)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unsupported spin `{s}`"));
        let s = s.trim();
        let twice = match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<u32>().map_err(|_| bad())?,
            Some(_) => return Err(bad()),
            None => 2 * s.parse::<u32>().map_err(|_| bad())?,
        };
        Spin::from_twice(twice).map_err(|_| bad())
    }
}

impl Serialize for Spin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Spin {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Deformed,
    /// `q = 1`; only the undeformed relations are available.
    Classical,
}

/// Validated parameters `(q^{1/2}, v, c0, j)` together with tolerance and seed.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterContext {
    q_half: C64,
    q_quarter: C64,
    v: C64,
    c0: C64,
    spin: Spin,
    mode: Mode,
    tol: f64,
    seed: u64,
    dim_cap: usize,
}

impl ParameterContext {
    pub fn new(q_half: C64, v: C64, c0: C64, spin: Spin, mode: Mode) -> Result<Self> {
        for (name, x) in [("q_half", q_half), ("v", v), ("c0", c0)] {
            if !(x.re.is_finite() && x.im.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} is not finite")));
            }
            if x.norm() == 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be nonzero")));
            }
        }
        match mode {
            Mode::Classical => {
                if q_half != ONE {
                    return Err(Error::InvalidParameter(
                        "classical mode requires q_half = 1".into(),
                    ));
                }
            }
            Mode::Deformed => {
                let q = q_half * q_half;
                let mut power = ONE;
                for order in 1..=ROOT_OF_UNITY_MAX_ORDER {
                    power *= q;
                    if (power - ONE).norm() < ROOT_OF_UNITY_TOL {
                        return Err(Error::RootOfUnity { order, tol: ROOT_OF_UNITY_TOL });
                    }
                }
            }
        }
        Ok(Self {
            q_half,
            q_quarter: q_half.sqrt(),
            v,
            c0,
            spin,
            mode,
            tol: DEFAULT_TOL,
            seed: 0,
            dim_cap: DEFAULT_DIM_CAP,
        })
    }

    pub fn deformed(q_half: C64, v: C64, c0: C64, spin: Spin) -> Result<Self> {
        Self::new(q_half, v, c0, spin, Mode::Deformed)
    }

    pub fn classical(v: C64, c0: C64, spin: Spin) -> Result<Self> {
        Self::new(ONE, v, c0, spin, Mode::Classical)
    }

    pub fn with_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_dim_cap(mut self, cap: usize) -> Self {
        self.dim_cap = cap;
        self
    }

    /// Same parameters at a different spin.
    pub fn with_spin(mut self, spin: Spin) -> Self {
        self.spin = spin;
        self
    }

    pub fn q_half(&self) -> C64 {
        self.q_half
    }
    pub fn q_quarter(&self) -> C64 {
        self.q_quarter
    }
    pub fn q(&self) -> C64 {
        self.q_half * self.q_half
    }
    pub fn v(&self) -> C64 {
        self.v
    }
    pub fn c0(&self) -> C64 {
        self.c0
    }
    pub fn spin(&self) -> Spin {
        self.spin
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn is_classical(&self) -> bool {
        self.mode == Mode::Classical
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// `q^{1/2} + q^{-1/2}`
    pub fn q_sum(&self) -> C64 {
        self.q_half + self.q_half.inv()
    }

    /// `q^{1/2} − q^{-1/2}`; zero in classical mode.
    pub fn q_diff(&self) -> C64 {
        self.q_half - self.q_half.inv()
    }

    /// `q − q^{-1}`
    pub fn q_minus_inv(&self) -> C64 {
        let q = self.q();
        q - q.inv()
    }

    /// `v² + v^{-2}`
    pub fn v2_sum(&self) -> C64 {
        let v2 = self.v * self.v;
        v2 + v2.inv()
    }

    /// `q^{n/4}` evaluated through the principal fourth root.
    pub fn q_pow_quarters(&self, n: i32) -> C64 {
        self.q_quarter.powi(n)
    }

    /// Symmetric q-number `(t^n − t^{-n}) / (t − t^{-1})` with `t = q^{1/2}`,
    /// equal to `n` at `t = 1`.
    pub fn q_number(&self, n: i32) -> C64 {
        let t = self.q_half;
        let d = self.q_diff();
        if d.norm() < f64::EPSILON {
            return C64::new(f64::from(n), 0.0);
        }
        (t.powi(n) - t.powi(-n)) / d
    }

    pub(crate) fn require_deformed(&self, op: &'static str) -> Result<()> {
        if self.is_classical() {
            Err(Error::ClassicalMode(op))
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim > self.dim_cap {
            Err(Error::DimensionCap { dim, cap: self.dim_cap })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn spin_parsing() {
        assert_eq!("1/2".parse::<Spin>().unwrap(), Spin::HALF);
        assert_eq!("1".parse::<Spin>().unwrap(), Spin::ONE);
        assert_eq!("3/2".parse::<Spin>().unwrap().dim(), 4);
        assert!("0".parse::<Spin>().is_err());
        assert!("1/3".parse::<Spin>().is_err());
        assert!("x".parse::<Spin>().is_err());
        assert_eq!(Spin::from_twice(3).unwrap().to_string(), "3/2");
        assert_eq!(Spin::ONE.to_string(), "1");
    }

    #[test]
    fn rejects_degenerate_parameters() {
        let ok = |qh| ParameterContext::deformed(qh, c(1.3, -0.4), c(0.7, 0.5), Spin::HALF);
        assert!(ok(c(0.9, 0.2)).is_ok());
        assert!(matches!(ok(c(1.0, 0.0)), Err(Error::RootOfUnity { order: 1, .. })));
        assert!(matches!(ok(c(-1.0, 0.0)), Err(Error::RootOfUnity { order: 1, .. })));
        let eighth = C64::from_polar(1.0, std::f64::consts::PI / 4.0);
        assert!(matches!(ok(eighth), Err(Error::RootOfUnity { order: 4, .. })));
        assert!(ok(c(0.0, 0.0)).is_err());
        assert!(ParameterContext::deformed(c(0.9, 0.2), c(0.0, 0.0), c(1.0, 0.0), Spin::HALF)
            .is_err());
        assert!(ParameterContext::deformed(c(0.9, 0.2), c(1.0, 0.0), c(0.0, 0.0), Spin::HALF)
            .is_err());
    }

    #[test]
    fn classical_requires_unit_q() {
        assert!(ParameterContext::classical(c(1.3, 0.0), c(0.25, 0.0), Spin::HALF).is_ok());
        assert!(ParameterContext::new(
            c(0.9, 0.2),
            c(1.0, 0.0),
            c(1.0, 0.0),
            Spin::HALF,
            Mode::Classical
        )
        .is_err());
    }

    #[test]
    fn q_numbers() {
        let ctx = ParameterContext::deformed(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), Spin::HALF)
            .unwrap();
        assert!((ctx.q_number(1) - ONE).norm() < 1e-15);
        // [2] = t + 1/t
        assert!((ctx.q_number(2) - c(2.5, 0.0)).norm() < 1e-15);
        let cl = ParameterContext::classical(c(1.0, 0.0), c(1.0, 0.0), Spin::HALF).unwrap();
        assert_eq!(cl.q_number(3), c(3.0, 0.0));
    }
}
