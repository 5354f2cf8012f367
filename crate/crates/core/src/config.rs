//! JSON run configuration. Complex numbers are `[re, im]` pairs and spins are
//! strings such as `"1/2"`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::charges::ChargeWeights;
use crate::error::{Error, Result};
use crate::linalg::{c, C64};
use crate::params::{Mode, ParameterContext, Spin, DEFAULT_DIM_CAP, DEFAULT_TOL};

mod pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(z: &Option<C64>, s: S) -> Result<S::Ok, S::Error> {
            z.map(|z| [z.re, z.im]).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<C64>, D::Error> {
            Ok(Option::<[f64; 2]>::deserialize(d)?.map(|[re, im]| C64::new(re, im)))
        }
    }
}

/// Groups of checks, listed in the order `verify` runs them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    Scalars,
    Reps,
    YangBaxter,
    Generators,
    Relations,
    Charges,
    Classical,
}

impl CheckGroup {
    pub const ALL: [CheckGroup; 7] = [
        CheckGroup::Scalars,
        CheckGroup::Reps,
        CheckGroup::YangBaxter,
        CheckGroup::Generators,
        CheckGroup::Relations,
        CheckGroup::Charges,
        CheckGroup::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckGroup::Scalars => "scalars",
            CheckGroup::Reps => "reps",
            CheckGroup::YangBaxter => "yang_baxter",
            CheckGroup::Generators => "generators",
            CheckGroup::Relations => "relations",
            CheckGroup::Charges => "charges",
            CheckGroup::Classical => "classical",
        }
    }
}

impl fmt::Display for CheckGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckGroup::ALL
            .into_iter()
            .find(|g| g.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown check group `{s}`")))
    }
}

/// `"all"` or a list of group names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Checks {
    Keyword(String),
    List(Vec<String>),
}

impl Default for Checks {
    fn default() -> Self {
        Checks::Keyword("all".into())
    }
}

impl Checks {
    pub fn parse_list(s: &str) -> Checks {
        if s.trim() == "all" {
            Checks::default()
        } else {
            Checks::List(s.split(',').map(|x| x.trim().to_string()).collect())
        }
    }

    pub fn groups(&self) -> Result<BTreeSet<CheckGroup>> {
        let names: Vec<&str> = match self {
            Checks::Keyword(k) => vec![k.as_str()],
            Checks::List(v) => v.iter().map(String::as_str).collect(),
        };
        if names.iter().any(|n| n.trim() == "all") {
            return Ok(CheckGroup::ALL.into_iter().collect());
        }
        names.into_iter().map(CheckGroup::from_str).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Directory for written files; the CLI `--out` flag overrides it.
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_report() -> String {
    "report.json".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(with = "pair")]
    pub q_half: C64,
    #[serde(with = "pair")]
    pub v: C64,
    #[serde(with = "pair")]
    pub c0: C64,
    pub j: Spin,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default)]
    pub l_max: Option<usize>,
    #[serde(default)]
    pub depth: Option<usize>,
    #[serde(with = "pair", default = "default_kappa")]
    pub kappa: C64,
    #[serde(with = "pair::option", default, skip_serializing_if = "Option::is_none")]
    pub kappa_star: Option<C64>,
    #[serde(with = "pair", default = "default_kappa_plus")]
    pub kappa_plus: C64,
    #[serde(with = "pair", default = "default_kappa_minus")]
    pub kappa_minus: C64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub dim_cap: Option<usize>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_kappa() -> C64 {
    c(0.8, 0.3)
}

fn default_kappa_plus() -> C64 {
    c(0.4, -0.2)
}

fn default_kappa_minus() -> C64 {
    c(-0.3, 0.5)
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Deformed,
            q_half: c(0.9, 0.2),
            v: c(1.3, -0.4),
            c0: c(0.7, 0.5),
            j: Spin::HALF,
            n: 2,
            k_max: None,
            l_max: None,
            depth: None,
            kappa: default_kappa(),
            kappa_star: None,
            kappa_plus: default_kappa_plus(),
            kappa_minus: default_kappa_minus(),
            tol: DEFAULT_TOL,
            seed: 0,
            checks: Checks::default(),
            dim_cap: None,
            outputs: Outputs::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        self.checks.groups()?;
        self.context().map(|_| ())
    }

    pub fn context(&self) -> Result<ParameterContext> {
        let ctx = ParameterContext::new(self.q_half, self.v, self.c0, self.j, self.mode)?
            .with_tol(self.tol)?
            .with_seed(self.seed)
            .with_dim_cap(self.dim_cap.unwrap_or(DEFAULT_DIM_CAP));
        Ok(ctx)
    }

    pub fn weights(&self) -> ChargeWeights {
        let w = ChargeWeights::new(self.kappa, self.kappa_plus, self.kappa_minus);
        match self.kappa_star {
            Some(ks) => w.with_kappa_star(ks),
            None => w,
        }
    }

    /// Largest charge index; defaults to `N` so the rank test sees one dependent charge.
    pub fn k_max(&self) -> usize {
        self.k_max.unwrap_or(self.n)
    }

    pub fn l_max(&self) -> usize {
        self.l_max.unwrap_or(3)
    }

    /// Largest `k` in the q-Onsager checks; defaults to `N + 2`.
    pub fn depth(&self) -> usize {
        self.depth.unwrap_or(self.n + 2)
    }
}
