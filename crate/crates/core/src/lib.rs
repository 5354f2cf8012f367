//! Dressed solutions of the reflection equation, the q-Onsager generators they
//! carry in tensor products of `U_q(sl2)` spin representations, and numerical
//! residual checks of the identities relating them.
//!
//! Everything is built from a [`ParameterContext`]. A typical run dresses the
//! constant boundary matrix, unmixes its Laurent coefficients into generators,
//! and checks the relations:
//!
//! ```
//! use qons_core::{c, dress_chain, from_dressing, relations, ParameterContext, Spin};
//!
//! let ctx = ParameterContext::deformed(c(0.9, 0.2), c(1.3, -0.4), c(0.7, 0.5), Spin::HALF).unwrap();
//! let chain = dress_chain(&ctx, 1).unwrap();
//! let set = from_dressing(&ctx, &chain[1]).unwrap();
//! let entry = relations::check_tridiagonal(&ctx, &set).unwrap();
//! assert!(entry.pass);
//! ```

pub mod charges;
pub mod config;
pub mod error;
pub mod generators;
pub mod laurent;
pub mod linalg;
pub mod params;
pub mod quantum_algebra;
pub mod relations;
pub mod report;
pub mod sampling;
pub mod scalars;
pub mod suite;
pub mod yang_baxter;

pub use charges::{build_charges, ChargeFamily, ChargeWeights};
pub use config::{CheckGroup, Checks, RunConfig};
pub use error::{Error, Result};
pub use generators::{extend, from_dressing, lift, lift_chain, reconstruct_k, GeneratorKind, GeneratorSet, Provenance};
pub use laurent::{LaurentMatrix, LaurentScalar};
pub use linalg::{c, CMatrix, C64};
pub use params::{Mode, ParameterContext, Spin};
pub use quantum_algebra::{spin_rep, SpinRep};
pub use report::{ReportEntry, VerificationReport};
pub use suite::{run_verify, verify_generator_set, CheckRanges};
pub use yang_baxter::{dress, dress_chain, k0, k_plus, KMatrix};
