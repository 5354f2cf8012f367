//! Shared fixtures for the construction benchmarks.

use qons_core::{c, ParameterContext, Spin};

/// The generic parameters from the shipped default config.
pub fn generic(spin: Spin) -> ParameterContext {
    ParameterContext::deformed(c(0.9, 0.2), c(1.3, -0.4), c(0.7, 0.5), spin).expect("generic parameters are valid")
}
