//! Solver for the chemical master equation of bursty transcription.
//!
//! Nascent transcripts are produced in bursts, spliced into mature
//! transcripts and degraded. The log generating function is assembled from
//! closed-form integrals of powers of the characteristic `U(s)` over
//! Taylor/Laurent domains, then inverted to a joint copy-number distribution
//! by an inverse DFT.
//!
//! Module map:
//!
//! - [`burst`]: burst-size laws and their series coefficients
//! - [`characteristics`]: `U(s)`, `V(s)` and the Taylor/Laurent partition of `[0, t]`
//! - [`specfun`]: exponential integral, log-gamma, `2F1`
//! - [`integrals`]: closed-form `∫ U(s)^i ds`
//! - [`solver`]: log generating function and the joint distribution
//! - [`ssa`]: Gillespie simulation
//! - [`inference`]: divergences and parameter landscapes

pub mod burst;
pub mod characteristics;
pub mod error;
pub mod inference;
pub mod integrals;
pub mod quadrature;
pub mod solver;
pub mod specfun;
pub mod ssa;

pub use burst::{BurstDist, Regime, SeriesCoefficients};
pub use characteristics::{CharArgs, DomainPartition, ModelParams};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use solver::{ExpansionSpec, GridSpec, JointDist, Method, TimeSpec};

/// Number of worker threads allowed by `BURSTY_THREADS`, if set.
pub fn thread_cap() -> Option<usize> {
    std::env::var("BURSTY_THREADS").ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0)
}

/// Run `f` on a pool sized by `BURSTY_THREADS` (or the rayon default).
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        None => f(),
    }
}
