//! Equilibrium thermodynamics of N coupled oscillators in a shared thermal
//! scalar-field bath, computed from the late-time limit of the open-system
//! nonequilibrium dynamics.
//!
//! The system is a network of identical harmonic oscillators at fixed spatial
//! positions, each coupled bilinearly to a massless scalar field prepared in a
//! thermal state. After tracing out the field, the oscillators obey a
//! generalized Langevin equation with local friction, spatially correlated
//! Gaussian noise, and retarded (delay) forces mediated by the field. When the
//! collective motion is stable the network relaxes to a unique equilibrium
//! state; this crate computes that state's covariances, internal energy, heat
//! capacity and power budget in the frequency domain, checks the stability
//! conditions that guarantee its existence, and verifies everything against
//! closed forms and direct time-domain stochastic simulation.
//!
//! Module map:
//! - [`kernels`]: retarded / Hadamard functions of the free field and their
//!   fluctuation-dissipation relation.
//! - [`network`]: the oscillator network and its frequency-domain response
//!   matrix.
//! - [`stability`]: diagonal dominance, Routh-Hurwitz, quadratic eigenvalue
//!   bounds and the two-oscillator delay pole search.
//! - [`equilibrium`]: late-time covariances, internal energy, heat capacity.
//! - [`closedform`]: single-oscillator Matsubara closed forms, asymptotes,
//!   the explicit two-oscillator heat-capacity integral, and the complex
//!   digamma/trigamma implementations they require.
//! - [`balance`]: dissipative / noise / bath-mediated power flows and their
//!   cancellation in equilibrium.
//! - [`langevin`]: colored-noise synthesis, delay integration, ensembles.
//! - [`cli`]: configuration-driven command front end and CSV emission.
//!
//! Natural units `hbar = c = k_B = 1` throughout.

pub mod balance;
pub mod cli;
pub mod closedform;
pub mod equilibrium;
pub mod kernels;
pub mod langevin;
pub mod network;
pub mod quad;
pub mod stability;

pub use kernels::BathState;
pub use network::{Coupling, NetworkSpec};
pub use quad::QuadratureSpec;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid network spec: {0}")]
    Spec(String),
    #[error("quadrature did not converge: {0}")]
    NotConverged(String),
    #[error("unstable spec: {0}")]
    UnstableSpec(String),
    #[error("response matrix numerically singular at kappa = {kappa}")]
    SingularAtFrequency { kappa: f64 },
    #[error("evaluation on the light cone: |tau -+ r| = {gap:.3e} is below the exclusion width {width:.3e}")]
    LightConeSingularity { gap: f64, width: f64 },
    #[error("noise spectral matrix not positive semidefinite at omega = {omega} (min eigenvalue {min_eig:.3e})")]
    SpectralNotPsd { omega: f64, min_eig: f64 },
    #[error("covariance matrix not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    CovarianceNotPsd { min_eig: f64 },
    #[error("digamma pole: argument is a nonpositive integer")]
    PoleArgument,
    #[error("trajectory overflow; spec appears to be runaway")]
    StepUnstable,
    #[error("finite-difference step too large: Richardson ratio {ratio:.3} (expected ~4)")]
    StepTooLarge { ratio: f64 },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::UnstableSpec(_) | Error::StepUnstable => 2,
            Error::NotConverged(_) | Error::SingularAtFrequency { .. } => 3,
            Error::Spec(_) | Error::Config(_) => 4,
            _ => 1,
        }
    }
}
