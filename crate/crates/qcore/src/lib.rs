//! Dense complex linear algebra for small labeled tensor-product Hilbert
//! spaces: states, operators, quantum channels, and Born-rule measurement.
//!
//! All spaces handled here are tiny (total dimension at most 16), so every
//! matrix is dense and every check is exact up to a fixed tolerance. Factor
//! ordering follows the leftmost-most-significant Kronecker convention: the
//! basis index of `|i⟩ ⊗ |j⟩` on dimensions `(dᵢ, dⱼ)` is `i · dⱼ + j`, so
//! kets read left to right.
//!
//! Every value is immutable after construction and every operation is a pure
//! function; the crate holds no shared mutable state.

mod density;
mod dist;
mod eig;
mod error;
mod kraus;
mod layout;
mod measure;
mod operator;
mod state;

pub use density::DensityMatrix;
pub use dist::{Axis, OutcomeDistribution};
pub use eig::hermitian_eigenvalues;
pub use error::{Error, Result};
pub use kraus::{apply_channel, KrausChannel};
pub use layout::SpaceLayout;
pub use measure::{born_probabilities, expectation, validate_projectors};
pub use operator::{tensor_operators, Operator};
pub use state::{tensor_states, StateVector};

/// Tolerance for algebraic identities: norms, Hermiticity, unit trace.
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Tolerance for spectral checks: eigenvalue positivity, projector
/// idempotence and orthogonality, Kraus completeness, probability sums.
pub const TOL_SPECTRAL: f64 = 1e-10;
