//! Lower bounds on the concurrence and the convex-roof extended negativity of
//! bipartite states, computed from the expectation value of a subspace
//! projector, plus the matching separability test and robustness thresholds.
//!
//! Conventions: local dimensions satisfy `2 <= m <= n`; composite indices are
//! A-major (`|i⟩|j⟩ ↦ i·n + j`); Schmidt data is stored as squared
//! coefficients `λ_i` that sum to one.

pub mod bounds;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod operator;
pub mod robustness;
pub mod states;
pub mod subspace;

pub use error::{Error, Result};
