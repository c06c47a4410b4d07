//! Exact verification of multiple basic hypergeometric transformation
//! formulas: q-series arithmetic, `A_n` sums, a registry of identities and a
//! sampling/verification driver.

pub mod cli;
pub mod error;
pub mod exec;
pub mod identities;
pub mod multivariate;
pub mod powerseries;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use identities::{IdentityCase, IdentityId, VerificationReport};
pub use scalar::{Field, QBase, Scalar};
