//! p-adic Hurwitz-type Euler zeta functions computed from the fermionic
//! p-adic integral, together with a verifier for the infinite-order linear
//! differential equation
//!
//! ```text
//! T_p^a [ zeta_{p,E}(s, a) - <a>^(1-s) ] = (<a-1>^(1-s) - <a>^(1-s)) / (s - 1)
//! ```
//!
//! Module map:
//!
//! * [`padic`]: capped-relative arithmetic in `Q_p` and the fixed-precision
//!   residue ring used by the hot loops.
//! * [`projection`]: Teichmüller representative, `<a>` and `omega_v(a)`.
//! * [`analytic`]: `exp_p`, `log_p`, binomial coefficients and `<a>^s`.
//! * [`integral`]: the fermionic integral as a limit of alternating sums.
//! * [`zeta`]: Euler polynomials, `zeta_{p,E}(s, a)` and the interpolation check.
//! * [`operator`]: the operator `T_p^a`, the equation verifier and the
//!   Taylor-shift convergence check.

pub mod error;
pub mod padic;
pub mod projection;
pub mod analytic;
pub mod integral;
pub mod zeta;
pub mod operator;

pub use error::{Error, Result};
pub use padic::{ExactRational, PadicContext, PadicNumber, Prime, QpValue};
