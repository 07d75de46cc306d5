//! Two-axes pseudo-Finsleroid geometry with constant-curvature indicatrix:
//! closed-form characteristic functions, exact metric and Cartan tensors, the
//! horizontal (positive-definite) sector, and a verifier that checks every
//! identity of the construction as a numerical residual.

// index loops mirror the tensor notation; negated comparisons reject NaN;
// oracle constants are frozen at full printed precision
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]
#![allow(clippy::suspicious_arithmetic_impl)]

pub mod charfun;
pub mod core;
pub mod deriv;
pub mod error;
pub mod horizontal;
pub mod inversion;
pub mod linalg;
pub mod rootfind;
pub mod tensors;
pub mod util;
pub mod verifier;

pub use crate::core::{default_frame, validate_params, Frame, Params, RawParams, ScalarVars};
pub use crate::error::{Error, Result};
pub use crate::inversion::{angles_from_tangent, indicatrix_point, tangent_from_angles, AngleTriple};
pub use crate::verifier::{full_report, IdentityRecord, Report, SamplingPlan};
