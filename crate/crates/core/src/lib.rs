//! Verification toolkit for almost perfect nonlinear (APN) functions over
//! GF(2^n).
//!
//! * [`field`]: GF(2^n) arithmetic, subfields, element orders.
//! * [`poly`]: sparse univariate and trivariate polynomials.
//! * [`phi`]: the surface polynomials `phi` and `phi_j`, the Gold product
//!   and the even-degree reduction.
//! * [`ddt`]: differential spectra, APN families, rational-point checks.
//! * [`screen`]: coprimality criteria, divisor oracles and the
//!   exceptional-APN decision tree.

pub mod ddt;
pub mod error;
pub mod field;
pub mod par;
pub mod phi;
pub mod poly;
pub mod screen;

pub use error::{DdtError, FieldError, PhiError, PolyError, ScreenError};
pub use field::{FieldCtx, FieldElement};
pub use par::Strategy;
pub use poly::{LinearForm, Monomial, TriPoly, UniPoly, Var};
