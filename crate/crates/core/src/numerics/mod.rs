//! Quadrature, bracketed root finding, Airy functions and the precision knob
//! used by the oracle.

mod airy;
mod precision;
mod quadrature;
mod roots;

pub use airy::airy_ai_and_prime;
pub use precision::PrecisionContext;
pub use quadrature::{
    gauss_legendre, integrate_graded, integrate_panels, Integrand, QuadratureRule, MAX_DOUBLINGS,
};
pub use roots::find_root;

pub(crate) use quadrature::panel_rule;
