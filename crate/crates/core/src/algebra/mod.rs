//! New functions from old: polynomial and analytic compositions, power
//! families, and the modulus construction of a differentiable element.

mod compose;
mod omega;
mod poly;

pub use compose::{
    certified_range, compose_analytic, compose_poly, critical_composition_test, gram_independence, power_family,
    vanish_shift, CriticalVerdict, GramRank, VanishShift, RANGE_GRID, RANK_TOL,
};
pub use omega::{differentiable_element, omega_modulus, ChebyshevApprox, DifferentiableElement, ModulusTable};
pub use poly::{Polynomial, PowerSeriesPatch, PATCH_REMAINDER};
