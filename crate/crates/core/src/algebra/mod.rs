//! Exact integer and algebraic-number linear algebra.

pub mod factor;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod poly;
pub mod profile;
pub mod roots;
pub mod snf;

pub use factor::{factor_over_integers, is_irreducible};
pub use field::{AlgebraicNumber, NumberField};
pub use lattice::{
    direct_limit, direct_limit_rank, integer_kernel, is_saturated_basis, quotient_with_induced_map, saturate,
    saturated_kernel, DirectLimit, ModulePresentation, Quotient,
};
pub use matrix::IntMatrix;
pub use poly::{char_poly, IntPolynomial};
pub use profile::{algebraic_profile, AlgebraicProfile, UnitCircle};
pub use roots::complex_roots;
pub use snf::{smith_normal_form, Smith};
