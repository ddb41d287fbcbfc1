pub mod field;
pub mod minpoly;
pub mod poly;
pub mod real;

pub use field::{combo_sign, FieldCtx, FieldElement};
pub use minpoly::{min_poly_of, pisot_unit_check, PisotCheck};
pub use poly::{sturm_count, IntPoly, RatPoly};
pub use real::{real_roots, AlgebraicReal};
