//! Exact arithmetic: rationals, polynomials in `x`, Laurent polynomials in
//! `y`, matrices over them, resultants, gcds, Newton polygons, and numeric
//! roots for reporting.

pub mod bilaurent;
pub mod matrix;
pub mod newton;
pub mod rational;
pub mod resultant;
pub mod roots;
pub mod unipoly;

pub use bilaurent::BiLaurent;
pub use matrix::{LaurentMatrix, PolyMatrix};
pub use newton::newton_interior;
pub use rational::Rational;
pub use resultant::resultant_y;
pub use roots::roots_numeric;
pub use unipoly::{gcd_monic, UniPoly};
