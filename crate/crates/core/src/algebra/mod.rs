//! Exact arithmetic for the engine.
//!
//! The tower is
//!
//! * [`VPoly`]: polynomials in the mark variable `v` over the rationals,
//! * [`TruncSeries`]: power series in the length variable `t` with `VPoly`
//!   coefficients, each carrying the order up to which it is known,
//! * [`ULaurent`]: Laurent polynomials in the altitude variable `u` whose
//!   coefficients are `TruncSeries`,
//! * [`UMatrix`]: square matrices of `ULaurent` entries.
//!
//! [`LaurentVPoly`] is the same ring as `ULaurent` stored "t-major" (one
//! Laurent polynomial in `u` per power of `t`), which is the natural layout
//! for order-by-order recurrences.
//!
//! Every type keeps a canonical form (no stored zero at either end), so
//! structural equality is mathematical equality.

mod lpoly;
mod matrix;
pub mod rational;
mod series;
mod ulaurent;
mod vpoly;

pub use lpoly::LaurentVPoly;
pub use matrix::UMatrix;
pub use rational::Rational;
pub use series::{TruncSeries, EXACT};
pub use ulaurent::ULaurent;
pub use vpoly::VPoly;
