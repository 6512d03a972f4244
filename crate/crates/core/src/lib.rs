//! Refined tropical invariants 𝔊₀ and 𝔊₁ of toric surfaces.
//!
//! The elliptic invariant is computed two ways: by the cycle-procedure
//! enumeration in [`driver`] and by brute force over combinatorial types in
//! [`oracle`]. Both return exact [`LaurentPoly`] values.

pub mod driver;
pub mod error;
pub mod lattice;
pub mod laurent;
pub mod menelaus;
pub mod oracle;
pub mod orientkit;
pub mod tropcurve;

pub use error::{Error, Result};
pub use lattice::{validate_degree, wedge, DegreeSpec, LatticePolygon, LatticeVector, Parity};
pub use laurent::LaurentPoly;
pub use tropcurve::{ParamTropicalCurve, Point, Q};
