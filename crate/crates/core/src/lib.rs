//! Symbolic-numeric calculus for classical pseudodifferential operators on
//! flat tori: sectorial projections, noncommutative residue densities and
//! residue formulas for zeta and eta spectral asymmetry.

pub mod battery;
pub mod cmat;
pub mod dirac;
pub mod error;
pub mod jet;
pub mod torus;
pub mod contour;
pub mod quadrature;
pub mod residue;
pub mod resolvent;
pub mod sectorial;
pub mod spectral;
pub mod sphere;
pub mod symbol;

pub use cmat::{ComplexMatrix, C64};
pub use contour::{ContourSpec, CutPair};
pub use error::{CalcError, CalcResult};
pub use symbol::{compose, HomogeneousComponent, SymbolExpansion, SymbolTerm};
pub use torus::Torus;
