//! Transfer-function derivation and frequency-domain analysis for linear
//! control systems.
//!
//! * [`algebra`]: exact rational polynomial arithmetic and transfer functions
//! * [`laplace`]: symbolic Laplace transforms with a quadrature cross-check
//! * [`lti`]: n-order ODEs, frequency response and step simulation
//! * [`circuits`]: R/C/op-amp netlists solved by nodal analysis
//! * [`margins`]: Bode sweeps, gain/phase margins and Routh stability
//! * [`ufss`]: the submersible pitch-control model

pub mod algebra;
pub mod circuits;
pub mod exec;
pub mod laplace;
pub mod lti;
pub mod margins;
pub mod ufss;

pub use algebra::{Binding, ParamPoly, Rational, SPoly, TransferFunction};
