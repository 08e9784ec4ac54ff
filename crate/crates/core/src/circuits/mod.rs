//! Netlists of resistors, capacitors and ideal op-amps, solved for the
//! voltage transfer function `V_out / V_in` by nodal analysis over
//! polynomials in `s` with parametric coefficients.

mod netlist;
mod nodal;
mod realize;

use thiserror::Error;

use crate::algebra::AlgebraError;

pub use netlist::{parse_netlist, Component, ComponentKind, Netlist};
pub use nodal::{netlist_tf, DerivationTrace, EliminationStep};
pub use realize::{
    classify_active_compensator, realize_compensator, realize_controller, CompensatorClass, CompensatorKind,
    ComponentValues, ControllerKind, Realization,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntaxKind {
    Malformed,
    UnsupportedComponent,
    MissingInput,
    MissingOutput,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("SyntaxError({kind:?}) at line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        kind: SyntaxKind,
        msg: String,
    },
    #[error("DuplicateName: `{0}` is declared twice")]
    DuplicateName(String),
    #[error("MissingGround: no component touches ground node `{0}`")]
    MissingGround(String),
    #[error("DisconnectedGraph: node `{0}` is not connected to ground")]
    DisconnectedGraph(String),
    #[error("NonPositiveComponent: `{name}` has value {value}")]
    NonPositiveComponent { name: String, value: String },
    #[error("SingularCircuit: the nodal equations have no unique solution")]
    SingularCircuit,
    #[error("UnsupportedTopology: {0}")]
    UnsupportedTopology(String),
    #[error("UnsupportedCombination: {0}")]
    UnsupportedCombination(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl CircuitError {
    pub fn name(&self) -> &'static str {
        match self {
            CircuitError::Syntax { .. } => "SyntaxError",
            CircuitError::DuplicateName(_) => "DuplicateName",
            CircuitError::MissingGround(_) => "MissingGround",
            CircuitError::DisconnectedGraph(_) => "DisconnectedGraph",
            CircuitError::NonPositiveComponent { .. } => "NonPositiveComponent",
            CircuitError::SingularCircuit => "SingularCircuit",
            CircuitError::UnsupportedTopology(_) => "UnsupportedTopology",
            CircuitError::UnsupportedCombination(_) => "UnsupportedCombination",
            CircuitError::Algebra(e) => e.name(),
        }
    }
}
