//! Simulation and synthesis of geometric quantum gates driven by
//! periodically rotating fields.
//!
//! The library models two driven spin families: a single qubit in a
//! rotating transverse field, and a pair of Ising-coupled qubits where
//! only the first is driven. Both admit an invariant operator whose
//! eigenstates return to themselves after each drive period, picking up
//! phases that split into dynamic and geometric parts. The modules map
//! that pipeline:
//!
//! - [`qops`]: dense 2x2/4x4 complex matrices, exponentials, eigensolves.
//! - [`invariant`]: drive definitions, invariant operators, eigenframes,
//!   and the phase decomposition along a cycle.
//! - [`propagate`]: exact and numeric time-evolution operators and the
//!   per-cycle gate they generate.
//! - [`gatesynth`]: dynamic-phase elimination, cycle commensuration, and
//!   construction of controlled and single-qubit phase gates.
//!
//! Angular frequencies are in natural units (hbar = 1); a drive of
//! angular frequency omega has period tau = 2 pi / omega.

pub mod error;
pub mod gatesynth;
pub mod invariant;
pub mod propagate;
pub mod qops;

pub use error::{Error, Result};
