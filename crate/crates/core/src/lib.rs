//! Core algorithms for the keyforge logic-locking workbench.
//!
//! This crate is `no_std` (with `alloc`) and holds everything that does not
//! need an operating system: gate-level netlists in the `.bench` format,
//! logic simulation and testability metrics, key-gate insertion for five
//! locking schemes, Tseitin encoding and the attack-formula constructions
//! (KDC / DIVC / SCKVC / key generation), and an embedded CDCL SAT solver
//! with learned-clause export.
//!
//! Process control, wall-clock metering, file IO and the command-line
//! front-end live in the companion `keyforge` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod cnf;
pub mod netlist;
pub mod obfuscate;
pub mod sat;

pub use netlist::{Circuit, CircuitBuilder, Gate, GateKind, NetId, NetlistError};
pub use obfuscate::{LockedCircuit, SchemeTag};
