//! Simulation, validation and construction toolkit for realtime probabilistic and
//! quantum finite automata, including restart, postselection, counter and
//! write-only-memory extensions.

pub mod constructions;
pub mod machines;
pub mod numerics;
pub mod semantics;
pub mod textio;
pub mod zoo;

pub use machines::{Alphabet, MachineSpec, Role, Roster, Word};
pub use numerics::Tolerance;
