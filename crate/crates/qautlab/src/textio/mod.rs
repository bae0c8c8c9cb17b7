//! The `.qaut` machine description format.
//!
//! ```text
//! [machine]
//! kind = kwqfa
//! format = 1
//! alphabet = a b
//! states = q0 q1 A R
//! start = q0
//! accept = A
//! reject = R
//!
//! [transitions.cent]
//! q0 -> q1 : 1/sqrt(2)
//! q0 -> R : 1/sqrt(2)
//! ```
//!
//! Rows read `src -> dst : amplitude [; key=value]*`, where the amplitude is the
//! entry `U[dst, src]`. Missing symbol sections default to the identity.

mod expr;
mod format;

pub use expr::{format_amplitude, keep_expr, parse_amplitude, ExprError};
pub use format::{parse_machine, serialize_machine, ParseError, REQUIRED_KEYS};
