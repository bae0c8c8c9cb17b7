//! Machine-to-machine transformations.

mod counters;
mod linear;
mod post;
mod restart;
mod templates;

use thiserror::Error;

use crate::machines::{complete_unitary, MachineError};
use crate::numerics::{CMatrix, NumericsError};

pub use counters::{
    d1bca_to_qfa_ioc, freivalds_r, ioc_m_to_ioc, pkbca_to_p1bca, q1bca_to_qfa_ioc, rev1_d1ca_to_qfa_ioc,
};
pub use linear::{exclusive_pfa_to_nqfa, linearize, pfa_to_kwqfa, qfa_to_gfa};
pub use post::{amplification_k, post_combine, post_tensor_amplify, CombineOp};
pub use restart::{
    gqfa_restart_to_kwqfa_restart, kwqfa_to_restart, pfa_restart_to_qfa_restart, post_to_restart,
    restart_to_post, restart_to_reset_majority, squared_error_bound, swap_accept_reject, GapMode,
};
pub use templates::{extend_to_unitary_i, extend_to_unitary_ii, EmbeddingResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("input is not in the required form: {0}")]
    Form(String),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

impl From<NumericsError> for ConstructionError {
    fn from(e: NumericsError) -> Self {
        ConstructionError::Machine(MachineError::Numerics(e))
    }
}

/// Square unitary whose first columns are the given stack's columns.
pub(crate) fn complete_from_stack(stack: &CMatrix) -> Result<CMatrix, ConstructionError> {
    let (n, m) = stack.shape();
    let mut full = CMatrix::zeros(n, n);
    full.view_mut((0, 0), (n, m)).copy_from(stack);
    let specified: Vec<bool> = (0..n).map(|j| j < m).collect();
    Ok(complete_unitary(&full, &specified)?)
}

/// `base`, or `base` followed by primes, whichever is absent from `names`.
pub(crate) fn fresh_name(names: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while names.contains(&name) {
        name.push('\'');
    }
    name
}
