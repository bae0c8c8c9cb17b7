//! Membership oracles and ready-made machines for the languages in scope.

mod builders;
mod lang;

use thiserror::Error;

use crate::constructions::ConstructionError;
use crate::machines::{MachineError, MachineSpec};

pub use builders::*;
pub use lang::LanguageId;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("symbol index {0} is not part of the alphabet")]
    ForeignSymbol(usize),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

/// How a value is compared with a cutpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CutpointMode {
    /// Accept when `f > λ`.
    Strict,
    /// Accept when `f ≥ λ`.
    Nonstrict,
    /// Accept when `f ≠ λ`.
    Exclusive,
    /// Accept when `f > λ`; nonmembers are expected to sit exactly at `λ`.
    OneSided,
}

impl CutpointMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "strict" => Some(CutpointMode::Strict),
            "nonstrict" => Some(CutpointMode::Nonstrict),
            "exclusive" => Some(CutpointMode::Exclusive),
            "one-sided" => Some(CutpointMode::OneSided),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CutpointMode::Strict => "strict",
            CutpointMode::Nonstrict => "nonstrict",
            CutpointMode::Exclusive => "exclusive",
            CutpointMode::OneSided => "one-sided",
        }
    }

    /// Accept/reject verdict for value `f`, with equality judged up to `tol`.
    pub fn accepts(self, f: f64, lambda: f64, tol: f64) -> bool {
        match self {
            CutpointMode::Strict | CutpointMode::OneSided => f > lambda + tol,
            CutpointMode::Nonstrict => f >= lambda - tol,
            CutpointMode::Exclusive => (f - lambda).abs() > tol,
        }
    }

    /// Whether `f` is on the correct side for a word whose membership is `member`.
    pub fn agrees(self, member: bool, f: f64, lambda: f64, tol: f64) -> bool {
        match (self, member) {
            (CutpointMode::OneSided, false) => (f - lambda).abs() <= tol,
            (m, member) => m.accepts(f, lambda, tol) == member,
        }
    }
}

/// Guarantee relating a machine's acceptance probability to membership.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErrorModel {
    /// Members accepted with probability at least `1−eps`, nonmembers at most `eps`.
    Bounded { eps: f64 },
    /// Members accepted with certainty, nonmembers with probability at most `eps`.
    MembersExact { eps: f64 },
    /// Members and nonmembers separated by a cutpoint.
    Cutpoint { lambda: f64, mode: CutpointMode },
}

impl ErrorModel {
    pub fn holds(&self, member: bool, p: f64, tol: f64) -> bool {
        match *self {
            ErrorModel::Bounded { eps } if member => p >= 1.0 - eps - tol,
            ErrorModel::MembersExact { .. } if member => (p - 1.0).abs() <= tol,
            ErrorModel::Bounded { eps } | ErrorModel::MembersExact { eps } => p <= eps + tol,
            ErrorModel::Cutpoint { lambda, mode } => mode.agrees(member, p, lambda, tol),
        }
    }
}

/// A machine together with the language it recognizes and the guarantee it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct ZooMachine {
    pub name: String,
    pub machine: MachineSpec,
    pub language: LanguageId,
    pub certified: ErrorModel,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutpoint_modes() {
        assert!(CutpointMode::Strict.accepts(0.6, 0.5, 1e-9));
        assert!(!CutpointMode::Strict.accepts(0.5, 0.5, 1e-9));
        assert!(CutpointMode::Nonstrict.accepts(0.5, 0.5, 1e-9));
        assert!(!CutpointMode::Exclusive.accepts(0.5 + 1e-12, 0.5, 1e-9));
        assert!(CutpointMode::OneSided.agrees(false, 0.5, 0.5, 1e-9));
        assert!(!CutpointMode::OneSided.agrees(false, 0.4, 0.5, 1e-9));
    }

    #[test]
    fn error_models() {
        let b = ErrorModel::Bounded { eps: 0.1 };
        assert!(b.holds(true, 0.9, 0.0) && !b.holds(true, 0.89, 0.0));
        assert!(b.holds(false, 0.1, 0.0) && !b.holds(false, 0.11, 0.0));
        let e = ErrorModel::MembersExact { eps: 0.5 };
        assert!(e.holds(true, 1.0, 1e-9) && !e.holds(true, 0.99, 1e-9));
    }
}
