use std::collections::BTreeMap;

use super::ConstructionError;
use crate::machines::{OpTable, PfaSpec, PostInner, PostSpec, QfaSpec, Role, Roster};
use crate::numerics::{tensor, CMatrix, C64};

/// Number of parallel copies that push a postselection error of `eps` down to `eps` or
/// below against the squared ratio: `1 + ⌈log(1/ε + 1) / log(1/ε − 1)⌉`.
pub fn amplification_k(eps: f64) -> Result<usize, ConstructionError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(ConstructionError::Parameter(format!("eps = {eps} is outside (0, 1/2)")));
    }
    let r = 1.0 / eps;
    Ok(1 + ((r + 1.0).ln() / (r - 1.0).ln() - 1e-12).ceil() as usize)
}

/// Kraus form of a stochastic matrix: one rank-one element per nonzero entry.
fn pfa_as_qfa(p: &PfaSpec) -> QfaSpec {
    let ops = p
        .ops
        .ops
        .iter()
        .map(|e| {
            let a = &e[0];
            let n = a.ncols();
            let mut elems = Vec::new();
            for j in 0..n {
                for i in 0..n {
                    let v = a[(i, j)].re;
                    if v > 0.0 {
                        let mut k = CMatrix::zeros(n, n);
                        k[(i, j)] = C64::new(v.sqrt(), 0.0);
                        elems.push(k);
                    }
                }
            }
            if elems.is_empty() {
                elems.push(CMatrix::zeros(n, n));
            }
            elems
        })
        .collect();
    QfaSpec { alphabet: p.alphabet.clone(), roster: p.roster.clone(), ops: OpTable { ops, exprs: BTreeMap::new() } }
}

/// Product roster; `role` decides each tuple's role from its components.
fn product_roster(parts: &[&Roster], role: impl Fn(&[Role]) -> Role) -> Roster {
    let mut names = vec![String::new()];
    let mut roles: Vec<Vec<Role>> = vec![Vec::new()];
    let mut start = 0;
    for r in parts {
        let mut nn = Vec::with_capacity(names.len() * r.len());
        let mut nr = Vec::with_capacity(names.len() * r.len());
        for (name, rs) in names.iter().zip(&roles) {
            for q in 0..r.len() {
                nn.push(if name.is_empty() { r.names[q].clone() } else { format!("{name}*{}", r.names[q]) });
                let mut v = rs.clone();
                v.push(r.roles[q]);
                nr.push(v);
            }
        }
        names = nn;
        roles = nr;
        start = start * r.len() + r.start;
    }
    let mut out = Roster::new(names, start);
    out.roles = roles.iter().map(|rs| role(rs)).collect();
    out
}

fn tensor_pfa(parts: &[&PfaSpec], role: impl Fn(&[Role]) -> Role) -> PfaSpec {
    let syms = parts[0].alphabet.tilde_len();
    let mats = (0..syms)
        .map(|s| {
            let mut acc = CMatrix::identity(1, 1);
            for p in parts {
                acc = tensor(&acc, p.ops.mat(s));
            }
            acc
        })
        .collect();
    let rosters: Vec<&Roster> = parts.iter().map(|p| &p.roster).collect();
    PfaSpec { alphabet: parts[0].alphabet.clone(), roster: product_roster(&rosters, role), ops: OpTable::single(mats) }
}

fn tensor_qfa(parts: &[&QfaSpec], role: impl Fn(&[Role]) -> Role) -> QfaSpec {
    let syms = parts[0].alphabet.tilde_len();
    let ops = (0..syms)
        .map(|s| {
            let mut acc = vec![CMatrix::identity(1, 1)];
            for p in parts {
                acc = acc.iter().flat_map(|a| p.ops.ops[s].iter().map(move |e| tensor(a, e))).collect();
            }
            acc
        })
        .collect();
    let rosters: Vec<&Roster> = parts.iter().map(|p| &p.roster).collect();
    QfaSpec {
        alphabet: parts[0].alphabet.clone(),
        roster: product_roster(&rosters, role),
        ops: OpTable { ops, exprs: BTreeMap::new() },
    }
}

fn tensor_post(parts: &[&PostSpec], role: impl Fn(&[Role]) -> Role) -> Result<PostInner, ConstructionError> {
    let alphabet = parts[0].alphabet();
    if parts.iter().any(|p| p.alphabet() != alphabet) {
        return Err(ConstructionError::Form("operands use different alphabets".into()));
    }
    let pfas: Option<Vec<&PfaSpec>> = parts
        .iter()
        .map(|p| match &p.inner {
            PostInner::Pfa(q) => Some(q),
            PostInner::Qfa(_) => None,
        })
        .collect();
    if let Some(pfas) = pfas {
        return Ok(PostInner::Pfa(tensor_pfa(&pfas, role)));
    }
    let qfas: Vec<QfaSpec> = parts
        .iter()
        .map(|p| match &p.inner {
            PostInner::Pfa(q) => pfa_as_qfa(q),
            PostInner::Qfa(q) => q.clone(),
        })
        .collect();
    let refs: Vec<&QfaSpec> = qfas.iter().collect();
    Ok(PostInner::Qfa(tensor_qfa(&refs, role)))
}

fn all(rs: &[Role], r: Role) -> bool {
    rs.iter().all(|&x| x == r)
}

/// `k` parallel copies that post-accept when all copies do and post-reject when all copies do,
/// with `k` from [`amplification_k`].
pub fn post_tensor_amplify(spec: &PostSpec, eps: f64) -> Result<PostSpec, ConstructionError> {
    let k = amplification_k(eps)?;
    let parts = vec![spec; k];
    let inner = tensor_post(&parts, |rs| {
        if all(rs, Role::PostAccept) {
            Role::PostAccept
        } else if all(rs, Role::PostReject) {
            Role::PostReject
        } else {
            Role::Nonhalting
        }
    })?;
    Ok(PostSpec { inner, latvian: spec.latvian })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Complement,
    Union,
    Intersection,
}

/// Boolean combinations of postselection machines. `Complement` ignores `other`;
/// the binary operations expect both operands to have error at most 1/16.
pub fn post_combine(a: &PostSpec, other: Option<&PostSpec>, op: CombineOp) -> Result<PostSpec, ConstructionError> {
    if op == CombineOp::Complement {
        let mut out = a.clone();
        for r in out.roster_mut().roles.iter_mut() {
            *r = match *r {
                Role::PostAccept => Role::PostReject,
                Role::PostReject => Role::PostAccept,
                x => x,
            };
        }
        out.latvian = a.latvian.map(|v| !v);
        return Ok(out);
    }
    let b = other.ok_or_else(|| ConstructionError::Parameter("binary operation needs two machines".into()))?;
    let post = |r: Role| matches!(r, Role::PostAccept | Role::PostReject);
    let inner = tensor_post(&[a, b], |rs| {
        let (x, y) = (rs[0], rs[1]);
        if !post(x) || !post(y) {
            return Role::Nonhalting;
        }
        let acc = match op {
            CombineOp::Union => x == Role::PostAccept || y == Role::PostAccept,
            _ => x == Role::PostAccept && y == Role::PostAccept,
        };
        if acc {
            Role::PostAccept
        } else {
            Role::PostReject
        }
    })?;
    Ok(PostSpec { inner, latvian: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copies() {
        assert_eq!(amplification_k(0.25).unwrap(), 3);
        assert_eq!(amplification_k(1.0 / 3.0).unwrap(), 3);
        assert!(amplification_k(0.5).is_err());
        assert!(amplification_k(0.0).is_err());
    }
}
