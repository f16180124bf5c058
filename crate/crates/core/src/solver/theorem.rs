//! Eigenvector counting and the main-theorem cross-checks.

use serde::{Deserialize, Serialize};

use super::{
    allowed_transform_set, assemble_constraints, verify_transformation, SolveReport, StatePreserving, Transformation,
};
use crate::error::{argument, Result};
use crate::exact::{lp_feasible_point, rank_of, stochastic_fixed_point, Constraints, RMat, RVec};
use crate::restriction::{classify_restriction, conditional_state_set, RestrictionClass};
use crate::theory::TheorySpec;

/// A state certain to be in `branch` and fixed by `tr`.
///
/// `tr` must map the branch slice into itself. Writing the image of each
/// slice vertex as a convex combination of the slice vertices gives a
/// column-stochastic matrix whose fixed distribution mixes the vertices
/// into a fixed state.
pub fn branch_fixed_state(t: &TheorySpec, tr: &RMat, branch: usize) -> Result<RVec> {
    let d = t.dim();
    if tr.rows() != d || tr.cols() != d {
        return Err(argument(format!("transformation must be {d}x{d}")));
    }
    let vertices: Vec<RVec> = conditional_state_set(t, branch)?
        .generators
        .into_iter()
        .map(|g| g.entries)
        .collect();
    let k = vertices.len();
    let basis = RMat::from_columns(&vertices, d)?;
    let nonneg = Constraints::new(RMat::identity(k).scale(&-crate::exact::int(1)), RVec::zeros(k));
    let mut columns = Vec::with_capacity(k);
    for v in &vertices {
        let image = tr.mul_vec(v)?;
        let weights = lp_feasible_point(&Constraints::new(basis.clone(), image), &nonneg)?.ok_or_else(|| {
            argument(format!(
                "the transformation maps {v} outside the {} slice",
                t.branch_label(branch)
            ))
        })?;
        columns.push(weights);
    }
    let fixed = stochastic_fixed_point(&RMat::from_columns(&columns, k)?)?;
    let state = basis.mul_vec(&fixed)?;
    debug_assert_eq!(tr.mul_vec(&state)?, state);
    Ok(state)
}

/// Independent `+1` eigenvectors every branch-local transformation has:
/// the fixed span of the other branches plus one fixed state certain to
/// be in `branch` (unique for a restricted slice, otherwise supplied by the
/// stochastic fixed point). Equal to `d` exactly when the equalities alone
/// would force the identity.
pub fn count_forced_eigenvectors(t: &TheorySpec, branch: usize) -> Result<usize> {
    let cs = assemble_constraints(t, branch)?;
    let mut vectors = cs.fixed_vectors;
    vectors.push(branch_fixed_state(t, &RMat::identity(t.dim()), branch)?);
    Ok(rank_of(&vectors))
}

pub type BranchSummary = SolveReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremSummary {
    #[serde(rename = "frozen: UniqueIdentity on every branch")]
    Frozen,
    #[serde(rename = "non-classical dynamics present")]
    NonClassicalDynamics,
}

impl std::fmt::Display for TheoremSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TheoremSummary::Frozen => "frozen: UniqueIdentity on every branch",
            TheoremSummary::NonClassicalDynamics => "non-classical dynamics present",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theory: String,
    pub class: RestrictionClass,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
    pub branches: Vec<BranchSummary>,
    pub summary: TheoremSummary,
    /// Assertions that failed; empty when the theorem checks out.
    pub findings: Vec<String>,
    pub passed: bool,
}

/// Runs every stage on every branch and checks the theorem's claims:
/// full independence freezes every branch (with `d` forced eigenvectors),
/// and full conditional restriction with `M > 0` leaves non-trivial
/// transformations. With `M = 0` the branch statistics alone fix every
/// row, so no dynamics are expected.
pub fn verify_main_theorem(t: &TheorySpec) -> Result<TheoremReport> {
    let restriction = classify_restriction(t)?;
    let d = t.dim();
    let mut branches = Vec::new();
    let mut findings = Vec::new();
    for b in 0..t.n_branches() {
        let label = t.branch_label(b);
        let set = allowed_transform_set(t, b)?;
        if !verify_transformation(t, &Transformation::identity(d), b)?.passed() {
            findings.push(format!("branch {label}: identity is not allowed"));
        }
        if set.forced_fixed_count < t.n_branches() {
            findings.push(format!(
                "branch {label}: only {} forced eigenvectors, fewer than N = {}",
                set.forced_fixed_count,
                t.n_branches()
            ));
        }
        let cs = assemble_constraints(t, b)?;
        for emitted in emitted_transformations(&set)? {
            if !cs.residuals(&emitted)?.iter().all(|r| r.values.is_zero()) {
                findings.push(format!(
                    "branch {label}: an emitted transformation moves a fixed vector"
                ));
            }
        }
        match restriction.class {
            RestrictionClass::FullyIndependent => {
                if !set.state_preserving.is_unique_identity() {
                    findings.push(format!(
                        "branch {label}: fully independent theory admits non-identity dynamics"
                    ));
                }
                if set.forced_fixed_count != d {
                    findings.push(format!(
                        "branch {label}: {} forced eigenvectors but d = {d}",
                        set.forced_fixed_count
                    ));
                }
            }
            RestrictionClass::FullyConditionallyRestricted if t.extra_freedom() > 0 => {
                let nontrivial = match &set.state_preserving {
                    StatePreserving::UniqueIdentity => false,
                    StatePreserving::PolytopeFamily { dim, .. } => *dim > 0,
                    StatePreserving::CandidateVerified(list) => list.iter().any(|(_, c)| !c.matrix().is_identity()),
                };
                if !nontrivial {
                    findings.push(format!("branch {label}: fully restricted theory is frozen"));
                }
            }
            _ => {}
        }
        branches.push(set.report(t));
    }
    let summary = if branches.iter().all(|b| b.result == super::SolveKind::UniqueIdentity) {
        TheoremSummary::Frozen
    } else {
        TheoremSummary::NonClassicalDynamics
    };
    Ok(TheoremReport {
        theory: t.name().to_string(),
        class: restriction.class,
        n: restriction.n,
        m: restriction.m,
        d,
        branches,
        summary,
        passed: findings.is_empty(),
        findings,
    })
}

fn emitted_transformations(set: &super::AllowedTransformSet) -> Result<Vec<RMat>> {
    Ok(match &set.state_preserving {
        StatePreserving::UniqueIdentity => vec![set.linear_stage.identity.clone()],
        StatePreserving::PolytopeFamily { witnesses, .. } => witnesses
            .iter()
            .map(|w| set.linear_stage.instantiate(w))
            .collect::<Result<_>>()?,
        StatePreserving::CandidateVerified(list) => list.iter().map(|(_, c)| c.matrix().clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub first: String,
    pub second: String,
    /// Largest allowed-set dimension over branches; `None` when not exactly known.
    pub first_dim: Option<usize>,
    pub second_dim: Option<usize>,
    /// The first theory has a strictly smaller allowed set.
    pub holds: bool,
}

/// Compares allowed-set dimensions of two theories; a theory with more
/// conditional restriction should leave at least as much freedom.
pub fn compare_monotonicity(first: &TheorySpec, second: &TheorySpec) -> Result<MonotonicityReport> {
    let dim = |t: &TheorySpec| -> Result<Option<usize>> {
        let mut best = Some(0);
        for b in 0..t.n_branches() {
            best = match (best, allowed_transform_set(t, b)?.exact_dim()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                _ => None,
            };
        }
        Ok(best)
    };
    let (first_dim, second_dim) = (dim(first)?, dim(second)?);
    Ok(MonotonicityReport {
        first: first.name().to_string(),
        second: second.name().to_string(),
        holds: matches!((first_dim, second_dim), (Some(a), Some(b)) if a < b),
        first_dim,
        second_dim,
    })
}
