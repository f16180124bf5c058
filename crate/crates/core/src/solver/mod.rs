//! Branch-locality constraints and the allowed transformation set.
//!
//! Transformations act on minimal-representation states. A transformation
//! acting on branch `b'` must fix every state certain to be in another
//! branch, and must leave the normalization and every branch-measurement
//! statistic unchanged. Because valid states span the whole space, the
//! second condition is equivalent to the corresponding rows of `T` being
//! identity rows.

mod preserve;
mod theorem;
mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{nullspace, rank_of, RMat, RVec, Rat};
use crate::restriction::conditional_state_set;
use crate::theory::{StateSpace, TheorySpec};

pub use preserve::{impose_state_preservation, ParameterRange, StatePreserving};
pub use theorem::{
    branch_fixed_state, compare_monotonicity, count_forced_eigenvectors, verify_main_theorem, BranchSummary,
    MonotonicityReport, TheoremReport, TheoremSummary,
};
pub use verify::{ball_candidates, verify_transformation, MembershipFailure, Residual, Verdict, VerificationReport};

/// A `d x d` map on minimal-representation states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transformation(pub RMat);

#[derive(Serialize, Deserialize)]
struct TransformationFile {
    rows: Vec<RVec>,
}

impl Transformation {
    pub fn identity(d: usize) -> Self {
        Transformation(RMat::identity(d))
    }

    pub fn matrix(&self) -> &RMat {
        &self.0
    }

    /// Parses `{"rows": [["p/q", ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TransformationFile = serde_json::from_str(text)?;
        let cols = file.rows.first().map_or(0, |r| r.len());
        if file.rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Validation("transformation rows have different lengths".into()));
        }
        Ok(Transformation(RMat::from_rows(file.rows, cols)?))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("rationals always serialize")
    }
}

impl Serialize for Transformation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TransformationFile {
            rows: self.0.row_vecs(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Transformation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = TransformationFile::deserialize(d)?;
        let cols = file.rows.first().map_or(0, |r| r.len());
        RMat::from_rows(file.rows, cols)
            .map(Transformation)
            .map_err(serde::de::Error::custom)
    }
}

/// Equalities every branch-local transformation on `branch` satisfies.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub theory: TheorySpec,
    pub branch: usize,
    /// Span generators of the conditional sets of the other branches.
    pub fixed_vectors: Vec<RVec>,
    /// Rows of `T` (normalization and leading branch statistics) that must be identity rows.
    pub z_rows: Vec<usize>,
}

impl ConstraintSystem {
    pub fn dim(&self) -> usize {
        self.theory.dim()
    }

    /// Rank of the fixed vectors.
    pub fn fixed_span_dim(&self) -> usize {
        rank_of(&self.fixed_vectors)
    }

    /// The system as rows over the `d²` row-major entries of `T`.
    pub fn equations(&self) -> (RMat, RVec) {
        let d = self.dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for eta in &self.fixed_vectors {
            for i in 0..d {
                let mut row = RVec::zeros(d * d);
                row[i * d..(i + 1) * d].clone_from_slice(eta);
                rows.push(row);
                rhs.push(eta[i].clone());
            }
        }
        for &r in &self.z_rows {
            for j in 0..d {
                rows.push(RVec::unit(d * d, r * d + j));
                rhs.push(if r == j {
                    Rat::from_integer(1.into())
                } else {
                    Rat::default()
                });
            }
        }
        (
            RMat::from_rows(rows, d * d).expect("rows have d² entries"),
            RVec::new(rhs),
        )
    }

    /// Exact residuals of `t` against every equality, grouped per constraint.
    pub fn residuals(&self, t: &RMat) -> Result<Vec<Residual>> {
        let d = self.dim();
        let mut out = Vec::new();
        for (k, eta) in self.fixed_vectors.iter().enumerate() {
            out.push(Residual {
                constraint: format!("fixed vector {k}"),
                values: t.mul_vec(eta)?.sub(eta)?,
            });
        }
        for &r in &self.z_rows {
            out.push(Residual {
                constraint: format!("row {r}"),
                values: RVec::new(t.row(r).to_vec()).sub(&RMat::identity(d).row_vec(r))?,
            });
        }
        Ok(out)
    }
}

pub fn assemble_constraints(t: &TheorySpec, branch: usize) -> Result<ConstraintSystem> {
    t.check_branch(branch)?;
    if let StateSpace::Polytope(p) = t.state_space() {
        let rank = rank_of(&p.vertices);
        if rank != t.dim() {
            return Err(Error::DegenerateTheory(format!(
                "states span {rank} of {} dimensions; the fiducial set is inconsistent",
                t.dim()
            )));
        }
    }
    let mut fixed_vectors = Vec::new();
    for b in (0..t.n_branches()).filter(|&b| b != branch) {
        fixed_vectors.extend(conditional_state_set(t, b)?.generators.into_iter().map(|g| g.entries));
    }
    Ok(ConstraintSystem {
        theory: t.clone(),
        branch,
        fixed_vectors,
        z_rows: (0..t.n_branches()).collect(),
    })
}

/// Every solution of the equalities is `identity + Σ λ_k free_directions[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearStage {
    pub identity: RMat,
    pub free_directions: Vec<RMat>,
}

impl LinearStage {
    pub fn dim(&self) -> usize {
        self.free_directions.len()
    }

    /// `identity + Σ λ_k F_k`.
    pub fn instantiate(&self, lambda: &[Rat]) -> Result<RMat> {
        if lambda.len() != self.dim() {
            return Err(crate::error::argument(format!(
                "expected {} parameters, got {}",
                self.dim(),
                lambda.len()
            )));
        }
        self.free_directions
            .iter()
            .zip(lambda)
            .try_fold(self.identity.clone(), |acc, (f, l)| acc.add(&f.scale(l)))
    }
}

pub fn solve_linear_stage(cs: &ConstraintSystem) -> LinearStage {
    let d = cs.dim();
    let (a, _) = cs.equations();
    let free_directions = nullspace(&a)
        .into_iter()
        .map(|v| RMat::from_flat(d, d, v).expect("d² entries"))
        .collect();
    LinearStage {
        identity: RMat::identity(d),
        free_directions,
    }
}

/// The allowed set for one acting branch.
#[derive(Clone, Debug)]
pub struct AllowedTransformSet {
    pub branch: usize,
    pub linear_stage: LinearStage,
    pub state_preserving: StatePreserving,
    pub forced_fixed_count: usize,
}

pub fn allowed_transform_set(t: &TheorySpec, branch: usize) -> Result<AllowedTransformSet> {
    let cs = assemble_constraints(t, branch)?;
    let linear_stage = solve_linear_stage(&cs);
    let state_preserving = if t.is_ball() {
        let mut verified = Vec::new();
        for (name, candidate) in ball_candidates(t)? {
            if verify_transformation(t, &candidate, branch)?.passed() {
                verified.push((name, candidate));
            }
        }
        StatePreserving::CandidateVerified(verified)
    } else {
        impose_state_preservation(t, &linear_stage)?
    };
    Ok(AllowedTransformSet {
        branch,
        forced_fixed_count: count_forced_eigenvectors(t, branch)?,
        linear_stage,
        state_preserving,
    })
}

/// The machine-readable summary of one solver run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub branch: String,
    pub linear_stage_dim: usize,
    pub result: SolveKind,
    pub family_dim: Option<usize>,
    pub forced_fixed_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveKind {
    UniqueIdentity,
    Family,
    Candidates,
}

impl AllowedTransformSet {
    pub fn report(&self, t: &TheorySpec) -> SolveReport {
        let (result, family_dim, candidates) = match &self.state_preserving {
            StatePreserving::UniqueIdentity => (SolveKind::UniqueIdentity, Some(0), Vec::new()),
            StatePreserving::PolytopeFamily { dim, .. } => (SolveKind::Family, Some(*dim), Vec::new()),
            StatePreserving::CandidateVerified(list) => (
                SolveKind::Candidates,
                None,
                list.iter().map(|(name, _)| name.clone()).collect(),
            ),
        };
        SolveReport {
            branch: t.branch_label(self.branch),
            linear_stage_dim: self.linear_stage.dim(),
            result,
            family_dim,
            forced_fixed_count: self.forced_fixed_count,
            candidates,
        }
    }

    /// Dimension of the allowed set when it is exactly characterized.
    pub fn exact_dim(&self) -> Option<usize> {
        match &self.state_preserving {
            StatePreserving::UniqueIdentity => Some(0),
            StatePreserving::PolytopeFamily { dim, .. } => Some(*dim),
            StatePreserving::CandidateVerified(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::theory::{make_classical, make_cube, make_gbit, make_octahedron, make_qubit, Representation, StateVec};

    #[test]
    fn fixed_span_dimensions() {
        assert_eq!(assemble_constraints(&make_gbit(), 1).unwrap().fixed_span_dim(), 2);
        assert_eq!(assemble_constraints(&make_qubit(), 1).unwrap().fixed_span_dim(), 1);
        let classical = assemble_constraints(&make_classical(2).unwrap(), 1).unwrap();
        assert_eq!(classical.fixed_span_dim(), 1);
        assert_eq!(classical.z_rows, vec![0, 1]);
    }

    #[test]
    fn qubit_fixed_vector_is_the_up_pole() {
        let t = make_qubit();
        let cs = assemble_constraints(&t, 1).unwrap();
        let e = t
            .convert(
                &StateVec::minimal(cs.fixed_vectors[0].clone()),
                Representation::Expectation,
            )
            .unwrap();
        assert_eq!(e.entries, RVec::from_i64(&[1, 1, 0, 0]));
    }

    #[test]
    fn identity_satisfies_every_system() {
        for name in crate::theory::BUILTIN_NAMES {
            let t = crate::theory::builtin(name).unwrap();
            for b in 0..t.n_branches() {
                let cs = assemble_constraints(&t, b).unwrap();
                assert!(cs
                    .residuals(&RMat::identity(t.dim()))
                    .unwrap()
                    .iter()
                    .all(|r| r.values.is_zero()));
            }
        }
    }

    #[test]
    fn linear_stage_dimensions() {
        assert_eq!(
            solve_linear_stage(&assemble_constraints(&make_gbit(), 1).unwrap()).dim(),
            1
        );
        assert_eq!(
            solve_linear_stage(&assemble_constraints(&make_cube(), 0).unwrap()).dim(),
            2
        );
        assert_eq!(
            solve_linear_stage(&assemble_constraints(&make_qubit(), 1).unwrap()).dim(),
            6
        );
        assert_eq!(
            solve_linear_stage(&assemble_constraints(&make_octahedron(), 1).unwrap()).dim(),
            2
        );
        assert_eq!(
            solve_linear_stage(&assemble_constraints(&make_classical(2).unwrap(), 1).unwrap()).dim(),
            0
        );
    }

    #[test]
    fn gbit_linear_stage_bottom_row() {
        // Bottom row (g, -g, 1): the only direction changes row 2 by (1, -1, 0) up to scale.
        let t = make_gbit();
        let ls = solve_linear_stage(&assemble_constraints(&t, 1).unwrap());
        let f = &ls.free_directions[0];
        for i in 0..2 {
            assert!(f.row(i).iter().all(|x| x == &int(0)));
        }
        assert_eq!(&f.row(2)[0], &-f.row(2)[1].clone());
        assert_eq!(f.row(2)[2], int(0));
        let member = ls.instantiate(&[rat(1, 2) / &f.row(2)[0]]).unwrap();
        assert_eq!(member.row(2), &[rat(1, 2), rat(-1, 2), int(1)]);
    }

    #[test]
    fn every_linear_stage_member_satisfies_the_equalities() {
        let t = make_cube();
        let cs = assemble_constraints(&t, 1).unwrap();
        let ls = solve_linear_stage(&cs);
        let member = ls.instantiate(&[rat(3, 7), rat(-5, 2)]).unwrap();
        assert!(cs.residuals(&member).unwrap().iter().all(|r| r.values.is_zero()));
        assert!(ls.instantiate(&[int(1)]).is_err());
    }

    #[test]
    fn transformation_json_round_trip() {
        let t = Transformation(RMat::from_i64(&[&[1, 0], &[0, 1]]).unwrap());
        let json = t.to_json();
        assert_eq!(json, r#"{"rows":[["1/1","0/1"],["0/1","1/1"]]}"#);
        assert_eq!(Transformation::from_json(&json).unwrap(), t);
        assert!(matches!(
            Transformation::from_json("{\"rows\": [[\"1\"], [\"0\", \"1\"]]}"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            Transformation::from_json("{\"rows\": [[1]]}"),
            Err(Error::Parse { .. })
        ));
    }
}
