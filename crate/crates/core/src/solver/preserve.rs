//! The state-preservation stage: which members of the linear stage map the
//! state space into itself.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{LinearStage, Transformation};
use crate::error::{Error, Result};
use crate::exact::linalg::dot;
use crate::exact::{lp_optimize, rank_of, Constraints, Halfspace, LpStatus, RMat, RVec, Rat, Sense};
use crate::theory::{StateSpace, TheorySpec};

/// Bounds of one parameter over the feasible polytope; `None` means unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterRange {
    #[serde(with = "crate::exact::rat::opt_rat")]
    pub min: Option<Rat>,
    #[serde(with = "crate::exact::rat::opt_rat")]
    pub max: Option<Rat>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StatePreserving {
    UniqueIdentity,
    /// `identity + Σ λ_k F_k` for every `λ` satisfying `parameter_constraints`.
    PolytopeFamily {
        dim: usize,
        parameter_constraints: Vec<Halfspace>,
        ranges: Vec<ParameterRange>,
        /// Feasible parameter points found while computing `ranges`.
        witnesses: Vec<RVec>,
    },
    /// Ball theories: named candidates that passed verification.
    CandidateVerified(Vec<(String, Transformation)>),
}

impl StatePreserving {
    pub fn is_unique_identity(&self) -> bool {
        matches!(self, StatePreserving::UniqueIdentity)
    }
}

/// Decides which `λ` keep every vertex image inside every facet.
///
/// Image `n` equals the vertex `n` because the normalization row is an
/// identity row, so each vertex `v` and facet `a·s <= b n` give the linear
/// row `Σ λ_k a·(F_k v) <= b v_0 - a·v`. The result is the identity alone
/// exactly when the feasible `λ` set is the single point 0.
pub fn impose_state_preservation(t: &TheorySpec, ls: &LinearStage) -> Result<StatePreserving> {
    let polytope = match t.state_space() {
        StateSpace::Polytope(p) => p,
        StateSpace::Ball => {
            return Err(Error::NotApplicable(
                "ball state spaces have no finite facet list; verify explicit transformations instead".into(),
            ))
        }
    };
    let k = ls.dim();
    if k == 0 {
        return Ok(StatePreserving::UniqueIdentity);
    }
    let mut rows = BTreeSet::new();
    for v in &polytope.vertices {
        let images: Vec<RVec> = ls.free_directions.iter().map(|f| f.mul_vec(v)).collect::<Result<_>>()?;
        for h in &polytope.halfspaces {
            let g: RVec = images.iter().map(|fv| dot(&h.a, fv)).collect();
            if g.is_zero() {
                continue;
            }
            let rhs = &h.b * &v[0] - dot(&h.a, v);
            rows.insert(Halfspace::new(g, rhs).normalized());
        }
    }
    let rows: Vec<Halfspace> = rows.into_iter().collect();
    let ineq = Constraints::from_rows(rows.iter().map(|h| (h.a.clone(), h.b.clone())).collect(), k)?;
    let eq = Constraints::none(k);

    let implicit = implicit_equalities(&rows, &eq, &ineq)?;
    let dim = k - rank_of(&implicit);
    if dim == 0 {
        return Ok(StatePreserving::UniqueIdentity);
    }
    let mut ranges = Vec::with_capacity(k);
    let mut witnesses = Vec::new();
    for j in 0..k {
        let objective = RVec::unit(k, j);
        let mut bound = |sense| -> Result<Option<Rat>> {
            let r = lp_optimize(&objective, &eq, &ineq, sense)?;
            Ok(match r.status {
                LpStatus::Optimal => {
                    witnesses.extend(r.witness);
                    r.optimum
                }
                _ => None,
            })
        };
        let min = bound(Sense::Min)?;
        let max = bound(Sense::Max)?;
        ranges.push(ParameterRange { min, max });
    }
    witnesses.sort();
    witnesses.dedup();
    Ok(StatePreserving::PolytopeFamily {
        dim,
        parameter_constraints: rows,
        ranges,
        witnesses,
    })
}

/// Normals of the rows that hold with equality on the whole feasible set.
///
/// Rows with positive slack at `λ = 0` cannot be implicit. A tight row is
/// implicit iff its slack cannot be made positive; each LP witness also
/// clears every other row it leaves slack.
fn implicit_equalities(rows: &[Halfspace], eq: &Constraints, ineq: &Constraints) -> Result<Vec<RVec>> {
    let mut undecided: Vec<bool> = rows.iter().map(|h| h.b.is_zero()).collect();
    let mut implicit = Vec::new();
    for i in 0..rows.len() {
        if !undecided[i] {
            continue;
        }
        undecided[i] = false;
        let objective = rows[i].a.scale(&-Rat::from_integer(1.into()));
        let r = lp_optimize(&objective, eq, ineq, Sense::Max)?;
        let slack_found = match r.status {
            LpStatus::Unbounded => true,
            LpStatus::Optimal => r.optimum.as_ref().is_some_and(|o| o.is_positive()),
            LpStatus::Infeasible => unreachable!("lambda = 0 is always feasible"),
        };
        if !slack_found {
            implicit.push(rows[i].a.clone());
            continue;
        }
        if let Some(w) = r.witness {
            for (j, h) in rows.iter().enumerate() {
                if undecided[j] && h.slack(&w)?.is_positive() {
                    undecided[j] = false;
                }
            }
        }
    }
    Ok(implicit)
}

impl StatePreserving {
    /// Convex combinations of the recorded witnesses with the given weights
    /// (normalized), instantiated as transformations.
    pub fn family_member(&self, ls: &LinearStage, weights: &[Rat]) -> Result<Option<RMat>> {
        let StatePreserving::PolytopeFamily { witnesses, .. } = self else {
            return Ok(None);
        };
        if weights.len() != witnesses.len() {
            return Err(crate::error::argument(format!(
                "expected {} weights, got {}",
                witnesses.len(),
                weights.len()
            )));
        }
        let total = weights.iter().fold(Rat::zero(), |acc, w| acc + w);
        if weights.iter().any(|w| w.is_negative()) || total.is_zero() {
            return Err(crate::error::argument("weights must be non-negative and not all zero"));
        }
        let mut lambda = RVec::zeros(ls.dim());
        for (w, x) in weights.iter().zip(witnesses) {
            lambda = lambda.add(&x.scale(&(w / &total)))?;
        }
        ls.instantiate(&lambda).map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::solver::{assemble_constraints, solve_linear_stage};
    use crate::theory::{make_boxworld, make_cube, make_gbit, make_octahedron, make_qubit};

    fn preserve(t: &TheorySpec, branch: usize) -> (LinearStage, StatePreserving) {
        let ls = solve_linear_stage(&assemble_constraints(t, branch).unwrap());
        let sp = impose_state_preservation(t, &ls).unwrap();
        (ls, sp)
    }

    #[test]
    fn box_worlds_are_frozen() {
        for t in [make_gbit(), make_cube(), make_boxworld(2, 3).unwrap()] {
            for b in 0..t.n_branches() {
                assert!(preserve(&t, b).1.is_unique_identity(), "{} branch {b}", t.name());
            }
        }
    }

    #[test]
    fn octahedron_family_is_the_x_contraction() {
        let t = make_octahedron();
        for b in 0..2 {
            let (ls, sp) = preserve(&t, b);
            let StatePreserving::PolytopeFamily { dim, ref witnesses, .. } = sp else {
                panic!("expected a family, got {sp:?}");
            };
            assert_eq!(dim, 1);
            // Every witness, viewed in expectation representation, has bottom row (0, 0, i).
            let mut scales = BTreeSet::new();
            for w in witnesses {
                let e = t.transformation_to_expectation(&ls.instantiate(w).unwrap()).unwrap();
                assert_eq!(&e.row(2)[..2], &[int(0), int(0)]);
                assert_eq!(e.row(0), &[int(1), int(0), int(0)]);
                assert_eq!(e.row(1), &[int(0), int(1), int(0)]);
                scales.insert(e.row(2)[2].clone());
            }
            assert_eq!(scales.iter().next().unwrap(), &int(-1));
            assert_eq!(scales.iter().last().unwrap(), &int(1));
            let mid = sp.family_member(&ls, &vec![int(1); witnesses.len()]).unwrap().unwrap();
            assert_eq!(t.transformation_to_expectation(&mid).unwrap().row(2)[2], int(0));
        }
    }

    #[test]
    fn ball_is_not_applicable() {
        let t = make_qubit();
        let ls = solve_linear_stage(&assemble_constraints(&t, 0).unwrap());
        assert!(matches!(
            impose_state_preservation(&t, &ls),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn ranges_serialize_as_strings_or_null() {
        let r = ParameterRange {
            min: Some(rat(-1, 2)),
            max: None,
        };
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"min":"-1/2","max":null}"#);
        assert_eq!(serde_json::from_str::<ParameterRange>(&json).unwrap(), r);
    }
}
