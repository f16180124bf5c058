//! Conditional state sets, restriction classes and the quantum-like
//! uncertainty check.

use std::fmt;

use indexmap::IndexMap;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::exact::{affine_hull_dim, rat, RVec, Rat};
use crate::theory::{StateSpace, StateVec, TheorySpec};

/// States certain to give `branch` on the branch measurement.
///
/// The generators are normalized extreme points of that slice. Their
/// non-negative scalings, down to the zero state, make up the whole
/// conditional cone, so their linear span is the span of the cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalSet {
    pub branch: usize,
    pub generators: Vec<StateVec>,
    /// Affine dimension of the normalized slice.
    pub freedom: usize,
}

pub fn conditional_state_set(t: &TheorySpec, branch: usize) -> Result<ConditionalSet> {
    t.check_branch(branch)?;
    let z = t.branch_measurement();
    let generators: Vec<RVec> = match t.state_space() {
        // {p(Z = branch) = n} is a face of the polytope; its vertices are
        // the polytope vertices lying on it.
        StateSpace::Polytope(p) => p
            .vertices
            .iter()
            .filter(|v| t.minimal_probability(v, z, branch) == v[0])
            .cloned()
            .collect(),
        StateSpace::Ball => vec![ball_pole(t, branch)],
    };
    let freedom = affine_hull_dim(&generators)?;
    Ok(ConditionalSet {
        branch,
        generators: generators.into_iter().map(StateVec::minimal).collect(),
        freedom,
    })
}

/// The unique normalized qubit state with `p(Z = branch) = 1`.
fn ball_pole(t: &TheorySpec, branch: usize) -> RVec {
    let mut v = RVec::zeros(t.dim());
    v[0] = Rat::one();
    for block in &t.blocks()[1..] {
        v[block.start] = rat(1, 2);
    }
    if branch == 0 {
        v[t.blocks()[0].start] = Rat::one();
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RestrictionClass {
    FullyConditionallyRestricted,
    FullyIndependent,
    Partial,
}

impl fmt::Display for RestrictionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionReport {
    pub class: RestrictionClass,
    /// Freedom per branch, keyed by branch label in outcome order.
    pub per_branch_freedom: IndexMap<String, usize>,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub d: usize,
}

/// Classifies the theory by the freedoms of its conditional slices.
///
/// When `M = 0` every freedom is both 0 and `M`; such theories count as
/// fully conditionally restricted.
pub fn classify_restriction(t: &TheorySpec) -> Result<RestrictionReport> {
    let m = t.extra_freedom();
    let mut per_branch_freedom = IndexMap::new();
    for b in 0..t.n_branches() {
        per_branch_freedom.insert(t.branch_label(b), conditional_state_set(t, b)?.freedom);
    }
    let class = if per_branch_freedom.values().all(|&f| f == 0) {
        RestrictionClass::FullyConditionallyRestricted
    } else if per_branch_freedom.values().all(|&f| f == m) {
        RestrictionClass::FullyIndependent
    } else {
        RestrictionClass::Partial
    };
    Ok(RestrictionReport {
        class,
        per_branch_freedom,
        n: t.n_branches(),
        m,
        d: t.dim(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Uncertainty {
    Holds,
    Fails {
        /// Branch-certain state whose statistics for `measurement` are not uniform.
        witness: StateVec,
        measurement: String,
    },
}

impl Uncertainty {
    pub fn holds(&self) -> bool {
        matches!(self, Uncertainty::Holds)
    }
}

/// Checks that certainty about the branch measurement forces every other
/// listed measurement to be uniformly random.
pub fn check_quantum_like_uncertainty(t: &TheorySpec, labels: &[&str]) -> Result<Uncertainty> {
    let indices: Vec<usize> = labels.iter().map(|l| t.measurement_index(l)).collect::<Result<_>>()?;
    let z = t.branch_measurement();
    if !indices.contains(&z) {
        return Err(argument(format!(
            "the measurement list must include the branch measurement {:?}",
            t.measurements()[z].label
        )));
    }
    for b in 0..t.n_branches() {
        for g in conditional_state_set(t, b)?.generators {
            for &m in indices.iter().filter(|&&m| m != z) {
                let uniform = rat(1, t.measurements()[m].outcomes as i64);
                if t.minimal_distribution(&g.entries, m).iter().any(|p| p != &uniform) {
                    return Ok(Uncertainty::Fails {
                        witness: g,
                        measurement: t.measurements()[m].label.clone(),
                    });
                }
            }
        }
    }
    Ok(Uncertainty::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::theory::{
        builtin, make_boxworld, make_classical, make_gbit, make_octahedron, make_qubit, membership, Representation,
    };

    #[test]
    fn gbit_up_slice_is_free_in_x() {
        let t = make_gbit();
        let c = conditional_state_set(&t, 0).unwrap();
        assert_eq!(c.freedom, 1);
        let gens: Vec<_> = c.generators.iter().map(|g| g.entries.clone()).collect();
        assert_eq!(gens, vec![RVec::from_i64(&[1, 1, 1]), RVec::from_i64(&[1, 1, 0])]);
    }

    #[test]
    fn qubit_up_slice_is_a_single_ray() {
        let t = make_qubit();
        let c = conditional_state_set(&t, 0).unwrap();
        assert_eq!(c.freedom, 0);
        assert_eq!(c.generators.len(), 1);
        let e = t.convert(&c.generators[0], Representation::Expectation).unwrap();
        assert_eq!(e.entries, RVec::from_i64(&[1, 1, 0, 0]));
        let low = conditional_state_set(&t, 1).unwrap();
        assert_eq!(
            t.convert(&low.generators[0], Representation::Expectation)
                .unwrap()
                .entries,
            RVec::from_i64(&[1, -1, 0, 0])
        );
    }

    #[test]
    fn classical_slice_is_a_single_ray() {
        let c = conditional_state_set(&make_classical(2).unwrap(), 0).unwrap();
        assert_eq!((c.generators.len(), c.freedom), (1, 0));
    }

    #[test]
    fn generators_are_certain_members() {
        for name in crate::theory::BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            for b in 0..t.n_branches() {
                let c = conditional_state_set(&t, b).unwrap();
                assert!(c.freedom <= t.extra_freedom());
                for g in &c.generators {
                    assert!(membership(&t, g).unwrap().is_inside());
                    assert_eq!(
                        t.minimal_probability(&g.entries, t.branch_measurement(), b),
                        g.entries[0]
                    );
                }
            }
        }
    }

    #[test]
    fn invalid_branch_is_rejected() {
        assert!(conditional_state_set(&make_gbit(), 2).is_err());
    }

    #[test]
    fn classes_of_builtins() {
        use RestrictionClass::*;
        for m in 2..=3 {
            for k in 2..=3 {
                assert_eq!(
                    classify_restriction(&make_boxworld(m, k).unwrap()).unwrap().class,
                    FullyIndependent
                );
            }
        }
        assert_eq!(
            classify_restriction(&make_qubit()).unwrap().class,
            FullyConditionallyRestricted
        );
        assert_eq!(
            classify_restriction(&make_classical(2).unwrap()).unwrap().class,
            FullyConditionallyRestricted
        );
        let oct = classify_restriction(&make_octahedron()).unwrap();
        assert_eq!((oct.class, oct.m), (FullyConditionallyRestricted, 1));
    }

    #[test]
    fn report_json_shape() {
        let r = classify_restriction(&make_boxworld(3, 2).unwrap()).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(
            json,
            r#"{"class":"FullyIndependent","per_branch_freedom":{"up":2,"low":2},"N":2,"M":2,"d":4}"#
        );
        let back: RestrictionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn uncertainty_examples() {
        assert!(check_quantum_like_uncertainty(&make_qubit(), &["Z", "X", "Y"])
            .unwrap()
            .holds());
        match check_quantum_like_uncertainty(&make_gbit(), &["Z", "X"]).unwrap() {
            Uncertainty::Fails { witness, measurement } => {
                assert_eq!(witness.entries, RVec::new(vec![int(1), int(1), int(1)]));
                assert_eq!(measurement, "X");
            }
            Uncertainty::Holds => panic!("gbit must violate the relation"),
        }
        assert!(check_quantum_like_uncertainty(&make_classical(2).unwrap(), &["Z"])
            .unwrap()
            .holds());
        assert!(check_quantum_like_uncertainty(&make_octahedron(), &["Z", "X"])
            .unwrap()
            .holds());
    }

    #[test]
    fn uncertainty_argument_errors() {
        assert!(check_quantum_like_uncertainty(&make_qubit(), &["X", "Y"]).is_err());
        assert!(check_quantum_like_uncertainty(&make_qubit(), &["Z", "W"]).is_err());
    }

    #[test]
    fn holding_uncertainty_excludes_full_independence() {
        for name in crate::theory::BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            let labels: Vec<&str> = t.measurements().iter().map(|m| m.label.as_str()).collect();
            if t.extra_freedom() > 0 && check_quantum_like_uncertainty(&t, &labels).unwrap().holds() {
                assert_ne!(
                    classify_restriction(&t).unwrap().class,
                    RestrictionClass::FullyIndependent,
                    "{name}"
                );
            }
        }
    }
}
