//! Single-system theories: measurements, state spaces and their
//! representations.
//!
//! The canonical representation is the *minimal* one,
//! `[n, p(Z=0) .. p(Z=N-2), p(X1=0) .. p(X1=k1-2), ...]`: the
//! normalization followed by all but the last outcome probability of the
//! branch measurement and then of every fiducial measurement in declared
//! order. Its length is `d = N + M` with `M = sum_i (outcomes(X_i) - 1)`.
//!
//! State sets always contain the sub-normalized states `n * s` with
//! `n` in `[0, 1]`, so polytope halfspaces `a . s <= b` (stated for
//! normalized `s`) are applied in the homogenized form `a . s <= b n`.

mod builders;
mod config;
mod repr;
pub mod sampling;

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::exact::{
    facet_enumeration, lp_optimize, rank_of, vertex_enumeration, Constraints, Halfspace, LpStatus, RVec, Rat, Sense,
    MAX_ENUMERATION_DIM,
};

pub use builders::{
    builtin, make_boxworld, make_classical, make_cube, make_gbit, make_octahedron, make_qubit, BUILTIN_NAMES,
};
pub use config::{load_theory, load_theory_file};
pub(crate) use repr::minimal_membership;
pub use repr::{
    from_minimal, membership, outcome_probability, to_expectation, to_minimal, to_probability, Effect, Membership,
    Representation, StateVec, Violation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Branch,
    Fiducial,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementSpec {
    pub label: String,
    pub outcomes: usize,
    pub role: Role,
}

impl MeasurementSpec {
    pub fn new(label: impl Into<String>, outcomes: usize, role: Role) -> Self {
        MeasurementSpec {
            label: label.into(),
            outcomes,
            role,
        }
    }

    pub fn branch(label: impl Into<String>, outcomes: usize) -> Self {
        Self::new(label, outcomes, Role::Branch)
    }

    pub fn fiducial(label: impl Into<String>, outcomes: usize) -> Self {
        Self::new(label, outcomes, Role::Fiducial)
    }
}

/// State-space description as supplied by a caller or config file.
/// Polytope vectors are in minimal representation; vertices are normalized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpaceSpec {
    PolytopeV {
        vertices: Vec<RVec>,
        halfspaces: Option<Vec<Halfspace>>,
    },
    PolytopeH {
        halfspaces: Vec<Halfspace>,
    },
    /// `<X>^2 + <Y>^2 + <Z>^2 <= n^2` over the branch and two binary fiducials.
    Ball,
}

/// Normalized slice of a polytope state space in both representations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    pub vertices: Vec<RVec>,
    pub halfspaces: Vec<Halfspace>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSpace {
    Polytope(Polytope),
    Ball,
}

/// Position of one measurement's leading outcome probabilities inside the
/// minimal representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub measurement: usize,
    pub start: usize,
    pub outcomes: usize,
}

impl Block {
    /// Indices of the `outcomes - 1` explicit entries.
    pub fn leading(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.outcomes - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheorySpec {
    name: String,
    measurements: Vec<MeasurementSpec>,
    branch: usize,
    /// Minimal-representation blocks: branch first, then fiducials in order.
    blocks: Vec<Block>,
    dim: usize,
    state_space: StateSpace,
}

impl TheorySpec {
    /// Validates the description and completes the polytope to both
    /// V- and H-representation.
    pub fn new(name: impl Into<String>, measurements: Vec<MeasurementSpec>, space: StateSpaceSpec) -> Result<Self> {
        let (branch, blocks, dim) = layout(&measurements)?;
        let mut theory = TheorySpec {
            name: name.into(),
            measurements,
            branch,
            blocks,
            dim,
            state_space: StateSpace::Ball,
        };
        theory.state_space = match space {
            StateSpaceSpec::Ball => {
                theory.check_ball_shape()?;
                StateSpace::Ball
            }
            StateSpaceSpec::PolytopeV { vertices, halfspaces } => {
                StateSpace::Polytope(theory.complete_from_vertices(vertices, halfspaces)?)
            }
            StateSpaceSpec::PolytopeH { halfspaces } => {
                StateSpace::Polytope(theory.complete_from_halfspaces(halfspaces)?)
            }
        };
        theory.check_branches_attainable()?;
        Ok(theory)
    }

    /// Construction for builders whose V- and H-representations are known
    /// to agree; skips the enumeration cross-checks.
    pub(crate) fn from_trusted_polytope(
        name: impl Into<String>,
        measurements: Vec<MeasurementSpec>,
        polytope: Polytope,
    ) -> Result<Self> {
        let (branch, blocks, dim) = layout(&measurements)?;
        let theory = TheorySpec {
            name: name.into(),
            measurements,
            branch,
            blocks,
            dim,
            state_space: StateSpace::Polytope(polytope),
        };
        if let StateSpace::Polytope(p) = &theory.state_space {
            for (i, v) in p.vertices.iter().enumerate() {
                theory.check_vertex(i, v)?;
            }
            if rank_of(&p.vertices) != theory.dim {
                return Err(Error::DegenerateTheory("vertices do not span the state space".into()));
            }
        }
        Ok(theory)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn measurements(&self) -> &[MeasurementSpec] {
        &self.measurements
    }

    pub fn state_space(&self) -> &StateSpace {
        &self.state_space
    }

    pub fn polytope(&self) -> Option<&Polytope> {
        match &self.state_space {
            StateSpace::Polytope(p) => Some(p),
            StateSpace::Ball => None,
        }
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.state_space, StateSpace::Ball)
    }

    /// Index of the branch measurement Z within `measurements()`.
    pub fn branch_measurement(&self) -> usize {
        self.branch
    }

    /// Number of branches N (outcomes of Z).
    pub fn n_branches(&self) -> usize {
        self.measurements[self.branch].outcomes
    }

    /// Degrees of freedom M carried by the fiducial measurements.
    pub fn extra_freedom(&self) -> usize {
        self.dim - self.n_branches()
    }

    /// Length d = N + M of minimal-representation vectors.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_of(&self, measurement: usize) -> &Block {
        self.blocks
            .iter()
            .find(|b| b.measurement == measurement)
            .expect("every measurement has a block")
    }

    pub fn measurement_index(&self, label: &str) -> Result<usize> {
        self.measurements
            .iter()
            .position(|m| m.label == label)
            .ok_or_else(|| argument(format!("unknown measurement {label:?} in theory {}", self.name)))
    }

    pub fn all_binary(&self) -> bool {
        self.measurements.iter().all(|m| m.outcomes == 2)
    }

    /// Display label of a branch: `up`/`low` for two branches, the index otherwise.
    pub fn branch_label(&self, branch: usize) -> String {
        match (self.n_branches(), branch) {
            (2, 0) => "up".into(),
            (2, 1) => "low".into(),
            _ => branch.to_string(),
        }
    }

    pub fn parse_branch(&self, label: &str) -> Result<usize> {
        let n = self.n_branches();
        let idx = match label {
            "up" if n == 2 => 0,
            "low" if n == 2 => 1,
            other => other
                .parse::<usize>()
                .map_err(|_| argument(format!("invalid branch label {other:?}")))?,
        };
        self.check_branch(idx)?;
        Ok(idx)
    }

    pub fn check_branch(&self, branch: usize) -> Result<()> {
        if branch >= self.n_branches() {
            return Err(argument(format!(
                "branch {branch} out of range: Z has {} outcomes",
                self.n_branches()
            )));
        }
        Ok(())
    }

    /// Probability of `outcome` of `measurement` for a minimal vector.
    pub(crate) fn minimal_probability(&self, s: &[Rat], measurement: usize, outcome: usize) -> Rat {
        let block = self.block_of(measurement);
        if outcome + 1 < block.outcomes {
            s[block.start + outcome].clone()
        } else {
            block.leading().fold(s[0].clone(), |acc, i| acc - &s[i])
        }
    }

    /// Full outcome distribution of one measurement for a minimal vector.
    pub(crate) fn minimal_distribution(&self, s: &[Rat], measurement: usize) -> Vec<Rat> {
        (0..self.measurements[measurement].outcomes)
            .map(|o| self.minimal_probability(s, measurement, o))
            .collect()
    }

    /// Number of entries of a probability-representation vector.
    pub fn probability_len(&self) -> usize {
        self.measurements.iter().map(|m| m.outcomes).sum()
    }

    /// Offset of a measurement's block in the probability representation.
    pub(crate) fn probability_offset(&self, measurement: usize) -> usize {
        self.measurements[..measurement].iter().map(|m| m.outcomes).sum()
    }

    fn check_vertex(&self, index: usize, v: &RVec) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::Validation(format!(
                "vertex {index} {v} has {} entries, expected d = {}",
                v.len(),
                self.dim
            )));
        }
        if !v[0].is_one() {
            return Err(Error::Validation(format!(
                "vertex {index} {v} is not normalized (n = {})",
                v[0]
            )));
        }
        for m in 0..self.measurements.len() {
            for (o, p) in self.minimal_distribution(v, m).iter().enumerate() {
                if p.is_negative() || p > &Rat::one() {
                    return Err(Error::Validation(format!(
                        "vertex {index} {v}: p({}={o}) = {p} lies outside [0, 1]",
                        self.measurements[m].label
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_halfspace_shapes(&self, halfspaces: &[Halfspace]) -> Result<()> {
        for (i, h) in halfspaces.iter().enumerate() {
            if h.a.len() != self.dim {
                return Err(Error::Validation(format!(
                    "halfspace {i} has {} coefficients, expected d = {}",
                    h.a.len(),
                    self.dim
                )));
            }
        }
        Ok(())
    }

    fn check_ball_shape(&self) -> Result<()> {
        let fiducials: Vec<_> = self.measurements.iter().filter(|m| m.role == Role::Fiducial).collect();
        if self.n_branches() != 2 || fiducials.len() != 2 || fiducials.iter().any(|m| m.outcomes != 2) {
            return Err(Error::Validation(
                "ball state spaces need a binary branch measurement and exactly two binary fiducial measurements"
                    .into(),
            ));
        }
        Ok(())
    }

    fn complete_from_vertices(&self, vertices: Vec<RVec>, halfspaces: Option<Vec<Halfspace>>) -> Result<Polytope> {
        if vertices.is_empty() {
            return Err(Error::Validation("polytope has no vertices".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            self.check_vertex(i, v)?;
        }
        if rank_of(&vertices) != self.dim {
            return Err(Error::DegenerateTheory(format!(
                "vertices span {} of the {} dimensions; the fiducial measurements are inconsistent with the state space",
                rank_of(&vertices),
                self.dim
            )));
        }
        let stripped: Vec<RVec> = vertices.iter().map(strip_normalization).collect();
        let ambient = self.dim - 1;
        let halfspaces = match halfspaces {
            None if ambient > MAX_ENUMERATION_DIM => {
                return Err(Error::UnsupportedDimension {
                    dim: self.dim,
                    message: "polytope_v theories of this size must also supply \"halfspaces\"".into(),
                })
            }
            None => facet_enumeration(&stripped)?.into_iter().map(lift_halfspace).collect(),
            Some(given) => {
                self.check_halfspace_shapes(&given)?;
                self.check_supplied_halfspaces(&vertices, &stripped, &given)?;
                given
            }
        };
        Ok(Polytope { vertices, halfspaces })
    }

    /// Supplied H-representation must contain the hull and consist of
    /// facets of it. When the dimension allows, it must equal the
    /// enumerated facet set exactly.
    fn check_supplied_halfspaces(&self, vertices: &[RVec], stripped: &[RVec], given: &[Halfspace]) -> Result<()> {
        for (i, h) in given.iter().enumerate() {
            for (j, v) in vertices.iter().enumerate() {
                if !h.contains(v)? {
                    return Err(Error::Validation(format!(
                        "vertex {j} {v} violates supplied halfspace {i}"
                    )));
                }
            }
            let tight: Vec<RVec> = vertices
                .iter()
                .filter(|v| h.slack(v).map(|s| s.is_zero()).unwrap_or(false))
                .cloned()
                .collect();
            if tight.is_empty() || crate::exact::affine_hull_dim(&tight)? + 2 != self.dim {
                return Err(Error::Validation(format!(
                    "supplied halfspace {i} is not a facet of the vertex hull"
                )));
            }
        }
        if self.dim - 1 <= MAX_ENUMERATION_DIM {
            let expected: HashSet<Halfspace> = facet_enumeration(stripped)?
                .into_iter()
                .map(|h| lift_halfspace(h).normalized())
                .collect();
            let supplied: HashSet<Halfspace> = given.iter().map(|h| fold_normalization(h).normalized()).collect();
            if expected != supplied {
                return Err(Error::Validation(
                    "supplied halfspaces do not match the facets of the vertex hull".into(),
                ));
            }
        }
        Ok(())
    }

    fn complete_from_halfspaces(&self, halfspaces: Vec<Halfspace>) -> Result<Polytope> {
        self.check_halfspace_shapes(&halfspaces)?;
        let ambient = self.dim - 1;
        // Restrict to n = 1: a' . x <= b - a_0.
        let reduced: Vec<Halfspace> = halfspaces
            .iter()
            .map(|h| Halfspace::new(strip_normalization(&h.a), &h.b - &h.a[0]))
            .collect();
        let ineq = Constraints::from_rows(reduced.iter().map(|h| (h.a.clone(), h.b.clone())).collect(), ambient)?;
        for j in 0..ambient {
            for sense in [Sense::Min, Sense::Max] {
                let r = lp_optimize(&RVec::unit(ambient, j), &Constraints::none(ambient), &ineq, sense)?;
                match r.status {
                    LpStatus::Optimal => {}
                    LpStatus::Infeasible => return Err(Error::Validation("halfspaces describe an empty set".into())),
                    LpStatus::Unbounded => {
                        return Err(Error::Validation(format!(
                            "halfspaces describe an unbounded set (coordinate {})",
                            j + 1
                        )))
                    }
                }
            }
        }
        let vertices: Vec<RVec> = vertex_enumeration(&reduced, ambient)?
            .into_iter()
            .map(|x| {
                let mut v = vec![Rat::one()];
                v.extend(x.into_inner());
                RVec::new(v)
            })
            .collect();
        for (i, v) in vertices.iter().enumerate() {
            self.check_vertex(i, v)?;
        }
        if rank_of(&vertices) != self.dim {
            return Err(Error::DegenerateTheory(
                "halfspaces describe a lower-dimensional state space".into(),
            ));
        }
        Ok(Polytope { vertices, halfspaces })
    }

    fn check_branches_attainable(&self) -> Result<()> {
        if let StateSpace::Polytope(p) = &self.state_space {
            for b in 0..self.n_branches() {
                if !p
                    .vertices
                    .iter()
                    .any(|v| self.minimal_probability(v, self.branch, b).is_one())
                {
                    return Err(Error::Validation(format!(
                        "no state is certain to be found in branch {}",
                        self.branch_label(b)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for TheorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (N = {}, M = {}, d = {})",
            self.name,
            self.n_branches(),
            self.extra_freedom(),
            self.dim
        )
    }
}

fn layout(measurements: &[MeasurementSpec]) -> Result<(usize, Vec<Block>, usize)> {
    if measurements.is_empty() {
        return Err(Error::Validation("theory has no measurements".into()));
    }
    let mut labels = HashSet::new();
    for m in measurements {
        if m.outcomes < 2 {
            return Err(Error::Validation(format!(
                "measurement {:?} has {} outcomes; at least 2 are required",
                m.label, m.outcomes
            )));
        }
        if !labels.insert(m.label.as_str()) {
            return Err(Error::Validation(format!("duplicate measurement label {:?}", m.label)));
        }
    }
    let branches: Vec<usize> = (0..measurements.len())
        .filter(|&i| measurements[i].role == Role::Branch)
        .collect();
    let branch = match branches.as_slice() {
        [b] => *b,
        [] => return Err(Error::Validation("no measurement has role \"branch\"".into())),
        _ => {
            return Err(Error::Validation(format!(
                "{} measurements have role \"branch\"; exactly one is allowed",
                branches.len()
            )))
        }
    };
    let order = std::iter::once(branch).chain((0..measurements.len()).filter(|&i| i != branch));
    let mut start = 1;
    let mut blocks = Vec::with_capacity(measurements.len());
    for m in order {
        let outcomes = measurements[m].outcomes;
        blocks.push(Block {
            measurement: m,
            start,
            outcomes,
        });
        start += outcomes - 1;
    }
    Ok((branch, blocks, start))
}

fn strip_normalization(v: &RVec) -> RVec {
    RVec::new(v[1..].to_vec())
}

/// Lifts a halfspace over the non-normalization coordinates to one over
/// the full minimal vector.
fn lift_halfspace(h: Halfspace) -> Halfspace {
    let mut a = vec![Rat::zero()];
    a.extend(h.a.into_inner());
    Halfspace::new(RVec::new(a), h.b)
}

/// Moves the n-coefficient into the bound (valid on normalized states).
fn fold_normalization(h: &Halfspace) -> Halfspace {
    let mut a = h.a.clone();
    let b = &h.b - &a[0];
    a[0] = Rat::zero();
    Halfspace::new(a, b)
}
