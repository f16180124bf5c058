//! Probability, expectation and minimal representations, effects and
//! state-space membership.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{StateSpace, TheorySpec};
use crate::error::{argument, shape, Error, Result};
use crate::exact::rat::display_rat;
use crate::exact::{rat, RMat, RVec, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    /// Every outcome probability of every measurement, in declared order.
    Probability,
    /// `[n, <G_1>, <G_2>, ...]` in declared order; binary measurements only.
    Expectation,
    /// `[n, leading Z probabilities, leading fiducial probabilities]`.
    Minimal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateVec {
    pub rep: Representation,
    pub entries: RVec,
}

impl StateVec {
    pub fn new(rep: Representation, entries: RVec) -> Self {
        StateVec { rep, entries }
    }

    pub fn minimal(entries: RVec) -> Self {
        Self::new(Representation::Minimal, entries)
    }

    pub fn probability(entries: RVec) -> Self {
        Self::new(Representation::Probability, entries)
    }

    pub fn expectation(entries: RVec) -> Self {
        Self::new(Representation::Expectation, entries)
    }

    fn expect_rep(&self, rep: Representation) -> Result<()> {
        if self.rep != rep {
            return Err(argument(format!("expected a {rep:?} state, got {:?}", self.rep)));
        }
        Ok(())
    }
}

impl fmt::Display for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.entries)
    }
}

impl TheorySpec {
    pub fn representation_len(&self, rep: Representation) -> Result<usize> {
        match rep {
            Representation::Probability => Ok(self.probability_len()),
            Representation::Minimal => Ok(self.dim()),
            Representation::Expectation => {
                self.require_binary()?;
                Ok(1 + self.measurements().len())
            }
        }
    }

    fn require_binary(&self) -> Result<()> {
        if let Some(m) = self.measurements().iter().find(|m| m.outcomes != 2) {
            return Err(Error::UnsupportedRepresentation(format!(
                "the expectation representation needs binary measurements; {:?} has {} outcomes",
                m.label, m.outcomes
            )));
        }
        Ok(())
    }

    fn check_len(&self, s: &StateVec) -> Result<()> {
        let want = self.representation_len(s.rep)?;
        if s.entries.len() != want {
            return Err(shape(format!(
                "{:?} state has {} entries, theory {} needs {want}",
                s.rep,
                s.entries.len(),
                self.name()
            )));
        }
        Ok(())
    }

    /// The matrix taking probability vectors to expectation vectors:
    /// `n` is the mean of all measurement totals, `<G> = p(G=0) - p(G=1)`.
    pub fn expectation_from_probability(&self) -> Result<RMat> {
        self.require_binary()?;
        let k = self.measurements().len();
        let mut m = RMat::zeros(1 + k, 2 * k);
        let share = rat(1, k as i64);
        for g in 0..k {
            m[(0, 2 * g)] = share.clone();
            m[(0, 2 * g + 1)] = share.clone();
            m[(1 + g, 2 * g)] = Rat::one();
            m[(1 + g, 2 * g + 1)] = -Rat::one();
        }
        Ok(m)
    }

    /// Left inverse of [`expectation_from_probability`](Self::expectation_from_probability)
    /// on states: `p(G=0) = (n + <G>)/2`, `p(G=1) = (n - <G>)/2`.
    pub fn probability_from_expectation(&self) -> Result<RMat> {
        self.require_binary()?;
        let k = self.measurements().len();
        let half = rat(1, 2);
        let mut m = RMat::zeros(2 * k, 1 + k);
        for g in 0..k {
            m[(2 * g, 0)] = half.clone();
            m[(2 * g, 1 + g)] = half.clone();
            m[(2 * g + 1, 0)] = half.clone();
            m[(2 * g + 1, 1 + g)] = -half.clone();
        }
        Ok(m)
    }

    pub fn minimal_from_probability(&self) -> RMat {
        let mut m = RMat::zeros(self.dim(), self.probability_len());
        let z = self.branch_measurement();
        let z_off = self.probability_offset(z);
        for o in 0..self.n_branches() {
            m[(0, z_off + o)] = Rat::one();
        }
        for block in self.blocks() {
            let off = self.probability_offset(block.measurement);
            for (j, row) in block.leading().enumerate() {
                m[(row, off + j)] = Rat::one();
            }
        }
        m
    }

    /// Rebuilds dropped outcomes by subtraction from `n`.
    pub fn probability_from_minimal(&self) -> RMat {
        let mut m = RMat::zeros(self.probability_len(), self.dim());
        for block in self.blocks() {
            let off = self.probability_offset(block.measurement);
            for (j, col) in block.leading().enumerate() {
                m[(off + j, col)] = Rat::one();
            }
            let last = off + block.outcomes - 1;
            m[(last, 0)] = Rat::one();
            for col in block.leading() {
                m[(last, col)] = -Rat::one();
            }
        }
        m
    }

    pub fn minimal_from_expectation(&self) -> Result<RMat> {
        self.require_binary()?;
        let half = rat(1, 2);
        let mut m = RMat::zeros(self.dim(), 1 + self.measurements().len());
        m[(0, 0)] = Rat::one();
        for block in self.blocks() {
            m[(block.start, 0)] = half.clone();
            m[(block.start, 1 + block.measurement)] = half.clone();
        }
        Ok(m)
    }

    pub fn expectation_from_minimal(&self) -> Result<RMat> {
        self.require_binary()?;
        let mut m = RMat::zeros(1 + self.measurements().len(), self.dim());
        m[(0, 0)] = Rat::one();
        for block in self.blocks() {
            m[(1 + block.measurement, 0)] = -Rat::one();
            m[(1 + block.measurement, block.start)] = Rat::from_integer(2.into());
        }
        Ok(m)
    }

    /// Matrix taking `rep` vectors to minimal vectors (exact on states).
    pub fn minimal_from(&self, rep: Representation) -> Result<RMat> {
        match rep {
            Representation::Minimal => Ok(RMat::identity(self.dim())),
            Representation::Probability => Ok(self.minimal_from_probability()),
            Representation::Expectation => self.minimal_from_expectation(),
        }
    }

    /// Matrix taking minimal vectors to `rep` vectors.
    pub fn minimal_to(&self, rep: Representation) -> Result<RMat> {
        match rep {
            Representation::Minimal => Ok(RMat::identity(self.dim())),
            Representation::Probability => Ok(self.probability_from_minimal()),
            Representation::Expectation => self.expectation_from_minimal(),
        }
    }

    /// Re-expresses any state in `target` representation.
    pub fn convert(&self, s: &StateVec, target: Representation) -> Result<StateVec> {
        self.check_len(s)?;
        if s.rep == target {
            return Ok(s.clone());
        }
        if s.rep == Representation::Probability {
            self.check_equal_normalizations(&s.entries)?;
        }
        let minimal = self.minimal_from(s.rep)?.mul_vec(&s.entries)?;
        let out = self.minimal_to(target)?.mul_vec(&minimal)?;
        Ok(StateVec::new(target, out))
    }

    /// A minimal-representation matrix rewritten to act on expectation vectors.
    pub fn transformation_to_expectation(&self, t: &RMat) -> Result<RMat> {
        self.expectation_from_minimal()?
            .mul(t)?
            .mul(&self.minimal_from_expectation()?)
    }

    /// An expectation-representation matrix rewritten to act on minimal vectors.
    pub fn transformation_from_expectation(&self, t: &RMat) -> Result<RMat> {
        self.minimal_from_expectation()?
            .mul(t)?
            .mul(&self.expectation_from_minimal()?)
    }

    /// The normalization `n` of any state.
    pub fn normalization(&self, s: &StateVec) -> Result<Rat> {
        Ok(self.convert(s, Representation::Minimal)?.entries[0].clone())
    }

    fn check_equal_normalizations(&self, p: &RVec) -> Result<()> {
        let totals: Vec<Rat> = self
            .measurements()
            .iter()
            .enumerate()
            .map(|(m, spec)| {
                let off = self.probability_offset(m);
                p[off..off + spec.outcomes].iter().fold(Rat::zero(), |a, x| a + x)
            })
            .collect();
        if let Some((m, t)) = totals.iter().enumerate().find(|(_, t)| **t != totals[0]) {
            return Err(Error::Validation(format!(
                "measurement {:?} totals {} but {:?} totals {}",
                self.measurements()[m].label,
                display_rat(t),
                self.measurements()[0].label,
                display_rat(&totals[0])
            )));
        }
        Ok(())
    }

    /// Effect of `outcome` of measurement `label`, expressed in `rep`.
    ///
    /// Built in the minimal representation and carried to `rep` with the
    /// transpose of the `rep -> minimal` conversion.
    pub fn effect(&self, label: &str, outcome: usize, rep: Representation) -> Result<Effect> {
        let m = self.measurement_index(label)?;
        let spec = &self.measurements()[m];
        if outcome >= spec.outcomes {
            return Err(argument(format!(
                "measurement {label:?} has no outcome {outcome} (it has {})",
                spec.outcomes
            )));
        }
        let block = self.block_of(m);
        let d = self.dim();
        let minimal = if outcome + 1 < block.outcomes {
            RVec::unit(d, block.start + outcome)
        } else {
            let mut e = RVec::unit(d, 0);
            for i in block.leading() {
                e[i] = -Rat::one();
            }
            e
        };
        let vector = self.minimal_from(rep)?.transpose().mul_vec(&minimal)?;
        Ok(Effect {
            rep,
            vector,
            measurement: label.to_string(),
            outcome,
        })
    }
}

pub fn to_expectation(t: &TheorySpec, s: &StateVec) -> Result<StateVec> {
    s.expect_rep(Representation::Probability)?;
    t.check_len(s)?;
    Ok(StateVec::expectation(
        t.expectation_from_probability()?.mul_vec(&s.entries)?,
    ))
}

pub fn to_probability(t: &TheorySpec, s: &StateVec) -> Result<StateVec> {
    s.expect_rep(Representation::Expectation)?;
    t.check_len(s)?;
    Ok(StateVec::probability(
        t.probability_from_expectation()?.mul_vec(&s.entries)?,
    ))
}

pub fn to_minimal(t: &TheorySpec, s: &StateVec) -> Result<StateVec> {
    s.expect_rep(Representation::Probability)?;
    t.convert(s, Representation::Minimal)
}

pub fn from_minimal(t: &TheorySpec, s: &StateVec) -> Result<StateVec> {
    s.expect_rep(Representation::Minimal)?;
    t.convert(s, Representation::Probability)
}

/// A measurement outcome as a linear functional on states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Effect {
    pub rep: Representation,
    pub vector: RVec,
    pub measurement: String,
    pub outcome: usize,
}

pub fn outcome_probability(s: &StateVec, e: &Effect) -> Result<Rat> {
    if s.rep != e.rep {
        return Err(argument(format!(
            "effect is in {:?} representation but state is {:?}",
            e.rep, s.rep
        )));
    }
    e.vector.dot(&s.entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `n` outside `[0, 1]`.
    Normalization { n: Rat },
    /// Halfspace `index` of the H-representation, exceeded by `excess`.
    Halfspace { index: usize, excess: Rat },
    /// `<X>^2 + <Y>^2 + <Z>^2 - n^2 > 0`.
    Ball { excess: Rat },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Normalization { n } => write!(f, "normalization n = {} outside [0, 1]", display_rat(n)),
            Violation::Halfspace { index, excess } => {
                write!(f, "halfspace {index} exceeded by {}", display_rat(excess))
            }
            Violation::Ball { excess } => write!(f, "<X>^2+<Y>^2+<Z>^2 exceeds n^2 by {}", display_rat(excess)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Inside,
    Outside(Violation),
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside)
    }
}

/// Exact membership in the (sub-normalized) state set. Accepts any
/// representation; non-minimal states are converted first.
pub fn membership(t: &TheorySpec, s: &StateVec) -> Result<Membership> {
    let minimal = match s.rep {
        Representation::Minimal => {
            t.check_len(s)?;
            s.entries.clone()
        }
        _ => t.convert(s, Representation::Minimal)?.entries,
    };
    Ok(minimal_membership(t, &minimal))
}

pub(crate) fn minimal_membership(t: &TheorySpec, s: &RVec) -> Membership {
    let n = &s[0];
    if n.is_negative() || n > &Rat::one() {
        return Membership::Outside(Violation::Normalization { n: n.clone() });
    }
    match t.state_space() {
        StateSpace::Polytope(p) => {
            for (index, h) in p.halfspaces.iter().enumerate() {
                let excess = crate::exact::linalg::dot(&h.a, s) - &h.b * n;
                if excess.is_positive() {
                    return Membership::Outside(Violation::Halfspace { index, excess });
                }
            }
            Membership::Inside
        }
        StateSpace::Ball => {
            let two = Rat::from_integer(2.into());
            let norm_sq = t.blocks().iter().fold(Rat::zero(), |acc, b| {
                let g = &two * &s[b.start] - n;
                acc + &g * &g
            });
            let excess = norm_sq - n * n;
            if excess.is_positive() {
                Membership::Outside(Violation::Ball { excess })
            } else {
                Membership::Inside
            }
        }
    }
}
