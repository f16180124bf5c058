//! Mutual unbiasedness through permuted outcome statistics.

use std::fmt;

use itertools::Itertools;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::exact::{RVec, Rat};
use crate::theory::{membership, Representation, StateSpace, StateVec, TheorySpec};

/// Relabelling of one measurement's outcomes: outcome `o` becomes `mapping[o]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    pub measurement: String,
    pub mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(measurement: impl Into<String>, mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &o in &mapping {
            if o >= mapping.len() || std::mem::replace(&mut seen[o], true) {
                return Err(argument(format!(
                    "{mapping:?} is not a permutation of 0..{}",
                    mapping.len()
                )));
            }
        }
        Ok(Permutation {
            measurement: measurement.into(),
            mapping,
        })
    }

    pub fn identity(measurement: impl Into<String>, outcomes: usize) -> Self {
        Permutation {
            measurement: measurement.into(),
            mapping: (0..outcomes).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut mapping = vec![0; self.mapping.len()];
        for (o, &to) in self.mapping.iter().enumerate() {
            mapping[to] = o;
        }
        Permutation {
            measurement: self.measurement.clone(),
            mapping,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(o, &to)| o == to)
    }
}

/// Applies `p` to the statistics of one measurement of a minimal state,
/// leaving `n` and every other measurement untouched. The result need not
/// be a valid state.
pub fn permute_measurement_stats(t: &TheorySpec, s: &StateVec, p: &Permutation) -> Result<StateVec> {
    if s.rep != Representation::Minimal {
        return Err(argument(format!("expected a Minimal state, got {:?}", s.rep)));
    }
    if s.entries.len() != t.dim() {
        return Err(argument(format!(
            "state has {} entries, theory dimension is {}",
            s.entries.len(),
            t.dim()
        )));
    }
    let m = t.measurement_index(&p.measurement)?;
    let outcomes = t.measurements()[m].outcomes;
    if p.mapping.len() != outcomes {
        return Err(argument(format!(
            "permutation has {} entries but {:?} has {outcomes} outcomes",
            p.mapping.len(),
            p.measurement
        )));
    }
    let old = t.minimal_distribution(&s.entries, m);
    let mut new = vec![Rat::zero(); outcomes];
    for (o, value) in old.into_iter().enumerate() {
        new[p.mapping[o]] = value;
    }
    let block = t.block_of(m);
    let mut entries = s.entries.clone();
    for (i, idx) in block.leading().enumerate() {
        entries[idx] = new[i].clone();
    }
    Ok(StateVec::minimal(entries))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MubVerdict {
    MutuallyUnbiased,
    NotUnbiased,
}

impl fmt::Display for MubVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A valid state whose permuted image is not a valid state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub state: RVec,
    pub measurement: String,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MubReport {
    pub labels: Vec<String>,
    pub verdict: MubVerdict,
    pub counterexample: Option<Counterexample>,
}

/// Every valid state must stay valid when any one listed measurement has its
/// outcomes permuted.
///
/// Permuting statistics is linear on minimal vectors and the state set is
/// the cone over the vertices, so the vertices settle the question. For the
/// qubit ball every binary swap is a sign flip of one Bloch coordinate.
pub fn is_mutually_unbiased(t: &TheorySpec, labels: &[&str]) -> Result<MubReport> {
    if labels.len() < 2 {
        return Err(argument("mutual unbiasedness needs at least two measurements"));
    }
    let indices: Vec<usize> = labels.iter().map(|l| t.measurement_index(l)).collect::<Result<_>>()?;
    if indices.iter().duplicates().next().is_some() {
        return Err(argument("measurement labels must be distinct"));
    }
    let labels: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    let vertices = match t.state_space() {
        StateSpace::Ball => {
            return Ok(MubReport {
                labels,
                verdict: MubVerdict::MutuallyUnbiased,
                counterexample: None,
            })
        }
        StateSpace::Polytope(p) => &p.vertices,
    };
    for &m in &indices {
        let spec = &t.measurements()[m];
        for mapping in (0..spec.outcomes).permutations(spec.outcomes) {
            let p = Permutation {
                measurement: spec.label.clone(),
                mapping,
            };
            if p.is_identity() {
                continue;
            }
            for v in vertices {
                let image = permute_measurement_stats(t, &StateVec::minimal(v.clone()), &p)?;
                if !membership(t, &image)?.is_inside() {
                    return Ok(MubReport {
                        labels,
                        verdict: MubVerdict::NotUnbiased,
                        counterexample: Some(Counterexample {
                            state: v.clone(),
                            measurement: p.measurement,
                            permutation: p.mapping,
                        }),
                    });
                }
            }
        }
    }
    Ok(MubReport {
        labels,
        verdict: MubVerdict::MutuallyUnbiased,
        counterexample: None,
    })
}

/// Two qubit measurements along Bloch axes `a` and `b` are mutually
/// unbiased exactly when the axes are orthogonal.
pub fn qubit_axis_unbiased(a: &RVec, b: &RVec) -> Result<bool> {
    if a.len() != 3 || b.len() != 3 {
        return Err(argument("Bloch axes have three coordinates"));
    }
    if a.is_zero() || b.is_zero() {
        return Err(argument("Bloch axis must be nonzero"));
    }
    Ok(a.dot(b)?.is_zero())
}
