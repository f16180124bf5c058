//! Random exact states and stochastic matrices for property checks.

use num_traits::{One, Zero};
use rand::Rng;

use super::{StateSpace, StateVec, TheorySpec};
use crate::exact::{rat, RMat, RVec, Rat};

/// Uniformly drawn rational `p/den` with `0 <= p <= den`.
pub fn random_unit_rat<R: Rng + ?Sized>(rng: &mut R, den: i64) -> Rat {
    rat(rng.gen_range(0..=den), den)
}

/// Random rational convex weights over `count` items.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Rat> {
    loop {
        let raw: Vec<i64> = (0..count).map(|_| rng.gen_range(0..=12)).collect();
        let total: i64 = raw.iter().sum();
        if total > 0 {
            return raw.into_iter().map(|w| rat(w, total)).collect();
        }
    }
}

/// A random valid (possibly sub-normalized) state in minimal representation.
///
/// Polytopes: random convex mixture of vertices, scaled by a random `n`.
/// Ball: rejection-sampled rational point of the unit ball, scaled by `n`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, theory: &TheorySpec) -> StateVec {
    let n = random_unit_rat(rng, 8);
    let normalized = match theory.state_space() {
        StateSpace::Polytope(p) => {
            let w = random_weights(rng, p.vertices.len());
            p.vertices
                .iter()
                .zip(&w)
                .fold(RVec::zeros(theory.dim()), |acc, (v, w)| {
                    acc.add(&v.scale(w)).expect("same length")
                })
        }
        StateSpace::Ball => {
            let expectation = loop {
                let g: Vec<Rat> = (0..3).map(|_| rat(rng.gen_range(-10..=10), 10)).collect();
                let r2 = g.iter().fold(Rat::zero(), |acc, x| acc + x * x);
                if r2 <= Rat::one() {
                    break g;
                }
            };
            let mut e = vec![Rat::one()];
            // Blocks are Z first, then fiducials; expectation order is declared order.
            let mut by_measurement = vec![Rat::zero(); theory.measurements().len()];
            for (b, g) in theory.blocks().iter().zip(expectation) {
                by_measurement[b.measurement] = g;
            }
            e.extend(by_measurement);
            theory
                .minimal_from_expectation()
                .expect("ball theories are binary")
                .mul_vec(&RVec::new(e))
                .expect("shape")
        }
    };
    StateVec::minimal(normalized.scale(&n))
}

/// Random column-stochastic `size x size` matrix with small denominators.
pub fn random_stochastic<R: Rng + ?Sized>(rng: &mut R, size: usize) -> RMat {
    let columns: Vec<RVec> = (0..size).map(|_| RVec::new(random_weights(rng, size))).collect();
    RMat::from_columns(&columns, size).expect("square")
}

#[cfg(test)]
mod tests {
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    use super::*;
    use crate::theory::{builtin, membership, BUILTIN_NAMES};

    #[test]
    fn random_states_are_members() {
        let mut rng = StdRng::seed_from_u64(7);
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            for _ in 0..50 {
                let s = random_state(&mut rng, &t);
                assert!(membership(&t, &s).unwrap().is_inside(), "{name}: {s}");
            }
        }
    }

    #[test]
    fn random_stochastic_columns_sum_to_one() {
        let mut rng = StdRng::seed_from_u64(3);
        let s = random_stochastic(&mut rng, 4);
        for j in 0..4 {
            assert!(s.column(j).sum().is_one());
        }
    }
}
