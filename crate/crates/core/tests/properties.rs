//! Randomized checks across module boundaries. Proptest supplies seeds and
//! small parameters; all arithmetic stays exact.

use gptdyn_core::exact::{int, stochastic_fixed_point, RMat, RVec};
use gptdyn_core::mub::{permute_measurement_stats, Permutation};
use gptdyn_core::solver::{allowed_transform_set, verify_transformation, StatePreserving, Transformation};
use gptdyn_core::theory::sampling::{random_state, random_stochastic, random_weights};
use gptdyn_core::theory::{
    builtin, from_minimal, make_boxworld, membership, to_expectation, to_minimal, to_probability, Representation,
    StateVec, BUILTIN_NAMES,
};
use num_traits::Signed;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn builtin_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(BUILTIN_NAMES.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_states_are_members(name in builtin_name(), seed: u64) {
        let t = builtin(name).unwrap();
        let s = random_state(&mut StdRng::seed_from_u64(seed), &t);
        prop_assert!(membership(&t, &s).unwrap().is_inside());
        let p = from_minimal(&t, &s).unwrap();
        prop_assert!(membership(&t, &p).unwrap().is_inside());
    }

    #[test]
    fn representations_round_trip(name in builtin_name(), seed: u64) {
        let t = builtin(name).unwrap();
        let s = random_state(&mut StdRng::seed_from_u64(seed), &t);
        let p = from_minimal(&t, &s).unwrap();
        prop_assert_eq!(&to_minimal(&t, &p).unwrap(), &s);
        let e = to_expectation(&t, &p).unwrap();
        prop_assert_eq!(&to_probability(&t, &e).unwrap(), &p);
        prop_assert_eq!(&t.convert(&e, Representation::Minimal).unwrap(), &s);
    }

    #[test]
    fn allowed_transformations_keep_states_inside(name in builtin_name(), seed: u64) {
        let t = builtin(name).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        for b in 0..t.n_branches() {
            let set = allowed_transform_set(&t, b).unwrap();
            let maps: Vec<RMat> = match &set.state_preserving {
                StatePreserving::UniqueIdentity => vec![RMat::identity(t.dim())],
                StatePreserving::PolytopeFamily { witnesses, .. } => {
                    let w = random_weights(&mut rng, witnesses.len());
                    vec![set.state_preserving.family_member(&set.linear_stage, &w).unwrap().unwrap()]
                }
                StatePreserving::CandidateVerified(list) => list.iter().map(|(_, c)| c.matrix().clone()).collect(),
            };
            for m in maps {
                for _ in 0..8 {
                    let s = random_state(&mut rng, &t);
                    let image = StateVec::minimal(m.mul_vec(&s.entries).unwrap());
                    prop_assert!(membership(&t, &image).unwrap().is_inside(), "{} branch {}: {}", name, b, image.entries);
                }
            }
        }
    }

    #[test]
    fn permutation_then_inverse_is_identity(seed: u64, outcomes in 2usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = make_boxworld(2, outcomes).unwrap();
        let mut mapping: Vec<usize> = (0..outcomes).collect();
        mapping.shuffle(&mut rng);
        let p = Permutation::new("X", mapping).unwrap();
        let s = random_state(&mut rng, &t);
        let there = permute_measurement_stats(&t, &s, &p).unwrap();
        prop_assert_eq!(permute_measurement_stats(&t, &there, &p.inverse()).unwrap(), s);
    }

    #[test]
    fn stochastic_fixed_points_are_distributions(seed: u64, size in 1usize..=7) {
        let s = random_stochastic(&mut StdRng::seed_from_u64(seed), size);
        let v = stochastic_fixed_point(&s).unwrap();
        prop_assert!(v.iter().all(|x| !x.is_negative()));
        prop_assert_eq!(v.sum(), int(1));
        prop_assert_eq!(s.mul_vec(&v).unwrap(), v);
    }
}

#[test]
fn perturbing_the_identity_breaks_the_gbit() {
    // Any nonzero member of the gbit linear stage fails state preservation.
    let t = builtin("gbit").unwrap();
    for b in 0..2 {
        let set = allowed_transform_set(&t, b).unwrap();
        assert_eq!(set.linear_stage.dim(), 1);
        for step in [int(1), int(-1), gptdyn_core::exact::rat(1, 7)] {
            let m = set.linear_stage.instantiate(&RVec::new(vec![step.clone()])).unwrap();
            let report = verify_transformation(&t, &Transformation(m), b).unwrap();
            assert!(report.residuals_zero(), "linear stage members satisfy the equalities");
            assert!(!report.passed(), "branch {b}, step {step}");
        }
    }
}
