use itertools::Itertools;
use num_traits::One;

use super::{MeasurementSpec, Polytope, StateSpaceSpec, TheorySpec};
use crate::error::{argument, Result};
use crate::exact::{int, rat, Halfspace, RVec, Rat};

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["gbit", "cube", "qubit", "classical2", "octahedron"];

fn measurement_labels(m: usize) -> Vec<String> {
    match m {
        2 => vec!["Z".into(), "X".into()],
        3 => vec!["Z".into(), "X".into(), "Y".into()],
        _ => std::iter::once("Z".to_string())
            .chain((1..m).map(|i| format!("X{i}")))
            .collect(),
    }
}

/// Box-world with `m` measurements of `k` outcomes each (the first is the
/// branch measurement): every deterministic outcome assignment is a vertex.
pub fn make_boxworld(m: usize, k: usize) -> Result<TheorySpec> {
    if m < 2 || k < 2 {
        return Err(argument(format!(
            "box-world needs m >= 2 and k >= 2, got m = {m}, k = {k}"
        )));
    }
    let labels = measurement_labels(m);
    let measurements: Vec<MeasurementSpec> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if i == 0 {
                MeasurementSpec::branch(l.clone(), k)
            } else {
                MeasurementSpec::fiducial(l.clone(), k)
            }
        })
        .collect();
    let d = 1 + m * (k - 1);
    let vertices: Vec<RVec> = (0..m)
        .map(|_| 0..k)
        .multi_cartesian_product()
        .map(|assignment| {
            let mut v = RVec::zeros(d);
            v[0] = Rat::one();
            for (g, &o) in assignment.iter().enumerate() {
                if o + 1 < k {
                    v[1 + g * (k - 1) + o] = Rat::one();
                }
            }
            v
        })
        .collect();
    // Positivity of every outcome probability.
    let mut halfspaces = Vec::new();
    for g in 0..m {
        let start = 1 + g * (k - 1);
        for o in 0..k - 1 {
            halfspaces.push(Halfspace::new(RVec::unit(d, start + o).scale(&-Rat::one()), int(0)));
        }
        let mut last = RVec::zeros(d);
        for o in 0..k - 1 {
            last[start + o] = Rat::one();
        }
        halfspaces.push(Halfspace::new(last, int(1)));
    }
    let name = match (m, k) {
        (2, 2) => "gbit".to_string(),
        (3, 2) => "cube".to_string(),
        _ => format!("boxworld({m},{k})"),
    };
    TheorySpec::from_trusted_polytope(name, measurements, Polytope { vertices, halfspaces })
}

/// The 2-in 2-out box-world system: the square with corners `(n, +-n, +-n)`.
pub fn make_gbit() -> TheorySpec {
    make_boxworld(2, 2).expect("valid parameters")
}

/// The 3-in 2-out box-world system: the cube circumscribing the Bloch ball.
pub fn make_cube() -> TheorySpec {
    make_boxworld(3, 2).expect("valid parameters")
}

/// Qubit: binary Z, X, Y with the Bloch-ball state space.
pub fn make_qubit() -> TheorySpec {
    TheorySpec::new(
        "qubit",
        vec![
            MeasurementSpec::branch("Z", 2),
            MeasurementSpec::fiducial("X", 2),
            MeasurementSpec::fiducial("Y", 2),
        ],
        StateSpaceSpec::Ball,
    )
    .expect("qubit is well formed")
}

/// Classical theory: a single `n`-outcome measurement whose states form a simplex.
pub fn make_classical(n: usize) -> Result<TheorySpec> {
    if n < 2 {
        return Err(argument(format!("classical theory needs N >= 2, got {n}")));
    }
    let vertices = (0..n)
        .map(|o| {
            let mut v = RVec::unit(n, 0);
            if o + 1 < n {
                v[1 + o] = Rat::one();
            }
            v
        })
        .collect();
    TheorySpec::new(
        format!("classical{n}"),
        vec![MeasurementSpec::branch("Z", n)],
        StateSpaceSpec::PolytopeV {
            vertices,
            halfspaces: None,
        },
    )
}

/// Contrast theory (constructed, not a standard model): binary Z and X with
/// normalized slice `|<X>| + |<Z>| <= 1`, so each pole fixes `<X> = 0`.
pub fn make_octahedron() -> TheorySpec {
    let h = rat(1, 2);
    let vertex = |z: Rat, x: Rat| RVec::new(vec![Rat::one(), z, x]);
    TheorySpec::new(
        "octahedron",
        vec![MeasurementSpec::branch("Z", 2), MeasurementSpec::fiducial("X", 2)],
        StateSpaceSpec::PolytopeV {
            vertices: vec![
                vertex(int(1), h.clone()),
                vertex(int(0), h.clone()),
                vertex(h.clone(), int(1)),
                vertex(h.clone(), int(0)),
            ],
            halfspaces: None,
        },
    )
    .expect("octahedron is well formed")
}

pub fn builtin(name: &str) -> Result<TheorySpec> {
    match name {
        "gbit" => Ok(make_gbit()),
        "cube" => Ok(make_cube()),
        "qubit" => Ok(make_qubit()),
        "classical2" => make_classical(2),
        "octahedron" => Ok(make_octahedron()),
        other => Err(argument(format!(
            "unknown builtin theory {other:?}; expected one of {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::exact::facet_enumeration;
    use crate::theory::{membership, StateVec};

    #[test]
    fn builder_sizes() {
        let g = make_gbit();
        assert_eq!(g.polytope().unwrap().vertices.len(), 4);
        assert_eq!(g.dim(), 3);
        let c = make_cube();
        assert_eq!(c.polytope().unwrap().vertices.len(), 8);
        assert_eq!((c.n_branches(), c.extra_freedom(), c.dim()), (2, 2, 4));
        let cl = make_classical(2).unwrap();
        assert_eq!(cl.polytope().unwrap().vertices.len(), 2);
        assert_eq!((cl.dim(), cl.extra_freedom()), (2, 0));
        let q = make_qubit();
        assert_eq!((q.n_branches(), q.extra_freedom(), q.dim()), (2, 2, 4));
    }

    #[test]
    fn boxworld_vertex_counts() {
        for m in 2..=3 {
            for k in 2..=3 {
                let t = make_boxworld(m, k).unwrap();
                assert_eq!(t.polytope().unwrap().vertices.len(), k.pow(m as u32));
                assert_eq!(t.dim(), k + (m - 1) * (k - 1));
            }
        }
        assert!(make_boxworld(1, 2).is_err());
        assert!(make_boxworld(2, 1).is_err());
        assert!(make_classical(1).is_err());
    }

    #[test]
    fn first_boxworld_vertex_is_all_outcomes_zero() {
        assert_eq!(make_gbit().polytope().unwrap().vertices[0], RVec::from_i64(&[1, 1, 1]));
    }

    #[test]
    fn boxworld_positivity_matches_facet_enumeration() {
        for (m, k) in [(2, 2), (3, 2), (2, 3)] {
            let t = make_boxworld(m, k).unwrap();
            let p = t.polytope().unwrap();
            let stripped: Vec<RVec> = p.vertices.iter().map(|v| RVec::new(v[1..].to_vec())).collect();
            let enumerated: BTreeSet<_> = facet_enumeration(&stripped)
                .unwrap()
                .into_iter()
                .map(|h| {
                    let mut a = vec![int(0)];
                    a.extend(h.a.into_inner());
                    Halfspace::new(RVec::new(a), h.b).normalized()
                })
                .collect();
            let analytic: BTreeSet<_> = p.halfspaces.iter().map(|h| h.normalized()).collect();
            assert_eq!(enumerated, analytic, "box-world({m},{k})");
        }
    }

    #[test]
    fn every_builtin_vertex_is_a_member() {
        for name in BUILTIN_NAMES {
            let t = builtin(name).unwrap();
            if let Some(p) = t.polytope() {
                for v in &p.vertices {
                    assert!(
                        membership(&t, &StateVec::minimal(v.clone())).unwrap().is_inside(),
                        "{name} {v}"
                    );
                }
            }
        }
        assert!(builtin("pr-box").is_err());
    }
}
